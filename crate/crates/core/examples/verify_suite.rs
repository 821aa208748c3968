//! The fast static checks of the verification suite.

use lpeuler::harness::config::RunConfig;
use lpeuler::harness::suite::{run_suite, Suite};

fn main() -> lpeuler::Result<()> {
    let cfg = RunConfig::from_json(r#"{"grid": {"N": 512}}"#)?;
    for suite in [Suite::Partition, Suite::Supports, Suite::Mechanism] {
        for c in run_suite(&cfg, suite, &[]).checks {
            println!("{}", c.line());
        }
    }
    Ok(())
}
