//! A short complex Euler run: the tracked coefficients grow at rates that
//! double from shell to shell.

use lpeuler::harness::config::RunConfig;
use lpeuler::harness::experiment::run;
use lpeuler::harness::suite::inflation;

fn main() -> lpeuler::Result<()> {
    let cfg = RunConfig::from_json(
        r#"{"grid": {"N": 512}, "counterexample": {"k_max": 3, "theta": 0.0}, "simulation": {"steps": 40, "cadence": 0}}"#,
    )?;
    let a = run(&cfg, &cfg.spec(), None, |_| {})?;
    let report = inflation(&a)?;
    for r in &report.rows {
        println!("k = {}: sigma = {:.4e}, predicted {:.4e}", r.k, r.sigma, r.predicted);
    }
    for (k, q) in &report.ratios {
        println!("sigma_{} / sigma_{k} = {q:.3}", k + 1);
    }
    println!("energy drift of the complex run = {:.3e}", a.trace.energy_drift);
    Ok(())
}
