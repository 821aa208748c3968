use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpeuler::harness::commands::{cmd_analyze, cmd_build, cmd_plot, cmd_simulate, cmd_verify, plot_inputs, trace_files};
use lpeuler::harness::config::RunConfig;
use lpeuler::harness::suite::Suite;
use lpeuler::Error;

#[derive(Parser)]
#[command(name = "lpeuler", version, about = "Littlewood-Paley toolkit and complex Euler norm-inflation laboratory")]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true, env = "LP_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads. Computation is single-threaded; the value is validated and logged.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build u0, its sparse spectrum, norms and mechanism constants.
    Build,
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// k_max values of the dynamical sweep.
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        kmax_sweep: Vec<i32>,
    },
    /// Integrate complex Euler from u0 and write traces.
    Simulate {
        /// Extra k_max runs, stopped at the anchor time.
        #[arg(long, value_delimiter = ',')]
        kmax_sweep: Vec<i32>,
    },
    /// Fit inflation rates, continuity and discontinuity evidence from traces.
    Analyze {
        /// Trace JSON files; defaults to the traces in the output directory.
        traces: Vec<PathBuf>,
    },
    /// Render SVG charts from trace or discontinuity CSV files.
    Plot {
        /// CSV files; defaults to those in the output directory.
        inputs: Vec<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Format(_) => 2,
        _ => 1,
    }
}

fn execute(cli: Cli) -> Result<bool, Error> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_json("{}")?,
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    std::fs::create_dir_all(&out)?;
    log::info!("threads = {}; output = {}", cli.threads, out.display());
    let dir: &Path = &out;
    match cli.command {
        Command::Build => cmd_build(&cfg, dir),
        Command::Verify { suite, kmax_sweep } => cmd_verify(&cfg, dir, suite, &kmax_sweep),
        Command::Simulate { kmax_sweep } => cmd_simulate(&cfg, dir, &kmax_sweep),
        Command::Analyze { traces } => {
            let traces = if traces.is_empty() { trace_files(dir)? } else { traces };
            cmd_analyze(&traces, dir)
        }
        Command::Plot { inputs } => {
            let inputs = if inputs.is_empty() { plot_inputs(dir) } else { inputs };
            cmd_plot(&inputs, dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
