//! Simulation runs driven by a `RunConfig`: the main run and the `k_max`
//! sweep that shares its time step.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::counterexample::{build_alpha, build_u0, lattice_convective, CounterexampleSpec};
use crate::dynamics::{simulate, tracked_points, SimulationConfig, TraceRecord, TrackedPoint};
use crate::error::Result;
use crate::norms::w1inf_norm;
use crate::paradiff::leray_symbol;
use crate::spectral::{TorusGrid, C64};

/// One run together with everything needed to analyze it later.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: RunConfig,
    pub spec: CounterexampleSpec,
    pub w1inf_initial: f64,
    pub w1inf_final: f64,
    /// `-P F((u0.grad)u0)` at the tracked points from the sparse convolution,
    /// packed as `[re, im, re, im]`.
    pub oracle_rates: Vec<[f64; 4]>,
    pub trace: TraceRecord,
}

impl RunArtifact {
    pub fn rates(&self) -> Vec<[C64; 2]> {
        self.oracle_rates.iter().map(|c| [C64::new(c[0], c[1]), C64::new(c[2], c[3])]).collect()
    }

    pub fn k_max(&self) -> i32 {
        self.spec.k_max
    }
}

/// Sparse-oracle rate `d/dt u^(xi~^k)` at `t = 0`.
pub fn oracle_rates(spec: &CounterexampleSpec, grid: &TorusGrid, tracked: &[TrackedPoint]) -> Result<Vec<[C64; 2]>> {
    let alpha = build_alpha(spec, grid)?;
    Ok(tracked
        .iter()
        .map(|p| {
            let f = leray_symbol(p.xi, lattice_convective(&alpha, p.m));
            [-f[0], -f[1]]
        })
        .collect())
}

fn pack(v: [C64; 2]) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

/// Runs `spec` with the settings of `cfg`; `t1` overrides the configured
/// final time and `adjust` edits the simulation settings before the run.
pub fn run(
    cfg: &RunConfig,
    spec: &CounterexampleSpec,
    t1: Option<f64>,
    adjust: impl FnOnce(&mut SimulationConfig),
) -> Result<RunArtifact> {
    let grid = cfg.grid()?;
    let u0 = build_u0(spec, &grid)?;
    let w1inf_initial = w1inf_norm(&u0)?;
    let t1 = t1.or(cfg.simulation.t1).unwrap_or_else(|| RunConfig::default_t1(w1inf_initial));
    let mut sim = cfg.simulation_config(t1)?;
    adjust(&mut sim);
    let ks: Vec<i32> = cfg
        .simulation
        .tracked_k
        .clone()
        .unwrap_or_else(|| (1..=spec.k_max).collect())
        .into_iter()
        .filter(|&k| k <= spec.k_max)
        .collect();
    let tracked = tracked_points(spec, &grid, &ks)?;
    let rates = oracle_rates(spec, &grid, &tracked)?;
    let steps = sim.steps()?;
    let mut w1inf_final = w1inf_initial;
    log::info!("run k_max {} theta {} N {} T1 {t1:e} steps {steps}", spec.k_max, spec.theta, grid.n());
    let trace = simulate(&sim, &u0, &tracked, |step, _, u| {
        if step == steps && step > 0 {
            w1inf_final = w1inf_norm(u)?;
        }
        if step > 0 && step % 20 == 0 {
            log::info!("step {step}/{steps}");
        }
        Ok(())
    })?;
    let mut config = cfg.clone();
    config.counterexample.k_max = spec.k_max;
    config.counterexample.theta = spec.theta;
    config.simulation.t1 = Some(t1);
    config.simulation.dt = Some(trace.config.dt);
    config.simulation.tracked_k = Some(ks);
    Ok(RunArtifact {
        config,
        spec: *spec,
        w1inf_initial,
        w1inf_final,
        oracle_rates: rates.into_iter().map(pack).collect(),
        trace,
    })
}

/// The main run plus one run per extra `k_max`, each stopped at the main
/// run's anchor time with the same time step.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub main: RunArtifact,
    pub sweep: Vec<RunArtifact>,
}

impl Experiment {
    /// Every run, ordered by `k_max`.
    pub fn runs(&self) -> Vec<&RunArtifact> {
        let mut all: Vec<&RunArtifact> = std::iter::once(&self.main).chain(&self.sweep).collect();
        all.sort_by_key(|r| r.k_max());
        all
    }
}

pub fn sweep_run(cfg: &RunConfig, main: &RunArtifact, k_max: i32) -> Result<RunArtifact> {
    let mut spec = main.spec;
    spec.k_max = k_max;
    let anchor = main.trace.anchor_step;
    let dt = main.trace.config.dt;
    run(cfg, &spec, Some(anchor as f64 * dt), |s| {
        s.dt = dt;
        s.cadence = 0;
        s.dyadic = false;
        s.partial_sums.clear();
        s.anchor_step = Some(anchor);
    })
}

pub fn run_experiment(cfg: &RunConfig, spec: &CounterexampleSpec, sweep: &[i32]) -> Result<Experiment> {
    let main = run(cfg, spec, None, |_| {})?;
    let mut runs = Vec::new();
    for &k in sweep {
        if k != spec.k_max {
            runs.push(sweep_run(cfg, &main, k)?);
        }
    }
    Ok(Experiment { main, sweep: runs })
}
