use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::analysis::{approximant_report, ApproximantReport};
use super::weak::{WeakFunctional, WeakSequenceSpec};
use super::Euler;
use crate::counterexample::CounterexampleSpec;
use crate::error::{Error, Result};
use crate::filter::{FilterBank, JRange};
use crate::norms::BlockSynth;
use crate::paradiff::divergence_residual;
use crate::spectral::{Padding, SpectralField, TorusGrid, C64};

/// Resolved settings of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t1: f64,
    /// Norm snapshots every `cadence` steps; `0` keeps only the endpoints,
    /// the anchor and the dyadic steps.
    pub cadence: usize,
    pub s: f64,
    pub epsilons: Vec<f64>,
    pub weak: WeakSequenceSpec,
    pub padding: Padding,
    /// Step of the reference time `t*`; defaults to a quarter of the run.
    pub anchor_step: Option<usize>,
    /// Also snapshot at steps `1, 2, 4, 8, ...`.
    pub dyadic: bool,
    /// Partial-sum indices examined at the final time.
    pub partial_sums: Vec<i32>,
    /// Skip all norm snapshots when false.
    pub norms: bool,
}

impl SimulationConfig {
    /// `steps` steps of RK4 over `[0, t1]`.
    pub fn new(t1: f64, steps: usize, s: f64, j_max: i32) -> Self {
        Self {
            dt: if steps == 0 { 0.0 } else { t1 / steps as f64 },
            t1,
            cadence: 10,
            s,
            epsilons: vec![0.5],
            weak: WeakSequenceSpec::geometric(j_max),
            padding: Padding::TwoThirds,
            anchor_step: None,
            dyadic: true,
            partial_sums: Vec::new(),
            norms: true,
        }
    }

    pub fn steps(&self) -> Result<usize> {
        if !(self.t1 >= 0.0) || !self.t1.is_finite() {
            return Err(Error::InvalidArgument(format!("final time {} must be finite and >= 0", self.t1)));
        }
        if self.t1 == 0.0 {
            return Ok(0);
        }
        if self.dt == 0.0 || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {} must be finite and nonzero", self.dt)));
        }
        let n = (self.t1 / self.dt.abs()).round();
        if (n * self.dt.abs() - self.t1).abs() > 1e-9 * self.t1 {
            return Err(Error::InvalidArgument(format!("final time {} is not a multiple of dt {}", self.t1, self.dt)));
        }
        Ok(n as usize)
    }

    pub fn anchor(&self, steps: usize) -> usize {
        self.anchor_step.unwrap_or(steps / 4).min(steps)
    }

    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        self.weak.validate()?;
        if self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidArgument("every epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Lattice point followed in time, `nearest_lattice(xi^k)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrackedPoint {
    pub k: i32,
    pub m: [i64; 2],
    pub xi: [f64; 2],
    /// `2^{ks}`.
    pub weight: f64,
}

pub fn tracked_points(spec: &CounterexampleSpec, grid: &TorusGrid, ks: &[i32]) -> Result<Vec<TrackedPoint>> {
    ks.iter()
        .map(|&k| {
            let m = grid.nearest_lattice(spec.xi(k))?;
            Ok(TrackedPoint { k, m, xi: grid.lattice_point(m), weight: 2f64.powf(k as f64 * spec.s) })
        })
        .collect()
}

/// Cheap diagnostics recorded after every step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    /// `[re u1, im u1, re u2, im u2]` at each tracked point.
    pub coefficients: Vec<[f64; 4]>,
    pub weak: f64,
    pub energy: f64,
    pub mean: f64,
}

impl TraceRow {
    pub fn coefficient(&self, i: usize) -> [C64; 2] {
        let c = self.coefficients[i];
        [C64::new(c[0], c[1]), C64::new(c[2], c[3])]
    }
}

/// Sample-space diagnostics recorded at snapshot steps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormSample {
    pub step: usize,
    pub t: f64,
    /// Aligned with `TraceRecord::norm_labels`.
    pub values: Vec<Option<f64>>,
    /// `N(u_eps)` for every configured `eps`.
    pub weak_mollified: Vec<f64>,
    pub divergence: f64,
    /// Block carrying most of `||u(t)||_{F^s}`.
    pub dominant: i32,
    /// Block carrying most of `||u(t) - u(0)||_{F^s}`.
    pub dominant_change: i32,
}

/// Everything a run records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub config: SimulationConfig,
    pub grid: TorusGrid,
    pub j_range: JRange,
    pub tracked: Vec<TrackedPoint>,
    pub anchor_step: usize,
    pub norm_labels: Vec<String>,
    pub rows: Vec<TraceRow>,
    pub norms: Vec<NormSample>,
    /// Right-hand side at the tracked points at `t = 0`.
    pub initial_rate: Vec<[f64; 4]>,
    pub energy_drift: f64,
    pub max_divergence: f64,
    pub max_mean: f64,
    pub approximants: Option<ApproximantReport>,
}

/// Column label for a Triebel-Lizorkin norm of kind `u` (the state), `d0`
/// (change since `t = 0`) or `da` (change since the anchor).
pub fn norm_label(kind: &str, s: f64) -> String {
    format!("{kind}_F{s}")
}

fn pack(v: [C64; 2]) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

impl TraceRecord {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.norm_labels.iter().position(|l| l == label)
    }

    /// `(t, value)` pairs of one norm column, skipping missing entries.
    pub fn norm_series(&self, label: &str) -> Result<Vec<(usize, f64, f64)>> {
        let i = self
            .label_index(label)
            .ok_or_else(|| Error::InvalidArgument(format!("trace has no column {label}")))?;
        Ok(self.norms.iter().filter_map(|n| n.values[i].map(|v| (n.step, n.t, v))).collect())
    }

    pub fn sample_at(&self, step: usize) -> Option<&NormSample> {
        self.norms.iter().find(|n| n.step == step)
    }

    /// `g_k(t) = 2^{ks} |u^(xi~^k, t)|` for tracked point `i`.
    pub fn g(&self, i: usize) -> Vec<f64> {
        let w = self.tracked[i].weight;
        self.rows
            .iter()
            .map(|r| {
                let c = r.coefficient(i);
                w * c[0].norm().hypot(c[1].norm())
            })
            .collect()
    }

    /// One row per step: `t`, per tracked `k` the two components' real and
    /// imaginary parts and the Euclidean modulus, the norm columns (blank
    /// between snapshots), `N`, `N` of each mollified field, energy, mean,
    /// divergence residual and the step index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for p in &self.tracked {
            let k = p.k;
            let _ = write!(out, ",k{k}_u1_re,k{k}_u1_im,k{k}_u2_re,k{k}_u2_im,k{k}_abs");
        }
        for l in &self.norm_labels {
            let _ = write!(out, ",{l}");
        }
        out.push_str(",N");
        for e in &self.config.epsilons {
            let _ = write!(out, ",N_eps{e}");
        }
        out.push_str(",energy,mean,divergence,step\n");
        let blank = |out: &mut String, n: usize| (0..n).for_each(|_| out.push(','));
        for r in &self.rows {
            let _ = write!(out, "{}", r.t);
            for c in &r.coefficients {
                let abs = c[0].hypot(c[1]).hypot(c[2].hypot(c[3]));
                let _ = write!(out, ",{},{},{},{},{}", c[0], c[1], c[2], c[3], abs);
            }
            let snap = self.sample_at(r.step);
            match snap {
                Some(n) => n.values.iter().for_each(|v| match v {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push(','),
                }),
                None => blank(&mut out, self.norm_labels.len()),
            }
            let _ = write!(out, ",{}", r.weak);
            match snap {
                Some(n) => n.weak_mollified.iter().for_each(|v| {
                    let _ = write!(out, ",{v}");
                }),
                None => blank(&mut out, self.config.epsilons.len()),
            }
            let _ = write!(out, ",{},{},", r.energy, r.mean);
            if let Some(n) = snap {
                let _ = write!(out, "{}", n.divergence);
            }
            let _ = writeln!(out, ",{}", r.step);
        }
        out
    }
}

fn snapshot_steps(cfg: &SimulationConfig, steps: usize, anchor: usize) -> BTreeSet<usize> {
    let mut set = BTreeSet::from([0, steps, anchor]);
    if cfg.cadence > 0 {
        set.extend((0..=steps).step_by(cfg.cadence));
    }
    if cfg.dyadic {
        let mut p = 1;
        while p <= steps {
            set.insert(p);
            p *= 2;
        }
    }
    set
}

/// Integrates from `u0` over `[0, t1]`, recording the configured diagnostics.
/// `observe` sees the state after every step, including step 0.
pub fn simulate(
    cfg: &SimulationConfig,
    u0: &SpectralField,
    tracked: &[TrackedPoint],
    mut observe: impl FnMut(usize, f64, &SpectralField) -> Result<()>,
) -> Result<TraceRecord> {
    cfg.validate()?;
    let grid = *u0.grid();
    let steps = cfg.steps()?;
    let anchor = cfg.anchor(steps);
    let idx: Vec<usize> = tracked
        .iter()
        .map(|p| grid.index(p.m).ok_or_else(|| Error::BeyondNyquist(p.xi[0], p.xi[1], grid.nyquist())))
        .collect::<Result<_>>()?;
    let fb = FilterBank::new(grid);
    let mut euler = Euler::new(grid, cfg.padding);
    let mut weak = WeakFunctional::new(&fb, &cfg.weak, cfg.s, 0.0)?;
    let mut mollified = cfg
        .epsilons
        .iter()
        .map(|&e| WeakFunctional::new(&fb, &cfg.weak, cfg.s, e))
        .collect::<Result<Vec<_>>>()?;
    let mut s_list = vec![cfg.s, cfg.s - 1.0];
    s_list.extend(cfg.epsilons.iter().map(|e| cfg.s - e));
    let mut labels: Vec<String> = s_list.iter().map(|&s| norm_label("u", s)).collect();
    labels.extend(s_list.iter().map(|&s| norm_label("d0", s)));
    labels.push(norm_label("da", cfg.s - 1.0));
    let snaps = if cfg.norms { snapshot_steps(cfg, steps, anchor) } else { BTreeSet::new() };
    let area = grid.period() * grid.period();

    let mut synth = BlockSynth::new(&fb);
    let mut u = u0.clone();
    let mut anchor_state: Option<SpectralField> = None;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut norms = Vec::new();
    let mut initial_rate = Vec::new();
    for step in 0..=steps {
        let t = step as f64 * cfg.dt;
        let mean = (0..2).map(|c| u.component(c)[0].norm()).fold(0.0, f64::max) / area;
        rows.push(TraceRow {
            step,
            t,
            coefficients: idx.iter().map(|&i| pack([u.component(0)[i], u.component(1)[i]])).collect(),
            weak: weak.eval(&u)?,
            energy: 0.5 * u.l2_squared(),
            mean,
        });
        if snaps.contains(&step) {
            let range = fb.nonhomogeneous_range();
            let own = synth.scan(&u, range, false, &s_list)?;
            let change = synth.scan(&u.sub(u0)?, range, false, &s_list)?;
            let mut values: Vec<Option<f64>> = own.values.iter().chain(&change.values).map(|v| Some(*v)).collect();
            values.push(match &anchor_state {
                Some(a) if step > anchor => Some(synth.scan(&u.sub(a)?, range, false, &[cfg.s - 1.0])?.values[0]),
                _ => None,
            });
            norms.push(NormSample {
                step,
                t,
                values,
                weak_mollified: mollified.iter_mut().map(|w| w.eval(&u)).collect::<Result<_>>()?,
                divergence: divergence_residual(&u)?,
                dominant: own.dominant_block(0),
                dominant_change: change.dominant_block(0),
            });
            log::debug!("snapshot step {step} t {t:e}");
        }
        if step == anchor {
            anchor_state = Some(u.clone());
        }
        observe(step, t, &u)?;
        if step < steps {
            let (next, rate) = euler.step_with_rate(&u, cfg.dt)?;
            if step == 0 {
                initial_rate = idx.iter().map(|&i| pack([rate.component(0)[i], rate.component(1)[i]])).collect();
            }
            u = next;
        }
    }
    if steps == 0 {
        let rate = euler.rhs(u0)?;
        initial_rate = idx.iter().map(|&i| pack([rate.component(0)[i], rate.component(1)[i]])).collect();
    }
    let e0 = rows[0].energy;
    let energy_drift = rows
        .iter()
        .map(|r| if e0 == 0.0 { r.energy.abs() } else { ((r.energy - e0) / e0).abs() })
        .fold(0.0, f64::max);
    let approximants = if cfg.partial_sums.is_empty() {
        None
    } else {
        let eps = cfg.epsilons.first().copied().unwrap_or(0.5);
        Some(approximant_report(&fb, &u, cfg.s, eps, &cfg.partial_sums, &cfg.weak, &cfg.epsilons)?)
    };
    Ok(TraceRecord {
        config: cfg.clone(),
        grid,
        j_range: fb.nonhomogeneous_range(),
        tracked: tracked.to_vec(),
        anchor_step: anchor,
        norm_labels: labels,
        max_divergence: norms.iter().map(|n| n.divergence).fold(0.0, f64::max),
        max_mean: rows.iter().map(|r| r.mean).fold(0.0, f64::max),
        rows,
        norms,
        initial_rate,
        energy_drift,
        approximants,
    })
}
