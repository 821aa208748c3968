//! Run configuration: a JSON document with `grid`, `counterexample`,
//! `simulation` and `output` sections. Unknown keys are rejected and every
//! omitted value is filled before the configuration is echoed into metadata.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::counterexample::{CounterexampleSpec, Variant};
use crate::dynamics::{SimulationConfig, WeakSequenceSpec};
use crate::error::{Error, Result};
use crate::filter::FilterBank;
use crate::spectral::{Padding, TorusGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 2048, l: 16.0 * PI }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleSection {
    pub variant: Variant,
    pub s: f64,
    pub theta: f64,
    pub k_max: i32,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        Self { variant: Variant::GridAdapted, s: 3.0, theta: PI / 6.0, k_max: 5, delta: None, rho: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Time step; defaults to `T1 / steps`.
    pub dt: Option<f64>,
    /// Final time; defaults to `0.1 / ||u0||_{W^{1,inf}}`.
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    pub steps: usize,
    pub cadence: usize,
    pub tracked_k: Option<Vec<i32>>,
    pub epsilons: Vec<f64>,
    pub weak_sequence: Option<WeakSequenceSpec>,
    pub padding: Padding,
    pub partial_sums: Option<Vec<i32>>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            dt: None,
            t1: None,
            steps: 200,
            cadence: 10,
            tracked_k: None,
            epsilons: vec![0.5],
            weak_sequence: None,
            padding: Padding::TwoThirds,
            partial_sums: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Lpf1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv, Format::Svg, Format::Lpf1] }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub counterexample: CounterexampleSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.fill_defaults();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fills every value that does not depend on the initial data.
    pub fn fill_defaults(&mut self) {
        let base = self.base_spec();
        let c = &mut self.counterexample;
        c.delta.get_or_insert(base.delta);
        c.rho.get_or_insert(base.rho);
        let k_max = c.k_max;
        let j_max = self.filter_jmax();
        let sim = &mut self.simulation;
        sim.tracked_k.get_or_insert_with(|| (1..=k_max).collect());
        sim.weak_sequence.get_or_insert_with(|| WeakSequenceSpec::geometric(j_max));
        sim.partial_sums.get_or_insert_with(|| vec![2, 3, 4, 5]);
    }

    fn base_spec(&self) -> CounterexampleSpec {
        match self.counterexample.variant {
            Variant::Faithful => CounterexampleSpec::faithful(self.counterexample.k_max),
            Variant::GridAdapted => CounterexampleSpec::grid_adapted(self.counterexample.k_max),
        }
    }

    fn filter_jmax(&self) -> i32 {
        self.grid().map(|g| FilterBank::new(g).j_max()).unwrap_or(0)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid.n, self.grid.l)
    }

    pub fn spec(&self) -> CounterexampleSpec {
        let mut spec = self.base_spec().with_theta(self.counterexample.theta);
        spec.s = self.counterexample.s;
        spec.delta = self.counterexample.delta.unwrap_or(spec.delta);
        spec.rho = self.counterexample.rho.unwrap_or(spec.rho);
        spec
    }

    pub fn validate(&self) -> Result<()> {
        self.grid().map_err(|e| Error::Config(format!("grid: {e}")))?;
        self.spec().validate().map_err(|e| Error::Config(format!("counterexample: {e}")))?;
        let sim = &self.simulation;
        if let Some(t1) = sim.t1 {
            if !(t1 >= 0.0) || !t1.is_finite() {
                return Err(Error::Config(format!("simulation.T1 must be finite and >= 0, got {t1}")));
            }
        }
        if let Some(dt) = sim.dt {
            if dt == 0.0 || !dt.is_finite() {
                return Err(Error::Config(format!("simulation.dt must be finite and nonzero, got {dt}")));
            }
        }
        if sim.dt.is_none() && sim.steps == 0 {
            return Err(Error::Config("simulation.steps must be positive when dt is omitted".into()));
        }
        if let Some(ks) = &sim.tracked_k {
            if ks.is_empty() || ks.iter().any(|&k| k < 1 || k > self.counterexample.k_max) {
                return Err(Error::Config(format!(
                    "simulation.tracked_k must be nonempty and lie in [1, {}]",
                    self.counterexample.k_max
                )));
            }
        }
        if sim.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("simulation.epsilons must be positive".into()));
        }
        if let Some(w) = &sim.weak_sequence {
            w.validate().map_err(|e| Error::Config(format!("simulation.weak_sequence: {e}")))?;
        }
        Ok(())
    }

    /// Default final time from the initial `W^{1,inf}` norm.
    pub fn default_t1(w1inf: f64) -> f64 {
        0.1 / w1inf
    }

    /// Simulation settings once `T1` is known. Omitted `dt` divides `T1`
    /// into `steps` steps; a negative `dt` runs backward.
    pub fn simulation_config(&self, t1: f64) -> Result<SimulationConfig> {
        let sim = &self.simulation;
        let j_max = self.filter_jmax();
        let mut cfg = SimulationConfig::new(t1, sim.steps, self.counterexample.s, j_max);
        if let Some(dt) = sim.dt {
            cfg.dt = dt;
        }
        cfg.cadence = sim.cadence;
        cfg.epsilons = sim.epsilons.clone();
        cfg.weak = sim.weak_sequence.clone().unwrap_or_else(|| WeakSequenceSpec::geometric(j_max));
        cfg.padding = sim.padding;
        cfg.partial_sums = sim.partial_sums.clone().unwrap_or_default();
        cfg.validate().map_err(|e| Error::Config(format!("simulation: {e}")))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c.grid.n, 2048);
        assert_eq!(c.counterexample.delta, Some(0.25));
        assert_eq!(c.simulation.tracked_k, Some(vec![1, 2, 3, 4, 5]));
        assert_eq!(c.simulation.weak_sequence.as_ref().unwrap().coefficients.len(), 9);
        let echoed = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&echoed).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let e = RunConfig::from_json("{\n  \"grid\": {\"N\": 64, \"size\": 3}\n}").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("line 2") && m.contains("size"), "{m}");
        assert!(RunConfig::from_json("{\"grid\": ").is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(RunConfig::from_json(r#"{"grid": {"N": 100}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"counterexample": {"s": 2.0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"simulation": {"tracked_k": [9]}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"simulation": {"T1": -1}}"#).is_err());
    }
}
