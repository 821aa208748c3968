use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilterBank;
use crate::spectral::fft::{self, Fft2};
use crate::spectral::{self, SpectralField, C64};

/// Summable weights `k_j`, `j = -1, 0, 1, ...`; entry `i` holds `k_{i-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakSequenceSpec {
    pub coefficients: Vec<f64>,
}

impl WeakSequenceSpec {
    /// `k_{-1} = 1`, `k_j = 2^{-j}` for `0 <= j <= j_max`.
    pub fn geometric(j_max: i32) -> Self {
        let coefficients = (-1..=j_max).map(|j| if j < 0 { 1.0 } else { 2f64.powi(-j) }).collect();
        Self { coefficients }
    }

    pub fn one_hot(j0: i32, j_max: i32) -> Self {
        let coefficients = (-1..=j_max).map(|j| if j == j0 { 1.0 } else { 0.0 }).collect();
        Self { coefficients }
    }

    pub fn coefficient(&self, j: i32) -> f64 {
        if j < -1 {
            return 0.0;
        }
        self.coefficients.get((j + 1) as usize).copied().unwrap_or(0.0)
    }

    pub fn l1(&self) -> f64 {
        self.coefficients.iter().map(|k| k.abs()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

/// `N(v) = || sum_j 2^{js} k_j 2^{-eps j} Delta_j v ||_{L^1}` with the
/// combined symbol cached once.
pub struct WeakFunctional {
    symbol: Vec<f64>,
    plan: Fft2,
    buf: Vec<C64>,
    grid: spectral::TorusGrid,
}

impl WeakFunctional {
    /// `eps = 0` gives the functional itself; `eps > 0` evaluates it on the
    /// mollified field `sum_j 2^{-eps j} Delta_j v`.
    pub fn new(fb: &FilterBank, spec: &WeakSequenceSpec, s: f64, eps: f64) -> Result<Self> {
        spec.validate()?;
        let grid = *fb.grid();
        let mut symbol = vec![0.0; grid.len()];
        for j in -1..=fb.j_max() {
            let w = spec.coefficient(j) * 2f64.powf(j as f64 * (s - eps));
            if w != 0.0 {
                fb.visit_block(j, false, |i, h| symbol[i] += w * h);
            }
        }
        let n = grid.n();
        Ok(Self { symbol, plan: Fft2::new(n), buf: vec![C64::default(); n * n], grid })
    }

    pub fn eval(&mut self, v: &SpectralField) -> Result<f64> {
        spectral::check_same_grid(&self.grid, v.grid())?;
        let n = self.grid.n();
        let scale = 1.0 / (self.grid.period() * self.grid.period());
        let mut modulus = vec![0.0f64; n * n];
        for c in v.components() {
            for ((b, x), w) in self.buf.iter_mut().zip(c).zip(&self.symbol) {
                *b = x * (w * scale);
            }
            let active = fft::active_columns(&self.buf, n);
            if active.is_empty() {
                continue;
            }
            self.plan.inverse(&mut self.buf, &active);
            for (m, b) in modulus.iter_mut().zip(&self.buf) {
                *m += b.norm_sqr();
            }
        }
        Ok(modulus.iter().map(|m| m.sqrt()).sum::<f64>() * self.grid.cell_area())
    }
}

/// One-off evaluation of `N(v)`.
pub fn weak_functional(fb: &FilterBank, v: &SpectralField, spec: &WeakSequenceSpec, s: f64) -> Result<f64> {
    WeakFunctional::new(fb, spec, s, 0.0)?.eval(v)
}
