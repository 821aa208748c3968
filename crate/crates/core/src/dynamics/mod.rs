//! Pseudo-spectral incompressible Euler on the torus, classical RK4 in time,
//! and the diagnostics recorded along a run.

mod analysis;
mod trace;
mod weak;

pub use analysis::{
    approximant_report, continuity_probe, mollify, discontinuity_evidence, duhamel_check, inflation_analysis,
    ApproximantReport, ContinuityReport, DiscontinuityReport, DiscontinuityRow, DuhamelReport, InflationReport,
    InflationRow, LipschitzFit, PartialSumRow,
};
pub use trace::{
    norm_label, simulate, tracked_points, NormSample, SimulationConfig, TraceRecord, TraceRow, TrackedPoint,
};
pub use weak::{weak_functional, WeakFunctional, WeakSequenceSpec};

use crate::error::{Error, Result};
use crate::paradiff::leray_symbol;
use crate::spectral::{Dealiaser, Padding, SpectralField, TorusGrid, C64};

/// Largest admissible `dt * max|u| * max|xi|`.
pub const STABILITY_BOUND: f64 = 0.5;

/// `max |xi . u^(xi)| / max |xi| |u^(xi)|` over the coefficients.
pub fn spectral_divergence(u: &SpectralField) -> f64 {
    let g = u.grid();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 0..g.len() {
        let xi = g.wavevector(i);
        let (a, b) = (u.component(0)[i], u.component(1)[i]);
        num = num.max((a * xi[0] + b * xi[1]).norm());
        den = den.max(xi[0].hypot(xi[1]) * a.norm().hypot(b.norm()));
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Right-hand side `-P div(u (x) u)` and its RK4 driver on one grid.
pub struct Euler {
    grid: TorusGrid,
    dealias: Dealiaser,
    a: Vec<C64>,
    b: Vec<C64>,
    ha: Vec<C64>,
    hb: Vec<C64>,
    max_xi: f64,
}

impl Euler {
    pub fn new(grid: TorusGrid, padding: Padding) -> Self {
        let n = grid.len();
        Self {
            grid,
            dealias: Dealiaser::new(grid, padding),
            a: Vec::new(),
            b: Vec::new(),
            ha: vec![C64::default(); n],
            hb: vec![C64::default(); n],
            max_xi: std::f64::consts::SQRT_2 * grid.nyquist(),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Writes the right-hand side into `out` and returns `max |u|` sampled on
    /// the padded grid.
    ///
    /// With `A = (u1^2 - u2^2)/2` and `B = u1 u2`, `div(u (x) u)` equals
    /// `(d1 A + d2 B, d1 B - d2 A)` up to the gradient of `|u|^2/2`, which the
    /// projection removes.
    fn eval(&mut self, u: &[Vec<C64>], out: &mut [Vec<C64>]) -> f64 {
        self.dealias.to_physical(&u[0], &mut self.a);
        self.dealias.to_physical(&u[1], &mut self.b);
        let mut speed = 0.0f64;
        for (x, y) in self.a.iter_mut().zip(self.b.iter_mut()) {
            let (p, q) = (*x, *y);
            speed = speed.max((p.norm_sqr() + q.norm_sqr()).sqrt());
            *x = (p * p - q * q) * 0.5;
            *y = p * q;
        }
        self.dealias.to_spectral(&mut self.a, &mut self.ha);
        self.dealias.to_spectral(&mut self.b, &mut self.hb);
        let i = C64::new(0.0, 1.0);
        let (o1, o2) = out.split_at_mut(1);
        for idx in 0..self.grid.len() {
            let xi = self.grid.wavevector(idx);
            let (ha, hb) = (self.ha[idx], self.hb[idx]);
            let w = [i * (ha * xi[0] + hb * xi[1]), i * (hb * xi[0] - ha * xi[1])];
            let p = leray_symbol(xi, w);
            o1[0][idx] = -p[0];
            o2[0][idx] = -p[1];
        }
        o1[0][0] = C64::default();
        o2[0][0] = C64::default();
        speed
    }

    fn check(u: &SpectralField) -> Result<()> {
        if u.ncomp() != 2 {
            return Err(Error::ComponentMismatch { expected: 2, got: u.ncomp() });
        }
        Ok(())
    }

    /// `-P((u.grad)u)`, dealiased, with zero mean. `u` must be divergence
    /// free to `1e-10` relative.
    pub fn rhs(&mut self, u: &SpectralField) -> Result<SpectralField> {
        Self::check(u)?;
        crate::spectral::check_same_grid(&self.grid, u.grid())?;
        let r = spectral_divergence(u);
        if r > 1e-10 {
            return Err(Error::NotDivergenceFree(r));
        }
        let mut out = vec![vec![C64::default(); self.grid.len()]; 2];
        self.eval(u.components(), &mut out);
        Ok(SpectralField::from_parts(self.grid, out, u.real_valued()))
    }

    /// One classical RK4 step. Also returns the first-stage right-hand side.
    pub fn step_with_rate(&mut self, u: &SpectralField, dt: f64) -> Result<(SpectralField, SpectralField)> {
        Self::check(u)?;
        crate::spectral::check_same_grid(&self.grid, u.grid())?;
        let n = self.grid.len();
        let zero = || vec![vec![C64::default(); n]; 2];
        let base = u.components();
        let mut k = zero();
        let mut stage = zero();
        let speed = self.eval(base, &mut k);
        if !speed.is_finite() {
            return Err(Error::NonFinite);
        }
        let cfl = dt.abs() * speed * self.max_xi;
        if cfl > STABILITY_BOUND {
            return Err(Error::Unstable(cfl));
        }
        let rate = SpectralField::from_parts(self.grid, k.clone(), u.real_valued());
        let mut acc = base.to_vec();
        let weights = [0.5, 0.5, 1.0];
        let sums = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0];
        for (w, s) in weights.iter().zip(sums) {
            for c in 0..2 {
                for (a, kv) in acc[c].iter_mut().zip(&k[c]) {
                    *a += kv * (s * dt);
                }
                for ((st, b), kv) in stage[c].iter_mut().zip(&base[c]).zip(&k[c]) {
                    *st = b + kv * (w * dt);
                }
            }
            self.eval(&stage, &mut k);
        }
        for c in 0..2 {
            for (a, kv) in acc[c].iter_mut().zip(&k[c]) {
                *a += kv * (dt / 6.0);
            }
        }
        if acc.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok((SpectralField::from_parts(self.grid, acc, u.real_valued()), rate))
    }

    pub fn step(&mut self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        Ok(self.step_with_rate(u, dt)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_constant_fields_are_steady() {
        let g = TorusGrid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let mut e = Euler::new(g, Padding::default());
        let z = SpectralField::zeros(g, 2);
        assert_eq!(e.step(&z, 0.1).unwrap().max_abs(), 0.0);
        let area = g.period() * g.period();
        let mut c = SpectralField::zeros(g, 2);
        c.component_mut(0)[0] = C64::new(area, 0.0);
        c.component_mut(1)[0] = C64::new(-2.0 * area, 0.0);
        let scale = 4.0 * g.nyquist() * std::f64::consts::SQRT_2;
        assert!(e.rhs(&c).unwrap().max_abs() <= 1e-14 * scale * area);
    }
}
