//! The rotated dyadic bump train, its stream-function velocity, and the
//! oracles used to check what the flow does to it.

mod mechanism;
mod periodization;
mod table;

pub use mechanism::{
    lattice_convective, mechanism_constants, overlap_integrals, KRow, MechanismConstants,
    OverlapIntegrals, Quadrature,
};
pub use periodization::{periodization_study, PeriodizationReport, PeriodizationRow};
pub use table::{interaction_table, InteractionTable};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{psi, FilterBank};
use crate::norms::NormReport;
use crate::spectral::{SpectralField, TorusGrid, C64};

/// Which low-bump geometry to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Low bump small enough to sit inside `B(xi^{-1}, 1/8)`.
    Faithful,
    /// Low bump enlarged so a global grid with spacing 1/8 resolves it.
    GridAdapted,
}

/// Parameters of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub variant: Variant,
    pub s: f64,
    pub theta: f64,
    pub k_max: i32,
    pub delta: f64,
    pub rho: f64,
}

impl CounterexampleSpec {
    pub fn faithful(k_max: i32) -> Self {
        Self {
            variant: Variant::Faithful,
            s: 3.0,
            theta: std::f64::consts::FRAC_PI_6,
            k_max,
            delta: 1.0 / 16.0,
            rho: 1.0 / 32.0,
        }
    }

    pub fn grid_adapted(k_max: i32) -> Self {
        Self {
            variant: Variant::GridAdapted,
            s: 3.0,
            theta: std::f64::consts::FRAC_PI_6,
            k_max,
            delta: 0.25,
            rho: 0.5,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn e(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    pub fn e_perp(&self) -> [f64; 2] {
        [self.theta.sin(), -self.theta.cos()]
    }

    pub fn xi(&self, j: i32) -> [f64; 2] {
        xi_point(j, self.theta)
    }

    /// Center of the low bump, `xi^{-1} + delta e_perp`.
    pub fn low_center(&self) -> [f64; 2] {
        let x = self.xi(-1);
        let p = self.e_perp();
        [x[0] + self.delta * p[0], x[1] + self.delta * p[1]]
    }

    /// Coefficient of `a_j` in the stream function.
    pub fn weight(&self, j: i32) -> f64 {
        2f64.powf(-(j as f64) * (self.s + 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.s < 3.0 {
            return Err(Error::InvalidArgument(format!("regularity s = {} is below d + 1 = 3", self.s)));
        }
        if self.k_max < 1 {
            return Err(Error::InvalidArgument(format!("k_max = {} < 1", self.k_max)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidArgument(format!("low bump radius {} must be positive", self.rho)));
        }
        if self.delta == 0.0 {
            return Err(Error::MomentVanishes);
        }
        if self.variant == Variant::Faithful && self.delta.abs() + self.rho > 0.125 + 1e-15 {
            return Err(Error::InvalidArgument(format!(
                "low bump (delta {}, radius {}) leaves B(xi^-1, 1/8)",
                self.delta, self.rho
            )));
        }
        Ok(())
    }

    /// Every support ball of the stream function spectrum.
    pub fn balls(&self) -> Vec<Ball> {
        let mut out = vec![Ball { tag: BallTag::Low, center: self.low_center(), radius: self.rho }];
        for j in 1..=self.k_max {
            out.push(Ball { tag: BallTag::Shell(j), center: self.xi(j), radius: 1.0 });
        }
        out
    }

    /// Continuum value of `alpha^` restricted to one ball.
    pub fn alpha_hat(&self, ball: &Ball, xi: [f64; 2]) -> f64 {
        let d = [xi[0] - ball.center[0], xi[1] - ball.center[1]];
        let r = d[0].hypot(d[1]) / ball.radius;
        match ball.tag {
            BallTag::Low => self.weight(-1) * psi(r),
            BallTag::Shell(j) => self.weight(j) * psi(r),
        }
    }

    /// Closed-form `u0^(xi^k)`, the vector `2^{-ks} c0`.
    pub fn u0_at_center(&self, k: i32) -> [C64; 2] {
        let x = self.xi(k);
        let w = self.weight(k);
        [C64::new(0.0, -x[1] * w), C64::new(0.0, x[0] * w)]
    }

    /// `c0 = i (5/4) (-e_2, e_1)`.
    pub fn c0(&self) -> [C64; 2] {
        let e = self.e();
        [C64::new(0.0, -1.25 * e[1]), C64::new(0.0, 1.25 * e[0])]
    }
}

/// `5 * 2^{j-2} (cos theta, sin theta)`.
pub fn xi_point(j: i32, theta: f64) -> [f64; 2] {
    let r = 5.0 * 2f64.powi(j - 2);
    [r * theta.cos(), r * theta.sin()]
}

/// Identifies one support ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BallTag {
    Low,
    Shell(i32),
}

impl fmt::Display for BallTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallTag::Low => write!(f, "low"),
            BallTag::Shell(j) => write!(f, "shell{j}"),
        }
    }
}

impl Serialize for BallTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub tag: BallTag,
    pub center: [f64; 2],
    pub radius: f64,
}

/// One lattice sample of a ball-supported spectrum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SparseEntry {
    pub m: [i64; 2],
    pub re: f64,
    pub im: f64,
    pub tag: BallTag,
}

impl SparseEntry {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Lattice samples of a spectrum supported in a few balls.
#[derive(Clone, Debug, Serialize)]
pub struct SparseSpectrum {
    pub dxi: f64,
    pub entries: Vec<SparseEntry>,
}

impl SparseSpectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self) -> HashMap<[i64; 2], C64> {
        self.entries.iter().map(|e| (e.m, e.value())).collect()
    }

    /// Merges spectra; fails on a repeated frequency.
    pub fn merge(parts: Vec<SparseSpectrum>) -> Result<SparseSpectrum> {
        let dxi = parts.first().map(|p| p.dxi).unwrap_or(0.0);
        let mut seen = HashMap::new();
        let mut entries = Vec::new();
        for p in parts {
            if p.dxi != dxi {
                return Err(Error::GridMismatch);
            }
            for e in p.entries {
                if seen.insert(e.m, e.tag).is_some() {
                    return Err(Error::InvalidArgument(format!("frequency {:?} appears twice", e.m)));
                }
                entries.push(e);
            }
        }
        Ok(SparseSpectrum { dxi, entries })
    }

    /// Dense scalar field with these coefficients.
    pub fn to_field(&self, grid: &TorusGrid) -> Result<SpectralField> {
        if (grid.dxi() - self.dxi).abs() > 1e-15 * self.dxi {
            return Err(Error::GridMismatch);
        }
        let mut c = vec![C64::default(); grid.len()];
        for e in &self.entries {
            let idx = grid.index(e.m).ok_or_else(|| Error::BandOverflow(format!("mode {:?}", e.m)))?;
            c[idx] += e.value();
        }
        SpectralField::new(*grid, vec![c])
    }
}

fn sample_ball(grid: &TorusGrid, tag: BallTag, center: [f64; 2], radius: f64, scale: f64) -> Result<SparseSpectrum> {
    let ny = grid.nyquist();
    let d = grid.dxi();
    if center[0].abs() + radius >= ny || center[1].abs() + radius >= ny {
        return Err(Error::BandOverflow(format!("{tag} ball")));
    }
    let lo = [((center[0] - radius) / d).floor() as i64, ((center[1] - radius) / d).floor() as i64];
    let hi = [((center[0] + radius) / d).ceil() as i64, ((center[1] + radius) / d).ceil() as i64];
    let mut entries = Vec::new();
    for a in lo[0]..=hi[0] {
        for b in lo[1]..=hi[1] {
            let xi = grid.lattice_point([a, b]);
            let v = psi((xi[0] - center[0]).hypot(xi[1] - center[1]) / radius);
            if v > 0.0 {
                entries.push(SparseEntry { m: [a, b], re: scale * v, im: 0.0, tag });
            }
        }
    }
    Ok(SparseSpectrum { dxi: d, entries })
}

/// Lattice samples of `a_j^ = chi(. - xi^j)`; empty for `j = 0`.
pub fn build_bump(j: i32, spec: &CounterexampleSpec, grid: &TorusGrid) -> Result<SparseSpectrum> {
    if j == 0 {
        return Ok(SparseSpectrum { dxi: grid.dxi(), entries: Vec::new() });
    }
    if j < 0 {
        return build_low_bump(spec, grid);
    }
    sample_ball(grid, BallTag::Shell(j), spec.xi(j), 1.0, 1.0)
}

/// Lattice samples of the low bump `chi((. - c)/rho)`.
pub fn build_low_bump(spec: &CounterexampleSpec, grid: &TorusGrid) -> Result<SparseSpectrum> {
    if spec.delta == 0.0 {
        return Err(Error::MomentVanishes);
    }
    if spec.variant == Variant::GridAdapted && spec.rho < 4.0 * grid.dxi() - 1e-15 {
        return Err(Error::Unresolvable { radius: spec.rho, min: 4.0 * grid.dxi() });
    }
    sample_ball(grid, BallTag::Low, spec.low_center(), spec.rho, 1.0)
}

/// Stream function spectrum `sum 2^{-j(s+1)} a_j^` over the low bump and
/// shells `1..=k_max`.
pub fn build_alpha(spec: &CounterexampleSpec, grid: &TorusGrid) -> Result<SparseSpectrum> {
    spec.validate()?;
    let mut parts = Vec::new();
    for ball in spec.balls() {
        let j = match ball.tag {
            BallTag::Low => -1,
            BallTag::Shell(j) => j,
        };
        let mut p = build_bump(j, spec, grid)?;
        let w = spec.weight(j);
        p.entries.iter_mut().for_each(|e| e.re *= w);
        parts.push(p);
    }
    SparseSpectrum::merge(parts)
}

/// `u0^ = i (-xi_2, xi_1) alpha^` on the grid.
pub fn build_u0(spec: &CounterexampleSpec, grid: &TorusGrid) -> Result<SpectralField> {
    let alpha = build_alpha(spec, grid)?;
    u0_from_alpha(&alpha, grid)
}

pub fn u0_from_alpha(alpha: &SparseSpectrum, grid: &TorusGrid) -> Result<SpectralField> {
    let mut u1 = vec![C64::default(); grid.len()];
    let mut u2 = vec![C64::default(); grid.len()];
    for e in &alpha.entries {
        let idx = grid.index(e.m).ok_or_else(|| Error::BandOverflow(format!("mode {:?}", e.m)))?;
        let xi = grid.lattice_point(e.m);
        let v = e.value();
        u1[idx] += C64::new(0.0, -xi[1]) * v;
        u2[idx] += C64::new(0.0, xi[0]) * v;
    }
    SpectralField::new(*grid, vec![u1, u2])
}

/// `u0^` evaluated from the continuum formula at an arbitrary frequency.
pub fn u0_hat_exact(spec: &CounterexampleSpec, xi: [f64; 2]) -> [C64; 2] {
    let a: f64 = spec.balls().iter().map(|b| spec.alpha_hat(b, xi)).sum();
    [C64::new(0.0, -xi[1] * a), C64::new(0.0, xi[0] * a)]
}

/// Norms of `u0` plus the weighted block sizes `2^{js} ||Delta_j u0||_{L^1}`.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub norms: NormReport,
    pub weighted_blocks: Vec<(i32, f64)>,
}

pub fn membership_report(fb: &FilterBank, u0: &SpectralField, s: f64) -> Result<MembershipReport> {
    let norms = NormReport::compute(fb, u0, s)?;
    let weighted_blocks = norms
        .blocks
        .iter()
        .map(|b| (b.j, 2f64.powf(b.j as f64 * s) * b.l1))
        .collect();
    Ok(MembershipReport { norms, weighted_blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn xi_points() {
        let t = PI / 6.0;
        let p = xi_point(2, t);
        assert!((p[0] - 5.0 * 3f64.sqrt() / 2.0).abs() < 1e-14 && (p[1] - 2.5).abs() < 1e-14);
        let p = xi_point(-1, t);
        assert!((p[0] - 5.0 * 3f64.sqrt() / 16.0).abs() < 1e-15 && (p[1] - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(xi_point(0, 0.0), [1.25, 0.0]);
    }

    #[test]
    fn bump_counts_and_plateau() {
        let grid = TorusGrid::new(256, 16.0 * PI).unwrap();
        let spec = CounterexampleSpec::grid_adapted(3);
        assert!(build_bump(0, &spec, &grid).unwrap().is_empty());
        for j in 1..=3 {
            let b = build_bump(j, &spec, &grid).unwrap();
            let expect = PI / (grid.dxi() * grid.dxi());
            assert!((b.len() as f64 - expect).abs() < 0.15 * expect);
            let c = spec.xi(j);
            for e in &b.entries {
                let x = grid.lattice_point(e.m);
                if (x[0] - c[0]).hypot(x[1] - c[1]) <= 0.75 {
                    assert_eq!(e.re, 1.0);
                }
            }
        }
    }

    #[test]
    fn low_bump_errors() {
        let grid = TorusGrid::new(256, 16.0 * PI).unwrap();
        let mut spec = CounterexampleSpec::grid_adapted(3);
        spec.delta = 0.0;
        assert!(matches!(build_low_bump(&spec, &grid), Err(Error::MomentVanishes)));
        let mut spec = CounterexampleSpec::grid_adapted(3);
        spec.rho = 0.25;
        assert!(matches!(build_low_bump(&spec, &grid), Err(Error::Unresolvable { .. })));
    }

    #[test]
    fn u0_is_divergence_free() {
        let grid = TorusGrid::new(256, 16.0 * PI).unwrap();
        let u0 = build_u0(&CounterexampleSpec::grid_adapted(3), &grid).unwrap();
        for i in 0..grid.len() {
            let xi = grid.wavevector(i);
            let d = u0.component(0)[i] * xi[0] + u0.component(1)[i] * xi[1];
            let scale = xi[0].hypot(xi[1]) * u0.component(0)[i].norm().hypot(u0.component(1)[i].norm());
            assert!(d.norm() <= 4.0 * f64::EPSILON * scale);
        }
    }
}
