//! Periodic grids standing in for the plane, complex spectra, and the
//! transforms between sample space and frequency space.
//!
//! Both representations are stored in FFT order: slot `p` on an axis holds
//! the signed index `p` for `p < N/2` and `p - N` otherwise. Spatial samples
//! sit at `x = (L/N) * signed index`, so the fundamental domain is centered at
//! the origin. The forward transform is the Riemann sum of `f(x) e^{-ix.xi}`
//! with cell area `(L/N)^2`; the inverse divides by `L^2`.

mod dealias;
pub(crate) mod fft;

pub use dealias::{Dealiaser, Padding};

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use fft::Fft2;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// A two-dimensional torus with `n` samples per axis and period `period`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::NonPositivePeriod(period));
        }
        Ok(Self { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency spacing `2 pi / L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Spatial sample spacing `L / N`.
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    pub fn nyquist(&self) -> f64 {
        self.dxi() * (self.n / 2) as f64
    }

    /// Signed index stored in axis slot `p`.
    pub fn mode(&self, p: usize) -> i64 {
        if p < self.n / 2 {
            p as i64
        } else {
            p as i64 - self.n as i64
        }
    }

    /// Axis slot of a signed index, if represented.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if m < -h || m >= h {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n as i64) as usize)
        }
    }

    pub fn index(&self, m: [i64; 2]) -> Option<usize> {
        Some(self.slot(m[0])? * self.n + self.slot(m[1])?)
    }

    pub fn modes(&self, idx: usize) -> [i64; 2] {
        [self.mode(idx / self.n), self.mode(idx % self.n)]
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 2] {
        let m = self.modes(idx);
        let d = self.dxi();
        [d * m[0] as f64, d * m[1] as f64]
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let m = self.modes(idx);
        let h = self.spacing();
        [h * m[0] as f64, h * m[1] as f64]
    }

    /// Lattice index closest to `xi`. Ties go to the smaller index on each
    /// axis, which is the lexicographically smallest candidate.
    pub fn nearest_lattice(&self, xi: [f64; 2]) -> Result<[i64; 2]> {
        let ny = self.nyquist();
        if !(xi[0].hypot(xi[1]) < ny) {
            return Err(Error::BeyondNyquist(xi[0], xi[1], ny));
        }
        let d = self.dxi();
        let m = [
            (xi[0] / d - 0.5).ceil() as i64,
            (xi[1] / d - 0.5).ceil() as i64,
        ];
        match self.index(m) {
            Some(_) => Ok(m),
            None => Err(Error::BeyondNyquist(xi[0], xi[1], ny)),
        }
    }

    pub fn lattice_point(&self, m: [i64; 2]) -> [f64; 2] {
        let d = self.dxi();
        [d * m[0] as f64, d * m[1] as f64]
    }

    fn check(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

fn check_components(grid: &TorusGrid, comps: &[Vec<C64>]) -> Result<()> {
    if comps.is_empty() {
        return Err(Error::InvalidArgument("field needs at least one component".into()));
    }
    for c in comps {
        if c.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "component has {} samples, grid needs {}",
                c.len(),
                grid.len()
            )));
        }
        if c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(())
}

/// Fourier coefficients of a scalar or vector field on a torus lattice.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: TorusGrid,
    comps: Vec<Vec<C64>>,
    real_valued: bool,
}

impl SpectralField {
    pub fn new(grid: TorusGrid, comps: Vec<Vec<C64>>) -> Result<Self> {
        check_components(&grid, &comps)?;
        Ok(Self { grid, comps, real_valued: false })
    }

    pub fn zeros(grid: TorusGrid, ncomp: usize) -> Self {
        Self {
            grid,
            comps: vec![vec![C64::default(); grid.len()]; ncomp],
            real_valued: true,
        }
    }

    /// Builds a field from a closure of the wavevector, one call per lattice point.
    pub fn from_fn(grid: TorusGrid, ncomp: usize, f: impl Fn([f64; 2]) -> Vec<C64>) -> Result<Self> {
        let mut comps = vec![vec![C64::default(); grid.len()]; ncomp];
        for idx in 0..grid.len() {
            let v = f(grid.wavevector(idx));
            if v.len() != ncomp {
                return Err(Error::ComponentMismatch { expected: ncomp, got: v.len() });
            }
            for (c, x) in v.into_iter().enumerate() {
                comps[c][idx] = x;
            }
        }
        Self::new(grid, comps)
    }

    pub(crate) fn from_parts(grid: TorusGrid, comps: Vec<Vec<C64>>, real_valued: bool) -> Self {
        Self { grid, comps, real_valued }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[C64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<C64>> {
        self.comps
    }

    /// Single-component view of component `c`.
    pub fn scalar(&self, c: usize) -> SpectralField {
        Self {
            grid: self.grid,
            comps: vec![self.comps[c].clone()],
            real_valued: self.real_valued,
        }
    }

    pub fn real_valued(&self) -> bool {
        self.real_valued
    }

    /// Declares the field real-valued after checking Hermitian symmetry.
    pub fn assert_real(mut self) -> Result<Self> {
        let d = self.hermitian_defect();
        if d > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Hermitian defect {d:e} exceeds 1e-12"
            )));
        }
        self.real_valued = true;
        Ok(self)
    }

    /// Relative size of `F(xi) - conj(F(-xi))` over the lattice, skipping the
    /// Nyquist row and column whose partner is not represented.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for comp in &self.comps {
            for i1 in 0..n {
                for i2 in 0..n {
                    if i1 == n / 2 || i2 == n / 2 {
                        continue;
                    }
                    let a = comp[i1 * n + i2];
                    let b = comp[((n - i1) % n) * n + (n - i2) % n].conj();
                    num = num.max((a - b).norm());
                    den = den.max(a.norm());
                }
            }
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Spectrum of the pointwise real part, `(F(xi) + conj(F(-xi))) / 2`;
    /// the Nyquist row and column are dropped.
    pub fn real_part(&self) -> SpectralField {
        let n = self.grid.n;
        let comps = self
            .comps
            .iter()
            .map(|comp| {
                let mut out = vec![C64::default(); n * n];
                for i1 in 0..n {
                    for i2 in 0..n {
                        if i1 == n / 2 || i2 == n / 2 {
                            continue;
                        }
                        let mirror = comp[((n - i1) % n) * n + (n - i2) % n].conj();
                        out[i1 * n + i2] = (comp[i1 * n + i2] + mirror) * 0.5;
                    }
                }
                out
            })
            .collect();
        Self::from_parts(self.grid, comps, true)
    }

    pub fn coeff(&self, c: usize, m: [i64; 2]) -> Option<C64> {
        self.grid.index(m).map(|i| self.comps[c][i])
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |a, v| a.max(v.norm()))
    }

    /// Spectral `L^2` norm squared, `(1/L^2) sum |F|^2`, which equals the
    /// spatial integral of `|f|^2` by Parseval.
    pub fn l2_squared(&self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum();
        s / (self.grid.period * self.grid.period)
    }

    fn zip_with(&self, other: &SpectralField, f: impl Fn(C64, C64) -> C64) -> Result<SpectralField> {
        self.grid.check(&other.grid)?;
        if self.ncomp() != other.ncomp() {
            return Err(Error::ComponentMismatch { expected: self.ncomp(), got: other.ncomp() });
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        Ok(Self::from_parts(self.grid, comps, self.real_valued && other.real_valued))
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |x, y| x + y * a)
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| v * a).collect())
            .collect();
        Self::from_parts(self.grid, comps, self.real_valued)
    }

    /// Multiplies every coefficient by a real symbol of the wavevector.
    pub fn multiplied(&self, symbol: impl Fn([f64; 2]) -> f64) -> SpectralField {
        let sym: Vec<f64> = (0..self.grid.len())
            .map(|i| symbol(self.grid.wavevector(i)))
            .collect();
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(&sym).map(|(v, s)| v * s).collect())
            .collect();
        Self::from_parts(self.grid, comps, self.real_valued)
    }
}

/// Point samples of a field over the fundamental domain.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: TorusGrid,
    comps: Vec<Vec<C64>>,
}

impl RealField {
    pub fn new(grid: TorusGrid, comps: Vec<Vec<C64>>) -> Result<Self> {
        check_components(&grid, &comps)?;
        Ok(Self { grid, comps })
    }

    pub fn from_fn(grid: TorusGrid, ncomp: usize, f: impl Fn([f64; 2]) -> Vec<C64>) -> Result<Self> {
        let mut comps = vec![vec![C64::default(); grid.len()]; ncomp];
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            if v.len() != ncomp {
                return Err(Error::ComponentMismatch { expected: ncomp, got: v.len() });
            }
            for (c, x) in v.into_iter().enumerate() {
                comps[c][idx] = x;
            }
        }
        Self::new(grid, comps)
    }

    pub(crate) fn from_parts(grid: TorusGrid, comps: Vec<Vec<C64>>) -> Self {
        Self { grid, comps }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, c: usize) -> &[C64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.comps
    }

    /// Pointwise Euclidean modulus across components.
    pub fn modulus(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| {
                self.comps
                    .iter()
                    .map(|c| c[i].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Forward transform with the Riemann-sum normalization.
pub fn forward(f: &RealField) -> SpectralField {
    let g = f.grid;
    let mut plan = Fft2::new(g.n);
    let full = plan.full();
    let scale = g.cell_area();
    let comps = f
        .comps
        .iter()
        .map(|c| {
            let mut d = c.clone();
            plan.forward(&mut d, &full);
            d.iter_mut().for_each(|v| *v *= scale);
            d
        })
        .collect();
    SpectralField::from_parts(g, comps, false)
}

/// Inverse transform, `f(x) = L^{-2} sum F(xi) e^{ix.xi}`.
pub fn inverse(f: &SpectralField) -> RealField {
    let g = f.grid;
    let mut plan = Fft2::new(g.n);
    let scale = 1.0 / (g.period * g.period);
    let comps = f
        .comps
        .iter()
        .map(|c| {
            let mut d = c.clone();
            let active = fft::active_columns(&d, g.n);
            plan.inverse(&mut d, &active);
            d.iter_mut().for_each(|v| *v *= scale);
            d
        })
        .collect();
    RealField::from_parts(g, comps)
}

pub fn check_same_grid(a: &TorusGrid, b: &TorusGrid) -> Result<()> {
    a.check(b)
}

/// Multiplies coefficients by `i xi_axis`; `axis` is 1 or 2.
pub fn spectral_derivative(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    if axis != 1 && axis != 2 {
        return Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {axis}")));
    }
    let g = f.grid;
    let comps = f
        .comps
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(i, v)| v * C64::new(0.0, g.wavevector(i)[axis - 1]))
                .collect()
        })
        .collect();
    Ok(SpectralField::from_parts(g, comps, f.real_valued))
}

/// `(L^1, L^inf)` of the pointwise Euclidean modulus.
pub fn lebesgue_norms(f: &RealField) -> (f64, f64) {
    let m = f.modulus();
    let l1 = m.iter().sum::<f64>() * f.grid.cell_area();
    let linf = m.iter().fold(0.0f64, |a, v| a.max(*v));
    (l1, linf)
}
