//! Dyadic frequency localization: the mother cutoff, shell symbols, block
//! operators and partial sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, RealField, SpectralField, TorusGrid, C64};

/// Radial profile of the mother cutoff.
pub fn psi(r: f64) -> f64 {
    if r <= 0.75 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let t = 4.0 * r - 3.0;
        let g = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
        let a = g(1.0 - t);
        a / (g(t) + a)
    }
}

pub fn chi(xi: [f64; 2]) -> f64 {
    psi(xi[0].hypot(xi[1]))
}

struct Level {
    half: i64,
    data: Vec<f64>,
}

/// Cached samples of `chi(2^{-j} xi)` over the frequency lattice.
pub struct FilterBank {
    grid: TorusGrid,
    j_min: i32,
    j_max: i32,
    lo: i32,
    levels: Vec<Level>,
}

/// Range of block indices used by a norm or decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JRange {
    pub lo: i32,
    pub hi: i32,
}

impl FilterBank {
    /// Bank whose top shell reaches past every lattice point.
    pub fn new(grid: TorusGrid) -> Self {
        let reach = grid.nyquist() * std::f64::consts::SQRT_2;
        let mut j = 0;
        while 0.75 * 2f64.powi(j + 1) < reach {
            j += 1;
        }
        Self::with_jmax(grid, j)
    }

    pub fn with_jmax(grid: TorusGrid, j_max: i32) -> Self {
        let j_min = grid.dxi().log2().ceil() as i32 - 1;
        let lo = grid.dxi().log2().floor() as i32;
        let reach = grid.nyquist() * std::f64::consts::SQRT_2;
        let mut top = lo;
        while 0.75 * 2f64.powi(top) < reach {
            top += 1;
        }
        let hi = top.min(j_max + 1).max(lo);
        let n = grid.n() as i64;
        let levels = (lo..=hi)
            .map(|j| {
                let scale = 2f64.powi(-j);
                let half = ((2f64.powi(j) / grid.dxi()).floor() as i64).min(n / 2);
                let w = 2 * half + 1;
                let mut data = vec![0.0; (w * w) as usize];
                for a in -half..=half {
                    for b in -half..=half {
                        let xi = grid.lattice_point([a, b]);
                        data[((a + half) * w + b + half) as usize] =
                            psi(scale * xi[0].hypot(xi[1]));
                    }
                }
                Level { half, data }
            })
            .collect();
        Self { grid, j_min, j_max, lo, levels }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Lowest homogeneous block that still sees a lattice point.
    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn nonhomogeneous_range(&self) -> JRange {
        JRange { lo: -1, hi: self.j_max }
    }

    pub fn homogeneous_range(&self) -> JRange {
        JRange { lo: self.j_min, hi: self.j_max }
    }

    /// `chi(2^{-j} xi)` at lattice index `m`.
    pub fn level(&self, j: i32, m: [i64; 2]) -> f64 {
        if j < self.lo {
            return if m == [0, 0] { 1.0 } else { 0.0 };
        }
        match self.levels.get((j - self.lo) as usize) {
            None => {
                let xi = self.grid.lattice_point(m);
                psi(2f64.powi(-j) * xi[0].hypot(xi[1]))
            }
            Some(l) => {
                if m[0].abs() > l.half || m[1].abs() > l.half {
                    0.0
                } else {
                    let w = 2 * l.half + 1;
                    l.data[((m[0] + l.half) * w + m[1] + l.half) as usize]
                }
            }
        }
    }

    /// Shell symbol `h_j = chi(2^{-j-1} .) - chi(2^{-j} .)` for any integer `j`.
    pub fn shell(&self, j: i32, m: [i64; 2]) -> f64 {
        self.level(j + 1, m) - self.level(j, m)
    }

    /// Symbol of the nonhomogeneous block `Delta_j`.
    pub fn block_symbol(&self, j: i32, m: [i64; 2]) -> f64 {
        match j {
            j if j <= -2 => 0.0,
            -1 => self.level(0, m),
            j => self.shell(j, m),
        }
    }

    fn half_width(&self, radius: f64) -> i64 {
        ((radius / self.grid.dxi()).floor() as i64).min(self.grid.n() as i64 / 2)
    }

    /// Calls `f(index, symbol)` for every lattice point where the symbol of
    /// block `j` is nonzero.
    pub fn visit_block(&self, j: i32, homogeneous: bool, mut f: impl FnMut(usize, f64)) {
        if !homogeneous && j <= -2 {
            return;
        }
        let half = self.half_width(2f64.powi(j + 1));
        for a in -half..=half {
            for b in -half..=half {
                if let Some(idx) = self.grid.index([a, b]) {
                    let h = if homogeneous { self.shell(j, [a, b]) } else { self.block_symbol(j, [a, b]) };
                    if h != 0.0 {
                        f(idx, h);
                    }
                }
            }
        }
    }

    fn from_symbol_visit(&self, f: &SpectralField, visit: impl Fn(&mut dyn FnMut(usize, f64))) -> SpectralField {
        let mut comps = vec![vec![C64::default(); self.grid.len()]; f.ncomp()];
        visit(&mut |idx, h| {
            for (c, out) in comps.iter_mut().enumerate() {
                out[idx] = f.component(c)[idx] * h;
            }
        });
        SpectralField::from_parts(self.grid, comps, f.real_valued())
    }

    /// Nonhomogeneous block `Delta_j f`.
    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        spectral::check_same_grid(&self.grid, f.grid())?;
        Ok(self.from_symbol_visit(f, |g| self.visit_block(j, false, |i, h| g(i, h))))
    }

    /// Homogeneous block, defined for `2^j >= dxi / 2`.
    pub fn homogeneous_block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        spectral::check_same_grid(&self.grid, f.grid())?;
        if j < self.j_min {
            return Err(Error::BelowResolution(j));
        }
        Ok(self.from_symbol_visit(f, |g| self.visit_block(j, true, |i, h| g(i, h))))
    }

    /// `S_k f`, with symbol `chi(2^{-k-1} xi)`.
    pub fn partial_sum(&self, f: &SpectralField, k: i32) -> Result<SpectralField> {
        spectral::check_same_grid(&self.grid, f.grid())?;
        if k < -1 {
            return Err(Error::InvalidArgument(format!("partial sum index {k} < -1")));
        }
        let half = self.half_width(2f64.powi(k + 1));
        Ok(self.from_symbol_visit(f, |g| {
            for a in -half..=half {
                for b in -half..=half {
                    if let Some(idx) = self.grid.index([a, b]) {
                        let h = self.level(k + 1, [a, b]);
                        if h != 0.0 {
                            g(idx, h);
                        }
                    }
                }
            }
        }))
    }

    /// `sum_j w(j) Delta_j f` over `j` in `[-1, j_max]`.
    pub fn weighted_sum(&self, f: &SpectralField, w: impl Fn(i32) -> f64) -> Result<SpectralField> {
        spectral::check_same_grid(&self.grid, f.grid())?;
        let mut sym = vec![0.0; self.grid.len()];
        for j in -1..=self.j_max {
            let wj = w(j);
            if wj != 0.0 {
                self.visit_block(j, false, |i, h| sym[i] += wj * h);
            }
        }
        let comps = f
            .components()
            .iter()
            .map(|c| c.iter().zip(&sym).map(|(v, s)| v * s).collect())
            .collect();
        Ok(SpectralField::from_parts(self.grid, comps, f.real_valued()))
    }

    /// Splits `f` into blocks `Delta_j f`, `j` in `[-1, j_max]`, plus residual.
    pub fn decompose(&self, f: &SpectralField) -> Result<ShellDecomposition> {
        let mut residual = f.clone();
        let mut blocks = Vec::new();
        for j in -1..=self.j_max {
            let b = self.block(f, j)?;
            residual = residual.sub(&b)?;
            blocks.push((j, b));
        }
        Ok(ShellDecomposition { blocks, residual })
    }

    /// Samples of the periodized kernel `Phi = F^{-1} chi`.
    pub fn kernel_phi(&self) -> RealField {
        let f = SpectralField::from_parts(self.grid, vec![vec![C64::new(1.0, 0.0); self.grid.len()]], true);
        spectral::inverse(&self.block(&f, -1).expect("same grid"))
    }

    /// Samples of the periodized kernel `phi_j = F^{-1} h_j`.
    pub fn kernel_phi_j(&self, j: i32) -> RealField {
        let f = SpectralField::from_parts(self.grid, vec![vec![C64::new(1.0, 0.0); self.grid.len()]], true);
        spectral::inverse(&self.from_symbol_visit(&f, |g| self.visit_block(j, true, |i, h| g(i, h))))
    }
}

/// Blocks of a field and what the truncated sum leaves behind.
pub struct ShellDecomposition {
    pub blocks: Vec<(i32, SpectralField)>,
    pub residual: SpectralField,
}

impl ShellDecomposition {
    /// `||residual||_inf / ||f||_inf` in sample space.
    pub fn relative_residual(&self, f: &SpectralField) -> f64 {
        let (_, r) = spectral::lebesgue_norms(&spectral::inverse(&self.residual));
        let (_, s) = spectral::lebesgue_norms(&spectral::inverse(f));
        if s == 0.0 {
            r
        } else {
            r / s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_values() {
        assert_eq!(chi([0.5, 0.0]), 1.0);
        assert_eq!(chi([0.0, 1.2]), 0.0);
        assert!((psi(0.875) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = psi(0.7 + 0.35 * i as f64 / 1000.0);
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn default_jmax() {
        let g = TorusGrid::new(2048, 16.0 * PI).unwrap();
        let fb = FilterBank::new(g);
        assert_eq!(fb.j_max(), 7);
        assert_eq!(fb.j_min(), -4);
    }

    #[test]
    fn partition_of_unity_small() {
        let g = TorusGrid::new(64, 8.0 * PI).unwrap();
        let fb = FilterBank::new(g);
        let lim = 0.75 * 2f64.powi(fb.j_max() + 1);
        for idx in 0..g.len() {
            let m = g.modes(idx);
            let xi = g.wavevector(idx);
            let mut s = fb.block_symbol(-1, m);
            for j in 0..=fb.j_max() {
                let h = fb.shell(j, m);
                assert!(h >= -1e-15);
                s += h;
            }
            if xi[0].hypot(xi[1]) <= lim {
                assert!((s - 1.0).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn low_blocks() {
        let g = TorusGrid::new(32, 8.0 * PI).unwrap();
        let fb = FilterBank::new(g);
        let c = SpectralField::from_fn(g, 1, |xi| {
            vec![C64::new(if xi == [0.0, 0.0] { 3.0 } else { 0.0 }, 0.0)]
        })
        .unwrap();
        let b = fb.block(&c, -1).unwrap();
        assert!(b.sub(&c).unwrap().max_abs() == 0.0);
        assert_eq!(fb.block(&c, -2).unwrap().max_abs(), 0.0);
        assert!(matches!(fb.homogeneous_block(&c, fb.j_min() - 1), Err(Error::BelowResolution(_))));
        let s = fb.partial_sum(&c, -1).unwrap();
        assert!(s.sub(&b).unwrap().max_abs() == 0.0);
    }
}
