use serde::{Deserialize, Serialize};

use super::fft::{self, Fft2};
use super::{TorusGrid, C64};

/// Padded grid size used for pointwise products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// `3N/2` samples per axis; the smallest size that keeps quadratic
    /// products alias-free on the represented modes.
    #[default]
    ThreeHalves,
    /// `2N` samples per axis.
    Double,
    /// No padding; products keep only modes with `|m_i| <= (N-1)/3`, which
    /// is the same exact truncation as `3/2` padding of that smaller band.
    TwoThirds,
}

impl Padding {
    pub fn padded(&self, n: usize) -> usize {
        match self {
            Padding::ThreeHalves => 3 * n / 2,
            Padding::Double => 2 * n,
            Padding::TwoThirds => n,
        }
    }

    /// Largest `|m_i|` a product keeps on an `n`-point axis.
    pub fn kept_modes(&self, n: usize) -> usize {
        match self {
            Padding::TwoThirds => (n - 1) / 3,
            _ => n / 2,
        }
    }
}

/// Moves spectra to and from a zero-padded physical grid so that quadratic
/// products are exact convolutions on every represented mode.
pub struct Dealiaser {
    grid: TorusGrid,
    m: usize,
    plan: Fft2,
    embed: Vec<usize>,
    kept: i64,
}

impl Dealiaser {
    pub fn new(grid: TorusGrid, padding: Padding) -> Self {
        let n = grid.n();
        let m = padding.padded(n);
        let embed = (0..n)
            .map(|p| {
                let mode = grid.mode(p);
                if mode >= 0 {
                    mode as usize
                } else {
                    (m as i64 + mode) as usize
                }
            })
            .collect();
        Self { grid, m, plan: Fft2::new(m), embed, kept: padding.kept_modes(n) as i64 }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn padded_size(&self) -> usize {
        self.m
    }

    /// Samples the field on the padded grid. `out` is resized to `m^2`.
    pub fn to_physical(&mut self, coeffs: &[C64], out: &mut Vec<C64>) {
        let n = self.grid.n();
        let m = self.m;
        out.clear();
        out.resize(m * m, C64::default());
        let scale = 1.0 / (self.grid.period() * self.grid.period());
        for i1 in 0..n {
            let r = self.embed[i1] * m;
            for i2 in 0..n {
                let v = coeffs[i1 * n + i2];
                if v.re != 0.0 || v.im != 0.0 {
                    out[r + self.embed[i2]] = v * scale;
                }
            }
        }
        let active = fft::active_columns(out, m);
        self.plan.inverse(out, &active);
    }

    /// Transforms padded samples back and keeps the represented modes.
    /// `phys` is overwritten.
    pub fn to_spectral(&mut self, phys: &mut [C64], out: &mut [C64]) {
        let n = self.grid.n();
        let m = self.m;
        let band = if m == n { fft::band_ranges(m, self.kept as usize) } else { fft::embedded_ranges(m, n) };
        self.plan.forward(phys, &band);
        let h = self.grid.period() / m as f64;
        let scale = h * h;
        for i1 in 0..n {
            let r = self.embed[i1] * m;
            let keep1 = self.grid.mode(i1).abs() <= self.kept;
            for i2 in 0..n {
                out[i1 * n + i2] = if keep1 && self.grid.mode(i2).abs() <= self.kept {
                    phys[r + self.embed[i2]] * scale
                } else {
                    C64::default()
                };
            }
        }
    }

    /// Exact convolution product of two spectra, truncated to the grid band.
    pub fn product(&mut self, f: &[C64], g: &[C64]) -> Vec<C64> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.to_physical(f, &mut a);
        self.to_physical(g, &mut b);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
        let mut out = vec![C64::default(); self.grid.len()];
        self.to_spectral(&mut a, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn convolve(grid: &TorusGrid, f: &[C64], g: &[C64]) -> Vec<C64> {
        let n = grid.n();
        let mut out = vec![C64::default(); n * n];
        let l2 = grid.period() * grid.period();
        for a in 0..n * n {
            if f[a].norm() == 0.0 {
                continue;
            }
            let ma = grid.modes(a);
            for b in 0..n * n {
                if g[b].norm() == 0.0 {
                    continue;
                }
                let mb = grid.modes(b);
                if let Some(t) = grid.index([ma[0] + mb[0], ma[1] + mb[1]]) {
                    out[t] += f[a] * g[b] / l2;
                }
            }
        }
        out
    }

    #[test]
    fn products_are_exact_convolutions() {
        let grid = TorusGrid::new(16, 2.0 * PI).unwrap();
        let f: Vec<C64> = (0..256)
            .map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let g: Vec<C64> = (0..256)
            .map(|i| C64::new((i as f64 * 1.1).cos(), (i as f64 * 0.9).sin()))
            .collect();
        let exact = convolve(&grid, &f, &g);
        for pad in [Padding::ThreeHalves, Padding::Double] {
            let mut d = Dealiaser::new(grid, pad);
            let p = d.product(&f, &g);
            let scale = exact.iter().fold(0.0f64, |a, v| a.max(v.norm()));
            for (x, y) in p.iter().zip(&exact) {
                assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn two_thirds_rule_on_band_limited_input() {
        let grid = TorusGrid::new(16, 2.0 * PI).unwrap();
        let k = Padding::TwoThirds.kept_modes(16) as i64;
        assert_eq!(k, 5);
        let banded = |i: usize, w: f64| {
            let m = grid.modes(i);
            if m[0].abs() <= k && m[1].abs() <= k {
                C64::new((i as f64 * w).sin(), (i as f64 * 0.37).cos())
            } else {
                C64::default()
            }
        };
        let f: Vec<C64> = (0..256).map(|i| banded(i, 0.7)).collect();
        let g: Vec<C64> = (0..256).map(|i| banded(i, 1.3)).collect();
        let exact = convolve(&grid, &f, &g);
        let p = Dealiaser::new(grid, Padding::TwoThirds).product(&f, &g);
        let scale = exact.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        for (i, (x, y)) in p.iter().zip(&exact).enumerate() {
            let m = grid.modes(i);
            let want = if m[0].abs() <= k && m[1].abs() <= k { *y } else { C64::default() };
            assert!((x - want).norm() <= 1e-12 * scale);
        }
    }
}
