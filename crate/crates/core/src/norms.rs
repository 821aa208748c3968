//! Triebel-Lizorkin, Besov and Sobolev-type norms evaluated by streaming
//! dyadic blocks through sample space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::{FilterBank, JRange};
use crate::spectral::fft::{self, Fft2};
use crate::spectral::{self, SpectralField, TorusGrid, C64};

/// Per-block sample-space sizes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockStats {
    pub j: i32,
    pub l1: f64,
    pub linf: f64,
}

/// Result of one streaming pass: `int sup_j 2^{js} |Delta_j f|` for several `s`.
#[derive(Clone, Debug, Serialize)]
pub struct SupScan {
    pub range: JRange,
    pub homogeneous: bool,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    /// For each `s`, the integral of the sup restricted to points where block
    /// `j` attains it, as `(j, mass)` pairs.
    pub attribution: Vec<Vec<(i32, f64)>>,
    pub blocks: Vec<BlockStats>,
}

impl SupScan {
    /// Block carrying the largest share of the sup integral for `s[i]`.
    pub fn dominant_block(&self, i: usize) -> i32 {
        self.attribution[i]
            .iter()
            .fold((self.range.lo, -1.0), |acc, &(j, m)| if m > acc.1 { (j, m) } else { acc })
            .0
    }
}

/// Synthesizes blocks into sample space, reusing one FFT plan and buffer.
pub struct BlockSynth<'a> {
    fb: &'a FilterBank,
    plan: Fft2,
    buf: Vec<C64>,
}

impl<'a> BlockSynth<'a> {
    pub fn new(fb: &'a FilterBank) -> Self {
        let n = fb.grid().n();
        Self { fb, plan: Fft2::new(n), buf: vec![C64::default(); n * n] }
    }

    pub fn bank(&self) -> &FilterBank {
        self.fb
    }

    /// Pointwise modulus of block `j` of `f`, written into `out`.
    pub fn block_modulus(&mut self, f: &SpectralField, j: i32, homogeneous: bool, out: &mut [f64]) {
        let g = *self.fb.grid();
        let n = g.n();
        let scale = 1.0 / (g.period() * g.period());
        out.iter_mut().for_each(|v| *v = 0.0);
        for c in 0..f.ncomp() {
            self.buf.iter_mut().for_each(|v| *v = C64::default());
            let src = f.component(c);
            let buf = &mut self.buf;
            self.fb.visit_block(j, homogeneous, |i, h| buf[i] = src[i] * (h * scale));
            let active = fft::active_columns(&self.buf, n);
            if active.is_empty() {
                continue;
            }
            self.plan.inverse(&mut self.buf, &active);
            for (o, v) in out.iter_mut().zip(&self.buf) {
                *o += v.norm_sqr();
            }
        }
        out.iter_mut().for_each(|v| *v = v.sqrt());
    }

    /// Streams the blocks of `range`, keeping a running pointwise max per `s`.
    pub fn scan(&mut self, f: &SpectralField, range: JRange, homogeneous: bool, s: &[f64]) -> Result<SupScan> {
        spectral::check_same_grid(self.fb.grid(), f.grid())?;
        if f.components().iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if homogeneous && range.lo < self.fb.j_min() {
            return Err(Error::BelowResolution(range.lo));
        }
        let g = *self.fb.grid();
        let area = g.cell_area();
        let len = g.len();
        let mut best = vec![vec![0.0f64; len]; s.len()];
        let mut owner = vec![vec![range.lo; len]; s.len()];
        let mut modulus = vec![0.0; len];
        let mut blocks = Vec::new();
        for j in range.lo..=range.hi {
            self.block_modulus(f, j, homogeneous, &mut modulus);
            let l1 = modulus.iter().sum::<f64>() * area;
            let linf = modulus.iter().fold(0.0f64, |a, v| a.max(*v));
            blocks.push(BlockStats { j, l1, linf });
            if linf == 0.0 {
                continue;
            }
            for (k, sk) in s.iter().enumerate() {
                let w = 2f64.powf(j as f64 * sk);
                for ((b, o), m) in best[k].iter_mut().zip(owner[k].iter_mut()).zip(&modulus) {
                    let v = w * m;
                    if v > *b {
                        *b = v;
                        *o = j;
                    }
                }
            }
        }
        let width = (range.hi - range.lo + 1).max(0) as usize;
        let mut values = Vec::with_capacity(s.len());
        let mut attribution = Vec::with_capacity(s.len());
        for k in 0..s.len() {
            values.push(best[k].iter().sum::<f64>() * area);
            let mut mass = vec![0.0; width];
            for (b, o) in best[k].iter().zip(&owner[k]) {
                mass[(o - range.lo) as usize] += b * area;
            }
            attribution.push(
                mass.into_iter()
                    .enumerate()
                    .map(|(i, m)| (range.lo + i as i32, m))
                    .collect(),
            );
        }
        Ok(SupScan { range, homogeneous, s: s.to_vec(), values, attribution, blocks })
    }
}

/// `int sup_j |2^{js} Delta_j f| dx`, nonhomogeneous over `[-1, j_max]` or
/// homogeneous over `[j_min, j_max]`.
pub fn tl_norm(fb: &FilterBank, f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    let range = if homogeneous { fb.homogeneous_range() } else { fb.nonhomogeneous_range() };
    Ok(BlockSynth::new(fb).scan(f, range, homogeneous, &[s])?.values[0])
}

/// `sum_j 2^j ||Delta_j f||_inf` over `[-1, j_max]`.
pub fn besov_norm(fb: &FilterBank, f: &SpectralField) -> Result<f64> {
    let scan = BlockSynth::new(fb).scan(f, fb.nonhomogeneous_range(), false, &[])?;
    Ok(besov_from_blocks(&scan.blocks))
}

fn besov_from_blocks(blocks: &[BlockStats]) -> f64 {
    blocks.iter().map(|b| 2f64.powi(b.j) * b.linf).sum()
}

/// `max |f| + max |grad f|`, the gradient taken over every component.
pub fn w1inf_norm(f: &SpectralField) -> Result<f64> {
    let (_, sup) = spectral::lebesgue_norms(&spectral::inverse(f));
    let mut comps = Vec::with_capacity(2 * f.ncomp());
    for axis in [1, 2] {
        let d = spectral::inverse(&spectral::spectral_derivative(f, axis)?);
        comps.extend(d.components().iter().cloned());
    }
    let grad = crate::spectral::RealField::new(*f.grid(), comps)?;
    let (_, gsup) = spectral::lebesgue_norms(&grad);
    Ok(sup + gsup)
}

/// `(||f||_{L^1} + ||f||_{homogeneous}) / ||f||_{nonhomogeneous}`; 1 for the zero field.
pub fn equivalence_report(fb: &FilterBank, f: &SpectralField, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("equivalence needs s > 0, got {s}")));
    }
    let r = NormReport::compute(fb, f, s)?;
    Ok(r.equivalence_ratio())
}

/// Every norm of one field at one regularity, with the block ranges used.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub s: f64,
    pub n: usize,
    pub period: f64,
    pub nonhomogeneous_range: JRange,
    pub homogeneous_range: JRange,
    pub l1: f64,
    pub linf: f64,
    pub mean: [f64; 2],
    pub tl: f64,
    pub tl_homogeneous: f64,
    pub besov: f64,
    pub w1inf: f64,
    pub dominant_block: i32,
    pub blocks: Vec<BlockStats>,
}

impl NormReport {
    pub fn compute(fb: &FilterBank, f: &SpectralField, s: f64) -> Result<Self> {
        let grid: TorusGrid = *f.grid();
        let mut synth = BlockSynth::new(fb);
        let non = synth.scan(f, fb.nonhomogeneous_range(), false, &[s])?;
        let tl_homogeneous = synth.scan(f, fb.homogeneous_range(), true, &[s])?.values[0];
        let (l1, linf) = spectral::lebesgue_norms(&spectral::inverse(f));
        let area = grid.period() * grid.period();
        let m0 = f.coeff(0, [0, 0]).unwrap_or_default() / area;
        Ok(Self {
            s,
            n: grid.n(),
            period: grid.period(),
            nonhomogeneous_range: fb.nonhomogeneous_range(),
            homogeneous_range: fb.homogeneous_range(),
            l1,
            linf,
            mean: [m0.re, m0.im],
            tl: non.values[0],
            tl_homogeneous,
            besov: besov_from_blocks(&non.blocks),
            w1inf: w1inf_norm(f)?,
            dominant_block: non.dominant_block(0),
            blocks: non.blocks,
        })
    }

    pub fn equivalence_ratio(&self) -> f64 {
        if self.tl == 0.0 {
            1.0
        } else {
            (self.l1 + self.tl_homogeneous) / self.tl
        }
    }
}
