//! Products, the convective term, the Leray projector, pressure, and Bony's
//! paraproduct split, together with the numerical checks built on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::FilterBank;
use crate::norms::{self, BlockSynth};
use crate::spectral::{self, Dealiaser, SpectralField, C64};

/// Standard projector `I - xi xi^T / |xi|^2` applied to `v`; identity at 0.
pub fn leray_symbol(xi: [f64; 2], v: [C64; 2]) -> [C64; 2] {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    if r2 == 0.0 {
        return v;
    }
    let d = (v[0] * xi[0] + v[1] * xi[1]) / r2;
    [v[0] - d * xi[0], v[1] - d * xi[1]]
}

/// The symbol `v - (xi_1 + xi_2)(xi_1 v_1, xi_2 v_2) / |xi|^2`, printed in the
/// construction's derivation. It is not a projector; kept for comparison.
pub fn printed_leray_symbol(xi: [f64; 2], v: [C64; 2]) -> [C64; 2] {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    if r2 == 0.0 {
        return v;
    }
    let s = (xi[0] + xi[1]) / r2;
    [v[0] - v[0] * (s * xi[0]), v[1] - v[1] * (s * xi[1])]
}

fn require_vector(u: &SpectralField) -> Result<()> {
    if u.ncomp() != 2 {
        return Err(Error::ComponentMismatch { expected: 2, got: u.ncomp() });
    }
    Ok(())
}

/// Leray projection of a 2-component field.
pub fn leray(u: &SpectralField) -> Result<SpectralField> {
    require_vector(u)?;
    let g = *u.grid();
    let mut a = vec![C64::default(); g.len()];
    let mut b = vec![C64::default(); g.len()];
    for i in 0..g.len() {
        let p = leray_symbol(g.wavevector(i), [u.component(0)[i], u.component(1)[i]]);
        a[i] = p[0];
        b[i] = p[1];
    }
    Ok(SpectralField::from_parts(g, vec![a, b], u.real_valued()))
}

/// `max |div u| / ||u||_{W^{1,inf}}` evaluated spectrally on the coefficients.
pub fn divergence_residual(u: &SpectralField) -> Result<f64> {
    require_vector(u)?;
    let g = *u.grid();
    let mut div = vec![C64::default(); g.len()];
    let mut scale: f64 = 0.0;
    for (i, d) in div.iter_mut().enumerate() {
        let xi = g.wavevector(i);
        let (a, b) = (u.component(0)[i], u.component(1)[i]);
        *d = C64::new(0.0, 1.0) * (a * xi[0] + b * xi[1]);
        scale = scale.max(xi[0].hypot(xi[1]) * a.norm().hypot(b.norm()));
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let f = SpectralField::from_parts(g, vec![div], false);
    let (_, sup) = spectral::lebesgue_norms(&spectral::inverse(&f));
    let w = norms::w1inf_norm(u)?;
    Ok(if w == 0.0 { 0.0 } else { sup / w })
}

/// `(u.grad) v` for 2-component fields, every product dealiased.
pub fn convective(d: &mut Dealiaser, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    require_vector(u)?;
    spectral::check_same_grid(u.grid(), v.grid())?;
    spectral::check_same_grid(u.grid(), d.grid())?;
    let g = *u.grid();
    let mut ua = [Vec::new(), Vec::new()];
    for a in 0..2 {
        d.to_physical(u.component(a), &mut ua[a]);
    }
    let grads = [spectral::spectral_derivative(v, 1)?, spectral::spectral_derivative(v, 2)?];
    let mut out = Vec::with_capacity(v.ncomp());
    let mut acc = Vec::new();
    let mut tmp = Vec::new();
    for c in 0..v.ncomp() {
        d.to_physical(grads[0].component(c), &mut acc);
        acc.iter_mut().zip(&ua[0]).for_each(|(x, y)| *x *= y);
        d.to_physical(grads[1].component(c), &mut tmp);
        acc.iter_mut().zip(tmp.iter().zip(&ua[1])).for_each(|(x, (t, y))| *x += t * y);
        let mut coeffs = vec![C64::default(); g.len()];
        d.to_spectral(&mut acc, &mut coeffs);
        out.push(coeffs);
    }
    Ok(SpectralField::from_parts(g, out, u.real_valued() && v.real_valued()))
}

/// Pressure gradient `grad p` with `p = (-Lap)^{-1} div((u.grad)u)`, so that
/// `P((u.grad)u) = (u.grad)u + grad p`. Fails unless `u` is divergence free
/// to `tol` relative.
pub fn pressure_gradient(d: &mut Dealiaser, u: &SpectralField, tol: f64) -> Result<SpectralField> {
    let r = divergence_residual(u)?;
    if r > tol {
        return Err(Error::NotDivergenceFree(r));
    }
    let w = convective(d, u, u)?;
    let pw = leray(&w)?;
    let mut gp = pw.sub(&w)?;
    for c in 0..2 {
        gp.component_mut(c)[0] = C64::default();
    }
    Ok(gp)
}

/// Paraproducts and remainder of a product of two scalars.
#[derive(Clone, Debug)]
pub struct BonySplit {
    pub t_f_g: SpectralField,
    pub t_g_f: SpectralField,
    pub remainder: SpectralField,
}

impl BonySplit {
    pub fn sum(&self) -> Result<SpectralField> {
        self.t_f_g.add(&self.t_g_f)?.add(&self.remainder)
    }
}

fn support_reach(f: &SpectralField) -> [i64; 2] {
    let g = f.grid();
    let mut r = [0i64; 2];
    for c in f.components() {
        for (i, v) in c.iter().enumerate() {
            if v.re != 0.0 || v.im != 0.0 {
                let m = g.modes(i);
                r[0] = r[0].max(m[0].abs());
                r[1] = r[1].max(m[1].abs());
            }
        }
    }
    r
}

/// Fails when the exact product of `f` and `g` would not fit in the grid band.
pub fn check_product_band(f: &SpectralField, g: &SpectralField) -> Result<()> {
    let (a, b) = (support_reach(f), support_reach(g));
    let half = (f.grid().n() / 2) as i64;
    if a[0] + b[0] >= half || a[1] + b[1] >= half {
        return Err(Error::BandOverflow("product of the two factors".into()));
    }
    Ok(())
}

/// Dealiased product of two scalar fields.
pub fn product(d: &mut Dealiaser, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    spectral::check_same_grid(f.grid(), g.grid())?;
    let p = d.product(f.component(0), g.component(0));
    Ok(SpectralField::from_parts(*f.grid(), vec![p], f.real_valued() && g.real_valued()))
}

/// `T_f g = sum_j S_{j-4} f Delta_j g`, `T_g f` likewise, and
/// `R(f, g) = sum_{|i-j|<=3} Delta_i f Delta_j g`, over `j` in `[-1, j_max]`.
pub fn bony(fb: &FilterBank, d: &mut Dealiaser, f: &SpectralField, g: &SpectralField) -> Result<BonySplit> {
    spectral::check_same_grid(f.grid(), g.grid())?;
    check_product_band(f, g)?;
    let grid = *f.grid();
    let m = d.padded_size();
    let zero = || vec![C64::default(); m * m];
    let (mut tfg, mut tgf, mut rem) = (zero(), zero(), zero());
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    let low = |x: &SpectralField, k: i32| -> Result<Option<SpectralField>> {
        if k < -1 {
            Ok(None)
        } else {
            fb.partial_sum(x, k).map(Some)
        }
    };
    for j in -1..=fb.j_max() {
        let dg = fb.block(g, j)?;
        let df = fb.block(f, j)?;
        d.to_physical(dg.component(0), &mut a);
        if let Some(sf) = low(f, j - 4)? {
            d.to_physical(sf.component(0), &mut b);
            tfg.iter_mut().zip(a.iter().zip(&b)).for_each(|(t, (x, y))| *t += x * y);
        } else {
            b.clear();
        }
        let sf_hi = fb.partial_sum(f, j + 3)?;
        d.to_physical(sf_hi.component(0), &mut c);
        if b.is_empty() {
            rem.iter_mut().zip(a.iter().zip(&c)).for_each(|(t, (x, y))| *t += x * y);
        } else {
            rem.iter_mut()
                .zip(a.iter().zip(c.iter().zip(&b)))
                .for_each(|(t, (x, (hi, lo)))| *t += x * (hi - lo));
        }
        if let Some(sg) = low(g, j - 4)? {
            d.to_physical(df.component(0), &mut a);
            d.to_physical(sg.component(0), &mut b);
            tgf.iter_mut().zip(a.iter().zip(&b)).for_each(|(t, (x, y))| *t += x * y);
        }
    }
    let mut back = |mut phys: Vec<C64>| {
        let mut out = vec![C64::default(); grid.len()];
        d.to_spectral(&mut phys, &mut out);
        SpectralField::from_parts(grid, vec![out], false)
    };
    Ok(BonySplit { t_f_g: back(tfg), t_g_f: back(tgf), remainder: back(rem) })
}

/// `max |T_f g + T_g f + R - fg| / max |fg|` over coefficients.
pub fn bony_residual(fb: &FilterBank, d: &mut Dealiaser, f: &SpectralField, g: &SpectralField) -> Result<f64> {
    let split = bony(fb, d, f, g)?;
    let fg = product(d, f, g)?;
    let scale = fg.max_abs();
    let err = split.sum()?.sub(&fg)?.max_abs();
    Ok(if scale == 0.0 { err } else { err / scale })
}

/// Per-shell sizes of `Delta_k (u.grad) v` against the predicted `2^{k(1-s)}` decay.
#[derive(Clone, Debug, Serialize)]
pub struct ShellBoundReport {
    pub s: f64,
    pub ks: Vec<i32>,
    pub block_l1: Vec<f64>,
    pub m: Vec<f64>,
    pub slope: f64,
    pub norm_u: f64,
    pub norm_v: f64,
}

impl ShellBoundReport {
    pub fn spread(&self) -> f64 {
        let max = self.m.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.m.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,block_L1,M_k\n");
        for ((k, b), m) in self.ks.iter().zip(&self.block_l1).zip(&self.m) {
            s.push_str(&format!("{k},{b:.17e},{m:.17e}\n"));
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

pub fn shell_bound_report(
    fb: &FilterBank,
    d: &mut Dealiaser,
    u: &SpectralField,
    v: &SpectralField,
    s: f64,
    ks: &[i32],
) -> Result<ShellBoundReport> {
    if let Some(&k) = ks.iter().find(|&&k| k < 0 || k > fb.j_max()) {
        return Err(Error::InvalidArgument(format!("shell {k} outside the filter bank")));
    }
    let w = convective(d, u, v)?;
    let norm_u = norms::tl_norm(fb, u, s, false)?;
    let norm_v = norms::tl_norm(fb, v, s, false)?;
    let mut synth = BlockSynth::new(fb);
    let mut modulus = vec![0.0; fb.grid().len()];
    let area = fb.grid().cell_area();
    let mut block_l1 = Vec::new();
    let mut m = Vec::new();
    for &k in ks {
        synth.block_modulus(&w, k, false, &mut modulus);
        let b = modulus.iter().sum::<f64>() * area;
        block_l1.push(b);
        let den = norm_u * norm_v;
        if den == 0.0 {
            if b != 0.0 {
                return Err(Error::ZeroDenominator("vanishing factor norm with nonzero block".into()));
            }
            m.push(0.0);
        } else {
            m.push(2f64.powf(k as f64 * (s - 1.0)) * b / den);
        }
    }
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let slope = if block_l1.iter().all(|&b| b > 0.0) {
        let ys: Vec<f64> = block_l1.iter().map(|b| b.log2()).collect();
        ls_slope(&xs, &ys)?
    } else {
        f64::NAN
    };
    Ok(ShellBoundReport { s, ks: ks.to_vec(), block_l1, m, slope, norm_u, norm_v })
}

/// `||fg|| / (||f||_inf ||g|| + ||g||_inf ||f||)` in `F^s_{1,inf}`, scalars.
pub fn product_estimate_report(fb: &FilterBank, d: &mut Dealiaser, f: &SpectralField, g: &SpectralField, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
    }
    let fg = product(d, f, g)?;
    let left = norms::tl_norm(fb, &fg, s, false)?;
    let (_, fi) = spectral::lebesgue_norms(&spectral::inverse(f));
    let (_, gi) = spectral::lebesgue_norms(&spectral::inverse(g));
    let right = fi * norms::tl_norm(fb, g, s, false)? + gi * norms::tl_norm(fb, f, s, false)?;
    if right == 0.0 {
        if left == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::ZeroDenominator("right side vanishes while the product does not".into()));
    }
    Ok(left / right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Padding, TorusGrid};
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(32, 2.0 * PI).unwrap()
    }

    fn smooth_vector(g: TorusGrid) -> SpectralField {
        SpectralField::from_fn(g, 2, |xi| {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            let a = (-r2 / 4.0).exp();
            vec![C64::new(a * (1.0 + xi[1]), 0.3 * a), C64::new(a * xi[0], -0.2 * a * xi[1])]
        })
        .unwrap()
    }

    #[test]
    fn leray_properties() {
        let g = grid();
        let u = smooth_vector(g);
        let p = leray(&u).unwrap();
        let pp = leray(&p).unwrap();
        assert!(pp.sub(&p).unwrap().max_abs() <= 1e-12 * p.max_abs());
        let phi = SpectralField::from_fn(g, 1, |xi| vec![C64::new((-(xi[0] * xi[0] + xi[1] * xi[1]) / 3.0).exp(), 0.0)]).unwrap();
        let grad = SpectralField::new(
            g,
            vec![
                spectral::spectral_derivative(&phi, 1).unwrap().component(0).to_vec(),
                spectral::spectral_derivative(&phi, 2).unwrap().component(0).to_vec(),
            ],
        )
        .unwrap();
        assert!(leray(&grad).unwrap().max_abs() <= 1e-12 * grad.max_abs());
        assert!(divergence_residual(&p).unwrap() <= 1e-12);
    }

    #[test]
    fn pressure_identity() {
        let g = grid();
        let u = leray(&smooth_vector(g)).unwrap();
        let mut d = Dealiaser::new(g, Padding::ThreeHalves);
        let gp = pressure_gradient(&mut d, &u, 1e-10).unwrap();
        let w = convective(&mut d, &u, &u).unwrap();
        let pw = leray(&w).unwrap();
        let mut lhs = w.add(&gp).unwrap();
        for c in 0..2 {
            lhs.component_mut(c)[0] = pw.component(c)[0];
        }
        assert!(lhs.sub(&pw).unwrap().max_abs() <= 1e-12 * w.max_abs());
        assert!(matches!(pressure_gradient(&mut d, &smooth_vector(g), 1e-10), Err(Error::NotDivergenceFree(_))));
    }

    #[test]
    fn printed_symbol_differs_from_projector() {
        let e = [3f64.sqrt() / 2.0, 0.5];
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let a = leray_symbol(e, v);
        let b = printed_leray_symbol(e, v);
        assert!((a[0] - b[0]).norm() > 1e-3);
        assert!((a[0].re * e[0] + a[1].re * e[1]).abs() < 1e-15);
    }
}
