//! First-order response of the tracked coefficients: closed-form overlap
//! integrals on one side, direct convolution sums on the other.

use std::f64::consts::PI;

use serde::Serialize;

use super::table::{interaction_table, overlaps};
use super::{CounterexampleSpec, SparseSpectrum};
use crate::error::{Error, Result};
use crate::filter::psi;
use crate::paradiff::{leray_symbol, printed_leray_symbol};
use crate::spectral::C64;

/// Local quadrature resolution: every ball is sampled with step
/// `rho / cells_per_radius`, `rho` being the low-bump radius.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Quadrature {
    pub cells_per_radius: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { cells_per_radius: 64.0 }
    }
}

impl Quadrature {
    pub fn step(&self, spec: &CounterexampleSpec) -> f64 {
        spec.rho / self.cells_per_radius
    }
}

/// Visits `center + h m` for every integer `m` with `|h m| < radius`, passing
/// the point and `|h m| / radius`.
fn for_ball(center: [f64; 2], radius: f64, h: f64, mut f: impl FnMut([f64; 2], f64)) {
    let n = (radius / h).ceil() as i64;
    for a in -n..=n {
        let x = h * a as f64;
        for b in -n..=n {
            let y = h * b as f64;
            let r = x.hypot(y);
            if r < radius {
                f([center[0] + x, center[1] + y], r / radius);
            }
        }
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Moments of the low bump, each weighted by `psi(|xi|)`, which is the value
/// the partner shell bump takes on it.
#[derive(Clone, Copy, Debug, Serialize)]
struct LowMoments {
    /// `int (2 xi.e_perp) xi_l a_{-1} w`.
    i3: [f64; 2],
    /// `int (2 xi.e_perp) a_{-1} w`.
    j: f64,
    /// Same without the weight.
    j_plain: f64,
    /// `int a_{-1}`.
    mass: f64,
}

fn low_moments(spec: &CounterexampleSpec, h: f64) -> LowMoments {
    let ep = spec.e_perp();
    let mut m = LowMoments { i3: [0.0; 2], j: 0.0, j_plain: 0.0, mass: 0.0 };
    for_ball(spec.low_center(), spec.rho, h, |xi, r| {
        let a = psi(r);
        let w = psi(xi[0].hypot(xi[1]));
        let g = 2.0 * dot(xi, ep);
        m.i3[0] += g * xi[0] * a * w;
        m.i3[1] += g * xi[1] * a * w;
        m.j += g * a * w;
        m.j_plain += g * a;
        m.mass += a;
    });
    let h2 = h * h;
    m.i3 = [m.i3[0] * h2, m.i3[1] * h2];
    m.j *= h2;
    m.j_plain *= h2;
    m.mass *= h2;
    m
}

/// `int (2 eta.e_perp) eta_l chi(eta)^2` over the unit ball.
fn unit_moments(spec: &CounterexampleSpec, h: f64) -> [f64; 2] {
    let ep = spec.e_perp();
    let mut out = [0.0; 2];
    for_ball([0.0, 0.0], 1.0, h, |eta, r| {
        let c = psi(r);
        let g = 2.0 * dot(eta, ep) * c * c;
        out[0] += g * eta[0];
        out[1] += g * eta[1];
    });
    [out[0] * h * h, out[1] * h * h]
}

/// The three integrals entering the overlap expansion for one component.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapIntegrals {
    pub k: i32,
    pub l: usize,
    /// Low bump against the flat part of shell `k`.
    pub low_shell: f64,
    /// Shell `k-1` against itself, reduced to the unit ball.
    pub shell_shell: f64,
    /// Shell `k` against the reflected low bump, via the reduction formula.
    pub shell_low: f64,
    /// The moment term of that reduction alone.
    pub shell_low_moment_term: f64,
    /// Shell `k` against the reflected low bump, summed directly.
    pub shell_low_direct: f64,
}

/// The three overlap integrals for target `k` and component `l` (1 or 2).
pub fn overlap_integrals(k: i32, l: usize, spec: &CounterexampleSpec, quad: Quadrature) -> Result<OverlapIntegrals> {
    if l != 1 && l != 2 {
        return Err(Error::InvalidArgument(format!("component must be 1 or 2, got {l}")));
    }
    let h = quad.step(spec);
    let low = low_moments(spec, h);
    let unit = unit_moments(spec, h);
    let e = spec.e();
    let ep = spec.e_perp();
    let xk = spec.xi(k);
    let moment_term = -5.0 * 2f64.powi(k - 2) * e[l - 1] * low.j;
    let mut direct = 0.0;
    let c = spec.low_center();
    for_ball(c, spec.rho, h, |eta, r| {
        let xi = [xk[0] - eta[0], xk[1] - eta[1]];
        let ak = psi((xi[0] - xk[0]).hypot(xi[1] - xk[1]));
        direct += 2.0 * dot(xi, ep) * xi[l - 1] * psi(r) * ak;
    });
    Ok(OverlapIntegrals {
        k,
        l,
        low_shell: low.i3[l - 1],
        shell_shell: unit[l - 1],
        shell_low: low.i3[l - 1] + moment_term,
        shell_low_moment_term: moment_term,
        shell_low_direct: direct * h * h,
    })
}

/// Direct evaluation of `F((u0.grad)u0)(xi^k)` by summing the convolution
/// over every overlapping pair of support balls.
fn convective_by_pairs(spec: &CounterexampleSpec, k: i32, h: f64) -> [C64; 2] {
    let target = spec.xi(k);
    let balls = spec.balls();
    let mut acc = [0.0f64; 2];
    for a in &balls {
        for b in &balls {
            if !overlaps(a, b, target) {
                continue;
            }
            let (center, radius, on_a) =
                if b.radius < a.radius { (b.center, b.radius, false) } else { (a.center, a.radius, true) };
            for_ball(center, radius, h, |p, _| {
                let (xi, rest) = if on_a { (p, [target[0] - p[0], target[1] - p[1]]) } else { ([target[0] - p[0], target[1] - p[1]], p) };
                let va = spec.alpha_hat(a, xi);
                let vb = spec.alpha_hat(b, rest);
                if va == 0.0 || vb == 0.0 {
                    return;
                }
                // u(rest) . (i xi) with u = i(-x2, x1) alpha: real factor
                // -( -rest_2 xi_1 + rest_1 xi_2 ) vb; the c-th component of
                // u(xi) contributes i * (-xi_2, xi_1)_c va.
                let adv = -(-rest[1] * xi[0] + rest[0] * xi[1]) * vb;
                acc[0] += adv * (-xi[1]) * va;
                acc[1] += adv * xi[0] * va;
            });
        }
    }
    let s = h * h / (4.0 * PI * PI);
    [C64::new(0.0, acc[0] * s), C64::new(0.0, acc[1] * s)]
}

/// `F((u0.grad)u0)` at lattice mode `target`, from the sampled stream
/// function by a sparse convolution with the torus normalization.
pub fn lattice_convective(alpha: &SparseSpectrum, target: [i64; 2]) -> [C64; 2] {
    let d = alpha.dxi;
    let lookup = alpha.lookup();
    let mut acc = [C64::default(); 2];
    let i = C64::new(0.0, 1.0);
    for e in &alpha.entries {
        let rest_m = [target[0] - e.m[0], target[1] - e.m[1]];
        let Some(vb) = lookup.get(&rest_m) else { continue };
        let xi = [d * e.m[0] as f64, d * e.m[1] as f64];
        let rest = [d * rest_m[0] as f64, d * rest_m[1] as f64];
        let u_rest = [i * (-rest[1]) * vb, i * rest[0] * vb];
        let adv = u_rest[0] * (i * xi[0]) + u_rest[1] * (i * xi[1]);
        let va = e.value();
        acc[0] += adv * (i * (-xi[1]) * va);
        acc[1] += adv * (i * xi[0] * va);
    }
    let l2 = (2.0 * PI / d).powi(2);
    [acc[0] / l2, acc[1] / l2]
}

/// One row of the per-`k` table.
#[derive(Clone, Debug, Serialize)]
pub struct KRow {
    pub k: i32,
    pub pairs: usize,
    /// Scalar remainders `c_2^l(k)` of the overlap expansion.
    pub c2_scalar: [f64; 2],
    /// Projected remainder vector, standard projector.
    pub c2: [[f64; 2]; 2],
    pub c2_norm: f64,
    /// `F((u0.grad)u0)(xi^k)` from the overlap expansion.
    pub expansion: [[f64; 2]; 2],
    /// The same from the pairwise convolution sum.
    pub convolution: [[f64; 2]; 2],
    pub relative_difference: f64,
}

/// Constants of the first-order response and the per-`k` comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct MechanismConstants {
    pub spec: CounterexampleSpec,
    pub step: f64,
    pub low_mass: f64,
    pub moment: f64,
    pub moment_unweighted: f64,
    pub moment_from_offset: f64,
    pub low_shell: [f64; 2],
    pub shell_shell: [f64; 2],
    pub c0: [[f64; 2]; 2],
    pub c1_scalar: [f64; 2],
    /// `c_1` under the standard projector.
    pub c1: [[f64; 2]; 2],
    /// `c_1` under the symbol printed alongside the construction.
    pub c1_printed: [[f64; 2]; 2],
    pub c1_ratio: f64,
    pub c1_printed_ratio: f64,
    pub rows: Vec<KRow>,
    pub max_relative_difference: f64,
}

fn pair(v: [C64; 2]) -> [[f64; 2]; 2] {
    [[v[0].re, v[0].im], [v[1].re, v[1].im]]
}

fn norm2(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Evaluates `c_1`, `c_2(k)` and checks them against direct convolution sums
/// for each `k` in `ks`.
pub fn mechanism_constants(spec: &CounterexampleSpec, ks: &[i32], quad: Quadrature) -> Result<MechanismConstants> {
    spec.validate()?;
    if ks.iter().any(|&k| !(3..=20).contains(&k)) {
        return Err(Error::InvalidArgument("mechanism targets must lie in [3, 20]".into()));
    }
    if ks.iter().any(|&k| k > spec.k_max) {
        return Err(Error::InvalidArgument("mechanism target beyond k_max".into()));
    }
    let h = quad.step(spec);
    let low = low_moments(spec, h);
    if low.j_plain == 0.0 {
        return Err(Error::MomentVanishes);
    }
    let unit = unit_moments(spec, h);
    let e = spec.e();
    let s = spec.s;
    let pre = C64::new(0.0, 5.0 / (8.0 * 4.0 * PI * PI));
    let c1_scalar = [-5.0 * 2f64.powf(s - 1.0) * e[0] * low.j, -5.0 * 2f64.powf(s - 1.0) * e[1] * low.j];
    let c1_raw = [pre * (-c1_scalar[1]), pre * c1_scalar[0]];
    let c1 = leray_symbol(e, c1_raw);
    let c1_printed = printed_leray_symbol(e, c1_raw);
    let ratio = |v: [C64; 2]| v[1].norm() / v[0].norm();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &k in ks {
        let kf = k as f64;
        let c2_scalar = [0, 1].map(|l| {
            2f64.powf(s + 2.0 - kf) * low.i3[l] + 2f64.powf(2.0 * (s + 1.0) - kf * (s + 2.0)) * unit[l]
        });
        let c2 = leray_symbol(e, [pre * (-c2_scalar[1]), pre * c2_scalar[0]]);
        let w1 = 2f64.powf(-(kf - 1.0) * (s + 1.0));
        let w2 = 2f64.powf(-2.0 * (kf - 1.0) * (s + 1.0));
        let total = [0, 1].map(|l| {
            w1 * (2.0 * low.i3[l] - 5.0 * 2f64.powi(k - 2) * e[l] * low.j) + w2 * unit[l]
        });
        let f = [0, 1].map(|l| C64::new(0.0, 5.0 * 2f64.powi(k - 3) / (4.0 * PI * PI) * total[l]));
        let expansion = [-f[1], f[0]];
        let convolution = convective_by_pairs(spec, k, h);
        let diff = norm2([expansion[0] - convolution[0], expansion[1] - convolution[1]]) / norm2(convolution);
        worst = worst.max(diff);
        rows.push(KRow {
            k,
            pairs: interaction_table(k, spec).len(),
            c2_scalar,
            c2: pair(c2),
            c2_norm: norm2(c2),
            expansion: pair(expansion),
            convolution: pair(convolution),
            relative_difference: diff,
        });
    }
    if worst > 1e-8 {
        return Err(Error::RouteDisagreement(worst));
    }
    Ok(MechanismConstants {
        spec: *spec,
        step: h,
        low_mass: low.mass,
        moment: low.j,
        moment_unweighted: low.j_plain,
        moment_from_offset: 2.0 * spec.delta * low.mass,
        low_shell: low.i3,
        shell_shell: unit,
        c0: pair(spec.c0()),
        c1_scalar,
        c1: pair(c1),
        c1_printed: pair(c1_printed),
        c1_ratio: ratio(c1),
        c1_printed_ratio: ratio(c1_printed),
        rows,
        max_relative_difference: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree_grid_adapted() {
        let spec = CounterexampleSpec::grid_adapted(6);
        let m = mechanism_constants(&spec, &[3, 4, 5, 6], Quadrature { cells_per_radius: 32.0 }).unwrap();
        assert!(m.max_relative_difference < 1e-10, "{}", m.max_relative_difference);
        assert!(m.rows.iter().all(|r| r.pairs == 3));
    }

    #[test]
    fn moment_matches_offset_formula() {
        let spec = CounterexampleSpec::faithful(5);
        let low = low_moments(&spec, spec.rho / 64.0);
        assert!((low.j_plain - 2.0 * spec.delta * low.mass).abs() <= 1e-6 * low.j_plain.abs());
        assert_eq!(low.j, low.j_plain);
    }
}
