mod common;

use std::f64::consts::PI;

use lpeuler::counterexample::{build_bump, CounterexampleSpec};
use lpeuler::filter::FilterBank;
use lpeuler::norms::{besov_norm, equivalence_report, tl_norm, w1inf_norm, NormReport};
use lpeuler::spectral::{self, RealField};
use lpeuler::{SpectralField, TorusGrid, C64};
use proptest::prelude::*;

fn default_grid() -> TorusGrid {
    TorusGrid::new(2048, 16.0 * PI).unwrap()
}

/// Field with coefficients `coeffs` on the lattice points whose radius lies in `[lo, hi]`.
fn band_field(grid: TorusGrid, ncomp: usize, lo: f64, hi: f64, coeffs: &[(f64, f64)]) -> SpectralField {
    let mut f = SpectralField::zeros(grid, ncomp);
    let mut it = coeffs.iter().cycle();
    for c in 0..ncomp {
        for idx in 0..grid.len() {
            let xi = grid.wavevector(idx);
            let r = xi[0].hypot(xi[1]);
            if r >= lo && r <= hi {
                let (a, b) = it.next().unwrap();
                f.component_mut(c)[idx] = C64::new(*a, *b);
            }
        }
    }
    f
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40)
}

fn small_grid() -> TorusGrid {
    TorusGrid::new(32, 4.0 * PI).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn zero_field_has_zero_norms() {
    let g = small_grid();
    let fb = FilterBank::new(g);
    let z = SpectralField::zeros(g, 2);
    assert_eq!(tl_norm(&fb, &z, 1.5, false).unwrap(), 0.0);
    assert_eq!(tl_norm(&fb, &z, 1.5, true).unwrap(), 0.0);
    assert_eq!(besov_norm(&fb, &z).unwrap(), 0.0);
    assert_eq!(w1inf_norm(&z).unwrap(), 0.0);
    assert_eq!(equivalence_report(&fb, &z, 2.0).unwrap(), 1.0);
}

#[test]
fn low_block_field_scales_by_two_to_minus_s() {
    let g = small_grid();
    let fb = FilterBank::new(g);
    let f = band_field(g, 1, 0.0, 0.7, &[(0.3, -0.2), (1.0, 0.5), (-0.4, 0.1)]);
    let (l1, _) = spectral::lebesgue_norms(&spectral::inverse(&f));
    for s in [0.5, 2.0, 3.0] {
        let v = tl_norm(&fb, &f, s, false).unwrap();
        assert!(rel(v, 2f64.powf(-s) * l1) < 1e-12, "s={s}: {v} vs {}", 2f64.powf(-s) * l1);
    }
}

#[test]
fn single_bump_norms_match_kernel_oracle() {
    let g = default_grid();
    let fb = FilterBank::with_jmax(g, 7);
    let spec = CounterexampleSpec::grid_adapted(5).with_theta(0.0);
    let (phi_l1, phi0) = common::phi_oracle(&g, 4);
    for j in 2..=6 {
        let a = build_bump(j, &spec, &g).unwrap().to_field(&g).unwrap();
        let (l1, linf) = spectral::lebesgue_norms(&spectral::inverse(&a));
        assert!(rel(l1, phi_l1) < 1e-3, "j={j}: ||a_j||_1 = {l1}, oracle {phi_l1}");
        assert!(rel(linf, phi0) < 1e-12, "j={j}: ||a_j||_inf = {linf}, Phi(0) = {phi0}");
        let tl = tl_norm(&fb, &a, 3.0, false).unwrap();
        assert!(rel(tl, 2f64.powi(3 * j) * l1) < 1e-12, "j={j}: single block");
        assert!(rel(tl, 2f64.powi(3 * j) * phi_l1) < 1e-3);
        let b = besov_norm(&fb, &a).unwrap();
        assert!(rel(b, 2f64.powi(j) * phi0) < 1e-3, "j={j}: besov {b}");
    }
    let a2 = build_bump(2, &spec, &g).unwrap().to_field(&g).unwrap();
    let a5 = build_bump(5, &spec, &g).unwrap().to_field(&g).unwrap();
    let sum = besov_norm(&fb, &a2.add(&a5).unwrap()).unwrap();
    let parts = besov_norm(&fb, &a2).unwrap() + besov_norm(&fb, &a5).unwrap();
    assert!(rel(sum, parts) < 1e-6, "besov additivity {sum} vs {parts}");
}

#[test]
fn w1inf_examples() {
    let g = TorusGrid::new(32, 2.0 * PI).unwrap();
    let area = g.period() * g.period();
    let mut c = SpectralField::zeros(g, 2);
    c.component_mut(0)[0] = C64::new(area, 0.0);
    assert!((w1inf_norm(&c).unwrap() - 1.0).abs() < 1e-12);
    let s = RealField::from_fn(g, 2, |x| vec![C64::new(x[1].sin(), 0.0), C64::default()]).unwrap();
    let s = spectral::forward(&s);
    assert!((w1inf_norm(&s).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn w1inf_is_stable_under_refinement() {
    let spec = CounterexampleSpec::grid_adapted(3);
    let coarse = TorusGrid::new(1024, 16.0 * PI).unwrap();
    let fine = TorusGrid::new(2048, 16.0 * PI).unwrap();
    let a = w1inf_norm(&lpeuler::counterexample::build_u0(&spec, &coarse).unwrap()).unwrap();
    let b = w1inf_norm(&lpeuler::counterexample::build_u0(&spec, &fine).unwrap()).unwrap();
    assert!(rel(a, b) < 0.01, "W1inf {a} vs {b}");
}

#[test]
fn equivalence_ratio_is_bounded() {
    let g = default_grid();
    let fb = FilterBank::with_jmax(g, 7);
    let spec = CounterexampleSpec::grid_adapted(5).with_theta(0.0);
    let a = build_bump(3, &spec, &g).unwrap().to_field(&g).unwrap();
    let r = equivalence_report(&fb, &a, 2.0).unwrap();
    assert!((0.1..=10.0).contains(&r), "ratio {r}");
    assert!(equivalence_report(&fb, &a, 0.0).is_err());
}

#[test]
fn report_is_consistent() {
    let g = small_grid();
    let fb = FilterBank::new(g);
    let f = band_field(g, 2, 0.0, 6.0, &[(0.3, -0.2), (1.0, 0.5), (-0.4, 0.1), (0.2, 0.9)]);
    let r = NormReport::compute(&fb, &f, 1.5).unwrap();
    assert!(rel(r.tl, tl_norm(&fb, &f, 1.5, false).unwrap()) < 1e-14);
    assert!(rel(r.besov, besov_norm(&fb, &f).unwrap()) < 1e-14);
    assert!(r.blocks.iter().any(|b| b.j == r.dominant_block));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_dominates_each_block(c in coeffs(), s in 0.0f64..3.0) {
        let g = small_grid();
        let fb = FilterBank::new(g);
        let f = band_field(g, 2, 0.0, 8.0, &c);
        let total = tl_norm(&fb, &f, s, false).unwrap();
        for j in -1..=fb.j_max() {
            let b = fb.block(&f, j).unwrap();
            let (l1, _) = spectral::lebesgue_norms(&spectral::inverse(&b));
            prop_assert!(total >= 2f64.powf(j as f64 * s) * l1 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn triangle_inequality(c1 in coeffs(), c2 in coeffs(), s in 0.0f64..3.0) {
        let g = small_grid();
        let fb = FilterBank::new(g);
        let f = band_field(g, 2, 0.0, 8.0, &c1);
        let h = band_field(g, 2, 1.0, 6.0, &c2);
        for homogeneous in [false, true] {
            let lhs = tl_norm(&fb, &f.add(&h).unwrap(), s, homogeneous).unwrap();
            let rhs = tl_norm(&fb, &f, s, homogeneous).unwrap() + tl_norm(&fb, &h, s, homogeneous).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn monotone_in_s_above_block_zero(c in coeffs(), s in 0.0f64..3.0, ds in 0.01f64..1.0) {
        let g = small_grid();
        let fb = FilterBank::new(g);
        let f = band_field(g, 2, 2.01, 8.0, &c);
        let lo = tl_norm(&fb, &f, s, false).unwrap();
        let hi = tl_norm(&fb, &f, s + ds, false).unwrap();
        prop_assert!(hi >= lo * (1.0 - 1e-12));
    }

    #[test]
    fn homogeneous_dilation_covariance(c in coeffs(), s in -1.0f64..3.0) {
        // f(2x) on the half-period torus carries the same lattice array divided by 4.
        let g = TorusGrid::new(32, 8.0 * PI).unwrap();
        let half = TorusGrid::new(32, 4.0 * PI).unwrap();
        let f = band_field(g, 2, 0.5, 2.0, &c);
        let d = SpectralField::new(half, f.scaled(0.25).into_components()).unwrap();
        let a = tl_norm(&FilterBank::new(g), &f, s, true).unwrap();
        let b = tl_norm(&FilterBank::new(half), &d, s, true).unwrap();
        prop_assert!(rel(b, 2f64.powf(s - 2.0) * a) < 1e-10, "{} vs {}", b, 2f64.powf(s - 2.0) * a);
    }

    #[test]
    fn scaling_is_absolutely_homogeneous(c in coeffs(), s in 0.0f64..3.0, lambda in -4.0f64..4.0) {
        let g = small_grid();
        let fb = FilterBank::new(g);
        let f = band_field(g, 2, 0.0, 8.0, &c);
        let a = tl_norm(&fb, &f, s, false).unwrap();
        let b = tl_norm(&fb, &f.scaled(lambda), s, false).unwrap();
        prop_assert!((b - lambda.abs() * a).abs() <= 1e-12 * a.max(1e-300) + 1e-14);
    }
}
