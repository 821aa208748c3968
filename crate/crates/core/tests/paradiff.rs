use std::f64::consts::PI;

use lpeuler::filter::FilterBank;
use lpeuler::paradiff::{bony, bony_residual, divergence_residual, leray, leray_symbol, ls_slope, product, printed_leray_symbol};
use lpeuler::spectral::{Dealiaser, Padding};
use lpeuler::{SpectralField, TorusGrid, C64};
use proptest::prelude::*;

fn grid() -> TorusGrid {
    TorusGrid::new(32, 4.0 * PI).unwrap()
}

/// Field with the given coefficients on modes `|m_i| <= reach`.
fn banded(g: TorusGrid, ncomp: usize, reach: i64, vals: &[(f64, f64)]) -> SpectralField {
    let mut it = vals.iter().cycle();
    let mut f = SpectralField::zeros(g, ncomp);
    for c in 0..ncomp {
        for idx in 0..g.len() {
            let m = g.modes(idx);
            if m[0].abs() <= reach && m[1].abs() <= reach {
                let (a, b) = it.next().unwrap();
                f.component_mut(c)[idx] = C64::new(*a, *b);
            }
        }
    }
    f
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_is_an_idempotent_projection(v in values()) {
        let u = banded(grid(), 2, 15, &v);
        let p = leray(&u).unwrap();
        let pp = leray(&p).unwrap();
        prop_assert!(pp.sub(&p).unwrap().max_abs() <= 1e-13 * u.max_abs());
        prop_assert!(divergence_residual(&p).unwrap() <= 1e-12);
    }

    #[test]
    fn leray_symbol_is_orthogonal(x in -5.0f64..5.0, y in -5.0f64..5.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!(x.hypot(y) > 1e-3);
        let v = [C64::new(a, b), C64::new(b, -a)];
        let p = leray_symbol([x, y], v);
        let q = [v[0] - p[0], v[1] - p[1]];
        let dot = p[0] * q[0].conj() + p[1] * q[1].conj();
        prop_assert!(dot.norm() <= 1e-12);
        let printed = printed_leray_symbol([x, y], v);
        prop_assert!(printed[0].is_finite() && printed[1].is_finite());
    }

    #[test]
    fn bony_pieces_sum_to_the_product(a in values(), b in values()) {
        let g = grid();
        let fb = FilterBank::new(g);
        let mut d = Dealiaser::new(g, Padding::ThreeHalves);
        let f = banded(g, 1, 7, &a);
        let h = banded(g, 1, 7, &b);
        prop_assert!(bony_residual(&fb, &mut d, &f, &h).unwrap() <= 1e-12);
        let split = bony(&fb, &mut d, &f, &h).unwrap();
        let swapped = bony(&fb, &mut d, &h, &f).unwrap();
        let scale = product(&mut d, &f, &h).unwrap().max_abs().max(1e-300);
        prop_assert!(split.t_f_g.sub(&swapped.t_g_f).unwrap().max_abs() <= 1e-12 * scale);
        prop_assert!(split.remainder.sub(&swapped.remainder).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn slope_of_a_line_is_exact(m in -3.0f64..3.0, c in -5.0f64..5.0) {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| m * v + c).collect();
        prop_assert!((ls_slope(&x, &y).unwrap() - m).abs() <= 1e-12);
    }
}

#[test]
fn product_band_is_enforced() {
    let g = grid();
    let fb = FilterBank::new(g);
    let mut d = Dealiaser::new(g, Padding::ThreeHalves);
    let f = banded(g, 1, 12, &[(1.0, 0.0)]);
    assert!(bony(&fb, &mut d, &f, &f).is_err());
}

#[test]
fn degenerate_slope_is_rejected() {
    assert!(ls_slope(&[1.0, 1.0], &[0.0, 2.0]).is_err());
}
