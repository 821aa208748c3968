use std::f64::consts::PI;

use lpeuler::spectral::{self, Dealiaser, Padding};
use lpeuler::{SpectralField, TorusGrid, C64};
use proptest::prelude::*;

fn field(grid: TorusGrid, ncomp: usize, vals: &[(f64, f64)]) -> SpectralField {
    let mut it = vals.iter().cycle();
    let comps = (0..ncomp)
        .map(|_| (0..grid.len()).map(|_| { let (a, b) = it.next().unwrap(); C64::new(*a, *b) }).collect())
        .collect();
    SpectralField::new(grid, comps).unwrap()
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..64)
}

fn convolve(grid: &TorusGrid, f: &[C64], g: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::default(); grid.len()];
    let l2 = grid.period() * grid.period();
    for a in 0..grid.len() {
        let ma = grid.modes(a);
        for b in 0..grid.len() {
            if let Some(t) = grid.index([ma[0] + grid.modes(b)[0], ma[1] + grid.modes(b)[1]]) {
                out[t] += f[a] * g[b] / l2;
            }
        }
    }
    out
}

#[test]
fn slot_and_mode_are_inverse() {
    let g = TorusGrid::new(16, 2.0 * PI).unwrap();
    for p in 0..16 {
        assert_eq!(g.slot(g.mode(p)), Some(p));
    }
    assert_eq!(g.mode(8), -8);
    assert_eq!(g.slot(8), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn roundtrip_is_identity(v in values(), l in 0.5f64..40.0) {
        let g = TorusGrid::new(16, l).unwrap();
        let f = field(g, 2, &v);
        let back = spectral::forward(&spectral::inverse(&f));
        let scale = f.max_abs();
        for (a, b) in f.components().iter().zip(back.components()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn parseval(v in values(), l in 0.5f64..40.0) {
        let g = TorusGrid::new(16, l).unwrap();
        let f = field(g, 2, &v);
        let phys: f64 = spectral::inverse(&f).components().iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * g.cell_area();
        prop_assert!((phys - f.l2_squared()).abs() <= 1e-12 * phys);
    }

    #[test]
    fn real_part_is_hermitian(v in values()) {
        let g = TorusGrid::new(16, 2.0 * PI).unwrap();
        let f = field(g, 2, &v);
        let r = f.real_part();
        prop_assert_eq!(r.hermitian_defect(), 0.0);
        let phys = spectral::inverse(&r);
        for c in phys.components() {
            for z in c {
                prop_assert!(z.im.abs() <= 1e-12 * f.max_abs());
            }
        }
    }

    #[test]
    fn products_are_exact_and_commutative(a in values(), b in values()) {
        let g = TorusGrid::new(8, 2.0 * PI).unwrap();
        let f = field(g, 1, &a);
        let h = field(g, 1, &b);
        let exact = convolve(&g, f.component(0), h.component(0));
        let scale = exact.iter().fold(1e-300f64, |m, z| m.max(z.norm()));
        for pad in [Padding::ThreeHalves, Padding::Double] {
            let mut d = Dealiaser::new(g, pad);
            let p = d.product(f.component(0), h.component(0));
            let q = d.product(h.component(0), f.component(0));
            for ((x, y), z) in p.iter().zip(&q).zip(&exact) {
                prop_assert!((x - z).norm() <= 1e-12 * scale);
                prop_assert!((x - y).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn derivative_is_multiplication_by_i_xi(v in values(), axis in 1usize..3) {
        let g = TorusGrid::new(16, 3.0).unwrap();
        let f = field(g, 1, &v);
        let d = spectral::spectral_derivative(&f, axis).unwrap();
        for idx in 0..g.len() {
            let want = f.component(0)[idx] * C64::new(0.0, g.wavevector(idx)[axis - 1]);
            prop_assert!((d.component(0)[idx] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }
}
