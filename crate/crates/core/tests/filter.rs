use std::f64::consts::PI;

use lpeuler::filter::{psi, FilterBank};
use lpeuler::{SpectralField, TorusGrid, C64};
use proptest::prelude::*;

fn grid() -> TorusGrid {
    TorusGrid::new(64, 8.0 * PI).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_a_monotone_cutoff(r in 0.0f64..2.0, dr in 0.0f64..0.5) {
        let (a, b) = (psi(r), psi(r + dr));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
        if r <= 0.75 { prop_assert_eq!(a, 1.0); }
        if r >= 1.0 { prop_assert_eq!(a, 0.0); }
    }

    #[test]
    fn blocks_partition_unity(a in -32i64..32, b in -32i64..32) {
        let fb = FilterBank::new(grid());
        let total: f64 = (-1..=fb.j_max()).map(|j| fb.block_symbol(j, [a, b])).sum();
        prop_assert!((total - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn homogeneous_shells_partition_unity(a in -32i64..32, b in -32i64..32) {
        prop_assume!([a, b] != [0, 0]);
        let fb = FilterBank::new(grid());
        let total: f64 = (fb.j_min()..=fb.j_max()).map(|j| fb.shell(j, [a, b])).sum();
        prop_assert!((total - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn shells_live_in_their_annulus(j in 0i32..5, a in -32i64..32, b in -32i64..32) {
        let g = grid();
        let fb = FilterBank::new(g);
        let xi = g.lattice_point([a, b]);
        let r = xi[0].hypot(xi[1]) / 2f64.powi(j);
        if fb.shell(j, [a, b]) != 0.0 {
            prop_assert!(r > 0.75 - 1e-12 && r < 2.0 + 1e-12, "j={} r={}", j, r);
        }
    }

    #[test]
    fn decomposition_reconstructs(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..50)) {
        let g = grid();
        let fb = FilterBank::new(g);
        let mut it = v.iter().cycle();
        let comps = vec![(0..g.len()).map(|_| { let (x, y) = it.next().unwrap(); C64::new(*x, *y) }).collect()];
        let f = SpectralField::new(g, comps).unwrap();
        prop_assert!(fb.decompose(&f).unwrap().relative_residual(&f) <= 1e-12);
    }

    #[test]
    fn partial_sums_telescope(k in 0i32..4, a in -32i64..32, b in -32i64..32) {
        let fb = FilterBank::new(grid());
        let sum: f64 = (-1..=k).map(|j| fb.block_symbol(j, [a, b])).sum();
        prop_assert!((sum - fb.level(k + 1, [a, b])).abs() <= 1e-14);
    }
}

#[test]
fn homogeneous_block_below_resolution_is_rejected() {
    let fb = FilterBank::new(grid());
    let f = SpectralField::zeros(grid(), 1);
    assert!(fb.homogeneous_block(&f, fb.j_min() - 1).is_err());
    assert!(fb.homogeneous_block(&f, fb.j_min()).is_ok());
}
