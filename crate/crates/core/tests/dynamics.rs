use std::f64::consts::PI;

use lpeuler::counterexample::{build_alpha, build_u0, lattice_convective, CounterexampleSpec};
use lpeuler::dynamics::*;
use lpeuler::filter::FilterBank;
use lpeuler::norms::{self, tl_norm};
use lpeuler::paradiff::leray_symbol;
use lpeuler::spectral::{self, Padding, RealField, SpectralField, TorusGrid, C64};

fn taylor_green(g: TorusGrid, shear: f64) -> SpectralField {
    spectral::forward(
        &RealField::from_fn(g, 2, |x| {
            vec![
                C64::new(x[0].sin() * x[1].cos() + shear * (2.0 * x[1]).sin(), 0.0),
                C64::new(-x[0].cos() * x[1].sin(), 0.0),
            ]
        })
        .unwrap(),
    )
    .assert_real()
    .unwrap()
}

fn small_setup(k_max: i32) -> (TorusGrid, CounterexampleSpec, SpectralField) {
    let g = TorusGrid::new(256, 16.0 * PI).unwrap();
    let spec = CounterexampleSpec::grid_adapted(k_max).with_theta(0.0);
    let u0 = build_u0(&spec, &g).unwrap();
    (g, spec, u0)
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs()
}

#[test]
fn taylor_green_is_steady() {
    let g = TorusGrid::new(32, 2.0 * PI).unwrap();
    let u = taylor_green(g, 0.0);
    let mut e = Euler::new(g, Padding::TwoThirds);
    let r = e.rhs(&u).unwrap();
    assert!(spectral_divergence(&r) <= 1e-12);
    assert!(r.max_abs() / u.max_abs() <= 1e-10, "{}", r.max_abs());
}

#[test]
fn rhs_matches_sparse_oracle() {
    let (g, spec, u0) = small_setup(2);
    let alpha = build_alpha(&spec, &g).unwrap();
    let mut e = Euler::new(g, Padding::TwoThirds);
    let r = e.rhs(&u0).unwrap();
    for p in tracked_points(&spec, &g, &[1, 2]).unwrap() {
        let i = g.index(p.m).unwrap();
        let f = leray_symbol(p.xi, lattice_convective(&alpha, p.m));
        let want = [-f[0], -f[1]];
        let got = [r.component(0)[i], r.component(1)[i]];
        let scale = want[0].norm().hypot(want[1].norm());
        let err = (got[0] - want[0]).norm().hypot((got[1] - want[1]).norm());
        assert!(err <= 1e-8 * scale, "k {} err {err:e} scale {scale:e}", p.k);
    }
    assert_eq!(r.component(0)[0], C64::default());
    assert_eq!(r.component(1)[0], C64::default());
}

#[test]
fn rhs_rejects_divergent_fields() {
    let g = TorusGrid::new(16, 2.0 * PI).unwrap();
    let u = spectral::forward(&RealField::from_fn(g, 2, |x| vec![C64::new(x[0].sin(), 0.0), C64::default()]).unwrap());
    let mut e = Euler::new(g, Padding::TwoThirds);
    assert!(matches!(e.rhs(&u), Err(lpeuler::Error::NotDivergenceFree(_))));
}

#[test]
fn rk4_is_fourth_order() {
    let g = TorusGrid::new(32, 2.0 * PI).unwrap();
    let u0 = taylor_green(g, 0.5);
    let mut e = Euler::new(g, Padding::TwoThirds);
    let run = |e: &mut Euler, steps: usize| {
        let dt = 0.5 / steps as f64;
        let mut u = u0.clone();
        for _ in 0..steps {
            u = e.step(&u, dt).unwrap();
        }
        u
    };
    let reference = run(&mut e, 640);
    let coarse = rel_diff(&run(&mut e, 40), &reference);
    let fine = rel_diff(&run(&mut e, 80), &reference);
    let ratio = coarse / fine;
    assert!((ratio - 16.0).abs() <= 0.3 * 16.0, "ratio {ratio} coarse {coarse:e}");
}

#[test]
fn stability_bound_is_enforced() {
    let g = TorusGrid::new(32, 2.0 * PI).unwrap();
    let u = taylor_green(g, 0.0);
    let mut e = Euler::new(g, Padding::TwoThirds);
    assert!(matches!(e.step(&u, 1.0), Err(lpeuler::Error::Unstable(_))));
}

#[test]
fn energy_is_conserved_for_real_data() {
    let (g, _, u0) = small_setup(2);
    let u = u0.real_part();
    assert!(u.hermitian_defect() == 0.0);
    let t1 = 0.1 / norms::w1inf_norm(&u).unwrap();
    let mut cfg = SimulationConfig::new(t1, 100, 3.0, FilterBank::new(g).j_max());
    cfg.norms = false;
    let tr = simulate(&cfg, &u, &[], |_, _, _| Ok(())).unwrap();
    assert!(tr.energy_drift <= 1e-8, "{}", tr.energy_drift);
    assert!(tr.max_mean <= 1e-12);
}

#[test]
fn zero_length_run_is_a_single_snapshot() {
    let (g, spec, u0) = small_setup(2);
    let cfg = SimulationConfig::new(0.0, 0, 3.0, 7);
    let tr = simulate(&cfg, &u0, &tracked_points(&spec, &g, &[2]).unwrap(), |_, _, _| Ok(())).unwrap();
    assert_eq!(tr.rows.len(), 1);
    assert_eq!(tr.norms.len(), 1);
    assert_eq!(tr.to_csv().lines().count(), 2);
    let fb = FilterBank::new(g);
    let fs = tl_norm(&fb, &u0, 3.0, false).unwrap();
    let i = tr.label_index(&norm_label("u", 3.0)).unwrap();
    assert_eq!(tr.norms[0].values[i], Some(fs));
}

#[test]
fn run_diagnostics_are_consistent() {
    let (g, spec, u0) = small_setup(2);
    let t1 = 0.1 / norms::w1inf_norm(&u0).unwrap();
    let mut cfg = SimulationConfig::new(t1, 16, 3.0, FilterBank::new(g).j_max());
    cfg.cadence = 4;
    let tracked = tracked_points(&spec, &g, &[1, 2]).unwrap();
    let tr = simulate(&cfg, &u0, &tracked, |_, _, _| Ok(())).unwrap();
    assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
    assert!(tr.max_mean <= 1e-12);
    assert!(tr.max_divergence <= 1e-10);
    for i in 0..tracked.len() {
        let d = duhamel_check(&tr, i, 5).unwrap();
        assert!(d.residual <= 0.05, "k {} residual {}", d.k, d.residual);
    }
    let c = continuity_probe(&tr, 0.5).unwrap();
    assert_eq!(c.at_zero, 0.0);
    assert!(c.monotone);
    assert!(c.lipschitz.residual <= 0.1);
    let inf = inflation_analysis(&tr, 6, Some(1.25), None).unwrap();
    for r in &inf.rows {
        assert!(r.rel_err <= 0.05);
        assert!(r.g0_rel_err.unwrap() <= 0.02);
    }
}

#[test]
fn backward_runs_reverse_time() {
    let (g, spec, u0) = small_setup(2);
    let t1 = 0.05 / norms::w1inf_norm(&u0).unwrap();
    let mut cfg = SimulationConfig::new(t1, 4, 3.0, 7);
    cfg.norms = false;
    let tracked = tracked_points(&spec, &g, &[2]).unwrap();
    let mut end = None;
    simulate(&cfg, &u0, &tracked, |s, _, u| {
        if s == 4 {
            end = Some(u.clone());
        }
        Ok(())
    })
    .unwrap();
    cfg.dt = -cfg.dt;
    let mut back = None;
    let tr = simulate(&cfg, &end.unwrap(), &tracked, |s, _, u| {
        if s == 4 {
            back = Some(u.clone());
        }
        Ok(())
    })
    .unwrap();
    assert!(tr.rows[4].t < 0.0);
    assert!(rel_diff(&back.unwrap(), &u0) <= 1e-8);
}

#[test]
fn weak_functional_properties() {
    let (g, _, u0) = small_setup(2);
    let fb = FilterBank::new(g);
    let j_max = fb.j_max();
    let one = WeakSequenceSpec::one_hot(2, j_max);
    let n = weak_functional(&fb, &u0, &one, 3.0).unwrap();
    let block = fb.block(&u0, 2).unwrap();
    let (l1, _) = spectral::lebesgue_norms(&spectral::inverse(&block));
    assert!((n - 64.0 * l1).abs() <= 1e-12 * n, "{n} {l1}");

    let spec = WeakSequenceSpec::geometric(j_max);
    let n = weak_functional(&fb, &u0, &spec, 3.0).unwrap();
    assert!(n <= spec.l1() * tl_norm(&fb, &u0, 3.0, false).unwrap());
}

#[test]
fn approximants_converge() {
    let (g, _, u0) = small_setup(2);
    let fb = FilterBank::new(g);
    let weak = WeakSequenceSpec::geometric(fb.j_max());
    let r = approximant_report(&fb, &u0, 3.0, 0.5, &[0, 1, fb.j_max() + 1], &weak, &[0.4, 0.2, 0.1]).unwrap();
    let ratio = r.partial[1].ratio.unwrap();
    assert!((ratio - 2f64.powf(-0.5)).abs() <= 0.2 * 2f64.powf(-0.5), "ratio {ratio}");
    assert!(r.partial[2].exact);
    assert!(r.mollified.windows(2).all(|w| w[1][1] < w[0][1]));
}
