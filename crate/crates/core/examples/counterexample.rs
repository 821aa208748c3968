//! The initial datum, its norms, and the first-order inflation constants.

use std::f64::consts::PI;

use lpeuler::counterexample::{build_u0, interaction_table, mechanism_constants, membership_report, CounterexampleSpec, Quadrature};
use lpeuler::filter::FilterBank;
use lpeuler::TorusGrid;

fn main() -> lpeuler::Result<()> {
    let spec = CounterexampleSpec::grid_adapted(5);
    let grid = TorusGrid::new(1024, 16.0 * PI)?;
    let u0 = build_u0(&spec, &grid)?;
    let report = membership_report(&FilterBank::new(grid), &u0, spec.s)?;
    println!("||u0||_F3 = {:.4}, W1inf = {:.4}", report.norms.tl, report.norms.w1inf);
    for (j, w) in &report.weighted_blocks {
        println!("  2^(3j) ||Delta_{j} u0||_1 = {w:.4}");
    }
    for k in 3..=5 {
        println!("k = {k}: {} interacting ball pairs", interaction_table(k, &spec).len());
    }
    let m = mechanism_constants(&spec, &[3, 4, 5], Quadrature::default())?;
    println!("c1 = {:?}, component ratio {:.4}", m.c1, m.c1_ratio);
    for r in &m.rows {
        println!("k = {}: |c2| = {:.4e}, route difference {:.1e}", r.k, r.c2_norm, r.relative_difference);
    }
    Ok(())
}
