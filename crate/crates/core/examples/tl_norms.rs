//! Triebel-Lizorkin, Besov and Lipschitz norms of a frequency-localized bump.

use std::f64::consts::PI;

use lpeuler::counterexample::{build_bump, CounterexampleSpec};
use lpeuler::filter::FilterBank;
use lpeuler::norms::NormReport;
use lpeuler::TorusGrid;

fn main() -> lpeuler::Result<()> {
    let grid = TorusGrid::new(1024, 16.0 * PI)?;
    let fb = FilterBank::new(grid);
    let spec = CounterexampleSpec::grid_adapted(4).with_theta(0.0);
    for j in 1..=4 {
        let a = build_bump(j, &spec, &grid)?.to_field(&grid)?;
        let r = NormReport::compute(&fb, &a, 3.0)?;
        println!(
            "a_{j}: F^3_(1,inf) = {:.4e}, homogeneous = {:.4e}, B^0_(inf,1) = {:.4}, dominant block {}",
            r.tl, r.tl_homogeneous, r.besov, r.dominant_block
        );
    }
    Ok(())
}
