//! Littlewood-Paley blocks of a field with energy in several shells.

use std::f64::consts::PI;

use lpeuler::filter::FilterBank;
use lpeuler::spectral;
use lpeuler::{RealField, TorusGrid, C64};

fn main() -> lpeuler::Result<()> {
    let grid = TorusGrid::new(128, 2.0 * PI)?;
    let fb = FilterBank::new(grid);
    let f = RealField::from_fn(grid, 1, |x| {
        let v = x[0].cos() + 0.5 * (5.0 * x[1]).sin() + 0.25 * (20.0 * x[0] + 9.0 * x[1]).cos();
        vec![C64::new(v, 0.0)]
    })?;
    let dec = fb.decompose(&spectral::forward(&f))?;
    for (j, b) in &dec.blocks {
        let (l1, sup) = spectral::lebesgue_norms(&spectral::inverse(b));
        if sup > 1e-12 {
            println!("j = {j:>2}: ||Delta_j f||_1 = {l1:.5}, sup = {sup:.5}");
        }
    }
    println!("reconstruction residual = {:.2e}", dec.relative_residual(&spectral::forward(&f)));
    Ok(())
}
