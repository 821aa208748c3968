//! Forward and inverse transforms, Parseval, and a dealiased product.

use std::f64::consts::PI;

use lpeuler::spectral::{self, Dealiaser, Padding};
use lpeuler::{RealField, TorusGrid, C64};

fn main() -> lpeuler::Result<()> {
    let grid = TorusGrid::new(64, 2.0 * PI)?;
    let f = RealField::from_fn(grid, 1, |x| vec![C64::new((2.0 * x[0]).sin() * x[1].cos(), 0.0)])?;
    let hat = spectral::forward(&f);
    let (_, sup) = spectral::lebesgue_norms(&f);
    println!("sup |f| = {sup:.6}, integral |f|^2 = {:.6} (pi^2 = {:.6})", hat.l2_squared(), PI * PI);

    let mut d = Dealiaser::new(grid, Padding::ThreeHalves);
    let sq = d.product(hat.component(0), hat.component(0));
    let mean = sq[0].re / (grid.period() * grid.period());
    println!("mean of f^2 = {mean:.6} (expected 0.25)");

    let back = spectral::inverse(&hat);
    let err = back.component(0).iter().zip(f.component(0)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("roundtrip error = {err:.2e}");
    Ok(())
}
