//! Bony's decomposition of a product and the Leray projection.

use std::f64::consts::PI;

use lpeuler::filter::FilterBank;
use lpeuler::paradiff::{bony, divergence_residual, leray, product};
use lpeuler::spectral::{Dealiaser, Padding};
use lpeuler::{SpectralField, TorusGrid, C64};

fn main() -> lpeuler::Result<()> {
    let grid = TorusGrid::new(128, 2.0 * PI)?;
    let fb = FilterBank::new(grid);
    let mut d = Dealiaser::new(grid, Padding::ThreeHalves);
    let bump = |c: [f64; 2], w: f64| {
        SpectralField::from_fn(grid, 1, move |xi| {
            let r = (xi[0] - c[0]).hypot(xi[1] - c[1]);
            vec![if r < 6.0 { C64::new((-r * r / w).exp(), 0.0) } else { C64::default() }]
        })
    };
    let f = bump([0.0, 0.0], 4.0)?;
    let g = bump([20.0, 10.0], 2.0)?;
    let split = bony(&fb, &mut d, &f, &g)?;
    let fg = product(&mut d, &f, &g)?;
    let scale = fg.max_abs();
    println!("|T_f g| = {:.4e}", split.t_f_g.max_abs() / scale);
    println!("|T_g f| = {:.4e}", split.t_g_f.max_abs() / scale);
    println!("|R(f, g)| = {:.4e}", split.remainder.max_abs() / scale);
    println!("residual = {:.2e}", split.sum()?.sub(&fg)?.max_abs() / scale);

    let u = SpectralField::new(grid, vec![f.component(0).to_vec(), g.component(0).to_vec()])?;
    println!("div before = {:.3e}, after = {:.3e}", divergence_residual(&u)?, divergence_residual(&leray(&u)?)?);
    Ok(())
}
