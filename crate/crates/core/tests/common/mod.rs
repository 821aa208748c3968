#![allow(dead_code)]

use lpeuler::filter::psi;
use lpeuler::TorusGrid;

/// Periodized kernel `Phi(x) = L^{-2} sum_lambda chi(lambda) e^{i x.lambda}`
/// summed directly at `factor` times the grid resolution. Returns
/// `(||Phi||_{L^1}, Phi(0))`.
pub fn phi_oracle(grid: &TorusGrid, factor: usize) -> (f64, f64) {
    let d = grid.dxi();
    let l = grid.period();
    let half = (1.0 / d).ceil() as i64;
    let m = grid.n() * factor;
    let h = l / m as f64;
    let modes: Vec<i64> = (0..=half).collect();
    let weight = |a: i64| if a == 0 { 1.0 } else { 2.0 };
    let chi = |a: i64, b: i64| psi((a as f64 * d).hypot(b as f64 * d));
    // C[a][x2] = sum_b w_b chi(a, b) cos(x2 b d), using evenness in each axis.
    let mut c = vec![vec![0.0f64; m]; modes.len()];
    for (ia, &a) in modes.iter().enumerate() {
        for (i2, v) in c[ia].iter_mut().enumerate() {
            let x2 = i2 as f64 * h;
            *v = modes.iter().map(|&b| weight(b) * chi(a, b) * (x2 * b as f64 * d).cos()).sum();
        }
    }
    let mut l1 = 0.0;
    let mut cos_a = vec![0.0f64; modes.len()];
    for i1 in 0..m {
        let x1 = i1 as f64 * h;
        for (ia, &a) in modes.iter().enumerate() {
            cos_a[ia] = weight(a) * (x1 * a as f64 * d).cos();
        }
        for i2 in 0..m {
            let mut v = 0.0;
            for (ia, ca) in cos_a.iter().enumerate() {
                v += ca * c[ia][i2];
            }
            l1 += v.abs();
        }
    }
    let phi0: f64 = modes.iter().flat_map(|&a| modes.iter().map(move |&b| (a, b))).map(|(a, b)| weight(a) * weight(b) * chi(a, b)).sum();
    (l1 * h * h / (l * l), phi0 / (l * l))
}
