use serde::Serialize;

use super::{build_alpha, build_bump, CounterexampleSpec};
use crate::error::{Error, Result};
use crate::filter::chi;
use crate::spectral::{self, TorusGrid, C64};

#[derive(Clone, Debug, Serialize)]
pub struct PeriodizationRow {
    pub n: usize,
    pub period: f64,
    pub dxi: f64,
    /// `||a_j||_{L^1}` on this torus.
    pub bump_l1: f64,
    /// Periodized kernel at the origin, `L^{-2} sum chi(lambda)`.
    pub phi0: f64,
    /// `|u0^(nearest lattice point) - closed form| / |closed form|` at `xi^k`.
    pub residual: f64,
    /// The same for the lattice-aligned rotation `theta = 0`.
    pub residual_aligned: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodizationReport {
    pub k: i32,
    pub bump: i32,
    pub rows: Vec<PeriodizationRow>,
    /// Relative change of `||a_j||_{L^1}` between the two finest grids.
    pub bump_l1_change: f64,
}

fn closed_form_residual(spec: &CounterexampleSpec, grid: &TorusGrid, k: i32) -> Result<f64> {
    let alpha = build_alpha(spec, grid)?;
    let lookup = alpha.lookup();
    let m = grid.nearest_lattice(spec.xi(k))?;
    let xi = grid.lattice_point(m);
    let a = lookup.get(&m).copied().unwrap_or_default();
    let got = [C64::new(0.0, -xi[1]) * a, C64::new(0.0, xi[0]) * a];
    let want = spec.u0_at_center(k);
    let err = (got[0] - want[0]).norm().hypot((got[1] - want[1]).norm());
    Ok(err / want[0].norm().hypot(want[1].norm()))
}

/// Tracks torus-size effects over grids whose frequency spacing halves.
pub fn periodization_study(spec: &CounterexampleSpec, grids: &[TorusGrid], k: i32, bump: i32) -> Result<PeriodizationReport> {
    if grids.len() < 3 {
        return Err(Error::InvalidArgument("need at least three grids".into()));
    }
    for w in grids.windows(2) {
        if (w[0].dxi() - 2.0 * w[1].dxi()).abs() > 1e-12 * w[0].dxi() {
            return Err(Error::InvalidArgument("frequency spacing must halve from grid to grid".into()));
        }
    }
    let aligned = spec.with_theta(0.0);
    let mut rows = Vec::new();
    for g in grids {
        let a = build_bump(bump, spec, g)?.to_field(g)?;
        let (bump_l1, _) = spectral::lebesgue_norms(&spectral::inverse(&a));
        let d = g.dxi();
        let half = (1.0 / d).ceil() as i64;
        let mut s = 0.0;
        for p in -half..=half {
            for q in -half..=half {
                s += chi([p as f64 * d, q as f64 * d]);
            }
        }
        rows.push(PeriodizationRow {
            n: g.n(),
            period: g.period(),
            dxi: d,
            bump_l1,
            phi0: s / (g.period() * g.period()),
            residual: closed_form_residual(spec, g, k)?,
            residual_aligned: closed_form_residual(&aligned, g, k)?,
        });
    }
    for w in rows.windows(2) {
        if w[1].residual > w[0].residual {
            return Err(Error::NonMonotone(format!(
                "closed-form residual grows from {:e} to {:e}",
                w[0].residual, w[1].residual
            )));
        }
    }
    let l = rows.len();
    let bump_l1_change = (rows[l - 1].bump_l1 - rows[l - 2].bump_l1).abs() / rows[l - 1].bump_l1;
    Ok(PeriodizationReport { k, bump, rows, bump_l1_change })
}
