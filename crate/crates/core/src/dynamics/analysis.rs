use serde::{Deserialize, Serialize};

use super::trace::{norm_label, TraceRecord};
use super::weak::{WeakFunctional, WeakSequenceSpec};
use crate::error::{Error, Result};
use crate::filter::FilterBank;
use crate::norms::BlockSynth;
use crate::spectral::{SpectralField, C64};

/// Least-squares fit `y = a + b t + c t^2`.
fn quadratic_fit(t: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if t.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} samples, need 3", t.len())));
    }
    let scale = t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::DegenerateFit("all samples at t = 0".into()));
    }
    let mut m = [[0.0f64; 4]; 3];
    for (ti, yi) in t.iter().zip(y) {
        let x = ti / scale;
        let basis = [1.0, x, x * x];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * yi;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap_or(col);
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return Err(Error::DegenerateFit("singular normal equations".into()));
        }
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let x: Vec<f64> = (0..3).map(|r| m[r][3] / m[r][r]).collect();
    Ok([x[0], x[1] / scale, x[2] / (scale * scale)])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InflationRow {
    pub k: i32,
    /// Early-time slope of `g_k`.
    pub sigma: f64,
    pub curvature: f64,
    pub g0: f64,
    /// `|g_k(0) - |c_0|| / |c_0|` when `|c_0|` is supplied.
    pub g0_rel_err: Option<f64>,
    /// `2^{ks} Re(conj(u0) . r) / |u0|`, the derivative of `g_k` at 0
    /// implied by the rate `r`.
    pub predicted: f64,
    /// `2^{ks} |r|`.
    pub predicted_modulus: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InflationReport {
    pub s: f64,
    pub fit_samples: usize,
    pub rows: Vec<InflationRow>,
    /// `(k, sigma_{k+1} / sigma_k)` for consecutive tracked shells.
    pub ratios: Vec<(i32, f64)>,
}

/// Slopes `sigma_k` of `g_k(t) = 2^{ks} |u^(xi~^k, t)|` from a quadratic fit
/// over the first `fit_samples` rows, compared with the first-order rate.
/// `rates` overrides the rate recorded in the trace.
pub fn inflation_analysis(
    trace: &TraceRecord,
    fit_samples: usize,
    c0_abs: Option<f64>,
    rates: Option<&[[C64; 2]]>,
) -> Result<InflationReport> {
    if trace.rows.len() < fit_samples.max(3) {
        return Err(Error::DegenerateFit(format!("trace has {} rows", trace.rows.len())));
    }
    let t: Vec<f64> = trace.rows[..fit_samples].iter().map(|r| r.t).collect();
    let mut rows = Vec::new();
    for (i, p) in trace.tracked.iter().enumerate() {
        let g = trace.g(i);
        let [g0_fit, sigma, curvature] = quadratic_fit(&t, &g[..fit_samples])?;
        let _ = g0_fit;
        let u0 = trace.rows[0].coefficient(i);
        let rate = match rates {
            Some(r) => r[i],
            None => {
                let c = trace.initial_rate[i];
                [C64::new(c[0], c[1]), C64::new(c[2], c[3])]
            }
        };
        let norm0 = u0[0].norm().hypot(u0[1].norm());
        if norm0 == 0.0 {
            return Err(Error::DegenerateFit(format!("u^(xi~^{}) vanishes at t = 0", p.k)));
        }
        let predicted = p.weight * (u0[0].conj() * rate[0] + u0[1].conj() * rate[1]).re / norm0;
        rows.push(InflationRow {
            k: p.k,
            sigma,
            curvature,
            g0: g[0],
            g0_rel_err: c0_abs.map(|c| (g[0] - c).abs() / c),
            predicted,
            predicted_modulus: p.weight * rate[0].norm().hypot(rate[1].norm()),
            rel_err: (sigma - predicted).abs() / predicted.abs(),
        });
    }
    let ratios = rows
        .windows(2)
        .filter(|w| w[1].k == w[0].k + 1)
        .map(|w| (w[0].k, w[1].sigma / w[0].sigma))
        .collect();
    Ok(InflationReport { s: trace.config.s, fit_samples, rows, ratios })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub k: i32,
    pub samples: usize,
    /// Least-squares `R` in `u^(t) - u^(0) - t r ~ t^2 R`, per component.
    pub second_order: [f64; 4],
    /// `||remainder - t^2 R|| / ||remainder||` over the samples.
    pub residual: f64,
}

/// First-order consistency at tracked point `i` over steps `1..=samples`.
pub fn duhamel_check(trace: &TraceRecord, i: usize, samples: usize) -> Result<DuhamelReport> {
    if samples < 2 || trace.rows.len() <= samples {
        return Err(Error::DegenerateFit(format!("need {samples} steps after t = 0")));
    }
    let c = trace.initial_rate[i];
    let rate = [C64::new(c[0], c[1]), C64::new(c[2], c[3])];
    let u0 = trace.rows[0].coefficient(i);
    let mut rem = Vec::new();
    for r in &trace.rows[1..=samples] {
        let u = r.coefficient(i);
        rem.push((r.t, [u[0] - u0[0] - rate[0] * r.t, u[1] - u0[1] - rate[1] * r.t]));
    }
    let t4: f64 = rem.iter().map(|(t, _)| t.powi(4)).sum();
    let mut big_r = [C64::default(); 2];
    for (t, r) in &rem {
        big_r[0] += r[0] * (t * t / t4);
        big_r[1] += r[1] * (t * t / t4);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (t, r) in &rem {
        for c in 0..2 {
            num += (r[c] - big_r[c] * (t * t)).norm_sqr();
            den += r[c].norm_sqr();
        }
    }
    Ok(DuhamelReport {
        k: trace.tracked[i].k,
        samples,
        second_order: [big_r[0].re, big_r[0].im, big_r[1].re, big_r[1].im],
        residual: if den == 0.0 { 0.0 } else { (num / den).sqrt() },
    })
}

/// Fit of `y = L |t1 - t2|` through the origin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LipschitzFit {
    /// `(t1, t2, ||u(t1) - u(t2)||)`.
    pub pairs: Vec<[f64; 3]>,
    pub slope: f64,
    /// `||y - L tau|| / ||y||`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub s: f64,
    pub eps: f64,
    pub lipschitz: LipschitzFit,
    /// `(t, ||u(t) - u(0)||_{F^{s-eps}})` at dyadic steps, `t` decreasing.
    pub approach: Vec<[f64; 2]>,
    /// Strictly decreasing along `approach`.
    pub monotone: bool,
    /// `||u(0) - u(0)||_{F^{s-eps}}` as recorded.
    pub at_zero: f64,
}

/// Lipschitz modulus in `F^{s-1}` and the approach to `u(0)` in `F^{s-eps}`.
pub fn continuity_probe(trace: &TraceRecord, eps: f64) -> Result<ContinuityReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let s = trace.config.s;
    let t_anchor = trace.rows[trace.anchor_step].t;
    let mut pairs: Vec<[f64; 3]> = trace
        .norm_series(&norm_label("d0", s - 1.0))?
        .into_iter()
        .filter(|(step, _, _)| *step > 0)
        .map(|(_, t, v)| [0.0, t, v])
        .collect();
    pairs.extend(trace.norm_series(&norm_label("da", s - 1.0))?.into_iter().map(|(_, t, v)| [t_anchor, t, v]));
    let (mut sty, mut stt) = (0.0, 0.0);
    for p in &pairs {
        let tau = (p[1] - p[0]).abs();
        sty += tau * p[2];
        stt += tau * tau;
    }
    let slope = if stt == 0.0 { 0.0 } else { sty / stt };
    let (mut num, mut den) = (0.0, 0.0);
    for p in &pairs {
        let tau = (p[1] - p[0]).abs();
        num += (p[2] - slope * tau).powi(2);
        den += p[2] * p[2];
    }
    let residual = if den == 0.0 { 0.0 } else { (num / den).sqrt() };

    let series = trace.norm_series(&norm_label("d0", s - eps))?;
    let at_zero = series.iter().find(|(step, _, _)| *step == 0).map(|x| x.2).unwrap_or(0.0);
    let mut approach: Vec<[f64; 2]> =
        series.iter().filter(|(step, _, _)| step.is_power_of_two()).map(|(_, t, v)| [*t, *v]).collect();
    approach.sort_by(|a, b| b[0].total_cmp(&a[0]));
    let monotone = approach.windows(2).all(|w| w[1][1] < w[0][1]) && at_zero == 0.0;
    Ok(ContinuityReport { s, eps, lipschitz: LipschitzFit { pairs, slope, residual }, approach, monotone, at_zero })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscontinuityRow {
    pub k_max: i32,
    pub t_star: f64,
    /// `D(t*, k_max) = ||u(t*) - u(0)||_{F^s}`.
    pub d: f64,
    /// Block carrying most of `D`.
    pub dominant_change: i32,
    /// Block carrying most of `||u(0)||_{F^s}`.
    pub dominant_initial: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscontinuityReport {
    pub s: f64,
    pub rows: Vec<DiscontinuityRow>,
    /// `D` strictly increasing in `k_max`.
    pub increasing: bool,
    /// The change is carried by block `k_max` in every run.
    pub top_shell: bool,
}

/// Compares `D(t*, k_max)` over runs that differ only in `k_max`; `t*` is
/// each run's anchor.
pub fn discontinuity_evidence(runs: &[(i32, &TraceRecord)]) -> Result<DiscontinuityReport> {
    if runs.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 runs, got {}", runs.len())));
    }
    let s = runs[0].1.config.s;
    let mut rows = Vec::new();
    for (k_max, tr) in runs {
        let label = norm_label("d0", s);
        let i = tr
            .label_index(&label)
            .ok_or_else(|| Error::InvalidArgument(format!("trace has no column {label}")))?;
        let at = tr
            .sample_at(tr.anchor_step)
            .ok_or_else(|| Error::InvalidArgument("anchor step was not sampled".into()))?;
        let first = tr
            .sample_at(0)
            .ok_or_else(|| Error::InvalidArgument("step 0 was not sampled".into()))?;
        rows.push(DiscontinuityRow {
            k_max: *k_max,
            t_star: at.t,
            d: at.values[i].unwrap_or(0.0),
            dominant_change: at.dominant_change,
            dominant_initial: first.dominant,
        });
    }
    rows.sort_by_key(|r| r.k_max);
    let increasing = rows.windows(2).all(|w| w[1].d > w[0].d);
    let top_shell = rows.iter().all(|r| r.dominant_change == r.k_max);
    Ok(DiscontinuityReport { s, rows, increasing, top_shell })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialSumRow {
    pub ell: i32,
    /// `||u - S_ell u||_{F^{s-eps}}`.
    pub residual: f64,
    /// Residual over that of the previous `ell`.
    pub ratio: Option<f64>,
    /// Residual over `2^{-ell eps} ||u||_{F^s}`.
    pub bound_ratio: f64,
    /// `S_ell u` equals `u` coefficient for coefficient.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproximantReport {
    pub s: f64,
    pub eps: f64,
    pub norm: f64,
    pub partial: Vec<PartialSumRow>,
    /// `(eps, |N(u_eps) - N(u)|)`.
    pub mollified: Vec<[f64; 2]>,
}

/// `u_eps = sum_j 2^{-eps j} Delta_j u`.
pub fn mollify(fb: &FilterBank, u: &SpectralField, eps: f64) -> Result<SpectralField> {
    fb.weighted_sum(u, |j| 2f64.powf(-eps * j as f64))
}

/// Partial sums `S_ell u` and mollified fields `u_eps` of one state.
pub fn approximant_report(
    fb: &FilterBank,
    u: &SpectralField,
    s: f64,
    eps: f64,
    ells: &[i32],
    weak: &WeakSequenceSpec,
    eps_list: &[f64],
) -> Result<ApproximantReport> {
    let mut synth = BlockSynth::new(fb);
    let norm = synth.scan(u, fb.nonhomogeneous_range(), false, &[s])?.values[0];
    let mut partial: Vec<PartialSumRow> = Vec::new();
    for &ell in ells {
        let sl = fb.partial_sum(u, ell)?;
        let exact = sl.components().iter().zip(u.components()).all(|(a, b)| a == b);
        let residual = synth.scan(&u.sub(&sl)?, fb.nonhomogeneous_range(), false, &[s - eps])?.values[0];
        let ratio = partial.last().filter(|p| p.ell == ell - 1 && p.residual > 0.0).map(|p| residual / p.residual);
        let bound = 2f64.powf(-eps * ell as f64) * norm;
        partial.push(PartialSumRow {
            ell,
            residual,
            ratio,
            bound_ratio: if bound == 0.0 { 0.0 } else { residual / bound },
            exact,
        });
    }
    let base = WeakFunctional::new(fb, weak, s, 0.0)?.eval(u)?;
    let mollified = eps_list
        .iter()
        .map(|&e| Ok([e, (WeakFunctional::new(fb, weak, s, e)?.eval(u)? - base).abs()]))
        .collect::<Result<_>>()?;
    Ok(ApproximantReport { s, eps, norm, partial, mollified })
}
