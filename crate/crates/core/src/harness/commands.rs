//! The five subcommands. Each returns whether every check it ran passed.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Format, RunConfig};
use super::experiment::{run, sweep_run, RunArtifact};
use super::io::{meta_path, write_bytes, write_json, write_spectral, Meta};
use super::plot::{bar_chart, line_chart, Series, Table};
use super::suite::{inflation, run_suite, Suite, FIT_SAMPLES};
use crate::counterexample::{build_alpha, mechanism_constants, membership_report, u0_from_alpha, Quadrature, Variant};
use crate::dynamics::{continuity_probe, discontinuity_evidence, duhamel_check, norm_label, DuhamelReport, TraceRecord};
use crate::error::{Error, Result};
use crate::filter::FilterBank;

/// Writes `u0.lpf1`, `u0.meta.json`, `alpha.json`, `norms.json` and
/// `mechanism.json`.
pub fn cmd_build(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let grid = cfg.grid()?;
    let spec = cfg.spec();
    if spec.variant == Variant::Faithful && spec.rho < 4.0 * grid.dxi() {
        log::warn!(
            "low bump unresolved on global grid: radius {} spans fewer than 4 lattice cells of {}",
            spec.rho,
            grid.dxi()
        );
    }
    let alpha = build_alpha(&spec, &grid)?;
    write_json(&out.join("alpha.json"), &alpha.entries)?;
    let ks: Vec<i32> = (3..=spec.k_max.min(20)).collect();
    if !ks.is_empty() {
        write_json(&out.join("mechanism.json"), &mechanism_constants(&spec, &ks, Quadrature::default())?)?;
    }
    let u0 = u0_from_alpha(&alpha, &grid)?;
    if cfg.output.wants(Format::Lpf1) {
        let path = out.join("u0.lpf1");
        write_spectral(&path, &u0)?;
        write_json(&meta_path(&path), &Meta::new("build", cfg))?;
    }
    let fb = FilterBank::new(grid);
    write_json(&out.join("norms.json"), &membership_report(&fb, &u0, spec.s)?)?;
    log::info!("wrote build outputs to {}", out.display());
    Ok(true)
}

/// Runs the selected suite and writes `suite.json`.
pub fn cmd_verify(cfg: &RunConfig, out: &Path, suite: Suite, sweep: &[i32]) -> Result<bool> {
    let result = run_suite(cfg, suite, sweep);
    for c in &result.checks {
        println!("{}", c.line());
    }
    write_json(&out.join("suite.json"), &result)?;
    Ok(result.all_pass())
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    k_max: i32,
    t1: f64,
    dt: f64,
    steps: usize,
    anchor_step: usize,
    w1inf_initial: f64,
    w1inf_final: f64,
    energy_drift: f64,
    max_divergence: f64,
    max_mean: f64,
    tracked: Vec<(i32, [i64; 2], f64)>,
    g_initial: Vec<f64>,
    g_final: Vec<f64>,
}

fn summary(a: &RunArtifact) -> Summary<'_> {
    let tr = &a.trace;
    let n = tr.rows.len();
    let g: Vec<Vec<f64>> = (0..tr.tracked.len()).map(|i| tr.g(i)).collect();
    Summary {
        config: &a.config,
        k_max: a.k_max(),
        t1: tr.config.t1,
        dt: tr.config.dt,
        steps: n - 1,
        anchor_step: tr.anchor_step,
        w1inf_initial: a.w1inf_initial,
        w1inf_final: a.w1inf_final,
        energy_drift: tr.energy_drift,
        max_divergence: tr.max_divergence,
        max_mean: tr.max_mean,
        tracked: tr.tracked.iter().map(|p| (p.k, p.m, p.weight)).collect(),
        g_initial: g.iter().map(|v| v[0]).collect(),
        g_final: g.iter().map(|v| v[n - 1]).collect(),
    }
}

fn write_run(cfg: &RunConfig, out: &Path, stem: &str, a: &RunArtifact) -> Result<()> {
    if cfg.output.wants(Format::Csv) {
        write_bytes(&out.join(format!("{stem}.csv")), a.trace.to_csv().as_bytes())?;
    }
    write_json(&out.join(format!("{stem}.json")), a)?;
    write_json(&out.join(format!("{}.json", stem.replace("trace", "summary"))), &summary(a))?;
    Ok(())
}

/// Runs the configured simulation, plus one run per extra `k_max` in
/// `sweep` stopped at the anchor time, and writes the traces.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path, sweep: &[i32]) -> Result<bool> {
    let spec = cfg.spec();
    let main = run(cfg, &spec, None, |_| {})?;
    write_run(cfg, out, "trace", &main)?;
    if cfg.output.wants(Format::Lpf1) {
        let grid = cfg.grid()?;
        let u0 = crate::counterexample::build_u0(&spec, &grid)?;
        let path = out.join("u0.lpf1");
        write_spectral(&path, &u0)?;
        write_json(&meta_path(&path), &Meta::new("simulate", &main.config))?;
    }
    for &k in sweep {
        if k != spec.k_max {
            let a = sweep_run(cfg, &main, k)?;
            write_run(cfg, out, &format!("trace_kmax{k}"), &a)?;
        }
    }
    log::info!("wrote traces to {}", out.display());
    Ok(true)
}

/// Trace files in `dir`: `trace.json` first, then `trace_kmax*.json`.
pub fn trace_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let main = dir.join("trace.json");
    if main.exists() {
        files.push(main);
    }
    let mut extra: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("trace_kmax") && n.ends_with(".json"))
                .unwrap_or(false)
        })
        .collect();
    extra.sort();
    files.extend(extra);
    if files.is_empty() {
        return Err(Error::Config(format!("no trace.json in {}", dir.display())));
    }
    Ok(files)
}

pub fn load_artifact(path: &Path) -> Result<RunArtifact> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct InflationFile {
    report: crate::dynamics::InflationReport,
    duhamel: Vec<DuhamelReport>,
}

/// Writes `inflation.json`, `continuity.json` and, given at least three
/// runs, `discontinuity.json` and `discontinuity.csv`.
pub fn cmd_analyze(inputs: &[PathBuf], out: &Path) -> Result<bool> {
    let runs = inputs.iter().map(|p| load_artifact(p)).collect::<Result<Vec<_>>>()?;
    let main = runs
        .iter()
        .max_by_key(|r| r.trace.rows.len())
        .ok_or_else(|| Error::Config("no traces to analyze".into()))?;
    let tr = &main.trace;
    if tr.rows.len() > FIT_SAMPLES {
        let duhamel = (0..tr.tracked.len()).map(|i| duhamel_check(tr, i, FIT_SAMPLES)).collect::<Result<_>>()?;
        write_json(&out.join("inflation.json"), &InflationFile { report: inflation(main)?, duhamel })?;
    } else {
        log::warn!("trace has {} rows; inflation fit skipped", tr.rows.len());
    }
    let eps = tr.config.epsilons.first().copied().unwrap_or(0.5);
    write_json(&out.join("continuity.json"), &continuity_probe(tr, eps)?)?;
    if let Some(a) = &tr.approximants {
        write_json(&out.join("approximants.json"), a)?;
    }
    if runs.len() >= 3 {
        let pairs: Vec<(i32, &TraceRecord)> = runs.iter().map(|r| (r.k_max(), &r.trace)).collect();
        let d = discontinuity_evidence(&pairs)?;
        let mut csv = String::from("k_max,t_star,D,dominant_change,dominant_initial\n");
        for r in &d.rows {
            csv.push_str(&format!("{},{},{},{},{}\n", r.k_max, r.t_star, r.d, r.dominant_change, r.dominant_initial));
        }
        write_bytes(&out.join("discontinuity.csv"), csv.as_bytes())?;
        write_json(&out.join("discontinuity.json"), &d)?;
    } else {
        log::warn!("{} run(s) found; discontinuity evidence needs 3", runs.len());
    }
    Ok(true)
}

/// `g_k(t) / g_k(0)` for every tracked shell of a trace CSV.
pub fn plot_gk(table: &Table) -> Result<String> {
    let t = table.column("t").ok_or_else(|| Error::Format("CSV has no t column".into()))?;
    let mut series = Vec::new();
    for (i, h) in table.header.iter().enumerate() {
        if let Some(k) = h.strip_prefix('k').and_then(|r| r.strip_suffix("_abs")) {
            let pts = table.pairs(t, i);
            let g0 = pts.first().map(|p| p.1).unwrap_or(1.0);
            series.push(Series { label: format!("k = {k}"), points: pts.iter().map(|p| (p.0, p.1 / g0)).collect() });
        }
    }
    line_chart("g_k(t) / g_k(0)", "t", "relative coefficient size", &series, false)
}

/// Every `u_F*` and `d0_F*` norm column of a trace CSV on a log scale.
pub fn plot_norms(table: &Table) -> Result<String> {
    let t = table.column("t").ok_or_else(|| Error::Format("CSV has no t column".into()))?;
    let series: Vec<Series> = table
        .header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("u_F") || h.starts_with("d0_F") || h.as_str() == "N")
        .map(|(i, h)| Series { label: h.clone(), points: table.pairs(t, i) })
        .filter(|s| !s.points.is_empty())
        .collect();
    line_chart("Norm traces", "t", "value", &series, true)
}

/// Bars of `D(t*, k_max)` from `discontinuity.csv`.
pub fn plot_discontinuity(table: &Table) -> Result<String> {
    let (k, d) = match (table.column("k_max"), table.column("D")) {
        (Some(k), Some(d)) => (k, d),
        _ => return Err(Error::Format("CSV needs k_max and D columns".into())),
    };
    let bars: Vec<(String, f64)> = table.pairs(k, d).into_iter().map(|(k, d)| (format!("k_max = {k}"), d)).collect();
    bar_chart("D(t*, k_max)", "k_max", "||u(t*) - u(0)||_{F^s}", &bars)
}

/// Renders every chart whose input exists in `dir` (or the given CSV).
pub fn cmd_plot(inputs: &[PathBuf], out: &Path) -> Result<bool> {
    let mut wrote = 0;
    for p in inputs {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
        let table = Table::parse(&text)?;
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
        if table.column("D").is_some() {
            write_bytes(&out.join(format!("{stem}.svg")), plot_discontinuity(&table)?.as_bytes())?;
            wrote += 1;
        } else {
            write_bytes(&out.join(format!("{stem}_gk.svg")), plot_gk(&table)?.as_bytes())?;
            write_bytes(&out.join(format!("{stem}_norms.svg")), plot_norms(&table)?.as_bytes())?;
            wrote += 2;
        }
    }
    if wrote == 0 {
        return Err(Error::Config("nothing to plot".into()));
    }
    Ok(true)
}

/// Default plot inputs: `trace.csv` and `discontinuity.csv` when present.
pub fn plot_inputs(dir: &Path) -> Vec<PathBuf> {
    ["trace.csv", "discontinuity.csv"].iter().map(|f| dir.join(f)).filter(|p| p.exists()).collect()
}

/// Label of `||u(t*) - u(0)||_{F^s}` in a trace.
pub fn d_label(s: f64) -> String {
    norm_label("d0", s)
}
