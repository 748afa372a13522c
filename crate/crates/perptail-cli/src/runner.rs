//! Command implementations. Each run resolves an [`ExperimentSpec`], executes
//! the owning estimator, writes its artifacts atomically, and returns the
//! result JSON plus a one-line summary. Every output embeds the resolved spec
//! so runs are reproducible from their own artifacts.

use crate::csvio;
use crate::exec::ThreadExecutor;
use crate::model_io;
use crate::svg::{self, PlotStyle};
use perptail_core::mc::{
    self, SampleAllocation, SimulationConfig, TailSumOptions, Truncation,
};
use perptail_core::{cramer, mv, tail, Error as CoreError, FactorModel};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// Fully resolved run configuration; round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Value>,
    pub seed: u64,
    pub workers: u32,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorKind {
    /// bad inputs: exit code 2
    Validation,
    /// the computation itself failed: exit code 3
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Validation, message: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": {
            "kind": match self.kind { ErrorKind::Validation => "validation", ErrorKind::Numerical => "numerical" },
            "message": self.message,
        }})
        .to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError { kind: ErrorKind::Numerical, message: e.to_string() }
    }
}

impl From<model_io::ParseError> for CliError {
    fn from(e: model_io::ParseError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(format!("io error: {e}"))
    }
}

pub type RunResult = Result<Outcome, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

pub struct Outcome {
    /// `{"spec": ..., "result": ...}`
    pub document: Value,
    pub summary: String,
    /// whether an artifact file was written (stdout gets the document otherwise)
    pub wrote_file: bool,
}

pub struct Ctx {
    pub seed: u64,
    pub workers: u32,
    pub format: OutputFormat,
    pub exec: ThreadExecutor,
}

impl Ctx {
    pub fn new(seed: u64, workers: u32) -> Self {
        Ctx {
            seed,
            workers,
            format: OutputFormat::Json,
            exec: ThreadExecutor::new(workers as usize),
        }
    }

    pub fn with_format(mut self, format: OutputFormat) -> Self {
        self.format = format;
        self
    }

    fn cfg(&self, n_paths: u64, truncation: Truncation) -> SimulationConfig {
        SimulationConfig { n_paths, seed: self.seed, truncation, workers: self.workers }
    }
}

fn load_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: malformed JSON: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<(FactorModel, Value), CliError> {
    let value = load_json(path)?;
    let model = model_io::parse_model(&value)?;
    Ok((model, value))
}

fn spec_for(
    command: &str,
    model: Option<Value>,
    ensemble: Option<Value>,
    ctx: &Ctx,
    params: Map<String, Value>,
    outputs: &[Option<&PathBuf>],
) -> ExperimentSpec {
    ExperimentSpec {
        command: command.into(),
        model,
        ensemble,
        seed: ctx.seed,
        workers: ctx.workers,
        params,
        outputs: outputs
            .iter()
            .flatten()
            .map(|p| p.display().to_string())
            .collect(),
    }
}

fn document(spec: &ExperimentSpec, result: Value) -> Value {
    json!({"spec": spec, "result": result})
}

/// Write the run document (or its CSV rendering) to `out` and return it.
fn finish_with_csv(
    spec: ExperimentSpec,
    result: Value,
    summary: String,
    out: Option<&PathBuf>,
    csv_alt: Option<String>,
) -> RunResult {
    let doc = document(&spec, result);
    let mut wrote_file = false;
    if let Some(path) = out {
        let text = match csv_alt {
            Some(csv) => csv,
            None => {
                let mut t = serde_json::to_string_pretty(&doc)
                    .map_err(|e| CliError::validation(e.to_string()))?;
                t.push('\n');
                t
            }
        };
        csvio::write_atomic(path, &text)?;
        wrote_file = true;
    }
    Ok(Outcome { document: doc, summary, wrote_file })
}

fn spec_line(spec: &ExperimentSpec) -> Result<String, CliError> {
    serde_json::to_string(spec).map_err(|e| CliError::validation(e.to_string()))
}

fn parse_bracket(b: &Option<String>) -> Result<Option<(f64, f64)>, CliError> {
    match b {
        None => Ok(None),
        Some(s) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::validation("bracket must look like \"lo,hi\""));
            }
            let lo = parts[0].trim().parse::<f64>();
            let hi = parts[1].trim().parse::<f64>();
            match (lo, hi) {
                (Ok(lo), Ok(hi)) => Ok(Some((lo, hi))),
                _ => Err(CliError::validation("bracket endpoints must be numbers")),
            }
        }
    }
}

pub fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("{what}: bad number {p:?}")))
        })
        .collect()
}

pub fn run_alpha(model_path: &Path, bracket: &Option<String>, out: Option<&PathBuf>, ctx: &Ctx) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let bracket = parse_bracket(bracket)?;
    let mut params = Map::new();
    if let Some((lo, hi)) = bracket {
        params.insert("bracket".into(), json!([lo, hi]));
    }
    let sol = cramer::solve_alpha(&model, bracket)?;
    let report = cramer::check_conditions(&model, &sol);
    let spec = spec_for("alpha", Some(model_json), None, ctx, params, &[out]);
    let summary = format!(
        "alpha {:.12} m {:.12} sigma2 {:.12} ({})",
        sol.alpha,
        sol.m_alpha,
        sol.sigma2_alpha,
        if sol.signed { "signed" } else { "unsigned" }
    );
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "alpha,m_alpha,sigma2_alpha,drift,signed,m_tilde,sigma2_tilde,leading_constant,prob_negative",
            &[format!(
                "{},{},{},{},{},{},{},{},{}",
                sol.alpha, sol.m_alpha, sol.sigma2_alpha, sol.drift, sol.signed,
                sol.m_tilde, sol.sigma2_tilde, sol.leading_constant, sol.prob_negative
            )],
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, json!({"solution": sol, "conditions": report}), summary, out, csv)
}

#[allow(clippy::too_many_arguments)]
pub fn run_tail(
    model_path: &Path,
    logx_min: f64,
    logx_max: f64,
    points_per_decade: u32,
    columns: &str,
    out: &PathBuf,
    plot: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let cols: Vec<&str> = columns.split(',').map(str::trim).collect();
    for c in &cols {
        if !["leading", "normal", "tilted"].contains(c) {
            return Err(CliError::validation(format!("unknown column {c:?}")));
        }
    }
    let include_tilted = cols.contains(&"tilted");
    let sol = cramer::solve_alpha(&model, None)?;
    let curve = tail::tail_curve(&model, &sol, logx_min, logx_max, points_per_decade, include_tilted)?;
    let mut params = Map::new();
    params.insert("logx_min".into(), json!(logx_min));
    params.insert("logx_max".into(), json!(logx_max));
    params.insert("points_per_decade".into(), json!(points_per_decade));
    params.insert("columns".into(), json!(columns));
    let spec = spec_for("tail", Some(model_json), None, ctx, params, &[Some(out), plot]);
    csvio::write_atomic(out, &csvio::curve_csv(&curve, &spec_line(&spec)?))?;
    if let Some(plot_path) = plot {
        let style = PlotStyle { title: "tail approximation ratios".into(), ..Default::default() };
        let svg = svg::emit_plot(&curve, &style).map_err(CliError::validation)?;
        csvio::write_atomic(plot_path, &svg)?;
    }
    let summary = format!(
        "tail curve: {} points, log x in [{logx_min}, {logx_max}] -> {}",
        curve.log_x.len(),
        out.display()
    );
    let result = json!({
        "points": curve.log_x.len(),
        "alpha": sol.alpha,
        "csv": out.display().to_string(),
    });
    Ok(Outcome { document: document(&spec, result), summary, wrote_file: true })
}

pub fn run_simulate_y(
    model_path: &Path,
    paths: u64,
    logx: &[f64],
    truncation: Truncation,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    if logx.is_empty() {
        return Err(CliError::validation("at least one --logx threshold required"));
    }
    let cfg = ctx.cfg(paths, truncation);
    let depth = mc::resolve_truncation(&model, truncation)?;
    let ys = mc::simulate_y(&model, &cfg, &ctx.exec)?;
    let mut points = Vec::new();
    for &l in logx {
        let x = l.exp();
        let (up, down, hits_up, hits_down) = mc::tail_shares(&ys, x);
        let n = ys.len() as f64;
        points.push(json!({
            "log_x": l,
            "p_upper": up,
            "se_upper": (up * (1.0 - up) / n).sqrt(),
            "hits_upper": hits_up,
            "p_lower": down,
            "se_lower": (down * (1.0 - down) / n).sqrt(),
            "hits_lower": hits_down,
        }));
    }
    let mut params = Map::new();
    params.insert("paths".into(), json!(paths));
    params.insert("logx".into(), json!(logx));
    params.insert("truncation".into(), json!(truncation));
    params.insert("resolved_depth".into(), json!(depth));
    let spec = spec_for("simulate-y", Some(model_json), None, ctx, params, &[out]);
    let summary = format!("simulate-y: {} paths, depth {}", ys.len(), depth);
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "log_x,p_upper,se_upper,hits_upper,p_lower,se_lower,hits_lower",
            &points
                .iter()
                .map(|p| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        p["log_x"], p["p_upper"], p["se_upper"], p["hits_upper"],
                        p["p_lower"], p["se_lower"], p["hits_lower"]
                    )
                })
                .collect::<Vec<_>>(),
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(
        spec,
        json!({"points": points, "n_paths": ys.len(), "depth": depth}),
        summary,
        out,
        csv,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run_is_tail(
    model_path: &Path,
    logx: f64,
    samples_per_n: u64,
    n_max: Option<u64>,
    uniform: bool,
    per_n_out: Option<&PathBuf>,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let sol = cramer::solve_alpha(&model, None)?;
    let opts = TailSumOptions {
        n_max,
        allocation: if uniform { SampleAllocation::Uniform } else { SampleAllocation::PhiWeighted },
    };
    let cfg = ctx.cfg(0, Truncation::Fixed(1));
    let est = mc::is_tail_p_at_log(&model, &sol, logx, samples_per_n, &opts, &cfg, &ctx.exec)?;
    let mut params = Map::new();
    params.insert("logx".into(), json!(logx));
    params.insert("samples_per_n".into(), json!(samples_per_n));
    params.insert("n_max".into(), json!(n_max));
    params.insert("allocation".into(), json!(if uniform { "uniform" } else { "phi_weighted" }));
    let spec = spec_for("is-tail", Some(model_json), None, ctx, params, &[per_n_out, out]);
    if let Some(path) = per_n_out {
        csvio::write_atomic(
            path,
            &csvio::per_n_csv(est.per_n.as_deref().unwrap_or(&[]), &spec_line(&spec)?),
        )?;
    }
    let summary = format!(
        "is-tail: p({logx}) = {:.6e} +- {:.2e} ({} samples, remainder bound {:.2e})",
        est.value, est.std_error, est.n_samples, est.remainder_bound
    );
    let result = json!({
        "value": est.value,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "remainder_bound": est.remainder_bound,
        "horizon": est.per_n.as_ref().map(|p| p.len()).unwrap_or(0),
    });
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::per_n_csv(
            est.per_n.as_deref().unwrap_or(&[]),
            &spec_line(&spec)?,
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, result, summary, out, csv)
}

pub fn run_ruin(
    model_path: &Path,
    logx: f64,
    paths: u64,
    magnitude_only: bool,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let sol = cramer::solve_alpha(&model, None)?;
    let cfg = ctx.cfg(paths, Truncation::Fixed(1));
    let est = if magnitude_only {
        mc::simulate_ruin_abs(&model, &sol, logx.exp(), &cfg, &ctx.exec)?
    } else {
        mc::simulate_ruin_at_log(&model, &sol, logx, &cfg, &ctx.exec)?
    };
    let scaled = est.value * (sol.alpha * logx).exp();
    let mut params = Map::new();
    params.insert("logx".into(), json!(logx));
    params.insert("paths".into(), json!(paths));
    params.insert("magnitude_only".into(), json!(magnitude_only));
    let spec = spec_for("ruin", Some(model_json), None, ctx, params, &[out]);
    let summary = format!(
        "ruin: P = {:.6e} +- {:.2e}, x^alpha P = {scaled:.6}",
        est.value, est.std_error
    );
    let result = json!({
        "value": est.value,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "scaled_by_x_alpha": scaled,
    });
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "log_x,value,std_error,n_samples,scaled_by_x_alpha",
            &[format!("{logx},{},{},{},{scaled}", est.value, est.std_error, est.n_samples)],
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, result, summary, out, csv)
}

pub fn run_lindley(
    model_path: &Path,
    steps: u64,
    u_grid: &[f64],
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let cfg = ctx.cfg(0, Truncation::Fixed(1));
    let stats = mc::simulate_lindley(&model, steps, u_grid, &cfg)?;
    let mut params = Map::new();
    params.insert("steps".into(), json!(steps));
    params.insert("u".into(), json!(u_grid));
    let spec = spec_for("lindley", Some(model_json), None, ctx, params, &[out]);
    let summary = format!(
        "lindley: {} steps, zero hits {}, max {:.4}",
        stats.n_steps, stats.zero_hits, stats.max_s
    );
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "u,exceed_count,cluster_count,mean_cluster_size",
            &stats
                .u
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    format!(
                        "{u},{},{},{}",
                        stats.exceed_counts[i],
                        stats.cluster_counts[i],
                        stats.mean_cluster_size(i)
                    )
                })
                .collect::<Vec<_>>(),
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, serde_json::to_value(&stats).unwrap_or(Value::Null), summary, out, csv)
}

pub fn run_goldie(
    model_path: &Path,
    paths: u64,
    logx: Option<f64>,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    let sol = cramer::solve_alpha(&model, None)?;
    let cfg = ctx.cfg(paths, Truncation::Fixed(1));
    let est = mc::goldie_constant(&model, &sol, &cfg, &ctx.exec)?;
    let ratio = match logx {
        Some(l) if est.value > 0.0 => Some(tail::kesten_ratio(&sol, est.value, l.exp())?),
        _ => None,
    };
    let mut params = Map::new();
    params.insert("paths".into(), json!(paths));
    if let Some(l) = logx {
        params.insert("logx".into(), json!(l));
    }
    let spec = spec_for("goldie", Some(model_json), None, ctx, params, &[out]);
    let summary = format!(
        "goldie constant: {:.6} +- {:.2e} ({} paths)",
        est.value, est.std_error, est.n_samples
    );
    let result = json!({
        "value": est.value,
        "std_error": est.std_error,
        "n_samples": est.n_samples,
        "kesten_ratio": ratio,
    });
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "value,std_error,n_samples",
            &[format!("{},{},{}", est.value, est.std_error, est.n_samples)],
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, result, summary, out, csv)
}

pub fn run_mv_alpha(
    ensemble_path: &Path,
    depth: u32,
    samples: u64,
    bracket: &Option<String>,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let ensemble_json = load_json(ensemble_path)?;
    let ens = model_io::parse_ensemble(&ensemble_json)?;
    let bracket = parse_bracket(bracket)?;
    let mvc = mv::solve_alpha_mv(&ens, depth, samples, bracket, ctx.seed, ctx.workers, &ctx.exec)?;
    let mut params = Map::new();
    params.insert("depth".into(), json!(depth));
    params.insert("samples".into(), json!(samples));
    if let Some((lo, hi)) = bracket {
        params.insert("bracket".into(), json!([lo, hi]));
    }
    let spec = spec_for("mv-alpha", None, Some(ensemble_json), ctx, params, &[out]);
    let summary = format!(
        "mv-alpha: alpha {:.4} +- {:.4} (bias bound {:.4}), m {:.4}",
        mvc.alpha, mvc.alpha_std_error, mvc.alpha_bias_bound, mvc.m_alpha
    );
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::table_csv(
            &spec_line(&spec)?,
            "alpha,alpha_std_error,alpha_bias_bound,m_alpha,m_alpha_std_error,n_products,n_samples",
            &[format!(
                "{},{},{},{},{},{},{}",
                mvc.alpha, mvc.alpha_std_error, mvc.alpha_bias_bound,
                mvc.m_alpha, mvc.m_alpha_std_error, mvc.n_products, mvc.n_samples
            )],
        )),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, serde_json::to_value(&mvc).unwrap_or(Value::Null), summary, out, csv)
}

#[allow(clippy::too_many_arguments)]
pub fn run_mv_tail(
    ensemble_path: &Path,
    u: &[f64],
    v: &[f64],
    logx: &[f64],
    samples: u64,
    xi: f64,
    depth: u32,
    alpha_samples: u64,
    csv_out: Option<&PathBuf>,
    out: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let ensemble_json = load_json(ensemble_path)?;
    let ens = model_io::parse_ensemble(&ensemble_json)?;
    let mvc = mv::solve_alpha_mv(&ens, depth, alpha_samples, None, ctx.seed, ctx.workers, &ctx.exec)?;
    let report = mv::mv_tail_estimates(
        &ens, &mvc, u, v, logx, samples, xi, ctx.seed, ctx.workers, &ctx.exec,
    )?;
    let mut params = Map::new();
    params.insert("u".into(), json!(u));
    params.insert("v".into(), json!(v));
    params.insert("logx".into(), json!(logx));
    params.insert("samples".into(), json!(samples));
    params.insert("xi".into(), json!(xi));
    params.insert("depth".into(), json!(depth));
    params.insert("alpha_samples".into(), json!(alpha_samples));
    let spec = spec_for("mv-tail", None, Some(ensemble_json), ctx, params, &[csv_out, out]);
    if let Some(path) = csv_out {
        csvio::write_atomic(path, &csvio::mv_tail_csv(&report.points, &spec_line(&spec)?))?;
    }
    let deepest = report.points.iter().rev().find(|p| p.feasible);
    let summary = match deepest {
        Some(p) => format!(
            "mv-tail: alpha {:.4}; deepest feasible log x = {}: ratio {:.4} +- {:.4}",
            mvc.alpha, p.log_x, p.ratio, p.ratio_se
        ),
        None => "mv-tail: no feasible grid point".into(),
    };
    let result = json!({
        "cramer": mvc,
        "points": report.points,
        "horizon_xi": report.horizon_xi,
        "n_samples": report.n_samples,
    });
    let csv = match ctx.format {
        OutputFormat::Csv => Some(csvio::mv_tail_csv(&report.points, &spec_line(&spec)?)),
        OutputFormat::Json => None,
    };
    finish_with_csv(spec, result, summary, out, csv)
}

#[allow(clippy::too_many_arguments)]
pub fn run_fig2a(
    model_path: &Path,
    logx_min: f64,
    logx_max: f64,
    points_per_decade: u32,
    out_svg: &PathBuf,
    csv: Option<&PathBuf>,
    ctx: &Ctx,
) -> RunResult {
    let (model, model_json) = load_model(model_path)?;
    if !matches!(model, FactorModel::LogGamma { .. }) {
        return Err(CliError::validation(
            "fig2a requires a log-gamma model (the exact series panel needs it)",
        ));
    }
    let sol = cramer::solve_alpha(&model, None)?;
    let curve = tail::tail_curve(&model, &sol, logx_min, logx_max, points_per_decade, true)?;
    let mut params = Map::new();
    params.insert("logx_min".into(), json!(logx_min));
    params.insert("logx_max".into(), json!(logx_max));
    params.insert("points_per_decade".into(), json!(points_per_decade));
    let spec = spec_for("fig2a", Some(model_json), None, ctx, params, &[Some(out_svg), csv]);
    let style = PlotStyle { title: String::new(), ..Default::default() };
    let svg_text = svg::emit_two_panel(&curve, &style).map_err(CliError::validation)?;
    csvio::write_atomic(out_svg, &svg_text)?;
    if let Some(path) = csv {
        csvio::write_atomic(path, &csvio::curve_csv(&curve, &spec_line(&spec)?))?;
    }
    let ratios = curve.ratio_tilted().unwrap_or_default();
    let last = ratios.last().copied().unwrap_or(f64::NAN);
    let summary = format!(
        "fig2a: two panels over log x in [{logx_min}, {logx_max}]; exact-series ratio at the top of the grid = {last:.4}"
    );
    let result = json!({
        "svg": out_svg.display().to_string(),
        "points": curve.log_x.len(),
        "alpha": sol.alpha,
    });
    Ok(Outcome { document: document(&spec, result), summary, wrote_file: true })
}
