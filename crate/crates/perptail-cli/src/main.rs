use clap::{Parser, Subcommand, ValueEnum};
use perptail_cli::runner::{self, CliError, Ctx, OutputFormat, RunResult};
use perptail_core::mc::Truncation;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "perptail",
    about = "Tail analysis and rare-event estimation for perpetuities with row-independent discount factors",
    version
)]
struct Cli {
    /// Master seed; all randomness derives from it through named substreams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker blocks for parallel estimators (default: PERP_WORKERS or 1).
    #[arg(long, global = true)]
    workers: Option<u32>,
    /// File output format for estimator commands.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve h(alpha) = 1 and print the tail parameters.
    Alpha {
        #[arg(long)]
        model: PathBuf,
        /// Root bracket "lo,hi" (overrides auto-bracketing near a pole).
        #[arg(long)]
        bracket: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate leading / normal-approximation / exact-series tail columns.
    Tail {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        logx_min: f64,
        #[arg(long)]
        logx_max: f64,
        #[arg(long, default_value_t = 50)]
        points_per_decade: u32,
        /// Comma list from {leading, normal, tilted}.
        #[arg(long, default_value = "leading,normal,tilted")]
        columns: String,
        #[arg(long)]
        out: PathBuf,
        /// Also draw the ratio curves to an SVG file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Simulate the truncated series Y and report tail shares.
    SimulateY {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        paths: u64,
        /// Comma list of log-x thresholds.
        #[arg(long)]
        logx: String,
        /// "adaptive:<eps>" or "fixed:<N>".
        #[arg(long, default_value = "adaptive:1e-9")]
        truncation: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tilted importance-sampling estimate of the row-tail sum p(x).
    IsTail {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        logx: f64,
        #[arg(long, default_value_t = 10_000)]
        samples_per_n: u64,
        /// Horizon override (default g_{0.5}(x)).
        #[arg(long)]
        n_max: Option<u64>,
        /// Equal samples at every n instead of Φ-weighted allocation.
        #[arg(long, default_value_t = false)]
        uniform_allocation: bool,
        /// Write the per-n breakdown as CSV.
        #[arg(long)]
        per_n: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-passage estimate of P(max_n Π'_n > x).
    Ruin {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        logx: f64,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        /// Estimate P(max |Π'_n| > x) instead.
        #[arg(long, default_value_t = false)]
        magnitude: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reflected walk and report exceedance statistics.
    Lindley {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        /// Comma list of thresholds.
        #[arg(long, default_value = "1,2,4")]
        u: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the fixed-point tail constant E[(XY'+1)^α − (XY')^α].
    Goldie {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 200_000)]
        paths: u64,
        /// Also evaluate the comparison ratio 2α·logx/constant here.
        #[arg(long)]
        logx: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the matrix Cramér exponent from norm moments.
    MvAlpha {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long, default_value_t = 30)]
        depth: u32,
        #[arg(long, default_value_t = 400_000)]
        samples: u64,
        #[arg(long)]
        bracket: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Directional tail sums p_u and p_{u,v} on a log-x grid.
    MvTail {
        #[arg(long)]
        ensemble: PathBuf,
        /// Unit direction, comma list, e.g. "1,0".
        #[arg(long)]
        u: String,
        /// Unit direction, comma list, e.g. "0.6,0.8".
        #[arg(long)]
        v: String,
        #[arg(long)]
        logx: String,
        #[arg(long, default_value_t = 400_000)]
        samples: u64,
        /// Horizon stretch: sum rows up to (1+xi)·logx/m.
        #[arg(long, default_value_t = 1.5)]
        xi: f64,
        #[arg(long, default_value_t = 24)]
        depth: u32,
        #[arg(long, default_value_t = 1_000_000)]
        alpha_samples: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-panel ratio figure (normal approximation vs exact series).
    Fig2a {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        logx_min: f64,
        #[arg(long, default_value_t = 100.0)]
        logx_max: f64,
        #[arg(long, default_value_t = 50)]
        points_per_decade: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_truncation(s: &str) -> Result<Truncation, CliError> {
    if let Some(n) = s.strip_prefix("fixed:") {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::validation(format!("bad fixed truncation {s:?}")))?;
        return Ok(Truncation::Fixed(n));
    }
    if let Some(rest) = s.strip_prefix("adaptive:") {
        // optional ",gamma" after the tolerance
        let mut parts = rest.splitn(2, ',');
        let eps: f64 = parts
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|_| CliError::validation(format!("bad adaptive tolerance in {s:?}")))?;
        let gamma = match parts.next() {
            Some(g) => g
                .parse()
                .map_err(|_| CliError::validation(format!("bad adaptive tilt in {s:?}")))?,
            None => f64::NAN,
        };
        return Ok(Truncation::Adaptive { eps, gamma });
    }
    Err(CliError::validation(format!(
        "truncation must be \"fixed:<N>\" or \"adaptive:<eps>[,<gamma>]\" (got {s:?})"
    )))
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> RunResult {
    match &cli.command {
        Command::Alpha { model, bracket, out } => runner::run_alpha(model, bracket, out.as_ref(), ctx),
        Command::Tail { model, logx_min, logx_max, points_per_decade, columns, out, plot } => {
            runner::run_tail(
                model,
                *logx_min,
                *logx_max,
                *points_per_decade,
                columns,
                out,
                plot.as_ref(),
                ctx,
            )
        }
        Command::SimulateY { model, paths, logx, truncation, out } => {
            let thresholds = runner::parse_f64_list(logx, "--logx")?;
            let truncation = parse_truncation(truncation)?;
            runner::run_simulate_y(model, *paths, &thresholds, truncation, out.as_ref(), ctx)
        }
        Command::IsTail { model, logx, samples_per_n, n_max, uniform_allocation, per_n, out } => {
            runner::run_is_tail(
                model,
                *logx,
                *samples_per_n,
                *n_max,
                *uniform_allocation,
                per_n.as_ref(),
                out.as_ref(),
                ctx,
            )
        }
        Command::Ruin { model, logx, paths, magnitude, out } => {
            runner::run_ruin(model, *logx, *paths, *magnitude, out.as_ref(), ctx)
        }
        Command::Lindley { model, steps, u, out } => {
            let u_grid = runner::parse_f64_list(u, "--u")?;
            runner::run_lindley(model, *steps, &u_grid, out.as_ref(), ctx)
        }
        Command::Goldie { model, paths, logx, out } => {
            runner::run_goldie(model, *paths, *logx, out.as_ref(), ctx)
        }
        Command::MvAlpha { ensemble, depth, samples, bracket, out } => {
            runner::run_mv_alpha(ensemble, *depth, *samples, bracket, out.as_ref(), ctx)
        }
        Command::MvTail {
            ensemble,
            u,
            v,
            logx,
            samples,
            xi,
            depth,
            alpha_samples,
            csv,
            out,
        } => {
            let u = runner::parse_f64_list(u, "--u")?;
            let v = runner::parse_f64_list(v, "--v")?;
            let grid = runner::parse_f64_list(logx, "--logx")?;
            runner::run_mv_tail(
                ensemble,
                &u,
                &v,
                &grid,
                *samples,
                *xi,
                *depth,
                *alpha_samples,
                csv.as_ref(),
                out.as_ref(),
                ctx,
            )
        }
        Command::Fig2a { model, logx_min, logx_max, points_per_decade, out, csv } => {
            runner::run_fig2a(
                model,
                *logx_min,
                *logx_max,
                *points_per_decade,
                out,
                csv.as_ref(),
                ctx,
            )
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| std::env::var("PERP_WORKERS").ok().and_then(|w| w.parse().ok()))
        .unwrap_or(1)
        .max(1);
    let ctx = Ctx::new(cli.seed, workers).with_format(match cli.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    });
    match dispatch(&cli, &ctx) {
        Ok(outcome) => {
            // artifact written: one-line summary; otherwise the full document
            if outcome.wrote_file {
                println!("{}", outcome.summary);
            } else {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.document).unwrap_or_default()
                );
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
