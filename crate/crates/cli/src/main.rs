//! `sepprob`: bounds, curve exports, estimates and checks for two-qubit
//! separability probabilities.
//!
//! Exit status: 0 when every check passes, 1 on a failed check or numerical
//! failure, 2 on a usage error. Results are written to `--out`, or to
//! `$SEPPROB_OUT_DIR/<command>.<format>` (default directory: `.`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sepprob::report::{self, parse_count, Artifact, Command, OutputFormat, RunConfig, XiGrid};
use sepprob::qmc::StateFamily;
use sepprob::quadrature::BetaParameter;
use sepprob::Error;

const OUT_DIR_ENV: &str = "SEPPROB_OUT_DIR";

#[derive(Parser)]
#[command(name = "sepprob", version, about = "Two-qubit separability probabilities: bounds, quadrature and quasi-Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output file (default: $SEPPROB_OUT_DIR/<command>.<format>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
    /// Seed for the scrambled sequence
    #[arg(long, global = true, default_value_t = report::config::DEFAULT_SEED)]
    seed: u64,
    /// Override the default check tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Every closed-form target reproduced by quadrature
    Bounds,
    /// Export catalog or combined curves on a grid
    Curves {
        /// Curve name or expression, e.g. `dominant` or `envelope_min(s3x3,reflect(s3x3))`
        #[arg(long = "name", required = true)]
        names: Vec<String>,
        /// Grid lo:hi:step
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4:0.1", value_parser = parse_grid)]
        grid: XiGrid,
    },
    /// Empirical separability functions on a ξ grid
    Desf {
        /// Test name, e.g. full-ph, minors3x3-pair:1,2 (repeatable)
        #[arg(long = "test")]
        tests: Vec<String>,
        #[arg(long, value_parser = parse_n)]
        n: Option<u64>,
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4:0.1", value_parser = parse_grid)]
        grid: XiGrid,
    },
    /// Separability (or absolute separability) probability by direct sampling
    Estimate {
        #[arg(long = "test")]
        tests: Vec<String>,
        /// 1 (real) or 2 (complex)
        #[arg(long, value_parser = parse_beta)]
        beta: Option<BetaParameter>,
        /// real, complex or complex-pair
        #[arg(long, value_parser = parse_family)]
        family: Option<StateFamily>,
        #[arg(long, value_parser = parse_n)]
        n: Option<u64>,
        /// Bin centres for the ξ-conditional tables
        #[arg(long, allow_hyphen_values = true, default_value = "-4:4:0.1", value_parser = parse_grid)]
        grid: XiGrid,
        /// Confidence half-width in standard errors
        #[arg(long, default_value_t = 2.0)]
        ci_se: f64,
    },
    /// Cube-integration schemes: single:k, pair:a,b or triple
    Cube {
        #[arg(long = "scheme")]
        schemes: Vec<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2:0.25", value_parser = parse_grid)]
        grid: XiGrid,
    },
    /// ξ-marginal: closed form vs numeric, for β = 1, 2 or 4
    Jacobian {
        #[arg(long, value_parser = parse_beta)]
        beta: Option<BetaParameter>,
        #[arg(long, allow_hyphen_values = true, default_value = "-5:5:0.5", value_parser = parse_grid)]
        grid: XiGrid,
    },
    /// Run the full set of checks
    Selfcheck {
        /// Skip the sampling checks
        #[arg(long)]
        quick: bool,
        /// Samples for the direct estimates (default 1e7)
        #[arg(long, value_parser = parse_n)]
        n: Option<u64>,
    },
    /// Merge artifacts into a ranked bound table
    Summary {
        #[arg(required = true)]
        artifacts: Vec<PathBuf>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<XiGrid, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_n(s: &str) -> Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

fn parse_beta(s: &str) -> Result<BetaParameter, String> {
    let b: u32 = s.parse().map_err(|_| format!("beta `{s}` is not an integer"))?;
    b.try_into().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<StateFamily, String> {
    match s {
        "real" => Ok(StateFamily::Real),
        "complex" => Ok(StateFamily::Complex),
        "complex-pair" => Ok(StateFamily::ComplexPair),
        _ => Err(format!("unknown family `{s}` (expected real, complex or complex-pair)")),
    }
}

fn build_config(cmd: Cmd, common: Common) -> RunConfig {
    let command = match &cmd {
        Cmd::Bounds => Command::Bounds,
        Cmd::Curves { .. } => Command::Curves,
        Cmd::Desf { .. } => Command::Desf,
        Cmd::Estimate { .. } => Command::Estimate,
        Cmd::Cube { .. } => Command::Cube,
        Cmd::Jacobian { .. } => Command::Jacobian,
        Cmd::Selfcheck { .. } => Command::Selfcheck,
        Cmd::Summary { .. } => Command::Summary,
    };
    let output = common.out.clone().unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{}.{}", command, common.format.extension()))
    });
    let mut cfg = RunConfig::new(command, output);
    cfg.format = common.format;
    cfg.seed = common.seed;
    cfg.tolerance = common.tolerance;
    match cmd {
        Cmd::Bounds => {}
        Cmd::Curves { names, grid } => {
            cfg.names = names;
            cfg.xi_grid = grid;
        }
        Cmd::Desf { tests, n, grid } => {
            cfg.names = tests;
            cfg.n_samples = n;
            cfg.xi_grid = grid;
        }
        Cmd::Estimate { tests, beta, family, n, grid, ci_se } => {
            cfg.names = tests;
            cfg.beta = beta;
            cfg.family = family;
            cfg.n_samples = n;
            cfg.xi_grid = grid;
            cfg.ci_se = ci_se;
        }
        Cmd::Cube { schemes, grid } => {
            cfg.names = schemes;
            cfg.xi_grid = grid;
        }
        Cmd::Jacobian { beta, grid } => {
            cfg.beta = beta;
            cfg.xi_grid = grid;
        }
        Cmd::Selfcheck { quick, n } => {
            cfg.quick = quick;
            cfg.n_samples = n;
        }
        Cmd::Summary { artifacts } => {
            cfg.names = artifacts.iter().map(|p| p.display().to_string()).collect();
        }
    }
    cfg
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::UnknownCurve(_)
            | Error::UnknownTest(_)
            | Error::InvalidCurveExpr(_)
            | Error::InvalidPower(_)
            | Error::InvalidBeta(_)
            | Error::InvalidMinor { .. }
    )
}

fn print_checks(a: &Artifact) {
    if a.checks.is_empty() {
        return;
    }
    let w = a.checks.iter().map(|c| c.quantity.chars().count()).max().unwrap_or(8).max(8);
    println!("{:<w$}  {:>22}  {:>22}  {:>10}  {:<22}  result", "quantity", "computed", "target", "|Δ|", "rule");
    for c in &a.checks {
        println!(
            "{:<w$}  {:>22.15e}  {:>22.15e}  {:>10.3e}  {:<22}  {}",
            c.quantity,
            c.computed,
            c.target,
            c.abs_error,
            c.rule,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
}

fn print_estimates(a: &Artifact) {
    let find = |name: &str| a.records.iter().find(|r| r.name == name);
    for r in a.records.iter().filter(|r| r.xi.is_none() && r.std_error.is_some() && !r.name.contains(':')) {
        let (Some(lo), Some(hi)) = (find(&format!("{}:ci-low", r.name)), find(&format!("{}:ci-high", r.name))) else {
            continue;
        };
        println!(
            "{}: {:.7} (SE {:.2e}, n = {}), CI [{:.7}, {:.7}] = ±{} SE",
            r.name,
            r.value,
            r.std_error.unwrap_or(f64::NAN),
            r.n.unwrap_or(0),
            lo.value,
            hi.value,
            a.config.ci_se
        );
    }
}

fn print_summary(a: &Artifact) {
    println!("{:>4}  {:<40}  {:>20}  {:>20}  {:<12}  order", "rank", "quantity", "value", "boundary (½)", "provenance");
    let values = a.records.iter().filter(|r| !r.name.ends_with(":boundary"));
    for (rank, (r, c)) in values.zip(&a.checks).enumerate() {
        let boundary = a.records.iter().find(|b| b.name == format!("{}:boundary", r.name)).map_or(f64::NAN, |b| b.value);
        println!(
            "{:>4}  {:<40}  {:>20.13e}  {:>20.13e}  {:<12}  {}",
            rank + 1,
            r.name,
            r.value,
            boundary,
            r.provenance,
            if c.pass { "ok" } else { "VIOLATION" }
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = build_config(cli.command, cli.common);
    match report::run(&cfg) {
        Ok(a) => {
            if cfg.command == Command::Summary {
                print_summary(&a);
            } else {
                print_estimates(&a);
                print_checks(&a);
            }
            println!("wrote {} records to {}", a.records.len(), cfg.output.display());
            if a.all_pass() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} of {} checks failed", a.checks.iter().filter(|c| !c.pass).count(), a.checks.len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
