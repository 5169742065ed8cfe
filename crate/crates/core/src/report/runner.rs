//! Command execution: each command turns a validated [`RunConfig`] into an
//! [`Artifact`] of records plus the checks printed in the comparison table.

use std::f64::consts::PI;
use std::path::PathBuf;

use super::artifact::{Artifact, CheckRow, ResultRecord};
use super::config::{Command, RunConfig, XiGrid};
use super::summary::report_summary;
use crate::desf::{jacobian_closed, DesfCurve, Side};
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use crate::qmc::cube::CubeSchemeSpec;
use crate::qmc::estimate::{bin_average, DesfTable, MIN_CELL_SAMPLES};
use crate::qmc::{estimate_desf, estimate_sep_prob, EngineConfig, SeparabilityTest, StateFamily};
use crate::quadrature::bounds::{absolute_bound, dominant_bound};
use crate::quadrature::probability::jacobian_normalization;
use crate::quadrature::{compute_bounds, jacobian_numeric, BetaParameter, NumericJacobian};

/// Full-PH separability function of real states at ξ = 0.
pub const DESF_FULL_PH_AT_ZERO: f64 = 0.612243;
/// Four-standard-error band around the published real-state estimate.
pub const REAL_ESTIMATE_BAND: (f64, f64) = (0.451634, 0.454051);

const DEFAULT_DESF_SAMPLES: u64 = 100_000;
const DEFAULT_ESTIMATE_SAMPLES: u64 = 1_000_000;
const DEFAULT_SELFCHECK_SAMPLES: u64 = 10_000_000;

/// Validate, execute and write the artifact to `cfg.output`.
pub fn run(cfg: &RunConfig) -> Result<Artifact> {
    let artifact = execute(cfg)?;
    artifact.write(&cfg.output, cfg.format)?;
    Ok(artifact)
}

/// Validate and execute without touching the filesystem (except reading
/// the inputs of `summary`).
pub fn execute(cfg: &RunConfig) -> Result<Artifact> {
    cfg.validate()?;
    match cfg.command {
        Command::Bounds => run_bounds(cfg),
        Command::Curves => run_curves(cfg),
        Command::Desf => run_desf(cfg),
        Command::Estimate => run_estimate(cfg),
        Command::Cube => run_cube(cfg),
        Command::Jacobian => run_jacobian(cfg),
        Command::Selfcheck => run_selfcheck(cfg),
        Command::Summary => run_summary(cfg),
    }
}

fn engine(cfg: &RunConfig) -> EngineConfig {
    EngineConfig::with_seed(cfg.seed)
}

fn run_bounds(cfg: &RunConfig) -> Result<Artifact> {
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for row in compute_bounds()? {
        let tol = cfg.tolerance.unwrap_or(row.tolerance);
        records.push(ResultRecord::exact(&row.name, None, row.computed, row.provenance));
        checks.push(CheckRow::absolute(
            format!("{} = {}", row.name, row.target_label),
            row.computed,
            row.target,
            tol,
            row.provenance,
        ));
    }
    records.push(ResultRecord::exact("absolute", None, absolute_bound(), Provenance::ClosedForm));
    Ok(Artifact::new(cfg.clone(), records, checks))
}

fn run_curves(cfg: &RunConfig) -> Result<Artifact> {
    let grid = cfg.xi_grid.points();
    let mut records = Vec::new();
    for name in &cfg.names {
        let curve = DesfCurve::parse(name)?;
        for &xi in &grid {
            records.push(ResultRecord::exact(&curve.name, Some(xi), curve.eval(xi), curve.provenance));
        }
    }
    Ok(Artifact::new(cfg.clone(), records, Vec::new()))
}

/// Position in the dominance chain full ≤ pair ≤ single 3×3 ≤ all 2×2.
fn chain_rank(t: SeparabilityTest) -> Option<usize> {
    match t {
        SeparabilityTest::FullPh => Some(0),
        SeparabilityTest::Minors3x3Pair(..) => Some(1),
        SeparabilityTest::Minors3x3Single(_) => Some(2),
        SeparabilityTest::Minors2x2All => Some(3),
        _ => None,
    }
}

/// Half-axis on which a single 3×3 minor is the binding one (the only place
/// it lies below the 2×2 relaxation): ξ ≥ 0 for minors 1 and 4, ξ ≤ 0 for 2 and 3.
fn binding_half_axis(t: SeparabilityTest) -> impl Fn(f64) -> bool {
    move |xi| match t {
        SeparabilityTest::Minors3x3Single(1 | 4) => xi >= 0.0,
        SeparabilityTest::Minors3x3Single(_) => xi <= 0.0,
        _ => true,
    }
}

/// Largest `(Ŝ_lo − Ŝ_hi) / √(se_lo² + se_hi²)` over the grid points kept by
/// `domain`: how far the supposedly smaller table rises above the larger one.
fn max_dominance_z(lo: &DesfTable, hi: &DesfTable, domain: impl Fn(f64) -> bool) -> f64 {
    lo.rows
        .iter()
        .zip(&hi.rows)
        .filter(|(a, b)| !a.flagged && !b.flagged && domain(a.xi))
        .map(|(a, b)| {
            let d = a.s_hat - b.s_hat;
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            if se > 0.0 {
                d / se
            } else if d > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Whether `pair` contains `single` (then the chain holds sample by sample).
fn nested(a: SeparabilityTest, b: SeparabilityTest) -> bool {
    match (a, b) {
        (SeparabilityTest::Minors3x3Pair(x, y), SeparabilityTest::Minors3x3Single(k)) => x == k || y == k,
        _ => true,
    }
}

fn run_desf(cfg: &RunConfig) -> Result<Artifact> {
    let tests = cfg.tests()?;
    let n = cfg.n_samples.unwrap_or(DEFAULT_DESF_SAMPLES);
    let grid = cfg.xi_grid.points();
    let tables = estimate_desf(&tests, &grid, n, &engine(cfg))?;
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for t in &tables {
        for r in &t.rows {
            records.push(ResultRecord::sampled(&t.test, Some(r.xi), r.s_hat, r.std_error, r.n_accepted, cfg.seed));
        }
    }
    for (test, table) in tests.iter().zip(&tables) {
        if *test == SeparabilityTest::FullPh {
            if let Some(r) = table.row_at(0.0) {
                let tol = cfg.tolerance.unwrap_or(0.01);
                checks.push(CheckRow::absolute("desf full-ph at xi=0", r.s_hat, DESF_FULL_PH_AT_ZERO, tol, Provenance::QmcEstimate));
            }
            let z = table.max_asymmetry_z();
            checks.push(CheckRow::absolute("desf full-ph evenness (max |z|)", z, 0.0, 3.0, Provenance::QmcEstimate));
        }
    }
    // consecutive members of the dominance chain present in this run
    let mut chain: Vec<(usize, usize)> =
        tests.iter().enumerate().filter_map(|(i, t)| chain_rank(*t).map(|r| (r, i))).collect();
    chain.sort_unstable();
    for w in chain.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        if w[0].0 == w[1].0 || !nested(tests[a], tests[b]) {
            continue;
        }
        let z = max_dominance_z(&tables[a], &tables[b], binding_half_axis(tests[a])).max(0.0);
        checks.push(CheckRow::absolute(
            format!("desf {} ≤ {} (max z)", tests[a], tests[b]),
            z,
            0.0,
            3.0,
            Provenance::QmcEstimate,
        ));
    }
    Ok(Artifact::new(cfg.clone(), records, checks))
}

fn run_estimate(cfg: &RunConfig) -> Result<Artifact> {
    let family = cfg.state_family()?;
    let tests = cfg.tests()?;
    let n = cfg.n_samples.unwrap_or(DEFAULT_ESTIMATE_SAMPLES);
    let centres = cfg.xi_grid.points();
    if centres.len() < 2 {
        return Err(Error::Config("estimate needs an xi grid with at least two points".into()));
    }
    let res = estimate_sep_prob(family, &tests, &centres, n, &engine(cfg))?;
    let seed = cfg.seed;
    let mut records = vec![ResultRecord::exact(
        "acceptance-rate",
        None,
        res.stats.acceptance_rate(),
        Provenance::QmcEstimate,
    )];
    let mut checks = Vec::new();
    for tr in &res.tests {
        let name = tr.test.to_string();
        let e = tr.estimate.with_ci_half_width(cfg.ci_se);
        records.push(ResultRecord::sampled(&name, None, e.mean, e.std_error, e.n_samples, seed));
        records.push(ResultRecord::sampled(format!("{name}:ci-low"), None, e.ci_low, e.std_error, e.n_samples, seed));
        records.push(ResultRecord::sampled(format!("{name}:ci-high"), None, e.ci_high, e.std_error, e.n_samples, seed));
        let b = tr.binned_integral;
        records.push(ResultRecord::sampled(format!("{name}:binned-integral"), None, b.mean, b.std_error, b.n_samples, seed));
        for r in &tr.binned.rows {
            records.push(ResultRecord::sampled(format!("{name}:binned"), Some(r.xi), r.s_hat, r.std_error, r.n_accepted, seed));
        }

        let target = match (family, tr.test) {
            (StateFamily::Real, SeparabilityTest::FullPh) => {
                let (lo, hi) = REAL_ESTIMATE_BAND;
                checks.push(CheckRow::in_interval(format!("{name} (real)"), e.mean, lo, hi, Provenance::QmcEstimate));
                None
            }
            (StateFamily::Real, SeparabilityTest::Minors2x2All) => Some(dominant_bound()),
            (StateFamily::Real, SeparabilityTest::Absolute) => Some(absolute_bound()),
            (StateFamily::Complex, SeparabilityTest::FullPh) => {
                let tol = cfg.tolerance.unwrap_or(0.005);
                checks.push(CheckRow::absolute(format!("{name} (complex) ≈ 8/33"), e.mean, 8.0 / 33.0, tol, Provenance::QmcEstimate));
                None
            }
            (StateFamily::ComplexPair, SeparabilityTest::FullPh) => Some(17.0 / 35.0),
            _ => None,
        };
        if let Some(t) = target {
            checks.push(CheckRow::within_se(format!("{name} ({family:?})"), e.mean, e.std_error, t, 3.0));
        }
        let combined = (e.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        checks.push(CheckRow::within_se(format!("{name} binned vs direct"), b.mean, combined, e.mean, 3.0));

        if family == StateFamily::ComplexPair && tr.test == SeparabilityTest::FullPh {
            let z = scenario_bin_z(&tr.binned)?;
            checks.push(CheckRow::absolute("scenario curve vs binned desf (max |z|)", z, 0.0, 3.0, Provenance::QmcEstimate));
        }
    }
    if let Some(v) = res.violations {
        records.push(ResultRecord::exact("absolute-not-ph", None, v as f64, Provenance::QmcEstimate));
        checks.push(CheckRow::absolute("absolute states failing full-ph", v as f64, 0.0, 0.0, Provenance::QmcEstimate));
    }
    Ok(Artifact::new(cfg.clone(), records, checks))
}

/// Largest score statistic `|Ŝ_bin − S̄| / √(S̄(1 − S̄)/n_bin)` of the
/// complex-pair scenario curve (bin average `S̄`) against a binned table, over
/// bins with enough samples. The standard error is the one implied by the
/// curve, so bins where every draw fails (Ŝ = 0, plug-in SE 0) are still
/// judged on their binomial variability.
pub fn scenario_bin_z(table: &DesfTable) -> Result<f64> {
    let curve = DesfCurve::catalog("scenario_complex_pair")?;
    let jac = NumericJacobian { weight: StateFamily::ComplexPair.weight() };
    let h = if table.rows.len() > 1 { table.rows[1].xi - table.rows[0].xi } else { 1.0 };
    let mut worst: f64 = 0.0;
    for r in table.rows.iter().filter(|r| r.n_accepted >= MIN_CELL_SAMPLES) {
        let avg = bin_average(&|x| curve.eval(x), &jac, r.xi - 0.5 * h, r.xi + 0.5 * h);
        let se = (avg * (1.0 - avg) / r.n_accepted as f64).sqrt();
        let diff = (r.s_hat - avg).abs();
        let z = if se > 0.0 {
            diff / se
        } else if diff > 1e-9 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(z);
    }
    Ok(worst)
}

/// Catalog curve that a cube scheme should reproduce, where one is known.
pub fn cube_reference(minors: &[usize]) -> Option<DesfCurve> {
    let expr = match minors {
        [1] | [4] => "s3x3",
        [2] | [3] => "reflect(s3x3)",
        [1, 4] => "paired_14",
        [2, 3] => "paired_23",
        [_, _] => "paired_dominant",
        _ => return None,
    };
    DesfCurve::parse(expr).ok()
}

fn scheme_label(minors: &[usize]) -> String {
    match minors {
        [k] => format!("cube single:{k}"),
        [a, b] => format!("cube pair:{a},{b}"),
        _ => "cube triple".into(),
    }
}

fn run_cube(cfg: &RunConfig) -> Result<Artifact> {
    let tol = cfg.tolerance.unwrap_or(1e-4);
    let grid = cfg.xi_grid.points();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for minors in cfg.cube_schemes()? {
        let spec = CubeSchemeSpec::new(minors.clone())?;
        let label = scheme_label(&spec.minors);
        let reference = cube_reference(&spec.minors);
        for &xi in &grid {
            let v = spec.evaluate(xi)?;
            records.push(ResultRecord::exact(&label, Some(xi), v, Provenance::Quadrature));
            if let Some(c) = &reference {
                checks.push(CheckRow::absolute(format!("{label} vs {} at {xi}", c.name), v, c.eval(xi), tol, Provenance::Quadrature));
            } else if spec.minors.len() == 3 && xi == 0.0 {
                checks.push(CheckRow::absolute(format!("{label} at 0 = 159104/231525"), v, 159104.0 / 231525.0, tol, Provenance::Quadrature));
            }
        }
    }
    Ok(Artifact::new(cfg.clone(), records, checks))
}

fn run_jacobian(cfg: &RunConfig) -> Result<Artifact> {
    let beta = cfg.beta.unwrap_or(BetaParameter::Real);
    let grid = cfg.xi_grid.points();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &xi in &grid {
        let numeric = jacobian_numeric(beta, xi)?;
        records.push(ResultRecord::exact(format!("numeric:beta{}", beta.value()), Some(xi), numeric, Provenance::Quadrature));
        if beta == BetaParameter::Real {
            let closed = jacobian_closed(xi);
            records.push(ResultRecord::exact("closed:beta1", Some(xi), closed, Provenance::ClosedForm));
            worst = worst.max(((numeric - closed) / closed).abs());
        }
    }
    if beta == BetaParameter::Real {
        let tol = cfg.tolerance.unwrap_or(1e-6);
        checks.push(CheckRow::absolute("jacobian numeric vs closed (max rel err)", worst, 0.0, tol, Provenance::Quadrature));
    }
    let mass = jacobian_normalization(beta)?;
    records.push(ResultRecord::exact(format!("mass:beta{}", beta.value()), None, mass, Provenance::Quadrature));
    checks.push(CheckRow::absolute(format!("∫ J (beta {})", beta.value()), mass, 1.0, 1e-9, Provenance::Quadrature));
    Ok(Artifact::new(cfg.clone(), records, checks))
}

fn sub(cfg: &RunConfig, command: Command) -> RunConfig {
    RunConfig { command, names: Vec::new(), n_samples: None, tolerance: None, ..cfg.clone() }
}

/// Intercepts of the catalog curves at ξ = 0.
fn intercept_checks() -> Result<Vec<CheckRow>> {
    let pi2 = PI * PI;
    let cases = [
        ("intermediate", 45.0 * pi2 / 512.0, "45π²/512"),
        ("conjecture", 4095.0 * pi2 / 65536.0, "4095π²/2¹⁶"),
        ("paired_intermediate", 11127.0 * pi2 / 143360.0, "11127π²/143360"),
        ("paired_greater", 11127.0 * pi2 / 143360.0, "11127π²/143360"),
        ("paired_product", 123810129.0 * pi2 * pi2 / (16777216.0 * 25.0 * 49.0), "123810129π⁴/(2²⁴·5²·7²)"),
    ];
    let mut out = Vec::new();
    for (name, target, label) in cases {
        let c = DesfCurve::catalog(name)?;
        for side in [Side::Left, Side::Right] {
            out.push(CheckRow::absolute(
                format!("{name}(0{}) = {label}", if side == Side::Left { "-" } else { "+" }),
                c.limit_at_zero(side),
                target,
                1e-12,
                Provenance::ClosedForm,
            ));
        }
    }
    Ok(out)
}

fn run_selfcheck(cfg: &RunConfig) -> Result<Artifact> {
    let mut checks = Vec::new();
    checks.extend(run_bounds(&sub(cfg, Command::Bounds))?.checks);
    checks.extend(intercept_checks()?);
    let jac = RunConfig { xi_grid: XiGrid { lo: -5.0, hi: 5.0, step: 0.5 }, ..sub(cfg, Command::Jacobian) };
    checks.extend(run_jacobian(&jac)?.checks);
    let cube = |names: &[&str], grid: XiGrid| RunConfig {
        names: names.iter().map(|s| s.to_string()).collect(),
        xi_grid: grid,
        ..sub(cfg, Command::Cube)
    };
    let quarter = XiGrid { lo: -1.0, hi: 1.0, step: 0.25 };
    let half = XiGrid { lo: -1.0, hi: 1.0, step: 0.5 };
    checks.extend(run_cube(&cube(&["single:4"], quarter))?.checks);
    checks.extend(run_cube(&cube(&["pair:1,2", "pair:1,4", "pair:2,3"], half))?.checks);
    checks.extend(run_cube(&cube(&["triple"], XiGrid { lo: 0.0, hi: 0.0, step: 1.0 }))?.checks);

    if !cfg.quick {
        let n = cfg.n_samples.unwrap_or(DEFAULT_SELFCHECK_SAMPLES);
        let est = |names: &[&str], family: StateFamily, n: u64| RunConfig {
            names: names.iter().map(|s| s.to_string()).collect(),
            family: Some(family),
            n_samples: Some(n),
            ..sub(cfg, Command::Estimate)
        };
        checks.extend(run_estimate(&est(&["full-ph", "minors2x2-all", "absolute"], StateFamily::Real, n))?.checks);
        checks.extend(run_estimate(&est(&["full-ph"], StateFamily::Complex, n))?.checks);
        checks.extend(run_estimate(&est(&["full-ph"], StateFamily::ComplexPair, n))?.checks);
        let desf = RunConfig {
            names: ["full-ph", "minors3x3-pair:1,2", "minors3x3-single:1", "minors2x2-all"].map(String::from).to_vec(),
            n_samples: Some((n / 10).max(1)),
            ..sub(cfg, Command::Desf)
        };
        checks.extend(run_desf(&desf)?.checks);
    }
    let records = checks.iter().map(|c| ResultRecord::exact(&c.quantity, None, c.computed, c.provenance)).collect();
    Ok(Artifact::new(cfg.clone(), records, checks))
}

fn run_summary(cfg: &RunConfig) -> Result<Artifact> {
    let artifacts = cfg
        .names
        .iter()
        .map(|p| Artifact::read(&PathBuf::from(p)))
        .collect::<Result<Vec<_>>>()?;
    let summary = report_summary(&artifacts)?;
    Ok(summary.into_artifact(cfg.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command) -> RunConfig {
        RunConfig::new(command, "unused.csv".into())
    }

    #[test]
    fn scenario_bins_with_no_passes_are_not_infinitely_significant() {
        let xis = [2.9, 3.0, 3.1];
        let n = [200, 200, 200];
        let t = DesfTable::from_counts("full-ph".into(), &xis, &[0, 0, 0], &n);
        let z = scenario_bin_z(&t).unwrap();
        assert!(z.is_finite() && z < 3.0, "{z}");
        // but a bin that passes everything where S ≈ 0.004 is rejected
        let t = DesfTable::from_counts("full-ph".into(), &xis, &[0, 200, 0], &n);
        assert!(scenario_bin_z(&t).unwrap() > 3.0);
    }

    #[test]
    fn curves_export() {
        let c = RunConfig { names: vec!["dominant".into()], xi_grid: "-1:1:0.5".parse().unwrap(), ..cfg(Command::Curves) };
        let a = execute(&c).unwrap();
        assert_eq!(a.records.len(), 5);
        assert!(a.records.iter().all(|r| r.provenance == Provenance::ClosedForm));
        assert!(a.checks.is_empty());
    }

    #[test]
    fn cube_command_checks_references() {
        let c = RunConfig {
            names: vec!["single:2".into(), "pair:3,4".into()],
            xi_grid: "-0.5:0.5:0.5".parse().unwrap(),
            ..cfg(Command::Cube)
        };
        let a = execute(&c).unwrap();
        assert_eq!(a.checks.len(), 6);
        assert!(a.all_pass(), "{:?}", a.checks);
    }

    #[test]
    fn small_desf_run_has_chain_checks() {
        let c = RunConfig {
            names: vec!["full-ph".into(), "minors3x3-pair:1,2".into(), "minors3x3-single:1".into(), "minors2x2-all".into()],
            n_samples: Some(2000),
            xi_grid: "-1:1:0.5".parse().unwrap(),
            ..cfg(Command::Desf)
        };
        let a = execute(&c).unwrap();
        assert_eq!(a.records.len(), 20);
        // evenness + three chain links (ξ = 0 row present too)
        assert_eq!(a.checks.len(), 5);
        assert!(a.checks.iter().filter(|c| c.quantity.contains('≤')).all(|c| c.pass), "{:#?}", a.checks);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(execute(&cfg(Command::Curves)).is_err());
        let c = RunConfig { names: vec!["nonsense".into()], ..cfg(Command::Estimate) };
        assert!(matches!(execute(&c), Err(Error::UnknownTest(_))));
    }
}
