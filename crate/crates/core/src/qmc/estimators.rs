//! Quasi-Monte Carlo estimators of separability functions and probabilities.
//!
//! Correlations are drawn uniformly from the cube (or product of discs) and
//! kept only when the correlation matrix is PSD; the diagonal is drawn from
//! the class's Dirichlet law. A separability function is estimated on a fixed
//! ξ grid from the correlations alone, since the test depends on the diagonal
//! only through ξ.

use serde::{Deserialize, Serialize};

use super::criteria::SeparabilityTest;
use super::engine::{run, EngineConfig, Kernel, RunStats};
use super::estimate::{jacobian_mass, DesfTable, Estimate};
use super::sampling::{complex_correlation, real_correlation, DiagonalSampler};
use crate::bloore::{correlation_psd_fast, pt_correlation, Correlations, Pair, XiValue, PSD_TOL};
use crate::complex::ComplexCorrelations;
use crate::desf::{ClosedJacobian, JacobianCurve};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::{BetaParameter, DiagonalWeight, NumericJacobian, XI_CUTOFF};

/// `n` evenly spaced points on `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let h = 2.0 * half_width / (points - 1) as f64;
    (0..points)
        .map(|i| {
            // pin the centre and mirror images exactly
            let k = i as f64 - (points - 1) as f64 / 2.0;
            k * h
        })
        .collect()
}

/// The standard 81-point grid on [−4, 4].
pub fn default_xi_grid() -> Vec<f64> {
    symmetric_grid(4.0, 81)
}

struct DesfKernel<'a> {
    tests: &'a [SeparabilityTest],
    xis: Vec<XiValue>,
}

impl Kernel for DesfKernel<'_> {
    type Acc = Vec<u64>;

    fn dim(&self) -> usize {
        6
    }

    fn process(&self, u: &[f64], acc: &mut Vec<u64>) -> bool {
        let mut z = Correlations::zero();
        for (slot, &x) in z.0.iter_mut().zip(u) {
            *slot = real_correlation(x);
        }
        if !correlation_psd_fast(&z) {
            return false;
        }
        let nt = self.tests.len();
        if acc.is_empty() {
            acc.resize(nt * self.xis.len(), 0);
        }
        for (g, xi) in self.xis.iter().enumerate() {
            let zp = pt_correlation(&z, *xi);
            for (t, test) in self.tests.iter().enumerate() {
                acc[g * nt + t] += test.passes_pt(&zp) as u64;
            }
        }
        true
    }

    fn merge(&self, into: &mut Vec<u64>, from: Vec<u64>) {
        if into.is_empty() {
            *into = from;
        } else if !from.is_empty() {
            into.iter_mut().zip(from).for_each(|(a, b)| *a += b);
        }
    }
}

/// Estimate the separability function of each test on `xi_grid` from `n`
/// accepted (PSD) correlation draws; every grid point reuses the same draws.
pub fn estimate_desf(tests: &[SeparabilityTest], xi_grid: &[f64], n: u64, cfg: &EngineConfig) -> Result<Vec<DesfTable>> {
    for t in tests {
        t.validate()?;
        if t.needs_diagonal() {
            return Err(Error::Config(format!("test `{t}` depends on the full diagonal, not only on xi")));
        }
    }
    let kernel = DesfKernel { tests, xis: xi_grid.iter().map(|&x| XiValue::new(x)).collect() };
    let (acc, stats) = run(&kernel, n, cfg)?;
    let nt = tests.len();
    Ok(tests
        .iter()
        .enumerate()
        .map(|(t, test)| {
            let pass: Vec<u64> = (0..xi_grid.len()).map(|g| acc[g * nt + t]).collect();
            DesfTable::from_counts(test.to_string(), xi_grid, &pass, &vec![stats.accepted; xi_grid.len()])
        })
        .collect())
}

/// A family of random states with its diagonal law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    /// Real two-qubit states (β = 1).
    Real,
    /// Complex two-qubit states (β = 2).
    Complex,
    /// Complex states whose only nonzero coherences are ρ12, ρ14 and ρ23.
    ComplexPair,
}

impl StateFamily {
    pub fn for_beta(beta: BetaParameter) -> Result<Self> {
        match beta {
            BetaParameter::Real => Ok(StateFamily::Real),
            BetaParameter::Complex => Ok(StateFamily::Complex),
            BetaParameter::Quaternionic => Err(Error::Config("quaternionic states are not sampled directly".into())),
        }
    }

    /// Diagonal density exponents: each nonzero coherence ρ_ij contributes
    /// `(ρ_ii ρ_jj)^{1/2}` per real component.
    pub fn weight(self) -> DiagonalWeight {
        match self {
            StateFamily::Real => DiagonalWeight::symmetric(1.5),
            StateFamily::Complex => DiagonalWeight::symmetric(3.0),
            StateFamily::ComplexPair => DiagonalWeight { exponents: [2.0, 2.0, 1.0, 1.0] },
        }
    }

    pub fn dim(self) -> usize {
        match self {
            StateFamily::Real => 9,
            StateFamily::Complex => 15,
            StateFamily::ComplexPair => 9,
        }
    }

    fn jacobian(self) -> Box<dyn JacobianCurve> {
        match self {
            StateFamily::Real => Box::new(ClosedJacobian),
            other => Box::new(NumericJacobian { weight: other.weight() }),
        }
    }
}

#[derive(Debug, Default)]
struct SepAcc {
    pass: Vec<u64>,
    bin_n: Vec<u64>,
    bin_pass: Vec<u64>,
    violations: u64,
}

struct SepKernel<'a> {
    family: StateFamily,
    tests: &'a [SeparabilityTest],
    sampler: DiagonalSampler,
    centres: &'a [f64],
    lo: f64,
    h: f64,
    abs_ph: Option<(usize, usize)>,
}

impl SepKernel<'_> {
    /// Bin 0 is the lower tail, the last bin the upper tail.
    fn bin(&self, xi: f64) -> usize {
        let pos = ((xi - self.lo) / self.h).floor();
        if pos < 0.0 {
            0
        } else if pos >= self.centres.len() as f64 {
            self.centres.len() + 1
        } else {
            pos as usize + 1
        }
    }
}

/// Slots of the three correlations in each 3×3 principal submatrix.
const TRIANGLES: [[usize; 3]; 4] = [[0, 1, 3], [0, 2, 4], [1, 2, 5], [3, 4, 5]];

/// Necessary condition for a PSD complex correlation matrix that needs only
/// the moduli: every 3×3 principal minor satisfies
/// `det ≤ 1 − Σ|z|² + 2∏|z|`, which must therefore be nonnegative. Cheap
/// prefilter that skips the phase computation for most rejected points.
fn moduli_admissible(u: &[f64]) -> bool {
    TRIANGLES.iter().all(|t| {
        let [a, b, c] = t.map(|k| u[2 * k]);
        1.0 - a - b - c + 2.0 * (a * b * c).sqrt() >= -PSD_TOL
    })
}

fn xi_from(diag: &[f64; 4]) -> Option<f64> {
    if diag.iter().any(|&d| d <= 0.0) {
        return None;
    }
    Some(0.5 * ((diag[0] * diag[3]) / (diag[1] * diag[2])).ln())
}

impl Kernel for SepKernel<'_> {
    type Acc = SepAcc;

    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn process(&self, u: &[f64], acc: &mut SepAcc) -> bool {
        let nt = self.tests.len();
        let nb = self.centres.len() + 2;
        let mut passed = [false; 8];
        let diag;
        match self.family {
            StateFamily::Real => {
                let mut z = Correlations::zero();
                for (slot, &x) in z.0.iter_mut().zip(&u[..6]) {
                    *slot = real_correlation(x);
                }
                if !correlation_psd_fast(&z) {
                    return false;
                }
                diag = self.sampler.sample([u[6], u[7], u[8]]);
                let Some(xi) = xi_from(&diag) else { return false };
                let xi = XiValue::new(xi);
                let zp = pt_correlation(&z, xi);
                for (t, test) in self.tests.iter().enumerate() {
                    passed[t] = match test {
                        SeparabilityTest::Absolute => test.passes(&z, xi, &diag),
                        _ => test.passes_pt(&zp),
                    };
                }
            }
            StateFamily::Complex | StateFamily::ComplexPair => {
                let mut z = ComplexCorrelations::zero();
                let off = if self.family == StateFamily::Complex {
                    if !moduli_admissible(u) {
                        return false;
                    }
                    for (k, p) in Pair::ALL.iter().enumerate() {
                        z.set(*p, complex_correlation(u[2 * k], u[2 * k + 1]));
                    }
                    12
                } else {
                    z.set(Pair::P12, complex_correlation(u[0], u[1]));
                    z.set(Pair::P14, complex_correlation(u[2], u[3]));
                    z.set(Pair::P23, complex_correlation(u[4], u[5]));
                    6
                };
                if !linalg::hermitian_psd(&z.matrix(), PSD_TOL) {
                    return false;
                }
                diag = self.sampler.sample([u[off], u[off + 1], u[off + 2]]);
                let Some(xi) = xi_from(&diag) else { return false };
                let xi = XiValue::new(xi);
                for (t, test) in self.tests.iter().enumerate() {
                    passed[t] = test.passes_complex(&z, xi).unwrap_or(false);
                }
            }
        }
        if acc.pass.is_empty() {
            acc.pass.resize(nt, 0);
            acc.bin_n.resize(nb, 0);
            acc.bin_pass.resize(nb * nt, 0);
        }
        let b = self.bin(xi_from(&diag).unwrap_or(0.0));
        acc.bin_n[b] += 1;
        for t in 0..nt {
            acc.pass[t] += passed[t] as u64;
            acc.bin_pass[b * nt + t] += passed[t] as u64;
        }
        if let Some((a, p)) = self.abs_ph {
            acc.violations += (passed[a] && !passed[p]) as u64;
        }
        true
    }

    fn merge(&self, into: &mut SepAcc, from: SepAcc) {
        if into.pass.is_empty() {
            *into = from;
            return;
        }
        if from.pass.is_empty() {
            return;
        }
        into.pass.iter_mut().zip(from.pass).for_each(|(a, b)| *a += b);
        into.bin_n.iter_mut().zip(from.bin_n).for_each(|(a, b)| *a += b);
        into.bin_pass.iter_mut().zip(from.bin_pass).for_each(|(a, b)| *a += b);
        into.violations += from.violations;
    }
}

/// One test's results within a [`SepProbResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: SeparabilityTest,
    /// Direct acceptance fraction.
    pub estimate: Estimate,
    /// Acceptance fraction conditional on ξ falling in each grid bin.
    pub binned: DesfTable,
    /// `Σ_bins Ŝ_bin · ∫_bin J`, using the exact marginal for the bin masses
    /// (tails beyond the grid included as two extra bins).
    pub binned_integral: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SepProbResult {
    pub family: StateFamily,
    pub stats: RunStats,
    pub tests: Vec<TestResult>,
    /// Samples that pass `absolute` but fail `full-ph` (when both were run).
    pub violations: Option<u64>,
}

impl SepProbResult {
    pub fn get(&self, test: SeparabilityTest) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.test == test)
    }
}

/// Joint (diagonal, correlation) sampling: `n` accepted states of `family`,
/// every test evaluated on each. `centres` is a uniform grid of bin centres
/// for the ξ-conditional tables.
pub fn estimate_sep_prob(
    family: StateFamily,
    tests: &[SeparabilityTest],
    centres: &[f64],
    n: u64,
    cfg: &EngineConfig,
) -> Result<SepProbResult> {
    if tests.is_empty() || tests.len() > 8 {
        return Err(Error::Config("between 1 and 8 tests per run".into()));
    }
    for t in tests {
        t.validate()?;
        if family != StateFamily::Real && *t != SeparabilityTest::FullPh {
            return Err(Error::Config(format!("test `{t}` is only implemented for real states")));
        }
    }
    if centres.len() < 2 {
        return Err(Error::Config("need at least two bin centres".into()));
    }
    let h = centres[1] - centres[0];
    let lo = centres[0] - 0.5 * h;
    let find = |t| tests.iter().position(|x| *x == t);
    let abs_ph = find(SeparabilityTest::Absolute).zip(find(SeparabilityTest::FullPh));
    let kernel = SepKernel {
        family,
        tests,
        sampler: DiagonalSampler::new(&family.weight()),
        centres,
        lo,
        h,
        abs_ph,
    };
    let (acc, stats) = run(&kernel, n, cfg)?;

    let jac = family.jacobian();
    let nb = centres.len() + 2;
    let hi = lo + h * centres.len() as f64;
    let masses: Vec<f64> = (0..nb)
        .map(|b| match b {
            0 => jacobian_mass(jac.as_ref(), -XI_CUTOFF, lo),
            b if b == nb - 1 => jacobian_mass(jac.as_ref(), hi, XI_CUTOFF),
            b => jacobian_mass(jac.as_ref(), lo + h * (b - 1) as f64, lo + h * b as f64),
        })
        .collect();
    let nt = tests.len();
    let results = tests
        .iter()
        .enumerate()
        .map(|(t, test)| {
            let pass: Vec<u64> = (0..nb).map(|b| acc.bin_pass[b * nt + t]).collect();
            let binned = DesfTable::from_counts(test.to_string(), centres, &pass[1..nb - 1], &acc.bin_n[1..nb - 1]);
            let (mut value, mut var) = (0.0, 0.0);
            for b in 0..nb {
                let (s, se2) = if acc.bin_n[b] == 0 {
                    (0.5, 0.25)
                } else {
                    let s = pass[b] as f64 / acc.bin_n[b] as f64;
                    (s, s * (1.0 - s) / acc.bin_n[b] as f64)
                };
                value += masses[b] * s;
                var += masses[b] * masses[b] * se2;
            }
            TestResult {
                test: *test,
                estimate: Estimate::from_counts(acc.pass[t], stats.accepted),
                binned,
                binned_integral: Estimate::new(value, var.sqrt(), stats.accepted),
            }
        })
        .collect();
    Ok(SepProbResult { family, stats, tests: results, violations: abs_ph.map(|_| acc.violations) })
}

/// Fraction of real states passing the absolute-separability criterion, with
/// the number of those that fail the Peres–Horodecki test (should be zero).
pub fn estimate_absolute(n: u64, cfg: &EngineConfig) -> Result<(Estimate, u64)> {
    let r = estimate_sep_prob(
        StateFamily::Real,
        &[SeparabilityTest::Absolute, SeparabilityTest::FullPh],
        &default_xi_grid(),
        n,
        cfg,
    )?;
    Ok((r.tests[0].estimate, r.violations.unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric() {
        let g = default_xi_grid();
        assert_eq!(g.len(), 81);
        assert_eq!(g[40], 0.0);
        for i in 0..81 {
            assert_eq!(g[i], -g[80 - i]);
        }
        assert!((g[0] + 4.0).abs() < 1e-15);
    }

    #[test]
    fn small_desf_run() {
        let cfg = EngineConfig { block_size: 1024, wave_blocks: 4, ..EngineConfig::with_seed(3) };
        let grid = [-2.0, 0.0, 2.0];
        let tables = estimate_desf(
            &[SeparabilityTest::Minors2x2Single(4), SeparabilityTest::Minors2x2All, SeparabilityTest::FullPh],
            &grid,
            20_000,
            &cfg,
        )
        .unwrap();
        // the (2,3) minor e^{ξ} z14 never binds for ξ < 0
        assert_eq!(tables[0].rows[0].s_hat, 1.0);
        // all 2×2 minors: ½(3e^{-|ξ|} − e^{-3|ξ|})
        let dom = 0.5 * (3.0 * (-2.0f64).exp() - (-6.0f64).exp());
        assert!((tables[1].rows[0].s_hat - dom).abs() < 4.0 * tables[1].rows[0].std_error);
        assert_eq!(tables[1].rows[1].s_hat, 1.0);
        assert!(tables[2].rows.iter().all(|r| r.n_accepted == 20_000));
    }

    #[test]
    fn rejects_unsupported_combinations() {
        let cfg = EngineConfig::default();
        assert!(estimate_desf(&[SeparabilityTest::Absolute], &[0.0], 10, &cfg).is_err());
        assert!(estimate_sep_prob(StateFamily::Complex, &[SeparabilityTest::Minors2x2All], &default_xi_grid(), 10, &cfg)
            .is_err());
    }
}
