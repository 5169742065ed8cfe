//! Monte Carlo point estimates and tables of conditional estimates over ξ.

use serde::{Deserialize, Serialize};

use crate::desf::JacobianCurve;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Default confidence half-width in standard errors: the interval is "four
/// standard deviations wide".
pub const DEFAULT_CI_HALF_WIDTH_SE: f64 = 2.0;

/// A proportion estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_half_width_se: f64,
}

impl Estimate {
    pub fn new(mean: f64, std_error: f64, n_samples: u64) -> Self {
        let h = DEFAULT_CI_HALF_WIDTH_SE;
        Estimate { mean, std_error, n_samples, ci_low: mean - h * std_error, ci_high: mean + h * std_error, ci_half_width_se: h }
    }

    /// `k` successes out of `n` binary trials, with SE `√(p(1−p)/n)`.
    pub fn from_counts(k: u64, n: u64) -> Self {
        if n == 0 {
            return Estimate::new(f64::NAN, f64::NAN, 0);
        }
        let p = k as f64 / n as f64;
        Estimate::new(p, (p * (1.0 - p) / n as f64).sqrt(), n)
    }

    pub fn with_ci_half_width(mut self, se_multiple: f64) -> Self {
        self.ci_half_width_se = se_multiple;
        self.ci_low = self.mean - se_multiple * self.std_error;
        self.ci_high = self.mean + se_multiple * self.std_error;
        self
    }

    /// `|mean − target| ≤ k·SE`.
    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }

    /// Deviation from `target` in units of SE.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesfRow {
    pub xi: f64,
    pub s_hat: f64,
    pub std_error: f64,
    pub n_accepted: u64,
    /// Fewer than [`MIN_CELL_SAMPLES`] samples behind this estimate.
    pub flagged: bool,
}

pub const MIN_CELL_SAMPLES: u64 = 100;

/// Estimated separability function on a grid of ξ values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesfTable {
    pub test: String,
    pub rows: Vec<DesfRow>,
}

impl DesfTable {
    pub fn from_counts(test: String, xis: &[f64], pass: &[u64], n: &[u64]) -> Self {
        let rows = xis
            .iter()
            .zip(pass.iter().zip(n))
            .map(|(&xi, (&k, &m))| {
                let e = Estimate::from_counts(k, m);
                DesfRow { xi, s_hat: e.mean, std_error: e.std_error, n_accepted: m, flagged: m < MIN_CELL_SAMPLES }
            })
            .collect();
        DesfTable { test, rows }
    }

    pub fn row_at(&self, xi: f64) -> Option<&DesfRow> {
        self.rows.iter().find(|r| (r.xi - xi).abs() < 1e-9)
    }

    /// Largest `|S(ξ) − S(−ξ)| / √(se(ξ)² + se(−ξ)²)` over mirrored grid pairs.
    pub fn max_asymmetry_z(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.rows {
            if r.xi <= 0.0 {
                continue;
            }
            if let Some(m) = self.row_at(-r.xi) {
                let se = (r.std_error.powi(2) + m.std_error.powi(2)).sqrt();
                if se > 0.0 {
                    worst = worst.max((r.s_hat - m.s_hat).abs() / se);
                } else if r.s_hat != m.s_hat {
                    worst = f64::INFINITY;
                }
            }
        }
        worst
    }
}

/// `∫ Ŝ J` over the table's (uniform, odd-length) grid by composite Simpson,
/// with the conservative SE `Σ wᵢ J(ξᵢ) seᵢ`. Mass outside the grid is ignored.
pub fn table_probability(table: &DesfTable, jac: &dyn JacobianCurve) -> Result<Estimate> {
    let m = table.rows.len();
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::Config(format!("Simpson rule needs an odd number (≥ 3) of grid points, got {m}")));
    }
    let h = (table.rows[m - 1].xi - table.rows[0].xi) / (m - 1) as f64;
    let mut value = 0.0;
    let mut se = 0.0;
    for (i, r) in table.rows.iter().enumerate() {
        let w = if i == 0 || i == m - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
        let j = jac.density(r.xi);
        value += w * j * r.s_hat;
        se += w * j * r.std_error;
    }
    let n = table.rows.iter().map(|r| r.n_accepted).min().unwrap_or(0);
    Ok(Estimate::new(value, se, n))
}

/// `∫_lo^hi J`.
pub fn jacobian_mass(jac: &dyn JacobianCurve, lo: f64, hi: f64) -> f64 {
    integrate(|x| jac.density(x), lo, hi, Tolerance::new(1e-14, 1e-10)).map(|r| r.value).unwrap_or(f64::NAN)
}

/// `∫_lo^hi S J / ∫_lo^hi J`, the bin average a binned estimate targets.
pub fn bin_average(s: &dyn Fn(f64) -> f64, jac: &dyn JacobianCurve, lo: f64, hi: f64) -> f64 {
    let tol = Tolerance::new(1e-14, 1e-10);
    let num = integrate(|x| s(x) * jac.density(x), lo, hi, tol).map(|r| r.value).unwrap_or(f64::NAN);
    num / jacobian_mass(jac, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desf::ClosedJacobian;

    #[test]
    fn counts_and_interval() {
        let e = Estimate::from_counts(25, 100);
        assert_eq!(e.mean, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!((e.ci_high - e.ci_low - 4.0 * e.std_error).abs() < 1e-15);
        assert!(e.std_error <= 0.5 / 10.0);
        assert!(Estimate::from_counts(0, 0).mean.is_nan());
    }

    #[test]
    fn simpson_table_of_constant_curve() {
        let xis: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();
        let n = vec![1000; 81];
        let pass = vec![1000; 81];
        let t = DesfTable::from_counts("one".into(), &xis, &pass, &n);
        let p = table_probability(&t, &ClosedJacobian).unwrap();
        // J mass outside [-4, 4] is a few 1e-6
        assert!((p.mean - 1.0).abs() < 1e-5, "{}", p.mean);
        assert_eq!(t.max_asymmetry_z(), 0.0);
        let even = DesfTable::from_counts("one".into(), &xis[..80], &pass[..80], &n[..80]);
        assert!(table_probability(&even, &ClosedJacobian).is_err());
    }
}
