//! Separability probabilities as one-dimensional integrals `∫ S(ξ) J(ξ) dξ`,
//! and the ξ-marginal `J` recomputed from the diagonal measure.
//!
//! For the numeric marginal the diagonal `(ρ11, ρ22, ρ33, ρ44) = (a, b, c, d)`
//! is parameterised by `y = a + b` and `x = d / (c + d)`. At fixed ξ (with
//! `ν = e^{2ξ} = ad / (bc)`) every point of the unit square is admissible:
//!
//! `a = yν(1−x)/D, b = yx/D, c = (1−y)(1−x), d = (1−y)x, D = x + ν(1−x)`,
//!
//! and the change of variables from `(a, b, ξ)` contributes
//! `|∂c/∂ξ| · |∂(a,b)/∂(x,y)| = 2y(1−y)AB` with `A = a/y`, `B = b/y`.
//! The outer `x` integral is taken in `u = logit x`, where the integrand is a
//! plateau over `u ∈ [0, 2ξ]` with exponential tails.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::gk::{integrate, QuadratureResult, Tolerance};
use super::line::{integrate_line, integrate_line_split};
use crate::desf::{DesfCurve, JacobianCurve};
use crate::error::{Error, Result};

/// Random-matrix symmetry class: real, complex or quaternionic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum BetaParameter {
    Real,
    Complex,
    Quaternionic,
}

impl BetaParameter {
    pub const ALL: [BetaParameter; 3] = [BetaParameter::Real, BetaParameter::Complex, BetaParameter::Quaternionic];

    pub fn value(self) -> u32 {
        match self {
            BetaParameter::Real => 1,
            BetaParameter::Complex => 2,
            BetaParameter::Quaternionic => 4,
        }
    }

    /// Exponent `3β/2` of each diagonal entry in the induced diagonal density.
    pub fn diagonal_exponent(self) -> f64 {
        1.5 * self.value() as f64
    }

    /// Power of a real DESF used as a stand-in for this class.
    pub fn curve_power(self) -> u32 {
        match self {
            BetaParameter::Real => 1,
            BetaParameter::Complex => 2,
            BetaParameter::Quaternionic => 4,
        }
    }

    fn index(self) -> usize {
        match self {
            BetaParameter::Real => 0,
            BetaParameter::Complex => 1,
            BetaParameter::Quaternionic => 2,
        }
    }
}

impl TryFrom<u32> for BetaParameter {
    type Error = Error;
    fn try_from(b: u32) -> Result<Self> {
        match b {
            1 => Ok(BetaParameter::Real),
            2 => Ok(BetaParameter::Complex),
            4 => Ok(BetaParameter::Quaternionic),
            other => Err(Error::InvalidBeta(other)),
        }
    }
}

impl From<BetaParameter> for u32 {
    fn from(b: BetaParameter) -> u32 {
        b.value()
    }
}

/// A diagonal density `∝ ρ11^{p1} ρ22^{p2} ρ33^{p3} ρ44^{p4}` on the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalWeight {
    pub exponents: [f64; 4],
}

impl DiagonalWeight {
    pub fn symmetric(p: f64) -> Self {
        DiagonalWeight { exponents: [p; 4] }
    }

    pub fn for_beta(beta: BetaParameter) -> Self {
        Self::symmetric(beta.diagonal_exponent())
    }

    /// `ln ∫_simplex ∏ ρ_i^{p_i}` (the Dirichlet normalising constant).
    pub fn ln_normalizer(&self) -> f64 {
        let p = self.exponents;
        p.iter().map(|&q| ln_gamma(q + 1.0)).sum::<f64>() - ln_gamma(p.iter().sum::<f64>() + 4.0)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

const INNER_TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-12, max_evaluations: 100_000 };
const OUTER_TOL: Tolerance = Tolerance { abs: 0.0, rel: 1e-11, max_evaluations: 400_000 };

/// Normalised ξ-marginal of `weight`, by iterated quadrature over `(u, y)`.
pub fn jacobian_numeric_weighted(weight: &DiagonalWeight, xi: f64) -> Result<f64> {
    let [p1, p2, p3, p4] = weight.exponents;
    let ln_z = weight.ln_normalizer();
    let two_xi = 2.0 * xi;
    let mut inner_failure = None;
    let outer = integrate_line_split(
        |u: f64| {
            let ln_x = -softplus(-u);
            let ln_1mx = -softplus(u);
            let ln_d = log_add_exp(ln_x, two_xi + ln_1mx);
            // x-part including dx = x(1−x) du
            let ln_xpart = (p1 + 1.0) * two_xi + (p1 + p3 + 2.0) * ln_1mx + (p2 + p4 + 2.0) * ln_x
                - (p1 + p2 + 2.0) * ln_d
                - ln_z;
            let inner = integrate(
                |y: f64| {
                    if y <= 0.0 || y >= 1.0 {
                        return 0.0;
                    }
                    (ln_xpart + (p1 + p2 + 1.0) * y.ln() + (p3 + p4 + 1.0) * (-y).ln_1p()).exp()
                },
                0.0,
                1.0,
                INNER_TOL,
            );
            match inner {
                Ok(r) => 2.0 * r.value,
                Err(e) => {
                    inner_failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        xi,
        OUTER_TOL,
    );
    if let Some(e) = inner_failure {
        return Err(e);
    }
    Ok(outer?.value)
}

/// Normalised ξ-marginal of the diagonal density `∝ (ρ11 ρ22 ρ33 ρ44)^{3β/2}`.
pub fn jacobian_numeric(beta: BetaParameter, xi: f64) -> Result<f64> {
    jacobian_numeric_weighted(&DiagonalWeight::for_beta(beta), xi)
}

/// The numeric marginal for one symmetry class as a [`JacobianCurve`].
#[derive(Debug, Clone, Copy)]
pub struct NumericJacobian {
    pub weight: DiagonalWeight,
}

impl NumericJacobian {
    pub fn new(beta: BetaParameter) -> Self {
        NumericJacobian { weight: DiagonalWeight::for_beta(beta) }
    }
}

impl JacobianCurve for NumericJacobian {
    /// Panics only if the inner quadrature fails, which does not happen for
    /// finite ξ and nonnegative exponents.
    fn density(&self, xi: f64) -> f64 {
        jacobian_numeric_weighted(&self.weight, xi).expect("numeric jacobian quadrature")
    }
}

/// `∫ J` for each class, computed once.
pub fn jacobian_normalization(beta: BetaParameter) -> Result<f64> {
    static CACHE: [OnceLock<f64>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let cell = &CACHE[beta.index()];
    if let Some(v) = cell.get() {
        return Ok(*v);
    }
    let j = NumericJacobian::new(beta);
    let v = integrate_line(|x| j.density(x), Tolerance::new(1e-12, 1e-12))?.value;
    Ok(*cell.get_or_init(|| v))
}

/// `∫ S(ξ) J(ξ) dξ` over the whole line.
pub fn sep_probability(curve: &DesfCurve, jac: &dyn JacobianCurve) -> Result<QuadratureResult> {
    integrate_line(|x| curve.eval(x) * jac.density(x), Tolerance::new(1e-13, 1e-13))
}

/// `∫ S(ξ)^k J_β(ξ) dξ` with `k = 2` for β = 2 and `k = 4` for β = 4 (and
/// `k = 1` for β = 1, which reduces to [`sep_probability`] with the numeric
/// marginal).
pub fn power_class_probability(curve: &DesfCurve, beta: BetaParameter) -> Result<QuadratureResult> {
    let powered = match beta.curve_power() {
        1 => curve.clone(),
        k => curve.power(k)?,
    };
    let jac = NumericJacobian::new(beta);
    integrate_line(|x| powered.eval(x) * jac.density(x), Tolerance::new(1e-12, 1e-12))
}

/// Twofold-ratio rule: boundary (minimally degenerate) states have half the
/// probability of generic ones.
pub fn boundary_halve(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(0.5 * p)
}
