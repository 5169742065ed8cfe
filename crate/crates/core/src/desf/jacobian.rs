//! The ξ-marginal of the real Hilbert-Schmidt measure in closed form:
//!
//! `J(ξ) = 64 csch⁹ξ (−160 sinh 2ξ − 25 sinh 4ξ + 12ξ(16 cosh 2ξ + cosh 4ξ + 18)) / (27π²)`
//!
//! The bracket vanishes to ninth order at the origin, so for small |ξ| it is
//! summed as a power series whose coefficients are all positive.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Below this |ξ| the bracket is summed term by term.
const SERIES_LIMIT: f64 = 1.5;
const SERIES_TERMS: usize = 40;

/// Anything with an `f64 -> f64` density in ξ.
pub trait JacobianCurve: Sync {
    fn density(&self, xi: f64) -> f64;
}

/// The closed-form real (β = 1) jacobian.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedJacobian;

impl JacobianCurve for ClosedJacobian {
    fn density(&self, xi: f64) -> f64 {
        jacobian_closed(xi)
    }
}

/// Coefficients `a_n` of `N(ξ)/ξ⁹ = Σ_{n≥0} a_n ξ^{2n}`, i.e. the bracket's
/// `ξ^{2n+9}` coefficient:
/// `(4^m (192(2m+1) − 320) + 16^m (12(2m+1) − 100)) / (2m+1)!` with `m = n + 4`.
fn series_coefficients() -> &'static [f64; SERIES_TERMS] {
    static COEFFS: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = [0.0; SERIES_TERMS];
        for (n, slot) in out.iter_mut().enumerate() {
            let m = (n + 4) as i32;
            let odd = (2 * m + 1) as f64;
            // divide progressively to keep 16^m / (2m+1)! in range
            let mut a = 1.0;
            let mut b = 1.0;
            for k in 1..=(2 * m + 1) {
                a /= k as f64;
                b /= k as f64;
                if k <= m {
                    a *= 4.0;
                    b *= 16.0;
                }
            }
            *slot = a * (192.0 * odd - 320.0) + b * (12.0 * odd - 100.0);
        }
        out
    })
}

/// `J(ξ)`, finite and positive for every finite ξ.
pub fn jacobian_closed(xi: f64) -> f64 {
    let x = xi.abs();
    if x < SERIES_LIMIT {
        series_form(x)
    } else {
        scaled_form(x)
    }
}

fn series_form(x: f64) -> f64 {
    let x2 = x * x;
    let numer = series_coefficients().iter().rev().fold(0.0, |acc, c| acc * x2 + c);
    let sinhc = if x == 0.0 { 1.0 } else { x.sinh() / x };
    64.0 / (27.0 * PI * PI) * numer / sinhc.powi(9)
}

/// csch⁹ξ = 512 e^{-9ξ} / (1 − e^{-2ξ})⁹ and the bracket is e^{4ξ}·B.
fn scaled_form(x: f64) -> f64 {
    let e2 = (-2.0 * x).exp();
    let e4 = e2 * e2;
    let e6 = e4 * e2;
    let e8 = e4 * e4;
    let b = -80.0 * (e2 - e6) - 12.5 * (1.0 - e8) + 12.0 * x * (8.0 * (e2 + e6) + 0.5 * (1.0 + e8) + 18.0 * e4);
    64.0 / (27.0 * PI * PI) * 512.0 * (-5.0 * x).exp() * b / (1.0 - e2).powi(9)
}

/// Value of the printed formula evaluated literally; only trustworthy away from 0.
pub fn jacobian_literal(xi: f64) -> f64 {
    let csch = 1.0 / xi.sinh();
    64.0 * csch.powi(9)
        * (-160.0 * (2.0 * xi).sinh() - 25.0 * (4.0 * xi).sinh()
            + 12.0 * xi * (16.0 * (2.0 * xi).cosh() + (4.0 * xi).cosh() + 18.0))
        / (27.0 * PI * PI)
}
