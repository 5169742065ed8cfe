//! Integrals over the whole ξ-line.
//!
//! The line is cut at ±[`XI_CUTOFF`] and split at a centre point (where catalog
//! curves switch branch). Each half is compactified by `ξ = centre ± t/(1−t)`,
//! which turns exponential tails into integrands that vanish smoothly as
//! `t → 1`. (Unlike `ξ = atanh t`, the map keeps full resolution in the far
//! tail: `1 − t` never has to resolve `e^{−2ξ}`.)

use super::gk::{integrate, QuadratureResult, Tolerance};
use crate::error::Result;

/// Integrands beyond this |ξ| are treated as zero.
pub const XI_CUTOFF: f64 = 40.0;

/// `∫_{-40}^{40} f(ξ) dξ`, split at 0.
pub fn integrate_line<F: FnMut(f64) -> f64>(f: F, tol: Tolerance) -> Result<QuadratureResult> {
    integrate_line_split(f, 0.0, tol)
}

/// As [`integrate_line`] but split at `centre` instead of 0.
pub fn integrate_line_split<F: FnMut(f64) -> f64>(mut f: F, centre: f64, tol: Tolerance) -> Result<QuadratureResult> {
    let mut half = |sign: f64| {
        let span = if sign > 0.0 { XI_CUTOFF - centre } else { XI_CUTOFF + centre };
        if span <= 0.0 {
            return Ok(QuadratureResult::zero());
        }
        let t_max = span / (1.0 + span);
        integrate(
            |t: f64| {
                let q = 1.0 - t;
                let x = centre + sign * t / q;
                let dx = 1.0 / (q * q);
                let v = f(x) * dx;
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            t_max,
            tol,
        )
    };
    Ok(half(-1.0)? + half(1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_and_odd() {
        let g = integrate_line(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(), Tolerance::default()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-12);
        let o = integrate_line(|x| x * (-x * x).exp(), Tolerance::default()).unwrap();
        assert!(o.value.abs() < 1e-14);
    }

    #[test]
    fn off_centre_split() {
        let r = integrate_line_split(|x| (-(x - 3.0).abs()).exp(), 3.0, Tolerance::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }
}
