//! The table of closed-form targets reproduced by quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gk::Tolerance;
use super::line::integrate_line;
use super::probability::{
    boundary_halve, power_class_probability, sep_probability, BetaParameter, DiagonalWeight, NumericJacobian,
};
use crate::desf::{jacobian_closed, ClosedJacobian, DesfCurve};
use crate::error::Result;
use crate::provenance::Provenance;

/// What to integrate for one row of the bound table.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundQuantity {
    /// `∫ J dξ` of the closed-form real marginal.
    JacobianMass,
    /// `∫ S J` with the closed-form real marginal.
    Real(&'static str),
    /// `∫ S J_w` against the numeric marginal of a non-symmetric diagonal weight.
    Weighted(&'static str, [f64; 4]),
    /// `∫ S^k J_β` (the class power `k` is implied by β).
    PowerClass(&'static str, BetaParameter),
    /// Half of a closed-form value.
    Halved(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTarget {
    pub name: &'static str,
    pub quantity: BoundQuantity,
    pub target_label: &'static str,
    pub target: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub name: String,
    pub curve: String,
    pub target_label: String,
    pub target: f64,
    pub computed: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

pub fn dominant_bound() -> f64 {
    1024.0 / (135.0 * PI * PI)
}

pub fn paired_product_bound() -> f64 {
    PI * PI * (18031791.0 * PI * PI - 177044420.0) / (16384.0 * 25.0 * 49.0)
}

pub fn paired_greater_bound() -> f64 {
    7724.0 / 525.0 - 5751.0 * PI * PI / 4096.0
}

/// `(6928 − 2205π) / 2^{9/2}`, the absolutely separable probability.
pub fn absolute_bound() -> f64 {
    (6928.0 - 2205.0 * PI) / 2f64.powf(4.5)
}

/// Every closed-form target, in presentation order.
pub fn bound_targets() -> Vec<BoundTarget> {
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let t = |name, quantity, target_label, target, tolerance| BoundTarget {
        name,
        quantity,
        target_label,
        target,
        tolerance,
    };
    use BoundQuantity::*;
    vec![
        t("jacobian_mass", JacobianMass, "1", 1.0, 1e-9),
        t("dominant", Real("dominant"), "1024/(135π²)", dominant_bound(), 1e-9),
        t("intermediate", Real("intermediate"), "22/35", 22.0 / 35.0, 1e-9),
        t("paired_intermediate", Real("paired_intermediate"), "1129/2100", 1129.0 / 2100.0, 1e-9),
        t("conjecture", Real("conjecture"), "29/64", 29.0 / 64.0, 1e-9),
        t("previous_conjecture", Real("previous_conjecture"), "8/17", 8.0 / 17.0, 1e-9),
        t("paired_dominant", Real("paired_dominant"), "0.585542", 0.585542, 1e-6),
        t(
            "paired_product",
            Real("paired_product"),
            "π²(18031791π² − 177044420)/(2¹⁴·5²·7²)",
            paired_product_bound(),
            1e-6,
        ),
        t("intermediate_product", Real("intermediate_product"), "0.576219", 0.576219, 1e-6),
        t("paired_greater", Real("paired_greater"), "7724/525 − 5751π²/4096", paired_greater_bound(), 1e-9),
        t("paired_dominant_squared", Real("power(paired_dominant,2)"), "0.367762", 0.367762, 1e-6),
        t(
            "scenario_complex_pair",
            Weighted("scenario_complex_pair", [2.0, 2.0, 1.0, 1.0]),
            "17/35",
            17.0 / 35.0,
            1e-9,
        ),
        t(
            "conjecture_beta2",
            PowerClass("conjecture", BetaParameter::Complex),
            "30660525π⁴/11811160064",
            30660525.0 * pi4 / 11811160064.0,
            1e-8,
        ),
        t("conjecture_beta4", PowerClass("conjecture", BetaParameter::Quaternionic), "0.0867454", 0.0867454, 1e-6),
        t(
            "intermediate_beta2",
            PowerClass("intermediate", BetaParameter::Complex),
            "752517π⁴/149946368",
            752517.0 * pi4 / 149946368.0,
            1e-8,
        ),
        t("intermediate_beta4", PowerClass("intermediate", BetaParameter::Quaternionic), "0.327414", 0.327414, 1e-6),
        t("dominant_boundary", Halved(dominant_bound()), "512/(135π²)", 512.0 / (135.0 * pi2), 1e-12),
        t("intermediate_boundary", Halved(22.0 / 35.0), "11/35", 11.0 / 35.0, 1e-12),
        t("conjecture_boundary", Halved(29.0 / 64.0), "29/128", 29.0 / 128.0, 1e-12),
    ]
}

/// Evaluate one target.
pub fn compute_bound(t: &BoundTarget) -> Result<BoundRow> {
    let (curve, computed, provenance) = match &t.quantity {
        BoundQuantity::JacobianMass => {
            let v = integrate_line(jacobian_closed, Tolerance::new(1e-13, 1e-13))?.value;
            ("jacobian".to_string(), v, Provenance::Quadrature)
        }
        BoundQuantity::Real(expr) => {
            let c = DesfCurve::parse(expr)?;
            (c.name.clone(), sep_probability(&c, &ClosedJacobian)?.value, Provenance::Quadrature)
        }
        BoundQuantity::Weighted(expr, exponents) => {
            let c = DesfCurve::parse(expr)?;
            let jac = NumericJacobian { weight: DiagonalWeight { exponents: *exponents } };
            (c.name.clone(), sep_probability(&c, &jac)?.value, Provenance::Quadrature)
        }
        BoundQuantity::PowerClass(expr, beta) => {
            let c = DesfCurve::parse(expr)?;
            let v = power_class_probability(&c, *beta)?.value;
            (format!("power({},{})", c.name, beta.curve_power()), v, Provenance::Quadrature)
        }
        BoundQuantity::Halved(p) => ("-".to_string(), boundary_halve(*p)?, Provenance::ClosedForm),
    };
    let abs_error = (computed - t.target).abs();
    Ok(BoundRow {
        name: t.name.to_string(),
        curve,
        target_label: t.target_label.to_string(),
        target: t.target,
        computed,
        abs_error,
        tolerance: t.tolerance,
        pass: abs_error <= t.tolerance,
        provenance,
    })
}

pub fn compute_bounds() -> Result<Vec<BoundRow>> {
    bound_targets().iter().map(compute_bound).collect()
}
