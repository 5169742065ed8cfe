//! Closed-form separability functions.
//!
//! Each curve is a pair of branches on ξ < 0 and ξ > 0. The branches are
//! written in exponentially-scaled form (only `e^{-|ξ|}` powers appear) so
//! that they stay finite for any finite ξ; the tests compare them against the
//! formulas evaluated literally.
//!
//! The two curves involving `arcsin` have a leading-order cancellation as
//! `e^{-|ξ|} → 0`; below `t = e^{-|ξ|} = 0.25` they are evaluated from their
//! Taylor series in `t` instead.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half-axis a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn of(xi: f64) -> Side {
        if xi < 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogCurve {
    /// Envelope of the two 2×2-minor curves.
    Dominant,
    /// Envelope of the two 3×3-minor curves.
    Intermediate,
    /// Single 3×3 minor (k = 4, or equivalently k = 1).
    S3x3,
    /// Single nontrivial 2×2 minor.
    S2x2,
    /// Fitted curve with the common functional form, integrating to 29/64.
    Conjecture,
    /// Earlier fit integrating to 8/17.
    PreviousConjecture,
    /// Complex (1,4), (2,3) and one further complex coherence.
    ScenarioComplexPair,
    /// Jointly nonnegative minors 1 and 2 (cube scheme).
    PairedDominant,
    /// Lesser branches of the (1,4) and (2,3) paired-minor curves.
    PairedIntermediate,
    /// Greater branches of the (1,4) and (2,3) paired-minor curves.
    PairedGreater,
}

impl CatalogCurve {
    pub const ALL: [CatalogCurve; 10] = [
        CatalogCurve::Dominant,
        CatalogCurve::Intermediate,
        CatalogCurve::S3x3,
        CatalogCurve::S2x2,
        CatalogCurve::Conjecture,
        CatalogCurve::PreviousConjecture,
        CatalogCurve::ScenarioComplexPair,
        CatalogCurve::PairedDominant,
        CatalogCurve::PairedIntermediate,
        CatalogCurve::PairedGreater,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogCurve::Dominant => "dominant",
            CatalogCurve::Intermediate => "intermediate",
            CatalogCurve::S3x3 => "s3x3",
            CatalogCurve::S2x2 => "s2x2",
            CatalogCurve::Conjecture => "conjecture",
            CatalogCurve::PreviousConjecture => "previous_conjecture",
            CatalogCurve::ScenarioComplexPair => "scenario_complex_pair",
            CatalogCurve::PairedDominant => "paired_dominant",
            CatalogCurve::PairedIntermediate => "paired_intermediate",
            CatalogCurve::PairedGreater => "paired_greater",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let norm = name.replace('-', "_");
        CatalogCurve::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    /// Evaluate the branch for `side` at `xi`. At `xi = 0` this is the
    /// one-sided limit.
    pub fn branch(self, side: Side, xi: f64) -> f64 {
        let x = xi.abs();
        let e1 = (-x).exp();
        let e2 = e1 * e1;
        let e3 = e2 * e1;
        match self {
            // ½ e^{-3ξ}(3e^{2ξ} − 1) and its mirror
            CatalogCurve::Dominant => 0.5 * (3.0 * e1 - e3),
            CatalogCurve::Intermediate => common_form(9.0 * PI * PI / 2048.0, 27.0, 7.0, e1),
            CatalogCurve::S3x3 => match side {
                Side::Right => common_form(9.0 * PI * PI / 2048.0, 27.0, 7.0, e1),
                Side::Left => single_minor_left(e1, x),
            },
            CatalogCurve::S2x2 => match side {
                // e^{-2ξ}(2 sinh ξ + cosh ξ)
                Side::Right => 0.5 * (3.0 * e1 - e3),
                Side::Left => 1.0,
            },
            CatalogCurve::Conjecture => common_form(315.0 * PI * PI / 65536.0, 18.0, 5.0, e1),
            CatalogCurve::PreviousConjecture => common_form(135.0 * PI * PI / (256.0 * 17.0), 3.0, 1.0, e1),
            // (1/3) e^{-4ξ}(4e^{2ξ} − 1)
            CatalogCurve::ScenarioComplexPair => (4.0 * e2 - e2 * e2) / 3.0,
            CatalogCurve::PairedDominant => paired_dominant_branch(e1, x),
            CatalogCurve::PairedIntermediate => common_form(3.0 * PI * PI / 573440.0, 18873.0, 4037.0, e1),
            CatalogCurve::PairedGreater => {
                let c = 3.0 * PI * PI / 573440.0;
                let u = e2;
                c * (17745.0 - 2457.0 * u - 432.0 * u * u - 20.0 * u * u * u)
            }
        }
    }

    /// Whether the printed formula is the same on both half-axes up to ξ → −ξ.
    pub fn is_even(self) -> bool {
        !matches!(self, CatalogCurve::S3x3 | CatalogCurve::S2x2)
    }
}

/// `c e^{-3|ξ|}(a e^{2|ξ|} − b) = c (a e^{-|ξ|} − b e^{-3|ξ|})`.
fn common_form(c: f64, a: f64, b: f64, e1: f64) -> f64 {
    c * (a * e1 - b * e1 * e1 * e1)
}

/// `arcsin(t)` with `√(1 − t²)` supplied from `ξ` to avoid cancellation at t → 1.
fn arcsin_pair(x: f64, t: f64) -> (f64, f64) {
    let root = (-(-2.0 * x).exp_m1()).max(0.0).sqrt();
    (t.atan2(root), root)
}

fn horner(coeffs: &[f64], t2: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t2 + c)
}

/// Taylor coefficients (in t²) of
/// `[t√(1−t²)(21+37t²+2t⁴) + 3(27t²−7) arcsin t] / t³`.
const SINGLE_MINOR_SERIES: [f64; 15] = [
    104.0,
    -36.0 / 5.0,
    -9.0 / 5.0,
    -17.0 / 42.0,
    -27.0 / 176.0,
    -333.0 / 4576.0,
    -329.0 / 8320.0,
    -513.0 / 21760.0,
    -19899.0 / 1323008.0,
    -1573.0 / 155648.0,
    -37323.0 / 5275648.0,
    -192933.0 / 37683200.0,
    -449293.0 / 117964800.0,
    -88179.0 / 30408704.0,
    -8491347.0 / 3770679296.0,
];

/// Taylor coefficients (in t², after a factor t) of
/// `[t√(1−t²)(−5346−7665t²+1696t⁴+188t⁶) + 3(1782−7273t²+1782t⁴) arcsin t] / t²`.
const PAIRED_DOMINANT_SERIES: [f64; 15] = [
    -25920.0,
    41536.0 / 5.0,
    4392.0 / 35.0,
    -144.0 / 5.0,
    481.0 / 42.0,
    2367.0 / 286.0,
    5463.0 / 1040.0,
    7517.0 / 2210.0,
    1889271.0 / 826880.0,
    1841103.0 / 1157632.0,
    2044757.0 / 1789952.0,
    6949683.0 / 8243200.0,
    24001263.0 / 37683200.0,
    209965181.0 / 427622400.0,
    181579941.0 / 471334912.0,
];

const SERIES_SWITCH: f64 = 0.25;

/// 3π e^{-3ξ}(e^ξ√(1−e^{2ξ})(37e^{2ξ}+2e^{4ξ}+21) + 3(27e^{2ξ}−7) arcsin e^ξ)/1024 on ξ < 0,
/// written with `t = e^{ξ} = e^{-|ξ|}`.
fn single_minor_left(t: f64, x: f64) -> f64 {
    let pref = 3.0 * PI / 1024.0;
    let t2 = t * t;
    if t < SERIES_SWITCH {
        return pref * horner(&SINGLE_MINOR_SERIES, t2);
    }
    let (asin, root) = arcsin_pair(x, t);
    pref * (t * root * (21.0 + 37.0 * t2 + 2.0 * t2 * t2) + 3.0 * (27.0 * t2 - 7.0) * asin) / (t2 * t)
}

/// The paired-dominant curve is even; with `t = e^{-|ξ|}` both printed branches reduce to
/// `−π [t√(1−t²)(−5346−7665t²+1696t⁴+188t⁶) + 3(1782−7273t²+1782t⁴) arcsin t] / (71680 t²)`.
fn paired_dominant_branch(t: f64, x: f64) -> f64 {
    let pref = -PI / 71680.0;
    let t2 = t * t;
    if t < SERIES_SWITCH {
        return pref * t * horner(&PAIRED_DOMINANT_SERIES, t2);
    }
    let (asin, root) = arcsin_pair(x, t);
    let poly = -5346.0 - 7665.0 * t2 + 1696.0 * t2 * t2 + 188.0 * t2 * t2 * t2;
    let arc = 3.0 * (1782.0 - 7273.0 * t2 + 1782.0 * t2 * t2);
    pref * (t * root * poly + arc * asin) / t2
}
