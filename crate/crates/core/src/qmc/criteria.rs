//! Separability tests and their relaxations, evaluated on sampled states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloore::{absolutely_separable_spectrum, pt_correlation, Correlations, Pair, XiValue, PSD_TOL};
use crate::complex::{complex_pt_correlation, ComplexCorrelations};
use crate::error::{Error, Result};
use crate::linalg;

/// Which condition a sampled state must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SeparabilityTest {
    /// Full Peres–Horodecki: the partial transpose is PSD.
    FullPh,
    /// All six 2×2 principal minors of the partial transpose are nonnegative.
    Minors2x2All,
    /// One 2×2 principal minor (1..=6 in pair order 12, 13, 14, 23, 24, 34).
    Minors2x2Single(u8),
    /// The k-th 3×3 principal minor (row/column k deleted) is nonnegative.
    Minors3x3Single(u8),
    /// Two 3×3 principal minors are jointly nonnegative.
    Minors3x3Pair(u8, u8),
    /// The eigenvalue criterion for absolute separability.
    Absolute,
}

/// `det [[1,x,y],[x,1,w],[y,w,1]]`.
#[inline]
fn unit_det3(x: f64, y: f64, w: f64) -> f64 {
    1.0 + 2.0 * x * y * w - x * x - y * y - w * w
}

fn minor3(zp: &Correlations, k: u8) -> f64 {
    let g = |p| zp.get(p);
    match k {
        1 => unit_det3(g(Pair::P23), g(Pair::P24), g(Pair::P34)),
        2 => unit_det3(g(Pair::P13), g(Pair::P14), g(Pair::P34)),
        3 => unit_det3(g(Pair::P12), g(Pair::P14), g(Pair::P24)),
        _ => unit_det3(g(Pair::P12), g(Pair::P13), g(Pair::P23)),
    }
}

impl SeparabilityTest {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            SeparabilityTest::Minors2x2Single(i) => (1..=6).contains(&i),
            SeparabilityTest::Minors3x3Single(k) => (1..=4).contains(&k),
            SeparabilityTest::Minors3x3Pair(a, b) => (1..=4).contains(&a) && (1..=4).contains(&b) && a != b,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::UnknownTest(self.to_string()))
        }
    }

    /// Whether the test needs the whole diagonal rather than just ξ.
    pub fn needs_diagonal(self) -> bool {
        matches!(self, SeparabilityTest::Absolute)
    }

    /// Decide the test for a real state with PSD correlations `z`.
    pub fn passes(self, z: &Correlations, xi: XiValue, diag: &[f64; 4]) -> bool {
        match self {
            SeparabilityTest::Absolute => {
                let rho = linalg::scale_correlation(&z.matrix(), diag);
                absolutely_separable_spectrum(&linalg::sym_eigenvalues(&rho))
            }
            _ => self.passes_pt(&pt_correlation(z, xi)),
        }
    }

    /// Decide the test from the partial-transposed correlations `zp`.
    /// Not applicable to [`SeparabilityTest::Absolute`] (returns false).
    pub fn passes_pt(self, zp: &Correlations) -> bool {
        match self {
            SeparabilityTest::FullPh => linalg::ldl_psd(&zp.matrix(), PSD_TOL),
            SeparabilityTest::Minors2x2All => {
                zp.0.iter().all(|v| 1.0 - v * v >= -PSD_TOL)
            }
            SeparabilityTest::Minors2x2Single(i) => {
                let v = zp.0[i as usize - 1];
                1.0 - v * v >= -PSD_TOL
            }
            SeparabilityTest::Minors3x3Single(k) => minor3(zp, k) >= -PSD_TOL,
            SeparabilityTest::Minors3x3Pair(a, b) => minor3(zp, a) >= -PSD_TOL && minor3(zp, b) >= -PSD_TOL,
            SeparabilityTest::Absolute => false,
        }
    }

    /// Decide the test for a complex state. Only the full test is supported.
    pub fn passes_complex(self, z: &ComplexCorrelations, xi: XiValue) -> Result<bool> {
        match self {
            SeparabilityTest::FullPh => Ok(linalg::hermitian_psd(&complex_pt_correlation(z, xi).matrix(), PSD_TOL)),
            other => Err(Error::Config(format!("test `{other}` is only implemented for real states"))),
        }
    }
}

impl fmt::Display for SeparabilityTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparabilityTest::FullPh => f.write_str("full-ph"),
            SeparabilityTest::Minors2x2All => f.write_str("minors2x2-all"),
            SeparabilityTest::Minors2x2Single(i) => write!(f, "minors2x2-single:{i}"),
            SeparabilityTest::Minors3x3Single(k) => write!(f, "minors3x3-single:{k}"),
            SeparabilityTest::Minors3x3Pair(a, b) => write!(f, "minors3x3-pair:{a},{b}"),
            SeparabilityTest::Absolute => f.write_str("absolute"),
        }
    }
}

impl FromStr for SeparabilityTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let (head, arg) = match norm.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (norm.clone(), None),
        };
        let bad = || Error::UnknownTest(s.to_string());
        let num = |a: &str| a.trim().parse::<u8>().map_err(|_| bad());
        let t = match (head.as_str(), arg.as_deref()) {
            ("full-ph", None) => SeparabilityTest::FullPh,
            ("minors2x2-all", None) => SeparabilityTest::Minors2x2All,
            ("minors2x2-single", Some(a)) => SeparabilityTest::Minors2x2Single(num(a)?),
            ("minors3x3-single", Some(a)) => SeparabilityTest::Minors3x3Single(num(a)?),
            ("minors3x3-pair", Some(a)) => {
                let (x, y) = a.split_once(',').ok_or_else(bad)?;
                SeparabilityTest::Minors3x3Pair(num(x)?, num(y)?)
            }
            ("absolute", None) => SeparabilityTest::Absolute,
            _ => return Err(bad()),
        };
        t.validate().map_err(|_| bad())
    }
}

impl From<SeparabilityTest> for String {
    fn from(t: SeparabilityTest) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for SeparabilityTest {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloore::pt_principal_minor;

    #[test]
    fn minor_shortcut_matches_determinant() {
        let z = Correlations([0.3, -0.2, 0.45, 0.5, 0.1, -0.3]);
        let xi = XiValue::new(0.37);
        let zp = pt_correlation(&z, xi);
        for k in 1..=4u8 {
            let want = pt_principal_minor(&z, xi, 3, k as usize).unwrap();
            assert!((minor3(&zp, k) - want).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn parse_and_display() {
        for s in ["full-ph", "minors2x2-all", "minors2x2-single:4", "minors3x3-single:2", "minors3x3-pair:1,4", "absolute"] {
            assert_eq!(s.parse::<SeparabilityTest>().unwrap().to_string(), s);
        }
        assert_eq!("FULL_PH".parse::<SeparabilityTest>().unwrap(), SeparabilityTest::FullPh);
        for bad in ["minors3x3-single:5", "minors3x3-pair:2,2", "minors2x2-single", "nope"] {
            assert!(bad.parse::<SeparabilityTest>().is_err(), "{bad}");
        }
    }

    #[test]
    fn relaxations_are_implied_by_full_test() {
        let z = Correlations([0.3, -0.2, 0.45, 0.5, 0.1, -0.3]);
        let diag = [0.25; 4];
        for xi in [-1.5, -0.4, 0.0, 0.6, 1.3] {
            let xi = XiValue::new(xi);
            if SeparabilityTest::FullPh.passes(&z, xi, &diag) {
                for t in [
                    SeparabilityTest::Minors2x2All,
                    SeparabilityTest::Minors3x3Single(1),
                    SeparabilityTest::Minors3x3Pair(2, 3),
                ] {
                    assert!(t.passes(&z, xi, &diag));
                }
            }
        }
    }
}
