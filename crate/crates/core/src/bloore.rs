//! Real two-qubit density matrices in Bloore (correlation) coordinates.
//!
//! A state is written `ρ = D^{1/2} Z D^{1/2}` where `D` is the diagonal and
//! `Z` the unit-diagonal correlation matrix with entries `z_ij = ρ_ij / √(ρ_ii ρ_jj)`.
//! `ρ` is PSD iff `Z` is, so positivity only depends on the six correlations.
//!
//! Partial transposition on the second qubit swaps `ρ_14 ↔ ρ_23`. Re-normalising
//! by the unchanged diagonal turns this into `z'_14 = e^{-ξ} z_23`,
//! `z'_23 = e^{ξ} z_14`, with `ξ = ½ log(ρ_11 ρ_44 / (ρ_22 ρ_33))`. The
//! separability decision therefore depends on the diagonal only through `ξ`.
//!
//! Indices in the public API are 1-based to match the usual `ρ_ij` notation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Minimum-eigenvalue tolerance for PSD decisions. Boundary states count as PSD.
pub const PSD_TOL: f64 = 1e-12;
/// Tolerance on the diagonal summing to one.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// One of the six unordered off-diagonal index pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pair {
    P12,
    P13,
    P14,
    P23,
    P24,
    P34,
}

impl Pair {
    pub const ALL: [Pair; 6] = [Pair::P12, Pair::P13, Pair::P14, Pair::P23, Pair::P24, Pair::P34];

    /// Position in the canonical ordering (1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
    pub fn slot(self) -> usize {
        self as usize
    }

    /// Zero-based row/column indices.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Pair::P12 => (0, 1),
            Pair::P13 => (0, 2),
            Pair::P14 => (0, 3),
            Pair::P23 => (1, 2),
            Pair::P24 => (1, 3),
            Pair::P34 => (2, 3),
        }
    }

    /// Build from 1-based indices in either order.
    pub fn from_indices(i: usize, j: usize) -> Option<Pair> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Some(match (i, j) {
            (1, 2) => Pair::P12,
            (1, 3) => Pair::P13,
            (1, 4) => Pair::P14,
            (2, 3) => Pair::P23,
            (2, 4) => Pair::P24,
            (3, 4) => Pair::P34,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P13 => "13",
            Pair::P14 => "14",
            Pair::P23 => "23",
            Pair::P24 => "24",
            Pair::P34 => "34",
        }
    }

    /// Whether `one_based` is one of the two indices.
    pub fn touches(self, one_based: usize) -> bool {
        let (i, j) = self.indices();
        i + 1 == one_based || j + 1 == one_based
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}", self.label())
    }
}

/// The six correlation coordinates `z_ij`, stored in [`Pair`] order.
///
/// Values produced by [`pt_correlation`] may leave `[-1, 1]`; only inputs
/// describing an actual state are range-checked.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Correlations(pub [f64; 6]);

impl Correlations {
    pub fn zero() -> Self {
        Correlations([0.0; 6])
    }

    pub fn get(&self, p: Pair) -> f64 {
        self.0[p.slot()]
    }

    pub fn set(&mut self, p: Pair, v: f64) {
        self.0[p.slot()] = v;
    }

    pub fn with(mut self, p: Pair, v: f64) -> Self {
        self.set(p, v);
        self
    }

    /// Reject any coordinate with `|z| > 1`.
    pub fn validate(&self) -> Result<()> {
        for p in Pair::ALL {
            let v = self.get(p);
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::CorrelationOutOfRange {
                    pair: p.label(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// The unit-diagonal symmetric matrix `Z`.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for p in Pair::ALL {
            let (i, j) = p.indices();
            m[i][j] = self.get(p);
            m[j][i] = self.get(p);
        }
        m
    }
}

/// A point of the diagonal simplex `(ρ_11, ρ_22, ρ_33, ρ_44)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagonal([f64; 4]);

impl Diagonal {
    pub fn new(d: [f64; 4]) -> Result<Self> {
        let sum: f64 = d.iter().sum();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        if min < 0.0 || !min.is_finite() || (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::OffSimplex { sum, min });
        }
        Ok(Diagonal(d))
    }

    pub fn entries(&self) -> [f64; 4] {
        self.0
    }
}

/// `ξ = ½ log(ρ_11 ρ_44 / (ρ_22 ρ_33))` together with the older variables
/// `ν = e^{2ξ}` and `μ = e^{ξ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiValue {
    pub xi: f64,
}

impl XiValue {
    pub fn new(xi: f64) -> Self {
        XiValue { xi }
    }

    /// Cross-product ratio `ρ_11 ρ_44 / (ρ_22 ρ_33)`.
    pub fn nu(&self) -> f64 {
        (2.0 * self.xi).exp()
    }

    pub fn mu(&self) -> f64 {
        self.xi.exp()
    }
}

/// Concrete 4×4 real symmetric unit-trace matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    entries: [[f64; 4]; 4],
}

impl DensityMatrix4 {
    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i - 1][j - 1]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::sym_eigenvalues(&self.entries)
    }

    /// Transpose on the second qubit (basis order |00>, |01>, |10>, |11>).
    pub fn partial_transpose(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out[2 * a + b][2 * c + d] = self.entries[2 * a + d][2 * c + b];
                    }
                }
            }
        }
        out
    }
}

/// A real two-qubit state: diagonal plus six correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlooreState {
    pub diag: Diagonal,
    pub z: Correlations,
}

impl BlooreState {
    /// Validates the simplex and `|z| ≤ 1`; positivity is checked separately.
    pub fn new(diag: [f64; 4], z: Correlations) -> Result<Self> {
        z.validate()?;
        Ok(BlooreState {
            diag: Diagonal::new(diag)?,
            z,
        })
    }

    pub fn is_density_matrix(&self) -> bool {
        correlation_psd(&self.z)
    }

    pub fn xi(&self) -> Result<XiValue> {
        xi_of(&self.diag.entries())
    }

    pub fn rho(&self) -> DensityMatrix4 {
        build_rho(&self.diag.entries(), &self.z)
    }

    fn require_density(&self) -> Result<()> {
        let min_eigenvalue = min_eigenvalue(&self.z);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotDensityMatrix { min_eigenvalue });
        }
        Ok(())
    }
}

fn build_rho(d: &[f64; 4], z: &Correlations) -> DensityMatrix4 {
    let zm = z.matrix();
    let mut entries = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            entries[i][j] = if i == j {
                d[i]
            } else {
                zm[i][j] * (d[i] * d[j]).sqrt()
            };
        }
    }
    DensityMatrix4 { entries }
}

/// `ρ_ii = d_i`, `ρ_ij = z_ij √(d_i d_j)`. Positivity is not required here.
pub fn rho_from_bloore(diag: &[f64; 4], z: &Correlations) -> Result<DensityMatrix4> {
    Diagonal::new(*diag)?;
    z.validate()?;
    Ok(build_rho(diag, z))
}

pub fn xi_of(diag: &[f64; 4]) -> Result<XiValue> {
    if let Some(index) = diag.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal { index: index + 1 });
    }
    let xi = 0.5 * ((diag[0].ln() + diag[3].ln()) - (diag[1].ln() + diag[2].ln()));
    Ok(XiValue { xi })
}

fn min_eigenvalue(z: &Correlations) -> f64 {
    linalg::sym_eigenvalues(&z.matrix())[0]
}

/// `Z` is PSD (minimum eigenvalue ≥ −1e−12, by Jacobi rotations).
pub fn correlation_psd(z: &Correlations) -> bool {
    min_eigenvalue(z) >= -PSD_TOL
}

/// Same decision as [`correlation_psd`] by an LDLᵀ sweep; used in hot loops.
pub fn correlation_psd_fast(z: &Correlations) -> bool {
    linalg::ldl_psd(&z.matrix(), PSD_TOL)
}

/// Correlations of the partial transpose: swaps `z_14`, `z_23` with `e^{∓ξ}` scaling.
/// Applying it twice at the same `ξ` returns the input (up to rounding in the
/// two rescaled slots).
pub fn pt_correlation(z: &Correlations, xi: XiValue) -> Correlations {
    let s = xi.mu();
    let mut out = *z;
    out.set(Pair::P14, z.get(Pair::P23) / s);
    out.set(Pair::P23, z.get(Pair::P14) * s);
    out
}

/// A principal minor of the partial-transposed correlation matrix `Z'`.
///
/// * order 2: `index` 1..=6 selects the pair in [`Pair`] order;
/// * order 3: `index` k = 1..=4 is the deleted row/column;
/// * order 4: `index` is ignored and `det Z'` is returned.
pub fn pt_principal_minor(z: &Correlations, xi: XiValue, order: usize, index: usize) -> Result<f64> {
    let zp = pt_correlation(z, xi);
    match order {
        2 if (1..=6).contains(&index) => {
            let v = zp.0[index - 1];
            Ok(1.0 - v * v)
        }
        3 if (1..=4).contains(&index) => {
            let sub = linalg::delete_row_col(&zp.matrix(), index - 1);
            Ok(linalg::det3(&sub))
        }
        4 => Ok(linalg::det4(&zp.matrix())),
        _ => Err(Error::InvalidMinor { order, index }),
    }
}

/// Correlations entering the k-th 3×3 principal minor of `Z'`. They share
/// the common index `5 - k`.
pub fn minor3_variables(k: usize) -> Result<[Pair; 3]> {
    Ok(match k {
        1 => [Pair::P14, Pair::P24, Pair::P34],
        2 => [Pair::P13, Pair::P23, Pair::P34],
        3 => [Pair::P12, Pair::P23, Pair::P24],
        4 => [Pair::P12, Pair::P13, Pair::P14],
        _ => return Err(Error::InvalidMinor { order: 3, index: k }),
    })
}

/// Minimum eigenvalue of `Z'`.
pub fn pt_min_eigenvalue(z: &Correlations, xi: XiValue) -> f64 {
    linalg::sym_eigenvalues(&pt_correlation(z, xi).matrix())[0]
}

/// `det Z'`; for a valid state at most one eigenvalue of `Z'` can be negative,
/// so its sign decides separability.
pub fn pt_determinant(z: &Correlations, xi: XiValue) -> f64 {
    linalg::det4(&pt_correlation(z, xi).matrix())
}

/// Peres–Horodecki test via the minimum eigenvalue of the partial transpose.
pub fn peres_separable(state: &BlooreState) -> Result<bool> {
    state.require_density()?;
    let xi = state.xi()?;
    Ok(pt_min_eigenvalue(&state.z, xi) >= -PSD_TOL)
}

/// Peres–Horodecki test via the sign of `det Z'`.
pub fn peres_separable_by_det(state: &BlooreState) -> Result<bool> {
    state.require_density()?;
    let xi = state.xi()?;
    Ok(pt_determinant(&state.z, xi) >= -PSD_TOL)
}

/// Spectral criterion for absolute separability of a two-qubit state:
/// `λ1 − λ3 − 2√(λ2 λ4) ≤ 0` with eigenvalues sorted in decreasing order.
pub fn absolutely_separable_spectrum(eigenvalues: &[f64; 4]) -> bool {
    let mut l = *eigenvalues;
    l.sort_by(|a, b| b.total_cmp(a));
    let l2l4 = (l[1] * l[3]).max(0.0);
    l[0] - l[2] - 2.0 * l2l4.sqrt() <= PSD_TOL
}

pub fn absolutely_separable(state: &BlooreState) -> Result<bool> {
    state.require_density()?;
    Ok(absolutely_separable_spectrum(&state.rho().eigenvalues()))
}
