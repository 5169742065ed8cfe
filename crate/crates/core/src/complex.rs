//! Complex Bloore coordinates, used for direct sampling of complex states
//! and of the sparse complex family with only a few nonzero coherences.

use num_complex::Complex64;

use crate::bloore::{Pair, XiValue, PSD_TOL};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexCorrelations(pub [Complex64; 6]);

impl ComplexCorrelations {
    pub fn zero() -> Self {
        ComplexCorrelations([Complex64::new(0.0, 0.0); 6])
    }

    pub fn get(&self, p: Pair) -> Complex64 {
        self.0[p.slot()]
    }

    pub fn set(&mut self, p: Pair, v: Complex64) {
        self.0[p.slot()] = v;
    }

    /// Hermitian unit-diagonal matrix with `Z_ij = z_ij` above the diagonal.
    pub fn matrix(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        for p in Pair::ALL {
            let (i, j) = p.indices();
            m[i][j] = self.get(p);
            m[j][i] = self.get(p).conj();
        }
        m
    }
}

pub fn complex_correlation_psd(z: &ComplexCorrelations) -> bool {
    linalg::hermitian_psd(&z.matrix(), PSD_TOL)
}

/// Partial transpose on the second qubit in correlation coordinates:
/// `z_14 ↔ z_23` with `e^{∓ξ}` scaling, and `z_12`, `z_34` conjugated.
pub fn complex_pt_correlation(z: &ComplexCorrelations, xi: XiValue) -> ComplexCorrelations {
    let s = xi.mu();
    let mut out = *z;
    out.set(Pair::P14, z.get(Pair::P23) / s);
    out.set(Pair::P23, z.get(Pair::P14) * s);
    out.set(Pair::P12, z.get(Pair::P12).conj());
    out.set(Pair::P34, z.get(Pair::P34).conj());
    out
}

pub fn complex_peres_separable(z: &ComplexCorrelations, xi: XiValue) -> bool {
    linalg::hermitian_psd(&complex_pt_correlation(z, xi).matrix(), PSD_TOL)
}
