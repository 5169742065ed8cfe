//! Deterministic maps from uniforms to diagonals and correlations.
//!
//! The Hilbert-Schmidt measure factorises in Bloore coordinates into a
//! Dirichlet law on the diagonal (exponent 3β/2 per entry) times the flat
//! measure on the correlations restricted to the PSD set. Diagonals are drawn
//! by stick-breaking with inverse Beta CDFs, so a quasi-random point maps to
//! exactly one state.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::beta::{beta_reg, ln_beta};

use crate::quadrature::DiagonalWeight;

const TABLE_CELLS: usize = 1024;

/// Inverse CDF of Beta(a, b), seeded from a table and polished by
/// safeguarded Newton steps on the regularised incomplete beta function.
#[derive(Debug, Clone)]
pub struct BetaQuantile {
    a: f64,
    b: f64,
    ln_b: f64,
    table: Vec<f64>,
}

impl BetaQuantile {
    pub fn new(a: f64, b: f64) -> Self {
        let mut q = BetaQuantile { a, b, ln_b: ln_beta(a, b), table: Vec::new() };
        let table = (0..=TABLE_CELLS)
            .map(|i| match i {
                0 => 0.0,
                i if i == TABLE_CELLS => 1.0,
                i => q.bisect(i as f64 / TABLE_CELLS as f64),
            })
            .collect();
        q.table = table;
        q
    }

    fn bisect(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if beta_reg(self.a, self.b, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn pdf(&self, x: f64) -> f64 {
        ((self.a - 1.0) * x.ln() + (self.b - 1.0) * (-x).ln_1p() - self.ln_b).exp()
    }

    /// `x` with `I_x(a, b) = u`, for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let pos = u * TABLE_CELLS as f64;
        let cell = (pos as usize).min(TABLE_CELLS - 1);
        let (mut lo, mut hi) = (self.table[cell], self.table[cell + 1]);
        let frac = pos - cell as f64;
        let mut x = if cell == 0 {
            // I_x ≈ x^a / (a B(a, b)) near the origin
            ((u.ln() + self.a.ln() + self.ln_b) / self.a).exp().min(hi)
        } else if cell == TABLE_CELLS - 1 {
            1.0 - (((1.0 - u).ln() + self.b.ln() + self.ln_b) / self.b).exp().min(1.0 - lo)
        } else {
            lo + frac * (hi - lo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..50 {
            let f = beta_reg(self.a, self.b, x) - u;
            if f == 0.0 {
                return x;
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = f / self.pdf(x);
            let mut next = x - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(1e-300) || hi - lo <= f64::EPSILON * hi {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Stick-breaking sampler for `ρ_ii ∝ ∏ ρ_ii^{p_i}`.
#[derive(Debug, Clone)]
pub struct DiagonalSampler {
    sticks: [BetaQuantile; 3],
}

impl DiagonalSampler {
    pub fn new(weight: &DiagonalWeight) -> Self {
        let al = weight.exponents.map(|p| p + 1.0);
        DiagonalSampler {
            sticks: [
                BetaQuantile::new(al[0], al[1] + al[2] + al[3]),
                BetaQuantile::new(al[1], al[2] + al[3]),
                BetaQuantile::new(al[2], al[3]),
            ],
        }
    }

    /// Map three uniforms to a point of the simplex.
    pub fn sample(&self, u: [f64; 3]) -> [f64; 4] {
        let y1 = self.sticks[0].quantile(u[0]);
        let y2 = self.sticks[1].quantile(u[1]);
        let y3 = self.sticks[2].quantile(u[2]);
        let r1 = 1.0 - y1;
        let r2 = r1 * (1.0 - y2);
        [y1, r1 * y2, r2 * y3, r2 * (1.0 - y3)]
    }
}

/// Uniform on [−1, 1].
#[inline]
pub fn real_correlation(u: f64) -> f64 {
    2.0 * u - 1.0
}

/// Uniform on the closed unit disc.
#[inline]
pub fn complex_correlation(u: f64, v: f64) -> Complex64 {
    Complex64::from_polar(u.sqrt(), 2.0 * PI * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::BetaParameter;

    #[test]
    fn quantile_inverts_cdf() {
        for (a, b) in [(2.5, 7.5), (2.5, 2.5), (4.0, 12.0), (7.0, 7.0), (3.0, 5.0)] {
            let q = BetaQuantile::new(a, b);
            for u in [1e-9, 1e-4, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
                let x = q.quantile(u);
                assert!((beta_reg(a, b, x) - u).abs() < 1e-13 * u.max(1e-3), "a={a} b={b} u={u}: x={x}");
            }
        }
    }

    #[test]
    fn diagonal_on_simplex() {
        let s = DiagonalSampler::new(&DiagonalWeight::for_beta(BetaParameter::Real));
        for u in [[0.1, 0.2, 0.3], [0.999, 0.001, 0.5], [0.5, 0.5, 0.5]] {
            let d = s.sample(u);
            assert!(d.iter().all(|&x| x >= 0.0));
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn disc_points() {
        let z = complex_correlation(0.25, 0.25);
        assert!((z - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert_eq!(real_correlation(0.75), 0.5);
    }
}
