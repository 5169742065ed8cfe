//! Small dense kernels for 3×3 and 4×4 symmetric/Hermitian matrices.
//!
//! Everything here works on fixed-size arrays; nothing allocates. The cyclic
//! Jacobi solver is the reference for eigenvalue-based decisions, and the
//! LDLᵀ factorization is the fast positivity test used inside samplers.

use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> [f64; N] {
    let mut a = *m;
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return [0.0; N];
    }
    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [0.0; N];
    for (i, e) in ev.iter_mut().enumerate() {
        *e = a[i][i];
    }
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant of a 4×4 matrix by expansion in 2×2 complementary minors.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Principal submatrix with row/column `skip` removed.
pub fn delete_row_col(m: &[[f64; 4]; 4], skip: usize) -> [[f64; 3]; 3] {
    let keep: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
    let mut out = [[0.0; 3]; 3];
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            out[r][c] = m[i][j];
        }
    }
    out
}

/// `D^{1/2} Z D^{1/2}` for a unit-diagonal `z` and diagonal `d`.
pub fn scale_correlation(z: &[[f64; 4]; 4], d: &[f64; 4]) -> [[f64; 4]; 4] {
    let r = d.map(f64::sqrt);
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = z[i][j] * r[i] * r[j];
        }
    }
    out
}

/// Positive-semidefiniteness by an LDLᵀ sweep.
///
/// A pivot below `-tol` rejects. A pivot within `tol` of zero is accepted only
/// if the rest of its column vanishes as well.
pub fn ldl_psd<const N: usize>(m: &[[f64; N]; N], tol: f64) -> bool {
    let mut l = [[0.0; N]; N];
    let mut d = [0.0; N];
    for j in 0..N {
        let mut dj = m[j][j];
        for k in 0..j {
            dj -= l[j][k] * l[j][k] * d[k];
        }
        if dj < -tol {
            return false;
        }
        d[j] = dj;
        for i in (j + 1)..N {
            let mut v = m[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k] * d[k];
            }
            if dj <= tol {
                if v.abs() > tol.sqrt() {
                    return false;
                }
                l[i][j] = 0.0;
            } else {
                l[i][j] = v / dj;
            }
        }
    }
    true
}

/// Complex analogue of [`ldl_psd`] for Hermitian matrices (upper triangle is read).
pub fn hermitian_psd<const N: usize>(m: &[[Complex64; N]; N], tol: f64) -> bool {
    let mut l = [[Complex64::new(0.0, 0.0); N]; N];
    let mut d = [0.0; N];
    for j in 0..N {
        let mut dj = m[j][j].re;
        for k in 0..j {
            dj -= l[j][k].norm_sqr() * d[k];
        }
        if dj < -tol {
            return false;
        }
        d[j] = dj;
        for i in (j + 1)..N {
            let mut v = m[j][i].conj();
            for k in 0..j {
                v -= l[i][k] * l[j][k].conj() * d[k];
            }
            if dj <= tol {
                if v.norm() > tol.sqrt() {
                    return false;
                }
                l[i][j] = Complex64::new(0.0, 0.0);
            } else {
                l[i][j] = v / dj;
            }
        }
    }
    true
}

/// Eigenvalues of a Hermitian N×N matrix via the real 2N×2N embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `m` with each value doubled.
pub fn hermitian_eigenvalues(m: &[[Complex64; 4]; 4]) -> [f64; 4] {
    let mut r = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = m[i][j].re;
            r[i + 4][j + 4] = m[i][j].re;
            r[i][j + 4] = -m[i][j].im;
            r[i + 4][j] = m[i][j].im;
        }
    }
    let ev = sym_eigenvalues(&r);
    [ev[0], ev[2], ev[4], ev[6]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonal_and_rotation() {
        let ev = sym_eigenvalues(&[[3.0, 0.0], [0.0, -1.0]]);
        assert_eq!(ev, [-1.0, 3.0]);
        let ev = sym_eigenvalues(&[[2.0, 1.0], [1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_degenerate_spectrum() {
        // J4 - I has eigenvalues {3, -1, -1, -1}
        let mut m = [[1.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let ev = sym_eigenvalues(&m);
        for e in &ev[..3] {
            assert!((e + 1.0).abs() < 1e-14);
        }
        assert!((ev[3] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn det4_matches_eigen_product() {
        let m = [
            [1.0, 0.3, -0.2, 0.1],
            [0.3, 1.0, 0.4, -0.5],
            [-0.2, 0.4, 1.0, 0.25],
            [0.1, -0.5, 0.25, 1.0],
        ];
        let prod: f64 = sym_eigenvalues(&m).iter().product();
        assert!((det4(&m) - prod).abs() < 1e-14);
    }

    #[test]
    fn ldl_agrees_with_eigenvalues() {
        let pd = [[1.0, 0.9, 0.0], [0.9, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(ldl_psd(&pd, 1e-12));
        let bad = [[1.0, -0.9, -0.9], [-0.9, 1.0, -0.9], [-0.9, -0.9, 1.0]];
        assert!(!ldl_psd(&bad, 1e-12));
        // rank-deficient but PSD
        let semi = [[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(ldl_psd(&semi, 1e-12));
    }

    #[test]
    fn hermitian_helpers() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // [[1, i/2], [-i/2, 1]] ⊕ I has eigenvalues 1/2, 1, 1, 3/2
        let m = [
            [one, 0.5 * i, zero, zero],
            [-0.5 * i, one, zero, zero],
            [zero, zero, one, zero],
            [zero, zero, zero, one],
        ];
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 0.5).abs() < 1e-14 && (ev[3] - 1.5).abs() < 1e-14);
        assert!(hermitian_psd(&m, 1e-12));
        let mut bad = m;
        bad[0][1] = 1.2 * i;
        bad[1][0] = -1.2 * i;
        assert!(!hermitian_psd(&bad, 1e-12));
    }
}
