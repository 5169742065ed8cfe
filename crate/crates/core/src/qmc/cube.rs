//! Cube-integration schemes for relaxations by 3×3 principal minors.
//!
//! The k-th 3×3 minor of the partial-transposed correlation matrix involves
//! three correlations sharing one index, exactly one of which (`t`, either
//! `z14` or `z23`) is rescaled by the transpose:
//!
//! `m_k = 1 + 2 s t a b − a² − b² − s² t²`, with `s = e^{ξ}` for k ∈ {1, 4}
//! and `s = e^{−ξ}` for k ∈ {2, 3}.
//!
//! The three correlations of such a "star" are independent under the flat
//! measure on PSD correlation matrices, each with density `w(z) = ¾(1 − z²)`
//! on [−1, 1]. Integrals are therefore taken over cubes with that weight.
//! The innermost variable is always integrated in closed form: `m_k ≥ 0` is
//! an interval in any one of the three variables, and `W(z) = ¾(z − z³/3)`
//! is the antiderivative of `w`.
//!
//! Two 3×3 minors share exactly one correlation. The paired scheme integrates
//! each minor's other two variables separately, conditional on the shared
//! one, and couples them through a final weighted integral over it. The
//! triple scheme (minors 2, 3, 4) uses the same product measure over all six
//! correlations: each minor's private variable is integrated analytically and
//! the three shared variables `z12, z13, z23` by nested quadrature.

use serde::{Deserialize, Serialize};

use crate::bloore::{minor3_variables, Pair};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Per-variable weight `¾(1 − z²)`.
#[inline]
pub fn weight(z: f64) -> f64 {
    0.75 * (1.0 - z * z)
}

/// `∫_{-1}^{z} w − ½`, i.e. `¾(z − z³/3)` on [−1, 1], clamped outside.
#[inline]
fn w_antiderivative(z: f64) -> f64 {
    let z = z.clamp(-1.0, 1.0);
    0.75 * (z - z * z * z / 3.0)
}

/// Weighted measure of `[lo, hi] ∩ [−1, 1]`.
#[inline]
fn w_mass(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        0.0
    } else {
        (w_antiderivative(hi) - w_antiderivative(lo)).max(0.0)
    }
}

/// Whether the transposed variable of minor `k` is scaled by `e^{ξ}` (else `e^{−ξ}`).
fn scale(k: usize, xi: f64) -> f64 {
    match k {
        1 | 4 => xi.exp(),
        _ => (-xi).exp(),
    }
}

/// The transposed variable of minor `k`.
fn touched(k: usize) -> Pair {
    match k {
        1 | 4 => Pair::P14,
        _ => Pair::P23,
    }
}

/// Weighted mass of the touched variable `t` with `m ≥ 0`, given the other two.
#[inline]
fn mass_touched(s: f64, a: f64, b: f64, indicator: bool) -> f64 {
    if !indicator {
        return 1.0;
    }
    let r2 = (1.0 - a * a) * (1.0 - b * b);
    if r2 < 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    w_mass((a * b - r) / s, (a * b + r) / s)
}

/// Weighted mass of an untouched variable `b` with `m ≥ 0`, given `t` and `a`.
#[inline]
fn mass_untouched(s: f64, t: f64, a: f64, indicator: bool) -> f64 {
    if !indicator {
        return 1.0;
    }
    let st = s * t;
    let r2 = (1.0 - a * a) * (1.0 - st * st);
    if r2 < 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    w_mass(st * a - r, st * a + r)
}

/// Quadrature settings for the nested integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeOptions {
    /// Impose the minor constraints (false gives the weight normalisation).
    pub indicator: bool,
    pub tol: Tolerance,
}

impl Default for CubeOptions {
    fn default() -> Self {
        CubeOptions { indicator: true, tol: Tolerance::new(1e-11, 1e-11) }
    }
}

fn quad<F: FnMut(f64) -> f64>(f: F, tol: Tolerance) -> Result<f64> {
    Ok(integrate(f, -1.0, 1.0, tol)?.value)
}

/// `∫∫∫ w(a) w(b) w(t) 1{m_k ≥ 0}` over the minor's three variables.
pub fn cube_single(k: usize, xi: f64) -> Result<f64> {
    cube_single_with(k, xi, CubeOptions::default())
}

pub fn cube_single_with(k: usize, xi: f64, opt: CubeOptions) -> Result<f64> {
    minor3_variables(k)?;
    let s = scale(k, xi);
    let inner = Tolerance { abs: opt.tol.abs * 0.1, ..opt.tol };
    let mut err = None;
    let v = quad(
        |a| {
            weight(a)
                * quad(|b| weight(b) * mass_touched(s, a, b, opt.indicator), inner)
                    .unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        f64::NAN
                    })
        },
        opt.tol,
    );
    match err {
        Some(e) => Err(e),
        None => v,
    }
}

/// The correlation shared by minors `a` and `b`.
pub fn shared_variable(a: usize, b: usize) -> Result<Pair> {
    let va = minor3_variables(a)?;
    let vb = minor3_variables(b)?;
    if a == b {
        return Err(Error::InvalidMinor { order: 3, index: b });
    }
    va.into_iter()
        .find(|p| vb.contains(p))
        .ok_or(Error::InvalidMinor { order: 3, index: b })
}

/// `f_k(c) = ∫∫ w w 1{m_k ≥ 0}` over minor `k`'s variables other than `shared`, at `shared = c`.
fn conditional(k: usize, shared: Pair, c: f64, xi: f64, opt: CubeOptions) -> Result<f64> {
    let s = scale(k, xi);
    if shared == touched(k) {
        quad(|a| weight(a) * mass_untouched(s, c, a, opt.indicator), opt.tol)
    } else {
        // `c` is untouched; integrate the other untouched variable, then `t` analytically
        quad(|b| weight(b) * mass_touched(s, c, b, opt.indicator), opt.tol)
    }
}

/// `∫ w(c) f_a(c) f_b(c) dc` over the correlation shared by minors `a` and `b`.
pub fn cube_paired(a: usize, b: usize, xi: f64) -> Result<f64> {
    cube_paired_with(a, b, xi, CubeOptions::default())
}

pub fn cube_paired_with(a: usize, b: usize, xi: f64, opt: CubeOptions) -> Result<f64> {
    let shared = shared_variable(a, b)?;
    let inner = CubeOptions { tol: Tolerance { abs: opt.tol.abs * 0.1, ..opt.tol }, ..opt };
    let mut err = None;
    let v = quad(
        |c| {
            let fa = conditional(a, shared, c, xi, inner);
            let fb = conditional(b, shared, c, xi, inner);
            match (fa, fb) {
                (Ok(x), Ok(y)) => weight(c) * x * y,
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        opt.tol,
    );
    match err {
        Some(e) => Err(e),
        None => v,
    }
}

/// Minors 2, 3 and 4 jointly, under the product measure on all six correlations.
pub fn cube_triple(xi: f64) -> Result<f64> {
    cube_triple_with(xi, CubeOptions { indicator: true, tol: Tolerance::new(1e-9, 1e-9) })
}

pub fn cube_triple_with(xi: f64, opt: CubeOptions) -> Result<f64> {
    let s23 = (-xi).exp();
    let s4 = xi.exp();
    let ind = opt.indicator;
    let mid = Tolerance { abs: opt.tol.abs * 0.1, ..opt.tol };
    let inner = Tolerance { abs: opt.tol.abs * 0.01, ..opt.tol };
    let mut err = None;
    let v = quad(
        |z23| {
            // minor 2: private z34 given (z23, z13); minor 3: private z24 given (z23, z12)
            let r = quad(
                |z12| {
                    let g3 = mass_untouched(s23, z23, z12, ind);
                    if g3 == 0.0 {
                        return 0.0;
                    }
                    let q = quad(
                        |z13| {
                            // minor 4: private z14 (touched) given (z12, z13)
                            weight(z13) * mass_untouched(s23, z23, z13, ind) * mass_touched(s4, z12, z13, ind)
                        },
                        inner,
                    );
                    match q {
                        Ok(q) => weight(z12) * g3 * q,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                mid,
            );
            match r {
                Ok(r) => weight(z23) * r,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        opt.tol,
    );
    match err {
        Some(e) => Err(e),
        None => v,
    }
}

/// Which minors a cube scheme enforces and through which variables they couple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSchemeSpec {
    pub minors: Vec<usize>,
    /// `(a, b, shared correlation)` for every pair of enforced minors.
    pub shared: Vec<(usize, usize, Pair)>,
    /// Per-variable weight is `weight_numerator/4 · (1 − z²)`.
    pub weight_numerator: u32,
}

impl CubeSchemeSpec {
    pub fn new(mut minors: Vec<usize>) -> Result<Self> {
        minors.sort_unstable();
        minors.dedup();
        for &k in &minors {
            minor3_variables(k)?;
        }
        let supported = matches!(minors.len(), 1 | 2) || minors == [2, 3, 4];
        if !supported {
            return Err(Error::Config(format!("no cube scheme for minors {minors:?}")));
        }
        let mut shared = Vec::new();
        for (i, &a) in minors.iter().enumerate() {
            for &b in &minors[i + 1..] {
                shared.push((a, b, shared_variable(a, b)?));
            }
        }
        Ok(CubeSchemeSpec { minors, shared, weight_numerator: 3 })
    }

    pub fn evaluate(&self, xi: f64) -> Result<f64> {
        match self.minors.as_slice() {
            [k] => cube_single(*k, xi),
            [a, b] => cube_paired(*a, *b, xi),
            _ => cube_triple(xi),
        }
    }
}
