//! Separability functions as expression trees over catalog curves.
//!
//! Every node is evaluated branch-wise: `branch(side, ξ)` is the analytic
//! continuation of the branch for `side`, so envelopes and splices see
//! one-sided limits at the origin. [`DesfCurve::eval`] averages the two
//! one-sided limits at ξ = 0.
//!
//! Curves can be written as text, e.g. `product(s3x3, reflect(s3x3))` or
//! `power(conjecture, 2)`; see [`DesfCurve::parse`].

use std::fmt;

use serde::{Deserialize, Serialize};

use super::catalog::{CatalogCurve, Side};
use crate::error::{Error, Result};
use crate::provenance::Provenance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveExpr {
    Catalog(CatalogCurve),
    /// `C(−ξ)`.
    Reflect(Box<CurveExpr>),
    /// Pointwise lesser branch.
    EnvelopeMin(Box<CurveExpr>, Box<CurveExpr>),
    /// Pointwise greater branch.
    EnvelopeMax(Box<CurveExpr>, Box<CurveExpr>),
    /// `left` on ξ < 0, `right` on ξ > 0.
    Splice { left: Box<CurveExpr>, right: Box<CurveExpr> },
    Product(Box<CurveExpr>, Box<CurveExpr>),
    Power(Box<CurveExpr>, u32),
}

impl CurveExpr {
    pub fn branch(&self, side: Side, xi: f64) -> f64 {
        match self {
            CurveExpr::Catalog(c) => c.branch(side, xi),
            CurveExpr::Reflect(c) => c.branch(side.flip(), -xi),
            CurveExpr::EnvelopeMin(a, b) => a.branch(side, xi).min(b.branch(side, xi)),
            CurveExpr::EnvelopeMax(a, b) => a.branch(side, xi).max(b.branch(side, xi)),
            CurveExpr::Splice { left, right } => match side {
                Side::Left => left.branch(side, xi),
                Side::Right => right.branch(side, xi),
            },
            CurveExpr::Product(a, b) => a.branch(side, xi) * b.branch(side, xi),
            CurveExpr::Power(c, k) => c.branch(side, xi).powi(*k as i32),
        }
    }
}

impl fmt::Display for CurveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveExpr::Catalog(c) => f.write_str(c.name()),
            CurveExpr::Reflect(c) => write!(f, "reflect({c})"),
            CurveExpr::EnvelopeMin(a, b) => write!(f, "envelope_min({a},{b})"),
            CurveExpr::EnvelopeMax(a, b) => write!(f, "envelope_max({a},{b})"),
            CurveExpr::Splice { left, right } => write!(f, "splice({left},{right})"),
            CurveExpr::Product(a, b) => write!(f, "product({a},{b})"),
            CurveExpr::Power(c, k) => write!(f, "power({c},{k})"),
        }
    }
}

/// A named separability function of ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesfCurve {
    pub name: String,
    pub provenance: Provenance,
    pub expr: CurveExpr,
}

/// Combinator selector for [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Reflect,
    EnvelopeMin,
    EnvelopeMax,
    Splice,
    Product,
    Power,
}

impl DesfCurve {
    fn from_expr(expr: CurveExpr) -> Self {
        DesfCurve { name: expr.to_string(), provenance: Provenance::ClosedForm, expr }
    }

    /// Look up a catalog curve or one of the named composites (`paired_14`,
    /// `paired_23`, `paired_product`, `intermediate_product`).
    pub fn catalog(name: &str) -> Result<Self> {
        let norm = name.trim().replace('-', "_");
        let expr = match norm.as_str() {
            "paired_14" => paired_14(),
            "paired_23" => CurveExpr::Reflect(Box::new(paired_14())),
            "paired_product" => CurveExpr::Product(
                Box::new(paired_14()),
                Box::new(CurveExpr::Reflect(Box::new(paired_14()))),
            ),
            "intermediate_product" => CurveExpr::Product(
                Box::new(CurveExpr::Catalog(CatalogCurve::S3x3)),
                Box::new(CurveExpr::Reflect(Box::new(CurveExpr::Catalog(CatalogCurve::S3x3)))),
            ),
            _ => CurveExpr::Catalog(CatalogCurve::from_name(&norm)?),
        };
        Ok(DesfCurve { name: norm, provenance: Provenance::ClosedForm, expr })
    }

    /// Value at ξ; at exactly 0 the mean of the two one-sided limits.
    pub fn eval(&self, xi: f64) -> f64 {
        if xi == 0.0 {
            0.5 * (self.expr.branch(Side::Left, 0.0) + self.expr.branch(Side::Right, 0.0))
        } else {
            self.expr.branch(Side::of(xi), xi)
        }
    }

    /// One-sided limit at 0 from `side`.
    pub fn limit_at_zero(&self, side: Side) -> f64 {
        self.expr.branch(side, 0.0)
    }

    pub fn reflect(&self) -> Self {
        Self::from_expr(CurveExpr::Reflect(Box::new(self.expr.clone())))
    }

    pub fn envelope_min(&self, other: &DesfCurve) -> Self {
        Self::from_expr(CurveExpr::EnvelopeMin(Box::new(self.expr.clone()), Box::new(other.expr.clone())))
    }

    pub fn envelope_max(&self, other: &DesfCurve) -> Self {
        Self::from_expr(CurveExpr::EnvelopeMax(Box::new(self.expr.clone()), Box::new(other.expr.clone())))
    }

    /// `self` on ξ < 0, `right` on ξ > 0.
    pub fn splice(&self, right: &DesfCurve) -> Self {
        Self::from_expr(CurveExpr::Splice { left: Box::new(self.expr.clone()), right: Box::new(right.expr.clone()) })
    }

    pub fn product(&self, other: &DesfCurve) -> Self {
        Self::from_expr(CurveExpr::Product(Box::new(self.expr.clone()), Box::new(other.expr.clone())))
    }

    pub fn power(&self, k: u32) -> Result<Self> {
        if k != 2 && k != 4 {
            return Err(Error::InvalidPower(k));
        }
        Ok(Self::from_expr(CurveExpr::Power(Box::new(self.expr.clone()), k)))
    }

    /// Parse a curve expression: a catalog or composite name, or one of
    /// `reflect(c)`, `envelope_min(a,b)` (alias `min`), `envelope_max(a,b)`
    /// (alias `max`), `splice(left,right)`, `product(a,b)`, `power(c,k)`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, text };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.error("trailing input"));
        }
        let name = match &expr {
            CurveExpr::Catalog(_) => text.trim().replace('-', "_"),
            _ => expr.to_string(),
        };
        Ok(DesfCurve { name, provenance: Provenance::ClosedForm, expr })
    }
}

/// The (1,4) paired-minor curve: greater branch for ξ < 0, lesser for ξ > 0.
fn paired_14() -> CurveExpr {
    CurveExpr::Splice {
        left: Box::new(CurveExpr::Catalog(CatalogCurve::PairedGreater)),
        right: Box::new(CurveExpr::Catalog(CatalogCurve::PairedIntermediate)),
    }
}

/// Apply a combinator to operand curves; `k` is only read by `Power`.
pub fn combine(op: CombineOp, curves: &[DesfCurve], k: Option<u32>) -> Result<DesfCurve> {
    let arity = |n: usize| {
        if curves.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidCurveExpr(format!("{op:?} takes {n} curve(s), got {}", curves.len())))
        }
    };
    match op {
        CombineOp::Reflect => arity(1).map(|_| curves[0].reflect()),
        CombineOp::EnvelopeMin => arity(2).map(|_| curves[0].envelope_min(&curves[1])),
        CombineOp::EnvelopeMax => arity(2).map(|_| curves[0].envelope_max(&curves[1])),
        CombineOp::Splice => arity(2).map(|_| curves[0].splice(&curves[1])),
        CombineOp::Product => arity(2).map(|_| curves[0].product(&curves[1])),
        CombineOp::Power => {
            arity(1)?;
            curves[0].power(k.ok_or_else(|| Error::InvalidCurveExpr("power needs an exponent".into()))?)
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::InvalidCurveExpr(format!("{what} at offset {} in `{}`", self.pos, self.text))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"_-".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn expr(&mut self) -> Result<CurveExpr> {
        let name = self.ident()?.replace('-', "_");
        self.skip_ws();
        if self.s.get(self.pos) != Some(&b'(') {
            return DesfCurve::catalog(&name).map(|c| c.expr);
        }
        self.eat(b'(')?;
        let b = Box::new;
        let out = match name.as_str() {
            "reflect" => CurveExpr::Reflect(b(self.expr()?)),
            "envelope_min" | "min" | "envelope_max" | "max" | "splice" | "product" => {
                let x = self.expr()?;
                self.eat(b',')?;
                let y = self.expr()?;
                match name.as_str() {
                    "envelope_min" | "min" => CurveExpr::EnvelopeMin(b(x), b(y)),
                    "envelope_max" | "max" => CurveExpr::EnvelopeMax(b(x), b(y)),
                    "splice" => CurveExpr::Splice { left: b(x), right: b(y) },
                    _ => CurveExpr::Product(b(x), b(y)),
                }
            }
            "power" => {
                let x = self.expr()?;
                self.eat(b',')?;
                let k: u32 = self.ident()?.parse().map_err(|_| self.error("expected an integer exponent"))?;
                if k != 2 && k != 4 {
                    return Err(Error::InvalidPower(k));
                }
                CurveExpr::Power(b(x), k)
            }
            other => return Err(Error::InvalidCurveExpr(format!("unknown combinator `{other}`"))),
        };
        self.eat(b')')?;
        Ok(out)
    }
}
