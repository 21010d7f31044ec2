//! Scalar fields over boxes in R^n and finite-difference derivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_with, Expr, VarStyle};
use crate::grid::DomainBox;
use crate::spectra::SymmetricMatrix;

pub const DEFAULT_GRADIENT_STEP: f64 = 1e-6;
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;

pub type Oracle = Arc<dyn Fn(&[f64]) -> std::result::Result<f64, EvalError> + Send + Sync>;
pub type HessianOracle = Arc<dyn Fn(&[f64]) -> SymmetricMatrix + Send + Sync>;
pub type Clearance = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Declared regularity. Ordered so that `min` gives the weaker tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Smoothness {
    C0,
    C2,
    #[serde(rename = "Cinf", alias = "CInf", alias = "C∞", alias = "Cinfty")]
    CInf,
}

impl Smoothness {
    pub fn is_c2(self) -> bool {
        self >= Smoothness::C2
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Smoothness::C0 => "C0",
            Smoothness::C2 => "C2",
            Smoothness::CInf => "Cinf",
        })
    }
}

#[derive(Clone)]
enum Source {
    Expr { expr: Expr, style: VarStyle },
    Oracle(Oracle),
}

/// Evaluation oracle over a domain box. Values lie in `[-inf, +inf)`.
///
/// Cloning is cheap; oracle closures are shared.
#[derive(Clone)]
pub struct ScalarField {
    id: String,
    dim: usize,
    source: Source,
    domain: DomainBox,
    hessian: Option<HessianOracle>,
    clearance: Option<Clearance>,
    smooth: Smoothness,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("smooth", &self.smooth)
            .field("exact_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl ScalarField {
    /// Parses `source` over `x1..x{dim}`. Expression fields default to C2.
    pub fn from_expr(source: &str, dim: usize) -> Result<Self> {
        Self::from_expr_with(source, VarStyle::Real { dim })
    }

    /// Field on C^n ≅ R^{2n} with variables `x1..xn, y1..yn`.
    pub fn from_complex_expr(source: &str, n: usize) -> Result<Self> {
        Self::from_expr_with(source, VarStyle::Complex { n })
    }

    pub fn from_expr_with(source: &str, style: VarStyle) -> Result<Self> {
        let expr = parse_with(source, style)?;
        Ok(Self::from_ast(expr, style))
    }

    pub fn from_ast(expr: Expr, style: VarStyle) -> Self {
        let dim = style.dim();
        Self {
            id: expr.to_source(style),
            dim,
            source: Source::Expr { expr, style },
            domain: DomainBox::unbounded(dim),
            hessian: None,
            clearance: None,
            smooth: Smoothness::C2,
        }
    }

    /// Wraps a closure. Intended for tests and for fields built from other
    /// fields; the closure must be deterministic.
    pub fn from_fn<F>(id: impl Into<String>, dim: usize, smooth: Smoothness, f: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<f64, EvalError> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            dim,
            source: Source::Oracle(Arc::new(f)),
            domain: DomainBox::unbounded(dim),
            hessian: None,
            clearance: None,
            smooth,
        }
    }

    pub fn with_domain(mut self, domain: DomainBox) -> Result<Self> {
        if domain.dim() != self.dim {
            return Err(Error::Invalid(format!(
                "domain box has {} axes, field has dimension {}",
                domain.dim(),
                self.dim
            )));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_smoothness(mut self, smooth: Smoothness) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Attaches an exact Hessian; [`fd_hessian`] then returns it verbatim.
    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[f64]) -> SymmetricMatrix + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(h));
        self
    }

    /// Attaches the distance from a point to the edge of the field's natural
    /// domain (e.g. an open set). Witness balls are kept inside it.
    pub fn with_clearance<C>(mut self, c: C) -> Self
    where
        C: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.clearance = Some(Arc::new(c));
        self
    }

    /// Radius of the largest open ball around `p` on which the field is
    /// defined: the domain-box margin, reduced by the clearance if attached.
    pub fn clearance(&self, p: &[f64]) -> f64 {
        let m = self.domain.margin(p);
        match &self.clearance {
            Some(c) => m.min(c(p)),
            None => m,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smooth
    }

    pub fn expr(&self) -> Option<(&Expr, VarStyle)> {
        match &self.source {
            Source::Expr { expr, style } => Some((expr, *style)),
            Source::Oracle(_) => None,
        }
    }

    pub fn exact_hessian(&self) -> Option<&HessianOracle> {
        self.hessian.as_ref()
    }

    /// Value at `p`. Fails outside the open domain box, on `+inf`/NaN, and on
    /// non-real intermediates.
    pub fn eval(&self, p: &[f64]) -> std::result::Result<f64, EvalError> {
        if p.len() != self.dim {
            return Err(EvalError::Dimension {
                expected: self.dim,
                got: p.len(),
            });
        }
        if !self.domain.contains(p) {
            return Err(EvalError::OutsideDomain { point: p.to_vec() });
        }
        self.eval_unchecked(p)
    }

    /// Value at `p` ignoring the domain box.
    pub fn eval_unchecked(&self, p: &[f64]) -> std::result::Result<f64, EvalError> {
        let v = match &self.source {
            Source::Expr { expr, .. } => expr.eval(p)?,
            Source::Oracle(f) => f(p)?,
        };
        if v.is_nan() || v == f64::INFINITY {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }

    /// Serializable description, available for expression fields only.
    pub fn spec(&self) -> Option<FieldSpec> {
        let (expr, style) = self.expr()?;
        let (dim, complex) = match style {
            VarStyle::Real { dim } => (dim, false),
            VarStyle::Complex { n } => (n, true),
        };
        Some(FieldSpec {
            dim,
            expr: expr.to_source(style),
            bounds: (!self
                .domain
                .intervals
                .iter()
                .all(|(lo, hi)| lo.is_infinite() && hi.is_infinite()))
            .then(|| self.domain.clone()),
            smooth: Some(self.smooth),
            complex,
        })
    }
}

/// JSON form of an expression field:
/// `{"dim": n, "expr": "...", "box": [[lo,hi],...], "smooth": "C2"}`.
/// With `"complex": true`, `dim` counts complex coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub dim: usize,
    pub expr: String,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<DomainBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smooth: Option<Smoothness>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub complex: bool,
}

impl FieldSpec {
    pub fn build(&self) -> Result<ScalarField> {
        if self.dim == 0 {
            return Err(Error::Invalid("field dimension must be positive".into()));
        }
        let style = if self.complex {
            VarStyle::Complex { n: self.dim }
        } else {
            VarStyle::Real { dim: self.dim }
        };
        let mut field = ScalarField::from_expr_with(&self.expr, style)?;
        if let Some(b) = &self.bounds {
            field = field.with_domain(b.clone())?;
        }
        if let Some(s) = self.smooth {
            field = field.with_smoothness(s);
        }
        Ok(field)
    }
}

/// Symmetric second-derivative estimate at a point.
#[derive(Debug, Clone)]
pub struct HessianEstimate {
    pub point: Vec<f64>,
    pub matrix: SymmetricMatrix,
    /// Per-axis steps; empty when an exact Hessian was used.
    pub step: Vec<f64>,
    /// Largest gap between the `h` and `2h` diagonal estimates, scaled by 1/3.
    pub error_scale: f64,
}

fn eval_at(f: &ScalarField, p: &[f64]) -> Result<f64> {
    let v = f.eval(p)?;
    if !v.is_finite() {
        return Err(Error::NonFiniteDerivative { point: p.to_vec() });
    }
    Ok(v)
}

fn steps(p: &[f64], h: f64) -> Vec<f64> {
    p.iter().map(|x| h * x.abs().max(1.0)).collect()
}

/// Central-difference gradient with the default relative step.
pub fn fd_gradient(f: &ScalarField, p: &[f64]) -> Result<Vec<f64>> {
    fd_gradient_with(f, p, DEFAULT_GRADIENT_STEP)
}

pub fn fd_gradient_with(f: &ScalarField, p: &[f64], h0: f64) -> Result<Vec<f64>> {
    check_dim(f, p)?;
    let h = steps(p, h0);
    let mut x = p.to_vec();
    let mut g = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        x[i] = p[i] + h[i];
        let fp = eval_at(f, &x)?;
        x[i] = p[i] - h[i];
        let fm = eval_at(f, &x)?;
        x[i] = p[i];
        let d = (fp - fm) / (2.0 * h[i]);
        if !d.is_finite() {
            return Err(Error::NonFiniteDerivative { point: p.to_vec() });
        }
        g.push(d);
    }
    Ok(g)
}

/// Symmetric Hessian by central second differences with the default step,
/// or the attached exact Hessian.
pub fn fd_hessian(f: &ScalarField, p: &[f64]) -> Result<HessianEstimate> {
    fd_hessian_with(f, p, DEFAULT_HESSIAN_STEP)
}

pub fn fd_hessian_with(f: &ScalarField, p: &[f64], h1: f64) -> Result<HessianEstimate> {
    check_dim(f, p)?;
    if let Some(exact) = f.exact_hessian() {
        let m = exact(p);
        if m.order() != f.dim() {
            return Err(Error::Invalid("exact Hessian has the wrong order".into()));
        }
        return Ok(HessianEstimate {
            point: p.to_vec(),
            matrix: m,
            step: Vec::new(),
            error_scale: 0.0,
        });
    }
    let n = p.len();
    let h = steps(p, h1);
    let f0 = eval_at(f, p)?;
    let mut x = p.to_vec();
    let mut raw = vec![0.0; n * n];
    let mut error_scale = 0.0_f64;
    for i in 0..n {
        let second = |step: f64, x: &mut Vec<f64>| -> Result<f64> {
            x[i] = p[i] + step;
            let fp = eval_at(f, x)?;
            x[i] = p[i] - step;
            let fm = eval_at(f, x)?;
            x[i] = p[i];
            Ok((fp - 2.0 * f0 + fm) / (step * step))
        };
        let d1 = second(h[i], &mut x)?;
        let d2 = second(2.0 * h[i], &mut x)?;
        raw[i * n + i] = d1;
        error_scale = error_scale.max((d2 - d1).abs() / 3.0);
    }
    for i in 0..n {
        for j in 0..i {
            let corner = |si: f64, sj: f64, x: &mut Vec<f64>| -> Result<f64> {
                x[i] = p[i] + si * h[i];
                x[j] = p[j] + sj * h[j];
                let v = eval_at(f, x);
                x[i] = p[i];
                x[j] = p[j];
                v
            };
            let v = (corner(1.0, 1.0, &mut x)? - corner(1.0, -1.0, &mut x)? - corner(-1.0, 1.0, &mut x)?
                + corner(-1.0, -1.0, &mut x)?)
                / (4.0 * h[i] * h[j]);
            raw[i * n + j] = v;
            raw[j * n + i] = v;
        }
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteDerivative { point: p.to_vec() });
    }
    Ok(HessianEstimate {
        point: p.to_vec(),
        matrix: SymmetricMatrix::symmetrized(n, &raw),
        step: h,
        error_scale,
    })
}

fn check_dim(f: &ScalarField, p: &[f64]) -> Result<()> {
    if p.len() != f.dim() {
        return Err(EvalError::Dimension {
            expected: f.dim(),
            got: p.len(),
        }
        .into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(src: &str, dim: usize) -> ScalarField {
        ScalarField::from_expr(src, dim).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(field("-x1^2-x2^2", 2).eval(&[1.0, 1.0]).unwrap(), -2.0);
        assert_eq!(field("ln(abs(x1))", 1).eval(&[1.0]).unwrap(), 0.0);
        assert_eq!(field("exp(x1)", 1).eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(field("ln(x1)", 1).eval(&[0.0]).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(
            field("ln(x1)", 1).eval(&[-1.0]),
            Err(EvalError::NonReal { .. })
        ));
    }

    #[test]
    fn domain_is_open() {
        let f = field("x1", 1).with_domain(DomainBox::cube(1, 0.0, 1.0)).unwrap();
        assert!(f.eval(&[0.5]).is_ok());
        assert!(matches!(f.eval(&[1.0]), Err(EvalError::OutsideDomain { .. })));
    }

    #[test]
    fn gradient_examples() {
        let g = fd_gradient(&field("x1^2", 1), &[3.0]).unwrap();
        assert!((g[0] - 6.0).abs() <= 1e-5);
        let g = fd_gradient(&field("x1*x2", 2), &[2.0, 5.0]).unwrap();
        assert!((g[0] - 5.0).abs() < 1e-6 && (g[1] - 2.0).abs() < 1e-6);
        let g = fd_gradient(&field("exp(x1)", 1), &[0.0]).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        let g = fd_gradient(&field("7", 3), &[0.1, -2.0, 9.0]).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn hessian_examples() {
        let h = fd_hessian(&field("-x1^2", 2), &[0.0, 0.0]).unwrap().matrix;
        assert!((h.get(0, 0) + 2.0).abs() < 1e-6 && h.get(1, 1).abs() < 1e-6 && h.get(0, 1).abs() < 1e-6);
        let h = fd_hessian(&field("x1*x2", 2), &[0.0, 0.0]).unwrap().matrix;
        assert!(h.get(0, 0).abs() < 1e-6 && (h.get(0, 1) - 1.0).abs() < 1e-6);
        let f = field("x1^2+x2^2+x3^2", 3);
        for p in [[0.0, 0.0, 0.0], [0.9, -0.4, 0.3], [-1.0, 1.0, 0.5]] {
            let h = fd_hessian(&f, &p).unwrap().matrix;
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((h.get(i, j) - want).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn exact_hessian_is_used_verbatim() {
        let f = field("x1^2", 1).with_hessian(|_| SymmetricMatrix::diagonal(&[42.0]));
        assert_eq!(fd_hessian(&f, &[0.0]).unwrap().matrix.get(0, 0), 42.0);
    }

    #[test]
    fn infinite_stencil_value_is_reported() {
        let f = field("ln(abs(x1))", 1);
        assert!(matches!(fd_hessian(&f, &[0.0]), Err(Error::NonFiniteDerivative { .. })));
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"dim":2,"expr":"-x1^2","box":[[-1,1],[-1,1]],"smooth":"C2"}"#;
        let spec: FieldSpec = serde_json::from_str(json).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.smoothness(), Smoothness::C2);
        let again = f.spec().unwrap().build().unwrap();
        assert_eq!(again.eval(&[0.5, 0.0]).unwrap(), -0.25);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"dim":1,"expr":"x1","smooth":"C7"}"#).is_err());
    }
}
