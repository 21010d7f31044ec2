//! Real q-convexity of scalar fields: Hessian inertia, grid classification,
//! witness search, λ_u, sup-convolution and closure operations.

mod supconv;
mod witness;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::field::{fd_gradient, fd_hessian, ScalarField, Smoothness};
use crate::grid::GridSpec;
use crate::sampling::{dot, sphere_directions};
use crate::sets::OpenSetModel;
use crate::spectra::{eig_symmetric, Inertia};

pub use supconv::{
    approximate_from_above, grid_q_index, sup_convolve, sup_convolve_detailed, Approximation, KernelProfile,
    KernelSpec, SupConvolution,
};
pub use witness::{witness_search, AffineSlice, FrameKind, SliceBall, Witness, WitnessBudget, WitnessOutcome};

/// Inertia of the FD Hessian of `f` at `p`.
pub fn hessian_q_index(f: &ScalarField, p: &[f64], tol: f64) -> Result<Inertia> {
    require_c2(f)?;
    hessian_inertia(f, p, tol)
}

pub(crate) fn hessian_inertia(f: &ScalarField, p: &[f64], tol: f64) -> Result<Inertia> {
    let h = fd_hessian(f, p)?;
    let eigs = eig_symmetric(&h.matrix)?;
    Ok(Inertia::from_eigenvalues(&eigs, tol))
}

pub(crate) fn require_c2(f: &ScalarField) -> Result<()> {
    if f.smoothness().is_c2() {
        Ok(())
    } else {
        Err(Error::NotSmooth(f.id().to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    RealHessian,
    Levi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia: Option<Inertia>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Pointwise inertia over a grid; the q-index is the largest negative count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QIndexReport {
    pub field: String,
    pub kind: IndexKind,
    pub grid: GridSpec,
    pub tol: f64,
    /// `None` when no grid point could be classified.
    pub q_index: Option<usize>,
    /// Largest negative-plus-zero count, the index for strict q-convexity.
    pub strict_index: Option<usize>,
    pub points: usize,
    pub failures: usize,
    pub records: Vec<PointRecord>,
}

pub(crate) fn index_report<F>(field: &str, kind: IndexKind, grid: &GridSpec, tol: f64, at: F) -> QIndexReport
where
    F: Fn(&[f64]) -> Result<Inertia> + Sync,
{
    let records: Vec<PointRecord> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let point = grid.point(i);
            match at(&point) {
                Ok(inertia) => PointRecord {
                    point,
                    inertia: Some(inertia),
                    error: None,
                },
                Err(e) => PointRecord {
                    point,
                    inertia: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let ok = records.iter().filter_map(|r| r.inertia.as_ref());
    let q_index = ok.clone().map(|i| i.negatives).max();
    let strict_index = ok.map(Inertia::non_positive).max();
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    QIndexReport {
        field: field.to_string(),
        kind,
        grid: grid.clone(),
        tol,
        q_index,
        strict_index,
        points: records.len(),
        failures,
        records,
    }
}

/// Hessian q-index at every node of `grid`. Failed points are recorded and
/// skipped.
pub fn classify_on_grid(f: &ScalarField, grid: &GridSpec, tol: f64) -> Result<QIndexReport> {
    require_c2(f)?;
    if grid.dim() != f.dim() {
        return Err(Error::Invalid(format!(
            "grid has {} axes, field has {}",
            grid.dim(),
            f.dim()
        )));
    }
    Ok(index_report(f.id(), IndexKind::RealHessian, grid, tol, |p| {
        hessian_inertia(f, p, tol)
    }))
}

/// Proxy for `λ_u(p)`: the largest over `eps_list` and a fixed direction set
/// of `2(u(p+εh) - u(p) - ε<∇u(p), h>)/ε²`.
pub fn lambda_max_estimate(f: &ScalarField, p: &[f64], eps_list: &[f64]) -> Result<f64> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Invalid("eps_list must hold positive steps".into()));
    }
    let n = f.dim();
    let grad = fd_gradient(f, p)?;
    let u0 = f.eval(p)?;
    let count = if n == 2 { 128 } else { 64 * n };
    let dirs = sphere_directions(n, count, 0);
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0; n];
    for &eps in eps_list {
        for h in &dirs {
            for i in 0..n {
                x[i] = p[i] + eps * h[i];
            }
            let u = f.eval(&x)?;
            let q = 2.0 * (u - u0 - eps * dot(&grad, h)) / (eps * eps);
            best = best.max(q);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumViolation {
    pub point: Vec<f64>,
    pub sum_negatives: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumTheoremReport {
    pub points: usize,
    pub failures: usize,
    pub violations: Vec<SumViolation>,
    /// Largest `negatives(u1+u2) - negatives(u1) - negatives(u2)` seen.
    pub max_excess: i64,
}

/// Pointwise sum of two fields on the same space.
pub fn sum_fields(u1: &ScalarField, u2: &ScalarField) -> Result<ScalarField> {
    if u1.dim() != u2.dim() {
        return Err(Error::Invalid("summands must share a dimension".into()));
    }
    let (a, b) = (u1.clone(), u2.clone());
    let domain = match u1.domain().intersect(u2.domain()) {
        Some(d) => d,
        None => return Err(Error::Invalid("summand domains do not overlap".into())),
    };
    ScalarField::from_fn(
        format!("({})+({})", u1.id(), u2.id()),
        u1.dim(),
        u1.smoothness().min(u2.smoothness()),
        move |x| Ok(a.eval_unchecked(x)? + b.eval_unchecked(x)?),
    )
    .with_domain(domain)
}

/// Pointwise maximum of two fields; tagged C0.
pub fn max_fields(u1: &ScalarField, u2: &ScalarField) -> Result<ScalarField> {
    if u1.dim() != u2.dim() {
        return Err(Error::Invalid("fields must share a dimension".into()));
    }
    let (a, b) = (u1.clone(), u2.clone());
    let domain = u1
        .domain()
        .intersect(u2.domain())
        .ok_or_else(|| Error::Invalid("field domains do not overlap".into()))?;
    ScalarField::from_fn(
        format!("max({},{})", u1.id(), u2.id()),
        u1.dim(),
        Smoothness::C0,
        move |x| Ok(a.eval_unchecked(x)?.max(b.eval_unchecked(x)?)),
    )
    .with_domain(domain)
}

/// Checks `negatives(H_{u1+u2}) <= negatives(H_{u1}) + negatives(H_{u2})` at
/// every grid node.
pub fn check_sum_theorem(u1: &ScalarField, u2: &ScalarField, grid: &GridSpec, tol: f64) -> Result<SumTheoremReport> {
    require_c2(u1)?;
    require_c2(u2)?;
    let sum = sum_fields(u1, u2)?;
    let rows: Vec<Result<(Vec<f64>, usize, usize)>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let n1 = hessian_inertia(u1, &p, tol)?.negatives;
            let n2 = hessian_inertia(u2, &p, tol)?.negatives;
            let ns = hessian_inertia(&sum, &p, tol)?.negatives;
            Ok((p, ns, n1 + n2))
        })
        .collect();
    let mut report = SumTheoremReport {
        points: rows.len(),
        failures: 0,
        violations: Vec::new(),
        max_excess: i64::MIN,
    };
    for row in rows {
        match row {
            Ok((point, ns, bound)) => {
                report.max_excess = report.max_excess.max(ns as i64 - bound as i64);
                if ns > bound {
                    report.violations.push(SumViolation {
                        point,
                        sum_negatives: ns,
                        bound,
                    });
                }
            }
            Err(_) => report.failures += 1,
        }
    }
    Ok(report)
}

/// `φ∘u` for a strictly increasing, strictly convex `φ` on R.
///
/// `range` should cover the values of `u`; `φ` is spot-checked there with
/// chord tests and rejected if it is not strictly increasing and strictly
/// convex. A degenerate range is widened around its midpoint.
pub fn compose_increasing_convex(u: &ScalarField, phi: &ScalarField, range: (f64, f64)) -> Result<ScalarField> {
    if phi.dim() != 1 {
        return Err(Error::Invalid("phi must be a field on R".into()));
    }
    let (mut lo, mut hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Invalid(format!("bad check range [{lo}, {hi}]")));
    }
    if hi - lo < 1e-9 * lo.abs().max(1.0) {
        let w = 0.1 * lo.abs().max(1.0);
        lo -= w;
        hi += w;
    }
    const SAMPLES: usize = 33;
    let ts: Vec<f64> = (0..SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64)
        .collect();
    let vals: Vec<f64> = ts
        .iter()
        .map(|t| phi.eval(&[*t]))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Precondition(format!("phi is undefined on the check range: {e}")))?;
    let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    for w in vals.windows(3) {
        if !(w[2] - w[0] > slack) {
            return Err(Error::Precondition(
                "phi is not strictly increasing on the check range".into(),
            ));
        }
        if !(0.5 * (w[0] + w[2]) - w[1] > slack) {
            return Err(Error::Precondition(
                "phi is not strictly convex on the check range".into(),
            ));
        }
    }
    let (inner, outer) = (u.clone(), phi.clone());
    ScalarField::from_fn(
        format!("phi({})", u.id()),
        u.dim(),
        u.smoothness().min(phi.smoothness()),
        move |x| {
            let t = inner.eval_unchecked(x)?;
            outer.eval_unchecked(&[t])
        },
    )
    .with_domain(u.domain().clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueReport {
    /// Sampled points of `∂ω1 ∩ ω`.
    pub boundary_points: usize,
    /// Points where `u1` just inside `ω1` exceeded `u` on the boundary.
    pub violations: Vec<Vec<f64>>,
}

/// `ψ = max(u, u1)` on `ω1` and `u` elsewhere.
///
/// The boundary condition `limsup u1 <= u` on `∂ω1 ∩ ω` is checked on sampled
/// boundary points; violations are logged and reported, not fatal.
pub fn glue(u: &ScalarField, u1: &ScalarField, omega1: &OpenSetModel) -> Result<(ScalarField, GlueReport)> {
    if u1.dim() != u.dim() || omega1.dim() != u.dim() {
        return Err(Error::Invalid("glue inputs must share a dimension".into()));
    }
    let report = glue_boundary_check(u, u1, omega1)?;
    for v in &report.violations {
        log::warn!("glue boundary condition fails near {v:?}");
    }
    let (base, inner, set) = (u.clone(), u1.clone(), omega1.clone());
    let field = ScalarField::from_fn(
        format!("glue({},{})", u.id(), u1.id()),
        u.dim(),
        Smoothness::C0,
        move |x| {
            let v = base.eval_unchecked(x)?;
            let inside = set.member(x).map_err(|e| EvalError::Oracle(e.to_string()))?;
            if inside {
                Ok(v.max(inner.eval_unchecked(x)?))
            } else {
                Ok(v)
            }
        },
    )
    .with_domain(u.domain().clone())?;
    Ok((field, report))
}

fn glue_boundary_check(u: &ScalarField, u1: &ScalarField, omega1: &OpenSetModel) -> Result<GlueReport> {
    let n = u.dim();
    let Some(start) = omega1.interior_point() else {
        return Ok(GlueReport {
            boundary_points: 0,
            violations: Vec::new(),
        });
    };
    let bb = omega1.bbox();
    let bracket = if bb.is_bounded() {
        2.0 * bb.diagonal().max(1.0)
    } else {
        100.0
    };
    let mut report = GlueReport {
        boundary_points: 0,
        violations: Vec::new(),
    };
    for v in sphere_directions(n, 64, 0) {
        let t = omega1.ray_exit(&start, &v, bracket)?;
        if !t.is_finite() {
            continue;
        }
        let x: Vec<f64> = start.iter().zip(&v).map(|(s, d)| s + t * d).collect();
        let Ok(ub) = u.eval(&x) else {
            continue;
        };
        report.boundary_points += 1;
        let delta = 1e-6 * t.max(1.0);
        let inside: Vec<f64> = x.iter().zip(&v).map(|(a, d)| a - delta * d).collect();
        if let Ok(w) = u1.eval(&inside) {
            let slack = 1e-6 * ub.abs().max(1.0);
            if w > ub + slack {
                report.violations.push(x);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::DomainBox;

    fn field(src: &str, dim: usize) -> ScalarField {
        ScalarField::from_expr(src, dim).unwrap()
    }

    #[test]
    fn pointwise_index_examples() {
        assert_eq!(
            hessian_q_index(&field("-x1^2", 2), &[0.3, 0.7], 1e-7)
                .unwrap()
                .negatives,
            1
        );
        assert_eq!(
            hessian_q_index(&field("-x1^2-x2^2", 2), &[0.0, 0.0], 1e-7)
                .unwrap()
                .negatives,
            2
        );
        assert_eq!(
            hessian_q_index(&field("x1^2-x2^2", 2), &[0.0, 0.0], 1e-7)
                .unwrap()
                .negatives,
            1
        );
    }

    #[test]
    fn c0_fields_are_refused() {
        let f = field("abs(x1)", 1).with_smoothness(Smoothness::C0);
        assert!(matches!(hessian_q_index(&f, &[0.5], 1e-7), Err(Error::NotSmooth(_))));
    }

    #[test]
    fn grid_examples() {
        let sq = DomainBox::cube(2, -1.0, 1.0);
        let g = GridSpec::uniform(sq.clone(), 5).unwrap();
        assert_eq!(classify_on_grid(&field("-x1^2", 2), &g, 1e-7).unwrap().q_index, Some(1));
        assert_eq!(
            classify_on_grid(&field("x1^2+x2^2", 2), &g, 1e-7).unwrap().q_index,
            Some(0)
        );
        let g3 = GridSpec::uniform(DomainBox::cube(3, -1.0, 1.0), 3).unwrap();
        let r = classify_on_grid(&field("-x1^2-x2^2+10*x3^2", 3), &g3, 1e-7).unwrap();
        assert_eq!(r.q_index, Some(2));
        assert_eq!(r.points, 27);
    }

    #[test]
    fn failed_points_are_flagged() {
        let f = field("ln(x1)", 1).with_domain(DomainBox::cube(1, 0.0, 2.0)).unwrap();
        let g = GridSpec::uniform(DomainBox::cube(1, 0.0, 2.0), 5).unwrap();
        let r = classify_on_grid(&f, &g, 1e-7).unwrap();
        assert_eq!(r.failures, 2);
        assert_eq!(r.q_index, Some(1));
    }

    #[test]
    fn lambda_examples() {
        let eps = [1e-2, 1e-3];
        let l = lambda_max_estimate(&field("0.5*3*x1^2", 1), &[0.0], &eps).unwrap();
        assert!((l - 3.0).abs() < 1e-3);
        let l = lambda_max_estimate(&field("x1^2+5*x2^2", 2), &[0.0, 0.0], &eps).unwrap();
        assert!((l - 10.0).abs() < 0.2);
        let l = lambda_max_estimate(&field("2*x1-x2+3*x3", 3), &[0.1, 0.2, 0.3], &eps).unwrap();
        assert!(l.abs() < 1e-6);
    }

    #[test]
    fn sum_examples() {
        let g = GridSpec::uniform(DomainBox::cube(2, -1.0, 1.0), 4).unwrap();
        let r = check_sum_theorem(&field("-x1^2", 2), &field("-x2^2", 2), &g, 1e-7).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.max_excess, 0);
        let r = check_sum_theorem(&field("-x1^2", 2), &field("x1^2", 2), &g, 1e-7).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.max_excess, -1);
    }

    #[test]
    fn compose_examples() {
        let u = field("-x1^2", 2);
        let c = compose_increasing_convex(&u, &field("exp(x1)", 1), (-2.0, 0.0)).unwrap();
        assert_eq!(hessian_q_index(&c, &[0.0, 0.0], 1e-7).unwrap().negatives, 1);
        assert!(matches!(
            compose_increasing_convex(&u, &field("x1", 1), (-2.0, 0.0)),
            Err(Error::Precondition(_))
        ));
        let c = compose_increasing_convex(&field("0", 1), &field("-ln(1-x1)", 1), (0.0, 0.0)).unwrap();
        assert_eq!(c.eval(&[0.3]).unwrap(), 0.0);
        let minus_inf = ScalarField::from_fn("-inf", 1, Smoothness::C0, |_| Ok(f64::NEG_INFINITY));
        let c = compose_increasing_convex(&minus_inf, &field("exp(x1)", 1), (-1.0, 1.0)).unwrap();
        assert_eq!(c.eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn glue_examples() {
        let interval = OpenSetModel::Box(DomainBox::cube(1, -1.0, 1.0));
        let zero = field("0", 1);
        let (psi, report) = glue(&zero, &field("-x1^2", 1), &interval).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.boundary_points > 0);
        for x in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert_eq!(psi.eval(&[x]).unwrap(), 0.0);
        }
        let neg_inf = ScalarField::from_fn("-inf", 1, Smoothness::C0, |_| Ok(f64::NEG_INFINITY));
        let u = field("x1^3", 1);
        let (psi, _) = glue(&u, &neg_inf, &interval).unwrap();
        assert_eq!(psi.eval(&[0.5]).unwrap(), 0.125);
        let (psi, _) = glue(&u, &u, &interval).unwrap();
        assert_eq!(psi.eval(&[-0.5]).unwrap(), -0.125);
        let (_, report) = glue(&zero, &field("1", 1), &interval).unwrap();
        assert!(!report.violations.is_empty());
    }
}
