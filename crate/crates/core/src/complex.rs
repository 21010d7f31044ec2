//! Levi matrices of fields on `C^n ≅ R^{2n}`, stored as `(x_1..x_n, y_1..y_n)`,
//! together with rigid lifts, tubes and Reinhardt pullbacks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::expr::VarStyle;
use crate::field::{fd_hessian, ScalarField, Smoothness, DEFAULT_HESSIAN_STEP};
use crate::grid::{DomainBox, GridSpec};
use crate::qconvex::WitnessBudget;
use crate::qconvex::{classify_on_grid, hessian_inertia, index_report, require_c2, IndexKind, QIndexReport};
use crate::sets::{set_q_convex_check, OpenSetModel, SetCheckReport, SetVerdict};
use crate::spectra::{eig_hermitian, HermitianMatrix, Inertia, SymmetricMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LeviEstimate {
    pub point: Vec<f64>,
    pub matrix: HermitianMatrix,
    /// The real Hessian it was assembled from.
    pub real_hessian: SymmetricMatrix,
    pub step: Vec<f64>,
}

fn complex_order(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "a field on C^n needs an even real dimension, got {dim}"
        )));
    }
    Ok(dim / 2)
}

/// `H^C_kl = ¼[(H_xx + H_yy)_kl + i(H_xy - H_yx)_kl]` from a real Hessian in
/// `(x, y)` layout.
pub fn levi_from_real_hessian(h: &SymmetricMatrix) -> Result<HermitianMatrix> {
    let n = complex_order(h.order())?;
    let mut data = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let re = h.get(k, l) + h.get(n + k, n + l);
            let im = h.get(k, n + l) - h.get(n + k, l);
            data.push(Complex64::new(0.25 * re, 0.25 * im));
        }
    }
    HermitianMatrix::new(n, data)
}

pub fn levi_matrix(psi: &ScalarField, z: &[f64]) -> Result<LeviEstimate> {
    require_c2(psi)?;
    complex_order(psi.dim())?;
    let h = fd_hessian(psi, z)?;
    Ok(LeviEstimate {
        point: z.to_vec(),
        matrix: levi_from_real_hessian(&h.matrix)?,
        real_hessian: h.matrix,
        step: h.step,
    })
}

/// Inertia of a Levi matrix. The zero band scales with `max(¼, max|μ|)`,
/// matching the real band under `H^C = ¼H` for rigid fields.
pub fn levi_inertia_of(m: &HermitianMatrix, tol: f64) -> Result<Inertia> {
    let eigs = eig_hermitian(m)?;
    let scale = eigs.iter().fold(0.25_f64, |s, v| s.max(v.abs()));
    Ok(Inertia::with_scale(&eigs, scale, tol))
}

pub fn levi_inertia(psi: &ScalarField, z: &[f64], tol: f64) -> Result<Inertia> {
    levi_inertia_of(&levi_matrix(psi, z)?.matrix, tol)
}

/// Levi negatives at every node of a grid in `R^{2n}`.
pub fn qpsh_index_on_grid(psi: &ScalarField, grid: &GridSpec, tol: f64) -> Result<QIndexReport> {
    require_c2(psi)?;
    complex_order(psi.dim())?;
    if grid.dim() != psi.dim() {
        return Err(Error::Invalid(format!(
            "grid has {} axes, field has {}",
            grid.dim(),
            psi.dim()
        )));
    }
    Ok(index_report(psi.id(), IndexKind::Levi, grid, tol, |z| {
        levi_inertia(psi, z, tol)
    }))
}

/// `ψ(x, y) = u(x)` on `domain(u) × window`; the window defaults to `(-1, 1)^n`.
pub fn rigid_lift(u: &ScalarField, window: Option<&DomainBox>) -> Result<ScalarField> {
    let n = u.dim();
    let window = match window {
        Some(w) if w.dim() != n => {
            return Err(Error::Invalid(format!("window has {} axes, expected {n}", w.dim())));
        }
        Some(w) => w.clone(),
        None => DomainBox::cube(n, -1.0, 1.0),
    };
    let base = match u.expr() {
        Some((e, VarStyle::Real { .. })) => ScalarField::from_ast(e.clone(), VarStyle::Complex { n }),
        _ => {
            let inner = u.clone();
            ScalarField::from_fn("", 2 * n, u.smoothness(), move |p| inner.eval_unchecked(&p[..n]))
        }
    };
    let mut lift = base
        .with_id(format!("rigid({})", u.id()))
        .with_smoothness(u.smoothness())
        .with_domain(u.domain().product(&window))?;
    if let Some(h) = u.exact_hessian() {
        let h = h.clone();
        lift = lift.with_hessian(move |p| {
            let hu = h(&p[..n]);
            let mut data = vec![0.0; 4 * n * n];
            for i in 0..n {
                for j in 0..n {
                    data[i * 2 * n + j] = hu.get(i, j);
                }
            }
            SymmetricMatrix::symmetrized(2 * n, &data)
        });
    }
    let inner = u.clone();
    Ok(lift.with_clearance(move |p| inner.clearance(&p[..n])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMainReport {
    pub q: usize,
    pub real: QIndexReport,
    pub levi: QIndexReport,
    /// Lifted points whose Levi negatives differ from those of `H_u` below.
    pub pointwise_mismatches: usize,
    /// `max ‖Levi - ¼H_u‖_∞ / max(1, ‖H_u‖_∞)` over compared points.
    pub max_identity_error: f64,
    pub real_q_convex: bool,
    pub q_psh: bool,
    pub agree: bool,
}

/// Compares Hessian negatives of `u` on `grid` with Levi negatives of its
/// rigid lift at `(x, y)` for every grid node `x` and each `y` on an
/// `imag_steps`-point grid of the window.
pub fn check_first_main_theorem(
    u: &ScalarField,
    q: usize,
    grid: &GridSpec,
    window: Option<&DomainBox>,
    imag_steps: usize,
    tol: f64,
) -> Result<FirstMainReport> {
    require_c2(u)?;
    let n = u.dim();
    let real = classify_on_grid(u, grid, tol)?;
    let lift = rigid_lift(u, window)?;
    let win = window
        .cloned()
        .unwrap_or_else(|| DomainBox::cube(n, -1.0, 1.0))
        .shrink_fraction(0.5);
    let imag = GridSpec::uniform(win, imag_steps.max(1))?;
    let ys: Vec<Vec<f64>> = imag.points().collect();
    let lifted = GridSpec::new(
        grid.bounds.product(&imag.bounds),
        [grid.resolution.clone(), imag.resolution.clone()].concat(),
    )?;
    let levi = index_report(lift.id(), IndexKind::Levi, &lifted, tol, |z| {
        levi_inertia(&lift, z, tol)
    });

    let per_point: Vec<(usize, f64)> = real
        .records
        .par_iter()
        .map(|rec| {
            let Some(inr) = &rec.inertia else {
                return (0, 0.0);
            };
            let Ok(hu) = fd_hessian(u, &rec.point) else {
                return (0, 0.0);
            };
            let scale = hu.matrix.max_abs().max(1.0);
            let mut mismatches = 0;
            let mut worst: f64 = 0.0;
            for y in &ys {
                let z = [rec.point.clone(), y.clone()].concat();
                let Ok(l) = levi_matrix(&lift, &z) else {
                    mismatches += 1;
                    continue;
                };
                for k in 0..n {
                    for j in 0..n {
                        let d = l.matrix.get(k, j) - Complex64::new(0.25 * hu.matrix.get(k, j), 0.0);
                        worst = worst.max(d.norm() / scale);
                    }
                }
                match levi_inertia_of(&l.matrix, tol) {
                    Ok(li) if li.negatives == inr.negatives => {}
                    _ => mismatches += 1,
                }
            }
            (mismatches, worst)
        })
        .collect();
    let pointwise_mismatches = per_point.iter().map(|p| p.0).sum();
    let max_identity_error = per_point.iter().fold(0.0_f64, |m, p| m.max(p.1));
    let real_q_convex = real.q_index.is_some_and(|i| i <= q);
    let q_psh = levi.q_index.is_some_and(|i| i <= q);
    Ok(FirstMainReport {
        q,
        agree: real_q_convex == q_psh && real.q_index == levi.q_index,
        real,
        levi,
        pointwise_mismatches,
        max_identity_error,
        real_q_convex,
        q_psh,
    })
}

trait ShrinkFraction {
    fn shrink_fraction(&self, f: f64) -> DomainBox;
}

impl ShrinkFraction for DomainBox {
    /// Keeps the middle `f` of every bounded axis; unbounded axes become `[-1, 1]`.
    fn shrink_fraction(&self, f: f64) -> DomainBox {
        DomainBox {
            intervals: self
                .intervals
                .iter()
                .map(|&(lo, hi)| {
                    if lo.is_finite() && hi.is_finite() {
                        let (c, h) = (0.5 * (lo + hi), 0.5 * f * (hi - lo));
                        (c - h, c + h)
                    } else {
                        (-1.0, 1.0)
                    }
                })
                .collect(),
        }
    }
}

/// The cylinder `Ω = ω + i(-a, a)^n`; `a = +∞` gives the full tube.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    pub base: OpenSetModel,
    pub a: f64,
}

impl TubeSpec {
    pub fn new(base: OpenSetModel, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Invalid(format!("tube half-width must be positive, got {a}")));
        }
        base.validate()?;
        Ok(Self { base, a })
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn member(&self, z: &[f64]) -> Result<bool> {
        let n = self.n();
        if z.len() != 2 * n {
            return Err(EvalError::Dimension {
                expected: 2 * n,
                got: z.len(),
            }
            .into());
        }
        Ok(z[n..].iter().all(|y| y.abs() < self.a) && self.base.member(&z[..n])?)
    }

    /// Terms whose minimum is `d₂(z, ∂Ω)`: the base terms and, for finite
    /// `a`, the wall distances `a - |y_j|`.
    pub fn distance_terms(&self, z: &[f64]) -> Result<Vec<f64>> {
        if !self.member(z)? {
            return Err(Error::NotMember { point: z.to_vec() });
        }
        let n = self.n();
        let mut terms = self.base.distance_terms(&z[..n])?;
        if self.a.is_finite() {
            terms.extend(z[n..].iter().map(|y| self.a - y.abs()));
        }
        Ok(terms)
    }

    pub fn distance(&self, z: &[f64]) -> Result<f64> {
        Ok(self.distance_terms(z)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// `z ↦ -ln d₂(z, ∂Ω)`, tagged C0.
    pub fn neg_log_dist(&self) -> ScalarField {
        let t = self.clone();
        let f = ScalarField::from_fn(
            format!("-ln d2 tube a={}", self.a),
            2 * self.n(),
            Smoothness::C0,
            move |z| {
                let d = t.distance(z).map_err(|e| EvalError::Oracle(e.to_string()))?;
                Ok(-d.ln())
            },
        );
        let t = self.clone();
        f.with_clearance(move |z| t.distance(z).unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeReport {
    pub q: usize,
    pub a: f64,
    pub points: usize,
    pub non_members: usize,
    /// Nodes where two distance terms tie within the stencil reach.
    pub skipped_kinks: usize,
    /// Nodes too close to `∂Ω` for the difference stencil.
    pub skipped_edge: usize,
    pub failures: usize,
    pub levi_index: Option<usize>,
    /// Node of largest Levi negative count.
    pub worst_point: Option<Vec<f64>>,
    pub q_pseudoconvex: bool,
    pub set_check: SetCheckReport,
    pub base_q_convex: bool,
    pub agree: bool,
}

enum TubeNode {
    Outside,
    Kink,
    Edge,
    Failed,
    Levi(usize),
}

/// Levi criterion for `-ln d₂(·, ∂Ω)` at the nodes of `grid` (in `R^{2n}`)
/// where the nearest boundary piece is unique, cross-checked with a witness
/// search on the base set at the same `q`.
pub fn tube_pseudoconvexity_check(
    t: &TubeSpec,
    q: usize,
    grid: &GridSpec,
    tol: f64,
    base_box: &DomainBox,
    budget: &WitnessBudget,
    seed: u64,
) -> Result<TubeReport> {
    let n = t.n();
    if grid.dim() != 2 * n || base_box.dim() != n {
        return Err(Error::Invalid(
            "tube grid must live in R^{2n} and the base box in R^n".into(),
        ));
    }
    let nodes: Vec<(Vec<f64>, TubeNode)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.point(i);
            let node = tube_node(t, &z, tol);
            (z, node)
        })
        .collect();
    let mut report_nodes = (0, 0, 0, 0);
    let mut levi_index: Option<usize> = None;
    let mut worst_point = None;
    for (z, node) in nodes {
        match node {
            TubeNode::Outside => report_nodes.0 += 1,
            TubeNode::Kink => report_nodes.1 += 1,
            TubeNode::Edge => report_nodes.2 += 1,
            TubeNode::Failed => report_nodes.3 += 1,
            TubeNode::Levi(neg) => {
                if levi_index.is_none_or(|m| neg > m) {
                    levi_index = Some(neg);
                    worst_point = Some(z);
                }
            }
        }
    }
    let set_check = set_q_convex_check(&t.base, q, base_box, budget, seed)?;
    let q_pseudoconvex = levi_index.is_none_or(|i| i <= q);
    let base_q_convex = set_check.verdict != SetVerdict::NotQConvex;
    Ok(TubeReport {
        q,
        a: t.a,
        points: grid.len(),
        non_members: report_nodes.0,
        skipped_kinks: report_nodes.1,
        skipped_edge: report_nodes.2,
        failures: report_nodes.3,
        levi_index,
        worst_point,
        q_pseudoconvex,
        base_q_convex,
        agree: q_pseudoconvex == base_q_convex,
        set_check,
    })
}

fn tube_node(t: &TubeSpec, z: &[f64], tol: f64) -> TubeNode {
    match t.member(z) {
        Ok(true) => {}
        Ok(false) => return TubeNode::Outside,
        Err(_) => return TubeNode::Failed,
    }
    let Ok(mut terms) = t.distance_terms(z) else {
        return TubeNode::Failed;
    };
    terms.sort_by(f64::total_cmp);
    let h = DEFAULT_HESSIAN_STEP * z.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let reach = 2.0 * h * (z.len() as f64).sqrt();
    let Some(&d) = terms.first() else {
        // Empty boundary: the field is constant -inf.
        return TubeNode::Levi(0);
    };
    if !d.is_finite() {
        return TubeNode::Levi(0);
    }
    if d <= 2.0 * reach {
        return TubeNode::Edge;
    }
    if terms.len() > 1 && terms[1] - d <= 2.0 * reach {
        return TubeNode::Kink;
    }
    let local = t.neg_log_dist().with_smoothness(Smoothness::C2);
    match levi_inertia(&local, z, tol) {
        Ok(i) => TubeNode::Levi(i.negatives),
        Err(_) => TubeNode::Failed,
    }
}

/// `ψ(z) = u(ln|z_1|, …, ln|z_n|)`, defined where every `z_j != 0`.
pub fn reinhardt_pullback(u: &ScalarField) -> ScalarField {
    let n = u.dim();
    let inner = u.clone();
    let f = ScalarField::from_fn(format!("reinhardt({})", u.id()), 2 * n, u.smoothness(), move |p| {
        let t = log_moduli(p)?;
        inner.eval(&t)
    });
    let inner = u.clone();
    f.with_clearance(move |p| {
        let Ok(t) = log_moduli(p) else { return 0.0 };
        let m = inner.clearance(&t) / (n as f64).sqrt();
        (0..n)
            .map(|j| p[j].hypot(p[n + j]) * (1.0 - (-m).exp()))
            .fold(f64::INFINITY, f64::min)
    })
}

fn log_moduli(p: &[f64]) -> std::result::Result<Vec<f64>, EvalError> {
    let n = p.len() / 2;
    (0..n)
        .map(|j| {
            let r = p[j].hypot(p[n + j]);
            if r > 0.0 {
                Ok(r.ln())
            } else {
                Err(EvalError::OutsideDomain { point: p.to_vec() })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReinhardtReport {
    pub points: usize,
    pub compared: usize,
    pub agreeing: usize,
    pub fraction: f64,
    /// Nodes off the pullback's domain: a vanishing coordinate, a log-point
    /// outside the domain of `u`, or too close to either for the stencil.
    pub skipped: usize,
    pub skipped_points: Vec<Vec<f64>>,
    pub failures: usize,
    pub real_index: Option<usize>,
    pub levi_index: Option<usize>,
}

/// Compares Levi negatives of the pullback at the nodes of `grid` (in
/// `R^{2n}`) with Hessian negatives of `u` at the log-point.
pub fn check_reinhardt(u: &ScalarField, grid: &GridSpec, tol: f64) -> Result<ReinhardtReport> {
    require_c2(u)?;
    let n = u.dim();
    if grid.dim() != 2 * n {
        return Err(Error::Invalid("grid must live in R^{2n}".into()));
    }
    let psi = reinhardt_pullback(u);
    let rows: Vec<(Vec<f64>, Option<(usize, usize)>, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let z = grid.point(i);
            let h = 2.0 * DEFAULT_HESSIAN_STEP * z.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            let reach = h * (2.0 * n as f64).sqrt();
            if psi.clearance(&z) <= 2.0 * reach {
                return (z, None, false);
            }
            let Ok(t) = log_moduli(&z) else {
                return (z, None, false);
            };
            match (hessian_inertia(u, &t, tol), levi_inertia(&psi, &z, tol)) {
                (Ok(a), Ok(b)) => (z, Some((a.negatives, b.negatives)), false),
                _ => (z, None, true),
            }
        })
        .collect();
    let mut report = ReinhardtReport {
        points: grid.len(),
        compared: 0,
        agreeing: 0,
        fraction: 0.0,
        skipped: 0,
        skipped_points: Vec::new(),
        failures: 0,
        real_index: None,
        levi_index: None,
    };
    for (z, pair, failed) in rows {
        match pair {
            Some((a, b)) => {
                report.compared += 1;
                report.agreeing += usize::from(a == b);
                report.real_index = Some(report.real_index.map_or(a, |m| m.max(a)));
                report.levi_index = Some(report.levi_index.map_or(b, |m| m.max(b)));
            }
            None if failed => report.failures += 1,
            None => {
                report.skipped += 1;
                report.skipped_points.push(z);
            }
        }
    }
    report.fraction = if report.compared > 0 {
        report.agreeing as f64 / report.compared as f64
    } else {
        0.0
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfield(src: &str, n: usize) -> ScalarField {
        ScalarField::from_complex_expr(src, n).unwrap()
    }

    fn close(a: Complex64, re: f64) -> bool {
        (a.re - re).abs() < 1e-6 && a.im.abs() < 1e-6
    }

    #[test]
    fn levi_examples() {
        let z = [0.3, -0.2];
        assert!(close(
            levi_matrix(&cfield("x1^2-y1^2", 1), &z).unwrap().matrix.get(0, 0),
            0.0
        ));
        assert!(close(
            levi_matrix(&cfield("x1^2+y1^2", 1), &z).unwrap().matrix.get(0, 0),
            1.0
        ));
        assert!(close(
            levi_matrix(&cfield("-x1^2", 1), &z).unwrap().matrix.get(0, 0),
            -0.5
        ));
    }

    #[test]
    fn levi_off_diagonal_is_hermitian() {
        // Re(z1 * conj(z2)) = x1 x2 + y1 y2 has Levi [[0, ½], [½, 0]].
        let l = levi_matrix(&cfield("x1*x2+y1*y2", 2), &[0.1, 0.2, 0.3, 0.4])
            .unwrap()
            .matrix;
        assert!(close(l.get(0, 1), 0.5) && close(l.get(1, 0), 0.5));
        // Im(z1 * conj(z2)) = y1 x2 - x1 y2 has Levi [[0, -i/2], [i/2, 0]].
        let l = levi_matrix(&cfield("y1*x2-x1*y2", 2), &[0.1, 0.2, 0.3, 0.4])
            .unwrap()
            .matrix;
        assert!((l.get(0, 1) - Complex64::new(0.0, -0.5)).norm() < 1e-6);
        assert_eq!(l.get(1, 0), l.get(0, 1).conj());
    }

    #[test]
    fn grid_examples() {
        let g2 = GridSpec::uniform(DomainBox::cube(4, -1.0, 1.0), 3).unwrap();
        let r = qpsh_index_on_grid(&cfield("x1^2+y1^2-x2^2-y2^2", 2), &g2, 1e-7).unwrap();
        assert_eq!(r.q_index, Some(1));
        let g1 = GridSpec::uniform(DomainBox::cube(2, -1.0, 1.0), 5).unwrap();
        let r = qpsh_index_on_grid(&cfield("x1^3-3*x1*y1^2", 1), &g1, 1e-7).unwrap();
        assert_eq!((r.q_index, r.strict_index), (Some(0), Some(1)));
        let g3 = GridSpec::uniform(DomainBox::cube(6, -1.0, 1.0), 2).unwrap();
        let r = qpsh_index_on_grid(&cfield("-x1^2-y1^2-x2^2-y2^2-x3^2-y3^2", 3), &g3, 1e-7).unwrap();
        assert_eq!(r.q_index, Some(3));
    }

    #[test]
    fn rigid_lift_examples() {
        let u = ScalarField::from_expr("-x1^2", 2).unwrap();
        let lift = rigid_lift(&u, None).unwrap();
        let l = levi_matrix(&lift, &[0.2, 0.1, 0.5, -0.5]).unwrap().matrix;
        assert!(close(l.get(0, 0), -0.5) && close(l.get(1, 1), 0.0) && close(l.get(0, 1), 0.0));
        let q = ScalarField::from_expr("2*x1^2 + 2*x1*x2 + 3*x2^2", 2).unwrap();
        let l = levi_matrix(&rigid_lift(&q, None).unwrap(), &[0.0; 4]).unwrap().matrix;
        // A = [[2, 1], [1, 3]] gives A/2.
        assert!(close(l.get(0, 0), 1.0) && close(l.get(0, 1), 0.5) && close(l.get(1, 1), 1.5));
        assert_eq!(lift.eval(&[0.3, 0.0, 0.9, -0.9]).unwrap(), u.eval(&[0.3, 0.0]).unwrap());
        assert!(lift.eval(&[0.3, 0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn first_main_examples() {
        let grid = GridSpec::uniform(DomainBox::cube(2, -1.0, 1.0), 5).unwrap();
        for (src, want) in [("-x1^2", 1), ("x1^2+x2^2", 0), ("-x1^2-x2^2", 2)] {
            let u = ScalarField::from_expr(src, 2).unwrap();
            let r = check_first_main_theorem(&u, 1, &grid, None, 2, 1e-7).unwrap();
            assert_eq!(r.real.q_index, Some(want), "{src}");
            assert_eq!(r.levi.q_index, Some(want), "{src}");
            assert_eq!(r.pointwise_mismatches, 0);
            assert!(r.max_identity_error < 1e-4 && r.agree);
        }
    }

    fn quick_budget() -> WitnessBudget {
        WitnessBudget {
            slices: 8,
            boundary_samples: 32,
            interior_samples: 32,
            ..WitnessBudget::default()
        }
    }

    #[test]
    fn tube_examples() {
        let interval = OpenSetModel::Box(DomainBox::cube(1, 0.0, 1.0));
        let t = TubeSpec::new(interval, f64::INFINITY).unwrap();
        let grid = GridSpec::uniform(DomainBox::new(vec![(0.05, 0.95), (-2.0, 2.0)]).unwrap(), 9).unwrap();
        let r =
            tube_pseudoconvexity_check(&t, 0, &grid, 1e-7, &DomainBox::cube(1, 0.0, 1.0), &quick_budget(), 0).unwrap();
        assert!(r.q_pseudoconvex && r.base_q_convex && r.agree);
        assert!(r.skipped_kinks > 0);

        let ext = OpenSetModel::BallExterior {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let t = TubeSpec::new(ext, 1.0).unwrap();
        let grid = GridSpec::uniform(
            DomainBox::new(vec![(1.2, 2.0), (-0.4, 0.4), (-0.3, 0.3), (-0.3, 0.3)]).unwrap(),
            3,
        )
        .unwrap();
        let r =
            tube_pseudoconvexity_check(&t, 0, &grid, 1e-7, &DomainBox::cube(2, -3.0, 3.0), &quick_budget(), 0).unwrap();
        assert_eq!(r.levi_index, Some(1));
        assert!(!r.q_pseudoconvex && !r.base_q_convex && r.agree);
    }

    #[test]
    fn tube_distance_decomposes() {
        let t = TubeSpec::new(OpenSetModel::Box(DomainBox::cube(1, 0.0, 1.0)), 1.0).unwrap();
        assert!((t.distance(&[0.4, 0.9]).unwrap() - 0.1).abs() < 1e-15);
        assert!((t.distance(&[0.2, 0.0]).unwrap() - 0.2).abs() < 1e-15);
        assert!(!t.member(&[0.5, 1.0]).unwrap());
    }

    #[test]
    fn reinhardt_examples() {
        let u = ScalarField::from_expr("x1", 1).unwrap();
        let psi = reinhardt_pullback(&u);
        let l = levi_matrix(&psi, &[0.6, 0.7]).unwrap().matrix;
        assert!(l.get(0, 0).norm() < 1e-6);
        assert_eq!(psi.eval(&[0.6, 0.8]).unwrap(), psi.eval(&[1.0, 0.0]).unwrap());
        assert!(psi.eval(&[0.0, 0.0]).is_err());

        let grid = GridSpec::uniform(DomainBox::cube(2, -2.0, 2.0), 9).unwrap();
        for (src, want) in [("x1^2", 0), ("-x1^2", 1)] {
            let u = ScalarField::from_expr(src, 1)
                .unwrap()
                .with_domain(DomainBox::cube(1, -1.0, 1.0))
                .unwrap();
            let r = check_reinhardt(&u, &grid, 1e-7).unwrap();
            assert!(r.compared > 10 && r.fraction == 1.0, "{src}: {r:?}");
            assert_eq!(r.levi_index, Some(want));
            assert!(r.skipped > 0);
        }
    }
}
