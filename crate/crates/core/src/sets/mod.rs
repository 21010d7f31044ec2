//! Open sets in R^n given constructively, with membership and boundary
//! distances.

mod continuity;
mod json;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::expr::Expr;
use crate::field::{ScalarField, Smoothness};
use crate::grid::{DomainBox, GridSpec};
use crate::qconvex::{witness_search, WitnessBudget, WitnessOutcome};
use crate::sampling::{dot, gram_schmidt, norm, sphere_directions, stream};

pub use continuity::{
    continuity_principle_test, graph_complement_family, graph_family_with_offset, ContinuityVerdict, PlanarFamily,
};

const MARCH_STEPS: usize = 1024;
const BISECTIONS: usize = 60;
const DEFAULT_BRACKET: f64 = 100.0;

/// `f: R^n -> R^k` given by one expression per output in `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMap {
    pub n: usize,
    pub f: Vec<Expr>,
}

impl GraphMap {
    pub fn parse(n: usize, sources: &[&str]) -> Result<Self> {
        if n == 0 || sources.is_empty() {
            return Err(Error::Invalid(
                "graph map needs n >= 1 and at least one component".into(),
            ));
        }
        let f = sources
            .iter()
            .map(|s| crate::expr::parse_expr(s, n))
            .collect::<Result<_>>()?;
        Ok(Self { n, f })
    }

    pub fn k(&self) -> usize {
        self.f.len()
    }

    pub fn eval(&self, x: &[f64]) -> std::result::Result<Vec<f64>, EvalError> {
        self.f.iter().map(|e| e.eval(x)).collect()
    }

    fn residual(&self, p: &[f64]) -> std::result::Result<Vec<f64>, EvalError> {
        let (x, y) = p.split_at(self.n);
        Ok(self.eval(x)?.iter().zip(y).map(|(f, y)| f - y).collect())
    }
}

/// Affine `x ↦ Mx + b` with `M` stored as `k` rows of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub m: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl AffineMap {
    pub fn new(m: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let n = m.first().map_or(0, Vec::len);
        if m.is_empty() || n == 0 || m.len() != b.len() || m.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(
                "affine map needs k rows of equal length n and k offsets".into(),
            ));
        }
        Ok(Self { m, b })
    }

    pub fn n(&self) -> usize {
        self.m[0].len()
    }

    pub fn k(&self) -> usize {
        self.m.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.m.iter().zip(&self.b).map(|(row, b)| dot(row, x) + b).collect()
    }

    /// Component expressions, e.g. for building the graph complement.
    pub fn to_graph_map(&self) -> GraphMap {
        let f = self
            .m
            .iter()
            .zip(&self.b)
            .map(|(row, &b)| {
                let mut e = Expr::Const(b);
                for (j, &c) in row.iter().enumerate() {
                    let term = Expr::Binary(
                        crate::expr::BinOp::Mul,
                        Box::new(Expr::Const(c)),
                        Box::new(Expr::Var(j)),
                    );
                    e = Expr::Binary(crate::expr::BinOp::Add, Box::new(e), Box::new(term));
                }
                e
            })
            .collect();
        GraphMap { n: self.n(), f }
    }
}

/// Constructive open set. See `docs/schema.md` for the JSON form.
#[derive(Debug, Clone, PartialEq)]
pub enum OpenSetModel {
    /// `{x : <a, x> > b}`.
    HalfSpace {
        a: Vec<f64>,
        b: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{x : ‖x - c‖ > r}`.
    BallExterior {
        center: Vec<f64>,
        radius: f64,
    },
    Box(DomainBox),
    /// `{(x, y) ∈ R^{n+k} : y != f(x)}`.
    GraphComplement(GraphMap),
    /// `{z ∈ C^n : all z_j != 0, (ln|z_1|, …, ln|z_n|) ∈ V}` in `(x, y)` layout.
    ReinhardtLog(Box<OpenSetModel>),
    /// R^n with the hyperplanes `x_a = 0` removed (0-based axes).
    PuncturedAxis {
        dim: usize,
        axes: Vec<usize>,
    },
    Intersection(Vec<OpenSetModel>),
    Union(Vec<OpenSetModel>),
    /// `{x ∈ bbox : expr(x) > 0}` for an open bounding box.
    Oracle {
        dim: usize,
        expr: Expr,
        bbox: DomainBox,
    },
    Whole {
        dim: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalDistance {
    pub value: f64,
    /// No exit found within the bracket in either direction.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean,
    Max,
    P {
        p: f64,
    },
    /// `sqrt(Σ w_i v_i²)`.
    Weighted {
        weights: Vec<f64>,
    },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::P { p } if !(*p >= 1.0) => Err(Error::Invalid(format!("p-norm needs p >= 1, got {p}"))),
            NormSpec::Weighted { weights } if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) => {
                Err(Error::Invalid("norm weights must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => norm(v),
            NormSpec::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormSpec::P { p } => v.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p),
            NormSpec::Weighted { weights } => v.iter().zip(weights).map(|(x, w)| w * x * x).sum::<f64>().sqrt(),
        }
    }
}

fn axpy(x: &[f64], t: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

impl OpenSetModel {
    pub fn dim(&self) -> usize {
        match self {
            OpenSetModel::HalfSpace { a, .. } => a.len(),
            OpenSetModel::Ball { center, .. } | OpenSetModel::BallExterior { center, .. } => center.len(),
            OpenSetModel::Box(b) => b.dim(),
            OpenSetModel::GraphComplement(g) => g.n + g.k(),
            OpenSetModel::ReinhardtLog(v) => 2 * v.dim(),
            OpenSetModel::PuncturedAxis { dim, .. }
            | OpenSetModel::Oracle { dim, .. }
            | OpenSetModel::Whole { dim } => *dim,
            OpenSetModel::Intersection(parts) | OpenSetModel::Union(parts) => parts.first().map_or(0, Self::dim),
        }
    }

    /// Checks dimensions and parameters recursively.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(m.to_string()));
        match self {
            OpenSetModel::HalfSpace { a, b } => {
                if a.is_empty() || norm(a) == 0.0 || !b.is_finite() {
                    return bad("half_space needs a nonzero normal and a finite offset");
                }
            }
            OpenSetModel::Ball { center, radius } | OpenSetModel::BallExterior { center, radius } => {
                if center.is_empty() || !(*radius > 0.0 && radius.is_finite()) {
                    return bad("ball needs a center and a positive radius");
                }
            }
            OpenSetModel::Box(_) | OpenSetModel::GraphComplement(_) => {}
            OpenSetModel::ReinhardtLog(v) => v.validate()?,
            OpenSetModel::PuncturedAxis { dim, axes } => {
                if *dim == 0 || axes.is_empty() || axes.iter().any(|&a| a >= *dim) {
                    return bad("punctured_axis axes must lie in 1..=dim");
                }
            }
            OpenSetModel::Intersection(parts) | OpenSetModel::Union(parts) => {
                if parts.is_empty() {
                    return bad("intersection/union needs at least one part");
                }
                let n = parts[0].dim();
                for p in parts {
                    p.validate()?;
                    if p.dim() != n {
                        return bad("intersection/union parts must share a dimension");
                    }
                }
            }
            OpenSetModel::Oracle { dim, bbox, .. } => {
                if bbox.dim() != *dim || !bbox.is_bounded() {
                    return bad("oracle sets need a bounded bbox of matching dimension");
                }
            }
            OpenSetModel::Whole { dim } => {
                if *dim == 0 {
                    return bad("whole space needs a positive dimension");
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(EvalError::Dimension {
                expected: self.dim(),
                got: x.len(),
            }
            .into());
        }
        Ok(())
    }

    pub fn member(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        self.member_unchecked(x)
    }

    fn member_unchecked(&self, x: &[f64]) -> Result<bool> {
        Ok(match self {
            OpenSetModel::HalfSpace { a, b } => dot(a, x) > *b,
            OpenSetModel::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt() < *radius
            }
            OpenSetModel::BallExterior { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt() > *radius
            }
            OpenSetModel::Box(b) => b.contains(x),
            OpenSetModel::GraphComplement(g) => norm(&g.residual(x)?) > 0.0,
            OpenSetModel::ReinhardtLog(v) => match log_point(x) {
                Some(t) => v.member_unchecked(&t)?,
                None => false,
            },
            OpenSetModel::PuncturedAxis { axes, .. } => axes.iter().all(|&a| x[a] != 0.0),
            OpenSetModel::Intersection(parts) => {
                for p in parts {
                    if !p.member_unchecked(x)? {
                        return Ok(false);
                    }
                }
                true
            }
            OpenSetModel::Union(parts) => {
                for p in parts {
                    if p.member_unchecked(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            OpenSetModel::Oracle { expr, bbox, .. } => bbox.contains(x) && expr.eval(x)? > 0.0,
            OpenSetModel::Whole { .. } => true,
        })
    }

    /// Axis-aligned box containing the set; infinite where unknown.
    pub fn bbox(&self) -> DomainBox {
        let n = self.dim();
        match self {
            OpenSetModel::Ball { center, radius } => DomainBox {
                intervals: center.iter().map(|c| (c - radius, c + radius)).collect(),
            },
            OpenSetModel::Box(b) | OpenSetModel::Oracle { bbox: b, .. } => b.clone(),
            OpenSetModel::ReinhardtLog(v) => {
                let vb = v.bbox();
                let m = vb.dim();
                let mut intervals = vec![(f64::NEG_INFINITY, f64::INFINITY); 2 * m];
                for (j, &(_, hi)) in vb.intervals.iter().enumerate() {
                    if hi.is_finite() {
                        let r = hi.exp();
                        intervals[j] = (-r, r);
                        intervals[m + j] = (-r, r);
                    }
                }
                DomainBox { intervals }
            }
            OpenSetModel::Intersection(parts) => {
                let mut acc = DomainBox::unbounded(n);
                for p in parts {
                    match acc.intersect(&p.bbox()) {
                        Some(b) => acc = b,
                        None => return p.bbox(),
                    }
                }
                acc
            }
            OpenSetModel::Union(parts) => parts
                .iter()
                .map(Self::bbox)
                .reduce(|a, b| a.hull(&b))
                .unwrap_or_else(|| DomainBox::unbounded(n)),
            _ => DomainBox::unbounded(n),
        }
    }

    /// Some point of the set, if one is easy to name.
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let candidate = match self {
            OpenSetModel::HalfSpace { a, b } => {
                let an = norm(a);
                let s = (b + an) / (an * an);
                a.iter().map(|ai| ai * s).collect()
            }
            OpenSetModel::Ball { center, .. } => center.clone(),
            OpenSetModel::BallExterior { center, radius } => {
                let mut p = center.clone();
                p[0] += radius + 1.0;
                p
            }
            OpenSetModel::Box(b) => b.center(),
            OpenSetModel::GraphComplement(g) => {
                let x = vec![0.0; g.n];
                let mut p = x.clone();
                let fx = g.eval(&x).ok()?;
                p.extend(fx.iter().enumerate().map(|(j, v)| if j == 0 { v + 1.0 } else { *v }));
                p
            }
            OpenSetModel::ReinhardtLog(v) => {
                let t = v.interior_point()?;
                let mut p: Vec<f64> = t.iter().map(|t| t.exp()).collect();
                p.extend(std::iter::repeat_n(0.0, t.len()));
                p
            }
            OpenSetModel::PuncturedAxis { dim, .. } => vec![1.0; *dim],
            OpenSetModel::Union(parts) => return parts.iter().find_map(Self::interior_point),
            OpenSetModel::Whole { dim } => vec![0.0; *dim],
            OpenSetModel::Intersection(parts) => {
                let found = parts
                    .iter()
                    .filter_map(Self::interior_point)
                    .find(|p| self.member(p).unwrap_or(false));
                match found {
                    Some(p) => p,
                    None => self.bbox().center(),
                }
            }
            OpenSetModel::Oracle { bbox, .. } => {
                let grid = GridSpec::uniform(bbox.clone(), 9).ok()?;
                let mid = bbox.center();
                let mut pts: Vec<Vec<f64>> = grid.points().collect();
                pts.sort_by(|a, b| {
                    let da: f64 = a.iter().zip(&mid).map(|(x, m)| (x - m).powi(2)).sum();
                    let db: f64 = b.iter().zip(&mid).map(|(x, m)| (x - m).powi(2)).sum();
                    da.total_cmp(&db)
                });
                return pts.into_iter().find(|p| self.member(p).unwrap_or(false));
            }
        };
        debug_assert_eq!(candidate.len(), n);
        self.member(&candidate).ok()?.then_some(candidate)
    }

    /// True when rays are resolved in closed form rather than by marching.
    pub fn has_exact_rays(&self) -> bool {
        match self {
            OpenSetModel::HalfSpace { .. }
            | OpenSetModel::Ball { .. }
            | OpenSetModel::BallExterior { .. }
            | OpenSetModel::Box(_)
            | OpenSetModel::PuncturedAxis { .. }
            | OpenSetModel::Whole { .. } => true,
            OpenSetModel::Intersection(parts) | OpenSetModel::Union(parts) => parts.iter().all(Self::has_exact_rays),
            _ => false,
        }
    }

    /// First `t > 0` with `x + t·v` outside the set, for a member `x`.
    /// Closed-form variants report exact exits; marched variants search
    /// `[0, bracket]` and return `+inf` when nothing is found.
    pub fn ray_exit(&self, x: &[f64], v: &[f64], bracket: f64) -> Result<f64> {
        self.check_dim(x)?;
        self.ray_exit_unchecked(x, v, bracket)
    }

    fn ray_exit_unchecked(&self, x: &[f64], v: &[f64], bracket: f64) -> Result<f64> {
        Ok(match self {
            OpenSetModel::HalfSpace { a, b } => {
                let s = dot(a, v);
                if s < 0.0 {
                    ((dot(a, x) - b) / -s).max(0.0)
                } else {
                    f64::INFINITY
                }
            }
            OpenSetModel::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let vv = dot(v, v);
                let dv = dot(&d, v);
                let c = dot(&d, &d) - radius * radius;
                let disc = (dv * dv - vv * c).max(0.0);
                // Larger root of vv t² + 2 dv t + c, without cancellation.
                let t = if dv <= 0.0 {
                    (disc.sqrt() - dv) / vv
                } else {
                    c / (-dv - disc.sqrt())
                };
                t.max(0.0)
            }
            OpenSetModel::BallExterior { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let vv = dot(v, v);
                let dv = dot(&d, v);
                let c = (dot(&d, &d) - radius * radius).max(0.0);
                let disc = dv * dv - vv * c;
                if dv >= 0.0 || disc < 0.0 {
                    f64::INFINITY
                } else {
                    // Smaller root, written to avoid cancellation.
                    c / (disc.sqrt() - dv)
                }
            }
            OpenSetModel::Box(b) => x
                .iter()
                .zip(v)
                .zip(&b.intervals)
                .map(|((xi, vi), (lo, hi))| {
                    if *vi > 0.0 {
                        (hi - xi) / vi
                    } else if *vi < 0.0 {
                        (lo - xi) / vi
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            OpenSetModel::PuncturedAxis { axes, .. } => axes
                .iter()
                .map(|&a| if x[a] * v[a] < 0.0 { -x[a] / v[a] } else { f64::INFINITY })
                .fold(f64::INFINITY, f64::min),
            OpenSetModel::Whole { .. } => f64::INFINITY,
            OpenSetModel::Intersection(parts) => {
                let mut t = f64::INFINITY;
                for p in parts {
                    t = t.min(p.ray_exit_unchecked(x, v, bracket)?);
                }
                t
            }
            OpenSetModel::Union(parts) => self.union_exit(parts, x, v, bracket)?,
            OpenSetModel::GraphComplement(g) => graph_ray_exit(g, x, v, bracket)?,
            OpenSetModel::Oracle { bbox, .. } => {
                let edge = OpenSetModel::Box(bbox.clone()).ray_exit_unchecked(x, v, bracket)?;
                self.march_exit(x, v, bracket.min(edge), edge)?
            }
            OpenSetModel::ReinhardtLog(_) => self.march_exit(x, v, bracket, f64::INFINITY)?,
        })
    }

    /// Walks through the parts covering the current point, always taking
    /// the farthest exit, until the point lies in none of them.
    fn union_exit(&self, parts: &[OpenSetModel], x: &[f64], v: &[f64], bracket: f64) -> Result<f64> {
        let mut t = 0.0;
        for _ in 0..1000 {
            let p = axpy(x, t, v);
            let mut reach = f64::NEG_INFINITY;
            for part in parts {
                if part.member_unchecked(&p)? {
                    reach = reach.max(t + part.ray_exit_unchecked(&p, v, bracket)?);
                }
            }
            if reach == f64::NEG_INFINITY {
                return Ok(t);
            }
            if !reach.is_finite() {
                return Ok(f64::INFINITY);
            }
            // Step past boundaries shared by touching parts only if the next
            // point is itself covered.
            t = reach;
        }
        Ok(t)
    }

    /// Membership marching with `bracket/1024` steps, then bisection. `cap`
    /// is returned if the march reaches the bracket end at a known exit.
    fn march_exit(&self, x: &[f64], v: &[f64], bracket: f64, cap: f64) -> Result<f64> {
        if !(bracket > 0.0) {
            return Ok(cap.max(0.0));
        }
        let step = bracket / MARCH_STEPS as f64;
        let mut inside = 0.0;
        for i in 1..=MARCH_STEPS {
            let t = i as f64 * step;
            if !self.member_unchecked(&axpy(x, t, v))? {
                let mut outside = t;
                for _ in 0..BISECTIONS {
                    let mid = 0.5 * (inside + outside);
                    if self.member_unchecked(&axpy(x, mid, v))? {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                return Ok(outside);
            }
            inside = t;
        }
        Ok(if cap.is_finite() && cap <= bracket * (1.0 + 1e-12) {
            cap
        } else {
            f64::INFINITY
        })
    }

    fn default_bracket(&self) -> f64 {
        let b = self.bbox();
        if b.is_bounded() {
            (2.0 * b.diagonal()).max(1e-6)
        } else {
            DEFAULT_BRACKET
        }
    }

    fn require_member(&self, x: &[f64]) -> Result<()> {
        if !self.member(x)? {
            return Err(Error::NotMember { point: x.to_vec() });
        }
        Ok(())
    }

    /// `R_v(x, ∂ω)`: the smaller exit distance along `±v`.
    pub fn dist_directional(&self, x: &[f64], v: &[f64], bracket: f64) -> Result<DirectionalDistance> {
        self.require_member(x)?;
        let len = norm(v);
        if v.len() != x.len() || !(len > 0.0) {
            return Err(Error::Invalid(
                "direction must be a nonzero vector of the set's dimension".into(),
            ));
        }
        let u: Vec<f64> = v.iter().map(|c| c / len).collect();
        let back: Vec<f64> = u.iter().map(|c| -c).collect();
        let value = self
            .ray_exit_unchecked(x, &u, bracket)?
            .min(self.ray_exit_unchecked(x, &back, bracket)?);
        Ok(DirectionalDistance {
            value,
            exhausted: value == f64::INFINITY,
        })
    }

    /// Euclidean distance to the boundary. Closed form for primitives and
    /// intersections, least squares for graph complements, refined direction
    /// sampling otherwise.
    pub fn dist_euclid(&self, x: &[f64]) -> Result<f64> {
        self.require_member(x)?;
        self.dist_euclid_member(x)
    }

    fn dist_euclid_member(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            OpenSetModel::HalfSpace { a, b } => (dot(a, x) - b) / norm(a),
            OpenSetModel::Ball { center, radius } => {
                radius - x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt()
            }
            OpenSetModel::BallExterior { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt() - radius
            }
            OpenSetModel::Box(b) => b.margin(x),
            OpenSetModel::PuncturedAxis { axes, .. } => axes.iter().map(|&a| x[a].abs()).fold(f64::INFINITY, f64::min),
            OpenSetModel::Whole { .. } => f64::INFINITY,
            OpenSetModel::Intersection(parts) => {
                let mut d = f64::INFINITY;
                for p in parts {
                    d = d.min(p.dist_euclid_member(x)?);
                }
                d
            }
            OpenSetModel::GraphComplement(g) => graph_distance(g, x)?,
            OpenSetModel::Union(_) | OpenSetModel::Oracle { .. } | OpenSetModel::ReinhardtLog(_) => {
                self.sampled_distance(x, &NormSpec::Euclidean)?
            }
        })
    }

    /// Terms whose minimum is the Euclidean distance; two nearly equal terms
    /// mark a kink of the distance function.
    pub fn distance_terms(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.require_member(x)?;
        self.terms_member(x)
    }

    fn terms_member(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            OpenSetModel::Box(b) => x
                .iter()
                .zip(&b.intervals)
                .flat_map(|(xi, (lo, hi))| [xi - lo, hi - xi])
                .filter(|t| t.is_finite())
                .collect(),
            OpenSetModel::PuncturedAxis { axes, .. } => axes.iter().map(|&a| x[a].abs()).collect(),
            OpenSetModel::Whole { .. } => Vec::new(),
            OpenSetModel::Intersection(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.terms_member(x)?);
                }
                out
            }
            _ => vec![self.dist_euclid_member(x)?],
        })
    }

    /// `inf_v exit(v)·‖v‖` over sampled unit directions, refined by a local
    /// pattern search around the best few.
    fn sampled_distance(&self, x: &[f64], nrm: &NormSpec) -> Result<f64> {
        let n = x.len();
        let bracket = self.default_bracket();
        let count = match n {
            1 => 2,
            2 => 64,
            3 => 256,
            _ => 128 * n,
        };
        let dirs = sphere_directions(n, count, 0);
        let cost = |v: &[f64]| -> Result<f64> {
            let u: Vec<f64> = {
                let l = norm(v);
                v.iter().map(|c| c / l).collect()
            };
            Ok(self.ray_exit_unchecked(x, &u, bracket)? * nrm.eval(&u))
        };
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(dirs.len());
        for (i, v) in dirs.iter().enumerate() {
            scored.push((cost(v)?, i));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = scored[0].0;
        if n == 1 || !best.is_finite() {
            return Ok(best);
        }
        let spacing = (4.0 * std::f64::consts::PI / count as f64)
            .powf(1.0 / (n - 1) as f64)
            .min(1.0);
        for &(start, i) in scored.iter().take(3) {
            if !start.is_finite() {
                continue;
            }
            let mut v = dirs[i].clone();
            let mut val = start;
            let mut step = spacing;
            while step > 1e-9 {
                let mut basis = vec![v.clone()];
                basis.extend((0..n).map(|a| {
                    let mut e = vec![0.0; n];
                    e[a] = 1.0;
                    e
                }));
                let mut tangents = gram_schmidt(&basis);
                tangents.remove(0);
                let mut improved = false;
                for t in &tangents {
                    for s in [1.0, -1.0] {
                        let cand: Vec<f64> = v.iter().zip(t).map(|(a, b)| a + s * step * b).collect();
                        let l = norm(&cand);
                        let cand: Vec<f64> = cand.iter().map(|c| c / l).collect();
                        let c = cost(&cand)?;
                        if c < val {
                            val = c;
                            v = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best = best.min(val);
        }
        Ok(best)
    }

    /// Distance to the boundary in the norm `nrm`: the minimum over
    /// `directions` unit vectors (a deterministic spread plus seeded uniform
    /// samples) of `exit(v)·nrm(v)`. Converges from above.
    pub fn dist_norm(&self, x: &[f64], nrm: &NormSpec, directions: usize, seed: u64) -> Result<f64> {
        self.require_member(x)?;
        nrm.validate()?;
        let n = x.len();
        if let NormSpec::Weighted { weights } = nrm {
            if weights.len() != n {
                return Err(Error::Invalid("weight count differs from the dimension".into()));
            }
        }
        let bracket = self.default_bracket();
        let half = directions.div_ceil(2).max(1);
        let mut dirs = sphere_directions(n, half, seed);
        if n > 1 {
            let mut rng = stream(seed, 0xD15);
            while dirs.len() < directions {
                dirs.push(crate::sampling::random_direction(&mut rng, n));
            }
        }
        let mut best = f64::INFINITY;
        for v in &dirs {
            best = best.min(self.ray_exit_unchecked(x, v, bracket)? * nrm.eval(v));
        }
        Ok(best)
    }
}

fn log_point(p: &[f64]) -> Option<Vec<f64>> {
    let n = p.len() / 2;
    (0..n)
        .map(|j| {
            let r = p[j].hypot(p[n + j]);
            (r > 0.0).then(|| r.ln())
        })
        .collect()
}

/// First zero of the residual `f(x) - y` along the ray: sign changes of the
/// first component are bisected and accepted when the whole residual
/// vanishes there.
fn graph_ray_exit(g: &GraphMap, p: &[f64], v: &[f64], bracket: f64) -> Result<f64> {
    let res = |t: f64| g.residual(&axpy(p, t, v));
    let r0 = res(0.0)?;
    let scale = norm(&r0).max(1.0);
    let step = bracket / MARCH_STEPS as f64;
    let mut prev_t = 0.0;
    let mut prev = r0[0];
    for i in 1..=MARCH_STEPS {
        let t = i as f64 * step;
        let r = res(t)?;
        if r.iter().all(|c| *c == 0.0) {
            return Ok(t);
        }
        if r[0] == 0.0 || (r[0] > 0.0) != (prev > 0.0) {
            let (mut a, mut b) = (prev_t, t);
            let fa_pos = prev > 0.0;
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (a + b);
                let fm = res(mid)?[0];
                if fm == 0.0 {
                    b = mid;
                    break;
                }
                if (fm > 0.0) == fa_pos {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let root = b;
            if norm(&res(root)?) <= 1e-9 * scale {
                return Ok(root);
            }
        }
        prev_t = t;
        prev = r[0];
    }
    Ok(f64::INFINITY)
}

fn solve_spd(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r * n + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    Some(x)
}

/// Distance from `(x, y)` to the graph of `f` by Levenberg–Marquardt on
/// `½‖x' - x‖² + ½‖f(x') - y‖²` from several starts.
fn graph_distance(g: &GraphMap, p: &[f64]) -> Result<f64> {
    let n = g.n;
    let k = g.k();
    let (x, y) = p.split_at(n);
    let vertical = norm(&g.residual(p)?);
    let objective = |z: &[f64]| -> std::result::Result<f64, EvalError> {
        let fz = g.eval(z)?;
        let a: f64 = z.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
        let b: f64 = fz.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(a + b)
    };
    let mut starts = vec![x.to_vec()];
    for a in 0..n {
        for c in [-1.0, -0.5, 0.5, 1.0] {
            let mut s = x.to_vec();
            s[a] += c * vertical;
            starts.push(s);
        }
    }
    let mut best = vertical * vertical;
    for start in starts {
        let mut z = start;
        let Ok(mut fval) = objective(&z) else { continue };
        let mut mu = 1e-3;
        for _ in 0..200 {
            let Ok(fz) = g.eval(&z) else { break };
            // Central-difference Jacobian of f at z.
            let mut jac = vec![0.0; k * n];
            let mut ok = true;
            for j in 0..n {
                let h = 1e-6 * z[j].abs().max(1.0);
                let mut zp = z.clone();
                zp[j] += h;
                let mut zm = z.clone();
                zm[j] -= h;
                match (g.eval(&zp), g.eval(&zm)) {
                    (Ok(fp), Ok(fm)) => {
                        for i in 0..k {
                            jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
                        }
                    }
                    _ => ok = false,
                }
            }
            if !ok {
                break;
            }
            let rx: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
            let ry: Vec<f64> = fz.iter().zip(y).map(|(a, b)| a - b).collect();
            let mut grad = rx.clone();
            let mut jtj = vec![0.0; n * n];
            for a in 0..n {
                jtj[a * n + a] = 1.0;
                for i in 0..k {
                    grad[a] += jac[i * n + a] * ry[i];
                    for b in 0..n {
                        jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
                    }
                }
            }
            if norm(&grad) < 1e-15 * (1.0 + fval.sqrt()) {
                break;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let mut m = jtj.clone();
                for a in 0..n {
                    m[a * n + a] += mu;
                }
                let Some(delta) = solve_spd(m, grad.iter().map(|g| -g).collect(), n) else {
                    break;
                };
                let cand: Vec<f64> = z.iter().zip(&delta).map(|(a, d)| a + d).collect();
                if let Ok(fc) = objective(&cand) {
                    if fc <= fval {
                        let small = fval - fc <= 1e-16 * fval.max(1e-300);
                        z = cand;
                        fval = fc;
                        mu = (mu * 0.3).max(1e-12);
                        accepted = !small;
                        break;
                    }
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        best = best.min(fval);
    }
    Ok(best.max(0.0).sqrt().min(vertical))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceKind {
    Euclid,
    Directional {
        v: Vec<f64>,
        bracket: f64,
    },
    Norm {
        norm: NormSpec,
        directions: usize,
        seed: u64,
    },
}

fn not_member() -> EvalError {
    EvalError::Oracle("point is not in the set".into())
}

/// `x ↦ -ln d(x, ∂ω)`; `+inf` distance gives `-inf`. Tagged C0. The field
/// carries the Euclidean boundary distance as its clearance.
pub fn neg_log_dist_field(s: &OpenSetModel, kind: DistanceKind) -> Result<ScalarField> {
    s.validate()?;
    let n = s.dim();
    if let DistanceKind::Directional { v, .. } = &kind {
        if v.len() != n || norm(v) == 0.0 {
            return Err(Error::Invalid(
                "direction must be a nonzero vector of the set's dimension".into(),
            ));
        }
    }
    if let DistanceKind::Norm { norm, .. } = &kind {
        norm.validate()?;
    }
    let label = match &kind {
        DistanceKind::Euclid => "-ln d2".to_string(),
        DistanceKind::Directional { v, .. } => format!("-ln R_v v={v:?}"),
        DistanceKind::Norm { norm, .. } => format!("-ln d_norm {norm:?}"),
    };
    let set = s.clone();
    let dist = move |x: &[f64]| -> std::result::Result<f64, EvalError> {
        if !set.member(x).map_err(|e| EvalError::Oracle(e.to_string()))? {
            return Err(not_member());
        }
        let d = match &kind {
            DistanceKind::Euclid => set.dist_euclid_member(x),
            DistanceKind::Directional { v, bracket } => set.dist_directional(x, v, *bracket).map(|d| d.value),
            DistanceKind::Norm {
                norm: nrm,
                directions,
                seed,
            } => set.dist_norm(x, nrm, *directions, *seed),
        }
        .map_err(|e| EvalError::Oracle(e.to_string()))?;
        Ok(-d.ln())
    };
    Ok(with_set_clearance(
        ScalarField::from_fn(label, n, Smoothness::C0, dist),
        s,
    ))
}

fn with_set_clearance(f: ScalarField, s: &OpenSetModel) -> ScalarField {
    let set = s.clone();
    f.with_clearance(move |x| {
        if set.member(x).unwrap_or(false) {
            set.dist_euclid_member(x).unwrap_or(0.0)
        } else {
            0.0
        }
    })
}

/// `x ↦ -ln d₂(x, ∂ω) + ‖x‖²`.
pub fn exhaustion_field(s: &OpenSetModel) -> Result<ScalarField> {
    let base = neg_log_dist_field(s, DistanceKind::Euclid)?;
    let inner = base.clone();
    Ok(with_set_clearance(
        ScalarField::from_fn("-ln d2 + |x|^2", s.dim(), Smoothness::C0, move |x| {
            Ok(inner.eval_unchecked(x)? + dot(x, x))
        }),
        s,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelScan {
    pub level: f64,
    pub points: usize,
    pub in_sublevel: usize,
    /// Smallest boundary distance over sampled sublevel points.
    pub min_boundary_distance: f64,
    /// A sublevel point lies on the edge of the scanned box.
    pub touches_edge: bool,
    /// No sublevel point touches the box edge and all keep a positive
    /// distance to the boundary.
    pub relatively_compact: bool,
}

/// Samples `{exhaustion < level}` on `grid`.
pub fn sublevel_scan(s: &OpenSetModel, grid: &GridSpec, level: f64) -> Result<SublevelScan> {
    let field = exhaustion_field(s)?;
    let mut scan = SublevelScan {
        level,
        points: grid.len(),
        in_sublevel: 0,
        min_boundary_distance: f64::INFINITY,
        touches_edge: false,
        relatively_compact: true,
    };
    for idx in 0..grid.len() {
        let multi = grid.multi_index(idx);
        let p = grid.point_at(&multi);
        let Ok(v) = field.eval(&p) else { continue };
        if v < level {
            scan.in_sublevel += 1;
            scan.min_boundary_distance = scan.min_boundary_distance.min(s.dist_euclid(&p)?);
            if multi.iter().zip(&grid.resolution).any(|(&i, &r)| i == 0 || i + 1 == r) {
                scan.touches_edge = true;
            }
        }
    }
    scan.relatively_compact = !scan.touches_edge && scan.min_boundary_distance > 0.0;
    Ok(scan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetVerdict {
    /// No witness found at this resolution.
    Consistent,
    /// A witness refutes real q-convexity of `-ln d₂`.
    NotQConvex,
    /// `q >= n`.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCheckReport {
    pub verdict: SetVerdict,
    pub q: usize,
    pub search: WitnessOutcome,
}

/// Witness search on `-ln d₂(·, ∂ω)` over `bounds`; balls leaving the set
/// are never examined.
pub fn set_q_convex_check(
    s: &OpenSetModel,
    q: usize,
    bounds: &DomainBox,
    budget: &WitnessBudget,
    seed: u64,
) -> Result<SetCheckReport> {
    let field = neg_log_dist_field(s, DistanceKind::Euclid)?;
    let search = witness_search(&field, q, bounds, budget, seed)?;
    let verdict = if search.trivial {
        SetVerdict::Trivial
    } else if search.witness.is_some() {
        SetVerdict::NotQConvex
    } else {
        SetVerdict::Consistent
    };
    Ok(SetCheckReport { verdict, q, search })
}

/// `(x, y) ↦ -ln‖f(x) - y‖ + ‖(x, y)‖²` on the complement of the graph of
/// an affine `f`.
pub fn graph_complement_exhaustion(f: &AffineMap) -> ScalarField {
    let map = f.clone();
    let n = f.n();
    ScalarField::from_fn("-ln|f(x)-y| + |(x,y)|^2", n + f.k(), Smoothness::CInf, move |p| {
        let (x, y) = p.split_at(n);
        let r: f64 = map
            .apply(x)
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let v = -r.ln() + dot(p, p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(not_member())
        }
    })
}

/// `(x, y) ↦ max{v1(x), v2(y)}` on the product of the two domains.
pub fn product_max_field(v1: &ScalarField, v2: &ScalarField) -> ScalarField {
    let (a, b) = (v1.clone(), v2.clone());
    let n1 = v1.dim();
    let smooth = Smoothness::C0;
    let f = ScalarField::from_fn(
        format!("max({}, {})", v1.id(), v2.id()),
        n1 + v2.dim(),
        smooth,
        move |p| {
            let (x, y) = p.split_at(n1);
            Ok(a.eval(x)?.max(b.eval(y)?))
        },
    );
    let (a, b) = (v1.clone(), v2.clone());
    f.with_clearance(move |p| {
        let (x, y) = p.split_at(n1);
        a.clearance(x).min(b.clearance(y))
    })
}

/// Random point helper shared by tests.
#[doc(hidden)]
pub fn random_point_in<R: Rng>(rng: &mut R, b: &DomainBox) -> Vec<f64> {
    b.intervals.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> OpenSetModel {
        OpenSetModel::Box(DomainBox::cube(2, 0.0, 1.0))
    }

    fn ball() -> OpenSetModel {
        OpenSetModel::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        }
    }

    #[test]
    fn membership_examples() {
        assert!(unit_box().member(&[0.5, 0.5]).unwrap());
        let g = OpenSetModel::GraphComplement(GraphMap::parse(1, &["x1"]).unwrap());
        assert!(!g.member(&[1.0, 1.0]).unwrap());
        assert!(g.member(&[1.0, 1.5]).unwrap());
        let punct = OpenSetModel::PuncturedAxis { dim: 1, axes: vec![0] };
        assert!(!punct.member(&[0.0]).unwrap());
        assert!(punct.member(&[-0.1]).unwrap());
    }

    #[test]
    fn euclid_examples() {
        assert!((unit_box().dist_euclid(&[0.3, 0.5]).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(ball().dist_euclid(&[0.0, 0.0]).unwrap(), 1.0);
        let quadrant = OpenSetModel::Intersection(vec![
            OpenSetModel::HalfSpace {
                a: vec![1.0, 0.0],
                b: 0.0,
            },
            OpenSetModel::HalfSpace {
                a: vec![0.0, 1.0],
                b: 0.0,
            },
        ]);
        assert!((quadrant.dist_euclid(&[0.2, 0.7]).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(ball().dist_euclid(&[2.0, 0.0]), Err(Error::NotMember { .. })));
    }

    #[test]
    fn directional_examples() {
        let interval = OpenSetModel::Box(DomainBox::cube(1, 0.0, 1.0));
        let d = interval.dist_directional(&[0.3], &[1.0], 10.0).unwrap();
        assert!((d.value - 0.3).abs() < 1e-15);
        for k in 0..8 {
            let t = k as f64 * 0.7;
            let d = ball().dist_directional(&[0.0, 0.0], &[t.cos(), t.sin()], 10.0).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12);
        }
        let strip = OpenSetModel::PuncturedAxis { dim: 2, axes: vec![0] };
        let d = strip.dist_directional(&[0.5, 3.0], &[0.0, 1.0], 10.0).unwrap();
        assert!(d.value.is_infinite() && d.exhausted);
    }

    #[test]
    fn marched_rays_agree_with_closed_form() {
        let oracle = OpenSetModel::Oracle {
            dim: 2,
            expr: crate::expr::parse_expr("1 - x1^2 - x2^2", 2).unwrap(),
            bbox: DomainBox::cube(2, -2.0, 2.0),
        };
        for k in 0..6 {
            let t = k as f64;
            let v = [t.cos(), t.sin()];
            let a = oracle.ray_exit(&[0.2, -0.1], &v, 8.0).unwrap();
            let b = ball().ray_exit(&[0.2, -0.1], &v, 8.0).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let d = oracle.dist_euclid(&[0.2, -0.1]).unwrap();
        assert!((d - (1.0 - 0.05_f64.sqrt())).abs() < 1e-9, "{d}");
    }

    #[test]
    fn union_exit_walks_through_overlaps() {
        let u = OpenSetModel::Union(vec![
            OpenSetModel::Box(DomainBox::new(vec![(0.0, 2.0), (0.0, 1.0)]).unwrap()),
            OpenSetModel::Box(DomainBox::new(vec![(1.5, 3.0), (0.0, 1.0)]).unwrap()),
        ]);
        assert!((u.ray_exit(&[0.5, 0.5], &[1.0, 0.0], 10.0).unwrap() - 2.5).abs() < 1e-15);
        let touching = OpenSetModel::Union(vec![
            OpenSetModel::Box(DomainBox::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap()),
            OpenSetModel::Box(DomainBox::new(vec![(1.0, 2.0), (0.0, 1.0)]).unwrap()),
        ]);
        assert!((touching.ray_exit(&[0.5, 0.5], &[1.0, 0.0], 10.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn graph_distance_affine_matches_closed_form() {
        let g = OpenSetModel::GraphComplement(GraphMap::parse(1, &["x1"]).unwrap());
        let d = g.dist_euclid(&[0.0, 1.0]).unwrap();
        assert!((d - 0.5_f64.sqrt()).abs() < 1e-10);
        let para = OpenSetModel::GraphComplement(GraphMap::parse(1, &["x1^2"]).unwrap());
        let d = para.dist_euclid(&[0.0, -1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn norm_distance_examples() {
        let d = unit_box()
            .dist_norm(&[0.3, 0.5], &NormSpec::Euclidean, 4096, 0)
            .unwrap();
        assert!((d - 0.3).abs() < 1e-3);
        let d = unit_box().dist_norm(&[0.3, 0.5], &NormSpec::Max, 4096, 0).unwrap();
        assert!((d - 0.3).abs() < 1e-3);
        let d = ball().dist_norm(&[0.0, 0.0], &NormSpec::Euclidean, 64, 0).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn neg_log_examples() {
        let punct = OpenSetModel::PuncturedAxis { dim: 1, axes: vec![0] };
        let f = neg_log_dist_field(&punct, DistanceKind::Euclid).unwrap();
        assert!((f.eval(&[-0.5]).unwrap() - 2.0_f64.ln()).abs() < 1e-15);
        let f = neg_log_dist_field(&ball(), DistanceKind::Euclid).unwrap();
        assert!((f.eval(&[0.5, 0.0]).unwrap() - -(0.5_f64.ln())).abs() < 1e-15);
        let f = neg_log_dist_field(&OpenSetModel::Whole { dim: 3 }, DistanceKind::Euclid).unwrap();
        assert_eq!(f.eval(&[1.0, 2.0, 3.0]).unwrap(), f64::NEG_INFINITY);
        assert!(f.eval(&[1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn exhaustion_examples() {
        let e = exhaustion_field(&ball()).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let e = exhaustion_field(&unit_box()).unwrap();
        assert!((e.eval(&[0.5, 0.5]).unwrap() - 1.1931471805599454).abs() < 1e-12);
        let grid = GridSpec::uniform(DomainBox::cube(2, -0.99, 0.99), 21).unwrap();
        let scan = sublevel_scan(&ball(), &grid, 1.0).unwrap();
        assert!(scan.relatively_compact && scan.in_sublevel > 0);
    }

    #[test]
    fn graph_exhaustion_examples() {
        let id = AffineMap::new(vec![vec![1.0]], vec![0.0]).unwrap();
        let u = graph_complement_exhaustion(&id);
        assert!((u.eval(&[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        let zero = AffineMap::new(vec![vec![0.0], vec![0.0]], vec![0.0, 0.0]).unwrap();
        let u = graph_complement_exhaustion(&zero);
        assert!((u.eval(&[0.0, 1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let inertia = crate::qconvex::hessian_q_index(&u, &[0.0, 1.0, 0.0], 1e-7).unwrap();
        assert!(inertia.negatives <= 1);
    }

    #[test]
    fn norms() {
        let v = [3.0, -4.0];
        assert_eq!(NormSpec::Euclidean.eval(&v), 5.0);
        assert_eq!(NormSpec::Max.eval(&v), 4.0);
        assert!((NormSpec::P { p: 1.0 }.eval(&v) - 7.0).abs() < 1e-12);
        assert!(
            (NormSpec::Weighted {
                weights: vec![1.0, 0.25]
            }
            .eval(&v)
                - 13.0_f64.sqrt())
            .abs()
                < 1e-12
        );
        assert!(NormSpec::P { p: 0.5 }.validate().is_err());
    }
}
