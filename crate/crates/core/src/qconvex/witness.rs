//! Maximum-principle witness search.
//!
//! For each candidate (q+1)-dimensional slice ball the search fits the
//! minimal affine upper envelope of `u` on sampled boundary points and looks
//! for an interior sample where `u` rises above it. A witness refutes real
//! q-convexity; finding none proves nothing.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fd_hessian, ScalarField};
use crate::grid::DomainBox;
use crate::lp::{fit_affine_upper_envelope, AffineFunctional};
use crate::sampling::{self, combinations, dot, gram_schmidt, norm, random_frame, stream};
use crate::spectra::eig_symmetric_vectors;

const REFINE_ROUNDS: usize = 40;
const REFINE_RTOL: f64 = 1e-12;
const CHUNK: usize = 32;

/// `base + Σ s_j basis_j` for slice coordinates `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSlice {
    pub base: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AffineSlice {
    /// Fails unless the basis is orthonormal to 1e-12 and `1 <= k <= n`.
    pub fn new(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        let k = basis.len();
        if k == 0 || k > n || basis.iter().any(|b| b.len() != n) {
            return Err(Error::Invalid(format!(
                "slice basis must have 1..={n} vectors of length {n}"
            )));
        }
        for i in 0..k {
            for j in 0..=i {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(&basis[i], &basis[j]) - want).abs() > 1e-12 {
                    return Err(Error::Invalid("slice basis is not orthonormal".into()));
                }
            }
        }
        Ok(Self { base, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn to_ambient(&self, s: &[f64]) -> Vec<f64> {
        let mut x = self.base.clone();
        for (c, b) in s.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceBall {
    pub slice: AffineSlice,
    /// Center in slice coordinates.
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Axis,
    Guided,
    Random,
}

/// A slice ball, an affine `l` on it with `u <= l` at every boundary sample
/// used, and an interior point where `u - l` exceeds the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub ball: SliceBall,
    pub frame: FrameKind,
    /// `l` in slice coordinates.
    pub functional: AffineFunctional,
    /// Offending point in slice coordinates.
    pub point: Vec<f64>,
    pub ambient_point: Vec<f64>,
    pub u_value: f64,
    pub l_value: f64,
    /// `u - l` at the offending point.
    pub margin: f64,
    pub threshold: f64,
    pub boundary_constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessBudget {
    /// Frames per level: all axis-aligned frames, then random frames up to
    /// this total.
    pub slices: usize,
    pub boundary_samples: usize,
    pub interior_samples: usize,
    pub centers_per_axis: usize,
    pub radii: usize,
    /// Relative violation threshold.
    pub tol: f64,
    /// Adds frames spanned by the most negative Hessian eigenvectors at each
    /// center (C2 fields only).
    pub guided: bool,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        Self {
            slices: 64,
            boundary_samples: 128,
            interior_samples: 256,
            centers_per_axis: 3,
            radii: 4,
            tol: 1e-7,
            guided: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessOutcome {
    pub witness: Option<Witness>,
    /// `q >= n`: the property holds by convention and nothing was searched.
    pub trivial: bool,
    pub balls_examined: usize,
    pub balls_skipped: usize,
    pub seed: u64,
}

struct WorkItem {
    center: Vec<f64>,
    frame: Vec<Vec<f64>>,
    kind: FrameKind,
    radius: f64,
    index: u64,
}

enum ItemResult {
    Clean,
    Skipped,
    Found(Box<Witness>),
}

fn centers(bounds: &DomainBox, per_axis: usize) -> Vec<Vec<f64>> {
    let n = bounds.dim();
    let c = per_axis.max(1);
    let total = c.pow(n as u32);
    let mid = bounds.center();
    let mut out: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; n];
            for axis in (0..n).rev() {
                let j = flat % c;
                flat /= c;
                let (lo, hi) = bounds.intervals[axis];
                p[axis] = lo + (hi - lo) * (j + 1) as f64 / (c + 1) as f64;
            }
            p
        })
        .collect();
    out.sort_by(|a, b| {
        let da: f64 = a.iter().zip(&mid).map(|(x, m)| (x - m).powi(2)).sum();
        let db: f64 = b.iter().zip(&mid).map(|(x, m)| (x - m).powi(2)).sum();
        da.total_cmp(&db)
    });
    out
}

fn radii(bounds: &DomainBox, count: usize) -> Vec<f64> {
    let s = 0.5 * bounds.min_width();
    let count = count.max(1);
    if count == 1 {
        return vec![0.99 * s];
    }
    let (hi, lo) = (0.99 * s, 0.01 * s);
    (0..count)
        .map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn axis_frame(n: usize, axes: &[usize]) -> Vec<Vec<f64>> {
    axes.iter()
        .map(|&a| {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            e
        })
        .collect()
}

/// Frame spanned by eigenvectors of the `k` most negative Hessian
/// eigenvalues at `p`, when at least `k` are negative.
fn guided_frame(f: &ScalarField, p: &[f64], k: usize) -> Option<Vec<Vec<f64>>> {
    let h = fd_hessian(f, p).ok()?;
    let d = eig_symmetric_vectors(&h.matrix).ok()?;
    if d.values.len() < k || d.values[k - 1] >= 0.0 {
        return None;
    }
    let frame = gram_schmidt(&d.vectors[..k]);
    (frame.len() == k).then_some(frame)
}

/// Deterministic boundary points of the radius-`r` sphere in R^k: axis
/// crossings, sign patterns (k >= 2), then seeded uniform samples.
fn boundary_points<R: Rng>(k: usize, r: f64, budget: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(budget.max(2 * k + (1 << k.min(16))));
    for j in 0..k {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; k];
            e[j] = s * r;
            pts.push(e);
        }
    }
    if (2..=16).contains(&k) {
        let c = r / (k as f64).sqrt();
        for mask in 0..(1usize << k) {
            pts.push((0..k).map(|j| if mask >> j & 1 == 1 { -c } else { c }).collect());
        }
    }
    while pts.len() < budget {
        pts.push(sampling::random_direction(rng, k).into_iter().map(|x| x * r).collect());
    }
    pts
}

fn interior_points<R: Rng>(k: usize, r: f64, budget: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; k]];
    for j in 0..k {
        for s in [0.5, -0.5] {
            let mut e = vec![0.0; k];
            e[j] = s * r;
            pts.push(e);
        }
    }
    while pts.len() < budget {
        pts.push(
            sampling::random_in_ball(rng, k)
                .into_iter()
                .map(|x| x * r * 0.999)
                .collect(),
        );
    }
    pts
}

/// Dense check set on the radius-`r` sphere used to validate an envelope.
fn check_points<R: Rng>(k: usize, r: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let dirs = match k {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => sampling::circle(720),
        3 => sampling::fibonacci_sphere(2000),
        _ => (0..2000).map(|_| sampling::random_direction(rng, k)).collect(),
    };
    dirs.into_iter()
        .map(|d| d.into_iter().map(|x| x * r).collect())
        .collect()
}

struct Ball<'a> {
    f: &'a ScalarField,
    slice: AffineSlice,
    radius: f64,
}

impl Ball<'_> {
    fn value(&self, s: &[f64]) -> Option<f64> {
        self.f.eval(&self.slice.to_ambient(s)).ok()
    }

    /// Local maximization of `u - l` on the sphere by pattern search from `s`.
    fn climb(&self, l: &AffineFunctional, start: &[f64], step0: f64) -> Option<(Vec<f64>, f64)> {
        let k = start.len();
        let r = self.radius;
        let gap = |s: &[f64]| self.value(s).map(|u| u - l.eval(s));
        let mut s = start.to_vec();
        let mut best = gap(&s)?;
        let mut step = step0 * r;
        let mut iters = 0;
        while step > 1e-10 * r && iters < 200 {
            iters += 1;
            let mut improved = false;
            let tangents = {
                let mut vecs = vec![s.iter().map(|x| x / r).collect::<Vec<f64>>()];
                vecs.extend(axis_frame(k, &(0..k).collect::<Vec<_>>()));
                let mut t = gram_schmidt(&vecs);
                t.remove(0);
                t
            };
            for t in &tangents {
                for sign in [1.0, -1.0] {
                    let mut cand: Vec<f64> = s.iter().zip(t).map(|(a, b)| a + sign * step * b).collect();
                    let c = norm(&cand);
                    for x in &mut cand {
                        *x *= r / c;
                    }
                    if let Some(v) = gap(&cand) {
                        if v > best {
                            best = v;
                            s = cand;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Some((s, best))
    }
}

fn examine(f: &ScalarField, item: &WorkItem, budget: &WitnessBudget, seed: u64) -> ItemResult {
    let k = item.frame.len();
    let slice = AffineSlice {
        base: item.center.clone(),
        basis: item.frame.clone(),
    };
    let ball = Ball {
        f,
        slice,
        radius: item.radius,
    };
    let mut rng = stream(seed, item.index);
    let r = item.radius;

    let mut constraints: Vec<(Vec<f64>, f64)> = Vec::with_capacity(budget.boundary_samples);
    let mut scale = 1.0_f64;
    for s in boundary_points(k, r, budget.boundary_samples, &mut rng) {
        let Some(u) = ball.value(&s) else {
            return ItemResult::Skipped;
        };
        if u > f64::NEG_INFINITY {
            scale = scale.max(u.abs());
            constraints.push((s, u));
        }
    }
    let origin = vec![0.0; k];
    let Ok(mut l) = fit_affine_upper_envelope(&constraints, &origin) else {
        return ItemResult::Skipped;
    };
    let threshold = budget.tol * scale;

    let interior: Vec<(Vec<f64>, f64)> = interior_points(k, r, budget.interior_samples, &mut rng)
        .into_iter()
        .filter_map(|s| {
            let u = ball.value(&s)?;
            (u > f64::NEG_INFINITY).then_some((s, u))
        })
        .collect();
    let worst = |l: &AffineFunctional| {
        interior
            .iter()
            .map(|(s, u)| (s, u - l.eval(s)))
            .fold(None, |acc: Option<(&Vec<f64>, f64)>, (s, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((s, g)),
            })
    };
    match worst(&l) {
        Some((_, g)) if g > threshold => {}
        _ => return ItemResult::Clean,
    }

    if k >= 2 {
        // Sampling gaps on the sphere can leave the envelope too low; tighten
        // it against a dense check set and local maxima of u - l.
        let checks: Vec<(Vec<f64>, f64)> = check_points(k, r, &mut rng)
            .into_iter()
            .filter_map(|s| {
                let u = ball.value(&s)?;
                (u > f64::NEG_INFINITY).then_some((s, u))
            })
            .collect();
        let spacing = match k {
            2 => std::f64::consts::TAU / 720.0,
            _ => 0.1,
        };
        let tight = REFINE_RTOL * scale;
        let mut converged = false;
        for _ in 0..REFINE_ROUNDS {
            let mut gaps: Vec<(usize, f64)> = checks
                .iter()
                .enumerate()
                .map(|(i, (s, u))| (i, u - l.eval(s)))
                .collect();
            gaps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut sphere_gap = gaps.first().map_or(0.0, |g| g.1).max(0.0);
            let mut added = 0;
            for &(i, g) in gaps.iter().take(8) {
                if g > tight {
                    constraints.push(checks[i].clone());
                    added += 1;
                }
            }
            for &(i, _) in gaps.iter().take(4) {
                if let Some((s, g)) = ball.climb(&l, &checks[i].0, spacing) {
                    sphere_gap = sphere_gap.max(g);
                    if g > tight {
                        if let Some(u) = ball.value(&s) {
                            constraints.push((s, u));
                            added += 1;
                        }
                    }
                }
            }
            let interior_gap = worst(&l).map_or(f64::NEG_INFINITY, |(_, g)| g);
            if interior_gap <= threshold {
                return ItemResult::Clean;
            }
            // Lifting l by the largest sphere gap found keeps it above u on
            // the sphere; a violation that survives the lift is decided.
            if added == 0 || interior_gap - sphere_gap > threshold {
                l.offset += sphere_gap;
                converged = true;
                break;
            }
            match fit_affine_upper_envelope(&constraints, &origin) {
                Ok(next) => l = next,
                Err(_) => return ItemResult::Skipped,
            }
        }
        if !converged {
            return ItemResult::Skipped;
        }
    }

    let Some((s, g)) = worst(&l) else {
        return ItemResult::Clean;
    };
    if g <= threshold {
        return ItemResult::Clean;
    }
    let s = s.clone();
    let u_value = g + l.eval(&s);
    ItemResult::Found(Box::new(Witness {
        ambient_point: ball.slice.to_ambient(&s),
        l_value: l.eval(&s),
        u_value,
        margin: g,
        threshold,
        boundary_constraints: constraints.len(),
        point: s,
        functional: l,
        frame: item.kind,
        ball: SliceBall {
            slice: ball.slice,
            center: origin,
            radius: r,
        },
    }))
}

/// Searches `bounds` for a slice ball on which `f` violates the local
/// maximum property at level `q`. The result depends only on the inputs and
/// `seed`, never on thread count.
pub fn witness_search(
    f: &ScalarField,
    q: usize,
    bounds: &DomainBox,
    budget: &WitnessBudget,
    seed: u64,
) -> Result<WitnessOutcome> {
    let n = f.dim();
    if bounds.dim() != n {
        return Err(Error::Invalid(format!(
            "search box has {} axes, field has {n}",
            bounds.dim()
        )));
    }
    if !bounds.is_bounded() {
        return Err(Error::Invalid("search box must be bounded".into()));
    }
    if q >= n {
        return Ok(WitnessOutcome {
            witness: None,
            trivial: true,
            balls_examined: 0,
            balls_skipped: 0,
            seed,
        });
    }
    let k = q + 1;
    let centers = centers(bounds, budget.centers_per_axis);
    let radii = radii(bounds, budget.radii);
    let fits = |c: &[f64], r: f64| r <= bounds.margin(c) && r < f.clearance(c) * (1.0 - 1e-9);

    let axis: Vec<Vec<Vec<f64>>> = combinations(n, k).iter().map(|a| axis_frame(n, a)).collect();
    let random_count = budget.slices.saturating_sub(axis.len());
    let random: Vec<Vec<Vec<f64>>> = (0..random_count)
        .map(|i| random_frame(&mut stream(seed, 0xF0F0_0000 + i as u64), n, k))
        .collect();
    let guided: Vec<Option<Vec<Vec<f64>>>> = if budget.guided && f.smoothness().is_c2() {
        centers.par_iter().map(|c| guided_frame(f, c, k)).collect()
    } else {
        vec![None; centers.len()]
    };

    let mut items = Vec::new();
    let mut push = |center: &Vec<f64>, frame: &Vec<Vec<f64>>, kind: FrameKind| {
        for &r in &radii {
            if fits(center, r) {
                let index = items.len() as u64;
                items.push(WorkItem {
                    center: center.clone(),
                    frame: frame.clone(),
                    kind,
                    radius: r,
                    index,
                });
            }
        }
    };
    for frame in &axis {
        for c in &centers {
            push(c, frame, FrameKind::Axis);
        }
    }
    for (c, frame) in centers.iter().zip(&guided) {
        if let Some(frame) = frame {
            push(c, frame, FrameKind::Guided);
        }
    }
    for frame in &random {
        for c in &centers {
            push(c, frame, FrameKind::Random);
        }
    }

    let mut examined = 0;
    let mut skipped = 0;
    for chunk in items.chunks(CHUNK) {
        let results: Vec<ItemResult> = chunk.par_iter().map(|item| examine(f, item, budget, seed)).collect();
        for res in results {
            examined += 1;
            match res {
                ItemResult::Clean => {}
                ItemResult::Skipped => skipped += 1,
                ItemResult::Found(w) => {
                    return Ok(WitnessOutcome {
                        witness: Some(*w),
                        trivial: false,
                        balls_examined: examined,
                        balls_skipped: skipped,
                        seed,
                    })
                }
            }
        }
    }
    Ok(WitnessOutcome {
        witness: None,
        trivial: false,
        balls_examined: examined,
        balls_skipped: skipped,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(src: &str, dim: usize) -> ScalarField {
        ScalarField::from_expr(src, dim).unwrap()
    }

    #[test]
    fn concave_paraboloid_is_not_one_convex() {
        let out = witness_search(
            &field("-x1^2-x2^2", 2),
            1,
            &DomainBox::cube(2, -1.0, 1.0),
            &WitnessBudget::default(),
            0,
        )
        .unwrap();
        let w = out.witness.expect("witness");
        let r = w.ball.radius;
        assert!((w.functional.offset + r * r).abs() < 1e-9);
        assert!(w.functional.gradient.iter().all(|a| a.abs() < 1e-9));
        assert!((w.margin - r * r).abs() < 1e-9);
    }

    #[test]
    fn cylinder_is_one_convex() {
        let out = witness_search(
            &field("-x1^2", 2),
            1,
            &DomainBox::cube(2, -1.0, 1.0),
            &WitnessBudget::default(),
            0,
        )
        .unwrap();
        assert!(out.witness.is_none(), "{:?}", out.witness);
        assert!(out.balls_examined > 0);
    }

    #[test]
    fn convex_has_no_zero_level_witness() {
        let out = witness_search(
            &field("x1^2+x2^2", 2),
            0,
            &DomainBox::cube(2, -1.0, 1.0),
            &WitnessBudget::default(),
            0,
        )
        .unwrap();
        assert!(out.witness.is_none());
    }

    #[test]
    fn top_level_is_trivial() {
        let out = witness_search(
            &field("-x1^2-x2^2", 2),
            2,
            &DomainBox::cube(2, -1.0, 1.0),
            &WitnessBudget::default(),
            0,
        )
        .unwrap();
        assert!(out.trivial && out.witness.is_none());
    }

    #[test]
    fn slice_rejects_non_orthonormal_basis() {
        assert!(AffineSlice::new(vec![0.0, 0.0], vec![vec![1.0, 1.0]]).is_err());
        let s = AffineSlice::new(vec![1.0, 2.0], vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.to_ambient(&[3.0]), vec![1.0, 5.0]);
    }
}
