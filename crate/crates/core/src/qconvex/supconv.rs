//! Supremum convolution on regular grids and approximation from above.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{IndexKind, PointRecord, QIndexReport};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{DomainBox, GridField, GridSpec};
use crate::spectra::{eig_symmetric, Inertia, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelProfile {
    /// `max(0, 1 - |t|²/r²)²`.
    Polynomial,
    /// `exp(1 - 1/(1 - |t|²/r²))` inside the ball.
    Bump,
}

/// Radial kernel with `g(0) = 1`, `0 <= g <= 1`, support in the closed
/// radius-`r` ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub radius: f64,
    pub profile: KernelProfile,
}

/// Most negative radial second derivative of the unit-radius bump; the
/// tangential curvature `g'(ρ)/ρ` never drops below `-8/e`.
const BUMP_LOWER_BOUND: f64 = 4.158915409969352;

impl KernelSpec {
    pub fn new(radius: f64, profile: KernelProfile) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Invalid(format!("kernel radius must be positive, got {radius}")));
        }
        Ok(Self { radius, profile })
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        let s = t.iter().map(|x| x * x).sum::<f64>() / (self.radius * self.radius);
        if s >= 1.0 {
            return 0.0;
        }
        match self.profile {
            KernelProfile::Polynomial => (1.0 - s) * (1.0 - s),
            KernelProfile::Bump => (1.0 - 1.0 / (1.0 - s)).exp(),
        }
    }

    /// `L` with `H_g >= -L·I` everywhere.
    pub fn lower_hessian_bound(&self) -> f64 {
        let r2 = self.radius * self.radius;
        match self.profile {
            KernelProfile::Polynomial => 4.0 / r2,
            KernelProfile::Bump => BUMP_LOWER_BOUND / r2,
        }
    }
}

/// Result of [`sup_convolve_detailed`]: the output field plus, per output
/// node, the index into `offsets` of the maximizing grid offset (`None` when
/// the maximum is the zero extension).
#[derive(Debug, Clone)]
pub struct SupConvolution {
    pub field: GridField,
    pub offsets: Vec<Vec<isize>>,
    pub argmax: Vec<Option<usize>>,
}

impl SupConvolution {
    /// True at nodes whose `stride` stencil shares one maximizing offset; on
    /// those nodes the result coincides with a single scaled translate of the
    /// input.
    pub fn stable_mask(&self, stride: usize) -> Vec<bool> {
        let grid = &self.field.grid;
        let n = grid.dim();
        (0..grid.len())
            .map(|flat| {
                let idx = grid.multi_index(flat);
                let me = self.argmax[flat];
                if idx
                    .iter()
                    .zip(&grid.resolution)
                    .any(|(&i, &r)| i < stride || i + stride >= r)
                {
                    return false;
                }
                let mut probe = idx.clone();
                for a in 0..n {
                    for b in a..n {
                        for (sa, sb) in [(1isize, 1isize), (1, -1), (-1, 1), (-1, -1)] {
                            probe.copy_from_slice(&idx);
                            probe[a] = (probe[a] as isize + sa * stride as isize) as usize;
                            if b != a {
                                probe[b] = (probe[b] as isize + sb * stride as isize) as usize;
                            }
                            if self.argmax[grid.flat_index(&probe)] != me {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .collect()
    }
}

fn output_grid(input: &GridSpec, out_box: &DomainBox) -> Result<(GridSpec, Vec<usize>)> {
    let n = input.dim();
    let mut first = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    let mut resolution = Vec::with_capacity(n);
    for axis in 0..n {
        let (lo, hi) = out_box.intervals[axis];
        let slack = 1e-12 * (input.bounds.intervals[axis].1 - input.bounds.intervals[axis].0);
        let inside: Vec<usize> = (0..input.resolution[axis])
            .filter(|&i| {
                let x = input.coordinate(axis, i);
                x >= lo - slack && x <= hi + slack
            })
            .collect();
        if inside.len() < 2 {
            return Err(Error::Invalid(format!(
                "output box keeps fewer than two grid nodes on axis {axis} after shrinking"
            )));
        }
        first.push(inside[0]);
        bounds.push((
            input.coordinate(axis, inside[0]),
            input.coordinate(axis, *inside.last().unwrap()),
        ));
        resolution.push(inside.len());
    }
    Ok((GridSpec::new(DomainBox::new(bounds)?, resolution)?, first))
}

/// `(u∗g)(x) = max(0, max_y u(y)·g(x-y))` over grid nodes `y`, evaluated at
/// the input nodes lying in `out_box` (default: the input box shrunk by the
/// kernel radius).
pub fn sup_convolve(u: &GridField, g: &KernelSpec, out_box: Option<&DomainBox>) -> Result<GridField> {
    Ok(sup_convolve_detailed(u, g, out_box)?.field)
}

pub fn sup_convolve_detailed(u: &GridField, g: &KernelSpec, out_box: Option<&DomainBox>) -> Result<SupConvolution> {
    if let Some(bad) = u.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Invalid(format!(
            "sup-convolution needs a bounded non-negative input, found {bad}"
        )));
    }
    let input = &u.grid;
    let n = input.dim();
    let shrunk = input.bounds.shrink(g.radius)?;
    let target = match out_box {
        Some(b) => b
            .intersect(&shrunk)
            .ok_or_else(|| Error::Invalid("output box is empty after shrinking".into()))?,
        None => shrunk,
    };
    let (out, first) = output_grid(input, &target)?;

    let h: Vec<f64> = (0..n).map(|a| input.spacing(a)).collect();
    let reach: Vec<isize> = h.iter().map(|&hi| (g.radius / hi).ceil() as isize).collect();
    let mut offsets: Vec<Vec<isize>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let span: Vec<usize> = reach.iter().map(|&r| (2 * r + 1) as usize).collect();
    let total: usize = span.iter().product();
    for mut flat in 0..total {
        let mut d = vec![0isize; n];
        for a in (0..n).rev() {
            d[a] = (flat % span[a]) as isize - reach[a];
            flat /= span[a];
        }
        let t: Vec<f64> = d.iter().zip(&h).map(|(&di, &hi)| di as f64 * hi).collect();
        let w = g.eval(&t);
        if w > 0.0 {
            offsets.push(d);
            weights.push(w);
        }
    }

    let results: Vec<(f64, Option<usize>)> = (0..out.len())
        .into_par_iter()
        .map(|flat| {
            let local = out.multi_index(flat);
            let base: Vec<isize> = local.iter().zip(&first).map(|(&i, &f)| (i + f) as isize).collect();
            let mut best = 0.0;
            let mut arg = None;
            let mut idx = vec![0usize; n];
            'offsets: for (o, (d, w)) in offsets.iter().zip(&weights).enumerate() {
                for a in 0..n {
                    let j = base[a] - d[a];
                    if j < 0 || j >= input.resolution[a] as isize {
                        continue 'offsets;
                    }
                    idx[a] = j as usize;
                }
                let v = u.values[input.flat_index(&idx)] * w;
                if v > best {
                    best = v;
                    arg = Some(o);
                }
            }
            (best, arg)
        })
        .collect();
    let (values, argmax) = results.into_iter().unzip();
    Ok(SupConvolution {
        field: GridField { grid: out, values },
        offsets,
        argmax,
    })
}

/// Grid q-index of sampled values: second differences with step
/// `stride·spacing` at every node whose stencil fits in the grid and which
/// `mask` (when given) admits.
pub fn grid_q_index(field: &GridField, stride: usize, tol: f64, mask: Option<&[bool]>) -> Result<QIndexReport> {
    let grid = &field.grid;
    let n = grid.dim();
    let stride = stride.max(1);
    if let Some(m) = mask {
        if m.len() != grid.len() {
            return Err(Error::Invalid("mask length differs from the grid".into()));
        }
    }
    let h: Vec<f64> = (0..n).map(|a| stride as f64 * grid.spacing(a)).collect();
    let mut records = Vec::new();
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        if idx
            .iter()
            .zip(&grid.resolution)
            .any(|(&i, &r)| i < stride || i + stride >= r)
        {
            continue;
        }
        let point = grid.point_at(&idx);
        if mask.is_some_and(|m| !m[flat]) {
            records.push(PointRecord {
                point,
                inertia: None,
                error: Some("skipped: maximizer changes across the stencil".into()),
            });
            continue;
        }
        let at = |shift: &[(usize, isize)]| {
            let mut j = idx.clone();
            for &(a, s) in shift {
                j[a] = (j[a] as isize + s * stride as isize) as usize;
            }
            field.values[grid.flat_index(&j)]
        };
        let c = at(&[]);
        let mut raw = vec![0.0; n * n];
        for a in 0..n {
            raw[a * n + a] = (at(&[(a, 1)]) - 2.0 * c + at(&[(a, -1)])) / (h[a] * h[a]);
            for b in 0..a {
                let v = (at(&[(a, 1), (b, 1)]) - at(&[(a, 1), (b, -1)]) - at(&[(a, -1), (b, 1)])
                    + at(&[(a, -1), (b, -1)]))
                    / (4.0 * h[a] * h[b]);
                raw[a * n + b] = v;
                raw[b * n + a] = v;
            }
        }
        let m = SymmetricMatrix::symmetrized(n, &raw);
        let rec = match eig_symmetric(&m) {
            Ok(eigs) => PointRecord {
                point,
                inertia: Some(Inertia::from_eigenvalues(&eigs, tol)),
                error: None,
            },
            Err(e) => PointRecord {
                point,
                inertia: None,
                error: Some(e.to_string()),
            },
        };
        records.push(rec);
    }
    let ok = records.iter().filter_map(|r| r.inertia.as_ref());
    let q_index = ok.clone().map(|i| i.negatives).max();
    let strict_index = ok.map(Inertia::non_positive).max();
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    Ok(QIndexReport {
        field: "grid".into(),
        kind: IndexKind::RealHessian,
        grid: grid.clone(),
        tol,
        q_index,
        strict_index,
        points: records.len(),
        failures,
        records,
    })
}

#[derive(Debug, Clone)]
pub struct Approximation {
    /// `ũ = (v∗g) - k` on the shrunken grid.
    pub field: GridField,
    /// Smallest `ũ - u` over output nodes with finite `u`.
    pub min_margin: f64,
    /// Largest `ũ - (max of v over the kernel ball - k)`; never positive.
    pub max_upper_gap: f64,
    pub k: u32,
}

/// `ũ = (v∗g) - k` with `v = max(u, -k) + k + 1/k`, sampled on `grid`.
/// Fails if `ũ > u` does not hold at some output node.
pub fn approximate_from_above(u: &ScalarField, grid: &GridSpec, k: u32, g: &KernelSpec) -> Result<Approximation> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if grid.dim() != u.dim() {
        return Err(Error::Invalid("grid and field dimensions differ".into()));
    }
    if 2.0 * g.radius >= grid.bounds.min_width() {
        return Err(Error::Invalid("kernel radius does not fit inside the grid box".into()));
    }
    let kf = k as f64;
    let raw: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| u.eval(&grid.point(i)))
        .collect::<std::result::Result<_, _>>()?;
    let v: Vec<f64> = raw.iter().map(|&x| x.max(-kf) + kf + 1.0 / kf).collect();
    let vfield = GridField::new(grid.clone(), v)?;
    let conv = sup_convolve_detailed(&vfield, g, None)?;
    let out = &conv.field.grid;
    let shift: Vec<usize> = (0..grid.dim())
        .map(|a| {
            (0..grid.resolution[a])
                .position(|i| grid.coordinate(a, i) == out.bounds.intervals[a].0)
                .unwrap_or(0)
        })
        .collect();
    let mut values = Vec::with_capacity(out.len());
    let mut min_margin = f64::INFINITY;
    let mut max_upper_gap = f64::NEG_INFINITY;
    for flat in 0..out.len() {
        let local = out.multi_index(flat);
        let idx: Vec<usize> = local.iter().zip(&shift).map(|(i, s)| i + s).collect();
        let at = grid.flat_index(&idx);
        let approx = conv.field.values[flat] - kf;
        let below = raw[at];
        if !(approx > below) {
            return Err(Error::Precondition(format!(
                "approximation does not dominate u at node {:?} ({approx} <= {below})",
                grid.point_at(&idx)
            )));
        }
        if below.is_finite() {
            min_margin = min_margin.min(approx - below);
        }
        let local_max = conv
            .offsets
            .iter()
            .filter_map(|d| {
                let j: Option<Vec<usize>> = idx
                    .iter()
                    .zip(d)
                    .zip(&grid.resolution)
                    .map(|((&i, &di), &r)| {
                        let j = i as isize - di;
                        (j >= 0 && j < r as isize).then_some(j as usize)
                    })
                    .collect();
                j.map(|j| vfield.values[grid.flat_index(&j)])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        max_upper_gap = max_upper_gap.max(approx - (local_max - kf));
        values.push(approx);
    }
    Ok(Approximation {
        field: GridField::new(out.clone(), values)?,
        min_margin,
        max_upper_gap,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Smoothness;

    fn grid(n: usize, res: usize) -> GridSpec {
        GridSpec::uniform(DomainBox::cube(n, -1.0, 1.0), res).unwrap()
    }

    fn poly(r: f64) -> KernelSpec {
        KernelSpec::new(r, KernelProfile::Polynomial).unwrap()
    }

    #[test]
    fn kernel_shape() {
        for profile in [KernelProfile::Polynomial, KernelProfile::Bump] {
            let g = KernelSpec::new(0.5, profile).unwrap();
            assert_eq!(g.eval(&[0.0, 0.0]), 1.0);
            assert_eq!(g.eval(&[0.5, 0.0]), 0.0);
            assert!(g.eval(&[0.2, 0.1]) > 0.0 && g.eval(&[0.2, 0.1]) < 1.0);
        }
    }

    #[test]
    fn bump_bound_matches_numerical_minimum() {
        // Radial second derivative of exp(1 - 1/(1 - t²)) on a fine mesh.
        let g = KernelSpec::new(1.0, KernelProfile::Bump).unwrap();
        let f = |t: f64| g.eval(&[t]);
        let h = 1e-4;
        let mut worst = 0.0_f64;
        let mut t = 0.0;
        while t < 0.99 {
            worst = worst.min((f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h));
            t += 1e-3;
        }
        assert!((worst + g.lower_hessian_bound()).abs() < 1e-4, "{worst}");
    }

    #[test]
    fn constant_inputs() {
        let g = grid(2, 21);
        let ones = GridField::from_fn(g.clone(), |_| 1.0);
        let out = sup_convolve(&ones, &poly(0.3), None).unwrap();
        assert!(out.values.iter().all(|&v| v == 1.0));
        assert!(out.grid.bounds.intervals[0].0 >= -0.7 - 1e-12);
        let zeros = GridField::from_fn(g, |_| 0.0);
        let out = sup_convolve(&zeros, &poly(0.3), None).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_spike_reproduces_kernel() {
        let g = grid(1, 41);
        let x0 = g.coordinate(0, 20);
        let spike = GridField::from_fn(g, |p| if p[0] == x0 { 1.0 } else { 0.0 });
        let k = poly(0.3);
        let out = sup_convolve(&spike, &k, None).unwrap();
        for (i, v) in out.values.iter().enumerate() {
            let x = out.grid.coordinate(0, i);
            assert!((v - k.eval(&[x - x0])).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_input_and_oversized_kernel_are_rejected() {
        let g = grid(1, 11);
        let f = GridField::from_fn(g.clone(), |p| p[0]);
        assert!(sup_convolve(&f, &poly(0.2), None).is_err());
        let ones = GridField::from_fn(g, |_| 1.0);
        assert!(sup_convolve(&ones, &poly(1.5), None).is_err());
    }

    #[test]
    fn approximation_examples() {
        let g = grid(2, 11);
        let k = poly(0.3);
        let zero = ScalarField::from_expr("0", 2).unwrap();
        let a = approximate_from_above(&zero, &g, 1, &k).unwrap();
        assert!(a.field.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let m5 = ScalarField::from_expr("-5", 2).unwrap();
        let a = approximate_from_above(&m5, &g, 10, &k).unwrap();
        assert!(a.field.values.iter().all(|&v| (v + 4.9).abs() < 1e-12));
        let hole = ScalarField::from_fn("hole", 2, Smoothness::C0, |x| {
            Ok(if x[0].abs() < 1e-9 && x[1].abs() < 1e-9 {
                f64::NEG_INFINITY
            } else {
                0.0
            })
        });
        let a = approximate_from_above(&hole, &g, 3, &k).unwrap();
        assert!(a.field.values.iter().all(|&v| v > -3.0 + 1.0 / 3.0 - 1e-12));
        assert!(a.max_upper_gap <= 1e-12);
    }

    #[test]
    fn convex_quadratic_stays_convex_on_grid() {
        let g = grid(2, 41);
        let u = GridField::from_fn(g, |p| 1.0 + p[0] * p[0] + 0.5 * p[1] * p[1]);
        let conv = sup_convolve_detailed(&u, &poly(0.3), None).unwrap();
        let r = grid_q_index(&conv.field, 1, 1e-7, None).unwrap();
        assert_eq!(r.q_index, Some(0));
    }
}
