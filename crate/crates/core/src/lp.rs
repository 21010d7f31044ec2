//! Affine upper envelopes by a small dense primal simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `l(x) = <gradient, x> + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunctional {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl AffineFunctional {
    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            gradient: vec![0.0; dim],
            offset: value,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.gradient.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.offset
    }
}

const PIVOT_EPS: f64 = 1e-11;

/// Dense tableau for `max c·z` subject to `A z + s = b`, `z, s >= 0`,
/// `b >= 0`, starting from the slack basis. Bland's rule throughout.
struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows` constraint rows followed by the objective row; each row holds
    /// `cols` coefficients then the right-hand side.
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width() + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.at(pr, pc);
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        let pivot_row: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.t[r * w + pc];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.t[r * w..(r + 1) * w];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= factor * y;
            }
            row[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    fn solve(&mut self) -> Result<()> {
        let obj = self.rows;
        let scale = (0..self.cols).fold(1.0_f64, |m, c| m.max(self.at(obj, c).abs()));
        let max_iter = 50 * (self.rows + self.cols);
        for _ in 0..max_iter {
            // Objective row stores -reduced costs: negative entries improve.
            let entering = (0..self.cols).find(|&c| self.at(obj, c) < -PIVOT_EPS * scale);
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.at(r, self.cols) / a;
                    best = match best {
                        None => Some((ratio, r)),
                        Some((br, brow)) => {
                            if ratio < br - 1e-15 * br.abs().max(1.0)
                                || (ratio <= br + 1e-15 * br.abs().max(1.0) && self.basis[r] < self.basis[brow])
                            {
                                Some((ratio, r))
                            } else {
                                Some((br, brow))
                            }
                        }
                    };
                }
            }
            let Some((_, pr)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(pr, pc);
        }
        Err(Error::NoConvergence {
            sweeps: max_iter,
            residual: f64::NAN,
        })
    }

    fn value_of(&self, var: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == var)
            .map_or(0.0, |r| self.at(r, self.cols))
    }
}

/// The affine `l` on slice coordinates minimizing `l(center)` subject to
/// `l(x_i) >= u_i` for every sample.
///
/// Samples with value `-inf` impose no constraint and are dropped. Fails with
/// [`Error::Unbounded`] when the center is not enclosed by the samples.
pub fn fit_affine_upper_envelope(points: &[(Vec<f64>, f64)], center: &[f64]) -> Result<AffineFunctional> {
    let k = center.len();
    let samples: Vec<&(Vec<f64>, f64)> = points.iter().filter(|(_, u)| *u > f64::NEG_INFINITY).collect();
    if samples.len() < k + 1 {
        return Err(Error::Invalid(format!(
            "envelope fit on a {k}-dimensional slice needs at least {} finite samples, got {}",
            k + 1,
            samples.len()
        )));
    }
    for (x, u) in &samples {
        if x.len() != k || !u.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(
                "envelope samples must be finite and match the slice dimension".into(),
            ));
        }
    }
    let top = samples.iter().fold(f64::NEG_INFINITY, |m, (_, u)| m.max(*u));
    let scale = samples
        .iter()
        .flat_map(|(x, _)| x.iter().zip(center).map(|(a, c)| (a - c).abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    // Variables: a⁺ (k), a⁻ (k), β⁺, β⁻, then one slack per sample. Geometry
    // is rescaled by `scale` so the tableau stays well conditioned.
    let m = samples.len();
    let structural = 2 * k + 2;
    let cols = structural + m;
    let width = cols + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for (r, (x, u)) in samples.iter().enumerate() {
        let row = &mut t[r * width..(r + 1) * width];
        for j in 0..k {
            let y = (x[j] - center[j]) / scale;
            row[j] = -y;
            row[k + j] = y;
        }
        row[2 * k] = -1.0;
        row[2 * k + 1] = 1.0;
        row[structural + r] = 1.0;
        row[cols] = top - u;
    }
    // maximize β⁻ − β⁺; the objective row holds the negated costs.
    let obj = m * width;
    t[obj + 2 * k] = 1.0;
    t[obj + 2 * k + 1] = -1.0;
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        basis: (structural..cols).collect(),
    };
    tab.solve()?;

    let a: Vec<f64> = (0..k)
        .map(|j| (tab.value_of(j) - tab.value_of(k + j)) / scale)
        .collect();
    let mut beta = tab.value_of(2 * k) - tab.value_of(2 * k + 1);
    // Restore feasibility lost to rounding.
    let mut worst = 0.0_f64;
    for (x, u) in &samples {
        let lx: f64 = a
            .iter()
            .zip(x.iter().zip(center))
            .map(|(a, (x, c))| a * (x - c))
            .sum::<f64>()
            + beta
            + top;
        worst = worst.max(u - lx);
    }
    beta += worst;
    if a.iter().any(|v| !v.is_finite()) || !beta.is_finite() {
        return Err(Error::Unbounded);
    }
    let shift: f64 = a.iter().zip(center).map(|(a, c)| a * c).sum();
    Ok(AffineFunctional {
        gradient: a,
        offset: beta + top - shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_constraint_segment() {
        let l = fit_affine_upper_envelope(&[(vec![-1.0], -1.0), (vec![1.0], -1.0)], &[0.0]).unwrap();
        assert!(l.gradient[0].abs() < 1e-12);
        assert!((l.offset + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data() {
        let pts: Vec<_> = (0..8)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 8.0;
                (vec![t.cos(), t.sin()], 0.0)
            })
            .collect();
        let l = fit_affine_upper_envelope(&pts, &[0.0, 0.0]).unwrap();
        assert!(l.eval(&[0.0, 0.0]).abs() < 1e-12);
    }

    #[test]
    fn affine_data_is_its_own_envelope() {
        let a = [0.7, -1.3];
        let pts: Vec<_> = (0..24)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 24.0;
                let x = vec![t.cos(), t.sin()];
                let u = a[0] * x[0] + a[1] * x[1] + 0.25;
                (x, u)
            })
            .collect();
        let l = fit_affine_upper_envelope(&pts, &[0.0, 0.0]).unwrap();
        for (x, u) in &pts {
            assert!((l.eval(x) - u).abs() < 1e-8);
        }
        assert!((l.gradient[0] - a[0]).abs() < 1e-8 && (l.gradient[1] - a[1]).abs() < 1e-8);
    }

    #[test]
    fn center_outside_hull_is_unbounded() {
        let pts = vec![(vec![1.0], 0.0), (vec![2.0], 0.0)];
        assert_eq!(fit_affine_upper_envelope(&pts, &[0.0]), Err(Error::Unbounded));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            fit_affine_upper_envelope(&[(vec![0.0, 1.0], 1.0)], &[0.0, 0.0]),
            Err(Error::Invalid(_))
        ));
    }
}
