//! Sampled test of the q-continuity principle for families of planar sets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GraphMap, OpenSetModel};
use crate::error::{Error, Result};

pub type Parametrization = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// `A_τ = ψ(τ, [-1,1]^k)` for `τ ∈ [0,1]`, affine in `s` for fixed `τ`.
#[derive(Clone)]
pub struct PlanarFamily {
    pub ambient_dim: usize,
    pub k: usize,
    pub param: Parametrization,
    /// Extra parameter points checked in `A_1` besides the grid.
    pub probes: Vec<Vec<f64>>,
    pub label: String,
}

impl fmt::Debug for PlanarFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarFamily")
            .field("label", &self.label)
            .field("ambient_dim", &self.ambient_dim)
            .field("k", &self.k)
            .field("probes", &self.probes)
            .finish()
    }
}

impl PlanarFamily {
    pub fn new(
        ambient_dim: usize,
        k: usize,
        label: impl Into<String>,
        param: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            ambient_dim,
            k,
            param: Arc::new(param),
            probes: Vec::new(),
            label: label.into(),
        }
    }

    pub fn with_probe(mut self, s: Vec<f64>) -> Self {
        self.probes.push(s);
        self
    }

    pub fn point(&self, t: f64, s: &[f64]) -> Vec<f64> {
        (self.param)(t, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ContinuityVerdict {
    /// Hypotheses hold at the sampled times and `A_1 ⊂ ω` at the sampled
    /// parameters.
    Holds { t_samples: usize, s_samples: usize },
    /// `A_1` leaves `ω` although every earlier slice and `∂A_1` stay inside.
    Violated {
        t: f64,
        point: Vec<f64>,
        s: Vec<f64>,
        /// Membership of `ψ(τ, s)` along the sampled times.
        trace: Vec<(f64, bool)>,
    },
    /// Some hypothesis fails, so the principle says nothing.
    Inapplicable { reason: String },
}

impl ContinuityVerdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, ContinuityVerdict::Violated { .. })
    }
}

fn s_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (steps - 1) as f64;
    let total = steps.pow(k as u32);
    (0..total)
        .map(|mut flat| {
            let mut s = vec![0.0; k];
            for j in (0..k).rev() {
                s[j] = coord(flat % steps);
                flat /= steps;
            }
            s
        })
        .collect()
}

fn on_boundary(s: &[f64]) -> bool {
    s.iter().any(|c| c.abs() == 1.0)
}

/// Samples `τ = i/t_steps` for `i < t_steps` on the full closed parameter
/// grid, then `∂A_1`, then the interior of `A_1` plus the probes.
pub fn continuity_principle_test(
    s: &OpenSetModel,
    fam: &PlanarFamily,
    t_steps: usize,
    s_steps: usize,
) -> Result<ContinuityVerdict> {
    if t_steps < 1 || s_steps < 2 || fam.k == 0 {
        return Err(Error::Invalid(
            "continuity test needs t_steps >= 1, s_steps >= 2, k >= 1".into(),
        ));
    }
    if fam.ambient_dim != s.dim() {
        return Err(Error::Invalid(format!(
            "family lives in R^{} but the set in R^{}",
            fam.ambient_dim,
            s.dim()
        )));
    }
    let grid = s_grid(fam.k, s_steps);
    for i in 0..t_steps {
        let t = i as f64 / t_steps as f64;
        for p in &grid {
            if !s.member(&fam.point(t, p))? {
                return Ok(ContinuityVerdict::Inapplicable {
                    reason: format!("A_t leaves the set at t={t}, s={p:?}"),
                });
            }
        }
    }
    for p in grid.iter().filter(|p| on_boundary(p)) {
        if !s.member(&fam.point(1.0, p))? {
            return Ok(ContinuityVerdict::Inapplicable {
                reason: format!("boundary of A_1 leaves the set at s={p:?}"),
            });
        }
    }
    for p in grid.iter().filter(|p| !on_boundary(p)).chain(&fam.probes) {
        let x = fam.point(1.0, p);
        if !s.member(&x)? {
            let mut trace = Vec::with_capacity(t_steps + 1);
            for i in 0..=t_steps {
                let t = i as f64 / t_steps as f64;
                trace.push((t, s.member(&fam.point(t, p))?));
            }
            return Ok(ContinuityVerdict::Violated {
                t: 1.0,
                point: x,
                s: p.clone(),
                trace,
            });
        }
    }
    Ok(ContinuityVerdict::Holds {
        t_samples: t_steps + 1,
        s_samples: grid.len() + fam.probes.len(),
    })
}

fn chord_point(x1: &[f64], x2: &[f64], t: f64) -> Vec<f64> {
    let (a, b) = ((1.0 - t) / 2.0, (1.0 + t) / 2.0);
    x1.iter().zip(x2).map(|(p, q)| a * p + b * q).collect()
}

fn first_component(f: &GraphMap, x: &[f64]) -> Result<f64> {
    Ok(f.f[0].eval(x)?)
}

/// Segments over the chord `x1 → x2`, lifted in the first output by
/// `anchor + (chord(s1) - y0) + sign·(r - r0)` with `r = (2 - τ)·r0`,
/// remaining outputs `f_j(x0) + s_j`.
fn build_family(
    f: &GraphMap,
    x1: &[f64],
    x2: &[f64],
    t0: f64,
    anchor: f64,
    r0: f64,
    sign: f64,
) -> Result<PlanarFamily> {
    let n = f.n;
    let k = f.k();
    let x0 = chord_point(x1, x2, t0);
    let f1a = first_component(f, x1)?;
    let f1b = first_component(f, x2)?;
    let y0 = (1.0 - t0) / 2.0 * f1a + (1.0 + t0) / 2.0 * f1b;
    let rest = f.eval(&x0)?;
    let (x1, x2) = (x1.to_vec(), x2.to_vec());
    let label = format!("graph family r0={r0} sign={sign:+}");
    let fam = PlanarFamily::new(n + k, k, label, move |tau, s| {
        let r = 2.0 * r0 - tau * r0;
        let mut p = chord_point(&x1, &x2, s[0]);
        let chord = (1.0 - s[0]) / 2.0 * f1a + (1.0 + s[0]) / 2.0 * f1b;
        p.push(anchor + (chord - y0) + sign * (r - r0));
        for j in 1..k {
            p.push(rest[j] + s[j]);
        }
        p
    });
    let mut probe = vec![0.0; k];
    probe[0] = t0;
    Ok(fam.with_probe(probe))
}

fn check_points(f: &GraphMap, x1: &[f64], x2: &[f64], t0: f64) -> Result<()> {
    if x1.len() != f.n || x2.len() != f.n {
        return Err(Error::Invalid("chord endpoints must lie in R^n".into()));
    }
    if !(t0 > -1.0 && t0 < 1.0) {
        return Err(Error::Invalid("t0 must lie in (-1, 1)".into()));
    }
    Ok(())
}

/// The family that sweeps a segment onto the graph of a non-affine `f`.
/// Uses the strict mid-convexity violation of `f_1` at `t0`, or the
/// mirrored concavity violation, and touches the graph at `τ = 1`, `s = (t0, 0, …)`.
pub fn graph_complement_family(f: &GraphMap, x1: &[f64], x2: &[f64], t0: f64) -> Result<PlanarFamily> {
    check_points(f, x1, x2, t0)?;
    let x0 = chord_point(x1, x2, t0);
    let y0 = (1.0 - t0) / 2.0 * first_component(f, x1)? + (1.0 + t0) / 2.0 * first_component(f, x2)?;
    let fx0 = first_component(f, &x0)?;
    let gap = fx0 - y0;
    let tol = 1e-12 * fx0.abs().max(y0.abs()).max(1.0);
    if gap.abs() <= tol {
        return Err(Error::Precondition(format!(
            "f1 shows no convexity or concavity violation at t0={t0} (gap {gap:e})"
        )));
    }
    let sign = gap.signum();
    build_family(f, x1, x2, t0, fx0, gap.abs(), sign)
}

/// Same sweep with a caller-chosen height `r0 > 0` above (`sign > 0`) or
/// below the chord; `A_1` is the chord shifted by `r0`. For affine `f` this
/// never meets the graph.
pub fn graph_family_with_offset(
    f: &GraphMap,
    x1: &[f64],
    x2: &[f64],
    t0: f64,
    r0: f64,
    sign: f64,
) -> Result<PlanarFamily> {
    check_points(f, x1, x2, t0)?;
    if !(r0 > 0.0 && r0.is_finite()) || sign == 0.0 {
        return Err(Error::Invalid("offset family needs r0 > 0 and a nonzero sign".into()));
    }
    let y0 = (1.0 - t0) / 2.0 * first_component(f, x1)? + (1.0 + t0) / 2.0 * first_component(f, x2)?;
    let sign = sign.signum();
    build_family(f, x1, x2, t0, y0 + sign * r0, r0, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainBox;

    fn graph(src: &[&str]) -> GraphMap {
        GraphMap::parse(1, src).unwrap()
    }

    #[test]
    fn whole_space_holds() {
        let fam = PlanarFamily::new(2, 1, "line", |t, s| vec![s[0], t]);
        let v = continuity_principle_test(&OpenSetModel::Whole { dim: 2 }, &fam, 8, 9).unwrap();
        assert!(matches!(v, ContinuityVerdict::Holds { .. }));
    }

    #[test]
    fn concave_graph_is_violated_at_origin() {
        let f = graph(&["-x1^2"]);
        let fam = graph_complement_family(&f, &[-1.0], &[1.0], 0.0).unwrap();
        assert_eq!(fam.point(0.0, &[0.0]), vec![0.0, 1.0]);
        assert_eq!(fam.point(1.0, &[-1.0]), vec![-1.0, 0.0]);
        let set = OpenSetModel::GraphComplement(f.clone());
        match continuity_principle_test(&set, &fam, 16, 21).unwrap() {
            ContinuityVerdict::Violated { t, point, trace, .. } => {
                assert_eq!(t, 1.0);
                assert!(point.iter().all(|c| c.abs() < 1e-12));
                assert!(!trace.last().unwrap().1 && trace[0].1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn convex_graph_uses_mirrored_branch() {
        let f = graph(&["x1^2"]);
        let fam = graph_complement_family(&f, &[-1.0], &[1.0], 0.0).unwrap();
        assert_eq!(fam.point(0.0, &[0.0]), vec![0.0, -1.0]);
        let v = continuity_principle_test(&OpenSetModel::GraphComplement(f), &fam, 16, 21).unwrap();
        assert!(v.is_violated());
    }

    #[test]
    fn affine_graph_precondition_fails_and_offset_family_holds() {
        let f = graph(&["2*x1 + 1"]);
        assert!(matches!(
            graph_complement_family(&f, &[-1.0], &[1.0], 0.3),
            Err(Error::Precondition(_))
        ));
        let fam = graph_family_with_offset(&f, &[-1.0], &[1.0], 0.3, 0.5, 1.0).unwrap();
        let v = continuity_principle_test(&OpenSetModel::GraphComplement(f), &fam, 16, 21).unwrap();
        assert!(matches!(v, ContinuityVerdict::Holds { .. }));
    }

    #[test]
    fn shrinking_chords_in_ball_hold() {
        let ball = OpenSetModel::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let fam = PlanarFamily::new(2, 1, "chords", |t, s| vec![0.5 * s[0], 0.5 - 0.2 * t]);
        assert!(matches!(
            continuity_principle_test(&ball, &fam, 10, 11).unwrap(),
            ContinuityVerdict::Holds { .. }
        ));
    }

    #[test]
    fn leaving_family_is_inapplicable() {
        let b = OpenSetModel::Box(DomainBox::cube(2, 0.0, 1.0));
        let fam = PlanarFamily::new(2, 1, "wide", |_, s| vec![2.0 * s[0], 0.5]);
        assert!(matches!(
            continuity_principle_test(&b, &fam, 4, 5).unwrap(),
            ContinuityVerdict::Inapplicable { .. }
        ));
    }

    #[test]
    fn multi_output_family_touches_graph() {
        let f = GraphMap::parse(1, &["-x1^2", "x1"]).unwrap();
        let fam = graph_complement_family(&f, &[-1.0], &[1.0], 0.0).unwrap();
        assert_eq!(fam.k, 2);
        let v = continuity_principle_test(&OpenSetModel::GraphComplement(f), &fam, 8, 9).unwrap();
        assert!(v.is_violated());
    }
}
