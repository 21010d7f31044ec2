//! Axis-aligned boxes and regular grids.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Per-axis intervals. Used open for domains and closed for sampling grids.
/// Infinite endpoints serialize as `null`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub intervals: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Invalid("box needs at least one axis".into()));
        }
        for (i, &(lo, hi)) in intervals.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::Invalid(format!("axis {i}: empty interval [{lo}, {hi}]")));
            }
        }
        Ok(Self { intervals })
    }

    pub fn unbounded(dim: usize) -> Self {
        Self {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY); dim],
        }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            intervals: vec![(lo, hi); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite())
    }

    /// Strict containment in the open box.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.intervals).all(|(x, (lo, hi))| lo < x && x < hi)
    }

    /// Containment in the closed box.
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.intervals).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Distance from `p` to the complement of the open box (`+inf` when unbounded).
    pub fn margin(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.intervals)
            .map(|(x, (lo, hi))| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            })
            .collect()
    }

    pub fn min_width(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diagonal(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(lo, hi)| (hi - lo).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Shrinks every axis by `r` on both sides.
    pub fn shrink(&self, r: f64) -> Result<Self> {
        let intervals: Vec<_> = self.intervals.iter().map(|&(lo, hi)| (lo + r, hi - r)).collect();
        if intervals.iter().any(|(lo, hi)| lo >= hi) {
            return Err(Error::Invalid(format!("box is empty after shrinking by {r}")));
        }
        Ok(Self { intervals })
    }

    pub fn intersect(&self, other: &DomainBox) -> Option<DomainBox> {
        if self.dim() != other.dim() {
            return None;
        }
        let intervals: Vec<_> = self
            .intervals
            .iter()
            .zip(&other.intervals)
            .map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))
            .collect();
        if intervals.iter().any(|(lo, hi)| lo >= hi) {
            None
        } else {
            Some(DomainBox { intervals })
        }
    }

    pub fn hull(&self, other: &DomainBox) -> DomainBox {
        DomainBox {
            intervals: self
                .intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| (a.0.min(b.0), a.1.max(b.1)))
                .collect(),
        }
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &DomainBox) -> DomainBox {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        DomainBox { intervals }
    }
}

fn encode_end(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Serialize for DomainBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[Option<f64>; 2]> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| [encode_end(lo), encode_end(hi)])
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DomainBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[Option<f64>; 2]> = Vec::deserialize(d)?;
        let intervals = pairs
            .into_iter()
            .map(|[lo, hi]| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)))
            .collect();
        DomainBox::new(intervals).map_err(D::Error::custom)
    }
}

/// Regular grid over a closed box, endpoints included. Points are ordered
/// row-major with the first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "box")]
    pub bounds: DomainBox,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn new(bounds: DomainBox, resolution: Vec<usize>) -> Result<Self> {
        if resolution.len() != bounds.dim() {
            return Err(Error::Invalid(format!(
                "grid resolution has {} axes, box has {}",
                resolution.len(),
                bounds.dim()
            )));
        }
        if !bounds.is_bounded() {
            return Err(Error::Invalid("grid box must be bounded".into()));
        }
        if resolution.contains(&0) {
            return Err(Error::Invalid("grid resolution must be positive".into()));
        }
        Ok(Self { bounds, resolution })
    }

    pub fn uniform(bounds: DomainBox, per_axis: usize) -> Result<Self> {
        let n = bounds.dim();
        Self::new(bounds, vec![per_axis; n])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds.intervals[axis];
        if self.resolution[axis] < 2 {
            0.0
        } else {
            (hi - lo) / (self.resolution[axis] - 1) as f64
        }
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        let (lo, hi) = self.bounds.intervals[axis];
        let res = self.resolution[axis];
        if res < 2 {
            0.5 * (lo + hi)
        } else if index + 1 == res {
            hi
        } else {
            lo + index as f64 * (hi - lo) / (res - 1) as f64
        }
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.resolution[axis];
            flat /= self.resolution[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.resolution).fold(0, |acc, (&i, &r)| acc * r + i)
    }

    pub fn point_at(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(axis, &i)| self.coordinate(axis, i))
            .collect()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.point_at(&self.multi_index(flat))
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Values sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = grid.points().map(|p| f(&p)).collect();
        Self { grid, values }
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flat_index(idx)]
    }
}
