//! Points on the unit circle, the geodesic metric and the action of `O(2)`.
//!
//! Angles are stored canonically in `[0, 2π)`. Every constructor and every
//! transform goes through [`canonical`], so there is exactly one place where
//! reduction modulo `2π` happens.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn canonical(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid of a tiny negative number rounds up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shorter-arc distance between two angles, in `[0, π]`.
#[inline]
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let diff = (canonical(a) - canonical(b)).abs();
    diff.min(TAU - diff)
}

/// A point of the unit circle, identified with its argument in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        CirclePoint(canonical(theta))
    }

    #[inline]
    pub fn theta(self) -> f64 {
        self.0
    }

    /// Cartesian coordinates `(cos θ, sin θ)`.
    pub fn to_xy(self) -> [f64; 2] {
        [self.0.cos(), self.0.sin()]
    }
}

impl From<f64> for CirclePoint {
    fn from(theta: f64) -> Self {
        CirclePoint::new(theta)
    }
}

impl From<CirclePoint> for f64 {
    fn from(p: CirclePoint) -> f64 {
        p.0
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Geodesic distance `|x − y| ∧ (2π − |x − y|)`.
#[inline]
pub fn geodesic_dist(x: CirclePoint, y: CirclePoint) -> f64 {
    let d = (x.0 - y.0).abs();
    d.min(TAU - d)
}

/// An ordered tuple of circle points.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    points: Vec<CirclePoint>,
}

impl Configuration {
    pub fn new(points: Vec<CirclePoint>) -> Self {
        Configuration { points }
    }

    pub fn from_angles<I: IntoIterator<Item = f64>>(angles: I) -> Self {
        Configuration {
            points: angles.into_iter().map(CirclePoint::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CirclePoint] {
        &self.points
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn get(&self, i: usize) -> CirclePoint {
        self.points[i]
    }

    /// Sub-configuration at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Configuration {
        Configuration {
            points: indices.iter().map(|&i| self.points[i]).collect(),
        }
    }

    /// Indices sorted by angle; ties keep index order.
    pub fn angular_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.points[a].0.total_cmp(&self.points[b].0));
        order
    }
}

impl From<Vec<CirclePoint>> for Configuration {
    fn from(points: Vec<CirclePoint>) -> Self {
        Configuration { points }
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = CirclePoint;
    fn index(&self, i: usize) -> &CirclePoint {
        &self.points[i]
    }
}

/// Norm used to aggregate pointwise geodesic distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    D1,
    D2,
    Dinf,
}

fn check_len(x: &Configuration, y: &Configuration) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// `d1`, `d2` or `d∞` aggregate of the pointwise geodesic distances.
pub fn config_dist(x: &Configuration, y: &Configuration, norm: Norm) -> Result<f64> {
    check_len(x, y)?;
    let dists = x
        .points
        .iter()
        .zip(&y.points)
        .map(|(&a, &b)| geodesic_dist(a, b));
    Ok(match norm {
        Norm::D1 => dists.sum(),
        Norm::D2 => dists.map(|d| d * d).sum::<f64>().sqrt(),
        Norm::Dinf => dists.fold(0.0, f64::max),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Rotation,
    Reflection,
}

/// An element of `O(2)` acting on arguments.
///
/// A rotation maps `θ ↦ θ + angle`; a reflection maps `θ ↦ angle − θ`
/// (reflection about the axis at `angle / 2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalTransform {
    pub kind: TransformKind,
    pub angle: f64,
}

impl OrthogonalTransform {
    pub fn rotation(angle: f64) -> Self {
        OrthogonalTransform {
            kind: TransformKind::Rotation,
            angle: canonical(angle),
        }
    }

    pub fn reflection(angle: f64) -> Self {
        OrthogonalTransform {
            kind: TransformKind::Reflection,
            angle: canonical(angle),
        }
    }

    pub fn identity() -> Self {
        Self::rotation(0.0)
    }

    #[inline]
    pub fn apply(&self, p: CirclePoint) -> CirclePoint {
        match self.kind {
            TransformKind::Rotation => CirclePoint::new(p.0 + self.angle),
            TransformKind::Reflection => CirclePoint::new(self.angle - p.0),
        }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &OrthogonalTransform) -> OrthogonalTransform {
        use TransformKind::*;
        match (self.kind, other.kind) {
            (Rotation, Rotation) => Self::rotation(self.angle + other.angle),
            (Rotation, Reflection) => Self::reflection(self.angle + other.angle),
            (Reflection, Rotation) => Self::reflection(self.angle - other.angle),
            (Reflection, Reflection) => Self::rotation(self.angle - other.angle),
        }
    }

    pub fn inverse(&self) -> OrthogonalTransform {
        match self.kind {
            TransformKind::Rotation => Self::rotation(-self.angle),
            TransformKind::Reflection => *self,
        }
    }

    /// 2×2 matrix acting on `(cos θ, sin θ)`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        match self.kind {
            TransformKind::Rotation => [[c, -s], [s, c]],
            TransformKind::Reflection => [[c, s], [s, -c]],
        }
    }
}

impl fmt::Display for OrthogonalTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TransformKind::Rotation => write!(f, "rotation({})", self.angle),
            TransformKind::Reflection => write!(f, "reflection({})", self.angle),
        }
    }
}

/// Pointwise action `Qx = (Qx₁, …, Qxₙ)`.
pub fn apply_transform(q: &OrthogonalTransform, x: &Configuration) -> Configuration {
    Configuration {
        points: x.points.iter().map(|&p| q.apply(p)).collect(),
    }
}

/// The `k`-th roots of unity, `C_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularGrid {
    k: usize,
}

impl RegularGrid {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Empty("regular grid needs k >= 1"));
        }
        Ok(RegularGrid { k })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        TAU * (j % self.k) as f64 / self.k as f64
    }

    #[inline]
    pub fn point(&self, j: usize) -> CirclePoint {
        CirclePoint(self.angle(j))
    }

    pub fn points(&self) -> Configuration {
        Configuration {
            points: (0..self.k).map(|j| self.point(j)).collect(),
        }
    }

    /// Spacing `2π / k`.
    pub fn step(&self) -> f64 {
        TAU / self.k as f64
    }

    /// Index of the grid point nearest to `p` (ties to the smaller index).
    pub fn nearest_index(&self, p: CirclePoint) -> usize {
        let t = p.0 / self.step();
        let j = t.round() as usize;
        j % self.k
    }
}

/// The `2k` transforms of `O(2)` preserving `C_k`: `k` rotations by `2πj/k`
/// followed by `k` reflections with angle `2πj/k`.
pub fn grid_transforms(k: usize) -> Vec<OrthogonalTransform> {
    let k = k.max(1);
    let step = |j: usize| TAU * j as f64 / k as f64;
    (0..k)
        .map(|j| OrthogonalTransform::rotation(step(j)))
        .chain((0..k).map(|j| OrthogonalTransform::reflection(step(j))))
        .collect()
}

/// Smallest closed arc containing every angle.
///
/// Returns `(half_length, centre)`: the minimal maximal circular deviation
/// of a single angle from the set, and an angle achieving it.
fn minimal_enclosing_arc(angles: &mut [f64]) -> (f64, f64) {
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    // gap after angles[i] going counter-clockwise
    let mut best_gap = angles[0] + TAU - angles[n - 1];
    let mut start = 0;
    for i in 0..n - 1 {
        let gap = angles[i + 1] - angles[i];
        if gap > best_gap {
            best_gap = gap;
            start = i + 1;
        }
    }
    let length = (TAU - best_gap).max(0.0);
    let half = (0.5 * length).min(PI);
    (half, canonical(angles[start] + half))
}

/// `min_{Q ∈ O(2)} d∞(x, Qy)` together with a minimizing `Q`.
///
/// Exact over the continuous group. For rotations, `d(xᵢ, yᵢ + φ)` is the
/// circular distance between `φ` and `rᵢ = xᵢ − yᵢ`, so the optimum is the
/// centre of the smallest arc enclosing the residuals. Reflections use
/// `rᵢ = xᵢ + yᵢ`. Ties go to the rotation.
pub fn aligned_dinf(x: &Configuration, y: &Configuration) -> Result<(f64, OrthogonalTransform)> {
    check_len(x, y)?;
    if x.is_empty() {
        return Err(Error::Empty("aligned_dinf needs n >= 1"));
    }
    if let Some(q) = exact_grid_alignment(x, y) {
        return Ok((0.0, q));
    }
    let mut rot: Vec<f64> = x
        .points
        .iter()
        .zip(&y.points)
        .map(|(a, b)| canonical(a.0 - b.0))
        .collect();
    let mut refl: Vec<f64> = x
        .points
        .iter()
        .zip(&y.points)
        .map(|(a, b)| canonical(a.0 + b.0))
        .collect();
    let (rot_val, rot_angle) = minimal_enclosing_arc(&mut rot);
    let (refl_val, refl_angle) = minimal_enclosing_arc(&mut refl);
    let candidates = [
        OrthogonalTransform::rotation(rot_angle),
        OrthogonalTransform::reflection(refl_angle),
    ];
    // the arc half-length is the analytic value; report the realized one
    let realized = candidates.map(|q| {
        x.points
            .iter()
            .zip(&y.points)
            .map(|(&a, &b)| geodesic_dist(a, q.apply(b)))
            .fold(0.0, f64::max)
    });
    let rot_best = rot_val.min(realized[0]);
    let refl_best = refl_val.min(realized[1]);
    if rot_best <= refl_best {
        Ok((realized[0], candidates[0]))
    } else {
        Ok((realized[1], candidates[1]))
    }
}

/// Grid indices of `x` when every point is exactly a point of `C_k`.
fn grid_indices(x: &Configuration, k: usize) -> Option<Vec<usize>> {
    let grid = RegularGrid { k };
    x.points
        .iter()
        .map(|&p| {
            let j = grid.nearest_index(p);
            (grid.angle(j) == p.0).then_some(j)
        })
        .collect()
}

/// When both configurations lie exactly on `C_n` and one is a grid
/// transform of the other, finds that transform in integer arithmetic so
/// the reported distance is exactly zero.
fn exact_grid_alignment(x: &Configuration, y: &Configuration) -> Option<OrthogonalTransform> {
    let k = x.len();
    let ix = grid_indices(x, k)?;
    let iy = grid_indices(y, k)?;
    let step = TAU / k as f64;
    let shift = (ix[0] + k - iy[0]) % k;
    if ix.iter().zip(&iy).all(|(&a, &b)| (b + shift) % k == a) {
        return Some(OrthogonalTransform::rotation(step * shift as f64));
    }
    let shift = (ix[0] + iy[0]) % k;
    if ix.iter().zip(&iy).all(|(&a, &b)| (shift + k - b) % k == a) {
        return Some(OrthogonalTransform::reflection(step * shift as f64));
    }
    None
}

/// Convenience wrapper returning only the aligned `d∞` value.
pub fn aligned_dinf_value(x: &Configuration, y: &Configuration) -> Result<f64> {
    aligned_dinf(x, y).map(|(v, _)| v)
}

/// `min_{Q ∈ O(2)} d1(x, Qy)`.
///
/// For a fixed branch the objective `Σ d(rᵢ, φ)` is piecewise linear in `φ`
/// and concave between consecutive residuals, so its minimum sits on one of
/// the residuals `rᵢ`. Exhausting them is `O(n²)`.
pub fn aligned_d1(x: &Configuration, y: &Configuration) -> Result<f64> {
    check_len(x, y)?;
    if x.is_empty() {
        return Err(Error::Empty("aligned_d1 needs n >= 1"));
    }
    let rot: Vec<f64> = x.points.iter().zip(&y.points).map(|(a, b)| a.0 - b.0).collect();
    let refl: Vec<f64> = x.points.iter().zip(&y.points).map(|(a, b)| a.0 + b.0).collect();
    let mut best = f64::INFINITY;
    for r in [&rot, &refl] {
        for &phi in r.iter() {
            let total: f64 = r.iter().map(|&ri| arc_distance(ri, phi)).sum();
            best = best.min(total);
        }
    }
    Ok(best)
}

/// `d∞(x, Πₙ)`: distance to the nearest regular configuration.
///
/// Only order-preserving cyclic assignments of the sorted points to the
/// grid are evaluated, in both orientations (`2n` candidates, `O(n²)`).
pub fn dist_to_regular(x: &Configuration) -> Result<f64> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty("dist_to_regular needs n >= 1"));
    }
    let mut sorted: Vec<f64> = x.angles().collect();
    sorted.sort_by(f64::total_cmp);
    let grid = RegularGrid { k: n };
    let mut best = f64::INFINITY;
    for shift in 0..n {
        let mut fwd = 0.0_f64;
        let mut bwd = 0.0_f64;
        for (i, &a) in sorted.iter().enumerate() {
            fwd = fwd.max(arc_distance(a, grid.angle(i + shift)));
            bwd = bwd.max(arc_distance(a, grid.angle(shift + n - i)));
            if fwd >= best && bwd >= best {
                break;
            }
        }
        best = best.min(fwd).min(bwd);
    }
    Ok(best)
}

/// `sup_I |V_I(x)|` with `V_I(x) = N_I(x) − k|I|/(2π)`, over closed arcs
/// `I = [a, b]` (counter-clockwise from `a` to `b`) whose endpoints are
/// points of `x` or of the grid `C_k`, `k = |x|`.
pub fn interval_statistic_sup(x: &Configuration) -> f64 {
    let k = x.len();
    if k == 0 {
        return 0.0;
    }
    let mut pts: Vec<f64> = x.angles().collect();
    pts.sort_by(f64::total_cmp);
    let grid = RegularGrid { k };
    let mut ends: Vec<f64> = pts.iter().copied().chain((0..k).map(|j| grid.angle(j))).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    // lt[e] = #{p < e}, le[e] = #{p <= e}
    let lt: Vec<usize> = ends.iter().map(|&e| pts.partition_point(|&p| p < e)).collect();
    let le: Vec<usize> = ends.iter().map(|&e| pts.partition_point(|&p| p <= e)).collect();
    let kf = k as f64;
    let mut sup = 0.0_f64;
    for (ia, &a) in ends.iter().enumerate() {
        for (ib, &b) in ends.iter().enumerate() {
            let (count, len) = if ia <= ib {
                (le[ib] - lt[ia], b - a)
            } else {
                (k - lt[ia] + le[ib], b + TAU - a)
            };
            let v = count as f64 - kf * len / TAU;
            sup = sup.max(v.abs());
        }
    }
    sup
}
