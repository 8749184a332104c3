//! Localize-and-refine estimation.
//!
//! 1. Localize a subset `S` on the grid `C_{|S|}` (QAP or spectral).
//! 2. Refine every point outside `S` by a one-dimensional grid search
//!    against the localized subset.
//! 3. Repeat with a second subset and glue the two halves with the grid
//!    transform that best aligns their overlap.
//!
//! Without splitting, the full matrix is localized and every point is
//! refined against all the others.

use std::cmp::Ordering;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    aligned_d1, aligned_dinf, arc_distance, geodesic_dist, grid_transforms, CirclePoint, Configuration,
    OrthogonalTransform, RegularGrid, TransformKind,
};
use crate::model::AffinityMatrix;
use crate::par::{map_with, Execution};
use crate::rng::{stream, Purpose, StreamRng};
use crate::seriation::{positions_to_map, seriation_loss, Permutation};
use crate::spectral::spectral_localization;

/// Default size up to which the QAP is solved by enumeration.
pub const EXACT_THRESHOLD: usize = 9;
/// Longest slot arc touched by reversal and rotation moves.
const MAX_SEGMENT: usize = 32;

/// `Σ_{i,j} A_ij d(x_i, x_j)`.
pub fn qap_objective(x: &Configuration, a: &AffinityMatrix) -> Result<f64> {
    let k = a.n();
    if x.len() != k {
        return Err(Error::LengthMismatch { expected: k, actual: x.len() });
    }
    let mut total = 0.0;
    for i in 0..k {
        let row = a.row(i);
        for j in 0..k {
            total += row[j] * geodesic_dist(x[i], x[j]);
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSearch {
    pub restarts: usize,
    pub max_sweeps: usize,
}

impl Default for LocalSearch {
    fn default() -> Self {
        LocalSearch { restarts: 20, max_sweeps: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QapStrategy {
    /// Enumerate when `k <= threshold`, otherwise use `fallback`.
    ExactIfSmall { threshold: usize, fallback: LocalSearch },
    LocalSearch(LocalSearch),
}

impl Default for QapStrategy {
    fn default() -> Self {
        QapStrategy::ExactIfSmall { threshold: EXACT_THRESHOLD, fallback: LocalSearch::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QapSolution {
    /// Item `i` sits at grid point `slots[i]` of `C_k`.
    pub slots: Vec<usize>,
    pub assignment: Configuration,
    pub objective: f64,
    pub exact: bool,
}

/// Objective evaluation on slot assignments with a cached distance table.
struct SlotProblem<'a> {
    k: usize,
    a: &'a AffinityMatrix,
    /// `cyc[t]` = geodesic distance between grid points `t` apart.
    cyc: Vec<f64>,
}

impl<'a> SlotProblem<'a> {
    fn new(a: &'a AffinityMatrix) -> Self {
        let k = a.n();
        let grid = RegularGrid::new(k.max(1)).expect("k >= 1");
        let cyc = (0..k).map(|t| grid.angle(t.min(k - t))).collect();
        SlotProblem { k, a, cyc }
    }

    #[inline]
    fn d(&self, s: usize, t: usize) -> f64 {
        self.cyc[s.abs_diff(t)]
    }

    fn objective(&self, p: &[usize]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.k {
            let row = self.a.row(i);
            for j in i + 1..self.k {
                total += (row[j] + self.a.get(j, i)) * self.d(p[i], p[j]);
            }
        }
        total
    }

    /// Objective change when items `x` and `y` exchange slots.
    fn swap_delta(&self, p: &[usize], x: usize, y: usize) -> f64 {
        let (px, py) = (p[x], p[y]);
        let (rx, ry) = (self.a.row(x), self.a.row(y));
        let mut delta = 0.0;
        for j in 0..self.k {
            if j == x || j == y {
                continue;
            }
            let pj = p[j];
            delta += (rx[j] - ry[j]) * (self.d(py, pj) - self.d(px, pj));
        }
        2.0 * delta
    }

    /// Objective change for moving each `moved[m]` to slot `new_slot[m]`.
    fn move_delta(&self, p: &[usize], moved: &[usize], new_slot: &[usize], in_moved: &[bool]) -> f64 {
        let mut delta = 0.0;
        for (m, &i) in moved.iter().enumerate() {
            let row = self.a.row(i);
            let (old, new) = (p[i], new_slot[m]);
            for j in 0..self.k {
                if !in_moved[j] {
                    delta += 2.0 * row[j] * (self.d(new, p[j]) - self.d(old, p[j]));
                }
            }
            for (m2, &j) in moved.iter().enumerate() {
                delta += row[j] * (self.d(new, new_slot[m2]) - self.d(old, p[j]));
            }
        }
        delta
    }

    fn solution(&self, slots: Vec<usize>, exact: bool) -> QapSolution {
        let grid = RegularGrid::new(self.k).expect("k >= 1");
        let assignment = Configuration::new(slots.iter().map(|&s| grid.point(s)).collect());
        let objective = self.objective(&slots);
        QapSolution { slots, assignment, objective, exact }
    }

    /// Enumerates assignments with item 0 pinned to slot 0; the objective is
    /// invariant under rotating every slot, so nothing is lost.
    fn exact(&self) -> Vec<usize> {
        let k = self.k;
        let mut best = (f64::INFINITY, (0..k).collect::<Vec<_>>());
        let mut p = vec![usize::MAX; k];
        let mut used = vec![false; k];
        p[0] = 0;
        used[0] = true;
        self.dfs(1, 0.0, &mut p, &mut used, &mut best);
        best.1
    }

    fn dfs(&self, i: usize, partial: f64, p: &mut [usize], used: &mut [bool], best: &mut (f64, Vec<usize>)) {
        if i == self.k {
            if partial < best.0 {
                *best = (partial, p.to_vec());
            }
            return;
        }
        let row = self.a.row(i);
        for s in 0..self.k {
            if used[s] {
                continue;
            }
            let mut add = 0.0;
            for j in 0..i {
                add += (row[j] + self.a.get(j, i)) * self.d(s, p[j]);
            }
            p[i] = s;
            used[s] = true;
            self.dfs(i + 1, partial + add, p, used, best);
            used[s] = false;
        }
        p[i] = usize::MAX;
    }

    fn local_search<R: Rng>(&self, rng: &mut R, max_sweeps: usize) -> Vec<usize> {
        let k = self.k;
        let mut p: Vec<usize> = (0..k).collect();
        p.shuffle(rng);
        let mut item_at = vec![0; k];
        for (i, &s) in p.iter().enumerate() {
            item_at[s] = i;
        }
        let scale = self.a.max_abs().max(f64::MIN_POSITIVE) * std::f64::consts::PI * k as f64;
        let tol = 1e-12 * scale;
        let mut in_moved = vec![false; k];
        let mut moved = Vec::with_capacity(MAX_SEGMENT);
        let mut new_slot = Vec::with_capacity(MAX_SEGMENT);
        for _ in 0..max_sweeps {
            let mut improved = false;
            for x in 0..k {
                for y in x + 1..k {
                    if self.swap_delta(&p, x, y) < -tol {
                        item_at.swap(p[x], p[y]);
                        p.swap(x, y);
                        improved = true;
                    }
                }
            }
            if improved {
                continue;
            }
            // segment moves on the slot cycle: reverse an arc, or rotate it
            // by one position in either direction
            let max_len = MAX_SEGMENT.min(k / 2);
            'outer: for start in 0..k {
                for len in 3..=max_len {
                    for mv in 0..3 {
                        moved.clear();
                        new_slot.clear();
                        for t in 0..len {
                            let slot = (start + t) % k;
                            let item = item_at[slot];
                            let target = match mv {
                                0 => start + len - 1 - t,
                                1 => start + (t + 1) % len,
                                _ => start + (t + len - 1) % len,
                            } % k;
                            moved.push(item);
                            new_slot.push(target);
                        }
                        for &i in &moved {
                            in_moved[i] = true;
                        }
                        let delta = self.move_delta(&p, &moved, &new_slot, &in_moved);
                        for &i in &moved {
                            in_moved[i] = false;
                        }
                        if delta < -tol {
                            for (m, &i) in moved.iter().enumerate() {
                                p[i] = new_slot[m];
                                item_at[new_slot[m]] = i;
                            }
                            improved = true;
                            break 'outer;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        p
    }
}

/// Minimises `⟨A, D(x)⟩` over assignments of `C_k` to the `k` items.
///
/// Local-search restarts draw their seeds from `rng` up front, so the result
/// depends only on the generator state.
pub fn solve_qap<R: Rng + ?Sized>(a: &AffinityMatrix, strategy: QapStrategy, rng: &mut R) -> Result<QapSolution> {
    solve_qap_with(a, strategy, rng, Execution::Sequential)
}

pub fn solve_qap_with<R: Rng + ?Sized>(
    a: &AffinityMatrix,
    strategy: QapStrategy,
    rng: &mut R,
    exec: Execution,
) -> Result<QapSolution> {
    let k = a.n();
    if k == 0 {
        return Err(Error::Empty("QAP on an empty matrix"));
    }
    let problem = SlotProblem::new(a);
    let ls = match strategy {
        QapStrategy::ExactIfSmall { threshold, .. } if k <= threshold => {
            return Ok(problem.solution(problem.exact(), true));
        }
        QapStrategy::ExactIfSmall { fallback, .. } => fallback,
        QapStrategy::LocalSearch(ls) => ls,
    };
    let seeds: Vec<u64> = (0..ls.restarts.max(1)).map(|_| rng.random()).collect();
    let runs = map_with(exec, seeds.len(), |r| {
        let slots = problem.local_search(&mut StreamRng::seed_from_u64(seeds[r]), ls.max_sweeps);
        let obj = problem.objective(&slots);
        (obj, slots)
    });
    let (_, slots) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    Ok(problem.solution(slots, false))
}

/// Candidate grid for refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineGrid {
    /// `C_{|S|}`
    #[default]
    Full,
    /// `C_{⌈√|S|⌉}`
    Sqrt,
}

impl RefineGrid {
    pub fn grid(&self, s: usize) -> Result<RegularGrid> {
        match self {
            RefineGrid::Full => RegularGrid::new(s),
            RefineGrid::Sqrt => RegularGrid::new((s as f64).sqrt().ceil() as usize),
        }
    }
}

/// Index of the grid point minimising `Σ_j a_j d(z, x_j)`, with its value.
/// Values within `1e−12` (relative) of the running best count as ties and
/// keep the smaller index.
pub fn refine_index(a_row: &[f64], x1: &Configuration, candidates: &RegularGrid) -> Result<(usize, f64)> {
    if a_row.len() != x1.len() {
        return Err(Error::LengthMismatch { expected: x1.len(), actual: a_row.len() });
    }
    if a_row.is_empty() {
        return Err(Error::Empty("refinement against an empty subset"));
    }
    let angles: Vec<f64> = x1.angles().collect();
    let scale: f64 = a_row.iter().map(|v| v.abs()).sum::<f64>() * std::f64::consts::PI;
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut best = (0, f64::INFINITY);
    for c in 0..candidates.size() {
        let z = candidates.angle(c);
        let v: f64 = a_row.iter().zip(&angles).map(|(w, &t)| w * arc_distance(z, t)).sum();
        if v < best.1 - tol {
            best = (c, v);
        }
    }
    Ok(best)
}

pub fn refine_point(a_row: &[f64], x1: &Configuration, candidates: &RegularGrid) -> Result<CirclePoint> {
    refine_index(a_row, x1, candidates).map(|(c, _)| candidates.point(c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub transform: OrthogonalTransform,
    pub config: Configuration,
    /// `d∞` between the two estimates on the overlap after alignment.
    pub discrepancy: f64,
}

/// Aligns `xb` onto `xa` over `overlap` with the best of the `2k` grid
/// transforms of `C_k`, then glues: `xa` where defined, the transformed
/// `xb` elsewhere.
///
/// Transforms are scanned by increasing angle, rotation before reflection;
/// a later candidate must win by more than `1e−12`.
pub fn merge(
    xa: &[Option<CirclePoint>],
    xb: &[Option<CirclePoint>],
    overlap: &[usize],
    k: usize,
) -> Result<MergeOutcome> {
    let n = xa.len();
    if xb.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: xb.len() });
    }
    if overlap.is_empty() {
        return Err(Error::Empty("merge needs a non-empty overlap"));
    }
    let pairs: Vec<(CirclePoint, CirclePoint)> = overlap
        .iter()
        .map(|&i| match (xa.get(i).copied().flatten(), xb.get(i).copied().flatten()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidArgument(format!("overlap index {i} is not covered by both estimates"))),
        })
        .collect::<Result<_>>()?;
    let mut transforms = grid_transforms(k);
    transforms.sort_by(|p, q| {
        p.angle
            .total_cmp(&q.angle)
            .then(match (p.kind, q.kind) {
                (TransformKind::Rotation, TransformKind::Reflection) => Ordering::Less,
                (TransformKind::Reflection, TransformKind::Rotation) => Ordering::Greater,
                _ => Ordering::Equal,
            })
    });
    let mut best = (f64::INFINITY, OrthogonalTransform::identity());
    for q in transforms {
        let d = pairs
            .iter()
            .map(|&(a, b)| geodesic_dist(a, q.apply(b)))
            .fold(0.0, f64::max);
        if d < best.0 - 1e-12 {
            best = (d, q);
        }
    }
    let (discrepancy, transform) = best;
    let points = (0..n)
        .map(|i| match (xa[i], xb[i]) {
            (Some(a), _) => Ok(a),
            (None, Some(b)) => Ok(transform.apply(b)),
            (None, None) => Err(Error::InvalidArgument(format!("index {i} is covered by neither estimate"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MergeOutcome { transform, config: Configuration::new(points), discrepancy })
}

/// Two disjoint localization subsets `S`, `S′ ⊂ S̄`, each of size `⌊n/4⌋`,
/// stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub n: usize,
    pub s: Vec<usize>,
    pub s_prime: Vec<usize>,
}

impl SplitPlan {
    pub fn draw<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 8 {
            return Err(Error::TooSmall { n, reason: "sample splitting needs n >= 8" });
        }
        let m = n / 4;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let mut s = idx[..m].to_vec();
        let mut s_prime = idx[m..2 * m].to_vec();
        s.sort_unstable();
        s_prime.sort_unstable();
        Ok(SplitPlan { n, s, s_prime })
    }

    fn membership(&self, set: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &i in set {
            m[i] = true;
        }
        m
    }

    pub fn complement(&self) -> Vec<usize> {
        let m = self.membership(&self.s);
        (0..self.n).filter(|&i| !m[i]).collect()
    }

    pub fn complement_prime(&self) -> Vec<usize> {
        let m = self.membership(&self.s_prime);
        (0..self.n).filter(|&i| !m[i]).collect()
    }

    /// `S̄ ∩ S̄′`.
    pub fn overlap(&self) -> Vec<usize> {
        let (a, b) = (self.membership(&self.s), self.membership(&self.s_prime));
        (0..self.n).filter(|&i| !a[i] && !b[i]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    Qap,
    #[default]
    Spectral,
}

impl std::str::FromStr for Initializer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qap" => Ok(Initializer::Qap),
            "spectral" => Ok(Initializer::Spectral),
            _ => Err(Error::InvalidArgument(format!("unknown initializer {s:?} (qap|spectral)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub split: bool,
    pub initializer: Initializer,
    pub qap: QapStrategy,
    /// When false the initial localization is returned as is (no-split only).
    pub refine: bool,
    pub refine_grid: RefineGrid,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            split: false,
            initializer: Initializer::Spectral,
            qap: QapStrategy::default(),
            refine: true,
            refine_grid: RefineGrid::Full,
            execution: Execution::Sequential,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub localize_ms: f64,
    pub refine_ms: f64,
    pub merge_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeSummary {
    pub transform: OrthogonalTransform,
    pub discrepancy: f64,
    pub overlap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub aligned_dinf: f64,
    pub d1_over_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seriation_loss: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub n: usize,
    pub seed: u64,
    pub options: PipelineOptions,
    pub estimate: Configuration,
    /// Whether every QAP call was solved to optimality (QAP initializer only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qap_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merge: Option<MergeSummary>,
    pub timings: StageTimings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub losses: Option<Losses>,
}

impl EstimationReport {
    /// Fills `losses` against a known configuration and, optionally, a
    /// hidden ordering.
    pub fn evaluate(&mut self, truth: &Configuration, sigma_star: Option<&Permutation>) -> Result<Losses> {
        let losses = evaluate(&self.estimate, truth, sigma_star)?;
        self.losses = Some(losses);
        Ok(losses)
    }
}

/// Aligned `d∞`, aligned `d1 / n`, and the seriation loss when an ordering
/// is supplied.
pub fn evaluate(estimate: &Configuration, truth: &Configuration, sigma_star: Option<&Permutation>) -> Result<Losses> {
    let (aligned_dinf, _) = aligned_dinf(estimate, truth)?;
    let d1_over_n = aligned_d1(estimate, truth)? / truth.len() as f64;
    let seriation_loss = sigma_star
        .map(|s| seriation_loss(&positions_to_map(estimate), s))
        .transpose()?;
    Ok(Losses { aligned_dinf, d1_over_n, seriation_loss })
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Localized {
    config: Configuration,
    qap_exact: Option<bool>,
}

fn localize(a: &AffinityMatrix, opts: &PipelineOptions, rng: &mut StreamRng) -> Result<Localized> {
    match opts.initializer {
        Initializer::Spectral => Ok(Localized { config: spectral_localization(a)?, qap_exact: None }),
        Initializer::Qap => {
            let sol = solve_qap_with(a, opts.qap, rng, opts.execution)?;
            Ok(Localized { config: sol.assignment, qap_exact: Some(sol.exact) })
        }
    }
}

/// Refines each target against the localized subset `subset` (positions
/// `x1`), returning one point per target.
///
/// When a target belongs to the subset (no splitting), its zero diagonal
/// entry is replaced by the largest entry of its row. A zero self-weight
/// would make the row non-monotone in distance and shift the argmin by a
/// grid step even on noiseless regular data.
fn refine_all(
    a: &AffinityMatrix,
    targets: &[usize],
    subset: &[usize],
    x1: &Configuration,
    grid: &RegularGrid,
    exec: Execution,
) -> Result<Vec<CirclePoint>> {
    map_with(exec, targets.len(), |t| {
        let i = targets[t];
        let mut row = a.row_subset(i, subset);
        if let Some(pos) = subset.iter().position(|&j| j == i) {
            row[pos] = row
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != pos)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max);
        }
        refine_point(&row, x1, grid)
    })
    .into_iter()
    .collect()
}

/// Runs the full procedure. Randomness (subset draws, QAP restarts) comes
/// from streams derived from `seed`.
pub fn localize_and_refine(a: &AffinityMatrix, opts: &PipelineOptions, seed: u64) -> Result<EstimationReport> {
    let n = a.n();
    let start = Instant::now();
    let mut qap_rng = stream(seed, Purpose::Qap);
    let mut timings = StageTimings::default();

    if !opts.split {
        if n < 3 {
            return Err(Error::TooSmall { n, reason: "estimation needs at least 3 points" });
        }
        let t = Instant::now();
        let init = localize(a, opts, &mut qap_rng)?;
        timings.localize_ms = ms_since(t);
        let estimate = if opts.refine {
            let t = Instant::now();
            let all: Vec<usize> = (0..n).collect();
            let grid = opts.refine_grid.grid(n)?;
            let pts = refine_all(a, &all, &all, &init.config, &grid, opts.execution)?;
            timings.refine_ms = ms_since(t);
            Configuration::new(pts)
        } else {
            init.config
        };
        timings.total_ms = ms_since(start);
        return Ok(EstimationReport {
            n,
            seed,
            options: *opts,
            estimate,
            qap_exact: init.qap_exact,
            merge: None,
            timings,
            losses: None,
        });
    }

    if !opts.refine {
        return Err(Error::InvalidArgument("the split procedure always refines; use refine = true".into()));
    }
    let plan = SplitPlan::draw(n, &mut stream(seed, Purpose::Split))?;
    let n0 = plan.s.len();
    let grid = opts.refine_grid.grid(n0)?;

    let mut halves = Vec::with_capacity(2);
    let mut exact = true;
    for (subset, targets) in [(&plan.s, plan.complement()), (&plan.s_prime, plan.complement_prime())] {
        let t = Instant::now();
        let init = localize(&a.submatrix(subset), opts, &mut qap_rng)?;
        timings.localize_ms += ms_since(t);
        exact &= init.qap_exact.unwrap_or(true);
        let t = Instant::now();
        let pts = refine_all(a, &targets, subset, &init.config, &grid, opts.execution)?;
        timings.refine_ms += ms_since(t);
        let mut partial = vec![None; n];
        for (&i, p) in targets.iter().zip(pts) {
            partial[i] = Some(p);
        }
        halves.push(partial);
    }

    let t = Instant::now();
    let overlap = plan.overlap();
    let merged = merge(&halves[0], &halves[1], &overlap, grid.size())?;
    timings.merge_ms = ms_since(t);
    timings.total_ms = ms_since(start);
    Ok(EstimationReport {
        n,
        seed,
        options: *opts,
        estimate: merged.config,
        qap_exact: (opts.initializer == Initializer::Qap).then_some(exact),
        merge: Some(MergeSummary {
            transform: merged.transform,
            discrepancy: merged.discrepancy,
            overlap: overlap.len(),
        }),
        timings,
        losses: None,
    })
}
