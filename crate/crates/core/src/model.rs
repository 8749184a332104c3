//! Affinity functions, position samplers and noisy affinity matrices.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_dist, CirclePoint, Configuration, RegularGrid};

type PairFn = dyn Fn(CirclePoint, CirclePoint) -> f64 + Send + Sync;
type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kernel {
    /// `f(x, y) = g(d(x, y))`.
    Geometric(Arc<ProfileFn>),
    General(Arc<PairFn>),
}

/// A symmetric affinity function `f: C × C → [0, 1]` with declared
/// bi-Lipschitz constants.
///
/// `c_lower` and `c_upper` are per-radian slopes; the slack is
/// `εₙ = c_slack · √(log n / n)`.
#[derive(Clone)]
pub struct AffinityModel {
    name: String,
    kernel: Kernel,
    pub c_lower: f64,
    pub c_upper: f64,
    pub c_slack: f64,
}

impl fmt::Debug for AffinityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffinityModel")
            .field("name", &self.name)
            .field("geometric", &self.is_geometric())
            .field("c_lower", &self.c_lower)
            .field("c_upper", &self.c_upper)
            .field("c_slack", &self.c_slack)
            .finish()
    }
}

impl AffinityModel {
    /// A geometric model `f = g ∘ d` from its profile `g: [0, π] → [0, 1]`.
    pub fn geometric<G>(name: impl Into<String>, g: G, c_lower: f64, c_upper: f64, c_slack: f64) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        AffinityModel {
            name: name.into(),
            kernel: Kernel::Geometric(Arc::new(g)),
            c_lower,
            c_upper,
            c_slack,
        }
    }

    /// An arbitrary symmetric pair function. Symmetry is enforced by
    /// evaluating on the ordered pair `(min, max)` of arguments.
    pub fn general<F>(name: impl Into<String>, f: F, c_lower: f64, c_upper: f64, c_slack: f64) -> Self
    where
        F: Fn(CirclePoint, CirclePoint) -> f64 + Send + Sync + 'static,
    {
        AffinityModel {
            name: name.into(),
            kernel: Kernel::General(Arc::new(f)),
            c_lower,
            c_upper,
            c_slack,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self.kernel, Kernel::Geometric(_))
    }

    /// The profile `g` of a geometric model.
    pub fn profile(&self) -> Option<&ProfileFn> {
        match &self.kernel {
            Kernel::Geometric(g) => Some(g.as_ref()),
            Kernel::General(_) => None,
        }
    }

    #[inline]
    pub fn eval(&self, x: CirclePoint, y: CirclePoint) -> f64 {
        match &self.kernel {
            Kernel::Geometric(g) => g(geodesic_dist(x, y)),
            Kernel::General(f) => {
                if x.theta() <= y.theta() {
                    f(x, y)
                } else {
                    f(y, x)
                }
            }
        }
    }

    /// `εₙ = c_slack · √(log n / n)`.
    pub fn slack(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        self.c_slack * (n.ln() / n).sqrt()
    }
}

fn logit_profile(d: f64) -> f64 {
    let e = (-d).exp();
    e / (1.0 + e)
}

/// `min |g'|` of the logit profile over `[0, π]`, by direct evaluation of
/// the derivative on a fine grid that includes both endpoints.
fn logit_min_slope() -> f64 {
    const STEPS: usize = 10_000;
    (0..=STEPS)
        .map(|s| {
            let g = logit_profile(PI * s as f64 / STEPS as f64);
            g * (1.0 - g)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Models shipped with the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinModel {
    /// `1 − d / (2π)`
    Affine,
    /// `3/4 − d / (4π)`
    F0,
    /// `e^{−d} / (1 + e^{−d})`
    Logit,
}

impl BuiltinModel {
    pub const ALL: [BuiltinModel; 3] = [BuiltinModel::Affine, BuiltinModel::F0, BuiltinModel::Logit];

    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinModel::Affine => "affine",
            BuiltinModel::F0 => "f0",
            BuiltinModel::Logit => "logit",
        }
    }

    pub fn model(&self) -> AffinityModel {
        match self {
            BuiltinModel::Affine => {
                AffinityModel::geometric("affine", |d| 1.0 - d / TAU, 1.0 / TAU, 1.0 / TAU, 0.0)
            }
            BuiltinModel::F0 => AffinityModel::geometric(
                "f0",
                |d| 0.75 - d / (4.0 * PI),
                1.0 / (4.0 * PI),
                1.0 / (4.0 * PI),
                0.0,
            ),
            BuiltinModel::Logit => {
                AffinityModel::geometric("logit", logit_profile, logit_min_slope(), 0.25, 0.0)
            }
        }
    }
}

impl std::str::FromStr for BuiltinModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "affine" => Ok(BuiltinModel::Affine),
            "f0" => Ok(BuiltinModel::F0),
            "logit" => Ok(BuiltinModel::Logit),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

impl fmt::Display for BuiltinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Looks up a built-in model by name (`affine`, `f0`, `logit`).
pub fn builtin_model(name: &str) -> Result<AffinityModel> {
    name.parse::<BuiltinModel>().map(|m| m.model())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LipschitzCondition {
    /// `|f(x,y) − f(x,y')| ≤ c_upper · d(y,y') + εₙ`
    Upper,
    /// `f(x,y') − f(x,y) ≥ c_lower · (d(x,y) − d(x,y')) − εₙ` when `d(x,y) ≥ d(x,y')`
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: LipschitzCondition,
    pub x: f64,
    pub y: f64,
    pub y_prime: f64,
    /// Amount by which the inequality fails.
    pub excess: f64,
}

/// Evaluates both bi-Lipschitz conditions on every triple of a regular grid
/// with `grid_res` points. Violations smaller than `1e−12` are ignored.
pub fn check_bilipschitz(f: &AffinityModel, n: usize, grid_res: usize) -> Result<Vec<Violation>> {
    if grid_res < 3 {
        return Err(Error::InvalidArgument(format!("grid_res must be >= 3, got {grid_res}")));
    }
    const SLACK: f64 = 1e-12;
    let grid = RegularGrid::new(grid_res)?;
    let eps = f.slack(n);
    let m = grid_res;
    let vals: Vec<f64> = (0..m * m)
        .map(|ij| f.eval(grid.point(ij / m), grid.point(ij % m)))
        .collect();
    let dist = |a: usize, b: usize| geodesic_dist(grid.point(a), grid.point(b));
    let mut out = Vec::new();
    for x in 0..m {
        for y in 0..m {
            for yp in 0..m {
                let fxy = vals[x * m + y];
                let fxyp = vals[x * m + yp];
                let upper = (fxy - fxyp).abs() - (f.c_upper * dist(y, yp) + eps);
                if upper > SLACK {
                    out.push(Violation {
                        condition: LipschitzCondition::Upper,
                        x: grid.angle(x),
                        y: grid.angle(y),
                        y_prime: grid.angle(yp),
                        excess: upper,
                    });
                }
                let (dxy, dxyp) = (dist(x, y), dist(x, yp));
                if dxy >= dxyp {
                    let lower = (f.c_lower * (dxy - dxyp) - eps) - (fxyp - fxy);
                    if lower > SLACK {
                        out.push(Violation {
                            condition: LipschitzCondition::Lower,
                            x: grid.angle(x),
                            y: grid.angle(y),
                            y_prime: grid.angle(yp),
                            excess: lower,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// How latent positions are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionMode {
    /// i.i.d. uniform on the circle.
    Uniform,
    /// The regular grid `C_n` in random order.
    Regular,
    /// The regular grid in random order plus i.i.d. `U[−delta, delta]` jitter.
    Perturbed { delta: f64 },
}

pub fn sample_positions<R: Rng + ?Sized>(n: usize, mode: PositionMode, rng: &mut R) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::Empty("sample_positions needs n >= 1"));
    }
    match mode {
        PositionMode::Uniform => Ok(Configuration::from_angles(
            (0..n).map(|_| rng.random::<f64>() * TAU),
        )),
        PositionMode::Regular => sample_positions(n, PositionMode::Perturbed { delta: 0.0 }, rng),
        PositionMode::Perturbed { delta } => {
            if !(delta >= 0.0 && delta.is_finite()) {
                return Err(Error::InvalidArgument(format!("jitter must be finite and >= 0, got {delta}")));
            }
            let grid = RegularGrid::new(n)?;
            let mut slots: Vec<usize> = (0..n).collect();
            slots.shuffle(rng);
            let angles: Vec<f64> = if delta > 0.0 {
                slots
                    .iter()
                    .map(|&s| grid.angle(s) + rng.random_range(-delta..=delta))
                    .collect()
            } else {
                slots.iter().map(|&s| grid.angle(s)).collect()
            };
            Ok(Configuration::from_angles(angles))
        }
    }
}

/// Observation noise `E_ij` on the strict upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum NoiseSpec {
    #[default]
    None,
    Gaussian {
        sd: f64,
    },
    /// `A_ij ~ Bernoulli(F_ij)`.
    Bernoulli,
}

impl NoiseSpec {
    pub fn gaussian(sd: f64) -> Self {
        NoiseSpec::Gaussian { sd }
    }

    /// Standard deviation for reporting; 0 for no noise, NaN for Bernoulli.
    pub fn sd(&self) -> f64 {
        match self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { sd } => *sd,
            NoiseSpec::Bernoulli => f64::NAN,
        }
    }
}

/// A symmetric `n × n` matrix with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl AffinityMatrix {
    pub fn zeros(n: usize) -> Self {
        AffinityMatrix { n, data: vec![0.0; n * n] }
    }

    /// Builds from the strict upper triangle given by `f(i, j)`, `i < j`.
    pub fn from_upper<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Validates a dense row-major buffer: entries must be finite and
    /// symmetric within `tol` (relative to the largest magnitude). Mirrored
    /// pairs are averaged and the diagonal is zeroed. Returns the matrix and
    /// whether a non-zero diagonal was discarded.
    pub fn from_dense(n: usize, data: Vec<f64>, tol: f64) -> Result<(Self, bool)> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, actual: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite entry at ({}, {})", pos / n, pos % n)));
        }
        let scale = data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let mut m = AffinityMatrix { n, data };
        let mut diag_dropped = false;
        for i in 0..n {
            if m.data[i * n + i] != 0.0 {
                diag_dropped = true;
                m.data[i * n + i] = 0.0;
            }
            for j in i + 1..n {
                let (a, b) = (m.data[i * n + j], m.data[j * n + i]);
                let diff = (a - b).abs();
                if diff > tol * scale {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
                let avg = 0.5 * (a + b);
                m.data[i * n + j] = avg;
                m.data[j * n + i] = avg;
            }
        }
        Ok((m, diag_dropped))
    }

    /// Wraps a buffer without validation. Callers guarantee symmetry.
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        AffinityMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `A_SS` for the given index list, in that order.
    pub fn submatrix(&self, idx: &[usize]) -> AffinityMatrix {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        AffinityMatrix { n: k, data }
    }

    /// Row `i` restricted to the given columns.
    pub fn row_subset(&self, i: usize, cols: &[usize]) -> Vec<f64> {
        let row = self.row(i);
        cols.iter().map(|&j| row[j]).collect()
    }

    /// Largest absolute deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The noiseless signal matrix `F_ij = f(x_i, x_j)` (zero diagonal).
pub fn signal_matrix(x: &Configuration, f: &AffinityModel) -> AffinityMatrix {
    AffinityMatrix::from_upper(x.len(), |i, j| f.eval(x[i], x[j]))
}

/// `A_ij = f(x_i, x_j) + E_ij` for `i < j`, mirrored, zero diagonal.
///
/// Draws are made row by row over the strict upper triangle, so a given
/// seed always produces the same matrix.
pub fn generate_matrix<R: Rng + ?Sized>(
    x: &Configuration,
    f: &AffinityModel,
    noise: NoiseSpec,
    rng: &mut R,
) -> Result<AffinityMatrix> {
    let n = x.len();
    let mut m = AffinityMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let signal = f.eval(x[i], x[j]);
            let v = match noise {
                NoiseSpec::None => signal,
                NoiseSpec::Gaussian { sd } => {
                    if !sd.is_finite() || sd < 0.0 {
                        return Err(Error::InvalidArgument(format!("noise sd must be finite and >= 0, got {sd}")));
                    }
                    let z: f64 = rng.sample(StandardNormal);
                    signal + sd * z
                }
                NoiseSpec::Bernoulli => {
                    if !(0.0..=1.0).contains(&signal) {
                        return Err(Error::SignalOutOfRange { i, j, value: signal });
                    }
                    if rng.random::<f64>() < signal {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            m.data[i * n + j] = v;
            m.data[j * n + i] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist_to_regular;
    use crate::rng::{stream, Purpose};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(t: f64) -> CirclePoint {
        CirclePoint::new(t)
    }

    #[test]
    fn builtin_values() {
        let affine = builtin_model("affine").unwrap();
        assert_eq!(affine.eval(p(1.0), p(1.0)), 1.0);
        let f0 = builtin_model("f0").unwrap();
        assert!((f0.eval(p(0.0), p(PI)) - 0.5).abs() < 1e-15);
        let logit = builtin_model("logit").unwrap();
        assert_eq!(logit.eval(p(2.0), p(2.0)), 0.5);
        assert!(matches!(builtin_model("cosine"), Err(Error::UnknownModel(_))));
        assert_eq!(affine.c_lower, 1.0 / TAU);
        assert_eq!(f0.c_upper, 1.0 / (4.0 * PI));
    }

    #[test]
    fn logit_constants() {
        let logit = BuiltinModel::Logit.model();
        // |g'| is decreasing on [0, π]; the minimum is at π
        let g = logit_profile(PI);
        assert!((logit.c_lower - g * (1.0 - g)).abs() < 1e-15);
        assert_eq!(logit.c_upper, 0.25);
    }

    #[test]
    fn models_are_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in BuiltinModel::ALL {
            let f = m.model();
            for _ in 0..1000 {
                let (a, b) = (p(rng.random::<f64>() * TAU), p(rng.random::<f64>() * TAU));
                assert_eq!(f.eval(a, b), f.eval(b, a));
                assert!((0.0..=1.0).contains(&f.eval(a, b)));
            }
        }
    }

    #[test]
    fn bilipschitz_builtin_models_pass() {
        for n in [16, 256, 4096] {
            assert!(check_bilipschitz(&BuiltinModel::Affine.model(), n, 48).unwrap().is_empty());
            assert!(check_bilipschitz(&BuiltinModel::F0.model(), n, 48).unwrap().is_empty());
        }
        assert!(check_bilipschitz(&BuiltinModel::Logit.model(), 256, 64).unwrap().is_empty());
    }

    #[test]
    fn bilipschitz_flat_function_fails_lower() {
        let flat = AffinityModel::general("one", |_, _| 1.0, 0.1, 0.1, 0.0);
        let v = check_bilipschitz(&flat, 100, 16).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|v| v.condition == LipschitzCondition::Lower));
        assert!(check_bilipschitz(&flat, 100, 2).is_err());
    }

    #[test]
    fn bilipschitz_slack_absorbs_small_bumps() {
        // a step of height 0.01 breaks pure Lipschitz but fits under εₙ
        let bumpy = AffinityModel::geometric(
            "bumpy",
            |d| 1.0 - d / TAU - if d > 1.0 { 0.01 } else { 0.0 },
            1.0 / TAU,
            1.0 / TAU,
            0.0,
        );
        assert!(!check_bilipschitz(&bumpy, 1000, 40).unwrap().is_empty());
        let mut relaxed = bumpy.clone();
        relaxed.c_slack = 1.0;
        assert!(check_bilipschitz(&relaxed, 1000, 40).unwrap().is_empty());
    }

    #[test]
    fn regular_positions_are_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = sample_positions(4, PositionMode::Regular, &mut rng).unwrap();
        let mut angles: Vec<f64> = x.angles().collect();
        angles.sort_by(f64::total_cmp);
        assert_eq!(angles, vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
    }

    #[test]
    fn zero_jitter_is_regular() {
        let a = sample_positions(50, PositionMode::Regular, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = sample_positions(50, PositionMode::Perturbed { delta: 0.0 }, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        let c = sample_positions(50, PositionMode::Perturbed { delta: 0.01 }, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(dist_to_regular(&c).unwrap() <= 0.01 + 1e-12);
    }

    #[test]
    fn uniform_positions_are_close_to_regular() {
        let n = 10_000;
        let bound = 10.0 * ((n as f64).ln() / n as f64).sqrt();
        let hits = (0..100)
            .filter(|&s| {
                let x = sample_positions(n, PositionMode::Uniform, &mut stream(s, Purpose::Positions)).unwrap();
                dist_to_regular(&x).unwrap() <= bound
            })
            .count();
        assert!(hits >= 99, "{hits}/100");
    }

    #[test]
    fn noiseless_matrix_is_the_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = sample_positions(30, PositionMode::Uniform, &mut rng).unwrap();
        let f = BuiltinModel::Affine.model();
        let a = generate_matrix(&x, &f, NoiseSpec::None, &mut rng).unwrap();
        assert_eq!(a, signal_matrix(&x, &f));
        let b = generate_matrix(&x, &f, NoiseSpec::gaussian(0.0), &mut rng).unwrap();
        assert_eq!(a, b);
        for i in 0..30 {
            assert_eq!(a.get(i, i), 0.0);
            for j in 0..30 {
                assert_eq!(a.get(i, j), a.get(j, i));
                if i != j {
                    assert_eq!(a.get(i, j), f.eval(x[i], x[j]));
                }
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let x = sample_positions(40, PositionMode::Uniform, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let f = BuiltinModel::Logit.model();
        for noise in [NoiseSpec::gaussian(0.3), NoiseSpec::Bernoulli] {
            let a = generate_matrix(&x, &f, noise, &mut stream(77, Purpose::Noise)).unwrap();
            let b = generate_matrix(&x, &f, noise, &mut stream(77, Purpose::Noise)).unwrap();
            assert_eq!(a.as_slice(), b.as_slice());
            assert_eq!(a.asymmetry(), 0.0);
        }
    }

    #[test]
    fn bernoulli_mean_matches_signal() {
        let x = Configuration::from_angles([0.0, 1.0, 2.5]);
        let f = BuiltinModel::F0.model();
        let trials = 10_000;
        let mut sums = [0.0; 3];
        for s in 0..trials {
            let a = generate_matrix(&x, &f, NoiseSpec::Bernoulli, &mut stream(s, Purpose::Noise)).unwrap();
            sums[0] += a.get(0, 1);
            sums[1] += a.get(0, 2);
            sums[2] += a.get(1, 2);
        }
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let pij = f.eval(x[i], x[j]);
            let se = (pij * (1.0 - pij) / trials as f64).sqrt();
            let mean = sums[k] / trials as f64;
            assert!((mean - pij).abs() <= 3.0 * se, "({i},{j}) mean {mean} vs {pij}");
        }
    }

    #[test]
    fn bernoulli_rejects_out_of_range_signal() {
        let x = Configuration::from_angles([0.0, 1.0]);
        let f = AffinityModel::geometric("big", |_| 2.0, 0.0, 0.0, 0.0);
        let err = generate_matrix(&x, &f, NoiseSpec::Bernoulli, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(Error::SignalOutOfRange { .. })));
    }

    #[test]
    fn dense_validation() {
        let (m, dropped) = AffinityMatrix::from_dense(2, vec![1.0, 0.5, 0.5 + 1e-12, 0.0], 1e-9).unwrap();
        assert!(dropped);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(matches!(
            AffinityMatrix::from_dense(2, vec![0.0, 0.5, 0.4, 0.0], 1e-9),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(AffinityMatrix::from_dense(2, vec![0.0; 3], 1e-9).is_err());
    }

    #[test]
    fn submatrix_selects_in_order() {
        let m = AffinityMatrix::from_upper(4, |i, j| (10 * i + j) as f64);
        let s = m.submatrix(&[3, 1]);
        assert_eq!(s.as_slice(), &[0.0, 13.0, 13.0, 0.0]);
        assert_eq!(m.row_subset(0, &[2, 3]), vec![2.0, 3.0]);
    }
}
