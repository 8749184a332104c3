//! Seeded Monte Carlo harness.
//!
//! Each trial draws latent positions and a noisy matrix, runs one estimator
//! variant and scores it against the truth. The data of trial `(n, seed)`
//! is shared by every variant so comparisons are paired; estimator
//! randomness is keyed by `(n, variant, seed)`. Nothing depends on the
//! order in which trials are scheduled.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{evaluate, localize_and_refine, Initializer, PipelineOptions, QapStrategy, RefineGrid};
use crate::geometry::Configuration;
use crate::model::{generate_matrix, sample_positions, AffinityMatrix, BuiltinModel, NoiseSpec, PositionMode};
use crate::par::{map_with, Execution};
use crate::rng::{derive_seed, stream, Purpose};
use crate::seriation::Permutation;

/// One estimator configuration, written `split-qap`, `nosplit-spectral`,
/// or with an `-only` suffix for the initial localization alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Variant {
    pub split: bool,
    pub initializer: Initializer,
    pub refine: bool,
}

impl Variant {
    pub const NO_SPLIT: Variant = Variant { split: false, initializer: Initializer::Spectral, refine: true };
    pub const SPLIT: Variant = Variant { split: true, initializer: Initializer::Spectral, refine: true };
    pub const SPECTRAL_ONLY: Variant = Variant { split: false, initializer: Initializer::Spectral, refine: false };

    fn key(&self) -> u64 {
        (self.split as u64) << 2 | ((self.initializer == Initializer::Qap) as u64) << 1 | self.refine as u64
    }

    pub fn options(&self, qap: QapStrategy, refine_grid: RefineGrid) -> PipelineOptions {
        PipelineOptions {
            split: self.split,
            initializer: self.initializer,
            qap,
            refine: self.refine,
            refine_grid,
            execution: Execution::Sequential,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let split = if self.split { "split" } else { "nosplit" };
        let init = match self.initializer {
            Initializer::Qap => "qap",
            Initializer::Spectral => "spectral",
        };
        write!(f, "{split}-{init}{}", if self.refine { "" } else { "-only" })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown variant {s:?} (e.g. nosplit-spectral, split-qap, nosplit-spectral-only)"));
        let mut parts = s.trim().split('-');
        let split = match parts.next() {
            Some("split") => true,
            Some("nosplit") => false,
            _ => return Err(bad()),
        };
        let initializer = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let refine = match parts.next() {
            None => true,
            Some("only") => false,
            Some(_) => return Err(bad()),
        };
        if parts.next().is_some() || (split && !refine) {
            return Err(bad());
        }
        Ok(Variant { split, initializer, refine })
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> Self {
        v.to_string()
    }
}

fn default_positions() -> PositionMode {
    PositionMode::Uniform
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(rename = "n")]
    pub n_values: Vec<usize>,
    pub model: BuiltinModel,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub variants: Vec<Variant>,
    pub seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_positions")]
    pub positions: PositionMode,
    #[serde(default)]
    pub qap: QapStrategy,
    #[serde(default)]
    pub refine_grid: RefineGrid,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::InvalidArgument("seeds must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.variants.is_empty() {
            return Err(Error::InvalidArgument("need at least one n and one variant".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 8) {
            return Err(Error::InvalidArgument(format!("n values must be >= 8, got {n}")));
        }
        if let NoiseSpec::Gaussian { sd } = self.noise {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(Error::InvalidArgument(format!("noise sd must be finite and >= 0, got {sd}")));
            }
        }
        Ok(())
    }

    /// Seed for the data of trial `(n, seed_index)`.
    pub fn data_seed(&self, n: usize, seed_index: usize) -> u64 {
        derive_seed(self.master_seed, &[n as u64, seed_index as u64])
    }

    /// Seed for the estimator of trial `(n, variant, seed_index)`.
    pub fn estimator_seed(&self, n: usize, variant: Variant, seed_index: usize) -> u64 {
        derive_seed(self.master_seed, &[n as u64, variant.key(), seed_index as u64])
    }

    /// Latent positions and observed matrix for trial `(n, seed_index)`.
    pub fn trial_data(&self, n: usize, seed_index: usize) -> Result<(Configuration, AffinityMatrix)> {
        let seed = self.data_seed(n, seed_index);
        let x = sample_positions(n, self.positions, &mut stream(seed, Purpose::Positions))?;
        let a = generate_matrix(&x, &self.model.model(), self.noise, &mut stream(seed, Purpose::Noise))?;
        Ok((x, a))
    }
}

/// Ordering of the items by angle: item `i` has rank `σ*(i)`.
pub fn rank_permutation(x: &Configuration) -> Permutation {
    let mut ranks = vec![0; x.len()];
    for (r, i) in x.angular_order().into_iter().enumerate() {
        ranks[i] = r;
    }
    Permutation::new(ranks).expect("ranks form a permutation")
}

fn noise_label(noise: &NoiseSpec) -> &'static str {
    match noise {
        NoiseSpec::None => "none",
        NoiseSpec::Gaussian { .. } => "gaussian",
        NoiseSpec::Bernoulli => "bernoulli",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub model: String,
    pub noise: String,
    /// Empty for Bernoulli noise.
    pub sd: Option<f64>,
    pub variant: String,
    pub seed: usize,
    pub aligned_dinf: Option<f64>,
    pub d1_over_n: Option<f64>,
    pub seriation_loss: Option<usize>,
    pub runtime_ms: f64,
    /// Set when the estimator failed; losses are then empty.
    pub error: Option<String>,
}

fn run_trial(spec: &ExperimentSpec, n: usize, variant: Variant, seed_index: usize) -> TrialRecord {
    let start = Instant::now();
    let outcome = (|| {
        let (x, a) = spec.trial_data(n, seed_index)?;
        let opts = variant.options(spec.qap, spec.refine_grid);
        let report = localize_and_refine(&a, &opts, spec.estimator_seed(n, variant, seed_index))?;
        evaluate(&report.estimate, &x, Some(&rank_permutation(&x)))
    })();
    // strictly positive even on coarse clocks
    let runtime_ms = (start.elapsed().as_secs_f64() * 1e3).max(1e-6);
    let sd = match spec.noise {
        NoiseSpec::Bernoulli => None,
        other => Some(other.sd()),
    };
    let mut rec = TrialRecord {
        n,
        model: spec.model.to_string(),
        noise: noise_label(&spec.noise).into(),
        sd,
        variant: variant.to_string(),
        seed: seed_index,
        aligned_dinf: None,
        d1_over_n: None,
        seriation_loss: None,
        runtime_ms,
        error: None,
    };
    match outcome {
        Ok(l) => {
            rec.aligned_dinf = Some(l.aligned_dinf);
            rec.d1_over_n = Some(l.d1_over_n);
            rec.seriation_loss = l.seriation_loss;
        }
        Err(e) => {
            log::warn!("trial n={n} variant={variant} seed={seed_index} failed: {e}");
            rec.error = Some(e.to_string());
        }
    }
    rec
}

/// One record per `(n, variant, seed)`, in that lexicographic order
/// (following the order given in the spec).
pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let jobs: Vec<(usize, Variant, usize)> = spec
        .n_values
        .iter()
        .flat_map(|&n| {
            spec.variants
                .iter()
                .flat_map(move |&v| (0..spec.seeds).map(move |s| (n, v, s)))
        })
        .collect();
    Ok(map_with(exec, jobs.len(), |j| {
        let (n, v, s) = jobs[j];
        run_trial(spec, n, v, s)
    }))
}

/// Columns of `trials.csv`; runtime lives in `timings.csv` so the trial
/// table is reproducible byte for byte.
#[derive(Serialize, Deserialize)]
struct TrialRow {
    n: usize,
    model: String,
    noise: String,
    sd: Option<f64>,
    variant: String,
    seed: usize,
    aligned_dinf: Option<f64>,
    d1_over_n: Option<f64>,
    seriation_loss: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct TimingRow {
    n: usize,
    variant: String,
    seed: usize,
    runtime_ms: f64,
}

pub fn write_trials<W: Write, T: Write>(records: &[TrialRecord], trials: W, timings: T) -> Result<()> {
    let mut tw = csv::Writer::from_writer(trials);
    let mut mw = csv::Writer::from_writer(timings);
    for r in records {
        tw.serialize(TrialRow {
            n: r.n,
            model: r.model.clone(),
            noise: r.noise.clone(),
            sd: r.sd,
            variant: r.variant.clone(),
            seed: r.seed,
            aligned_dinf: r.aligned_dinf,
            d1_over_n: r.d1_over_n,
            seriation_loss: r.seriation_loss,
            error: r.error.clone(),
        })?;
        mw.serialize(TimingRow { n: r.n, variant: r.variant.clone(), seed: r.seed, runtime_ms: r.runtime_ms })?;
    }
    tw.flush()?;
    mw.flush()?;
    Ok(())
}

/// Inverse of [`write_trials`]: joins the two tables on `(n, variant, seed)`.
pub fn read_trials<R: Read, T: Read>(trials: R, timings: T) -> Result<Vec<TrialRecord>> {
    let mut times = BTreeMap::new();
    for row in csv::Reader::from_reader(timings).deserialize() {
        let row: TimingRow = row?;
        times.insert((row.n, row.variant, row.seed), row.runtime_ms);
    }
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(trials).deserialize() {
        let row: TrialRow = row?;
        let key = (row.n, row.variant.clone(), row.seed);
        let runtime_ms = *times
            .get(&key)
            .ok_or_else(|| Error::Parse(format!("no timing for n={} variant={} seed={}", key.0, key.1, key.2)))?;
        out.push(TrialRecord {
            n: row.n,
            model: row.model,
            noise: row.noise,
            sd: row.sd,
            variant: row.variant,
            seed: row.seed,
            aligned_dinf: row.aligned_dinf,
            d1_over_n: row.d1_over_n,
            seriation_loss: row.seriation_loss,
            runtime_ms,
            error: row.error,
        });
    }
    Ok(out)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Quartiles { q1: quantile(&v, 0.25), median: quantile(&v, 0.5), q3: quantile(&v, 0.75) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub model: String,
    pub noise: String,
    pub sd: Option<f64>,
    pub variant: String,
    pub trials: usize,
    pub failures: usize,
    pub dinf_q1: f64,
    pub dinf_median: f64,
    pub dinf_q3: f64,
    pub d1_q1: f64,
    pub d1_median: f64,
    pub d1_q3: f64,
    pub seriation_median: f64,
}

/// Per-`(n, variant)` quartiles, in first-appearance order.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut groups: Vec<((usize, String), Vec<&TrialRecord>)> = Vec::new();
    for r in records {
        let key = (r.n, r.variant.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|((n, variant), rs)| {
            let dinf: Vec<f64> = rs.iter().filter_map(|r| r.aligned_dinf).collect();
            let d1: Vec<f64> = rs.iter().filter_map(|r| r.d1_over_n).collect();
            let ser: Vec<f64> = rs.iter().filter_map(|r| r.seriation_loss.map(|v| v as f64)).collect();
            let (qd, q1) = (Quartiles::of(&dinf), Quartiles::of(&d1));
            SummaryRow {
                n,
                model: rs[0].model.clone(),
                noise: rs[0].noise.clone(),
                sd: rs[0].sd,
                variant,
                trials: rs.len(),
                failures: rs.iter().filter(|r| r.error.is_some()).count(),
                dinf_q1: qd.q1,
                dinf_median: qd.median,
                dinf_q3: qd.q3,
                d1_q1: q1.q1,
                d1_median: q1.median,
                d1_q3: q1.q3,
                seriation_median: median(&ser),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    let mut cw = csv::Writer::from_writer(w);
    for r in rows {
        cw.serialize(r)?;
    }
    cw.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Least-squares slope of `log median` against `log √(log n / n)`.
    pub slope: f64,
    pub intercept: f64,
    /// `(n, median aligned d∞)`, increasing `n`.
    pub medians: Vec<(usize, f64)>,
}

/// Fits the decay of the median aligned `d∞` in `n` against the rate
/// `√(log n / n)`. Failed trials are ignored.
pub fn rate_fit(records: &[TrialRecord]) -> Result<RateFit> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(v) = r.aligned_dinf {
            by_n.entry(r.n).or_default().push(v);
        }
    }
    if by_n.len() < 3 {
        return Err(Error::InvalidArgument(format!("rate fit needs at least 3 distinct n, got {}", by_n.len())));
    }
    let medians: Vec<(usize, f64)> = by_n.into_iter().map(|(n, v)| (n, median(&v))).collect();
    if let Some(&(n, m)) = medians.iter().find(|(_, m)| m.is_nan() || *m <= 0.0) {
        return Err(Error::InvalidArgument(format!("median error at n={n} is {m}; the log fit needs positive values")));
    }
    let pts: Vec<(f64, f64)> = medians
        .iter()
        .map(|&(n, m)| {
            let nf = n as f64;
            ((nf.ln() / nf).sqrt().ln(), m.ln())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, medians })
}
