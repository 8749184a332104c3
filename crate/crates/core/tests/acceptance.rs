//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p circloc --test acceptance -- --nocapture`.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use circloc::estimators::{localize_and_refine, refine_point, solve_qap, PipelineOptions, QapStrategy};
use circloc::experiments::{
    median, rate_fit, run_experiment, write_trials, ExperimentSpec, TrialRecord, Variant,
};
use circloc::geometry::{
    aligned_dinf, aligned_dinf_value, dist_to_regular, geodesic_dist, interval_statistic_sup, Configuration,
    RegularGrid,
};
use circloc::model::{sample_positions, signal_matrix, BuiltinModel, NoiseSpec, PositionMode};
use circloc::par::Execution;
use circloc::rng::{stream, Purpose};
use circloc::seriation::{gamma_n, permutation_to_positions, positions_to_map, seriation_loss, Permutation};
use circloc::spectral::{
    circulant_spectrum, fourier_gaps, spectral_localization, symmetric_eig_dense, CirculantVector,
};
use rand::seq::SliceRandom;
use rand::Rng;

fn report(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    let limit = limit.map(|l| format!(" (limit {:.0} s)", l.as_secs_f64())).unwrap_or_default();
    println!("criterion {id:>2} {status}: {name}: {detail} [{:.2} s{limit}]", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time limit");
}

fn regular(n: usize, seed: u64) -> Configuration {
    sample_positions(n, PositionMode::Regular, &mut stream(seed, Purpose::Positions)).unwrap()
}

/// Eigenvalues of `[f(x_i, x_j)]` at the regular grid, diagonal included,
/// in closed form and from the dense solver.
#[test]
fn criterion_01_closed_form_spectrum() {
    let start = Instant::now();
    let model = BuiltinModel::Affine.model();
    let g = model.profile().unwrap();
    let mut worst_alpha0 = 0.0_f64;
    let mut worst_eig = 0.0_f64;
    for n in [5, 101, 1001] {
        let c = CirculantVector::from_profile(g, n).unwrap();
        let s = circulant_spectrum(&c);
        let nf = n as f64;
        worst_alpha0 = worst_alpha0.max((s.alpha[0] - (0.75 * nf + 0.25 / nf)).abs());
        let eig = symmetric_eig_dense(n, &c.assemble()).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(&eig.values) {
            worst_eig = worst_eig.max((a - b).abs());
        }
    }
    let ok = worst_alpha0 <= 1e-9 && worst_eig <= 1e-9;
    let detail = format!("max |α₀ − (3n/4 + 1/4n)| = {worst_alpha0:.2e}, max |α − λ| = {worst_eig:.2e}");
    report(1, "circulant spectrum", ok, &detail, start.elapsed(), Some(Duration::from_secs(5)));
}

#[test]
fn criterion_02_fourier_gaps() {
    let start = Instant::now();
    let model = BuiltinModel::Affine.model();
    let g = model.profile().unwrap();
    let mut worst_ratio = f64::INFINITY;
    for n in (51..=1001).step_by(50) {
        let (p1, p2) = fourier_gaps(g, n).unwrap();
        worst_ratio = worst_ratio.min(p1.min(p2) / n as f64);
    }
    let (p1, _) = fourier_gaps(g, 1001).unwrap();
    let dev = (p1 / 1001.0 - (0.75 - 1.0 / (PI * PI))).abs();
    let ok = worst_ratio >= 0.05 && dev <= 0.02;
    let detail = format!("min (Φ₁ ∧ Φ₂)/n = {worst_ratio:.4}, |Φ₁/n − (3/4 − 1/π²)| at n=1001 = {dev:.2e}");
    report(2, "Fourier gaps", ok, &detail, start.elapsed(), Some(Duration::from_secs(10)));
}

#[test]
fn criterion_03_spectral_exact_recovery() {
    let start = Instant::now();
    let model = BuiltinModel::Affine.model();
    let mut ok = true;
    let mut detail = String::new();
    for n in [9, 33, 129] {
        let x = regular(n, n as u64);
        let est = spectral_localization(&signal_matrix(&x, &model)).unwrap();
        let err = aligned_dinf_value(&est, &x).unwrap();
        ok &= err <= TAU / n as f64 + 1e-6;
        detail.push_str(&format!("n={n}: {err:.2e} (bound {:.3e}) ", TAU / n as f64 + 1e-6));
    }
    report(3, "spectral localization, noiseless regular", ok, detail.trim(), start.elapsed(), Some(Duration::from_secs(10)));
}

#[test]
fn criterion_04_qap_exact_recovery() {
    let start = Instant::now();
    let model = BuiltinModel::Affine.model();
    let mut worst = 0.0_f64;
    let mut all_exact = true;
    for k in 1..=8 {
        for rep in 0..5 {
            let x = regular(k, 100 * k as u64 + rep);
            let a = signal_matrix(&x, &model);
            let sol = solve_qap(&a, QapStrategy::default(), &mut stream(rep, Purpose::Qap)).unwrap();
            all_exact &= sol.exact;
            worst = worst.max(aligned_dinf_value(&sol.assignment, &x).unwrap());
        }
    }
    let ok = all_exact && worst == 0.0;
    let detail = format!("max aligned d∞ over k = 1..8 (5 instances each) = {worst:e}, exact solver used: {all_exact}");
    report(4, "QAP exact recovery", ok, &detail, start.elapsed(), Some(Duration::from_secs(30)));
}

/// Rows decreasing in distance at regular positions, self-affinity included.
#[test]
fn criterion_05_refinement_oracle() {
    let start = Instant::now();
    let mut rng = stream(5, Purpose::Noise);
    let mut failures = 0;
    let mut checked = 0;
    for inst in 0..100u64 {
        let n = rng.random_range(3..=64);
        let x = regular(n, 500 + inst);
        let grid = RegularGrid::new(n).unwrap();
        // strictly decreasing weights over the ⌊n/2⌋ + 1 distance levels
        let mut levels = vec![rng.random_range(0.5..2.0)];
        for _ in 0..n / 2 {
            let last = *levels.last().unwrap();
            levels.push(last - rng.random_range(1e-3..0.2));
        }
        let level = |a: usize, b: usize| {
            let d = geodesic_dist(x[a], x[b]);
            (d / grid.step()).round() as usize
        };
        for i in 0..n {
            let row: Vec<f64> = (0..n).map(|j| levels[level(i, j)]).collect();
            checked += 1;
            if refine_point(&row, &x, &grid).unwrap() != x[i] {
                failures += 1;
            }
        }
    }
    let detail = format!("{checked} rows over 100 instances, {failures} not recovered");
    report(5, "refinement oracle", failures == 0, &detail, start.elapsed(), None);
}

#[test]
fn criterion_06_sandwich() {
    let start = Instant::now();
    let mut rng = stream(6, Purpose::Positions);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for k in [8usize, 32, 128] {
        for trial in 0..1000 {
            // alternate uniform, clustered and jittered-grid draws
            let angles: Vec<f64> = match trial % 3 {
                0 => (0..k).map(|_| rng.random::<f64>() * TAU).collect(),
                1 => {
                    let c = rng.random::<f64>() * TAU;
                    let w = rng.random_range(0.1..TAU);
                    (0..k).map(|_| c + rng.random::<f64>() * w).collect()
                }
                _ => {
                    let delta = rng.random_range(0.0..1.0) * TAU / k as f64;
                    (0..k).map(|j| TAU * j as f64 / k as f64 + rng.random_range(-delta..=delta)).collect()
                }
            };
            let x = Configuration::from_angles(angles);
            let mut sorted: Vec<f64> = x.angles().collect();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let v = interval_statistic_sup(&x);
            let mid = k as f64 / PI * dist_to_regular(&x).unwrap();
            if !(v - 4.0 <= mid && mid <= 2.0 * v + 4.0) {
                violations += 1;
            }
            tightest = tightest.min((mid - (v - 4.0)).min(2.0 * v + 4.0 - mid));
        }
    }
    let detail = format!("3000 configurations, {violations} violations, smallest slack {tightest:.3}");
    report(6, "interval-statistic sandwich", violations == 0, &detail, start.elapsed(), None);
}

fn spec(n: Vec<usize>, model: BuiltinModel, sd: f64, variants: Vec<Variant>, seeds: usize, master: u64) -> ExperimentSpec {
    ExperimentSpec {
        n_values: n,
        model,
        noise: NoiseSpec::gaussian(sd),
        variants,
        seeds,
        master_seed: master,
        positions: PositionMode::Uniform,
        qap: QapStrategy::default(),
        refine_grid: Default::default(),
    }
}

fn median_of(records: &[TrialRecord], variant: Variant) -> f64 {
    let name = variant.to_string();
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.variant == name)
        .map(|r| r.aligned_dinf.expect("trial succeeded"))
        .collect();
    median(&v)
}

#[test]
fn criterion_07_rate_law() {
    let start = Instant::now();
    let s = spec(vec![64, 128, 256, 512], BuiltinModel::Affine, 0.1, vec![Variant::NO_SPLIT], 30, 7);
    let records = run_experiment(&s, Execution::Parallel).unwrap();
    let fit = rate_fit(&records).unwrap();
    let decreasing = fit.medians.windows(2).all(|w| w[1].1 < w[0].1);
    let ok = decreasing && (0.7..=1.3).contains(&fit.slope);
    let meds: Vec<String> = fit.medians.iter().map(|(n, m)| format!("{n}:{m:.4}")).collect();
    let detail = format!("medians [{}], slope {:.3}", meds.join(", "), fit.slope);
    report(7, "rate law", ok, &detail, start.elapsed(), Some(Duration::from_secs(600)));
}

#[test]
fn criterion_08_qualitative_replication() {
    let start = Instant::now();
    let variants = vec![Variant::NO_SPLIT, Variant::SPLIT, Variant::SPECTRAL_ONLY];
    let mut ok = true;
    let mut detail = Vec::new();
    for (mi, model) in [BuiltinModel::Affine, BuiltinModel::Logit].into_iter().enumerate() {
        for (si, sd) in [0.1, 0.5].into_iter().enumerate() {
            let s = spec(vec![256], model, sd, variants.clone(), 50, 80 + 2 * mi as u64 + si as u64);
            let records = run_experiment(&s, Execution::Parallel).unwrap();
            let (nosplit, split, only) = (
                median_of(&records, Variant::NO_SPLIT),
                median_of(&records, Variant::SPLIT),
                median_of(&records, Variant::SPECTRAL_ONLY),
            );
            let pass = if sd == 0.1 { nosplit < split && nosplit < only } else { nosplit <= 1.1 * only };
            ok &= pass;
            detail.push(format!(
                "{model} sd={sd}: no-split {nosplit:.4}, split {split:.4}, spectral-only {only:.4} [{}]",
                if pass { "ok" } else { "violated" }
            ));
        }
    }
    report(8, "split/refinement comparison", ok, &detail.join("; "), start.elapsed(), Some(Duration::from_secs(900)));
}

#[test]
fn criterion_09_seriation() {
    let start = Instant::now();
    let n = 32;
    let model = BuiltinModel::Affine.model();
    let mut worst = 0;
    let mut gamma_ok = true;
    for seed in 0..10u64 {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(&mut stream(seed, Purpose::Permutation));
        let sigma = Permutation::new(images).unwrap();
        let x = permutation_to_positions(&sigma);
        let f = signal_matrix(&x, &model);
        let r = localize_and_refine(&f, &PipelineOptions::default(), seed).unwrap();
        let loss = seriation_loss(&positions_to_map(&r.estimate), &sigma).unwrap();
        worst = worst.max(loss);
        for tau in gamma_n(n) {
            let moved = tau.to_permutation(n).compose(&sigma).unwrap();
            gamma_ok &= seriation_loss(moved.images(), &sigma).unwrap() == 0;
        }
    }
    let ok = worst <= 1 && gamma_ok;
    let detail = format!("worst pipeline loss over 10 hidden orders = {worst}, Γₙ images all at loss 0: {gamma_ok}");
    report(9, "toroidal seriation", ok, &detail, start.elapsed(), Some(Duration::from_secs(30)));
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let variants: Vec<Variant> = ["nosplit-spectral", "split-spectral", "nosplit-spectral-only", "split-qap"]
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    let s = spec(vec![40, 64], BuiltinModel::Logit, 0.2, variants, 4, 10);
    let csv_for = |exec| {
        let records = run_experiment(&s, exec).unwrap();
        let (mut trials, mut timings) = (Vec::new(), Vec::new());
        write_trials(&records, &mut trials, &mut timings).unwrap();
        trials
    };
    let one = csv_for(Execution::Workers(1));
    let four = csv_for(Execution::Workers(4));
    let eight = csv_for(Execution::Workers(8));
    let ok = one == four && one == eight && !one.is_empty();
    let detail = format!("trials.csv of {} bytes identical across 1, 4 and 8 workers: {ok}", one.len());
    report(10, "determinism", ok, &detail, start.elapsed(), None);
}

/// Sanity check that the alignment used by the criteria reports exact zeros
/// for identical grid configurations.
#[test]
fn alignment_is_exact_on_identical_grids() {
    let x = regular(17, 3);
    assert_eq!(aligned_dinf(&x, &x).unwrap().0, 0.0);
}
