use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use circloc::estimators::{localize_and_refine, PipelineOptions};
use circloc::experiments::{
    rank_permutation, rate_fit, run_experiment, summarize, write_summary, write_trials, ExperimentSpec, Variant,
};
use circloc::geometry::Configuration;
use circloc::io::{
    read_configuration_csv, read_configuration_json, read_matrix_auto, read_permutation_csv, write_configuration_csv,
    write_matrix_bin, write_matrix_csv, write_matrix_json, write_permutation_csv,
};
use circloc::model::{generate_matrix, sample_positions, AffinityMatrix, BuiltinModel, NoiseSpec, PositionMode};
use circloc::par::Execution;
use circloc::rng::{stream, Purpose};
use circloc::seriation::{is_toroidal_r, positions_to_map, seriation_loss, seriation_loss_toroidal};
use circloc::spectral::{circulant_spectrum, fourier_gaps, spectral_gaps, CirculantVector};
use log::{info, warn};
use serde_json::json;

use crate::{
    noise_from, EstimateArgs, ExperimentArgs, Format, GenerateArgs, Pipeline, SeriateArgs, SpectrumArgs, UsageError,
};

type Fields = Vec<(&'static str, String)>;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        info!("no --seed given, using {s} from OS entropy");
        s
    })
}

fn noise_label(noise: NoiseSpec) -> String {
    match noise {
        NoiseSpec::None => "none".into(),
        NoiseSpec::Gaussian { sd } => format!("gaussian(sd={sd})"),
        NoiseSpec::Bernoulli => "bernoulli".into(),
    }
}

fn positions_label(p: PositionMode) -> String {
    match p {
        PositionMode::Uniform => "uniform".into(),
        PositionMode::Regular => "regular".into(),
        PositionMode::Perturbed { delta } => format!("perturbed:{delta}"),
    }
}

fn log_config(command: &str, fields: &Fields) {
    let line: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    info!("{command}: {}", line.join(" "));
}

/// `# key = value` lines put in front of CSV outputs.
fn header(command: &str, fields: &Fields) -> String {
    let mut s = format!("# circloc {command}\n");
    for (k, v) in fields {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn load_matrix(path: &Path) -> Result<AffinityMatrix> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let loaded = read_matrix_auto(&bytes).with_context(|| format!("malformed matrix {}", path.display()))?;
    if loaded.asymmetry > 0.0 {
        warn!("{}: asymmetry {:e} within tolerance, averaged with the transpose", path.display(), loaded.asymmetry);
    }
    if loaded.diagonal_cleared {
        warn!("{}: non-zero diagonal set to zero", path.display());
    }
    Ok(loaded.matrix)
}

fn load_configuration(path: &Path) -> Result<Configuration> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let json = matches!(bytes.iter().find(|b| !b.is_ascii_whitespace()), Some(b'[' | b'{'));
    let x = if json { read_configuration_json(bytes.as_slice()) } else { read_configuration_csv(bytes.as_slice()) };
    x.with_context(|| format!("malformed configuration {}", path.display()))
}

fn load_order(path: &Path) -> Result<circloc::seriation::Permutation> {
    let f = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_permutation_csv(f).with_context(|| format!("malformed ordering {}", path.display()))
}

fn pipeline_options(p: &Pipeline, fields: &mut Fields) -> PipelineOptions {
    let opts = PipelineOptions {
        split: p.split,
        initializer: p.init,
        refine: !p.no_refine,
        refine_grid: p.refine_grid,
        ..PipelineOptions::default()
    };
    let variant = Variant { split: opts.split, initializer: opts.initializer, refine: opts.refine };
    fields.push(("variant", variant.to_string()));
    fields.push(("refine_grid", format!("{:?}", opts.refine_grid).to_lowercase()));
    opts
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if !(a.sd.is_finite() && a.sd >= 0.0) {
        return Err(usage(format!("--sd must be finite and >= 0, got {}", a.sd)));
    }
    let seed = resolve_seed(a.common.seed);
    let noise = noise_from(a.sd, a.bernoulli);
    let fields: Fields = vec![
        ("n", a.n.to_string()),
        ("model", a.model.to_string()),
        ("noise", noise_label(noise)),
        ("positions", positions_label(a.positions)),
        ("seed", seed.to_string()),
    ];
    log_config("generate", &fields);

    let x = sample_positions(a.n, a.positions, &mut stream(seed, Purpose::Positions))?;
    let m = generate_matrix(&x, &a.model.model(), noise, &mut stream(seed, Purpose::Noise))?;

    let mut w = open_out(&a.common.out)?;
    match a.common.format {
        Format::Csv => {
            w.write_all(header("generate", &fields).as_bytes())?;
            write_matrix_csv(&m, &mut w)?;
        }
        Format::Json => write_matrix_json(&m, &mut w)?,
        Format::Bin => write_matrix_bin(&m, &mut w)?,
    }
    w.flush()?;

    if let Some(p) = &a.positions_out {
        let mut w = open_out(p)?;
        w.write_all(header("generate", &fields).as_bytes())?;
        write_configuration_csv(&x, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.order_out {
        let mut w = open_out(p)?;
        w.write_all(header("generate", &fields).as_bytes())?;
        write_permutation_csv(rank_permutation(&x).images(), &mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    if a.common.format == Format::Bin {
        return Err(usage("estimate writes csv or json"));
    }
    let m = load_matrix(&a.input)?;
    let seed = resolve_seed(a.common.seed);
    let mut fields: Fields = vec![("input", a.input.display().to_string()), ("n", m.n().to_string())];
    let opts = pipeline_options(&a.pipeline, &mut fields);
    fields.push(("seed", seed.to_string()));
    log_config("estimate", &fields);

    let mut report = localize_and_refine(&m, &opts, seed)?;
    let order = a.order.as_deref().map(load_order).transpose()?;
    if let Some(path) = &a.truth {
        let truth = load_configuration(path)?;
        if truth.len() != m.n() {
            bail!("truth has {} points but the matrix is {}x{}", truth.len(), m.n(), m.n());
        }
        let losses = report.evaluate(&truth, order.as_ref())?;
        fields.push(("aligned_dinf", format!("{:e}", losses.aligned_dinf)));
        fields.push(("d1_over_n", format!("{:e}", losses.d1_over_n)));
        if let Some(l) = losses.seriation_loss {
            fields.push(("seriation_loss", l.to_string()));
        }
    } else if let Some(order) = &order {
        let loss = seriation_loss(&positions_to_map(&report.estimate), order)?;
        fields.push(("seriation_loss", loss.to_string()));
    }
    for (k, v) in fields.iter().filter(|(k, _)| matches!(*k, "aligned_dinf" | "d1_over_n" | "seriation_loss")) {
        info!("{k} = {v}");
    }

    let mut w = open_out(&a.common.out)?;
    if a.common.format == Format::Json {
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
    } else {
        w.write_all(header("estimate", &fields).as_bytes())?;
        write_configuration_csv(&report.estimate, &mut w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn spectrum(a: SpectrumArgs) -> Result<()> {
    if a.common.format == Format::Bin {
        return Err(usage("spectrum writes csv or json"));
    }
    let seed = resolve_seed(a.common.seed);
    let mut fields: Fields = Vec::new();
    let mut rows: Vec<(&'static str, f64)> = Vec::new();
    let mut alpha = None;
    if let Some(path) = &a.input {
        let m = load_matrix(path)?;
        fields.push(("input", path.display().to_string()));
        fields.push(("n", m.n().to_string()));
        let r = spectral_gaps(&m)?;
        for (name, v) in ["lambda0", "lambda1", "lambda2", "lambda3"].into_iter().zip(&r.eigenvalues) {
            rows.push((name, *v));
        }
        rows.push(("delta1", r.delta1));
        rows.push(("delta2", r.delta2));
    } else {
        let n = a.n.expect("clap requires --n without --in");
        if n < 5 {
            return Err(usage("spectrum needs --n >= 5"));
        }
        fields.push(("model", a.model.to_string()));
        fields.push(("n", n.to_string()));
        let model = a.model.model();
        let g = model.profile().expect("built-in models are geometric");
        let s = circulant_spectrum(&CirculantVector::from_profile(g, n)?);
        let eig = s.eigenvalues();
        let (phi1, phi2) = fourier_gaps(g, n)?;
        rows.push(("alpha0", s.alpha[0]));
        rows.push(("delta1", eig[0] - eig[1]));
        rows.push(("delta2", eig[2] - eig[3]));
        rows.push(("phi1", phi1));
        rows.push(("phi2", phi2));
        alpha = Some(s.alpha);
    }
    fields.push(("seed", seed.to_string()));
    log_config("spectrum", &fields);

    let mut w = open_out(&a.common.out)?;
    if a.common.format == Format::Json {
        let mut obj = serde_json::Map::new();
        for (k, v) in &fields {
            obj.insert((*k).into(), json!(v));
        }
        for (k, v) in &rows {
            obj.insert((*k).into(), json!(v));
        }
        if let Some(alpha) = alpha {
            obj.insert("alpha".into(), json!(alpha));
        }
        serde_json::to_writer_pretty(&mut w, &obj)?;
        writeln!(w)?;
    } else {
        w.write_all(header("spectrum", &fields).as_bytes())?;
        writeln!(w, "quantity,value")?;
        for (k, v) in &rows {
            writeln!(w, "{k},{v}")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn seriate(a: SeriateArgs) -> Result<()> {
    if a.common.format == Format::Bin {
        return Err(usage("seriate writes csv or json"));
    }
    let m = load_matrix(&a.input)?;
    let seed = resolve_seed(a.common.seed);
    let mut fields: Fields = vec![("input", a.input.display().to_string()), ("n", m.n().to_string())];
    let opts = pipeline_options(&a.pipeline, &mut fields);
    fields.push(("seed", seed.to_string()));
    log_config("seriate", &fields);
    match is_toroidal_r(&m) {
        (true, _) => info!("input is toroidal Robinson in its given order"),
        (false, Some(v)) => info!("input is not toroidal Robinson in its given order (first violation {v:?})"),
        (false, None) => {}
    }

    let report = localize_and_refine(&m, &opts, seed)?;
    let order = positions_to_map(&report.estimate);
    let mut losses = None;
    if let Some(path) = &a.truth {
        let truth = load_order(path)?;
        let l = seriation_loss(&order, &truth)?;
        let lt = seriation_loss_toroidal(&order, &truth)?;
        info!("seriation_loss = {l}, toroidal = {lt}");
        fields.push(("seriation_loss", l.to_string()));
        fields.push(("seriation_loss_toroidal", lt.to_string()));
        losses = Some((l, lt));
    }

    let mut w = open_out(&a.common.out)?;
    if a.common.format == Format::Json {
        let one_based: Vec<usize> = order.iter().map(|v| v + 1).collect();
        let mut obj = json!({ "n": m.n(), "seed": seed, "order": one_based });
        if let Some((l, lt)) = losses {
            obj["seriation_loss"] = json!(l);
            obj["seriation_loss_toroidal"] = json!(lt);
        }
        serde_json::to_writer_pretty(&mut w, &obj)?;
        writeln!(w)?;
    } else {
        w.write_all(header("seriate", &fields).as_bytes())?;
        write_permutation_csv(&order, &mut w)?;
    }
    w.flush()?;
    Ok(())
}

fn default_spec() -> ExperimentSpec {
    ExperimentSpec {
        n_values: vec![256],
        model: BuiltinModel::Affine,
        noise: NoiseSpec::gaussian(0.1),
        variants: vec![Variant::NO_SPLIT, Variant::SPLIT, Variant::SPECTRAL_ONLY],
        seeds: 50,
        master_seed: 0,
        positions: PositionMode::Uniform,
        qap: Default::default(),
        refine_grid: Default::default(),
    }
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    Ok(spec)
}

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(p) => load_spec(p)?,
        None => default_spec(),
    };
    if let Some(n) = a.n {
        spec.n_values = n;
    }
    if let Some(m) = a.model {
        spec.model = m;
    }
    if a.bernoulli || a.sd.is_some() {
        spec.noise = noise_from(a.sd.unwrap_or(0.0), a.bernoulli);
    }
    if let Some(v) = &a.variants {
        spec.variants = v.iter().map(|s| s.parse()).collect::<circloc::Result<_>>().map_err(|e| usage(e.to_string()))?;
    }
    if let Some(s) = a.seeds {
        spec.seeds = s;
    }
    if let Some(p) = a.positions {
        spec.positions = p;
    }
    spec.master_seed = match (a.seed, &a.config) {
        (Some(s), _) => s,
        (None, Some(_)) => spec.master_seed,
        (None, None) => resolve_seed(None),
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;

    let fields: Fields = vec![
        ("n", format!("{:?}", spec.n_values)),
        ("model", spec.model.to_string()),
        ("noise", noise_label(spec.noise)),
        ("positions", positions_label(spec.positions)),
        ("variants", spec.variants.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
        ("seeds", spec.seeds.to_string()),
        ("seed", spec.master_seed.to_string()),
    ];
    log_config("experiment", &fields);

    let exec = if a.workers == 0 { Execution::Parallel } else { Execution::Workers(a.workers) };
    let records = run_experiment(&spec, exec)?;
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        warn!("{failures} of {} trials failed; see the error column of trials.csv", records.len());
    }

    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let create = |name: &str| -> Result<BufWriter<File>> {
        let p = a.out.join(name);
        Ok(BufWriter::new(File::create(&p).with_context(|| format!("cannot create {}", p.display()))?))
    };
    // the resolved spec is the header of the run; rerunning with it reproduces trials.csv
    serde_json::to_writer_pretty(create("spec.json")?, &spec)?;
    write_trials(&records, create("trials.csv")?, create("timings.csv")?)?;
    write_summary(&summarize(&records), create("summary.csv")?)?;

    if spec.n_values.len() >= 3 {
        match rate_fit(&records) {
            Ok(fit) => info!("rate fit: slope {:.3} against sqrt(log n / n)", fit.slope),
            Err(e) => warn!("rate fit skipped: {e}"),
        }
    }
    info!("wrote {} trials to {}", records.len(), a.out.display());
    Ok(())
}
