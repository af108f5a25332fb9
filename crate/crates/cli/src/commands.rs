use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use geostat_core::fields::{
    read_dataset, read_table, sidecar_path, split, write_atomic, write_dataset, write_table, DatasetKind, SplitKind,
    SplitScheme,
};
use geostat_core::inference::fit_mle;
use geostat_core::kernels::RangeAxis;
use geostat_core::kvtext;
use geostat_core::predict::{exact_kriging, forecast_t10, local_kriging, DEFAULT_FORECAST_SLOTS};
use geostat_core::score::score_tables;
use geostat_core::simulate::{generate, preset, DesignRecipe, Layout, Preset};
use geostat_core::{
    CovarianceModel, Dataset, Error, FitResult, Likelihood, OptimizerConfig, Prediction, Result, ScoreReport,
};

use crate::options::{Cli, Command, Neighbors, Opts};
use crate::render;

const DEFAULT_SLOTS: usize = 100;
const DEFAULT_FORECAST_NEIGHBORS: usize = 30;

pub fn run(mut cli: Cli) -> Result<()> {
    cli.opts.merge_config()?;
    if let Some(n) = cli.opts.thread_count()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    let o = &cli.opts;
    match &cli.command {
        Command::Generate => cmd_generate(o),
        Command::Split { input } => cmd_split(o, input),
        Command::Fit { train } => cmd_fit(o, train),
        Command::Predict { train, targets } => cmd_predict(o, train, targets),
        Command::Score { files } => cmd_score(o, files),
        Command::Effrange { axis } => cmd_effrange(o, axis),
        Command::Render { input } => render::cmd_render(o, input),
    }
}

/// A model from a spec string or from the `model` entry of a fit file.
fn parse_model(text: &str) -> Result<CovarianceModel> {
    let path = Path::new(text);
    if path.is_file() {
        return Ok(FitResult::from_kv(&kvtext::read_file(path)?)?.model);
    }
    text.parse()
}

/// `--model`, else the model of `--preset`, else the model recorded with the data.
fn resolve_model(o: &Opts, data: Option<&Dataset>) -> Result<CovarianceModel> {
    if let Some(m) = &o.model {
        return parse_model(m);
    }
    if let Some(p) = &o.preset {
        return Ok(preset(p, None)?.model);
    }
    match data.and_then(|d| d.metadata.get("model")) {
        Some(m) => m.parse(),
        None => Err(Error::InvalidParameter("no model: pass --model or --preset".into())),
    }
}

fn default_scheme(kind: DatasetKind) -> SplitKind {
    match kind {
        DatasetKind::SpaceTime => SplitKind::Rs,
        DatasetKind::Spatial | DatasetKind::Bivariate => SplitKind::Random10,
    }
}

fn write_with_sidecar(path: &Path, d: &Dataset, with_values: bool) -> Result<()> {
    write_dataset(path, d, with_values)?;
    kvtext::write_file(sidecar_path(path), &d.metadata, &[])
}

fn cmd_generate(o: &Opts) -> Result<()> {
    let out = o.out()?;
    let p = match (&o.preset, &o.model) {
        (Some(name), None) => {
            let mut p = preset(name, o.n)?;
            if let Some(m) = o.m_slots {
                p = p.with_slots(m)?;
            }
            p
        }
        (None, Some(spec)) => {
            let model = parse_model(spec)?;
            let locations = o.n.ok_or_else(|| Error::InvalidParameter("--model needs --n".into()))?;
            let kind = model.data_kind();
            let slots = (kind == DatasetKind::SpaceTime).then(|| o.m_slots.unwrap_or(DEFAULT_SLOTS));
            let design = DesignRecipe { layout: Layout::Uniform, locations, slots, scheme: default_scheme(kind) };
            Preset { name: "custom".into(), model, design }
        }
        _ => return Err(Error::InvalidParameter("pass exactly one of --preset and --model".into())),
    };
    let d = generate(&p, o.seed())?;
    write_with_sidecar(out, &d, true)?;
    println!("{} rows ({}) -> {}", d.len(), d.kind.name(), out.display());
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn cmd_split(o: &Opts, input: &Path) -> Result<()> {
    let prefix = o.out()?;
    let d = read_dataset(input)?;
    let kind = match &o.scheme {
        Some(s) => SplitKind::from_name(s).ok_or_else(|| Error::Parse(format!("unknown scheme `{s}`")))?,
        None => d
            .metadata
            .get("design.scheme")
            .and_then(|s| SplitKind::from_name(s))
            .unwrap_or_else(|| default_scheme(d.kind)),
    };
    let scheme = SplitScheme::with_fraction(kind, o.fraction.unwrap_or(0.1));
    let s = split(&d, scheme, o.seed())?;
    write_with_sidecar(&with_suffix(prefix, ".train.csv"), &s.train, true)?;
    write_with_sidecar(&with_suffix(prefix, ".test.csv"), &s.test, true)?;
    write_dataset(with_suffix(prefix, ".targets.csv"), &s.test, false)?;
    println!("{}: {} train rows, {} test rows", kind.name(), s.train.len(), s.test.len());
    Ok(())
}

fn free_mask(model: &CovarianceModel, fix: Option<&str>) -> Result<Vec<bool>> {
    let names = model.param_names();
    let mut mask = vec![true; names.len()];
    for name in fix.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown parameter `{name}`; have {}", names.join(","))))?;
        mask[i] = false;
    }
    Ok(mask)
}

fn cmd_fit(o: &Opts, train: &Path) -> Result<()> {
    let out = o.out()?;
    let data = read_dataset(train)?;
    let init = resolve_model(o, Some(&data))?;
    let mask = free_mask(&init, o.fix.as_deref())?;
    let mut cfg = OptimizerConfig::default();
    if let Some(m) = o.max_evals {
        cfg.max_evaluations = m;
    }
    let fit = match o.neighbors {
        Some(Neighbors::Count(m)) => {
            let rough = fit_mle(&init, &data, Some(&mask), &cfg, Likelihood::vecchia(m))?;
            if o.exact {
                let mut refined = fit_mle(&rough.model, &data, Some(&mask), &cfg, Likelihood::Exact)?;
                refined.evaluations += rough.evaluations;
                refined.converged &= rough.converged;
                refined.likelihood = format!("{}+exact", rough.likelihood);
                refined
            } else {
                rough
            }
        }
        Some(Neighbors::All) | None => fit_mle(&init, &data, Some(&mask), &cfg, Likelihood::Exact)?,
    };
    kvtext::write_file(out, &fit.to_kv(), &[])?;
    println!("loglik {} after {} evaluations", fit.loglik, fit.evaluations);
    for (n, v) in fit.names.iter().zip(&fit.params) {
        println!("{n} = {v}");
    }
    Ok(())
}

fn cmd_predict(o: &Opts, train: &Path, targets: &Path) -> Result<()> {
    let out = o.out()?;
    let data = read_dataset(train)?;
    let model = resolve_model(o, Some(&data))?;
    let table = read_table(targets)?;
    if table.kind != data.kind {
        return Err(Error::KindMismatch(format!(
            "training data is {} but targets are {}",
            data.kind.name(),
            table.kind.name()
        )));
    }
    let preds: Vec<Prediction> = if o.forecast {
        let m = match o.neighbors {
            Some(Neighbors::Count(m)) => m,
            Some(Neighbors::All) => data.len(),
            None => DEFAULT_FORECAST_NEIGHBORS,
        };
        forecast_t10(&model, &data, &table.sites, m, DEFAULT_FORECAST_SLOTS)?
    } else {
        match (o.exact, o.neighbors) {
            (false, Some(Neighbors::Count(m))) => local_kriging(&model, &data, &table.sites, m, None)?,
            _ => exact_kriging(&model, &data, &table.sites)?,
        }
    };
    let zhat: Vec<f64> = preds.iter().map(|p| p.mean).collect();
    let kvar: Vec<f64> = preds.iter().map(|p| p.variance).collect();
    let mut buf = Vec::new();
    write_table(&mut buf, table.kind, &table.sites, &[("zhat", &zhat), ("kvar", &kvar)])?;
    write_atomic(out, &buf)?;
    println!("{} predictions -> {}", preds.len(), out.display());
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = name.strip_suffix(".csv").unwrap_or(&name);
    name.strip_suffix(".test").unwrap_or(name).to_string()
}

fn cmd_score(o: &Opts, files: &[PathBuf]) -> Result<()> {
    if files.len() % 2 != 0 {
        return Err(Error::InvalidParameter("score takes truth/submission pairs".into()));
    }
    let mut scores = Vec::with_capacity(files.len() / 2);
    for pair in files.chunks(2) {
        let truth = read_table(&pair[0])?;
        let sub = read_table(&pair[1])?;
        scores.push(score_tables(&dataset_name(&pair[0]), &truth, &sub)?);
    }
    let report = ScoreReport::new(scores)?;
    print!("{}", report.to_csv());
    if let Some(out) = &o.out {
        let kv: BTreeMap<String, String> = report.to_kv();
        kvtext::write_file(out, &kv, &[])?;
    }
    Ok(())
}

fn cmd_effrange(o: &Opts, axis: &str) -> Result<()> {
    let model = resolve_model(o, None)?;
    match model.effective_ranges(axis.parse::<RangeAxis>()?) {
        Ok(v) => {
            for r in v {
                println!("{r}");
            }
            Ok(())
        }
        Err(Error::Unbounded) => {
            println!("inf");
            Ok(())
        }
        Err(e) => Err(e),
    }
}
