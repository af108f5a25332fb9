use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use geostat_core::kvtext;
use geostat_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "geostat", version, about = "Gaussian random field benchmark toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a dataset from a preset or an inline model.
    Generate,
    /// Split a dataset into train, test and target files.
    Split { input: PathBuf },
    /// Maximum-likelihood fit of a model to a training file.
    Fit { train: PathBuf },
    /// Krige the targets from the training data.
    Predict { train: PathBuf, targets: PathBuf },
    /// Score submissions; arguments alternate truth and submission files.
    Score {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Effective range of a model along `space` or `time`.
    Effrange { axis: String },
    /// Heat map of a spatial field as a binary PPM.
    Render { input: PathBuf },
}

/// Conditioning size for fitting and prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbors {
    All,
    Count(usize),
}

impl FromStr for Neighbors {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "all" {
            return Ok(Neighbors::All);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive count or `all`, got `{s}`")),
            Ok(n) => Ok(Neighbors::Count(n)),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Published configuration, e.g. 1a-1, ST2, 3a-1.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Model spec such as `matern:sigma2=1,range=0.1,nu=1`, or a fit file.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Number of spatial locations.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of time slots for space-time designs.
    #[arg(long = "m-slots", global = true)]
    pub m_slots: Option<usize>,
    /// Seed for every random stream (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Split scheme: random10, rs, rst or t10.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Test fraction for random splits (default 0.1).
    #[arg(long, global = true)]
    pub fraction: Option<f64>,
    /// Neighbour count, or `all` for the exact computation.
    #[arg(long, global = true)]
    pub neighbors: Option<Neighbors>,
    /// Exact likelihood or kriging; with --neighbors, fit refines the
    /// Vecchia estimate exactly.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Forecast from the last time slots of the training data.
    #[arg(long, global = true)]
    pub forecast: bool,
    /// Comma-separated parameter names held fixed while fitting.
    #[arg(long, global = true)]
    pub fix: Option<String>,
    /// Likelihood evaluation budget per fitting stage.
    #[arg(long = "max-evals", global = true)]
    pub max_evals: Option<usize>,
    /// Time slot to render from a space-time file.
    #[arg(long, global = true)]
    pub time: Option<f64>,
    /// Image side in pixels (default 100).
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Worker threads, or `auto`.
    #[arg(long, global = true)]
    pub threads: Option<String>,
    /// Output file or prefix.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file supplying defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("config `{key}`: cannot parse `{v}`")))
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, v: &str) -> Result<()> {
    if slot.is_none() {
        *slot = Some(parse_value(key, v)?);
    }
    Ok(())
}

impl Opts {
    /// Fills unset options from the config file named by `--config`.
    pub fn merge_config(&mut self) -> Result<()> {
        let Some(path) = &self.config else { return Ok(()) };
        for (k, v) in kvtext::read_file(path)? {
            let v = v.as_str();
            match k.as_str() {
                "preset" => fill(&mut self.preset, &k, v)?,
                "model" => fill(&mut self.model, &k, v)?,
                "n" => fill(&mut self.n, &k, v)?,
                "m-slots" | "m_slots" => fill(&mut self.m_slots, &k, v)?,
                "seed" => fill(&mut self.seed, &k, v)?,
                "scheme" => fill(&mut self.scheme, &k, v)?,
                "fraction" => fill(&mut self.fraction, &k, v)?,
                "neighbors" => {
                    if self.neighbors.is_none() {
                        self.neighbors = Some(v.parse().map_err(Error::Parse)?);
                    }
                }
                "exact" => self.exact |= parse_value::<bool>(&k, v)?,
                "forecast" => self.forecast |= parse_value::<bool>(&k, v)?,
                "fix" => fill(&mut self.fix, &k, v)?,
                "max-evals" | "max_evals" => fill(&mut self.max_evals, &k, v)?,
                "time" => fill(&mut self.time, &k, v)?,
                "resolution" => fill(&mut self.resolution, &k, v)?,
                "threads" => fill(&mut self.threads, &k, v)?,
                "out" => fill(&mut self.out, &k, v)?,
                other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    /// Thread count from the flag, the config file or `GEOSTAT_THREADS`;
    /// `None` means the available parallelism.
    pub fn thread_count(&self) -> Result<Option<usize>> {
        let raw = self.threads.clone().or_else(|| std::env::var("GEOSTAT_THREADS").ok());
        match raw.as_deref().map(str::trim) {
            None | Some("auto") | Some("") => Ok(None),
            Some(s) => match s.parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(Error::InvalidParameter(format!("thread count `{s}` is not a positive integer"))),
            },
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out(&self) -> Result<&PathBuf> {
        self.out.as_ref().ok_or_else(|| Error::InvalidParameter("--out is required".into()))
    }
}
