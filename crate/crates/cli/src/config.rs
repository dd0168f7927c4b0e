//! Run configuration: command-line flags override the config file, which
//! overrides per-command defaults. Every resolved key remembers its source.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => bail!("unknown format `{other}` (expected csv, json or svg)"),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Master seed for every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Grid and budget flags; each command reads the ones it needs.
#[derive(Args, Clone, Debug, Default)]
pub struct GridArgs {
    /// Microstate counts, comma-separated.
    #[arg(long = "M", value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Number of outcomes.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Real amplitudes c_i, comma-separated (normalized if slightly off).
    #[arg(long = "c", value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    /// Microstate weights: uniform or random.
    #[arg(long = "p")]
    pub p: Option<WeightMode>,
    /// Draws, states or search trials, depending on the command.
    #[arg(long)]
    pub trials: Option<u32>,
    /// Restarts of the projective search.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Entropy and information margins in bits, `dS,dI`.
    #[arg(long, value_delimiter = ',')]
    pub margins: Option<Vec<f64>>,
    /// Time horizon of recurrence scans.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Uniform,
    Random,
}

/// Keys accepted in a config file.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub c: Option<Vec<f64>>,
    pub p: Option<WeightMode>,
    pub trials: Option<u32>,
    pub restarts: Option<usize>,
    pub margins: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    /// Command-specific string options (`source`, `strategy`, `observable`, ...).
    #[serde(flatten)]
    pub extra: BTreeMap<String, toml::Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    fn extra_str(&self, key: &str) -> Result<Option<String>> {
        match self.extra.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => bail!("config key `{key}` must be a string, got {other}"),
        }
    }
}

/// Per-command defaults.
#[derive(Clone, Debug)]
pub struct Defaults {
    pub m: Vec<usize>,
    pub k: usize,
    pub trials: u32,
    pub restarts: usize,
    pub horizon: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    #[serde(rename = "M")]
    pub m: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    pub c: Option<Vec<f64>>,
    pub p: WeightMode,
    pub trials: u32,
    pub restarts: usize,
    pub margins: (f64, f64),
    pub horizon: f64,
    /// Command-specific options after resolution.
    pub options: BTreeMap<String, String>,
    /// `flag`, `config` or `default` for every key above.
    pub sources: BTreeMap<String, &'static str>,
}

impl Resolved {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    pub fn option(&self, key: &str) -> &str {
        self.options.get(key).map(String::as_str).unwrap_or("")
    }
}

fn pick<T>(sources: &mut BTreeMap<String, &'static str>, key: &str, flag: Option<T>, file: Option<T>, default: T) -> T {
    let (value, source) = match (flag, file) {
        (Some(v), _) => (v, "flag"),
        (None, Some(v)) => (v, "config"),
        (None, None) => (default, "default"),
    };
    sources.insert(key.to_string(), source);
    value
}

/// A command-specific string option: `(key, flag value, default)`.
pub type Extra<'a> = (&'a str, Option<String>, &'a str);

pub fn resolve(common: &CommonArgs, grid: &GridArgs, extras: &[Extra], defaults: Defaults) -> Result<Resolved> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut sources = BTreeMap::new();
    let s = &mut sources;
    let seed = pick(s, "seed", common.seed, file.seed, 0);
    let out = pick(s, "out", common.out.clone(), file.out.clone(), PathBuf::from("out"));
    let mut formats = pick(s, "format", common.format.clone(), file.format.clone(), vec![Format::Csv, Format::Json, Format::Svg]);
    formats.sort();
    formats.dedup();
    let m = pick(s, "M", grid.m.clone(), file.m.clone(), defaults.m);
    let k = pick(s, "K", grid.k, file.k, defaults.k);
    let c = pick(s, "c", grid.c.clone().map(Some), file.c.clone().map(Some), None);
    let p = pick(s, "p", grid.p, file.p, WeightMode::Uniform);
    let trials = pick(s, "trials", grid.trials, file.trials, defaults.trials);
    let restarts = pick(s, "restarts", grid.restarts, file.restarts, defaults.restarts);
    let margins = pick(s, "margins", grid.margins.clone(), file.margins.clone(), vec![0.01, 0.01]);
    let horizon = pick(s, "horizon", grid.horizon, file.horizon, defaults.horizon);

    let mut options = BTreeMap::new();
    for (key, flag, default) in extras {
        let value = pick(s, key, flag.clone(), file.extra_str(key)?, default.to_string());
        options.insert(key.to_string(), value);
    }
    for key in file.extra.keys() {
        if !options.contains_key(key) {
            bail!("config key `{key}` is not used by this command");
        }
    }

    if formats.is_empty() {
        bail!("at least one output format is required");
    }
    if m.is_empty() || m.contains(&0) {
        bail!("M grid must be non-empty with every M ≥ 1");
    }
    if k == 0 {
        bail!("K must be at least 1");
    }
    if margins.len() != 2 || margins.iter().any(|v| !(*v > 0.0)) {
        bail!("margins must be two positive numbers `dS,dI`");
    }
    if !(horizon > 0.0) {
        bail!("horizon must be positive");
    }
    if restarts == 0 {
        bail!("restarts must be at least 1");
    }
    if let Some(c) = &c {
        if c.len() != k {
            bail!("--c has {} entries but K = {k}", c.len());
        }
    }

    Ok(Resolved {
        seed,
        out,
        formats,
        m,
        k,
        c,
        p,
        trials,
        restarts,
        margins: (margins[0], margins[1]),
        horizon,
        options,
        sources,
    })
}

/// Writes the resolution to stderr, one key per line.
pub fn log_resolution(command: &str, cfg: &Resolved) {
    let value = serde_json::to_value(cfg).unwrap_or_default();
    eprintln!("declab {command}:");
    for (key, source) in &cfg.sources {
        let shown = value
            .get(key)
            .or_else(|| value.get("options").and_then(|o| o.get(key)))
            .or_else(|| if key == "format" { value.get("formats") } else { None })
            .map(|v| v.to_string())
            .unwrap_or_default();
        eprintln!("  {key} = {shown} ({source})");
    }
}
