//! Run configuration: a TOML file merged with command-line flags (flags win), and the
//! JSON parameter files for solutions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

use vmkdv_core::numerics::{Grid, DEFAULT_ACCURACY};
use vmkdv_core::solutions::{BreatherParams, SolitonParams, TimeVector};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub nx: Option<usize>,
    pub accuracy: Option<u32>,
}

/// Everything a config file may set. Unknown keys are rejected with their location.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
    pub n: Option<u32>,
    pub cap: Option<u32>,
    pub params: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub quick: Option<bool>,
    pub seed: Option<u64>,
    pub golden_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridFile,
    #[serde(default)]
    pub times: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// `t1`, `t3`, ... keyed times; `t1` shifts x.
pub fn parse_times(map: &BTreeMap<String, f64>) -> Result<TimeVector, CliError> {
    let mut t = TimeVector::new(0.0);
    for (k, v) in map {
        let odd = k
            .strip_prefix('t')
            .and_then(|s| s.parse::<u32>().ok())
            .filter(|m| m % 2 == 1)
            .ok_or_else(|| CliError::Config(format!("time key `{k}` is not of the form t1, t3, t5, ...")))?;
        t.set((odd - 1) / 2, *v);
    }
    Ok(t)
}

pub fn grid(file: &GridFile, x0: Option<f64>, x1: Option<f64>, nx: Option<usize>) -> Result<Grid, CliError> {
    let d = Grid::default();
    Grid::new(x0.or(file.x0).unwrap_or(d.x0), x1.or(file.x1).unwrap_or(d.x1), nx.or(file.nx).unwrap_or(d.nx))
        .map_err(|e| CliError::Config(e.to_string()))
}

pub fn accuracy(file: &GridFile, flag: Option<u32>) -> Result<u32, CliError> {
    let a = flag.or(file.accuracy).unwrap_or(DEFAULT_ACCURACY);
    if a < 2 || a % 2 == 1 {
        return Err(CliError::Config(format!("stencil accuracy must be even and >= 2, got {a}")));
    }
    Ok(a)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonFile {
    pub mu: Option<f64>,
    pub c0: Option<f64>,
    pub c: Option<Vec<f64>>,
    #[serde(default)]
    pub times: BTreeMap<String, f64>,
}

impl SolitonFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn params(&self, normalize: bool) -> Result<SolitonParams, CliError> {
        let missing = |f: &str| CliError::Config(format!("soliton parameter `{f}` is missing"));
        let mu = self.mu.ok_or_else(|| missing("mu"))?;
        let c0 = self.c0.ok_or_else(|| missing("c0"))?;
        let c = self.c.clone().ok_or_else(|| missing("c"))?;
        let p = if normalize { SolitonParams::normalized(mu, c0, c) } else { SolitonParams::new(mu, c0, c) };
        p.map_err(|e| CliError::Config(e.to_string()))
    }
}

/// `{ "mu": [re, im], "s": s, "C": [[[re, im], ...], ...], "times": {...} }`, with `C` given
/// row by row (N+2 rows of s entries).
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreatherFile {
    pub mu: Option<[f64; 2]>,
    pub s: Option<usize>,
    #[serde(rename = "C")]
    pub c: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub times: BTreeMap<String, f64>,
}

impl BreatherFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn params(&self) -> Result<BreatherParams, CliError> {
        let missing = |f: &str| CliError::Config(format!("breather parameter `{f}` is missing"));
        let [re, im] = self.mu.ok_or_else(|| missing("mu"))?;
        let rows = self.c.as_ref().ok_or_else(|| missing("C"))?;
        let s = rows.first().map_or(0, |r| r.len());
        if let Some(row) = rows.iter().position(|r| r.len() != s) {
            return Err(CliError::Config(format!("C row {row} has {} entries, expected {s}", rows[row].len())));
        }
        if let Some(declared) = self.s.filter(|d| *d != s) {
            return Err(CliError::Config(format!("s = {declared} but C has {s} columns")));
        }
        let c = DMatrix::from_fn(rows.len(), s, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        BreatherParams::new(Complex64::new(re, im), c).map_err(|e| CliError::Config(e.to_string()))
    }
}
