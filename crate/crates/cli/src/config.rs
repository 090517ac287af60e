//! Run configuration: a flat `key = value` file plus command-line overrides.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! # comment
//! trunc = 6,4            # max degree N, dimension d
//! seed = 42
//! samples = 20000
//! levels = 1,2,4,8
//! pairing = BARGMANN     # W | H | BARGMANN
//! variant = BARGMANN_ADJOINT
//! workers = 4
//! out = reports
//! tol.intertwining = 1e-10
//! ```
//!
//! Blank lines are ignored and `#` starts a comment anywhere on a line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hardy_core::{AnnihilationVariant, Error, Pairing, Result, TruncationSpec};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: TruncationSpec,
    pub seed: u64,
    pub samples: usize,
    pub levels: Vec<usize>,
    pub pairing: Pairing,
    pub variant: AnnihilationVariant,
    /// Case-id prefix to tolerance.
    pub tolerances: BTreeMap<String, f64>,
    /// Thread count for Monte Carlo sampling; never part of a report.
    pub workers: Option<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spec: TruncationSpec { max_degree: 6, dim: 4 },
            seed: 42,
            samples: 20_000,
            levels: vec![1, 2, 4, 8],
            pairing: Pairing::Bargmann,
            variant: AnnihilationVariant::BargmannAdjoint,
            tolerances: BTreeMap::new(),
            workers: None,
            out: PathBuf::from("reports"),
        }
    }
}

/// The part of the configuration that determines report contents.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigRecord {
    pub max_degree: usize,
    pub dim: usize,
    pub seed: u64,
    pub samples: usize,
    pub levels: Vec<usize>,
    pub pairing: String,
    pub variant: String,
    pub tolerances: BTreeMap<String, f64>,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse '{value}'")))
}

/// `N,d`.
pub fn parse_trunc(value: &str) -> Result<TruncationSpec> {
    let v: Vec<usize> = parse_list("trunc", value)?;
    match v.as_slice() {
        [n, d] => TruncationSpec::new(*n, *d),
        _ => Err(Error::Parse(format!("trunc: expected N,d, got '{value}'"))),
    }
}

/// `prefix=value`.
pub fn parse_tolerance(value: &str) -> Result<(String, f64)> {
    let (k, v) = value
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("tolerance '{value}' is not prefix=value")))?;
    let tol: f64 = parse_one("tol", v)?;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parse(format!("tolerance for '{k}' must be non-negative")));
    }
    Ok((k.trim().to_string(), tol))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "trunc" => self.spec = parse_trunc(value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "samples" => {
                self.samples = parse_one(key, value)?;
                if self.samples < 2 {
                    return Err(Error::Parse("samples must be at least 2".into()));
                }
            }
            "levels" | "level" => {
                self.levels = parse_list(key, value)?;
                if self.levels.is_empty() || self.levels.contains(&0) {
                    return Err(Error::Parse("levels must be positive".into()));
                }
            }
            "pairing" => self.pairing = Pairing::parse(value)?,
            "variant" => self.variant = AnnihilationVariant::parse(value)?,
            "workers" => self.workers = Some(parse_one(key, value)?),
            "out" => self.out = PathBuf::from(value),
            k if k.starts_with("tol.") => {
                let (name, tol) = parse_tolerance(&format!("{}={value}", &k[4..]))?;
                self.tolerances.insert(name, tol);
            }
            _ => return Err(Error::Parse(format!("unknown setting '{key}'"))),
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Tolerance for a case: the longest matching override, else the default.
    pub fn tolerance(&self, case_id: &str, default: f64) -> f64 {
        self.tolerances
            .iter()
            .filter(|(k, _)| case_id.starts_with(k.as_str()))
            .max_by_key(|(k, _)| k.len())
            .map_or(default, |(_, v)| *v)
    }

    pub fn record(&self) -> ConfigRecord {
        ConfigRecord {
            max_degree: self.spec.max_degree,
            dim: self.spec.dim,
            seed: self.seed,
            samples: self.samples,
            levels: self.levels.clone(),
            pairing: self.pairing.name().into(),
            variant: self.variant.name().into(),
            tolerances: self.tolerances.clone(),
        }
    }

    /// SHA-256 of the canonical JSON of [`RunConfig::record`].
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.record()).expect("plain data");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
