//! Report records and their JSON/CSV renderings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hardy_core::Result;
use serde::Serialize;

use crate::config::{ConfigRecord, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Measured and recorded, with no tolerance attached.
    Report,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Report => "report",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub id: String,
    /// Short label naming the identity under test.
    pub paper_ref: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Variants {
    pub pairing: String,
    pub annihilation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: ConfigRecord,
    pub config_hash: String,
    pub variants: Variants,
    pub cases: Vec<Case>,
    /// Supplementary tables (weight tables, convergence studies).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, serde_json::Value>,
}

/// Collects cases for one suite.
pub struct Recorder<'a> {
    cfg: &'a RunConfig,
    prefix: String,
    pub cases: Vec<Case>,
    pub tables: BTreeMap<String, serde_json::Value>,
}

impl<'a> Recorder<'a> {
    pub fn new(cfg: &'a RunConfig, prefix: &str) -> Self {
        Self {
            cfg,
            prefix: prefix.into(),
            cases: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &RunConfig {
        self.cfg
    }

    /// Contracted check `residual ≤ tolerance`; NaN always fails.
    pub fn check(&mut self, id: &str, label: &str, residual: f64, default_tol: f64) -> bool {
        let id = format!("{}.{id}", self.prefix);
        let tol = self.cfg.tolerance(&id, default_tol);
        let ok = residual <= tol;
        self.cases.push(Case {
            id,
            paper_ref: label.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            tolerance: Some(tol),
        });
        ok
    }

    /// Pass/fail check with no numeric residual.
    pub fn check_bool(&mut self, id: &str, label: &str, ok: bool) -> bool {
        self.check(id, label, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn record(&mut self, id: &str, label: &str, value: f64) {
        self.cases.push(Case {
            id: format!("{}.{id}", self.prefix),
            paper_ref: label.into(),
            status: Status::Report,
            residual: value,
            tolerance: None,
        });
    }

    pub fn table(&mut self, name: &str, value: serde_json::Value) {
        self.tables.insert(format!("{}.{name}", self.prefix), value);
    }
}

impl Report {
    pub fn new(suite: &str, cfg: &RunConfig, cases: Vec<Case>, tables: BTreeMap<String, serde_json::Value>) -> Self {
        Self {
            suite: suite.into(),
            config: cfg.record(),
            config_hash: cfg.hash(),
            variants: Variants {
                pairing: cfg.pairing.name().into(),
                annihilation: cfg.variant.name().into(),
            },
            cases,
            tables,
        }
    }

    /// True iff no contracted case failed.
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,paper_ref,status,residual,tolerance\n");
        for c in &self.cases {
            let tol = c.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:e},{}\n",
                csv_field(&c.id),
                csv_field(&c.paper_ref),
                c.status.as_str(),
                c.residual,
                tol
            ));
        }
        out
    }

    /// Writes `<suite>.json` and `<suite>.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.suite));
        let csv = dir.join(format!("{}.csv", self.suite));
        fs::write(&json, self.to_json())?;
        fs::write(&csv, self.to_csv())?;
        Ok(vec![json, csv])
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
