use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::error::{LabError, Result};
use crate::geometry::Lattice;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Partial,
}

/// One asserted band or flag.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub expected: String,
    pub passed: bool,
}

impl Check {
    /// `lo <= value <= hi`; non-finite values fail.
    pub fn band(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            value: value.into(),
            expected: format!("[{lo:e}, {hi:e}]"),
            passed: value.is_finite() && value >= lo && value <= hi,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            value: value.into(),
            expected: format!("<= {hi:e}"),
            passed: value.is_finite() && value <= hi,
        }
    }

    pub fn finite(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            value: value.into(),
            expected: "finite".into(),
            passed: value.is_finite(),
        }
    }

    pub fn flag(name: impl Into<String>, value: bool, expected: bool) -> Self {
        Check {
            name: name.into(),
            value: value.into(),
            expected: expected.to_string(),
            passed: value == expected,
        }
    }
}

/// Column-labelled numeric table written as `profile.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    /// Effective quadrature node counts by rule name.
    pub nodes: BTreeMap<String, usize>,
    pub lattice: Option<BTreeMap<String, Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub status: Status,
    pub scenario: BTreeMap<String, String>,
    pub provenance: Provenance,
    pub summary: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub error: Option<ErrorInfo>,
    pub profile: Option<Table>,
    #[serde(skip)]
    pub lattice: Option<Arc<Lattice>>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            tool: "hankel-lab",
            version: env!("CARGO_PKG_VERSION"),
            experiment: experiment.to_string(),
            status: Status::Partial,
            scenario: BTreeMap::new(),
            provenance: Provenance::default(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            error: None,
            profile: None,
            lattice: None,
        }
    }

    pub fn put<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.summary.insert(key.to_string(), v);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn nodes(&mut self, rule: &str, count: usize) {
        self.provenance.nodes.insert(rule.to_string(), count);
    }

    pub fn set_lattice(&mut self, lat: Arc<Lattice>) {
        let mut info = BTreeMap::new();
        info.insert("r".into(), lat.r.into());
        info.insert("r_max".into(), lat.r_max.into());
        info.insert("seed".into(), lat.seed.into());
        info.insert("points".into(), lat.len().into());
        info.insert("multiplicity".into(), lat.multiplicity.into());
        self.provenance.lattice = Some(info);
        self.lattice = Some(lat);
    }

    /// Close the report after a run: `pass`/`fail` from the checks, or `partial` with
    /// the error.
    pub fn finish(&mut self, outcome: Result<()>) {
        match outcome {
            Ok(()) => {
                self.status = if self.checks.iter().all(|c| c.passed) {
                    Status::Pass
                } else {
                    Status::Fail
                };
            }
            Err(e) => {
                self.status = Status::Partial;
                self.error = Some(ErrorInfo {
                    kind: error_kind(&e),
                    message: e.to_string(),
                });
            }
        }
    }

    /// 0 when every check passed, 3 for a precondition failure, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match (&self.status, &self.error) {
            (Status::Pass, _) => 0,
            (Status::Partial, Some(e)) if e.kind == "precondition" => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Write `report.json`, and `profile.csv` / `lattice.csv` when present.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        if let Some(t) = &self.profile {
            t.write_csv(&dir.join("profile.csv"))?;
        }
        if let Some(lat) = &self.lattice {
            lat.write_csv(&dir.join("lattice.csv"))?;
        }
        Ok(())
    }
}

fn error_kind(e: &LabError) -> &'static str {
    if e.is_precondition() {
        "precondition"
    } else {
        "numerical"
    }
}
