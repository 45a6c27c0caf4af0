//! Report documents and their two renderings.
//!
//! The structured rendering is JSON. Every float is written with 17
//! significant digits in exponent form; non-finite values become `null`.
//! Maps are ordered by key and entries by check name, so a fixed
//! configuration and seed always give the same bytes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

pub const SCHEMA: &str = "twinmetric-report/1";

/// A float that serializes with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_num(self.0))
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt_num(self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Num(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

/// Nested lists of numbers, used for matrices.
pub fn num_rows(rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<Vec<Num>> {
    rows.into_iter().map(|r| r.into_iter().map(Num).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated.
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub kind: String,
    pub status: Status,
    /// Seed of the sample plan or random suite, when one was used.
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub residuals: BTreeMap<String, Num>,
    pub tolerances: BTreeMap<String, Num>,
    pub values: BTreeMap<String, Num>,
    pub message: Option<String>,
    /// Seconds; only recorded on request since it breaks reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<Num>,
}

impl ReportEntry {
    pub fn new(name: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: kind.into(),
            status: Status::Fail,
            seed: None,
            points: None,
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            values: BTreeMap::new(),
            message: None,
            wall_time: None,
        }
    }

    pub fn residual(&mut self, key: &str, x: f64) -> &mut Self {
        self.residuals.insert(key.into(), Num(x));
        self
    }

    pub fn tolerance(&mut self, key: &str, x: f64) -> &mut Self {
        self.tolerances.insert(key.into(), Num(x));
        self
    }

    pub fn value(&mut self, key: &str, x: f64) -> &mut Self {
        self.values.insert(key.into(), Num(x));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub entries: Vec<ReportEntry>,
}

impl ReportDocument {
    /// Sorts entries by name and derives the overall flag.
    pub fn new(suite: impl Into<String>, seed: u64, mut entries: Vec<ReportEntry>) -> Self {
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = entries.iter().all(ReportEntry::passed);
        Self { schema: SCHEMA.into(), suite: suite.into(), seed, passed, entries }
    }

    pub fn any_error(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Error)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "suite {} (seed {}): {verdict}", self.suite, self.seed);
        for e in &self.entries {
            let _ = write!(out, "{} {} [{}]", e.status, e.name, e.kind);
            if let Some(seed) = e.seed {
                let _ = write!(out, " seed={seed}");
            }
            if let Some(points) = e.points {
                let _ = write!(out, " points={points}");
            }
            if let Some(t) = e.wall_time {
                let _ = write!(out, " time={t}s");
            }
            out.push('\n');
            for (k, v) in &e.residuals {
                let _ = write!(out, "    residual {k} = {v}");
                if let Some(t) = e.tolerances.get(k) {
                    let _ = write!(out, " (tolerance {t})");
                }
                out.push('\n');
            }
            for (k, v) in e.tolerances.iter().filter(|(k, _)| !e.residuals.contains_key(*k)) {
                let _ = writeln!(out, "    tolerance {k} = {v}");
            }
            for (k, v) in &e.values {
                let _ = writeln!(out, "    value {k} = {v}");
            }
            if let Some(m) = &e.message {
                let _ = writeln!(out, "    note: {m}");
            }
        }
        out
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_structured<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values always serialize");
    s.push('\n');
    s
}
