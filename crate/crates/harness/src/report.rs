use crate::error::HarnessError;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};

/// A float that survives JSON: non-finite values are written as the strings
/// `"nan"`, `"inf"` and `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Num(pub f64);

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num(v)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"nan\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "nan" => Ok(Num(f64::NAN)),
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_nan() {
            f.write_str("nan")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "kebab-case")]
pub enum ColumnData {
    Number(Vec<Num>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Number(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, i: usize) -> String {
        match self {
            ColumnData::Number(v) => v[i].to_string(),
            ColumnData::Text(v) => v[i].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    /// Unit or `"1"` for dimensionless quantities.
    pub unit: String,
    pub description: String,
    pub data: ColumnData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub columns: Vec<Column>,
}

impl Table {
    pub fn new(name: &str, description: &str) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            columns: Vec::new(),
        }
    }

    pub fn number<I: IntoIterator<Item = f64>>(mut self, name: &str, unit: &str, description: &str, values: I) -> Self {
        self.columns.push(Column {
            name: name.into(),
            unit: unit.into(),
            description: description.into(),
            data: ColumnData::Number(values.into_iter().map(Num).collect()),
        });
        self
    }

    pub fn text<I: IntoIterator<Item = String>>(mut self, name: &str, description: &str, values: I) -> Self {
        self.columns.push(Column {
            name: name.into(),
            unit: "label".into(),
            description: description.into(),
            data: ColumnData::Text(values.into_iter().collect()),
        });
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Numeric column by name.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        match &self.column(name)?.data {
            ColumnData::Number(v) => Some(v.iter().map(|n| n.0).collect()),
            ColumnData::Text(_) => None,
        }
    }

    fn check_shape(&self) -> Result<(), HarnessError> {
        let n = self.rows();
        if let Some(c) = self.columns.iter().find(|c| c.data.len() != n) {
            return Err(HarnessError::Report(format!(
                "table {}: column {} has {} rows, expected {n}",
                self.name,
                c.name,
                c.data.len()
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        self.check_shape()?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                if c.unit == "label" || c.unit == "1" {
                    c.name.clone()
                } else {
                    format!("{} [{}]", c.name, c.unit)
                }
            })
            .collect();
        let csv_err = |e: csv::Error| HarnessError::Report(e.to_string());
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| c.data.cell(i))).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| HarnessError::Report(e.to_string()))
    }
}

/// How `observed` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|observed − expected| ≤ tolerance`
    Within,
    /// `|observed − expected| ≤ tolerance · |expected|`
    Relative,
    /// `observed ≤ expected + tolerance`
    AtMost,
    /// `observed ≥ expected − tolerance`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertion {
    pub name: String,
    pub description: String,
    pub comparison: Comparison,
    pub expected: Num,
    pub observed: Num,
    pub tolerance: Num,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: &str, description: &str, comparison: Comparison, expected: f64, observed: f64, tolerance: f64) -> Self {
        let mut a = Self {
            name: name.into(),
            description: description.into(),
            comparison,
            expected: Num(expected),
            observed: Num(observed),
            tolerance: Num(tolerance),
            pass: false,
        };
        a.pass = a.evaluate();
        a
    }

    pub fn within(name: &str, description: &str, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self::new(name, description, Comparison::Within, expected, observed, tolerance)
    }

    pub fn at_most(name: &str, description: &str, bound: f64, observed: f64) -> Self {
        Self::new(name, description, Comparison::AtMost, bound, observed, 0.0)
    }

    pub fn at_least(name: &str, description: &str, bound: f64, observed: f64) -> Self {
        Self::new(name, description, Comparison::AtLeast, bound, observed, 0.0)
    }

    /// A yes/no outcome recorded as `1 ≥ 1` or `0 ≥ 1`.
    pub fn flag(name: &str, description: &str, ok: bool) -> Self {
        Self::at_least(name, description, 1.0, if ok { 1.0 } else { 0.0 })
    }

    /// Recompute the verdict from the recorded fields only. Any NaN fails.
    pub fn evaluate(&self) -> bool {
        let (e, o, t) = (self.expected.0, self.observed.0, self.tolerance.0);
        if e.is_nan() || o.is_nan() || t.is_nan() {
            return false;
        }
        match self.comparison {
            Comparison::Within => (o - e).abs() <= t,
            Comparison::Relative => (o - e).abs() <= t * e.abs(),
            Comparison::AtMost => o <= e + t,
            Comparison::AtLeast => o >= e - t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Versions {
    pub harness: String,
    pub core: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            harness: env!("CARGO_PKG_VERSION").into(),
            core: strichartz_core::VERSION.into(),
        }
    }
}

/// Wall-clock information; the only part of a report allowed to differ
/// between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub experiment: String,
    /// SHA-256 of the resolved configuration.
    pub config_hash: String,
    pub seed: u64,
    /// Experiment name, seed, every parameter after defaults, and the pinned
    /// constants consulted.
    pub config: serde_json::Value,
    pub versions: Versions,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub metadata: Metadata,
    pub tables: Vec<Table>,
    pub assertions: Vec<Assertion>,
}

/// Outcome of re-verifying a report offline.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub total: usize,
    pub failed: Vec<String>,
    /// Assertions whose recorded verdict disagrees with a recomputation.
    pub inconsistent: Vec<String>,
}

impl CheckSummary {
    pub fn ok(&self) -> bool {
        self.failed.is_empty() && self.inconsistent.is_empty()
    }
}

pub fn config_hash(config: &serde_json::Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Re-evaluate every assertion from its recorded fields.
    pub fn check(&self) -> CheckSummary {
        let mut failed = Vec::new();
        let mut inconsistent = Vec::new();
        for a in &self.assertions {
            let verdict = a.evaluate();
            if !verdict {
                failed.push(a.name.clone());
            }
            if verdict != a.pass {
                inconsistent.push(a.name.clone());
            }
        }
        CheckSummary {
            total: self.assertions.len(),
            failed,
            inconsistent,
        }
    }

    /// The report with timing zeroed: identical for identical runs.
    pub fn body(&self) -> Report {
        let mut r = self.clone();
        r.metadata.timing = Timing::default();
        r
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| HarnessError::Report(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Report(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn assertions_table(&self) -> Table {
        let a = &self.assertions;
        Table::new("assertions", "every check with its verdict")
            .text("name", "assertion", a.iter().map(|x| x.name.clone()))
            .text(
                "comparison",
                "within, relative, at-most or at-least",
                a.iter().map(|x| {
                    serde_json::to_value(x.comparison)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default()
                }),
            )
            .number("expected", "1", "reference value", a.iter().map(|x| x.expected.0))
            .number("observed", "1", "measured value", a.iter().map(|x| x.observed.0))
            .number("tolerance", "1", "allowed deviation", a.iter().map(|x| x.tolerance.0))
            .text("pass", "verdict", a.iter().map(|x| x.pass.to_string()))
    }

    /// Write `<experiment>.json` plus one `<experiment>.<table>.csv` per table
    /// (and one for the assertions) into `dir`. Returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let stem = &self.metadata.experiment;
        let mut out = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, self.to_json()?)?;
        out.push(json);
        for t in self.tables.iter().chain(std::iter::once(&self.assertions_table())) {
            let path = dir.join(format!("{stem}.{}.csv", t.name));
            std::fs::write(&path, t.to_csv()?)?;
            out.push(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_round_trip() {
        let v = vec![Num(1.5), Num(f64::NAN), Num(f64::INFINITY), Num(f64::NEG_INFINITY), Num(-0.0)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"nan","inf","-inf",-0.0]"#);
        let back: Vec<Num> = serde_json::from_str(&s).unwrap();
        assert!(back[1].0.is_nan());
        assert_eq!(back[2].0, f64::INFINITY);
        assert_eq!(back[3].0, f64::NEG_INFINITY);
        assert!(serde_json::from_str::<Num>("\"x\"").is_err());
    }

    #[test]
    fn comparisons() {
        assert!(Assertion::within("a", "", 1.0, 1.05, 0.1).pass);
        assert!(!Assertion::within("a", "", 1.0, 1.2, 0.1).pass);
        assert!(Assertion::new("r", "", Comparison::Relative, 10.0, 10.4, 0.05).pass);
        assert!(!Assertion::new("r", "", Comparison::Relative, 10.0, 10.6, 0.05).pass);
        assert!(Assertion::at_most("m", "", 4.0, 4.0).pass);
        assert!(!Assertion::at_least("m", "", 4.0, 3.9).pass);
        assert!(!Assertion::at_most("n", "", 4.0, f64::NAN).pass);
        assert!(Assertion::flag("f", "", true).pass && !Assertion::flag("f", "", false).pass);
    }

    #[test]
    fn csv_quotes_and_checks_shape() {
        let t = Table::new("t", "")
            .text("label", "", vec!["a,b".to_string(), "c".into()])
            .number("x", "s", "", vec![1.0, f64::NAN]);
        assert_eq!(t.to_csv().unwrap(), "label,x [s]\n\"a,b\",1\nc,nan\n");
        let bad = t.number("y", "1", "", vec![1.0]);
        assert!(bad.to_csv().is_err());
    }

    #[test]
    fn check_spots_tampering() {
        let mut a = Assertion::at_most("bound", "", 1.0, 0.5);
        let mut r = Report {
            metadata: Metadata {
                experiment: "x".into(),
                config_hash: String::new(),
                seed: 0,
                config: serde_json::Value::Null,
                versions: Versions::current(),
                timing: Timing::default(),
            },
            tables: vec![],
            assertions: vec![a.clone()],
        };
        assert!(r.check().ok());
        a.observed = Num(2.0);
        r.assertions = vec![a];
        let c = r.check();
        assert_eq!((c.failed.len(), c.inconsistent.len()), (1, 1));
    }
}
