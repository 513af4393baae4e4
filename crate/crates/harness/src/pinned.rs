use crate::error::HarnessError;
use crate::report::{Assertion, Comparison};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// The constants file shipped with the harness.
pub fn default_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("pinned-constants.toml")
}

/// Empirical constants from a first run, keyed by experiment and name.
///
/// ```toml
/// [bound-sweeps]
/// pv-inside = 0.2914
/// ```
#[derive(Debug, Clone, Default)]
pub struct PinnedConstants {
    path: Option<PathBuf>,
    values: BTreeMap<String, BTreeMap<String, f64>>,
    added: BTreeMap<String, BTreeMap<String, f64>>,
}

impl PinnedConstants {
    /// Read `path`; a missing file means nothing is pinned yet.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let values = match std::fs::read_to_string(path) {
            Ok(text) => toml::from_str(&text)
                .map_err(|e| HarnessError::Usage(format!("pinned constants {}: {}", path.display(), e.message())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            path: Some(path.to_path_buf()),
            values,
            added: BTreeMap::new(),
        })
    }

    /// An in-memory store that is never written back.
    pub fn ephemeral() -> Self {
        Self::default()
    }

    pub fn get(&self, experiment: &str, key: &str) -> Option<f64> {
        self.values.get(experiment)?.get(key).copied()
    }

    /// The pinned value, pinning `observed` when none exists yet.
    pub fn resolve(&mut self, experiment: &str, key: &str, observed: f64) -> f64 {
        if let Some(v) = self.get(experiment, key) {
            return v;
        }
        if observed.is_finite() {
            for map in [&mut self.values, &mut self.added] {
                map.entry(experiment.to_string()).or_default().insert(key.to_string(), observed);
            }
        }
        observed
    }

    /// `observed` within `rel_tol` of the pinned value.
    pub fn relative(&mut self, experiment: &str, key: &str, observed: f64, rel_tol: f64) -> Assertion {
        let expected = self.resolve(experiment, key, observed);
        Assertion::new(
            &format!("pinned:{key}"),
            &format!("{key} within {}% of its pinned first-run value", rel_tol * 100.0),
            Comparison::Relative,
            expected,
            observed,
            rel_tol,
        )
    }

    /// `observed ≤ factor × pinned`.
    pub fn bounded(&mut self, experiment: &str, key: &str, observed: f64, factor: f64) -> Assertion {
        let pinned = self.resolve(experiment, key, observed);
        Assertion::at_most(
            &format!("pinned:{key}"),
            &format!("{key} at most {factor} times its pinned first-run value"),
            factor * pinned,
            observed,
        )
    }

    /// Constants consulted or created during this run, for the report.
    pub fn snapshot(&self, experiment: &str) -> BTreeMap<String, f64> {
        self.values.get(experiment).cloned().unwrap_or_default()
    }

    pub fn has_new_values(&self) -> bool {
        !self.added.is_empty()
    }

    /// Merge newly pinned values into the file on disk.
    pub fn save(&self) -> Result<(), HarnessError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if self.added.is_empty() {
            return Ok(());
        }
        let mut on_disk = Self::load(path)?.values;
        for (exp, vals) in &self.added {
            let entry = on_disk.entry(exp.clone()).or_default();
            for (k, v) in vals {
                entry.entry(k.clone()).or_insert(*v);
            }
        }
        let text = toml::to_string(&on_disk).map_err(|e| HarnessError::Report(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_run_pins_then_checks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pins.toml");
        let mut p = PinnedConstants::load(&path).unwrap();
        let a = p.relative("exp", "c", 2.0, 0.05);
        assert!(a.pass && a.expected.0 == 2.0);
        p.save().unwrap();
        let mut q = PinnedConstants::load(&path).unwrap();
        assert_eq!(q.get("exp", "c"), Some(2.0));
        assert!(q.relative("exp", "c", 2.09, 0.05).pass);
        assert!(!q.relative("exp", "c", 2.2, 0.05).pass);
        assert!(q.bounded("exp", "c", 2.2, 1.1).pass);
        assert!(!q.bounded("exp", "c", 2.3, 1.1).pass);
        assert!(!q.has_new_values());
    }

    #[test]
    fn non_finite_values_are_not_pinned() {
        let mut p = PinnedConstants::ephemeral();
        assert!(!p.relative("e", "k", f64::NAN, 0.1).pass);
        assert_eq!(p.get("e", "k"), None);
    }
}
