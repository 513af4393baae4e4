use crate::error::HarnessError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    IntegralOracles,
    BoundSweeps,
    DecayFits,
    StrichartzRatios,
    Optimality,
    SchattenBounds,
    Duality,
    Vanishing,
    Khinchin,
    L2lp,
    Moments,
    Convergence,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 12] = [
        ExperimentName::IntegralOracles,
        ExperimentName::BoundSweeps,
        ExperimentName::DecayFits,
        ExperimentName::StrichartzRatios,
        ExperimentName::Optimality,
        ExperimentName::SchattenBounds,
        ExperimentName::Duality,
        ExperimentName::Vanishing,
        ExperimentName::Khinchin,
        ExperimentName::L2lp,
        ExperimentName::Moments,
        ExperimentName::Convergence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::IntegralOracles => "integral-oracles",
            ExperimentName::BoundSweeps => "bound-sweeps",
            ExperimentName::DecayFits => "decay-fits",
            ExperimentName::StrichartzRatios => "strichartz-ratios",
            ExperimentName::Optimality => "optimality",
            ExperimentName::SchattenBounds => "schatten-bounds",
            ExperimentName::Duality => "duality",
            ExperimentName::Vanishing => "vanishing",
            ExperimentName::Khinchin => "khinchin",
            ExperimentName::L2lp => "l2lp",
            ExperimentName::Moments => "moments",
            ExperimentName::Convergence => "convergence",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s)
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One experiment run as read from a TOML file.
///
/// ```toml
/// experiment-name = "khinchin"
/// master-seed = 7
/// output-path = "reports"
///
/// [parameters]
/// samples = 20000
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub experiment_name: ExperimentName,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Pinned-constants file; the one shipped with the harness when absent.
    #[serde(default)]
    pub pinned_constants: Option<PathBuf>,
    #[serde(default)]
    pub parameters: toml::Table,
}

impl ExperimentConfig {
    pub fn new(experiment_name: ExperimentName) -> Self {
        Self {
            experiment_name,
            master_seed: 0,
            output_path: None,
            pinned_constants: None,
            parameters: toml::Table::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn with_parameters(mut self, parameters: toml::Table) -> Self {
        self.parameters = parameters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }
}

/// Parameters of one experiment: unknown keys are rejected, missing ones
/// take their defaults.
pub fn parse_parameters<P: DeserializeOwned>(experiment: ExperimentName, table: &toml::Table) -> Result<P, HarnessError> {
    toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::Usage(format!("{experiment} parameters: {}", e.message())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in ExperimentName::ALL {
            assert_eq!(ExperimentName::parse(e.as_str()), Some(e));
            let v: ExperimentName = toml::Value::String(e.as_str().into()).try_into().unwrap();
            assert_eq!(v, e);
        }
        assert_eq!(ExperimentName::parse("nope"), None);
    }

    #[test]
    fn unknown_top_level_key_is_named() {
        let err = ExperimentConfig::from_toml_str("experiment-name = \"khinchin\"\nseeed = 3\n").unwrap_err();
        assert!(matches!(&err, HarnessError::Usage(m) if m.contains("seeed")), "{err}");
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml_str("experiment-name = \"duality\"").unwrap();
        assert_eq!(c.master_seed, 0);
        assert!(c.parameters.is_empty() && c.output_path.is_none());
    }
}
