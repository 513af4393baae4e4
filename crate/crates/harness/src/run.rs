use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::experiments::{run_experiment, Context};
use crate::pinned::{self, PinnedConstants};
use crate::report::{config_hash, Assertion, Metadata, Report, Timing, Versions};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Name of the assertion recording whether the experiment ran to the end.
pub const COMPLETED: &str = "completed";

/// Where reports go when neither the config nor the command line says.
pub const DEFAULT_OUTPUT: &str = "reports";

fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// Run `config` against `pins` and build its report.
///
/// Parameter errors come back as `Err`; a numerical failure inside the
/// experiment yields a report whose `completed` assertion fails.
pub fn execute(config: &ExperimentConfig, pins: &mut PinnedConstants) -> Result<Report, HarnessError> {
    let started = unix_ms();
    let clock = Instant::now();
    let name = config.experiment_name;
    let mut ctx = Context::new(name, config.master_seed, pins);
    let outcome = run_experiment(&mut ctx, &config.parameters);
    let failure = match outcome {
        Ok(()) => None,
        Err(HarnessError::Numerical(e)) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    let Context {
        mut tables,
        mut assertions,
        resolved,
        ..
    } = ctx;
    let desc = failure.as_deref().map_or_else(|| "the experiment ran to the end".to_string(), |e| format!("stopped: {e}"));
    assertions.push(Assertion::flag(COMPLETED, &desc, failure.is_none()));
    if failure.is_some() {
        tables.retain(|t| t.rows() > 0);
    }

    let resolved_config = serde_json::json!({
        "experiment-name": name.as_str(),
        "master-seed": config.master_seed,
        "parameters": resolved,
        "pinned-constants": pins.snapshot(name.as_str()),
    });
    let finished = unix_ms();
    Ok(Report {
        metadata: Metadata {
            experiment: name.as_str().to_string(),
            config_hash: config_hash(&resolved_config),
            seed: config.master_seed,
            config: resolved_config,
            versions: Versions::current(),
            timing: Timing {
                started_unix_ms: started,
                finished_unix_ms: finished,
                elapsed_seconds: clock.elapsed().as_secs_f64(),
                threads: strichartz_core::par::threads(),
            },
        },
        tables,
        assertions,
    })
}

/// Load the pinned constants named by `config` (or the shipped file), run,
/// and save any newly pinned values.
pub fn run(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let path = config.pinned_constants.clone().unwrap_or_else(pinned::default_path);
    let mut pins = PinnedConstants::load(&path)?;
    let report = execute(config, &mut pins)?;
    pins.save()?;
    Ok(report)
}

/// Exit status for a finished report: 0 all pass, 3 the experiment stopped
/// early, 1 some other assertion failed.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        0
    } else if report.assertion(COMPLETED).is_some_and(|a| !a.pass) {
        3
    } else {
        1
    }
}

pub fn output_dir(config: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentName;

    fn quick_oracles() -> ExperimentConfig {
        let params: toml::Table = toml::from_str("gamma-b = [0.5, 1.0]\npv-t = [1.0]\npv-b = [0.3]\nunit-b = [0.3]").unwrap();
        ExperimentConfig::new(ExperimentName::IntegralOracles).with_parameters(params)
    }

    #[test]
    fn oracle_report_passes_and_records_config() {
        let report = execute(&quick_oracles(), &mut PinnedConstants::ephemeral()).unwrap();
        assert!(report.passed(), "{:?}", report.check());
        assert_eq!(exit_code(&report), 0);
        let cfg = &report.metadata.config;
        assert_eq!(cfg["parameters"]["gamma-b"], serde_json::json!([0.5, 1.0]));
        assert_eq!(cfg["parameters"]["quadrature-tol"], serde_json::json!(1e-8));
        assert_eq!(report.metadata.config_hash.len(), 64);
    }

    #[test]
    fn bad_parameter_is_a_usage_error() {
        let params: toml::Table = toml::from_str("gama-b = [1.0]").unwrap();
        let cfg = ExperimentConfig::new(ExperimentName::IntegralOracles).with_parameters(params);
        let err = execute(&cfg, &mut PinnedConstants::ephemeral()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("gama-b"), "{err}");
    }

    #[test]
    fn numerical_failure_is_reported() {
        // b = 0 makes |Γ(ib)| infinite, which the core rejects.
        let params: toml::Table = toml::from_str("gamma-b = [0.0]").unwrap();
        let cfg = ExperimentConfig::new(ExperimentName::IntegralOracles).with_parameters(params);
        let report = execute(&cfg, &mut PinnedConstants::ephemeral()).unwrap();
        assert!(!report.assertion(COMPLETED).unwrap().pass);
        assert_eq!(exit_code(&report), 3);
    }

    #[test]
    fn output_dir_precedence() {
        let mut cfg = quick_oracles();
        assert_eq!(output_dir(&cfg, None), PathBuf::from("reports"));
        cfg.output_path = Some("a".into());
        assert_eq!(output_dir(&cfg, None), PathBuf::from("a"));
        assert_eq!(output_dir(&cfg, Some(Path::new("b"))), PathBuf::from("b"));
    }
}
