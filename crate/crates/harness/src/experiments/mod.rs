//! The twelve named experiments.

mod integrals;
mod kernels;
mod random;
mod systems;

use crate::config::{parse_parameters, ExperimentName};
use crate::error::HarnessError;
use crate::pinned::PinnedConstants;
use crate::report::{Assertion, Table};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Everything an experiment reads and produces.
pub struct Context<'a> {
    pub experiment: ExperimentName,
    pub seed: u64,
    pins: &'a mut PinnedConstants,
    pub tables: Vec<Table>,
    pub assertions: Vec<Assertion>,
    pub resolved: serde_json::Value,
}

impl<'a> Context<'a> {
    pub fn new(experiment: ExperimentName, seed: u64, pins: &'a mut PinnedConstants) -> Self {
        Self {
            experiment,
            seed,
            pins,
            tables: Vec::new(),
            assertions: Vec::new(),
            resolved: serde_json::Value::Null,
        }
    }

    /// Parse the parameter table and remember the resolved values.
    fn params<P: DeserializeOwned + Serialize>(&mut self, table: &toml::Table) -> Result<P, HarnessError> {
        let p: P = parse_parameters(self.experiment, table)?;
        self.resolved = serde_json::to_value(&p).map_err(|e| HarnessError::Report(e.to_string()))?;
        Ok(p)
    }

    fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    fn check(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    fn pin_relative(&mut self, key: &str, observed: f64, rel_tol: f64) {
        let a = self.pins.relative(self.experiment.as_str(), key, observed, rel_tol);
        self.assertions.push(a);
    }

    fn pin_bounded(&mut self, key: &str, observed: f64, factor: f64) {
        let a = self.pins.bounded(self.experiment.as_str(), key, observed, factor);
        self.assertions.push(a);
    }

    /// Generator for stream `stream` of this run's seed.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub fn run_experiment(ctx: &mut Context, parameters: &toml::Table) -> Result<(), HarnessError> {
    match ctx.experiment {
        ExperimentName::IntegralOracles => integrals::oracles(ctx, parameters),
        ExperimentName::BoundSweeps => integrals::sweeps(ctx, parameters),
        ExperimentName::DecayFits => kernels::decay_fits(ctx, parameters),
        ExperimentName::StrichartzRatios => systems::strichartz_ratios(ctx, parameters),
        ExperimentName::Optimality => systems::optimality(ctx, parameters),
        ExperimentName::SchattenBounds => systems::schatten_bounds(ctx, parameters),
        ExperimentName::Duality => systems::duality(ctx, parameters),
        ExperimentName::Vanishing => systems::vanishing(ctx, parameters),
        ExperimentName::Khinchin => random::khinchin(ctx, parameters),
        ExperimentName::L2lp => random::l2lp(ctx, parameters),
        ExperimentName::Moments => random::moments(ctx, parameters),
        ExperimentName::Convergence => random::convergence(ctx, parameters),
    }
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}
