// SPDX-License-Identifier: Apache-2.0

//! Parallel experiment execution.
//!
//! Trials are farmed out to a rayon pool and collected back in trial order,
//! so the report does not depend on the worker count.

use cel_core::sim::{ErrorEstimate, Experiment, ExperimentConfig};
use rayon::prelude::*;

use crate::CliError;

pub struct Runner {
    pool: rayon::ThreadPool,
}

/// One row of a matrix run.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOutcome {
    pub config_hash: Option<u64>,
    pub criterion: &'static str,
    pub strategy: &'static str,
    pub causal: bool,
    pub trials: usize,
    pub result: Result<ErrorEstimate, String>,
}

impl Runner {
    pub fn new(jobs: usize) -> Result<Self, CliError> {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
        Ok(Runner { pool })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn estimate(&self, config: &ExperimentConfig, master_seed: u64) -> cel_core::Result<ErrorEstimate> {
        let experiment = Experiment::prepare(config)?;
        let plan = experiment.plan(master_seed);
        let outcomes = self.pool.install(|| {
            plan.par_iter()
                .enumerate()
                .map(|(i, &m)| experiment.trial(master_seed, i as u64, m))
                .collect::<cel_core::Result<Vec<_>>>()
        })?;
        Ok(experiment.summarize(&outcomes))
    }

    /// Runs each entry in order; entries that failed to convert or to run
    /// become error rows.
    pub fn run_matrix(&self, entries: &[Result<ExperimentConfig, String>], master_seed: u64) -> Vec<MatrixOutcome> {
        entries
            .iter()
            .map(|entry| match entry {
                Ok(config) => MatrixOutcome {
                    config_hash: Some(config.config_hash()),
                    criterion: config.criterion.name(),
                    strategy: config.strategy.name(),
                    causal: config.strategy.is_causal(),
                    trials: config.trials,
                    result: self.estimate(config, master_seed).map_err(|e| e.to_string()),
                },
                Err(msg) => MatrixOutcome {
                    config_hash: None,
                    criterion: "",
                    strategy: "",
                    causal: false,
                    trials: 0,
                    result: Err(msg.clone()),
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cel_core::sim::{self, CodeSpec, StrategySpec};

    #[test]
    fn parallel_matches_serial() {
        let config = ExperimentConfig::new(
            CodeSpec::Sampled {
                n: 12,
                k: 4,
                d: 2,
                seed: 5,
                pruned: false,
            },
            StrategySpec::UniformRandom,
            4,
            500,
        );
        let serial = sim::estimate(&config, 3).unwrap();
        for jobs in [1, 3, 4] {
            assert_eq!(Runner::new(jobs).unwrap().estimate(&config, 3).unwrap(), serial);
        }
    }

    #[test]
    fn zero_jobs_is_usage_error() {
        assert!(Runner::new(0).is_err());
    }
}
