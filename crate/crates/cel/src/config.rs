// SPDX-License-Identifier: Apache-2.0

//! Experiment files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "master_seed": 7,
//!   "experiments": [
//!     {
//!       "code": {"n": 24, "k": 12, "d": 4, "seed": 1, "pruned": true},
//!       "strategy": {"strategy": "wait_push", "epsilon": 0.1, "seed": 42},
//!       "budget": 2,
//!       "trials": 2000,
//!       "criterion": "max",
//!       "message_subset": 20
//!     }
//!   ]
//! }
//! ```

use std::path::Path;

use cel_core::channels::{FirstStepPlan, SecondStepPlan};
use cel_core::codes::TieBreak;
use cel_core::sim::{CodeSpec, Criterion, ExperimentConfig, StrategySpec};
use cel_core::Codeword;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub schema_version: u32,
    #[serde(default)]
    pub master_seed: Option<u64>,
    pub experiments: Vec<ExperimentEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentEntry {
    pub code: CodeEntry,
    pub strategy: StrategyEntry,
    pub budget: usize,
    pub trials: usize,
    #[serde(default)]
    pub tie_break: TieBreakEntry,
    #[serde(default)]
    pub criterion: CriterionEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message_subset: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CodeEntry {
    Sampled(SampledCode),
    Explicit(ExplicitCode),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SampledCode {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(default)]
    pub pruned: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExplicitCode {
    /// Codewords rendered position 0 first.
    pub words: Vec<String>,
    #[serde(default = "one")]
    pub coins_per_message: usize,
}

fn one() -> usize {
    1
}

fn default_epsilon() -> f64 {
    0.1
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyEntry {
    UniformRandom {
        #[serde(default)]
        seed: u64,
    },
    WaitPush {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wait_length: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
    Burst {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
    TwoStep {
        #[serde(default)]
        first: FirstStepEntry,
        #[serde(default)]
        q: usize,
        #[serde(default)]
        second: SecondStepEntry,
        #[serde(default)]
        seed: u64,
    },
    Omniscient {
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FirstStepEntry {
    #[default]
    None,
    Leading,
    Random,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SecondStepEntry {
    #[default]
    None,
    PushSamePrefix,
    PushOtherMessage,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakEntry {
    #[default]
    Uniform,
    LexMin,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CriterionEntry {
    #[default]
    Avg,
    Max,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ExperimentFile =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed experiment file: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        if file.experiments.is_empty() {
            return Err(CliError::Usage("experiment list is empty".into()));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl ExperimentEntry {
    /// The engine configuration; invalid words are reported as usage
    /// errors, everything else is validated when the experiment runs.
    pub fn to_config(&self) -> Result<ExperimentConfig, String> {
        let code = match &self.code {
            CodeEntry::Sampled(c) => CodeSpec::Sampled {
                n: c.n,
                k: c.k,
                d: c.d,
                seed: c.seed,
                pruned: c.pruned,
            },
            CodeEntry::Explicit(c) => CodeSpec::Explicit {
                words: c
                    .words
                    .iter()
                    .map(|w| w.parse::<Codeword>().map_err(|e| format!("bad codeword {w:?}: {e}")))
                    .collect::<Result<_, _>>()?,
                coins_per_message: c.coins_per_message,
            },
        };
        let (strategy, strategy_seed) = match self.strategy {
            StrategyEntry::UniformRandom { seed } => (StrategySpec::UniformRandom, seed),
            StrategyEntry::WaitPush {
                epsilon,
                wait_length,
                seed,
            } => (
                StrategySpec::WaitPush {
                    epsilon,
                    wait_length,
                },
                seed,
            ),
            StrategyEntry::Burst {
                start,
                length,
                seed,
            } => (StrategySpec::Burst { start, length }, seed),
            StrategyEntry::TwoStep {
                first,
                q,
                second,
                seed,
            } => {
                let first = match first {
                    FirstStepEntry::None => FirstStepPlan::None,
                    FirstStepEntry::Leading => FirstStepPlan::Leading { count: q },
                    FirstStepEntry::Random => FirstStepPlan::Random { count: q },
                };
                let second = match second {
                    SecondStepEntry::None => SecondStepPlan::None,
                    SecondStepEntry::PushSamePrefix => SecondStepPlan::PushSamePrefix,
                    SecondStepEntry::PushOtherMessage => SecondStepPlan::PushOtherMessage,
                };
                (StrategySpec::TwoStep { first, second }, seed)
            }
            StrategyEntry::Omniscient { seed } => (StrategySpec::Omniscient, seed),
        };
        Ok(ExperimentConfig {
            code,
            strategy,
            strategy_seed,
            budget: self.budget,
            trials: self.trials,
            tie_break: match self.tie_break {
                TieBreakEntry::Uniform => TieBreak::Uniform,
                TieBreakEntry::LexMin => TieBreak::LexMin,
            },
            criterion: match self.criterion {
                CriterionEntry::Avg => Criterion::Avg,
                CriterionEntry::Max => Criterion::Max,
            },
            strict: self.strict,
            message_subset: self.message_subset,
        })
    }
}
