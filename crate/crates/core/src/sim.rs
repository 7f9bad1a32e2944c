// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo estimation of average and maximal decoding error.
//!
//! Trial `i` of an experiment draws everything it needs from
//! `trial_seed(master_seed, config_hash, i)`, so trials can run in any order
//! or in parallel and still reduce to the same report.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;

use crate::channels::{self, FirstStepPlan, SecondStepPlan, Strategy};
use crate::codes::{self, Codebook, TieBreak};
use crate::error::{Error, Result};
use crate::seed::{self, Fnv1a};
use crate::word::{self, Codeword};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub enum CodeSpec {
    /// A sampled systematic table, optionally pruned against the
    /// experiment's budget.
    Sampled {
        n: usize,
        k: usize,
        d: usize,
        seed: u64,
        pruned: bool,
    },
    /// Word `i` encodes message `i / coins_per_message` with coin
    /// `i % coins_per_message`.
    Explicit {
        words: Vec<Codeword>,
        coins_per_message: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategySpec {
    UniformRandom,
    WaitPush {
        epsilon: f64,
        wait_length: Option<usize>,
    },
    /// A burst of `length` (default: the budget) erasures starting at
    /// `start`, or at a uniformly random start when `start` is `None`.
    Burst {
        start: Option<usize>,
        length: Option<usize>,
    },
    TwoStep {
        first: FirstStepPlan,
        second: SecondStepPlan,
    },
    Omniscient,
}

impl StrategySpec {
    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::UniformRandom => "uniform_random",
            StrategySpec::WaitPush { .. } => "wait_push",
            StrategySpec::Burst { .. } => "burst",
            StrategySpec::TwoStep { .. } => "two_step",
            StrategySpec::Omniscient => "omniscient",
        }
    }

    pub fn is_causal(&self) -> bool {
        !matches!(self, StrategySpec::TwoStep { .. } | StrategySpec::Omniscient)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    Avg,
    Max,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Avg => "avg",
            Criterion::Max => "max",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub code: CodeSpec,
    pub strategy: StrategySpec,
    pub strategy_seed: u64,
    pub budget: usize,
    pub trials: usize,
    pub tie_break: TieBreak,
    pub criterion: Criterion,
    /// Count coin mismatches as errors; defaults to off for `Avg` and on
    /// for `Max`.
    pub strict: Option<bool>,
    /// Restrict `Max` to this many messages, chosen by seeded sampling.
    pub message_subset: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(code: CodeSpec, strategy: StrategySpec, budget: usize, trials: usize) -> Self {
        ExperimentConfig {
            code,
            strategy,
            strategy_seed: 0,
            budget,
            trials,
            tie_break: TieBreak::Uniform,
            criterion: Criterion::Avg,
            strict: None,
            message_subset: None,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.strict.unwrap_or(self.criterion == Criterion::Max)
    }

    /// FNV-1a over a canonical encoding of every field.
    pub fn config_hash(&self) -> u64 {
        let mut h = Fnv1a::default();
        match &self.code {
            CodeSpec::Sampled {
                n,
                k,
                d,
                seed,
                pruned,
            } => {
                h.write(b"sampled");
                for v in [*n as u64, *k as u64, *d as u64, *seed, *pruned as u64] {
                    h.write_u64(v);
                }
            }
            CodeSpec::Explicit {
                words,
                coins_per_message,
            } => {
                h.write(b"explicit");
                h.write_u64(*coins_per_message as u64);
                h.write_u64(words.len() as u64);
                for w in words {
                    h.write_u64(w.len() as u64);
                    h.write(&w.bits().to_le_bytes());
                }
            }
        }
        h.write(self.strategy.name().as_bytes());
        let opt = |h: &mut Fnv1a, v: Option<usize>| match v {
            None => h.write(b"-"),
            Some(v) => h.write_u64(v as u64),
        };
        match &self.strategy {
            StrategySpec::UniformRandom | StrategySpec::Omniscient => {}
            StrategySpec::WaitPush {
                epsilon,
                wait_length,
            } => {
                h.write_f64(*epsilon);
                opt(&mut h, *wait_length);
            }
            StrategySpec::Burst { start, length } => {
                opt(&mut h, *start);
                opt(&mut h, *length);
            }
            StrategySpec::TwoStep { first, second } => {
                match first {
                    FirstStepPlan::None => h.write(b"none"),
                    FirstStepPlan::Leading { count } => {
                        h.write(b"leading");
                        h.write_u64(*count as u64);
                    }
                    FirstStepPlan::Random { count } => {
                        h.write(b"random");
                        h.write_u64(*count as u64);
                    }
                    FirstStepPlan::Fixed(p) => {
                        h.write(b"fixed");
                        h.write(&p.mask().to_le_bytes());
                    }
                }
                h.write_u64(*second as u64);
            }
        }
        h.write_u64(self.strategy_seed);
        h.write_u64(self.budget as u64);
        h.write_u64(self.trials as u64);
        h.write_u64(self.tie_break as u64);
        h.write_u64(self.criterion as u64);
        h.write_u64(self.is_strict() as u64);
        opt(&mut h, self.message_subset);
        h.finish()
    }
}

/// Result of one transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub message: u64,
    pub coin: u64,
    pub decoded_message: Option<u64>,
    pub decoded_coin: Option<u64>,
    pub erasures: usize,
    /// Wrong (or no) message.
    pub type_one: bool,
    /// Right message, wrong coin.
    pub type_two: bool,
    pub error: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MessageStat {
    pub message: u64,
    pub trials: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub criterion: Criterion,
    pub point_estimate: f64,
    pub trials: usize,
    pub errors: usize,
    pub wilson: (f64, f64),
    pub type_one_errors: usize,
    pub type_two_errors: usize,
    /// Per-message counts, ascending by message; `Max` only.
    pub per_message: Option<Vec<MessageStat>>,
}

/// 95% Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0).min(p) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0).max(p) };
    (lo, hi)
}

/// A validated experiment with its code built.
#[derive(Clone, Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    hash: u64,
    codebook: Codebook,
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let codebook = match &config.code {
            CodeSpec::Sampled {
                n,
                k,
                d,
                seed,
                pruned,
            } => {
                let table = codes::sample_systematic_code(*n, *k, *d, *seed)?;
                if *pruned {
                    codes::prune(&table, config.budget)?.codebook().clone()
                } else {
                    table.codebook().clone()
                }
            }
            CodeSpec::Explicit {
                words,
                coins_per_message,
            } => explicit_codebook(words, *coins_per_message)?,
        };
        let n = codebook.n();
        if config.budget > n {
            return Err(Error::invalid(alloc::format!(
                "budget {} exceeds n = {n}",
                config.budget
            )));
        }
        if config.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if config.criterion == Criterion::Max {
            let available = codebook.messages().len();
            let wanted = config.message_subset.unwrap_or(available);
            if wanted == 0 || wanted > available {
                return Err(Error::invalid(alloc::format!(
                    "message subset {wanted} not in 1..={available}"
                )));
            }
            if config.trials < wanted {
                return Err(Error::invalid(alloc::format!(
                    "{} trials cannot cover {wanted} messages",
                    config.trials
                )));
            }
        }
        let experiment = Experiment {
            hash: config.config_hash(),
            config: config.clone(),
            codebook,
        };
        // surface strategy parameter errors before any trial runs
        experiment.strategy(0)?;
        Ok(experiment)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn config_hash(&self) -> u64 {
        self.hash
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// A fresh strategy instance for one transmission.
    pub fn strategy(&self, channel_seed: u64) -> Result<Box<dyn Strategy + '_>> {
        let (n, budget) = (self.codebook.n(), self.config.budget);
        Ok(match &self.config.strategy {
            StrategySpec::UniformRandom => {
                channels::boxed(channels::uniform_random_eraser(n, budget, channel_seed)?)
            }
            StrategySpec::WaitPush {
                epsilon,
                wait_length,
            } => {
                if !(*epsilon > 0.0) {
                    return Err(Error::OutOfDomain {
                        name: "epsilon",
                        value: *epsilon,
                        domain: "(0, inf)",
                    });
                }
                let ell = wait_length.unwrap_or_else(|| channels::default_wait_length(n, budget, *epsilon));
                channels::boxed(channels::wait_push_adversary(&self.codebook, ell, budget, channel_seed)?)
            }
            StrategySpec::Burst { start, length } => {
                let length = length.unwrap_or(budget);
                let start = match start {
                    Some(s) => *s,
                    None => seed::rng_from(channel_seed).gen_range(0..=n.saturating_sub(length)),
                };
                channels::boxed(channels::burst_eraser(n, start, length, budget)?)
            }
            StrategySpec::TwoStep { first, second } => Box::new(channels::two_step_adversary(
                &self.codebook,
                budget,
                first.clone(),
                *second,
                channel_seed,
            )?),
            StrategySpec::Omniscient => Box::new(channels::omniscient_eraser(&self.codebook, budget)?),
        })
    }

    /// Messages covered by a `Max` estimate, ascending.
    pub fn target_messages(&self, master_seed: u64) -> Vec<u64> {
        let all = self.codebook.messages();
        match self.config.message_subset {
            Some(m) if m < all.len() => {
                let mut rng = seed::rng_from(seed::mix(master_seed, self.hash ^ 0x5EED));
                let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, all.len(), m)
                    .iter()
                    .map(|i| all[i])
                    .collect();
                picked.sort_unstable();
                picked
            }
            _ => all.to_vec(),
        }
    }

    /// Message assigned to each trial: `None` (uniform) for `Avg`,
    /// round-robin over the target messages for `Max`.
    pub fn plan(&self, master_seed: u64) -> Vec<Option<u64>> {
        match self.config.criterion {
            Criterion::Avg => alloc::vec![None; self.config.trials],
            Criterion::Max => {
                let targets = self.target_messages(master_seed);
                (0..self.config.trials)
                    .map(|i| Some(targets[i % targets.len()]))
                    .collect()
            }
        }
    }

    pub fn trial(&self, master_seed: u64, index: u64, message: Option<u64>) -> Result<TrialOutcome> {
        let mut rng = seed::rng_from(seed::trial_seed(master_seed, self.hash, index));
        let messages = self.codebook.messages();
        let u = match message {
            Some(u) => u,
            None => messages[rng.gen_range(0..messages.len())],
        };
        let rows = self.codebook.message_entries(u);
        if rows.is_empty() {
            return Err(Error::invalid(alloc::format!("message {u} not in the code")));
        }
        let row = rows[rng.gen_range(0..rows.len())];
        let channel_seed = seed::mix(rng.gen::<u64>(), self.config.strategy_seed);
        let decode_seed = rng.gen::<u64>();
        let mut strategy = self.strategy(channel_seed)?;
        let y = channels::transmit(strategy.as_mut(), &row.word)?;
        let erasures = word::erasure_count(&y);
        if erasures > self.config.budget || !word::is_consistent(&row.word, &y)? {
            return Err(Error::Internal("channel broke its contract"));
        }
        let decoded = codes::decode(&self.codebook, &y, self.config.tie_break, decode_seed)?;
        let type_one = decoded.message != Some(u);
        let type_two = !type_one && decoded.coin != Some(row.coin);
        Ok(TrialOutcome {
            message: u,
            coin: row.coin,
            decoded_message: decoded.message,
            decoded_coin: decoded.coin,
            erasures,
            type_one,
            type_two,
            error: type_one || (type_two && self.config.is_strict()),
        })
    }

    /// Runs every planned trial in index order.
    pub fn run(&self, master_seed: u64) -> Result<Vec<TrialOutcome>> {
        self.plan(master_seed)
            .into_iter()
            .enumerate()
            .map(|(i, m)| self.trial(master_seed, i as u64, m))
            .collect()
    }

    /// Folds trial outcomes (in trial order) into an estimate.
    pub fn summarize(&self, outcomes: &[TrialOutcome]) -> ErrorEstimate {
        summarize(self.config.criterion, outcomes)
    }
}

fn explicit_codebook(words: &[Codeword], coins_per_message: usize) -> Result<Codebook> {
    if coins_per_message == 0 || words.is_empty() || words.len() % coins_per_message != 0 {
        return Err(Error::invalid(alloc::format!(
            "{} words do not split into messages of {coins_per_message} coins",
            words.len()
        )));
    }
    if coins_per_message == 1 {
        return Codebook::explicit(words);
    }
    let messages = words.len() / coins_per_message;
    let k = if messages == 1 {
        0
    } else {
        usize::BITS as usize - (messages - 1).leading_zeros() as usize
    };
    let entries = words
        .iter()
        .enumerate()
        .map(|(i, &w)| codes::Entry {
            message: (i / coins_per_message) as u64,
            coin: (i % coins_per_message) as u64,
            word: w,
        })
        .collect();
    Codebook::new(words[0].len(), k, entries)
}

pub fn summarize(criterion: Criterion, outcomes: &[TrialOutcome]) -> ErrorEstimate {
    let trials = outcomes.len();
    let errors = outcomes.iter().filter(|o| o.error).count();
    let type_one_errors = outcomes.iter().filter(|o| o.type_one).count();
    let type_two_errors = outcomes.iter().filter(|o| o.type_two).count();
    match criterion {
        Criterion::Avg => ErrorEstimate {
            criterion,
            point_estimate: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            trials,
            errors,
            wilson: wilson_interval(errors, trials),
            type_one_errors,
            type_two_errors,
            per_message: None,
        },
        Criterion::Max => {
            let mut stats: Vec<MessageStat> = Vec::new();
            let mut sorted: Vec<(u64, bool)> = outcomes.iter().map(|o| (o.message, o.error)).collect();
            sorted.sort_by_key(|&(u, _)| u);
            for (u, e) in sorted {
                match stats.last_mut() {
                    Some(s) if s.message == u => {
                        s.trials += 1;
                        s.errors += e as usize;
                    }
                    _ => stats.push(MessageStat {
                        message: u,
                        trials: 1,
                        errors: e as usize,
                    }),
                }
            }
            let rate = |s: &MessageStat| s.errors as f64 / s.trials as f64;
            // highest rate; among equal rates the one with most trials
            let worst = stats.iter().copied().fold(None::<MessageStat>, |best, s| match best {
                Some(b) if rate(&b) > rate(&s) || (rate(&b) == rate(&s) && b.trials >= s.trials) => Some(b),
                _ => Some(s),
            });
            let (point, wilson) = match worst {
                Some(w) => (rate(&w), wilson_interval(w.errors, w.trials)),
                None => (0.0, (0.0, 1.0)),
            };
            ErrorEstimate {
                criterion,
                point_estimate: point,
                trials,
                errors,
                wilson,
                type_one_errors,
                type_two_errors,
                per_message: Some(stats),
            }
        }
    }
}

/// Serial estimate of `config` under `master_seed`.
pub fn estimate(config: &ExperimentConfig, master_seed: u64) -> Result<ErrorEstimate> {
    let experiment = Experiment::prepare(config)?;
    Ok(experiment.summarize(&experiment.run(master_seed)?))
}

pub fn estimate_p_avg(config: &ExperimentConfig, master_seed: u64) -> Result<ErrorEstimate> {
    let mut config = config.clone();
    config.criterion = Criterion::Avg;
    estimate(&config, master_seed)
}

pub fn estimate_p_max(config: &ExperimentConfig, master_seed: u64) -> Result<ErrorEstimate> {
    let mut config = config.clone();
    config.criterion = Criterion::Max;
    estimate(&config, master_seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRow {
    pub config_hash: u64,
    pub result: Result<ErrorEstimate>,
}

/// Runs every config serially; a failing config becomes an error row.
pub fn run_matrix(configs: &[ExperimentConfig], master_seed: u64) -> Result<Vec<MatrixRow>> {
    if configs.is_empty() {
        return Err(Error::invalid("experiment list is empty"));
    }
    Ok(configs
        .iter()
        .map(|c| MatrixRow {
            config_hash: c.config_hash(),
            result: estimate(c, master_seed),
        })
        .collect())
}
