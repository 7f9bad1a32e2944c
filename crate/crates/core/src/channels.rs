// SPDX-License-Identifier: Apache-2.0

//! Erasure adversaries.
//!
//! A causal adversary implements [`CausalPolicy`] and is driven one symbol at
//! a time by [`CausalChannel`], which owns the budget and the output: a
//! policy only ever sees the symbols already transmitted plus the current
//! one. The two-step and omniscient adversaries read the whole codeword and
//! are not causal.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::codes::Codebook;
use crate::error::{Error, Result};
use crate::seed;
use crate::word::{self, Codeword, ErasurePattern, ReceivedWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Pass,
    Erase,
}

/// What a causal policy may look at before deciding on symbol `next`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelState {
    n: usize,
    budget: usize,
    used: usize,
    next: usize,
    observed: u128,
    erased: u128,
}

impl ChannelState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }

    /// Index of the symbol being decided.
    pub fn next(&self) -> usize {
        self.next
    }

    /// Input symbols `0..next`.
    pub fn observed(&self) -> Codeword {
        Codeword::from_bits(self.observed, self.next).expect("length checked at construction")
    }

    /// Own past decisions on `0..next`.
    pub fn erased_mask(&self) -> u128 {
        self.erased
    }
}

/// Per-symbol decision rule of a causal adversary.
pub trait CausalPolicy {
    fn name(&self) -> &'static str;

    fn n(&self) -> usize;

    fn budget(&self) -> usize;

    /// Decision on symbol `state.next()` whose value is `bit`.
    fn decide(&mut self, state: &ChannelState, bit: bool) -> Decision;
}

/// Drives a policy over one transmission, enforcing order and budget.
#[derive(Debug)]
pub struct CausalChannel<P> {
    policy: P,
    state: ChannelState,
}

impl<P: CausalPolicy> CausalChannel<P> {
    pub fn new(policy: P) -> Result<Self> {
        let (n, budget) = (policy.n(), policy.budget());
        if n > word::MAX_LEN {
            return Err(Error::GuardExceeded {
                what: "word length",
                limit: word::MAX_LEN,
                requested: n,
            });
        }
        if budget > n {
            return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
        }
        Ok(CausalChannel {
            policy,
            state: ChannelState {
                n,
                budget,
                used: 0,
                next: 0,
                observed: 0,
                erased: 0,
            },
        })
    }

    pub fn state(&self) -> &ChannelState {
        &self.state
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }

    pub fn into_policy(self) -> P {
        self.policy
    }

    /// Processes symbol `i`, which must be the next unprocessed index.
    pub fn step(&mut self, i: usize, bit: bool) -> Result<Decision> {
        if i != self.state.next || i >= self.state.n {
            return Err(Error::invalid(alloc::format!(
                "channel step {i} out of order (expected {})",
                self.state.next
            )));
        }
        let wanted = self.policy.decide(&self.state, bit);
        let decision = if wanted == Decision::Erase && self.state.remaining() > 0 {
            self.state.used += 1;
            self.state.erased |= 1 << i;
            Decision::Erase
        } else {
            Decision::Pass
        };
        self.state.observed |= (bit as u128) << i;
        self.state.next += 1;
        Ok(decision)
    }

    /// The output so far; complete once all `n` symbols were stepped.
    pub fn output(&self) -> ReceivedWord {
        let x = Codeword::from_bits(self.state.observed, self.state.next).expect("length checked");
        let pattern = ErasurePattern::from_mask(self.state.erased, self.state.next).expect("length checked");
        word::erase(&x, &pattern).expect("lengths agree")
    }

    pub fn run(&mut self, x: &Codeword) -> Result<ReceivedWord> {
        if x.len() != self.state.n {
            return Err(Error::LengthMismatch {
                expected: self.state.n,
                found: x.len(),
            });
        }
        for (i, bit) in x.iter().enumerate().skip(self.state.next) {
            self.step(i, bit)?;
        }
        Ok(self.output())
    }
}

/// A single-transmission adversary, causal or not.
pub trait Strategy {
    fn name(&self) -> &'static str;

    fn n(&self) -> usize;

    fn budget(&self) -> usize;

    fn is_causal(&self) -> bool;

    fn transmit(&mut self, x: &Codeword) -> Result<ReceivedWord>;
}

/// Adapter running a [`CausalPolicy`] through a [`CausalChannel`].
#[derive(Debug)]
pub struct Causal<P>(pub P);

impl<P: CausalPolicy + Clone> Strategy for Causal<P> {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn n(&self) -> usize {
        self.0.n()
    }

    fn budget(&self) -> usize {
        self.0.budget()
    }

    fn is_causal(&self) -> bool {
        true
    }

    fn transmit(&mut self, x: &Codeword) -> Result<ReceivedWord> {
        let mut channel = CausalChannel::new(self.0.clone())?;
        let y = channel.run(x)?;
        self.0 = channel.into_policy();
        Ok(y)
    }
}

pub fn transmit(strategy: &mut dyn Strategy, x: &Codeword) -> Result<ReceivedWord> {
    if x.len() != strategy.n() {
        return Err(Error::LengthMismatch {
            expected: strategy.n(),
            found: x.len(),
        });
    }
    strategy.transmit(x)
}

/// Violations found by transmitting two inputs that share a prefix through
/// two identically seeded instances of one strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PrefixPairCheck {
    /// Decisions on the shared prefix differ.
    pub causality: bool,
    /// Some output erased more than the budget.
    pub budget: bool,
    /// Some non-erased output symbol differs from its input.
    pub corruption: bool,
}

impl PrefixPairCheck {
    pub fn clean(&self) -> bool {
        !(self.causality || self.budget || self.corruption)
    }
}

/// Transmits `x` through `a` and `x_tilde` through `b`, where both inputs
/// agree on their first `shared` symbols.
pub fn check_prefix_pair(
    a: &mut dyn Strategy,
    b: &mut dyn Strategy,
    x: &Codeword,
    x_tilde: &Codeword,
    shared: usize,
) -> Result<PrefixPairCheck> {
    if x.prefix(shared) != x_tilde.prefix(shared) {
        return Err(Error::invalid("inputs do not share the stated prefix"));
    }
    let y = transmit(a, x)?;
    let y_tilde = transmit(b, x_tilde)?;
    let head = word::low_mask(shared);
    Ok(PrefixPairCheck {
        causality: (y.erased_mask() ^ y_tilde.erased_mask()) & head != 0,
        budget: word::erasure_count(&y) > a.budget() || word::erasure_count(&y_tilde) > b.budget(),
        corruption: !word::is_consistent(x, &y)? || !word::is_consistent(x_tilde, &y_tilde)?,
    })
}

/// Erases a uniformly random `budget`-subset of positions.
#[derive(Clone, Debug)]
pub struct UniformRandom {
    n: usize,
    budget: usize,
    mask: u128,
}

pub fn uniform_random_eraser(n: usize, budget: usize, seed: u64) -> Result<UniformRandom> {
    if budget > n {
        return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
    }
    if n > word::MAX_LEN {
        return Err(Error::GuardExceeded {
            what: "word length",
            limit: word::MAX_LEN,
            requested: n,
        });
    }
    let mut rng = seed::rng_from(seed);
    let mask = index::sample(&mut rng, n, budget)
        .iter()
        .fold(0u128, |m, i| m | 1 << i);
    Ok(UniformRandom { n, budget, mask })
}

impl UniformRandom {
    pub fn pattern(&self) -> ErasurePattern {
        ErasurePattern::from_mask(self.mask, self.n).expect("length checked")
    }
}

impl CausalPolicy for UniformRandom {
    fn name(&self) -> &'static str {
        "uniform_random"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn decide(&mut self, state: &ChannelState, _bit: bool) -> Decision {
        if self.mask >> state.next() & 1 == 1 {
            Decision::Erase
        } else {
            Decision::Pass
        }
    }
}

/// Erases the window `start..start + length` (0-based).
#[derive(Clone, Debug)]
pub struct Burst {
    n: usize,
    budget: usize,
    start: usize,
    length: usize,
}

pub fn burst_eraser(n: usize, start: usize, length: usize, budget: usize) -> Result<Burst> {
    if length > budget {
        return Err(Error::invalid(alloc::format!(
            "burst length {length} exceeds budget {budget}"
        )));
    }
    if budget > n {
        return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
    }
    if start + length > n {
        return Err(Error::invalid(alloc::format!(
            "burst window {start}..{} exceeds n = {n}",
            start + length
        )));
    }
    Ok(Burst {
        n,
        budget,
        start,
        length,
    })
}

impl CausalPolicy for Burst {
    fn name(&self) -> &'static str {
        "burst"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn decide(&mut self, state: &ChannelState, _bit: bool) -> Decision {
        if (self.start..self.start + self.length).contains(&state.next()) {
            Decision::Erase
        } else {
            Decision::Pass
        }
    }
}

/// Wait length `round((1 - 2p + epsilon/2) n)` with `p = budget / n`,
/// clamped to `[0, n]`.
pub fn default_wait_length(n: usize, budget: usize, epsilon: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let p = budget as f64 / n as f64;
    let ell = libm::round((bounds::rate_upper(p) + epsilon / 2.0) * n as f64);
    (ell.max(0.0) as usize).min(n)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WaitPushDiagnostics {
    /// `|L_{x1}|`, once the wait phase has ended.
    pub list_size: Option<usize>,
    pub distinct_messages: Option<usize>,
    pub decoy_message: Option<u64>,
    pub decoy_coin: Option<u64>,
    pub decoy: Option<Codeword>,
    /// The observed prefix matched no codeword; everything was passed.
    pub empty_list: bool,
}

/// Passes `wait_length` symbols, samples a decoy among the codebook rows
/// sharing the observed prefix, then erases every later symbol that
/// disagrees with the decoy, leftmost first, while budget lasts.
#[derive(Clone, Debug)]
pub struct WaitPush<'a> {
    codebook: &'a Codebook,
    budget: usize,
    wait_length: usize,
    rng: ChaCha8Rng,
    diagnostics: WaitPushDiagnostics,
}

pub fn wait_push_adversary(
    codebook: &Codebook,
    wait_length: usize,
    budget: usize,
    seed: u64,
) -> Result<WaitPush<'_>> {
    let n = codebook.n();
    if wait_length > n {
        return Err(Error::invalid(alloc::format!(
            "wait length {wait_length} exceeds n = {n}"
        )));
    }
    if budget > n {
        return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
    }
    Ok(WaitPush {
        codebook,
        budget,
        wait_length,
        rng: seed::rng_from(seed),
        diagnostics: WaitPushDiagnostics::default(),
    })
}

impl WaitPush<'_> {
    pub fn wait_length(&self) -> usize {
        self.wait_length
    }

    pub fn diagnostics(&self) -> &WaitPushDiagnostics {
        &self.diagnostics
    }

    fn choose_decoy(&mut self, prefix: &Codeword) {
        let list = self.codebook.prefix_matches(prefix);
        self.diagnostics.list_size = Some(list.len());
        if list.is_empty() {
            self.diagnostics.empty_list = true;
            self.diagnostics.distinct_messages = Some(0);
            return;
        }
        let mut messages: Vec<u64> = list.iter().map(|e| e.message).collect();
        messages.dedup();
        self.diagnostics.distinct_messages = Some(messages.len());
        let decoy = list[self.rng.gen_range(0..list.len())];
        self.diagnostics.decoy = Some(decoy.word);
        self.diagnostics.decoy_message = Some(decoy.message);
        self.diagnostics.decoy_coin = Some(decoy.coin);
    }
}

impl CausalPolicy for WaitPush<'_> {
    fn name(&self) -> &'static str {
        "wait_push"
    }

    fn n(&self) -> usize {
        self.codebook.n()
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn decide(&mut self, state: &ChannelState, bit: bool) -> Decision {
        let i = state.next();
        if i < self.wait_length {
            return Decision::Pass;
        }
        if i == self.wait_length {
            self.choose_decoy(&state.observed());
        }
        match self.diagnostics.decoy {
            Some(decoy) if decoy.get(i) != bit => Decision::Erase,
            _ => Decision::Pass,
        }
    }
}

/// First-step erasures, applied to the message prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FirstStepPlan {
    None,
    /// The first `count` prefix positions.
    Leading { count: usize },
    /// A uniformly random `count`-subset of the prefix.
    Random { count: usize },
    Fixed(ErasurePattern),
}

impl FirstStepPlan {
    pub fn count(&self) -> usize {
        match self {
            FirstStepPlan::None => 0,
            FirstStepPlan::Leading { count } | FirstStepPlan::Random { count } => *count,
            FirstStepPlan::Fixed(p) => p.count(),
        }
    }
}

/// Second-step erasures, applied to the suffix after seeing the codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondStepPlan {
    None,
    /// Toward the nearest codeword of the same message with another coin.
    PushSamePrefix,
    /// Toward the nearest codeword of another message whose prefix is
    /// consistent with the first-step output.
    PushOtherMessage,
}

/// The non-causal two-step adversary over a systematic code.
#[derive(Clone, Debug)]
pub struct TwoStep<'a> {
    codebook: &'a Codebook,
    budget: usize,
    first: FirstStepPlan,
    second: SecondStepPlan,
    rng: ChaCha8Rng,
}

pub fn two_step_adversary(
    codebook: &Codebook,
    budget: usize,
    first: FirstStepPlan,
    second: SecondStepPlan,
    seed: u64,
) -> Result<TwoStep<'_>> {
    if !codebook.is_systematic() {
        return Err(Error::invalid("two-step adversary needs a systematic code"));
    }
    let (n, k) = (codebook.n(), codebook.k());
    if budget > n {
        return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
    }
    let q = first.count();
    if q > k.min(budget) {
        return Err(Error::invalid(alloc::format!(
            "first-step erasures {q} exceed min(k, budget) = {}",
            k.min(budget)
        )));
    }
    if let FirstStepPlan::Fixed(p) = &first {
        if p.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: p.len(),
            });
        }
    }
    Ok(TwoStep {
        codebook,
        budget,
        first,
        second,
        rng: seed::rng_from(seed),
    })
}

/// Erases the leftmost `limit` set bits of `diff`.
fn leftmost(diff: u128, limit: usize) -> u128 {
    let mut out = 0u128;
    let mut rest = diff;
    for _ in 0..limit {
        if rest == 0 {
            break;
        }
        let low = rest & rest.wrapping_neg();
        out |= low;
        rest ^= low;
    }
    out
}

impl Strategy for TwoStep<'_> {
    fn name(&self) -> &'static str {
        "two_step"
    }

    fn n(&self) -> usize {
        self.codebook.n()
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn is_causal(&self) -> bool {
        false
    }

    fn transmit(&mut self, x: &Codeword) -> Result<ReceivedWord> {
        let (n, k) = (self.codebook.n(), self.codebook.k());
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let first_mask = match &self.first {
            FirstStepPlan::None => 0,
            FirstStepPlan::Leading { count } => word::low_mask(*count),
            FirstStepPlan::Random { count } => index::sample(&mut self.rng, k.max(1), *count)
                .iter()
                .fold(0u128, |m, i| m | 1 << i),
            FirstStepPlan::Fixed(p) => p.mask(),
        };
        let remaining = self.budget - first_mask.count_ones() as usize;
        let y1 = word::erase(&x.prefix(k), &ErasurePattern::from_mask(first_mask, k)?)?;
        let u = x.prefix(k).to_index();
        let target = match self.second {
            SecondStepPlan::None => None,
            SecondStepPlan::PushSamePrefix => nearest(
                self.codebook.message_entries(u).iter().map(|e| e.word),
                x,
            ),
            SecondStepPlan::PushOtherMessage => {
                let mut rivals = Vec::new();
                crate::codes::for_each_consistent_message(&y1, |v| {
                    if v != u {
                        rivals.extend(self.codebook.message_entries(v).iter().map(|e| e.word));
                    }
                });
                nearest(rivals.into_iter(), x)
            }
        };
        let suffix_mask = !word::low_mask(k) & word::low_mask(n);
        let second_mask = target.map_or(0, |t| leftmost((t.bits() ^ x.bits()) & suffix_mask, remaining));
        word::erase(x, &ErasurePattern::from_mask(first_mask | second_mask, n)?)
    }
}

/// Closest word to `x` on the suffix that is not `x` itself; first wins ties.
fn nearest<I: Iterator<Item = Codeword>>(candidates: I, x: &Codeword) -> Option<Codeword> {
    candidates
        .filter(|w| w != x)
        .min_by_key(|w| (w.bits() ^ x.bits()).count_ones())
}

pub const OMNISCIENT_MAX_LEN: usize = 20;
pub const OMNISCIENT_MAX_ENTRIES: usize = 1 << 16;

/// Non-causal baseline: sees the codeword, then picks an erasure pattern of
/// size at most `budget` maximizing the number of distinct messages left
/// consistent.
#[derive(Clone, Debug)]
pub struct Omniscient<'a> {
    codebook: &'a Codebook,
    budget: usize,
}

pub fn omniscient_eraser(codebook: &Codebook, budget: usize) -> Result<Omniscient<'_>> {
    if codebook.n() > OMNISCIENT_MAX_LEN {
        return Err(Error::GuardExceeded {
            what: "omniscient word length",
            limit: OMNISCIENT_MAX_LEN,
            requested: codebook.n(),
        });
    }
    if codebook.len() > OMNISCIENT_MAX_ENTRIES {
        return Err(Error::GuardExceeded {
            what: "omniscient code size",
            limit: OMNISCIENT_MAX_ENTRIES,
            requested: codebook.len(),
        });
    }
    if budget > codebook.n() {
        return Err(Error::invalid(alloc::format!(
            "budget {budget} exceeds n = {}",
            codebook.n()
        )));
    }
    Ok(Omniscient { codebook, budget })
}

impl Omniscient<'_> {
    /// The best pattern for input `x`.
    pub fn best_pattern(&self, x: &Codeword) -> u128 {
        // (disagreement mask, message) of every row within reach
        let mut reach: Vec<(u128, u64)> = self
            .codebook
            .entries()
            .iter()
            .map(|e| (e.word.bits() ^ x.bits(), e.message))
            .filter(|(d, _)| d.count_ones() as usize <= self.budget)
            .collect();
        reach.sort_unstable_by_key(|&(_, u)| u);
        let union = reach.iter().fold(0u128, |m, &(d, _)| m | d);
        let size = union.count_ones() as usize;
        if size <= self.budget {
            return union;
        }
        let positions: Vec<u32> = (0..128).filter(|&i| union >> i & 1 == 1).collect();
        let score = |mask: u128| {
            let mut count = 0;
            let mut last = None;
            for &(d, u) in &reach {
                if d & !mask == 0 && last != Some(u) {
                    count += 1;
                    last = Some(u);
                }
            }
            count
        };
        let mut best = (0usize, 0u128);
        for_each_combination(positions.len(), self.budget, |chosen| {
            let mask = chosen.iter().fold(0u128, |m, &c| m | 1 << positions[c]);
            let s = score(mask);
            if s > best.0 {
                best = (s, mask);
            }
        });
        best.1
    }
}

/// Calls `f` with every `r`-subset of `0..m` in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(m: usize, r: usize, mut f: F) {
    if r > m {
        return;
    }
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        f(&c);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] != i + m - r {
                break;
            }
            if i == 0 {
                return;
            }
        }
        c[i] += 1;
        for j in i + 1..r {
            c[j] = c[j - 1] + 1;
        }
    }
}

impl Strategy for Omniscient<'_> {
    fn name(&self) -> &'static str {
        "omniscient"
    }

    fn n(&self) -> usize {
        self.codebook.n()
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn is_causal(&self) -> bool {
        false
    }

    fn transmit(&mut self, x: &Codeword) -> Result<ReceivedWord> {
        if x.len() != self.codebook.n() {
            return Err(Error::LengthMismatch {
                expected: self.codebook.n(),
                found: x.len(),
            });
        }
        let mask = self.best_pattern(x);
        word::erase(x, &ErasurePattern::from_mask(mask, x.len())?)
    }
}

/// Boxes a causal policy as a strategy.
pub fn boxed<'a, P: CausalPolicy + Clone + 'a>(policy: P) -> Box<dyn Strategy + 'a> {
    Box::new(Causal(policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::codes::{self, Entry, TieBreak};

    fn cw(s: &str) -> Codeword {
        s.parse().unwrap()
    }

    fn pair_code() -> Codebook {
        Codebook::explicit(&[cw("000000"), cw("000111")]).unwrap()
    }

    #[derive(Clone)]
    struct Greedy;

    impl CausalPolicy for Greedy {
        fn name(&self) -> &'static str {
            "greedy"
        }
        fn n(&self) -> usize {
            6
        }
        fn budget(&self) -> usize {
            2
        }
        fn decide(&mut self, _: &ChannelState, _: bool) -> Decision {
            Decision::Erase
        }
    }

    #[test]
    fn exhausted_budget_passes() {
        let y = Causal(Greedy).transmit(&cw("101101")).unwrap();
        assert_eq!(y.to_string(), "^^1101");
    }

    #[test]
    fn out_of_order_step_is_rejected() {
        let mut ch = CausalChannel::new(Greedy).unwrap();
        assert!(ch.step(1, true).is_err());
        ch.step(0, true).unwrap();
        assert!(ch.step(0, true).is_err());
    }

    #[test]
    fn uniform_extremes() {
        let x = cw("1011");
        let all = Causal(uniform_random_eraser(4, 4, 1).unwrap()).transmit(&x).unwrap();
        assert_eq!(all.to_string(), "^^^^");
        let none = Causal(uniform_random_eraser(4, 0, 1).unwrap()).transmit(&x).unwrap();
        assert_eq!(none, x.to_received());
        assert!(uniform_random_eraser(4, 5, 1).is_err());
    }

    #[test]
    fn uniform_marginals() {
        let (n, b, trials) = (10usize, 3usize, 100_000u64);
        let mut counts = [0u64; 10];
        for t in 0..trials {
            let pattern = uniform_random_eraser(n, b, seed::splitmix64(t)).unwrap().pattern();
            assert_eq!(pattern.count(), b);
            for i in pattern.positions() {
                counts[i] += 1;
            }
        }
        let p = b as f64 / n as f64;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - trials as f64 * p).abs() <= 3.0 * sigma, "{c}");
        }
    }

    #[test]
    fn uniform_patterns_chi_square() {
        // all C(5,2) = 10 patterns equally likely; chi-square 1% critical value at 9 dof
        let trials = 10_000u64;
        let mut counts = alloc::collections::BTreeMap::new();
        for t in 0..trials {
            let mask = uniform_random_eraser(5, 2, seed::splitmix64(t ^ 0xABCD)).unwrap().mask;
            *counts.entry(mask).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 10);
        let expected = trials as f64 / 10.0;
        let chi: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi < 21.666, "{chi}");
    }

    #[test]
    fn burst_examples() {
        let x = cw("110110");
        let y = Causal(burst_eraser(6, 0, 2, 2).unwrap()).transmit(&x).unwrap();
        assert_eq!(y.to_string(), "^^0110");
        let y = Causal(burst_eraser(6, 2, 3, 4).unwrap()).transmit(&x).unwrap();
        assert_eq!(y.to_string(), "11^^^0");
        assert!(burst_eraser(6, 0, 3, 2).is_err());
        assert!(burst_eraser(6, 5, 2, 2).is_err());
    }

    #[test]
    fn wait_push_hand_trace() {
        let code = pair_code();
        let x = cw("000111");
        let mut pushed = 0;
        for seed in 0..200 {
            let mut adv = Causal(wait_push_adversary(&code, 3, 3, seed).unwrap());
            let y = adv.transmit(&x).unwrap();
            let d = adv.0.diagnostics();
            assert_eq!(d.list_size, Some(2));
            if d.decoy == Some(cw("000000")) {
                assert_eq!(y.to_string(), "000^^^");
                pushed += 1;
            } else {
                assert_eq!(y, x.to_received());
            }
        }
        assert!(pushed > 60 && pushed < 140);
    }

    #[test]
    fn wait_push_singleton_list_erases_nothing() {
        let code = Codebook::explicit(&[cw("000000"), cw("100111")]).unwrap();
        let x = cw("100111");
        let mut adv = Causal(wait_push_adversary(&code, 1, 3, 4).unwrap());
        assert_eq!(adv.transmit(&x).unwrap(), x.to_received());
        assert_eq!(adv.0.diagnostics().list_size, Some(1));
    }

    #[test]
    fn wait_push_empty_list_passes_everything() {
        let code = pair_code();
        let x = cw("111000");
        let mut adv = Causal(wait_push_adversary(&code, 3, 3, 4).unwrap());
        assert_eq!(adv.transmit(&x).unwrap(), x.to_received());
        assert!(adv.0.diagnostics().empty_list);
    }

    #[test]
    fn wait_push_budget_keeps_leftmost() {
        let code = Codebook::explicit(&[cw("00000000"), cw("00011111")]).unwrap();
        let x = cw("00011111");
        for seed in 0..50 {
            let mut adv = Causal(wait_push_adversary(&code, 3, 2, seed).unwrap());
            let y = adv.transmit(&x).unwrap();
            if adv.0.diagnostics().decoy == Some(cw("00000000")) {
                assert_eq!(y.to_string(), "000^^111");
            }
        }
    }

    #[test]
    fn wait_push_decoy_distribution() {
        let table = codes::sample_systematic_code(10, 4, 2, 77).unwrap();
        let code = table.codebook();
        let x = code.entries()[0].word;
        let ell = 2;
        let list = code.prefix_matches(&x.prefix(ell));
        let trials = 10_000u64;
        let mut counts = alloc::vec![0u64; list.len()];
        for seed in 0..trials {
            let mut adv = Causal(wait_push_adversary(code, ell, 0, seed).unwrap());
            adv.transmit(&x).unwrap();
            let d = adv.0.diagnostics();
            let at = list
                .iter()
                .position(|e| Some(e.message) == d.decoy_message && Some(e.coin) == d.decoy_coin)
                .unwrap();
            counts[at] += 1;
        }
        let p = 1.0 / list.len() as f64;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - trials as f64 * p).abs() <= 3.5 * sigma);
        }
    }

    #[test]
    fn default_wait_length_examples() {
        assert_eq!(default_wait_length(24, 6, 0.1), 13);
        assert_eq!(default_wait_length(6, 3, 0.1), 0);
        assert_eq!(default_wait_length(10, 0, 0.1), 10);
    }

    #[test]
    fn two_step_identity() {
        let t = codes::sample_systematic_code(8, 2, 1, 3).unwrap();
        let mut adv = two_step_adversary(t.codebook(), 3, FirstStepPlan::None, SecondStepPlan::None, 0).unwrap();
        for e in t.codebook().entries() {
            assert_eq!(adv.transmit(&e.word).unwrap(), e.word.to_received());
        }
    }

    #[test]
    fn two_step_first_step_counts() {
        let t = codes::sample_systematic_code(12, 5, 1, 3).unwrap();
        for plan in [FirstStepPlan::Leading { count: 2 }, FirstStepPlan::Random { count: 2 }] {
            let mut adv = two_step_adversary(t.codebook(), 4, plan, SecondStepPlan::PushOtherMessage, 9).unwrap();
            for e in t.codebook().entries() {
                let y = adv.transmit(&e.word).unwrap();
                assert_eq!(word::erasure_count(&y.prefix(5)), 2);
                assert!(word::erasure_count(&y) <= 4);
                assert!(word::is_consistent(&e.word, &y).unwrap());
            }
        }
        assert!(two_step_adversary(t.codebook(), 1, FirstStepPlan::Leading { count: 2 }, SecondStepPlan::None, 0).is_err());
    }

    #[test]
    fn two_step_push_same_prefix_creates_ambiguity() {
        // 4 rows at n=8, k=1, d=1; coins of each message 2 apart on the suffix
        let rows = alloc::vec![
            Entry { message: 0, coin: 0, word: cw("00000000") },
            Entry { message: 0, coin: 1, word: cw("00000011") },
            Entry { message: 1, coin: 0, word: cw("11111111") },
            Entry { message: 1, coin: 1, word: cw("11110111") },
        ];
        let code = Codebook::new(8, 1, rows).unwrap();
        let mut adv = two_step_adversary(&code, 2, FirstStepPlan::None, SecondStepPlan::PushSamePrefix, 0).unwrap();
        for e in code.entries() {
            let y = adv.transmit(&e.word).unwrap();
            assert!(code.consistent_set(&y).unwrap().len() >= 2);
            let r = codes::decode(&code, &y, TieBreak::LexMin, 0).unwrap();
            assert_eq!(r.message, Some(e.message));
        }
    }

    #[test]
    fn omniscient_examples() {
        let far = Codebook::explicit(&[cw("000000"), cw("111111")]).unwrap();
        let mut adv = omniscient_eraser(&far, 2).unwrap();
        let y = adv.transmit(&cw("000000")).unwrap();
        assert_eq!(far.consistent_set(&y).unwrap().len(), 1);

        let near = Codebook::explicit(&[cw("000000"), cw("000111"), cw("110000")]).unwrap();
        let mut adv = omniscient_eraser(&near, 3).unwrap();
        let y = adv.transmit(&cw("000000")).unwrap();
        assert!(word::erasure_count(&y) <= 3);
        assert_eq!(near.consistent_set(&y).unwrap().len(), 2);

        let mut adv = omniscient_eraser(&near, 5).unwrap();
        let y = adv.transmit(&cw("000000")).unwrap();
        assert_eq!(near.consistent_set(&y).unwrap().len(), 3);

        let mut adv = omniscient_eraser(&near, 0).unwrap();
        assert_eq!(adv.transmit(&cw("000111")).unwrap(), cw("000111").to_received());
    }

    #[test]
    fn omniscient_guard() {
        let t = codes::sample_systematic_code(24, 3, 0, 1).unwrap();
        assert!(omniscient_eraser(t.codebook(), 2).is_err());
    }

    #[test]
    fn combinations_are_complete() {
        let mut seen = 0;
        for_each_combination(6, 3, |c| {
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            seen += 1;
        });
        assert_eq!(seen, 20);
        let mut empty = 0;
        for_each_combination(4, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }
}
