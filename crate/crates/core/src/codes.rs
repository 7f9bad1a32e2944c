// SPDX-License-Identifier: Apache-2.0

//! Stochastic codes as explicit tables, the consistent-set decoder, pruning
//! of same-message neighbours, and code diagnostics.
//!
//! A systematic randomized encoder maps `(u, s)` to `(u, x2(u, s))`: the
//! codeword opens with the `k` message bits and continues with a suffix
//! drawn uniformly at random per `(u, s)` when the table is sampled.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::forbidden::{self, BallSpec};
use crate::seed;
use crate::word::{self, Codeword, Message, ReceivedWord};

/// Upper bound on `k + d` for sampled tables (about 4M entries).
pub const TABLE_BITS_LIMIT: usize = 22;
/// Upper bound on the message length of any codebook; message offsets are
/// stored densely.
pub const MESSAGE_BITS_LIMIT: usize = 24;

/// One `(message, coin) -> codeword` row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Entry {
    pub message: u64,
    pub coin: u64,
    pub word: Codeword,
}

/// An explicitly enumerated stochastic code.
///
/// Rows are sorted by `(message, coin)` and every message that is present
/// has the same number of coins, so a uniform message followed by a uniform
/// coin is the same as a uniform row.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n: usize,
    k: usize,
    systematic: bool,
    entries: Vec<Entry>,
    // entries of message u are entries[offsets[u]..offsets[u + 1]]
    offsets: Vec<u32>,
    messages: Vec<u64>,
    coins_per_message: usize,
}

impl Codebook {
    pub fn new(n: usize, k: usize, mut entries: Vec<Entry>) -> Result<Self> {
        if k > MESSAGE_BITS_LIMIT {
            return Err(Error::GuardExceeded {
                what: "message bits",
                limit: MESSAGE_BITS_LIMIT,
                requested: k,
            });
        }
        if entries.is_empty() {
            return Err(Error::invalid("codebook has no entries"));
        }
        if entries.len() > u32::MAX as usize {
            return Err(Error::invalid("codebook too large"));
        }
        entries.sort_by_key(|e| (e.message, e.coin));
        let message_space = 1u64 << k;
        let mut offsets = vec![0u32; message_space as usize + 1];
        let mut messages = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if e.word.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: e.word.len(),
                });
            }
            if e.message >= message_space {
                return Err(Error::invalid(alloc::format!(
                    "message {} does not fit in {k} bits",
                    e.message
                )));
            }
            if i > 0 && entries[i - 1].message == e.message && entries[i - 1].coin == e.coin {
                return Err(Error::invalid("duplicate (message, coin) row"));
            }
            if messages.last() != Some(&e.message) {
                messages.push(e.message);
            }
            offsets[e.message as usize + 1] += 1;
        }
        let coins_per_message = offsets[messages[0] as usize + 1] as usize;
        if messages
            .iter()
            .any(|&u| offsets[u as usize + 1] as usize != coins_per_message)
        {
            return Err(Error::invalid("messages carry different numbers of coins"));
        }
        for u in 0..message_space as usize {
            offsets[u + 1] += offsets[u];
        }
        let systematic = k <= n
            && entries
                .iter()
                .all(|e| e.word.prefix(k).to_index() == e.message);
        Ok(Codebook {
            n,
            k,
            systematic,
            entries,
            offsets,
            messages,
            coins_per_message,
        })
    }

    /// Deterministic code: word `i` encodes message `i`, with
    /// `k = ceil(log2(words))`.
    pub fn explicit(words: &[Codeword]) -> Result<Self> {
        let n = words
            .first()
            .map(Codeword::len)
            .ok_or_else(|| Error::invalid("explicit code needs at least one word"))?;
        let k = usize::BITS as usize - (words.len() - 1).leading_zeros() as usize;
        let k = if words.len() == 1 { 0 } else { k };
        let entries = words
            .iter()
            .enumerate()
            .map(|(i, &w)| Entry {
                message: i as u64,
                coin: 0,
                word: w,
            })
            .collect();
        Codebook::new(n, k, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Present messages in ascending order.
    pub fn messages(&self) -> &[u64] {
        &self.messages
    }

    pub fn coins_per_message(&self) -> usize {
        self.coins_per_message
    }

    pub fn message_entries(&self, message: u64) -> &[Entry] {
        if message >= 1u64 << self.k {
            return &[];
        }
        let u = message as usize;
        &self.entries[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    fn message_range(&self, lo: u64, hi: u64) -> &[Entry] {
        &self.entries[self.offsets[lo as usize] as usize..self.offsets[hi as usize] as usize]
    }

    /// The list of rows whose first `prefix.len()` symbols equal `prefix`.
    pub fn prefix_matches(&self, prefix: &Codeword) -> Vec<&Entry> {
        let ell = prefix.len();
        if ell > self.n {
            return Vec::new();
        }
        let hit = |e: &&Entry| e.word.prefix(ell) == *prefix;
        if !self.systematic {
            return self.entries.iter().filter(hit).collect();
        }
        if ell <= self.k {
            let base = prefix.to_index() << (self.k - ell);
            let top = (prefix.to_index() + 1) << (self.k - ell);
            self.message_range(base, top).iter().collect()
        } else {
            self.message_entries(prefix.prefix(self.k).to_index())
                .iter()
                .filter(hit)
                .collect()
        }
    }

    /// Every row whose codeword is consistent with `y`.
    pub fn consistent_set(&self, y: &ReceivedWord) -> Result<Vec<&Entry>> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: y.len(),
            });
        }
        let hit = |e: &&Entry| word::consistent_unchecked(&e.word, y);
        let prefix_erasures = word::erasure_count(&y.prefix(self.k));
        if !self.systematic || (1usize << prefix_erasures.min(63)) >= self.messages.len() {
            return Ok(self.entries.iter().filter(hit).collect());
        }
        let mut out: Vec<&Entry> = Vec::new();
        for_each_consistent_message(&y.prefix(self.k), |u| {
            out.extend(self.message_entries(u).iter().filter(hit));
        });
        out.sort_by_key(|e| (e.message, e.coin));
        Ok(out)
    }
}

/// Calls `f` with the index of every `k`-bit message consistent with the
/// received prefix `y1`.
pub(crate) fn for_each_consistent_message<F: FnMut(u64)>(y1: &ReceivedWord, mut f: F) {
    let erased = y1.erased_mask();
    let known = y1.bits();
    let k = y1.len();
    let to_index = |bits: u128| Codeword::from_bits(bits, k).map(|w| w.to_index()).unwrap_or(0);
    let mut sub = erased;
    loop {
        f(to_index(known | sub));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & erased;
    }
}

/// A sampled systematic randomized encoder over `k` message bits and `d`
/// coin bits.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeTable {
    n: usize,
    k: usize,
    d: usize,
    seed: u64,
    codebook: Codebook,
}

/// Draws every suffix `x2(u, s)` independently and uniformly from
/// `{0,1}^{n-k}`, in `(u, s)` order, from a ChaCha8 stream seeded by `seed`.
pub fn sample_systematic_code(n: usize, k: usize, d: usize, seed: u64) -> Result<CodeTable> {
    if k + 1 > n {
        return Err(Error::invalid(alloc::format!(
            "systematic code needs k + 1 <= n, got k = {k}, n = {n}"
        )));
    }
    if n > word::MAX_LEN {
        return Err(Error::GuardExceeded {
            what: "word length",
            limit: word::MAX_LEN,
            requested: n,
        });
    }
    if k + d > TABLE_BITS_LIMIT {
        return Err(Error::GuardExceeded {
            what: "message plus coin bits",
            limit: TABLE_BITS_LIMIT,
            requested: k + d,
        });
    }
    let mut rng = seed::rng_from(seed);
    let mut entries = Vec::with_capacity(1 << (k + d));
    for u in 0..1u64 << k {
        let prefix = Codeword::from_index(u, k)?;
        for s in 0..1u64 << d {
            let suffix = Codeword::from_bits(rng.gen::<u128>(), n - k)?;
            entries.push(Entry {
                message: u,
                coin: s,
                word: prefix.concat(&suffix)?,
            });
        }
    }
    Ok(CodeTable {
        n,
        k,
        d,
        seed,
        codebook: Codebook::new(n, k, entries)?,
    })
}

impl CodeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn suffix(&self, message: u64, coin: u64) -> Option<Codeword> {
        self.codebook
            .message_entries(message)
            .get(coin as usize)
            .map(|e| e.word.suffix(self.k))
    }
}

/// Table lookup of `(u, s)`.
pub fn encode(table: &CodeTable, u: &Message, s: u64) -> Result<Codeword> {
    if u.len() != table.k {
        return Err(Error::LengthMismatch {
            expected: table.k,
            found: u.len(),
        });
    }
    table
        .codebook
        .message_entries(u.index())
        .get(s as usize)
        .map(|e| e.word)
        .ok_or_else(|| Error::invalid(alloc::format!("no entry for coin {s}")))
}

/// Policy for picking among several consistent rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    /// Uniformly random consistent row.
    #[default]
    Uniform,
    /// Smallest `(message, coin)`.
    LexMin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Unique,
    AmbiguousTieBroken,
    NoCandidate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub message: Option<u64>,
    pub coin: Option<u64>,
    pub consistent_count: usize,
    pub distinct_message_count: usize,
    pub outcome: DecodeOutcome,
}

/// Consistent-set decoding: the unique consistent row when there is one,
/// otherwise a row chosen by `policy` (`seed` drives the uniform choice).
pub fn decode(codebook: &Codebook, y: &ReceivedWord, policy: TieBreak, seed: u64) -> Result<DecodeResult> {
    let set = codebook.consistent_set(y)?;
    let mut distinct = 0;
    let mut last = None;
    for e in &set {
        if last != Some(e.message) {
            distinct += 1;
            last = Some(e.message);
        }
    }
    let chosen = match set.len() {
        0 => None,
        1 => Some(set[0]),
        len => match policy {
            TieBreak::LexMin => Some(set[0]),
            TieBreak::Uniform => Some(set[seed::rng_from(seed).gen_range(0..len)]),
        },
    };
    Ok(DecodeResult {
        message: chosen.map(|e| e.message),
        coin: chosen.map(|e| e.coin),
        consistent_count: set.len(),
        distinct_message_count: distinct,
        outcome: match set.len() {
            0 => DecodeOutcome::NoCandidate,
            1 => DecodeOutcome::Unique,
            _ => DecodeOutcome::AmbiguousTieBroken,
        },
    })
}

/// A code with bad messages and bad coins removed.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedCode {
    n: usize,
    k: usize,
    d: usize,
    seed: u64,
    budget: usize,
    kept_messages: Vec<u64>,
    // aligned with kept_messages, each ascending, length coins_per_message
    kept_coins: Vec<Vec<u64>>,
    codebook: Codebook,
}

/// Number of coins each kept message retains.
pub fn kept_coin_target(d: usize) -> usize {
    if d == 0 {
        1
    } else {
        1 << (d - 1)
    }
}

/// Minimum number of messages a successful pruning keeps.
pub fn kept_message_target(k: usize) -> usize {
    if k == 0 {
        1
    } else {
        1 << (k - 1)
    }
}

/// Removes, per message, coins whose suffixes sit within `budget` of
/// another coin's suffix.
///
/// For each message the violation graph joins coins at suffix distance at
/// most `budget`; the vertex of highest degree (lowest coin on ties) is
/// removed until no edge remains. A message keeps its first
/// `2^(d-1)` surviving coins in ascending order, or is dropped if fewer
/// survive. Fails when fewer than `2^(k-1)` messages remain.
pub fn prune(table: &CodeTable, budget: usize) -> Result<PrunedCode> {
    let target = kept_coin_target(table.d);
    let mut kept_messages = Vec::new();
    let mut kept_coins = Vec::new();
    for &u in table.codebook.messages() {
        let rows = table.codebook.message_entries(u);
        let survivors = prune_message(rows, budget);
        if survivors.len() >= target {
            kept_messages.push(u);
            kept_coins.push(survivors[..target].to_vec());
        }
    }
    PrunedCode::from_parts(table, budget, kept_messages, kept_coins)
}

fn prune_message(rows: &[Entry], budget: usize) -> Vec<u64> {
    let m = rows.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            let dist = (rows[i].word.bits() ^ rows[j].word.bits()).count_ones() as usize;
            if dist <= budget {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    let mut alive = vec![true; m];
    let mut degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    loop {
        let victim = (0..m)
            .filter(|&i| alive[i] && degree[i] > 0)
            .max_by(|&a, &b| degree[a].cmp(&degree[b]).then(b.cmp(&a)));
        let Some(v) = victim else { break };
        alive[v] = false;
        for &w in &adjacency[v] {
            if alive[w] {
                degree[w] -= 1;
            }
        }
        degree[v] = 0;
    }
    (0..m).filter(|&i| alive[i]).map(|i| rows[i].coin).collect()
}

impl PrunedCode {
    /// Rebuilds a pruned code from its kept sets (as stored on disk).
    pub fn from_parts(
        table: &CodeTable,
        budget: usize,
        kept_messages: Vec<u64>,
        kept_coins: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let required = kept_message_target(table.k);
        if kept_messages.len() < required {
            return Err(Error::PruningFailed {
                kept_messages: kept_messages.len(),
                required,
            });
        }
        if kept_messages.len() != kept_coins.len() {
            return Err(Error::invalid("kept message and coin lists differ in length"));
        }
        let mut entries = Vec::new();
        for (&u, coins) in kept_messages.iter().zip(&kept_coins) {
            let rows = table.codebook.message_entries(u);
            for &s in coins {
                let row = rows
                    .get(s as usize)
                    .ok_or_else(|| Error::invalid(alloc::format!("no entry for ({u}, {s})")))?;
                entries.push(*row);
            }
        }
        Ok(PrunedCode {
            n: table.n,
            k: table.k,
            d: table.d,
            seed: table.seed,
            budget,
            codebook: Codebook::new(table.n, table.k, entries)?,
            kept_messages,
            kept_coins,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn kept_messages(&self) -> &[u64] {
        &self.kept_messages
    }

    pub fn kept_coins(&self) -> &[Vec<u64>] {
        &self.kept_coins
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Pruned encoder: realized coin index `t` selects the `t`-th kept coin.
    pub fn encode(&self, u: &Message, t: usize) -> Result<Codeword> {
        let row = self
            .kept_messages
            .binary_search(&u.index())
            .map_err(|_| Error::invalid(alloc::format!("message {u} was pruned")))?;
        let s = *self.kept_coins[row]
            .get(t)
            .ok_or_else(|| Error::invalid(alloc::format!("coin index {t} out of range")))?;
        Ok(self.codebook.message_entries(u.index())[self.kept_coins[row].binary_search(&s).unwrap_or(t)].word)
    }
}

/// Smallest distance between two rows of the same message; `None` when every
/// message has a single row.
pub fn min_same_prefix_distance(codebook: &Codebook) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &u in codebook.messages() {
        let rows = codebook.message_entries(u);
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                let d = (a.word.bits() ^ b.word.bits()).count_ones() as usize;
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
    }
    best
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let q = c as f64 / total;
            -q * libm::log2(q)
        })
        .sum()
}

/// `H(U | X1 = prefix)` in bits, with uniform messages and coins.
pub fn prefix_entropy(codebook: &Codebook, prefix: &Codeword) -> Result<f64> {
    if prefix.len() > codebook.n() {
        return Err(Error::invalid("prefix longer than the code"));
    }
    let list = codebook.prefix_matches(prefix);
    if list.is_empty() {
        return Err(Error::invalid(alloc::format!(
            "prefix {prefix} matches no codeword"
        )));
    }
    Ok(entropy_of_counts(message_counts(&list), list.len()))
}

fn message_counts(list: &[&Entry]) -> Vec<usize> {
    let mut sorted: Vec<u64> = list.iter().map(|e| e.message).collect();
    sorted.sort_unstable();
    let mut counts = Vec::new();
    let mut last = None;
    for u in sorted {
        if last == Some(u) {
            *counts.last_mut().unwrap() += 1;
        } else {
            counts.push(1);
            last = Some(u);
        }
    }
    counts
}

/// `H(U | X1)` for the `ell`-prefix `X1` of a uniformly encoded message.
pub fn conditional_entropy(codebook: &Codebook, ell: usize) -> f64 {
    let ell = ell.min(codebook.n());
    let mut by_prefix: Vec<(u128, u64)> = codebook
        .entries()
        .iter()
        .map(|e| (e.word.prefix(ell).bits(), e.message))
        .collect();
    by_prefix.sort_unstable();
    let total = by_prefix.len() as f64;
    let mut h = 0.0;
    let mut start = 0;
    while start < by_prefix.len() {
        let mut end = start;
        while end < by_prefix.len() && by_prefix[end].0 == by_prefix[start].0 {
            end += 1;
        }
        let group = &by_prefix[start..end];
        let mut counts = Vec::new();
        let mut i = 0;
        while i < group.len() {
            let mut j = i;
            while j < group.len() && group[j].1 == group[i].1 {
                j += 1;
            }
            counts.push(j - i);
            i = j;
        }
        h += group.len() as f64 / total * entropy_of_counts(counts, group.len());
        start = end;
    }
    h
}

/// Membership of a prefix in the high-uncertainty set: conditional message
/// entropy above `n * epsilon / 4`.
pub fn in_a_epsilon(codebook: &Codebook, prefix: &Codeword, epsilon: f64) -> Result<bool> {
    Ok(prefix_entropy(codebook, prefix)? > codebook.n() as f64 * epsilon / 4.0)
}

/// Mean pairwise distance `1/(M(M-1)) sum_{i != j} d(x_i, x_j)`.
pub fn average_distance(words: &[Codeword]) -> Result<f64> {
    let m = words.len();
    if m < 2 {
        return Err(Error::invalid("average distance needs at least two words"));
    }
    let mut sum = 0usize;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            sum += word::hamming_distance(a, b)?;
        }
    }
    Ok(2.0 * sum as f64 / (m * (m - 1)) as f64)
}

/// Largest average distance `M` binary words of length `n` can have:
/// `M/(M-1) * n/2`.
pub fn plotkin_average_bound(m: usize, n: usize) -> f64 {
    m as f64 / (m as f64 - 1.0) * n as f64 / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessReport {
    /// `Pr_S` that another message's codeword lands in the forbidden ball.
    pub probability: f64,
    /// `2^{-eta_tilde n}`.
    pub threshold: f64,
    pub good: bool,
}

/// Exact type-I exposure of message `u` after first-step output `y1`:
/// averaged over every coin `s`, whether some codeword of another message
/// lies in the forbidden ball centred at `(y1, x2(u, s))`.
pub fn goodness_check(
    codebook: &Codebook,
    u: u64,
    y1: &ReceivedWord,
    budget: usize,
    eta_tilde: f64,
) -> Result<GoodnessReport> {
    if !codebook.is_systematic() {
        return Err(Error::invalid("goodness is defined for systematic codes"));
    }
    let k = codebook.k();
    if y1.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: y1.len(),
        });
    }
    let own = codebook.message_entries(u);
    if own.is_empty() {
        return Err(Error::invalid(alloc::format!("message {u} not in the code")));
    }
    if !word::consistent_unchecked(&own[0].word.prefix(k), y1) {
        return Err(Error::invalid("y1 is not an erasure of the message"));
    }
    let mut rivals: Vec<&Entry> = Vec::new();
    for_each_consistent_message(y1, |v| {
        if v != u {
            rivals.extend(codebook.message_entries(v));
        }
    });
    let mut hits = 0usize;
    for row in own {
        let spec = BallSpec::new(codebook.n(), budget, *y1, row.word.suffix(k))?;
        if rivals
            .iter()
            .any(|r| forbidden::contains_unchecked(&spec, &r.word))
        {
            hits += 1;
        }
    }
    let probability = hits as f64 / own.len() as f64;
    let threshold = libm::exp2(-eta_tilde * codebook.n() as f64);
    Ok(GoodnessReport {
        probability,
        threshold,
        good: probability <= threshold,
    })
}
