// SPDX-License-Identifier: Apache-2.0

//! The forbidden ball of the two-step model.
//!
//! After the first step the channel holds `(y1, x2)`: the message prefix
//! with `q` erasures and the untouched suffix. The ball around it is every
//! word whose prefix is consistent with `y1` and whose suffix lies within
//! Hamming distance `budget - q` of `x2`: a cube of side `q` times a
//! Hamming ball. Its size is `2^q * sum_{i <= budget - q} C(n - k, i)`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::bounds::{self, DeltaEta};
use crate::error::{Error, Result};
use crate::word::{self, Codeword, ErasurePattern, ReceivedWord};

/// Largest `n` [`ball_enumerate`] will scan (it walks all `2^n` words).
pub const ENUMERATION_LIMIT: usize = 24;

/// Parameters and center of one forbidden ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallSpec {
    n: usize,
    k: usize,
    budget: usize,
    q_count: usize,
    center_prefix: ReceivedWord,
    center_suffix: Codeword,
}

fn check_params(n: usize, k: usize, budget: usize, q: usize) -> Result<()> {
    if k > n {
        return Err(Error::invalid(alloc::format!("prefix length k = {k} exceeds n = {n}")));
    }
    if budget > n {
        return Err(Error::invalid(alloc::format!("budget {budget} exceeds n = {n}")));
    }
    if q > k.min(budget) {
        return Err(Error::invalid(alloc::format!(
            "first-step erasures q = {q} exceed min(k, budget) = {}",
            k.min(budget)
        )));
    }
    if n > word::MAX_LEN {
        return Err(Error::GuardExceeded {
            what: "word length",
            limit: word::MAX_LEN,
            requested: n,
        });
    }
    Ok(())
}

impl BallSpec {
    pub fn new(
        n: usize,
        budget: usize,
        center_prefix: ReceivedWord,
        center_suffix: Codeword,
    ) -> Result<Self> {
        let k = center_prefix.len();
        if k + center_suffix.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: k + center_suffix.len(),
            });
        }
        let q_count = word::erasure_count(&center_prefix);
        check_params(n, k, budget, q_count)?;
        Ok(BallSpec {
            n,
            k,
            budget,
            q_count,
            center_prefix,
            center_suffix,
        })
    }

    /// Ball around a uniformly random message prefix with a uniformly
    /// random set of `q` first-step erasures and a uniformly random suffix.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        k: usize,
        budget: usize,
        q: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_params(n, k, budget, q)?;
        let prefix = Codeword::from_bits(rng.gen::<u128>(), k)?;
        let positions = rand::seq::index::sample(rng, k.max(1), q);
        let pattern = ErasurePattern::from_positions(k, positions.iter().filter(|&p| p < k))?;
        let suffix = Codeword::from_bits(rng.gen::<u128>(), n - k)?;
        BallSpec::new(n, budget, word::erase(&prefix, &pattern)?, suffix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn q_count(&self) -> usize {
        self.q_count
    }

    /// Second-step erasure allowance, the radius of the suffix ball.
    pub fn radius(&self) -> usize {
        self.budget - self.q_count
    }

    pub fn center_prefix(&self) -> &ReceivedWord {
        &self.center_prefix
    }

    pub fn center_suffix(&self) -> &Codeword {
        &self.center_suffix
    }
}

/// `sum_{i=0}^{r} C(m, i)` exactly.
pub fn hamming_ball_volume(m: usize, r: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 0..r.min(m) {
        term = term * (m - i) / (i + 1);
        total += &term;
    }
    total
}

/// Ball size from parameters alone; the center does not matter.
pub fn ball_size(n: usize, k: usize, budget: usize, q: usize) -> Result<BigUint> {
    check_params(n, k, budget, q)?;
    Ok(hamming_ball_volume(n - k, budget - q) << q)
}

pub fn ball_size_exact(spec: &BallSpec) -> BigUint {
    hamming_ball_volume(spec.n - spec.k, spec.radius()) << spec.q_count
}

pub fn ball_contains(spec: &BallSpec, candidate: &Codeword) -> Result<bool> {
    if candidate.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            found: candidate.len(),
        });
    }
    Ok(contains_unchecked(spec, candidate))
}

#[inline]
pub(crate) fn contains_unchecked(spec: &BallSpec, candidate: &Codeword) -> bool {
    word::consistent_unchecked(&candidate.prefix(spec.k), &spec.center_prefix)
        && (candidate.suffix(spec.k).bits() ^ spec.center_suffix.bits()).count_ones() as usize
            <= spec.radius()
}

/// Every member of the ball, by scanning all `2^n` words in ascending order.
pub fn ball_enumerate(spec: &BallSpec) -> Result<Vec<Codeword>> {
    if spec.n > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded {
            what: "ball enumeration length",
            limit: ENUMERATION_LIMIT,
            requested: spec.n,
        });
    }
    let mut out = Vec::new();
    for bits in 0u128..(1u128 << spec.n) {
        let w = Codeword::from_bits(bits, spec.n)?;
        if contains_unchecked(spec, &w) {
            out.push(w);
        }
    }
    Ok(out)
}

/// `log2` of a positive big integer to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 60 {
        return libm::log2(x.to_u64().unwrap_or(u64::MAX) as f64);
    }
    let shift = bits - 60;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    libm::log2(top as f64) + shift as f64
}

/// Relative slack applied to the fractional comparison in [`fits_under`].
const COMPARISON_MARGIN: f64 = 1.0 / (1u64 << 40) as f64;

/// Whether `size <= 2^exponent`, deciding conservatively: the integer part
/// of the exponent is compared exactly, and the fractional part only passes
/// with a relative margin of 2^-40 to spare.
pub fn fits_under(size: &BigUint, exponent: f64) -> bool {
    if !(exponent >= 0.0) {
        return size.is_zero() || (exponent == 0.0 && size.is_one());
    }
    let whole = libm::floor(exponent) as u64;
    let frac = exponent - whole as f64;
    let floor_pow = BigUint::one() << whole;
    if *size <= floor_pow {
        return true;
    }
    if *size >= (floor_pow << 1u32) {
        return false;
    }
    // size / 2^whole lies in (1, 2); 60 leading bits carry it to f64 precision
    let ratio = if whole >= 60 {
        let top = (size >> (whole - 60)).to_u64().unwrap_or(u64::MAX);
        top as f64 / (1u64 << 60) as f64
    } else {
        size.to_u64().unwrap_or(u64::MAX) as f64 / (1u64 << whole) as f64
    };
    ratio * (1.0 + COMPARISON_MARGIN) <= libm::exp2(frac)
}

/// Outcome of checking the forbidden-ball size bound at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallBoundReport {
    pub n: usize,
    pub k: usize,
    pub budget: usize,
    /// `R_{delta,eta}(p)`.
    pub rate: f64,
    /// `(1 - R_{delta,eta}(p) - eta/2) n`.
    pub exponent: f64,
    /// First-step erasure count with the largest ball.
    pub worst_q: usize,
    pub worst_log2_size: f64,
    /// `exponent - worst_log2_size`, in bits.
    pub margin_bits: f64,
    pub pass: bool,
}

/// Checks `B <= 2^{(1 - R_{delta,eta}(p) - eta/2) n}` for every first-step
/// erasure count `q` in `0..=min(k, floor(p n))`, where the message length is
/// `k = round((R_{delta,eta}(p) - delta) n)`.
pub fn ball_bound_check(p: f64, de: DeltaEta, n: usize) -> Result<BallBoundReport> {
    let rate = bounds::rate_delta_eta(p, de)?;
    let k_real = libm::round((rate - de.delta) * n as f64);
    if !(k_real >= 1.0) || k_real > n as f64 {
        return Err(Error::invalid(alloc::format!(
            "n = {n} too small: message length rounds to {k_real}"
        )));
    }
    let k = k_real as usize;
    let budget = libm::floor(p * n as f64) as usize;
    let exponent = (1.0 - rate - de.eta / 2.0) * n as f64;
    let m = n - k;
    let mut pass = true;
    let mut worst_q = 0;
    let mut worst_log2_size = f64::NEG_INFINITY;
    for q in 0..=k.min(budget) {
        let size = hamming_ball_volume(m, budget - q) << q;
        pass &= fits_under(&size, exponent);
        let l = log2_big(&size);
        if l > worst_log2_size {
            worst_log2_size = l;
            worst_q = q;
        }
    }
    Ok(BallBoundReport {
        n,
        k,
        budget,
        rate,
        exponent,
        worst_q,
        worst_log2_size,
        margin_bits: exponent - worst_log2_size,
        pass,
    })
}
