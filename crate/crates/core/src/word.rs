// SPDX-License-Identifier: Apache-2.0

//! Bit-packed value types for transmitted and received words.
//!
//! Position `i` (0-based) of a word lives in bit `i` of a `u128`, so words
//! are `Copy` and every predicate is a couple of mask operations. Text
//! rendering lists position 0 first and uses `^` for an erasure.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Longest word the packed representation holds.
pub const MAX_LEN: usize = 128;

#[inline]
pub(crate) fn low_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_LEN {
        return Err(Error::GuardExceeded {
            what: "word length",
            limit: MAX_LEN,
            requested: len,
        });
    }
    Ok(())
}

fn same_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// A binary string of fixed length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Codeword {
    bits: u128,
    len: usize,
}

impl Codeword {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Codeword { bits: 0, len })
    }

    /// Builds a word from packed bits; bits at or above `len` are dropped.
    pub fn from_bits(bits: u128, len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Codeword {
            bits: bits & low_mask(len),
            len,
        })
    }

    /// Reads `len` bits of `value` most significant first, so the binary
    /// numeral of `value` is also the word's rendering.
    pub fn from_index(value: u64, len: usize) -> Result<Self> {
        check_len(len)?;
        if len < 64 && value >> len != 0 {
            return Err(Error::invalid("index does not fit in the requested length"));
        }
        let bits = if len == 0 {
            0
        } else {
            (value as u128).reverse_bits() >> (128 - len)
        };
        Ok(Codeword { bits, len })
    }

    pub fn from_slice(symbols: &[bool]) -> Result<Self> {
        check_len(symbols.len())?;
        let bits = symbols
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
        Ok(Codeword {
            bits,
            len: symbols.len(),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    pub fn with_bit(mut self, i: usize, value: bool) -> Self {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
        self
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Inverse of [`Codeword::from_index`]. Only meaningful for `len <= 64`.
    pub fn to_index(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            (self.bits.reverse_bits() >> (128 - self.len)) as u64
        }
    }

    /// First `k` symbols.
    pub fn prefix(&self, k: usize) -> Codeword {
        let k = k.min(self.len);
        Codeword {
            bits: self.bits & low_mask(k),
            len: k,
        }
    }

    /// Symbols `k..len`.
    pub fn suffix(&self, k: usize) -> Codeword {
        let k = k.min(self.len);
        Codeword {
            bits: if k >= 128 { 0 } else { self.bits >> k },
            len: self.len - k,
        }
    }

    pub fn concat(&self, tail: &Codeword) -> Result<Codeword> {
        let len = self.len + tail.len;
        check_len(len)?;
        let shifted = if self.len >= 128 { 0 } else { tail.bits << self.len };
        Ok(Codeword {
            bits: self.bits | shifted,
            len,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_received(&self) -> ReceivedWord {
        ReceivedWord {
            bits: self.bits,
            erased: 0,
            len: self.len,
        }
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({self})")
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(alloc::format!(
                    "invalid codeword symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Codeword::from_slice(&symbols)
    }
}

/// One output symbol of an erasure channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erased => '^',
        }
    }
}

/// A word over `{0, 1, erasure}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ReceivedWord {
    // invariant: bits & erased == 0
    bits: u128,
    erased: u128,
    len: usize,
}

impl ReceivedWord {
    pub fn from_symbols(symbols: &[Symbol]) -> Result<Self> {
        check_len(symbols.len())?;
        let mut bits = 0u128;
        let mut erased = 0u128;
        for (i, s) in symbols.iter().enumerate() {
            match s {
                Symbol::Zero => {}
                Symbol::One => bits |= 1 << i,
                Symbol::Erased => erased |= 1 << i,
            }
        }
        Ok(ReceivedWord {
            bits,
            erased,
            len: symbols.len(),
        })
    }

    /// All-erased word of length `len`.
    pub fn erasures(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(ReceivedWord {
            bits: 0,
            erased: low_mask(len),
            len,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn erased_mask(&self) -> u128 {
        self.erased
    }

    /// Value bits at non-erased positions (zero under erasures).
    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn get(&self, i: usize) -> Symbol {
        debug_assert!(i < self.len);
        if (self.erased >> i) & 1 == 1 {
            Symbol::Erased
        } else if (self.bits >> i) & 1 == 1 {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn erasure_pattern(&self) -> ErasurePattern {
        ErasurePattern {
            mask: self.erased,
            len: self.len,
        }
    }

    pub fn prefix(&self, k: usize) -> ReceivedWord {
        let k = k.min(self.len);
        let m = low_mask(k);
        ReceivedWord {
            bits: self.bits & m,
            erased: self.erased & m,
            len: k,
        }
    }

    pub fn suffix(&self, k: usize) -> ReceivedWord {
        let k = k.min(self.len);
        let shift = |v: u128| if k >= 128 { 0 } else { v >> k };
        ReceivedWord {
            bits: shift(self.bits),
            erased: shift(self.erased),
            len: self.len - k,
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols().map(Symbol::as_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReceivedWord({self})")
    }
}

impl FromStr for ReceivedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '^' | '∧' => Ok(Symbol::Erased),
                other => Err(Error::invalid(alloc::format!(
                    "invalid received symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        ReceivedWord::from_symbols(&symbols)
    }
}

/// A set of erased positions within a word of length `len`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ErasurePattern {
    mask: u128,
    len: usize,
}

impl ErasurePattern {
    pub fn empty(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(ErasurePattern { mask: 0, len })
    }

    /// Positions are 0-based; repeats collapse.
    pub fn from_positions<I>(len: usize, positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        check_len(len)?;
        let mut mask = 0u128;
        for p in positions {
            if p >= len {
                return Err(Error::invalid(alloc::format!(
                    "erasure position {p} out of range for length {len}"
                )));
            }
            mask |= 1 << p;
        }
        Ok(ErasurePattern { mask, len })
    }

    pub fn from_mask(mask: u128, len: usize) -> Result<Self> {
        check_len(len)?;
        if mask & !low_mask(len) != 0 {
            return Err(Error::invalid("erasure mask has bits beyond the word length"));
        }
        Ok(ErasurePattern { mask, len })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.mask >> i) & 1 == 1
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.positions()).finish()
    }
}

/// A `k`-bit message, indexed so that its rendering is the binary numeral
/// of `index`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Message {
    index: u64,
    len: usize,
}

impl Message {
    pub fn new(index: u64, len: usize) -> Result<Self> {
        if len > 64 || (len < 64 && index >> len != 0) {
            return Err(Error::invalid(alloc::format!(
                "message index {index} does not fit in {len} bits"
            )));
        }
        Ok(Message { index, len })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn to_codeword(&self) -> Codeword {
        Codeword::from_index(self.index, self.len).expect("message length checked at construction")
    }

    /// The message carried in the first `k` symbols of a systematic codeword.
    pub fn from_prefix(x: &Codeword, k: usize) -> Result<Self> {
        if k > x.len() || k > 64 {
            return Err(Error::invalid("message prefix longer than the word"));
        }
        Message::new(x.prefix(k).to_index(), k)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_codeword().fmt(f)
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &Codeword, b: &Codeword) -> Result<usize> {
    same_len(a.len, b.len)?;
    Ok((a.bits ^ b.bits).count_ones() as usize)
}

/// Whether `x` agrees with `y` at every position `y` did not erase.
pub fn is_consistent(x: &Codeword, y: &ReceivedWord) -> Result<bool> {
    same_len(y.len, x.len)?;
    Ok(consistent_unchecked(x, y))
}

#[inline]
pub(crate) fn consistent_unchecked(x: &Codeword, y: &ReceivedWord) -> bool {
    (x.bits ^ y.bits) & !y.erased & low_mask(x.len) == 0
}

pub fn erase(x: &Codeword, pattern: &ErasurePattern) -> Result<ReceivedWord> {
    same_len(x.len, pattern.len)?;
    Ok(ReceivedWord {
        bits: x.bits & !pattern.mask,
        erased: pattern.mask,
        len: x.len,
    })
}

pub fn erasure_count(y: &ReceivedWord) -> usize {
    y.erased.count_ones() as usize
}
