// SPDX-License-Identifier: Apache-2.0

//! Causal adversarial erasure channels: word types, capacity bounds,
//! forbidden-ball combinatorics, stochastic codes, adversary strategies and
//! Monte Carlo error estimation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod channels;
pub mod codes;
pub mod error;
pub mod forbidden;
pub mod seed;
pub mod sim;
pub mod word;

pub use error::{Error, Result};
pub use word::{Codeword, ErasurePattern, Message, ReceivedWord, Symbol};
