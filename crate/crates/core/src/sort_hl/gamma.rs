//! Elias gamma codes over raw bit strings.
//!
//! `γ(x)` is `⌊log2 x⌋` zeros followed by the `⌊log2 x⌋ + 1`-bit binary form
//! of `x`. The code is prefix-free, so a concatenation of codes decodes to at
//! most one sequence of integers.

use bitvec::prelude::*;
use thiserror::Error;

/// Bit strings compare lexicographically bit by bit, a proper prefix first.
pub type BitString = BitVec<u64, Msb0>;
pub type Bits = BitSlice<u64, Msb0>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaError {
    #[error("gamma codes only represent positive integers")]
    Zero,
    #[error("bit string ends inside a gamma code")]
    Truncated,
    #[error("gamma code wider than 64 bits")]
    TooWide,
}

/// Appends `γ(x)` to `out`. Panics on `x == 0`.
pub fn push_gamma(out: &mut BitString, x: u64) {
    assert!(x != 0, "gamma code of zero");
    let width = 64 - x.leading_zeros() as usize;
    out.extend(std::iter::repeat_n(false, width - 1));
    for k in (0..width).rev() {
        out.push((x >> k) & 1 == 1);
    }
}

pub fn gamma_encode(x: u64) -> Result<BitString, GammaError> {
    if x == 0 {
        return Err(GammaError::Zero);
    }
    let mut out = BitString::new();
    push_gamma(&mut out, x);
    Ok(out)
}

/// Reads one code from the front of `bits`, returning it and the rest.
pub fn gamma_decode(bits: &Bits) -> Result<(u64, &Bits), GammaError> {
    let zeros = bits.leading_zeros();
    if zeros == bits.len() {
        return Err(GammaError::Truncated);
    }
    if zeros >= 64 {
        return Err(GammaError::TooWide);
    }
    let width = zeros + 1;
    let end = zeros + width;
    if end > bits.len() {
        return Err(GammaError::Truncated);
    }
    let value = bits[zeros..end]
        .iter()
        .fold(0u64, |acc, b| (acc << 1) | *b as u64);
    Ok((value, &bits[end..]))
}

/// `γ(r_1) … γ(r_ℓ)`; the empty string for an empty tuple.
pub fn encode_tuple(ranks: &[u32]) -> BitString {
    let mut out = BitString::new();
    for &r in ranks {
        push_gamma(&mut out, r as u64);
    }
    out
}

pub fn decode_tuple(mut bits: &Bits) -> Result<Vec<u64>, GammaError> {
    let mut out = Vec::new();
    while !bits.is_empty() {
        let (x, rest) = gamma_decode(bits)?;
        out.push(x);
        bits = rest;
    }
    Ok(out)
}
