// SPDX-License-Identifier: Apache-2.0

//! Finite binary strings and the self-delimiting pair code.
//!
//! A pair `(x, y)` is encoded as `0^|x| 1 x y`, so `|[x, y]| = 2|x| + |y| + 1`.
//! Tuples of more than two strings nest to the right in argument order:
//! `[v1, v2, v3] = [v1, [v2, v3]]`. Every module that builds a multi-string
//! condition goes through [`join`] so the convention is shared.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

/// Default maximum length of strings handed to the exact oracle.
pub const DEFAULT_MAX_ORACLE_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("invalid bit character {0:?} (expected '0', '1' or '-' for the empty string)")]
    InvalidChar(char),
    #[error("string {0} is not a well-formed pair encoding")]
    MalformedPair(BitString),
}

/// A finite binary string. Bits are packed most-significant first so that
/// comparing words compares lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl BitString {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        let mut s = Self::empty();
        s.words.resize(len.div_ceil(64), 0);
        s.len = len;
        s
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, true);
        }
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::empty();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// The `len`-bit big-endian rendering of `value` (the `value`-th string
    /// of that length in lexicographic order). High bits beyond 128 are zero.
    pub fn from_index(value: u128, len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len.min(128) {
            if (value >> i) & 1 == 1 {
                s.set(len - 1 - i, true);
            }
        }
        s
    }

    /// Position of this string among strings of its own length, if it fits.
    pub fn to_index(&self) -> Option<u128> {
        if self.len > 128 {
            return None;
        }
        Some(self.iter().fold(0u128, |acc, b| (acc << 1) | b as u128))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (63 - i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len);
        BitString::from_bits((start..end).map(|i| self.get(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        prefix.len <= self.len && (0..prefix.len).all(|i| self.get(i) == prefix.get(i))
    }

    /// One of the two strings is a prefix of the other.
    pub fn is_consistent_with(&self, other: &BitString) -> bool {
        self.starts_with(other) || other.starts_with(self)
    }

    pub fn leading_zeros(&self) -> usize {
        self.iter().take_while(|b| !b).count()
    }

    /// The next string in length-lexicographic order (`1^n` rolls over to `0^{n+1}`).
    pub fn successor(&self) -> BitString {
        match self.same_length_successor() {
            Some(s) => s,
            None => BitString::zeros(self.len + 1),
        }
    }

    /// Lexicographically next string of the same length, if any.
    pub fn same_length_successor(&self) -> Option<BitString> {
        let mut out = self.clone();
        for i in (0..self.len).rev() {
            if out.get(i) {
                out.set(i, false);
            } else {
                out.set(i, true);
                return Some(out);
            }
        }
        None
    }

    /// All strings of length exactly `len`, lexicographically.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "refusing to enumerate 2^{len} strings");
        (0..(1u128 << len)).map(move |i| BitString::from_index(i, len))
    }

    /// All strings of length at most `max_len`, in length-lexicographic order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }
}

impl Ord for BitString {
    /// Length first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.words.cmp(&other.words))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" {
            return Ok(Self::empty());
        }
        let mut out = Self::empty();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(BitsError::InvalidChar(other)),
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout tests and docs: `bits("0101")`. Panics on bad input.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("literal bit string")
}

/// `[x, y] = 0^|x| 1 x y`.
pub fn encode_pair(x: &BitString, y: &BitString) -> BitString {
    let mut out = BitString::zeros(x.len());
    out.push(true);
    out.extend_from(x);
    out.extend_from(y);
    out
}

pub fn decode_pair(s: &BitString) -> Result<(BitString, BitString), BitsError> {
    split_pair(s).ok_or_else(|| BitsError::MalformedPair(s.clone()))
}

/// Non-allocating-error variant of [`decode_pair`], used on hot paths.
pub fn split_pair(s: &BitString) -> Option<(BitString, BitString)> {
    let zeros = s.leading_zeros();
    if zeros == s.len() {
        return None;
    }
    let left_end = 2 * zeros + 1;
    if left_end > s.len() {
        return None;
    }
    Some((s.slice(zeros + 1, left_end), s.slice(left_end, s.len())))
}

/// Right-nested tuple encoding: `[]` is the empty string, `[a]` is `a`,
/// `[a, b, ..]` is `[a, [b, ..]]`.
pub fn join(parts: &[&BitString]) -> BitString {
    match parts {
        [] => BitString::empty(),
        [only] => (*only).clone(),
        [first, rest @ ..] => encode_pair(first, &join(rest)),
    }
}

pub fn join_owned(parts: &[BitString]) -> BitString {
    let refs: Vec<&BitString> = parts.iter().collect();
    join(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        assert_eq!(encode_pair(&bits("0"), &bits("111")), bits("010111"));
        assert_eq!(encode_pair(&bits("-"), &bits("-")), bits("1"));
        assert_eq!(decode_pair(&bits("001011")).unwrap(), (bits("01"), bits("1")));
        assert_eq!(encode_pair(&bits("01"), &bits("1")), bits("001011"));
    }

    #[test]
    fn decode_rejects_malformed() {
        for s in ["-", "0", "000", "001", "0001"] {
            assert!(decode_pair(&bits(s)).is_err(), "{s}");
        }
    }

    #[test]
    fn length_lex_order() {
        let mut v = vec![bits("10"), bits("0"), bits("-"), bits("00"), bits("1")];
        v.sort();
        assert_eq!(v, vec![bits("-"), bits("0"), bits("1"), bits("00"), bits("10")]);
        assert!(bits("0111") < bits("1000"));
        assert!(bits("111") < bits("0000"));
    }

    #[test]
    fn successor_walks_length_lex() {
        let seq: Vec<_> = BitString::all_up_to(3).collect();
        for w in seq.windows(2) {
            assert_eq!(w[0].successor(), w[1]);
        }
        assert_eq!(bits("11").same_length_successor(), None);
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let a = BitString::from_bits((0..100).map(|i| i % 3 == 0));
        let b = BitString::ones(70);
        let p = encode_pair(&a, &b);
        assert_eq!(p.len(), 2 * 100 + 70 + 1);
        assert_eq!(decode_pair(&p).unwrap(), (a, b));
    }

    #[test]
    fn index_round_trip() {
        for s in BitString::all_up_to(5) {
            assert_eq!(BitString::from_index(s.to_index().unwrap(), s.len()), s);
        }
    }

    #[test]
    fn join_nests_right() {
        let (a, b, c) = (bits("1"), bits("01"), bits("-"));
        assert_eq!(join(&[&a, &b, &c]), encode_pair(&a, &encode_pair(&b, &c)));
        assert_eq!(join(&[&a]), a);
        assert_eq!(join(&[]), BitString::empty());
    }
}
