//! Finite non-crossing perfect matchings.
//!
//! A matching of `2n` points is stored as its involution (`mates[i]` is the
//! partner of point `i`, zero-based). The text format used on the command
//! line is one-based: `"1-4,2-3"`.

use std::fmt;
use std::str::FromStr;

use num::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchingError {
    #[error("point {0} is out of range for a matching of {1} points")]
    OutOfRange(usize, usize),
    #[error("point {0} is matched to itself")]
    FixedPoint(usize),
    #[error("pairing is not an involution at point {0}")]
    NotInvolution(usize),
    #[error("point {0} is left unmatched")]
    Unmatched(usize),
    #[error("pairs interleave: {0}-{1} crosses {2}-{3}")]
    Crossing(usize, usize, usize, usize),
    #[error("catalan({0}) overflows 128 bits")]
    Overflow(usize),
    #[error("cannot parse matching: {0}")]
    Parse(String),
}

/// Reading order used by [`is_noncrossing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Linear,
    Cyclic,
}

/// A perfect matching of `0..len` that is known to be non-crossing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcMatching {
    mates: Vec<usize>,
}

impl NcMatching {
    pub fn empty() -> Self {
        NcMatching { mates: Vec::new() }
    }

    /// Validates `mates` as a fixed-point free, non-crossing involution.
    pub fn from_mates(mates: Vec<usize>) -> Result<Self, MatchingError> {
        check_involution(&mates)?;
        if let Some((a, b, c, d)) = first_crossing(&mates) {
            return Err(MatchingError::Crossing(a, b, c, d));
        }
        Ok(NcMatching { mates })
    }

    /// Builds from zero-based pairs; every point of `0..2*pairs.len()` must appear once.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, MatchingError> {
        let len = pairs.len() * 2;
        let mut mates = vec![usize::MAX; len];
        for &(a, b) in pairs {
            for p in [a, b] {
                if p >= len {
                    return Err(MatchingError::OutOfRange(p, len));
                }
                if mates[p] != usize::MAX {
                    return Err(MatchingError::NotInvolution(p));
                }
            }
            if a == b {
                return Err(MatchingError::FixedPoint(a));
            }
            mates[a] = b;
            mates[b] = a;
        }
        Self::from_mates(mates)
    }

    /// Matching of a balanced word (`true` opens, `false` closes).
    pub fn from_word(word: &[bool]) -> Result<Self, MatchingError> {
        let mut mates = vec![usize::MAX; word.len()];
        let mut stack = Vec::new();
        for (i, &open) in word.iter().enumerate() {
            if open {
                stack.push(i);
            } else {
                let j = stack.pop().ok_or(MatchingError::Unmatched(i))?;
                mates[i] = j;
                mates[j] = i;
            }
        }
        if let Some(&j) = stack.last() {
            return Err(MatchingError::Unmatched(j));
        }
        Ok(NcMatching { mates })
    }

    /// The balanced word of this matching: point `i` opens iff its mate is to its right.
    pub fn to_word(&self) -> Vec<bool> {
        self.mates.iter().enumerate().map(|(i, &m)| m > i).collect()
    }

    pub fn len(&self) -> usize {
        self.mates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mates.is_empty()
    }

    pub fn order(&self) -> usize {
        self.mates.len() / 2
    }

    pub fn mate(&self, i: usize) -> usize {
        self.mates[i]
    }

    pub fn mates(&self) -> &[usize] {
        &self.mates
    }

    /// Zero-based pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mates
            .iter()
            .enumerate()
            .filter(|&(i, &m)| i < m)
            .map(|(i, &m)| (i, m))
            .collect()
    }

    /// Image under `i -> len-1-i`.
    pub fn reflect(&self) -> NcMatching {
        let n = self.mates.len();
        let mut mates = vec![0; n];
        for (i, &m) in self.mates.iter().enumerate() {
            mates[n - 1 - i] = n - 1 - m;
        }
        NcMatching { mates }
    }
}

impl fmt::Display for NcMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b) in self.pairs() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}-{}", a + 1, b + 1)?;
        }
        Ok(())
    }
}

impl FromStr for NcMatching {
    type Err = MatchingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(NcMatching::empty());
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (a, b) = item
                .trim()
                .split_once('-')
                .ok_or_else(|| MatchingError::Parse(format!("expected 'a-b', got '{item}'")))?;
            let parse = |t: &str| -> Result<usize, MatchingError> {
                let v: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| MatchingError::Parse(format!("bad point '{t}'")))?;
                v.checked_sub(1)
                    .ok_or_else(|| MatchingError::Parse("points are numbered from 1".into()))
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        NcMatching::from_pairs(&pairs)
    }
}

impl Serialize for NcMatching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| [a + 1, b + 1])
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NcMatching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[usize; 2]> = Vec::deserialize(d)?;
        let zero_based: Vec<(usize, usize)> = pairs
            .iter()
            .map(|p| (p[0].wrapping_sub(1), p[1].wrapping_sub(1)))
            .collect();
        NcMatching::from_pairs(&zero_based).map_err(serde::de::Error::custom)
    }
}

fn check_involution(mates: &[usize]) -> Result<(), MatchingError> {
    let n = mates.len();
    for (i, &m) in mates.iter().enumerate() {
        if m >= n {
            return Err(MatchingError::OutOfRange(m, n));
        }
        if m == i {
            return Err(MatchingError::FixedPoint(i));
        }
        if mates[m] != i {
            return Err(MatchingError::NotInvolution(i));
        }
    }
    Ok(())
}

fn first_crossing(mates: &[usize]) -> Option<(usize, usize, usize, usize)> {
    let mut stack: Vec<usize> = Vec::new();
    for (i, &m) in mates.iter().enumerate() {
        if m > i {
            stack.push(i);
        } else {
            let top = *stack
                .last()
                .expect("involution has an opener for every closer");
            if top != m {
                return Some((m, i, top, mates[top]));
            }
            stack.pop();
        }
    }
    None
}

/// True iff no two pairs of `mates` interleave.
///
/// Two chords of a circle cross exactly when their endpoints interleave in
/// any linear reading of the circle, so both orders reduce to the same test.
pub fn is_noncrossing(mates: &[usize], order: Order) -> Result<bool, MatchingError> {
    check_involution(mates)?;
    let _ = order;
    Ok(first_crossing(mates).is_none())
}

/// Catalan number `c_k` via `c_{k+1} = c_k * 2(2k+1) / (k+2)`.
pub fn catalan(k: usize) -> Result<u128, MatchingError> {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c
            .checked_mul(2 * (2 * i + 1))
            .ok_or(MatchingError::Overflow(k))?
            / (i + 2);
    }
    Ok(c)
}

pub fn catalan_big(k: usize) -> BigUint {
    let mut c = BigUint::from(1u32);
    for i in 0..k as u64 {
        c = c * (2 * (2 * i + 1)) / (i + 2);
    }
    c
}

/// Streams every non-crossing perfect matching of `2n` points, in
/// lexicographic order of the parenthesis word with `(` before `)`.
pub fn enumerate_ncmatchings(n: usize) -> NcEnumerator {
    NcEnumerator {
        n,
        word: None,
        done: false,
    }
}

pub struct NcEnumerator {
    n: usize,
    word: Option<Vec<bool>>,
    done: bool,
}

impl NcEnumerator {
    fn advance(&mut self) -> bool {
        let n = self.n;
        let word = match self.word.as_mut() {
            None => {
                let mut w = vec![true; n];
                w.extend(std::iter::repeat_n(false, n));
                self.word = Some(w);
                return true;
            }
            Some(w) => w,
        };
        let len = 2 * n;
        let mut opens = word.iter().filter(|&&b| b).count();
        let mut closes = len - opens;
        for i in (0..len).rev() {
            if word[i] {
                opens -= 1;
            } else {
                closes -= 1;
            }
            // prefix word[..i] now has `opens` opens and `closes` closes
            if word[i] && opens > closes {
                word[i] = false;
                let need_open = n - opens;
                for (k, slot) in word[i + 1..].iter_mut().enumerate() {
                    *slot = k < need_open;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for NcEnumerator {
    type Item = NcMatching;

    fn next(&mut self) -> Option<NcMatching> {
        if self.done {
            return None;
        }
        if !self.advance() {
            self.done = true;
            return None;
        }
        let w = self.word.as_ref().expect("advanced");
        Some(NcMatching::from_word(w).expect("enumerator only yields balanced words"))
    }
}

/// Uniform balanced word of length `2n` drawn with `rng`, by the cycle lemma:
/// a shuffled word of `n` opens and `n+1` closes has exactly one rotation whose
/// proper prefixes all stay nonnegative; dropping its final close leaves a
/// uniform Dyck word.
pub fn sample_word<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<bool> {
    let mut word: Vec<bool> = std::iter::repeat_n(true, n)
        .chain(std::iter::repeat_n(false, n + 1))
        .collect();
    word.shuffle(rng);
    let mut depth: i64 = 0;
    let mut min = 0i64;
    let mut argmin = 0usize;
    for (i, &open) in word.iter().enumerate() {
        depth += if open { 1 } else { -1 };
        if depth < min {
            min = depth;
            argmin = i + 1;
        }
    }
    let len = word.len();
    word.rotate_left(argmin % len);
    word.pop();
    word
}

pub fn sample_ncmatching_with<R: rand::Rng>(n: usize, rng: &mut R) -> NcMatching {
    NcMatching::from_word(&sample_word(n, rng)).expect("cycle lemma yields a balanced word")
}

/// Uniform non-crossing matching of `2n` points, deterministic in `seed`.
pub fn sample_ncmatching(n: usize, seed: u64) -> NcMatching {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ncmatching_with(n, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(n: usize) -> Vec<NcMatching> {
        // every sequence of 2n bits, filtered by balance
        let mut out = Vec::new();
        for bits in 0u32..(1 << (2 * n)) {
            let word: Vec<bool> = (0..2 * n).rev().map(|i| bits >> i & 1 == 0).collect();
            if let Ok(m) = NcMatching::from_word(&word) {
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(5).unwrap(), 42);
        assert_eq!(catalan(8).unwrap(), 1430);
        assert_eq!(
            catalan_big(30).to_string(),
            catalan(30).unwrap().to_string()
        );
        assert!(catalan(200).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 0..=6 {
            let listed: Vec<_> = enumerate_ncmatchings(n).collect();
            let mut brute = brute_force(n);
            assert_eq!(listed.len() as u128, catalan(n).unwrap());
            // brute force visits words in the same lexicographic order
            assert_eq!(listed, std::mem::take(&mut brute));
        }
        let one: Vec<_> = enumerate_ncmatchings(1).collect();
        assert_eq!(one, vec![NcMatching::from_pairs(&[(0, 1)]).unwrap()]);
        assert_eq!(enumerate_ncmatchings(8).count(), 1430);
    }

    #[test]
    fn crossing_checks() {
        let crossing = [2, 3, 0, 1];
        assert!(!is_noncrossing(&crossing, Order::Linear).unwrap());
        assert!(!is_noncrossing(&crossing, Order::Cyclic).unwrap());
        assert!(is_noncrossing(&[3, 2, 1, 0], Order::Linear).unwrap());
        assert_eq!(
            is_noncrossing(&[0, 1], Order::Linear),
            Err(MatchingError::FixedPoint(0))
        );
        assert!(is_noncrossing(&[1, 2, 0], Order::Linear).is_err());
    }

    #[test]
    fn text_format() {
        let m: NcMatching = "1-4,2-3".parse().unwrap();
        assert_eq!(m.mates(), &[3, 2, 1, 0]);
        assert_eq!(m.to_string(), "1-4,2-3");
        assert!("1-3,2-4".parse::<NcMatching>().is_err());
        assert!("0-1".parse::<NcMatching>().is_err());
        assert_eq!("".parse::<NcMatching>().unwrap(), NcMatching::empty());
    }

    #[test]
    fn sampler_basics() {
        for seed in 0..20 {
            assert_eq!(sample_ncmatching(1, seed).mates(), &[1, 0]);
            let m = sample_ncmatching(7, seed);
            assert!(is_noncrossing(m.mates(), Order::Linear).unwrap());
        }
        assert_eq!(sample_ncmatching(10, 3), sample_ncmatching(10, 3));
    }
}
