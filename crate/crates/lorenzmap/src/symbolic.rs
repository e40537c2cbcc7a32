//! Finite binary words and eventually periodic one-sided sequences.
//!
//! Kneading sequences and itineraries of expanding Lorenz maps live in
//! `{0,1}^ℕ` with the lexicographic order. Everything this crate ever needs
//! to compare is eventually periodic, so a sequence is stored in canonical
//! `preperiod|period` form: the period is primitive (not a proper power) and
//! the preperiod is minimal (its last symbol cannot be absorbed into the
//! period). Canonical form makes equality structural and every comparison
//! decidable by a finite scan.
//!
//! The text form used by the CLI and JSON outputs is `pre|per`, e.g. `10|01`
//! for 10(01)^∞ and `|100` for (100)^∞.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("word must be nonempty")]
    EmptyWord,
    #[error("symbol {0} is not 0 or 1")]
    BadSymbol(u8),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("cannot parse {0:?} as a symbol stream (expected e.g. \"10|01\")")]
    Parse(String),
}

/// A finite sequence over `{0,1}` of length ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self, SymbolError> {
        if symbols.is_empty() {
            return Err(SymbolError::EmptyWord);
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s > 1) {
            return Err(SymbolError::BadSymbol(bad));
        }
        Ok(Word(symbols))
    }

    /// Builds a word from bits without allocation checks; panics on invalid input.
    pub fn from_bits(bits: &[u8]) -> Self {
        Word::new(bits.to_vec()).expect("valid word")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn symbol(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn mirror(&self) -> Word {
        Word(self.0.iter().map(|&s| 1 - s).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        assert!(times >= 1);
        Word(self.0.repeat(times))
    }

    /// Cyclic rotation by `k` places (symbol `k` becomes symbol 0).
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.0.len();
        let k = k % n;
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// True when the word is not a proper power of a shorter word.
    pub fn is_primitive(&self) -> bool {
        primitive_root_len(&self.0) == self.0.len()
    }

    /// Length of the shortest word this one is a power of.
    pub fn primitive_root_len(&self) -> usize {
        primitive_root_len(&self.0)
    }

    /// The word `1 0^i` (the building block of the ε-ladder kneadings).
    pub fn one_zeros(i: usize) -> Word {
        let mut v = vec![1u8];
        v.extend(std::iter::repeat_n(0, i));
        Word(v)
    }

    /// The word `A_s = 0^s 1` from rotation theory.
    pub fn a_block(s: usize) -> Word {
        let mut v = vec![0u8; s];
        v.push(1);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => v.push(0),
                '1' => v.push(1),
                _ => return Err(SymbolError::Parse(s.to_string())),
            }
        }
        Word::new(v)
    }
}

fn primitive_root_len(w: &[u8]) -> usize {
    let n = w.len();
    'outer: for d in 1..=n / 2 {
        if !n.is_multiple_of(d) {
            continue;
        }
        for i in d..n {
            if w[i] != w[i - d] {
                continue 'outer;
            }
        }
        return d;
    }
    n
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// An eventually periodic one-sided binary sequence in canonical form.
///
/// The sequence is `pre · (per)^∞`. Canonical form: `per` is primitive and
/// the last symbol of `pre` differs from the last symbol of `per`, so two
/// streams are equal as infinite sequences iff they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolStream {
    pre: Vec<u8>,
    per: Vec<u8>,
}

impl SymbolStream {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self, SymbolError> {
        if period.is_empty() {
            return Err(SymbolError::EmptyPeriod);
        }
        for &s in preperiod.iter().chain(period.iter()) {
            if s > 1 {
                return Err(SymbolError::BadSymbol(s));
            }
        }
        let mut stream = SymbolStream {
            pre: preperiod,
            per: period,
        };
        stream.canonicalize();
        Ok(stream)
    }

    /// The purely periodic stream `(w)^∞`.
    pub fn periodic(w: &Word) -> Self {
        SymbolStream::new(Vec::new(), w.symbols().to_vec()).expect("word is valid")
    }

    /// The stream `pre · (per)^∞`.
    pub fn eventually(pre: &Word, per: &Word) -> Self {
        SymbolStream::new(pre.symbols().to_vec(), per.symbols().to_vec()).expect("words are valid")
    }

    fn canonicalize(&mut self) {
        let root = primitive_root_len(&self.per);
        self.per.truncate(root);
        while let (Some(&p), Some(&q)) = (self.pre.last(), self.per.last()) {
            if p != q {
                break;
            }
            // pre·(q0..qk)^∞ with p == qk rewrites as shorter pre·(qk q0..q{k-1})^∞.
            self.per.rotate_right(1);
            self.pre.pop();
        }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.per
    }

    /// Symbol at position `n` (0-based).
    pub fn symbol(&self, n: usize) -> u8 {
        if n < self.pre.len() {
            self.pre[n]
        } else {
            self.per[(n - self.pre.len()) % self.per.len()]
        }
    }

    /// The first `n` symbols as a word (requires `n ≥ 1`).
    pub fn prefix(&self, n: usize) -> Word {
        Word::new((0..n).map(|i| self.symbol(i)).collect()).expect("n >= 1")
    }

    /// Number of distinct tails `σ^n`, `n ≥ 0`.
    pub fn tail_count(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    /// Drops the first `n` symbols and re-canonicalizes.
    pub fn shift(&self, n: usize) -> SymbolStream {
        if n <= self.pre.len() {
            SymbolStream::new(self.pre[n..].to_vec(), self.per.clone()).expect("valid")
        } else {
            let k = (n - self.pre.len()) % self.per.len();
            let mut per = self.per.clone();
            per.rotate_left(k);
            SymbolStream::new(Vec::new(), per).expect("valid")
        }
    }

    /// Flips every symbol `0 ↔ 1`.
    pub fn mirror(&self) -> SymbolStream {
        SymbolStream {
            pre: self.pre.iter().map(|&s| 1 - s).collect(),
            per: self.per.iter().map(|&s| 1 - s).collect(),
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }
}

impl fmt::Display for SymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.pre {
            write!(f, "{}", s)?;
        }
        write!(f, "|")?;
        for &s in &self.per {
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

impl FromStr for SymbolStream {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pre, per) = s
            .split_once('|')
            .ok_or_else(|| SymbolError::Parse(s.to_string()))?;
        let parse = |txt: &str| -> Result<Vec<u8>, SymbolError> {
            txt.chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(SymbolError::Parse(s.to_string())),
                })
                .collect()
        };
        SymbolStream::new(parse(pre)?, parse(per)?)
    }
}

impl Serialize for SymbolStream {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SymbolStream {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Lexicographic order of the infinite sequences.
///
/// Disagreement, if any, shows up within `|pre_a| + |pre_b| + lcm(|per_a|,
/// |per_b|) + 1` symbols; beyond that horizon the streams are equal by the
/// pigeonhole principle.
pub fn lex_compare(a: &SymbolStream, b: &SymbolStream) -> Ordering {
    let horizon = a.pre.len() + b.pre.len() + lcm(a.per.len(), b.per.len()) + 1;
    for n in 0..horizon {
        match a.symbol(n).cmp(&b.symbol(n)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl PartialOrd for SymbolStream {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SymbolStream {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

/// The kneading-invariant admissibility condition.
///
/// A pair `(η+, η-)` is admissible iff for all `n ≥ 1`
///
/// ```text
/// σ(η+) ≼ σⁿ(η+) ≺ σ(η-)   and   σ(η+) ≺ σⁿ(η-) ≼ σ(η-).
/// ```
///
/// Both streams are eventually periodic so only finitely many distinct
/// shifts exist and the check terminates.
pub fn is_admissible_pair(eta_plus: &SymbolStream, eta_minus: &SymbolStream) -> bool {
    let lo = eta_plus.shift(1);
    let hi = eta_minus.shift(1);
    for n in 1..=eta_plus.tail_count() {
        let t = eta_plus.shift(n);
        if lex_compare(&lo, &t) == Ordering::Greater || lex_compare(&t, &hi) != Ordering::Less {
            return false;
        }
    }
    for n in 1..=eta_minus.tail_count() {
        let t = eta_minus.shift(n);
        if lex_compare(&lo, &t) != Ordering::Less || lex_compare(&t, &hi) == Ordering::Greater {
            return false;
        }
    }
    true
}

/// Membership of `ξ` in the subshift `Σ_F` described by the kneading pair:
/// `σ(η+) ≼ σⁿ(ξ) ≼ σ(η-)` for all `n ≥ 0`.
pub fn member_of_subshift(
    xi: &SymbolStream,
    eta_plus: &SymbolStream,
    eta_minus: &SymbolStream,
) -> bool {
    let lo = eta_plus.shift(1);
    let hi = eta_minus.shift(1);
    for n in 0..xi.tail_count() {
        let t = xi.shift(n);
        if lex_compare(&lo, &t) == Ordering::Greater || lex_compare(&t, &hi) == Ordering::Greater {
            return false;
        }
    }
    true
}

/// Bounded membership check against a kneading pair known only through
/// finite prefixes: every tail of `ξ` is compared with both prefixes out to
/// `prefix.len()` symbols. Returns `false` on a definite violation; agreement
/// through a whole prefix counts as passing at this horizon.
pub fn member_of_subshift_prefix(xi: &SymbolStream, lo_prefix: &Word, hi_prefix: &Word) -> bool {
    let cmp_prefix = |tail: &SymbolStream, w: &Word| -> Ordering {
        for i in 0..w.len() {
            match tail.symbol(i).cmp(&w.symbol(i)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    };
    for n in 0..xi.tail_count() {
        let t = xi.shift(n);
        if cmp_prefix(&t, lo_prefix) == Ordering::Less
            || cmp_prefix(&t, hi_prefix) == Ordering::Greater
        {
            return false;
        }
    }
    true
}
