//! Parameter classification along the symmetric family.
//!
//! The polynomials `Q_i(β) = β^{i+1} - 2β^i + 1` have a unique root `ε_i` in
//! `(1,2)` for `i ≥ 2`; together with `ε_1 = √2` they partition `[√2, 2]`.
//! The kneading invariant of `F_β` equals `((10^i)^∞, (01^i)^∞)` exactly at
//! `β = ε_i`, and for `β ∈ (ε_i, ε_{i+1})` the upper kneading sequence is
//! sandwiched between `(10^{i+1})^∞` and `(10^i)^∞`. That sandwich is what
//! `classify_beta` certifies, and the lexicographic monotonicity of `η+(β)`
//! is what `beta_from_kneading` bisects on.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::maps::{symmetric_beta, MapError};
use crate::symbolic::{is_admissible_pair, lex_compare, member_of_subshift, SymbolStream, Word};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("beta = {0} outside the required range")]
    BetaOutOfRange(f64),
    #[error("index {0} out of range: {1}")]
    BadIndex(usize, &'static str),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("no beta realizes the target kneading prefix (matched {matched} of {requested})")]
    NonRealizable { matched: usize, requested: usize },
}

/// `Q_i(β) = β^{i+1} - 2β^i + 1`, evaluated in the factored form
/// `β^i(β-2) + 1` for stability near `β = 2`.
pub fn q_poly(i: usize, beta: f64) -> f64 {
    beta.powi(i as i32) * (beta - 2.0) + 1.0
}

/// The unique root `ε_i` of `Q_i` in `(1,2)`; `ε_1 = √2` by definition.
pub fn epsilon(i: usize) -> f64 {
    assert!(i >= 1, "epsilon is defined for i >= 1");
    EpsilonLadder::new(i).get(i)
}

/// The roots `ε_1..ε_imax`, computed once and shared read-only.
///
/// For `i ≥ 2` each root is bracketed in `(ε_{i-1}, 2)` and bisected to
/// below `1e-13`, mirroring the inductive bracket that proves uniqueness.
#[derive(Debug, Clone)]
pub struct EpsilonLadder {
    values: Vec<f64>,
}

impl EpsilonLadder {
    pub fn new(imax: usize) -> Self {
        assert!(imax >= 1);
        let mut values = Vec::with_capacity(imax);
        let mut prev = 2.0_f64.sqrt();
        values.push(prev);
        for i in 2..=imax {
            let mut lo = prev;
            let mut hi = 2.0;
            // Q_i(lo) < 0 < Q_i(2) on the inductive bracket.
            for _ in 0..200 {
                if hi - lo < 1e-15 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if q_poly(i, mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            prev = 0.5 * (lo + hi);
            values.push(prev);
        }
        EpsilonLadder { values }
    }

    pub fn imax(&self) -> usize {
        self.values.len()
    }

    /// `ε_i` (1-based).
    pub fn get(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The dyadic-root ladder `β_i = 2^(1/2^i)`, `i = 0..=imax`, built by
/// iterated square roots so that `β_i² = β_{i-1}` to machine accuracy.
#[derive(Debug, Clone)]
pub struct BetaLadder {
    values: Vec<f64>,
}

impl BetaLadder {
    pub fn new(imax: usize) -> Self {
        let mut values = Vec::with_capacity(imax + 1);
        let mut b = 2.0_f64;
        values.push(b);
        for _ in 1..=imax {
            b = b.sqrt();
            values.push(b);
        }
        BetaLadder { values }
    }

    pub fn imax(&self) -> usize {
        self.values.len() - 1
    }

    /// `β_i` (0-based; `β_0 = 2`).
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Where a parameter sits relative to the ε-ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaClass {
    /// `β < √2`: the renormalizable range, below the ladder.
    BelowSqrt2,
    /// `|β - ε_i| < tol`.
    AtEpsilon { i: usize, epsilon: f64 },
    /// `β ∈ (ε_i, ε_{i+1})`, with the kneading sandwich as certificate. When
    /// `i` equals the ladder depth the upper bound is the limit value 2.
    Between {
        i: usize,
        epsilon_lo: f64,
        epsilon_hi: f64,
        certificate: SandwichCertificate,
    },
}

/// The verified inequalities `(10^{i+1})^∞ ≺ η+ ≺ (10^i)^∞` (compared over a
/// finite kneading prefix of `η+`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCertificate {
    pub lower_word: SymbolStream,
    pub upper_word: SymbolStream,
    pub eta_plus_prefix: String,
    pub lower_strict: bool,
    pub upper_strict: bool,
}

/// Default tolerance for the "exactly at `ε_i`" classification.
pub const AT_EPSILON_TOL: f64 = 1e-12;

/// Locates `β` against the ε-ladder and produces a kneading certificate.
pub fn classify_beta(
    beta: f64,
    ladder: &EpsilonLadder,
    at_tol: f64,
) -> Result<BetaClass, ClassifyError> {
    if !(1.0 < beta && beta <= 2.0) {
        return Err(ClassifyError::BetaOutOfRange(beta));
    }
    for (idx, &eps) in ladder.values().iter().enumerate() {
        if (beta - eps).abs() < at_tol {
            return Ok(BetaClass::AtEpsilon {
                i: idx + 1,
                epsilon: eps,
            });
        }
    }
    if beta < ladder.get(1) {
        return Ok(BetaClass::BelowSqrt2);
    }
    // Largest i with epsilon_i < beta.
    let mut i = 1;
    for idx in (1..=ladder.imax()).rev() {
        if ladder.get(idx) < beta {
            i = idx;
            break;
        }
    }
    let epsilon_hi = if i < ladder.imax() {
        ladder.get(i + 1)
    } else {
        2.0
    };

    let prefix_len = 64;
    let eta = symmetric_beta(beta)?.kneading(prefix_len)?;
    let eta_prefix = eta
        .plus
        .prefix(prefix_len)
        .expect("kneading computed to prefix_len");
    // Compare the finite prefix against the periodic bounds by embedding it
    // with the extreme 0^∞ / 1^∞ continuations.
    let as_low = SymbolStream::new(eta_prefix.symbols().to_vec(), vec![0]).expect("valid");
    let as_high = SymbolStream::new(eta_prefix.symbols().to_vec(), vec![1]).expect("valid");
    let lower = SymbolStream::periodic(&Word::one_zeros(i + 1));
    let upper = SymbolStream::periodic(&Word::one_zeros(i));
    let lower_strict = lex_compare(&lower, &as_high) == Ordering::Less;
    let upper_strict = lex_compare(&as_low, &upper) == Ordering::Less;
    Ok(BetaClass::Between {
        i,
        epsilon_lo: ladder.get(i),
        epsilon_hi,
        certificate: SandwichCertificate {
            lower_word: lower,
            upper_word: upper,
            eta_plus_prefix: eta_prefix.to_string(),
            lower_strict,
            upper_strict,
        },
    })
}

/// Target for kneading-based parameter recovery.
#[derive(Debug, Clone)]
pub enum KneadingTarget {
    /// An exact eventually periodic sequence.
    Stream(SymbolStream),
    /// A finite prefix, e.g. measured from a flow.
    Prefix(Word),
}

impl KneadingTarget {
    fn symbol(&self, i: usize) -> Option<u8> {
        match self {
            KneadingTarget::Stream(s) => Some(s.symbol(i)),
            KneadingTarget::Prefix(w) => (i < w.len()).then(|| w.symbol(i)),
        }
    }

    fn first_symbol(&self) -> u8 {
        self.symbol(0).expect("nonempty")
    }
}

/// Result of [`beta_from_kneading`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaFit {
    pub beta: f64,
    /// Symbols of the target matched by the kneading at the returned `β`.
    pub matched_len: usize,
    /// Final bisection bracket width.
    pub bracket: f64,
}

/// Recovers `β` from (a prefix of) the upper kneading sequence by bisection
/// on `(1,2]`, using the validated lexicographic monotonicity of `η+(β)`.
///
/// Comparison uses `prefix_len` symbols and extends to at most 64 on ties.
/// The achieved matching prefix length is reported; a target no `β` can
/// match beyond half the requested prefix is rejected as non-realizable.
pub fn beta_from_kneading(
    target: &KneadingTarget,
    prefix_len: usize,
) -> Result<BetaFit, ClassifyError> {
    assert!(
        (1..=64).contains(&prefix_len),
        "prefix_len must be in 1..=64"
    );
    if target.first_symbol() != 1 {
        return Err(ClassifyError::NonRealizable {
            matched: 0,
            requested: prefix_len,
        });
    }
    let avail = match target {
        KneadingTarget::Stream(_) => 64,
        KneadingTarget::Prefix(w) => w.len().min(64),
    };
    let cmp_len = prefix_len.min(avail);

    // η+(β) is non-increasing in β, so η+(mid) ≻ target means mid is too
    // small. Ties extend the comparison and then shrink the upper end, which
    // converges to the lower edge of the tie window.
    let compare_at = |beta: f64, len: usize| -> Result<Ordering, ClassifyError> {
        let k = symmetric_beta(beta)?.kneading(len)?;
        for i in 0..len {
            let Some(t) = target.symbol(i) else {
                return Ok(Ordering::Equal);
            };
            let Some(e) = k.plus.symbol(i) else {
                return Ok(Ordering::Equal);
            };
            match e.cmp(&t) {
                Ordering::Equal => continue,
                other => return Ok(other),
            }
        }
        Ok(Ordering::Equal)
    };

    let matched_at = |beta: f64| -> Result<usize, ClassifyError> {
        let k = symmetric_beta(beta)?.kneading(avail)?;
        let mut matched = 0;
        for i in 0..avail {
            match (target.symbol(i), k.plus.symbol(i)) {
                (Some(t), Some(e)) if t == e => matched += 1,
                _ => break,
            }
        }
        Ok(matched)
    };

    let mut lo = 1.0 + 1e-9;
    let mut hi = 2.0;
    let mut tie: Option<f64> = None;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let mut ord = compare_at(mid, cmp_len)?;
        if ord == Ordering::Equal && avail > cmp_len {
            ord = compare_at(mid, avail)?;
        }
        match ord {
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
            Ordering::Equal => {
                tie = Some(mid);
                hi = mid;
            }
        }
    }
    // The equality window can be narrower than the final bracket, so pick
    // the candidate that actually matches the most symbols.
    let mut best = (0.5 * (lo + hi), matched_at(0.5 * (lo + hi))?);
    for candidate in [Some(lo), Some(hi), tie].into_iter().flatten() {
        let m = matched_at(candidate)?;
        if m > best.1 {
            best = (candidate, m);
        }
    }
    let (beta, matched) = best;
    if matched < cmp_len / 2 {
        return Err(ClassifyError::NonRealizable {
            matched,
            requested: cmp_len,
        });
    }
    Ok(BetaFit {
        beta,
        matched_len: matched,
        bracket: hi - lo,
    })
}

/// Counts from a sampled verification of `Σ_{F_{ε_i}} ⊂ Σ_{F_β} ⊂
/// Σ_{F_{ε_{i+1}}}` for `β ∈ (ε_i, ε_{i+1})`.
#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub i: usize,
    pub samples: usize,
    /// Streams sampled from `Σ_{F_{ε_i}}` realized as periodic orbits of `F_β`.
    pub lower_pass: usize,
    /// Orbit itineraries of `F_β` accepted by `Σ_{F_{ε_{i+1}}}`.
    pub upper_pass: usize,
    pub upper_total: usize,
}

/// Samples the two inclusions of the subshift nesting around `β`.
///
/// The lower inclusion is certified constructively: periodic sequences with
/// maximal runs ≤ i (exactly the periodic members of `Σ_{F_{ε_i}}`) must be
/// realized as periodic orbits of `F_β`. The upper inclusion checks the
/// itineraries of actual periodic orbits of `F_β` against the exact kneading
/// pair of `F_{ε_{i+1}}`.
pub fn subshift_inclusion_certificate(
    beta: f64,
    i: usize,
    samples: usize,
    seed: u64,
    ladder: &EpsilonLadder,
) -> Result<InclusionReport, ClassifyError> {
    if i < 1 || i + 1 > ladder.imax() {
        return Err(ClassifyError::BadIndex(
            i,
            "need epsilon_i and epsilon_{i+1} on the ladder",
        ));
    }
    let (eps_lo, eps_hi) = (ladder.get(i), ladder.get(i + 1));
    if !(eps_lo < beta && beta < eps_hi) {
        return Err(ClassifyError::BetaOutOfRange(beta));
    }
    let map = symmetric_beta(beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut lower_pass = 0;
    for _ in 0..samples {
        let word = random_bounded_run_word(&mut rng, i, 12);
        // Realizing the periodic word as an orbit of F_beta certifies
        // membership; a critical collision still certifies the symbol
        // sequence (the orbit exists as the critical orbit itself).
        match map.point_from_itinerary(&word) {
            Ok(_) | Err(crate::maps::OrbitRejection::CriticalCollision) => lower_pass += 1,
            Err(crate::maps::OrbitRejection::OrbitMismatch) => {}
        }
    }

    let upper_plus = SymbolStream::periodic(&Word::one_zeros(i + 1));
    let upper_minus = upper_plus.mirror();
    debug_assert!(is_admissible_pair(&upper_plus, &upper_minus));
    let orbits = map.periodic_orbits(10);
    let mut upper_pass = 0;
    let mut upper_total = 0;
    for orbit in orbits.iter().take(samples) {
        upper_total += 1;
        let xi = SymbolStream::periodic(&orbit.word);
        if member_of_subshift(&xi, &upper_plus, &upper_minus) {
            upper_pass += 1;
        }
    }
    Ok(InclusionReport {
        i,
        samples,
        lower_pass,
        upper_pass,
        upper_total,
    })
}

/// A random cyclic word whose maximal runs (wrapping around) are ≤ `max_run`:
/// precisely the periodic members of `Σ_{F_{ε_{max_run}}}`.
fn random_bounded_run_word(rng: &mut ChaCha8Rng, max_run: usize, max_blocks: usize) -> Word {
    let blocks = rng.gen_range(1..=max_blocks);
    let mut bits = Vec::new();
    for _ in 0..blocks {
        let zeros = rng.gen_range(1..=max_run);
        let ones = rng.gen_range(1..=max_run);
        bits.extend(std::iter::repeat_n(0u8, zeros));
        bits.extend(std::iter::repeat_n(1u8, ones));
    }
    Word::new(bits).expect("at least one block")
}
