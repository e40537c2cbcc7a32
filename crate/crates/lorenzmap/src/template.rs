//! Word and braid combinatorics of Lorenz templates.
//!
//! Periodic orbits of the semiflow on a two-strip Lorenz template biject
//! with primitive cyclic binary words: the orbit of the doubling map with
//! itinerary `w` consists of the rationals `k/(2^n - 1)` obtained by reading
//! the rotations of `w` in binary. Ordering those points along the branch
//! line and following one doubling step yields the orbit's permutation; on
//! the standard `L(0,0)` template the strands cross positively and the
//! closure of the resulting positive braid is the knot carried by the orbit.
//! `L(k,k)` adds `k/2` full twists on each strip's strand bundle. All
//! arithmetic here is exact (odd-denominator rationals as integers).

use serde::Serialize;
use thiserror::Error;

use crate::symbolic::Word;

#[derive(Debug, Error, PartialEq)]
pub enum TemplateError {
    #[error("word must be primitive (not a power of a shorter word)")]
    NotPrimitive,
    #[error("template parameters must satisfy m = n with m even (got L({0},{1}))")]
    UnsupportedTwists(i64, i64),
    #[error("period {0} exceeds the enumeration bound {1}")]
    PeriodTooLarge(usize, usize),
}

/// A primitive cyclic binary word in canonical (lexicographically least)
/// rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LorenzWord(#[serde(serialize_with = "ser_word")] Word);

fn ser_word<S: serde::Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(w)
}

impl LorenzWord {
    pub fn new(w: &Word) -> Result<Self, TemplateError> {
        if !w.is_primitive() {
            return Err(TemplateError::NotPrimitive);
        }
        let canonical = (0..w.len())
            .map(|k| w.rotate(k))
            .min()
            .expect("word is nonempty");
        Ok(LorenzWord(canonical))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn period(&self) -> usize {
        self.0.len()
    }
}

impl std::fmt::Display for LorenzWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Half-twist counts of the two strips of an `L(m,n)` template. The
/// constructions here support `m = n` even (the symmetric case realized on
/// the attractor) including `(0,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TemplateSpec {
    pub m: i64,
    pub n: i64,
}

impl TemplateSpec {
    pub fn new(m: i64, n: i64) -> Result<Self, TemplateError> {
        if m != n || m % 2 != 0 {
            return Err(TemplateError::UnsupportedTwists(m, n));
        }
        Ok(TemplateSpec { m, n })
    }

    pub fn standard() -> Self {
        TemplateSpec { m: 0, n: 0 }
    }
}

/// A full-twist block on a consecutive strand bundle, kept symbolic so long
/// braids stay readable; `expand` turns it into generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistBlock {
    /// First strand of the bundle (1-based).
    pub first: usize,
    /// Number of strands in the bundle.
    pub count: usize,
    /// Signed number of full twists.
    pub full_twists: i64,
}

impl TwistBlock {
    /// Generator sequence of the block: a full twist on `count` strands is
    /// `(σ_first … σ_{first+count-2})^count`, negated for negative twists.
    pub fn expand(&self) -> Vec<i64> {
        if self.count < 2 || self.full_twists == 0 {
            return Vec::new();
        }
        let pass: Vec<i64> = (self.first..self.first + self.count - 1)
            .map(|i| i as i64)
            .collect();
        let mut out = Vec::new();
        for _ in 0..self.count * self.full_twists.unsigned_abs() as usize {
            out.extend_from_slice(&pass);
        }
        if self.full_twists < 0 {
            for g in &mut out {
                *g = -*g;
            }
        }
        out
    }
}

/// A braid on `strands` strands: signed generators (`+i` is the positive
/// crossing σ_i) followed by symbolic twist blocks.
#[derive(Debug, Clone, Serialize)]
pub struct BraidWord {
    pub strands: usize,
    pub generators: Vec<i64>,
    pub twists: Vec<TwistBlock>,
    /// Strand permutation of the template return map: strand at position
    /// `i` (0-based) ends at `permutation[i]`.
    pub permutation: Vec<usize>,
}

impl BraidWord {
    pub fn is_positive(&self) -> bool {
        self.generators.iter().all(|&g| g > 0) && self.twists.iter().all(|t| t.full_twists >= 0)
    }

    /// Generators with twist blocks expanded.
    pub fn expanded(&self) -> Vec<i64> {
        let mut out = self.generators.clone();
        for t in &self.twists {
            out.extend(t.expand());
        }
        out
    }

    /// Permutation induced by the expanded generator word.
    pub fn induced_permutation(&self) -> Vec<usize> {
        let mut positions: Vec<usize> = (0..self.strands).collect();
        for g in self.expanded() {
            let i = g.unsigned_abs() as usize - 1;
            positions.swap(i, i + 1);
        }
        // positions[p] = strand occupying position p at the bottom; invert
        // to get where each strand ends.
        let mut out = vec![0; self.strands];
        for (p, &strand) in positions.iter().enumerate() {
            out[strand] = p;
        }
        out
    }
}

/// All primitive binary necklaces of the given period, canonical rotations,
/// sorted (the Lyndon words of that length).
pub fn enumerate_lorenz_words(period: usize) -> Result<Vec<LorenzWord>, TemplateError> {
    if period > 16 {
        return Err(TemplateError::PeriodTooLarge(period, 16));
    }
    let mut out: Vec<LorenzWord> = crate::maps::lyndon_words(period)
        .into_iter()
        .filter(|w| w.len() == period)
        .map(|bits| LorenzWord(Word::new(bits).expect("nonempty")))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Number of maximal blocks of 1s in the cyclic word.
pub fn trip_number(w: &LorenzWord) -> usize {
    let bits = w.0.symbols();
    let n = bits.len();
    if bits.iter().all(|&s| s == 1) {
        return 1;
    }
    (0..n)
        .filter(|&i| bits[i] == 1 && bits[(i + n - 1) % n] == 0)
        .count()
}

/// Exact doubling-map orbit of the word: the point of rotation `j` is
/// `int(w_j w_{j+1} … w_{j+n-1}) / (2^n - 1)`.
fn orbit_numerators(w: &Word) -> Vec<u64> {
    let n = w.len();
    (0..n)
        .map(|j| {
            let mut v: u64 = 0;
            for t in 0..n {
                v = (v << 1) | u64::from(w.symbol((j + t) % n));
            }
            v
        })
        .collect()
}

/// The braid of the orbit `w` on the template `spec`.
///
/// On `L(0,0)` the strand order is the branch-line order of the exact
/// doubling-map orbit; one template period permutes the strands by the
/// doubling action, the left (0-symbol) bundle passing to the left block and
/// the right bundle to the right block with all crossings positive. For
/// `L(k,k)` each strip's bundle additionally receives `k/2` full twists.
pub fn lorenz_braid(w: &LorenzWord, spec: TemplateSpec) -> Result<BraidWord, TemplateError> {
    let word = &w.0;
    let n = word.len();
    let numerators = orbit_numerators(word);
    // Branch-line order: ranks of the orbit points.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| numerators[j]);
    let mut rank = vec![0usize; n];
    for (pos, &j) in order.iter().enumerate() {
        rank[j] = pos;
    }
    // Doubling sends rotation j to rotation j+1.
    let permutation: Vec<usize> = order.iter().map(|&j| rank[(j + 1) % n]).collect();

    // Positive permutation braid: bubble-sort the target arrangement,
    // emitting one positive generator per adjacent transposition.
    let mut arr = permutation.clone();
    let mut generators = Vec::new();
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 0..n.saturating_sub(1) {
            if arr[i] > arr[i + 1] {
                arr.swap(i, i + 1);
                generators.push((i + 1) as i64);
                swapped = true;
            }
        }
    }

    let zeros = word.symbols().iter().filter(|&&s| s == 0).count();
    let mut twists = Vec::new();
    if spec.m != 0 {
        let per_strip = spec.m / 2;
        if zeros >= 2 {
            twists.push(TwistBlock {
                first: 1,
                count: zeros,
                full_twists: per_strip,
            });
        }
        if n - zeros >= 2 {
            twists.push(TwistBlock {
                first: zeros + 1,
                count: n - zeros,
                full_twists: per_strip,
            });
        }
    }
    Ok(BraidWord {
        strands: n,
        generators,
        twists,
        permutation,
    })
}
