//! Piecewise-affine expanding Lorenz maps and their symbolic data.
//!
//! An expanding Lorenz map has two increasing affine branches on `[0,c)` and
//! `(c,1]` with `F(c+) = 0`, `F(c-) = 1` and both slopes above 1. The value
//! at `c` itself is never used two-sidedly: only the sided points `(c,+)` and
//! `(c,-)` exist, and evaluation propagates the side tag through the
//! increasing branches. Orbits of `(c,+)` and `(c,-)` are the upper and lower
//! kneading sequences.
//!
//! `point_from_itinerary` is the brute-force oracle used throughout the
//! crate: composing the affine branches along a word `w` gives
//! `F^n(x) = S·x + C` with `S > 1`, so the unique candidate periodic point
//! is `C/(1-S)`, which is then validated against the word.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::symbolic::{SymbolStream, Word};

/// Critical-tie tolerance: orbit points closer to `c` than this require a
/// side tag.
pub const TIE_TOL: f64 = 1e-12;

/// Orbit points closer to `c` than this make `point_from_itinerary` report a
/// critical collision instead of accepting the orbit.
pub const VALIDATION_MARGIN: f64 = 1e-9;

/// Recurrence tolerance for certifying eventual periodicity of kneading
/// orbits.
pub const RECURRENCE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("not an expanding Lorenz map: {0}")]
    BadMap(String),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("point {0} lies outside [0,1]")]
    OutOfRange(f64),
    #[error("point within {TIE_TOL} of the critical point requires a side tag")]
    TieWithoutSide,
}

/// Rejection reasons for `point_from_itinerary`. A critical collision signals
/// a bifurcation boundary: the candidate orbit runs through the critical
/// point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OrbitRejection {
    #[error("orbit does not realize the word")]
    OrbitMismatch,
    #[error("orbit passes within the validation margin of the critical point")]
    CriticalCollision,
}

/// Which one-sided limit a point on (or near) the critical point refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Plus,
    Minus,
    None,
}

/// A point of `[0,1]` with a one-sided tag, meaningful near the critical
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidedPoint {
    pub x: f64,
    pub side: Side,
}

impl SidedPoint {
    pub fn plain(x: f64) -> Self {
        SidedPoint {
            x,
            side: Side::None,
        }
    }

    pub fn plus(x: f64) -> Self {
        SidedPoint {
            x,
            side: Side::Plus,
        }
    }

    pub fn minus(x: f64) -> Self {
        SidedPoint {
            x,
            side: Side::Minus,
        }
    }
}

/// Tag describing which family a map was built from; carried for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Generic,
    Beta { beta: f64, alpha: f64 },
    SymmetricBeta { beta: f64 },
    TwoSlope { s: f64, r: f64 },
}

/// Two increasing affine branches with the Lorenz normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandingLorenzMap {
    slope_left: f64,
    offset_left: f64,
    slope_right: f64,
    offset_right: f64,
    critical: f64,
    kind: MapKind,
}

impl ExpandingLorenzMap {
    pub fn new(
        slope_left: f64,
        offset_left: f64,
        slope_right: f64,
        offset_right: f64,
        critical: f64,
    ) -> Result<Self, MapError> {
        let map = ExpandingLorenzMap {
            slope_left,
            offset_left,
            slope_right,
            offset_right,
            critical,
            kind: MapKind::Generic,
        };
        map.validate()?;
        Ok(map)
    }

    fn with_kind(mut self, kind: MapKind) -> Self {
        self.kind = kind;
        self
    }

    fn validate(&self) -> Result<(), MapError> {
        let c = self.critical;
        if !(0.0 < c && c < 1.0) {
            return Err(MapError::BadMap(format!("critical point {c} not in (0,1)")));
        }
        if self.slope_left <= 1.0 || self.slope_right <= 1.0 {
            return Err(MapError::BadMap(format!(
                "slopes ({}, {}) must exceed 1",
                self.slope_left, self.slope_right
            )));
        }
        let at_c_minus = self.slope_left * c + self.offset_left;
        if (at_c_minus - 1.0).abs() > 1e-12 {
            return Err(MapError::BadMap(format!(
                "F(c-) = {at_c_minus}, expected 1"
            )));
        }
        let at_c_plus = self.slope_right * c + self.offset_right;
        if at_c_plus.abs() > 1e-12 {
            return Err(MapError::BadMap(format!("F(c+) = {at_c_plus}, expected 0")));
        }
        if self.offset_left < -1e-12 {
            return Err(MapError::BadMap(format!("F(0) = {} < 0", self.offset_left)));
        }
        let at_one = self.slope_right + self.offset_right;
        if at_one > 1.0 + 1e-12 {
            return Err(MapError::BadMap(format!("F(1) = {at_one} > 1")));
        }
        Ok(())
    }

    pub fn critical(&self) -> f64 {
        self.critical
    }

    pub fn slope_left(&self) -> f64 {
        self.slope_left
    }

    pub fn slope_right(&self) -> f64 {
        self.slope_right
    }

    pub fn offset_left(&self) -> f64 {
        self.offset_left
    }

    pub fn offset_right(&self) -> f64 {
        self.offset_right
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// `F(0)`, the left endpoint image.
    pub fn at_zero(&self) -> f64 {
        self.offset_left.max(0.0)
    }

    /// `F(1)`, the right endpoint image.
    pub fn at_one(&self) -> f64 {
        (self.slope_right + self.offset_right).min(1.0)
    }

    /// Overlapping maps satisfy `F(0) < F(1)`.
    pub fn is_overlapping(&self) -> bool {
        self.at_zero() < self.at_one()
    }

    /// Converts to coordinates centered at the critical point.
    ///
    /// In `u = x - c` the branches become `u ↦ slope·u + (1-c)` (left) and
    /// `u ↦ slope·u - c` (right): the offsets are pinned exactly by the
    /// Lorenz normalization, and for the symmetric family (`c = 1/2`, equal
    /// slopes) the update is bit-exactly equivariant under `u ↦ -u`. Orbit
    /// routines therefore stay in `u`-space; working in ambient coordinates
    /// would leak an ulp of asymmetry per step, which the expansion amplifies
    /// past any fixed tolerance within a few dozen iterates.
    fn to_centered(&self, p: SidedPoint) -> Result<(f64, Side), MapError> {
        if !(-1e-12..=1.0 + 1e-12).contains(&p.x) {
            return Err(MapError::OutOfRange(p.x));
        }
        let u = (p.x.clamp(0.0, 1.0) - self.critical).clamp(-self.critical, 1.0 - self.critical);
        Ok((u, p.side))
    }

    fn ambient(&self, u: f64) -> f64 {
        (u + self.critical).clamp(0.0, 1.0)
    }

    fn step_centered(&self, u: f64, side: Side) -> Result<f64, MapError> {
        let c = self.critical;
        let v = if u.abs() <= TIE_TOL {
            match side {
                Side::Plus => -c,
                Side::Minus => 1.0 - c,
                Side::None => return Err(MapError::TieWithoutSide),
            }
        } else if u < 0.0 {
            self.slope_left * u + (1.0 - c)
        } else {
            self.slope_right * u - c
        };
        Ok(v.clamp(-c, 1.0 - c))
    }

    fn symbol_centered(&self, u: f64, side: Side) -> Result<u8, MapError> {
        if u.abs() <= TIE_TOL {
            match side {
                Side::Plus => Ok(1),
                Side::Minus => Ok(0),
                Side::None => Err(MapError::TieWithoutSide),
            }
        } else {
            Ok(u8::from(u > 0.0))
        }
    }

    /// One application of the map with side propagation.
    ///
    /// Within the tie band around `c` the side tag selects the one-sided
    /// limit: `(c,+) ↦ (0,+)` and `(c,-) ↦ (1,-)`. Since both branches are
    /// increasing, the tag is otherwise passed through unchanged.
    pub fn eval(&self, p: SidedPoint) -> Result<SidedPoint, MapError> {
        let (u, side) = self.to_centered(p)?;
        let v = self.step_centered(u, side)?;
        Ok(SidedPoint {
            x: self.ambient(v),
            side,
        })
    }

    /// The first `n` itinerary symbols of `p`: symbol `k` is 1 iff the k-th
    /// iterate lies right of `c` (with side tags breaking exact ties).
    pub fn itinerary(&self, p: SidedPoint, n: usize) -> Result<Word, MapError> {
        assert!(n >= 1, "itinerary length must be at least 1");
        let (mut u, side) = self.to_centered(p)?;
        let mut symbols = Vec::with_capacity(n);
        for _ in 0..n {
            symbols.push(self.symbol_centered(u, side)?);
            u = self.step_centered(u, side)?;
        }
        Ok(Word::new(symbols).expect("n >= 1"))
    }

    /// Itinerary of an untagged point whose orbit may run into the critical
    /// point: on an exact hit the computation forks into the two one-sided
    /// continuations instead of picking one.
    pub fn itinerary_forked(&self, x: f64, n: usize) -> Result<ForkedItinerary, MapError> {
        assert!(n >= 1);
        let (mut u, _) = self.to_centered(SidedPoint::plain(x))?;
        let mut symbols = Vec::with_capacity(n);
        for k in 0..n {
            if u.abs() <= TIE_TOL {
                let rest = n - k;
                let hit = self.ambient(u);
                let plus = self.itinerary(SidedPoint::plus(hit), rest)?;
                let minus = self.itinerary(SidedPoint::minus(hit), rest)?;
                let join = |tail: &Word| {
                    let mut v = symbols.clone();
                    v.extend_from_slice(tail.symbols());
                    Word::new(v).expect("nonempty")
                };
                return Ok(ForkedItinerary::Split {
                    at: k,
                    plus: join(&plus),
                    minus: join(&minus),
                });
            }
            symbols.push(u8::from(u > 0.0));
            u = self.step_centered(u, Side::None)?;
        }
        Ok(ForkedItinerary::Unambiguous(
            Word::new(symbols).expect("n >= 1"),
        ))
    }

    /// The kneading invariant to `n` symbols.
    ///
    /// Each one-sided critical orbit is followed for up to `n` steps; if an
    /// orbit point recurs within [`RECURRENCE_TOL`] the sequence is certified
    /// eventually periodic and returned as an exact stream.
    pub fn kneading(&self, n: usize) -> Result<KneadingInvariant, MapError> {
        assert!(n >= 1);
        Ok(KneadingInvariant {
            plus: self.kneading_side(Side::Plus, n)?,
            minus: self.kneading_side(Side::Minus, n)?,
        })
    }

    fn kneading_side(&self, side: Side, n: usize) -> Result<KneadingSequence, MapError> {
        let mut u = 0.0_f64;
        let mut points: Vec<f64> = Vec::with_capacity(n + 1);
        let mut symbols: Vec<u8> = Vec::with_capacity(n + 1);
        for step in 0..=n {
            for (i, &earlier) in points.iter().enumerate() {
                if (u - earlier).abs() <= RECURRENCE_TOL {
                    let stream = SymbolStream::new(symbols[..i].to_vec(), symbols[i..].to_vec())
                        .expect("period nonempty since i < len");
                    return Ok(KneadingSequence::Stream(stream));
                }
            }
            if step == n {
                break;
            }
            points.push(u);
            symbols.push(self.symbol_centered(u, side)?);
            u = self.step_centered(u, side)?;
        }
        Ok(KneadingSequence::Prefix(
            Word::new(symbols).expect("n >= 1"),
        ))
    }

    /// One-sided critical orbit `F^k(c±)` for `k = 0..=n` (index 0 is `c`).
    pub fn critical_orbit(&self, side: Side, n: usize) -> Result<Vec<f64>, MapError> {
        let mut u = 0.0_f64;
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.ambient(u));
        for _ in 0..n {
            u = self.step_centered(u, side)?;
            out.push(self.ambient(u));
        }
        Ok(out)
    }

    /// Orbit of a sided point in centered coordinates (`u = x - c`), for
    /// checks that need exact mirror symmetry across long orbits.
    pub fn centered_orbit(&self, p: SidedPoint, n: usize) -> Result<Vec<f64>, MapError> {
        let (mut u, side) = self.to_centered(p)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(u);
        for _ in 0..n {
            u = self.step_centered(u, side)?;
            out.push(u);
        }
        Ok(out)
    }

    /// Locates the periodic point realizing `w` as its periodic itinerary.
    ///
    /// Composing the branches along `w` gives the affine map `x ↦ S·x + C`
    /// with `S > 1`; the unique fixed-point candidate `C/(1-S)` is accepted
    /// only if its orbit realizes `w` with every iterate farther than
    /// [`VALIDATION_MARGIN`] from the critical point.
    pub fn point_from_itinerary(&self, w: &Word) -> Result<PeriodicOrbit, OrbitRejection> {
        let c = self.critical;
        let n = w.len();
        // Compose in centered coordinates: left u ↦ sl·u + (1-c), right
        // u ↦ sr·u - c. Every orbit point is computed from its own rotated
        // composition rather than by iterating from u_0: iteration would
        // amplify the initial rounding by the full product of slopes, which
        // already breaks validation for words a few dozen symbols long.
        let compose = |start: usize| -> (f64, f64) {
            let mut scale = 1.0_f64;
            let mut shift = 0.0_f64;
            for k in 0..n {
                let symbol = w.symbol((start + k) % n);
                let (a, b) = if symbol == 0 {
                    (self.slope_left, 1.0 - c)
                } else {
                    (self.slope_right, -c)
                };
                scale *= a;
                shift = a * shift + b;
            }
            (scale, shift)
        };
        let mut orbit_u = Vec::with_capacity(n);
        for start in 0..n {
            let (scale, shift) = compose(start);
            let u = shift / (1.0 - scale);
            if !(-c..=1.0 - c).contains(&u) {
                return Err(OrbitRejection::OrbitMismatch);
            }
            if u.abs() < VALIDATION_MARGIN {
                return Err(OrbitRejection::CriticalCollision);
            }
            if u8::from(u > 0.0) != w.symbol(start) {
                return Err(OrbitRejection::OrbitMismatch);
            }
            orbit_u.push(u);
        }
        // Single-step consistency z_{k+1} = F(z_k), free of amplified drift.
        for k in 0..n {
            let u = orbit_u[k];
            let image = if u < 0.0 {
                self.slope_left * u + (1.0 - c)
            } else {
                self.slope_right * u - c
            };
            if (image - orbit_u[(k + 1) % n]).abs() > 1e-10 {
                return Err(OrbitRejection::OrbitMismatch);
            }
        }
        Ok(PeriodicOrbit {
            word: w.clone(),
            point: self.ambient(orbit_u[0]),
            period: w.primitive_root_len(),
            points: orbit_u.iter().map(|&u| self.ambient(u)).collect(),
        })
    }

    /// All periodic orbits of period ≤ `max_period` by enumerating primitive
    /// binary necklaces (documented cost bound: `max_period ≤ 24`).
    pub fn periodic_orbits(&self, max_period: usize) -> Vec<PeriodicOrbit> {
        assert!(max_period <= 24, "necklace enumeration bound exceeded");
        let mut out: Vec<PeriodicOrbit> = lyndon_words(max_period)
            .into_iter()
            .filter_map(|bits| {
                let w = Word::new(bits).expect("lyndon words are nonempty");
                self.point_from_itinerary(&w).ok()
            })
            .collect();
        out.sort_by(|a, b| {
            (a.period, a.point)
                .partial_cmp(&(b.period, b.point))
                .expect("finite points")
        });
        out
    }
}

impl Serialize for ExpandingLorenzMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ExpandingLorenzMap", 5)?;
        match self.kind {
            MapKind::Generic => {
                st.serialize_field("kind", "generic")?;
                st.serialize_field("beta", &Option::<f64>::None)?;
                st.serialize_field("alpha", &Option::<f64>::None)?;
            }
            MapKind::Beta { beta, alpha } => {
                st.serialize_field("kind", "beta")?;
                st.serialize_field("beta", &beta)?;
                st.serialize_field("alpha", &alpha)?;
            }
            MapKind::SymmetricBeta { beta } => {
                st.serialize_field("kind", "symmetric_beta")?;
                st.serialize_field("beta", &beta)?;
                st.serialize_field("alpha", &(1.0 - beta / 2.0))?;
            }
            MapKind::TwoSlope { .. } => {
                st.serialize_field("kind", "two_slope")?;
                st.serialize_field("beta", &Option::<f64>::None)?;
                st.serialize_field("alpha", &Option::<f64>::None)?;
            }
        }
        st.serialize_field("slopes", &[self.slope_left, self.slope_right])?;
        st.serialize_field("critical", &self.critical)?;
        st.end()
    }
}

/// General β-transformation `F(x) = βx + α mod 1` with `(β,α)` in the
/// parameter triangle `1 < β ≤ 2`, `0 ≤ α ≤ 2-β`.
pub fn beta_transform(beta: f64, alpha: f64) -> Result<ExpandingLorenzMap, MapError> {
    if !(1.0 < beta && beta <= 2.0) {
        return Err(MapError::BadParameter(format!(
            "beta = {beta} not in (1,2]"
        )));
    }
    if !(0.0..=2.0 - beta + 1e-15).contains(&alpha) {
        return Err(MapError::BadParameter(format!(
            "alpha = {alpha} not in [0, 2-beta]"
        )));
    }
    let critical = (1.0 - alpha) / beta;
    Ok(ExpandingLorenzMap {
        slope_left: beta,
        offset_left: alpha,
        slope_right: beta,
        offset_right: alpha - 1.0,
        critical,
        kind: MapKind::Beta { beta, alpha },
    })
}

/// Symmetric β-transformation `F_β(x) = βx + 1 - β/2 mod 1`, critical point
/// exactly `1/2`.
pub fn symmetric_beta(beta: f64) -> Result<ExpandingLorenzMap, MapError> {
    if !(1.0 < beta && beta <= 2.0) {
        return Err(MapError::BadParameter(format!(
            "beta = {beta} not in (1,2]"
        )));
    }
    let alpha = 1.0 - beta / 2.0;
    Ok(ExpandingLorenzMap {
        slope_left: beta,
        offset_left: alpha,
        slope_right: beta,
        offset_right: alpha - 1.0,
        critical: 0.5,
        kind: MapKind::SymmetricBeta { beta },
    })
}

pub(crate) fn two_slope_raw(
    slope_left: f64,
    offset_left: f64,
    slope_right: f64,
    offset_right: f64,
    critical: f64,
    s: f64,
    r: f64,
) -> Result<ExpandingLorenzMap, MapError> {
    Ok(
        ExpandingLorenzMap::new(slope_left, offset_left, slope_right, offset_right, critical)?
            .with_kind(MapKind::TwoSlope { s, r }),
    )
}

/// One kneading sequence: an exact eventually periodic stream when the
/// critical orbit was certified recurrent, otherwise a finite prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KneadingSequence {
    Stream(SymbolStream),
    Prefix(Word),
}

impl KneadingSequence {
    pub fn symbol(&self, i: usize) -> Option<u8> {
        match self {
            KneadingSequence::Stream(s) => Some(s.symbol(i)),
            KneadingSequence::Prefix(w) => (i < w.len()).then(|| w.symbol(i)),
        }
    }

    /// First `len` symbols; `None` when an uncertified prefix is too short.
    pub fn prefix(&self, len: usize) -> Option<Word> {
        match self {
            KneadingSequence::Stream(s) => Some(s.prefix(len)),
            KneadingSequence::Prefix(w) => {
                (w.len() >= len).then(|| Word::new(w.symbols()[..len].to_vec()).expect("len >= 1"))
            }
        }
    }

    pub fn as_stream(&self) -> Option<&SymbolStream> {
        match self {
            KneadingSequence::Stream(s) => Some(s),
            KneadingSequence::Prefix(_) => None,
        }
    }
}

impl fmt::Display for KneadingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KneadingSequence::Stream(s) => write!(f, "{s}"),
            KneadingSequence::Prefix(w) => write!(f, "{w}..."),
        }
    }
}

/// The pair `(η+, η-)` of upper and lower kneading sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KneadingInvariant {
    pub plus: KneadingSequence,
    pub minus: KneadingSequence,
}

impl KneadingInvariant {
    /// Both sides certified eventually periodic.
    pub fn certified_periodic(&self) -> bool {
        self.plus.as_stream().is_some() && self.minus.as_stream().is_some()
    }

    /// Admissibility of a certified pair; `None` when uncertified.
    pub fn admissible(&self) -> Option<bool> {
        Some(crate::symbolic::is_admissible_pair(
            self.plus.as_stream()?,
            self.minus.as_stream()?,
        ))
    }
}

/// Itinerary outcome for an untagged point, forking on exact critical hits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForkedItinerary {
    Unambiguous(Word),
    Split { at: usize, plus: Word, minus: Word },
}

/// A validated periodic orbit: the realizing word, its starting point, the
/// primitive period, and the full orbit in word order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    #[serde(serialize_with = "serialize_word")]
    pub word: Word,
    pub point: f64,
    pub period: usize,
    #[serde(skip)]
    pub points: Vec<f64>,
}

fn serialize_word<S: Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(w)
}

/// All Lyndon words (canonical aperiodic necklace representatives) over
/// `{0,1}` of length ≤ `max_len`, in lexicographic order.
pub fn lyndon_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w = vec![0u8];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < max_len {
            let s = w[w.len() - m];
            w.push(s);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().expect("nonempty") = 1;
    }
    out
}

#[cfg(test)]
pub(crate) fn epsilon2() -> f64 {
    (1.0 + 5.0_f64.sqrt()) / 2.0
}

/// The root of β⁴ = β + 1 in (1,2): the parameter of the two-branch map with
/// matching at 12 used in several tests.
#[cfg(test)]
pub(crate) fn appendix_beta() -> f64 {
    let f = |x: f64| x.powi(4) - x - 1.0;
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
