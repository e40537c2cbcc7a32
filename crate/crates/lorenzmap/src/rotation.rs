//! Rotation numbers and rotation intervals of expanding Lorenz maps.
//!
//! The rotation number of `x` is the asymptotic frequency of right-branch
//! visits, `ρ(x) = lim R_n(x)/n`; on a q-periodic orbit it is exactly
//! `R_q/q`. For overlapping maps (`F(0) < F(1)`) the set of rotation numbers
//! is an interval. Above `ε_i` the symmetric family realizes every rotation
//! number in `[1/(i+1), i/(i+1)]`, with witness orbits obtained by
//! concatenating the words `A_s = 0^s 1`; below `√2` a primary 2(1)-cycle
//! collapses the interval to the single value `1/2` and pins the shape of
//! every periodic itinerary.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::maps::{ExpandingLorenzMap, MapError, PeriodicOrbit, SidedPoint};
use crate::symbolic::Word;

#[derive(Debug, Error)]
pub enum RotationError {
    #[error("rotation intervals are defined for overlapping maps (F(0) < F(1))")]
    NotOverlapping,
    #[error("blocks must all be A_s / A_(s-1) (or all mirrored) for one s >= 2: {0}")]
    BadBlocks(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A rotation number: exact on a detected periodic orbit, otherwise a
/// finite-time Birkhoff estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotationDatum {
    ExactPeriodic {
        numerator: usize,
        denominator: usize,
        value: f64,
        witness: String,
    },
    Estimate {
        value: f64,
        iterations: usize,
    },
}

impl RotationDatum {
    pub fn value(&self) -> f64 {
        match self {
            RotationDatum::ExactPeriodic { value, .. } => *value,
            RotationDatum::Estimate { value, .. } => *value,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `R_n(x)/n` with periodicity detection: if the orbit of `x` closes up
/// within `1e-12` at period `q ≤ n`, the exact value `R_q/q` is returned
/// with the witness word.
///
/// An untagged orbit that runs exactly into the critical point (which
/// happens for every dyadic float under `F_2`) truncates the Birkhoff
/// average at the hit instead of failing.
pub fn rotation_number(
    map: &ExpandingLorenzMap,
    p: SidedPoint,
    n: usize,
) -> Result<RotationDatum, MapError> {
    assert!(n >= 1);
    let word = match map.itinerary(p, n) {
        Ok(word) => word,
        Err(MapError::TieWithoutSide) => match map.itinerary_forked(p.x, n)? {
            crate::maps::ForkedItinerary::Unambiguous(w) => w,
            crate::maps::ForkedItinerary::Split { at, plus, .. } => {
                if at == 0 {
                    return Err(MapError::TieWithoutSide);
                }
                Word::new(plus.symbols()[..at].to_vec()).expect("at >= 1")
            }
        },
        Err(e) => return Err(e),
    };
    // Reuse the exact orbit locator as the periodicity oracle: scan prefixes.
    for q in 1..=word.len().min(24) {
        let candidate = Word::new(word.symbols()[..q].to_vec()).expect("q >= 1");
        if let Ok(orbit) = map.point_from_itinerary(&candidate) {
            if (orbit.point - p.x).abs() <= 1e-12 {
                let ones = candidate.symbols().iter().filter(|&&s| s == 1).count();
                let d = gcd(ones.max(1), q);
                return Ok(RotationDatum::ExactPeriodic {
                    numerator: ones / d.max(1),
                    denominator: q / d.max(1),
                    value: ones as f64 / q as f64,
                    witness: candidate.to_string(),
                });
            }
        }
    }
    let ones = word.symbols().iter().filter(|&&s| s == 1).count();
    Ok(RotationDatum::Estimate {
        value: ones as f64 / word.len() as f64,
        iterations: word.len(),
    })
}

/// Exact rotation number of a located periodic orbit.
pub fn orbit_rotation(orbit: &PeriodicOrbit) -> RotationDatum {
    let q = orbit.word.len();
    let ones = orbit.word.symbols().iter().filter(|&&s| s == 1).count();
    let d = gcd(ones.max(1), q).max(1);
    RotationDatum::ExactPeriodic {
        numerator: if ones == 0 { 0 } else { ones / d },
        denominator: if ones == 0 { 1 } else { q / d },
        value: ones as f64 / q as f64,
        witness: orbit.word.to_string(),
    }
}

/// Inner estimate `[lo, hi]` of the rotation interval.
///
/// Sources: Birkhoff estimates of sampled points, the two one-sided critical
/// orbits, and the exact rotation numbers of all periodic orbits up to
/// `max_period`. Random orbits concentrate near the measure-typical value,
/// so the extreme rotation numbers are certified by the periodic witnesses
/// (which also populate `witnesses`).
#[derive(Debug, Clone, Serialize)]
pub struct RotationInterval {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub iterations: usize,
    /// Exact values detected among the sources.
    pub witnesses: Vec<RotationDatum>,
}

pub fn rotation_interval_estimate(
    map: &ExpandingLorenzMap,
    n_samples: usize,
    n_iters: usize,
    max_period: usize,
    seed: u64,
) -> Result<RotationInterval, RotationError> {
    if !map.is_overlapping() {
        return Err(RotationError::NotOverlapping);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut witnesses = Vec::new();
    let mut absorb = |datum: RotationDatum| {
        let v = datum.value();
        lo = lo.min(v);
        hi = hi.max(v);
        if matches!(datum, RotationDatum::ExactPeriodic { .. }) {
            witnesses.push(datum);
        }
    };
    let c = map.critical();
    absorb(rotation_number(map, SidedPoint::plus(c), n_iters)?);
    absorb(rotation_number(map, SidedPoint::minus(c), n_iters)?);
    for orbit in map.periodic_orbits(max_period) {
        absorb(orbit_rotation(&orbit));
    }
    for _ in 0..n_samples {
        let x: f64 = rng.gen();
        if (x - c).abs() <= crate::maps::TIE_TOL {
            continue;
        }
        absorb(rotation_number(map, SidedPoint::plain(x), n_iters)?);
    }
    Ok(RotationInterval {
        lo,
        hi,
        samples: n_samples,
        iterations: n_iters,
        witnesses,
    })
}

/// Orientation of a block family: `A_s = 0^s 1` or its mirror `1^s 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockShape {
    Plain(usize),
    Mirrored(usize),
}

fn block_shape(w: &Word) -> Option<BlockShape> {
    let n = w.len();
    if n < 2 {
        return None;
    }
    let zeros_then_one = w.symbols()[..n - 1].iter().all(|&s| s == 0) && w.symbol(n - 1) == 1;
    if zeros_then_one {
        return Some(BlockShape::Plain(n - 1));
    }
    let ones_then_zero = w.symbols()[..n - 1].iter().all(|&s| s == 1) && w.symbol(n - 1) == 0;
    if ones_then_zero {
        return Some(BlockShape::Mirrored(n - 1));
    }
    None
}

/// Concatenates blocks from `{A_s, A_(s-1)}` (or the mirrored pair) and
/// locates the periodic orbit realizing `C^∞`. Succeeds whenever `β > ε_s`;
/// a rejection signals that the concatenation is not admissible at this
/// parameter.
pub fn concat_orbit(
    map: &ExpandingLorenzMap,
    blocks: &[Word],
) -> Result<Result<PeriodicOrbit, crate::maps::OrbitRejection>, RotationError> {
    if blocks.is_empty() {
        return Err(RotationError::BadBlocks("no blocks given".into()));
    }
    let shapes: Option<Vec<BlockShape>> = blocks.iter().map(block_shape).collect();
    let Some(shapes) = shapes else {
        return Err(RotationError::BadBlocks(format!(
            "{:?} is not of the form 0^t 1 or 1^t 0",
            blocks
        )));
    };
    let mirrored = matches!(shapes[0], BlockShape::Mirrored(_));
    let mut s_max = 0usize;
    let mut s_min = usize::MAX;
    for shape in &shapes {
        let t = match (mirrored, shape) {
            (false, BlockShape::Plain(t)) | (true, BlockShape::Mirrored(t)) => *t,
            _ => {
                return Err(RotationError::BadBlocks(
                    "blocks mix plain and mirrored orientations".into(),
                ))
            }
        };
        s_max = s_max.max(t);
        s_min = s_min.min(t);
    }
    if s_max < 2 || s_max - s_min > 1 {
        return Err(RotationError::BadBlocks(format!(
            "block zero-runs {s_min}..{s_max} are not {{s-1, s}} with s >= 2"
        )));
    }
    let mut bits = Vec::new();
    for b in blocks {
        bits.extend_from_slice(b.symbols());
    }
    let word = Word::new(bits).expect("blocks nonempty");
    Ok(map.point_from_itinerary(&word))
}

/// Per-orbit conformity with the primary-2(1)-cycle itinerary shape: some
/// rotation of the cyclic word is a concatenation of the blocks `01`, `10`.
#[derive(Debug, Clone, Serialize)]
pub struct ItineraryFormReport {
    pub beta_in_range: bool,
    pub orbits: usize,
    pub violations: Vec<String>,
}

/// Checks every periodic orbit word up to `max_period` against the
/// `01`/`10`-concatenation form forced by a primary 2(1)-cycle. Outside the
/// precondition `β ∈ (1,√2]` violations are expected and flagged as such.
pub fn verify_21_itinerary_form(
    map: &ExpandingLorenzMap,
    max_period: usize,
) -> ItineraryFormReport {
    let beta_in_range = map.slope_left() <= 2.0_f64.sqrt() + 1e-12;
    let orbits = map.periodic_orbits(max_period);
    let mut violations = Vec::new();
    for orbit in &orbits {
        if !word_is_pair_concat(&orbit.word) {
            violations.push(orbit.word.to_string());
        }
    }
    ItineraryFormReport {
        beta_in_range,
        orbits: orbits.len(),
        violations,
    }
}

/// Some cyclic rotation splits into `01`/`10` blocks. Rotations only need
/// checking modulo 2.
fn word_is_pair_concat(w: &Word) -> bool {
    let n = w.len();
    if !n.is_multiple_of(2) {
        return false;
    }
    'rot: for r in 0..2usize.min(n) {
        for k in 0..n / 2 {
            let a = w.symbol((r + 2 * k) % n);
            let b = w.symbol((r + 2 * k + 1) % n);
            if a == b {
                continue 'rot;
            }
        }
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{symmetric_beta, OrbitRejection};
    use crate::symbolic::SymbolStream;

    #[test]
    fn exact_rotation_numbers() {
        let map = symmetric_beta(1.8).unwrap();
        let orbit = map.point_from_itinerary(&"01".parse().unwrap()).unwrap();
        let rho = rotation_number(&map, SidedPoint::plain(orbit.point), 64).unwrap();
        match rho {
            RotationDatum::ExactPeriodic {
                numerator,
                denominator,
                ..
            } => assert_eq!((numerator, denominator), (1, 2)),
            other => panic!("expected exact value, got {other:?}"),
        }

        // (10^i)^∞ has rotation number 1/(i+1).
        for i in 2..=4 {
            let map = symmetric_beta(1.95).unwrap();
            let orbit = map
                .point_from_itinerary(&Word::one_zeros(i))
                .expect("orbit exists for beta close to 2");
            let rho = orbit_rotation(&orbit);
            assert!((rho.value() - 1.0 / (i as f64 + 1.0)).abs() < 1e-15);
        }
    }

    /// Birkhoff averages of a mixing orbit fluctuate at the CLT scale
    /// `~ 1/sqrt(n)`, so self-consistency between n and 2n iterations is
    /// asserted at that scale (a 1/n tolerance is not attainable).
    #[test]
    fn estimates_are_cauchy_in_iteration_count() {
        let map = symmetric_beta(1.9).unwrap();
        let x = SidedPoint::plain(0.37);
        let a = rotation_number(&map, x, 10_000).unwrap().value();
        let b = rotation_number(&map, x, 20_000).unwrap().value();
        assert!((a - b).abs() < 5.0 / (10_000.0_f64).sqrt(), "|{a} - {b}|");
    }

    #[test]
    fn interval_estimate_examples() {
        // beta = 1.7 > eps_2: the interval contains [1/3, 2/3] with the
        // (100)/(011) orbits as exact witnesses.
        let map = symmetric_beta(1.7).unwrap();
        let est = rotation_interval_estimate(&map, 50, 10_000, 10, 5).unwrap();
        assert!(est.lo <= 1.0 / 3.0, "lo = {}", est.lo);
        assert!(est.hi >= 2.0 / 3.0, "hi = {}", est.hi);
        assert!(est
            .witnesses
            .iter()
            .any(|w| (w.value() - 1.0 / 3.0).abs() < 1e-15));

        // beta = 1.3: primary 2(1)-cycle collapses the interval to 1/2.
        let map = symmetric_beta(1.3).unwrap();
        let est = rotation_interval_estimate(&map, 50, 10_000, 10, 5).unwrap();
        assert!((est.lo - 0.5).abs() < 2e-3 && (est.hi - 0.5).abs() < 2e-3);

        // Doubling map: fixed points give the endpoints 0 and 1 exactly.
        let map = symmetric_beta(2.0).unwrap();
        let est = rotation_interval_estimate(&map, 50, 10_000, 10, 5).unwrap();
        assert!(est.lo <= 0.0 && est.hi >= 1.0);
    }

    #[test]
    fn interval_endpoints_grow_with_beta() {
        let grid = [1.5, 1.7, 1.9, 2.0];
        let mut prev: Option<(f64, f64)> = None;
        for beta in grid {
            let est =
                rotation_interval_estimate(&symmetric_beta(beta).unwrap(), 30, 20_000, 10, 11)
                    .unwrap();
            if let Some((lo, hi)) = prev {
                assert!(est.lo <= lo + 2e-3, "beta={beta}");
                assert!(est.hi >= hi - 2e-3, "beta={beta}");
            }
            prev = Some((est.lo, est.hi));
        }
    }

    #[test]
    fn concat_orbit_examples() {
        // beta = 1.7, C = A_2 A_1 = 001·01: a period-5 orbit.
        let map = symmetric_beta(1.7).unwrap();
        let blocks = [Word::a_block(2), Word::a_block(1)];
        let orbit = concat_orbit(&map, &blocks).unwrap().unwrap();
        assert_eq!(orbit.period, 5);

        // The mirrored concatenation is realized as well.
        let mirrored = [Word::a_block(2).mirror(), Word::a_block(1).mirror()];
        let orbit_m = concat_orbit(&map, &mirrored).unwrap().unwrap();
        assert_eq!(orbit_m.period, 5);
        // Mirror positions: the two orbits reflect through 1/2.
        let mut lhs: Vec<f64> = orbit.points.clone();
        let mut rhs: Vec<f64> = orbit_m.points.iter().map(|&x| 1.0 - x).collect();
        lhs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rhs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-9);
        }

        // Below eps_2 the same concatenation is rejected, consistently with
        // the subshift bound from the kneading prefix.
        let map = symmetric_beta(1.3).unwrap();
        let rejection = concat_orbit(&map, &blocks).unwrap();
        assert!(matches!(rejection, Err(OrbitRejection::OrbitMismatch)));
        let k = map.kneading(64).unwrap();
        let lo_prefix = k.plus.prefix(64).unwrap();
        let hi_prefix = k.minus.prefix(64).unwrap();
        let xi = SymbolStream::periodic(&"00101".parse().unwrap());
        assert!(!crate::symbolic::member_of_subshift_prefix(
            &xi.shift(0),
            &Word::new(lo_prefix.symbols()[1..].to_vec()).unwrap(),
            &Word::new(hi_prefix.symbols()[1..].to_vec()).unwrap(),
        ));
    }

    #[test]
    fn concat_orbit_validates_blocks() {
        let map = symmetric_beta(1.7).unwrap();
        // 011 is neither 0^t 1 nor 1^t 0.
        let bad = ["011".parse::<Word>().unwrap()];
        assert!(concat_orbit(&map, &bad).is_err());
        // Mixing orientations is rejected.
        let mixed = [Word::a_block(2), Word::a_block(2).mirror()];
        assert!(concat_orbit(&map, &mixed).is_err());
        // s = 1 alone is out of range (needs s >= 2).
        let small = [Word::a_block(1)];
        assert!(concat_orbit(&map, &small).is_err());
    }

    #[test]
    fn itinerary_form_examples() {
        let report = verify_21_itinerary_form(&symmetric_beta(1.3).unwrap(), 10);
        assert!(report.beta_in_range);
        assert!(report.violations.is_empty(), "{:?}", report.violations);

        let report = verify_21_itinerary_form(&symmetric_beta(2.0_f64.sqrt()).unwrap(), 10);
        assert!(report.beta_in_range);
        assert!(report.violations.is_empty(), "{:?}", report.violations);

        // Out of precondition at beta = 1.5: the first violating orbits are
        // the odd-period-7 words (period 3 would need beta >= eps_2, and
        // all words through period 6 still happen to split into 01/10
        // blocks up to rotation).
        let report = verify_21_itinerary_form(&symmetric_beta(1.5).unwrap(), 8);
        assert!(!report.beta_in_range);
        assert!(
            report.violations.iter().any(|w| w == "0010101"),
            "{:?}",
            report.violations
        );
    }

    #[test]
    fn rotation_invariant_under_cyclic_shift() {
        let map = symmetric_beta(1.9).unwrap();
        for orbit in map.periodic_orbits(7) {
            let base = orbit_rotation(&orbit).value();
            for k in 0..orbit.word.len() {
                let rotated = orbit.word.rotate(k);
                if let Ok(rot_orbit) = map.point_from_itinerary(&rotated) {
                    assert!((orbit_rotation(&rot_orbit).value() - base).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn expanding_family_members_are_overlapping() {
        // F(0) = 1 - c·s_l < 1 - c < (1-c)·s_r = F(1) whenever both slopes
        // exceed 1, so the overlap precondition holds across the family and
        // the NotOverlapping error path stays reserved for future map kinds.
        for beta in [1.05, 1.3, 1.7, 2.0] {
            assert!(symmetric_beta(beta).unwrap().is_overlapping());
        }
    }
}
