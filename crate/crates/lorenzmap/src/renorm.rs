//! Renormalization of expanding Lorenz maps.
//!
//! A map `F` is renormalizable with return times `(l, r)` when the first
//! return map `G = (F^l, F^r)` to the interval `[u,v] = [F^r(c+), F^l(c-)]`
//! is itself a Lorenz map there; rescaling `[u,v]` to `[0,1]` produces the
//! child map. For the symmetric family, `F_β` is `(2,2)`-renormalizable
//! exactly for `β ∈ (1,√2]` with child `F_{β²}`, so towers of
//! renormalizations walk the dyadic ladder `β_i = 2^(1/2^i)`.
//!
//! Primary n(k)-cycles force renormalizability and the period-set algebra
//! `P_F = n·P_G ∪ {n}`. Matching (`F^n(c-) = F^n(c+)` for some n) is
//! equivalent to the general cut-and-paste condition; both are probed here
//! numerically, together with the discrepancy between the analytic and the
//! symbolic notions of renormalization that shows up when an endpoint orbit
//! runs exactly through the critical point.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::kneading::BetaLadder;
use crate::maps::{
    symmetric_beta, ExpandingLorenzMap, KneadingInvariant, MapError, OrbitRejection, PeriodicOrbit,
    Side, SidedPoint, TIE_TOL,
};
use crate::symbolic::Word;

/// Tolerance on the cycle equations `F(z_j) = z_{j+k mod n}`.
pub const CYCLE_TOL: f64 = 1e-10;

/// Tolerance on the matching condition `F^n(c-) = F^n(c+)`.
pub const MATCHING_TOL: f64 = 1e-8;

/// Tolerance on the rescaled child's Lorenz normalization.
pub const CHILD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RenormError {
    #[error("return times must exceed 1 (got l={0}, r={1})")]
    BadReturnTimes(usize, usize),
    #[error("n and k must be coprime with n > k >= 1 (got n={0}, k={1})")]
    BadCycleShape(usize, usize),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Why a `(l,r)` return map fails to be a renormalization.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenormRejection {
    #[error("interval [u,v] = [{u}, {v}] does not straddle the critical point properly")]
    BadInterval { u: f64, v: f64 },
    #[error("image of the {side} interval straddles the critical point at step {step}")]
    Straddle { side: &'static str, step: usize },
    #[error("return map does not send [u,v] into itself")]
    NotInvariant,
    #[error("rescaled child is not an expanding Lorenz map: {0}")]
    ChildInvalid(String),
}

/// Whether the return map is a renormalization in the strict pointwise sense
/// or only through one-sided limits (an endpoint orbit runs exactly through
/// the critical point, as for the two-branch map with matching at 12).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormStatus {
    Analytic,
    OneSidedOnly,
}

/// A validated renormalization `G = (F^l, F^r)` on `[u,v]` with its rescaled
/// child.
#[derive(Debug, Clone, Serialize)]
pub struct Renormalization {
    pub l: usize,
    pub r: usize,
    pub u: f64,
    pub v: f64,
    pub child: ExpandingLorenzMap,
    pub status: RenormStatus,
}

struct IntervalTrack {
    /// Endpoint values after each step (0..=steps), lower then upper.
    lower: Vec<f64>,
    upper: Vec<f64>,
    straddle: Option<usize>,
    touched: bool,
    /// Branch slopes picked up along the way (product = return-map slope).
    slope: f64,
}

/// Forward-iterates an interval given by sided endpoints, recording whether
/// any intermediate image straddles or touches the critical point.
fn track_interval(
    map: &ExpandingLorenzMap,
    lower: SidedPoint,
    upper: SidedPoint,
    steps: usize,
) -> Result<IntervalTrack, MapError> {
    let c = map.critical();
    let mut lo = lower;
    let mut hi = upper;
    let mut track = IntervalTrack {
        lower: vec![lo.x],
        upper: vec![hi.x],
        straddle: None,
        touched: false,
        slope: 1.0,
    };
    for j in 1..=steps {
        // Branch of this step, from where the interval currently sits.
        let on_left = hi.x <= c + TIE_TOL;
        track.slope *= if on_left {
            map.slope_left()
        } else {
            map.slope_right()
        };
        lo = map.eval(lo)?;
        hi = map.eval(hi)?;
        track.lower.push(lo.x);
        track.upper.push(hi.x);
        if j == steps {
            break;
        }
        let lo_ties = (lo.x - c).abs() <= TIE_TOL;
        let hi_ties = (hi.x - c).abs() <= TIE_TOL;
        if lo_ties || hi_ties {
            track.touched = true;
        }
        if !lo_ties && !hi_ties && lo.x < c && c < hi.x {
            track.straddle = Some(j);
            break;
        }
    }
    Ok(track)
}

/// Attempts the renormalization `G = (F^l, F^r)` on `[F^r(c+), F^l(c-)]`.
///
/// The intermediate images of `[u,c)` and `(c,v]` must not straddle `c`
/// (otherwise `G` is not affine on its halves), `G` must send `[u,v]` into
/// itself, and the rescaled child must satisfy the Lorenz normalization
/// within [`CHILD_TOL`]. Endpoint orbits that run exactly through `c` are
/// allowed but downgrade the status to [`RenormStatus::OneSidedOnly`].
pub fn renormalize(
    map: &ExpandingLorenzMap,
    l: usize,
    r: usize,
) -> Result<Result<Renormalization, RenormRejection>, RenormError> {
    if l <= 1 || r <= 1 {
        return Err(RenormError::BadReturnTimes(l, r));
    }
    let c = map.critical();
    let plus_orbit = map.critical_orbit(Side::Plus, r)?;
    let minus_orbit = map.critical_orbit(Side::Minus, l)?;
    let u = plus_orbit[r];
    let v = minus_orbit[l];
    if !(u < c - TIE_TOL && c + TIE_TOL < v) || u < -TIE_TOL || v > 1.0 + TIE_TOL {
        return Ok(Err(RenormRejection::BadInterval { u, v }));
    }

    // Endpoint sides point into the interval: [u, c) and (c, v].
    let left = track_interval(map, SidedPoint::plus(u), SidedPoint::minus(c), l)?;
    if let Some(step) = left.straddle {
        return Ok(Err(RenormRejection::Straddle { side: "left", step }));
    }
    let right = track_interval(map, SidedPoint::plus(c), SidedPoint::minus(v), r)?;
    if let Some(step) = right.straddle {
        return Ok(Err(RenormRejection::Straddle {
            side: "right",
            step,
        }));
    }

    let g_at_u = left.lower[l];
    let g_at_c_minus = left.upper[l];
    let g_at_c_plus = right.lower[r];
    let g_at_v = right.upper[r];
    let tol = CHILD_TOL;
    if g_at_u < u - tol || g_at_v > v + tol {
        return Ok(Err(RenormRejection::NotInvariant));
    }
    if (g_at_c_minus - v).abs() > tol || (g_at_c_plus - u).abs() > tol {
        // By construction these are v and u up to accumulated rounding.
        return Ok(Err(RenormRejection::NotInvariant));
    }

    // Rescale by h(x) = (x-u)/(v-u).
    let width = v - u;
    let child_critical = (c - u) / width;
    let slope_left = left.slope;
    let slope_right = right.slope;
    let offset_left = (g_at_u - u) / width;
    let offset_right = (g_at_v - u) / width - slope_right;
    // The four Lorenz normalization conditions at CHILD_TOL.
    let checks = [
        (slope_left * child_critical + offset_left - 1.0).abs(),
        (slope_right * child_critical + offset_right).abs(),
        (-offset_left).max(0.0),
        (slope_right + offset_right - 1.0).max(0.0),
    ];
    if checks.iter().any(|&e| e > tol) {
        return Ok(Err(RenormRejection::ChildInvalid(format!(
            "normalization residuals {checks:?}"
        ))));
    }
    // Snap the offsets to the exact normalization before constructing.
    let child = ExpandingLorenzMap::new(
        slope_left,
        1.0 - slope_left * child_critical,
        slope_right,
        -slope_right * child_critical,
        child_critical,
    )
    .map_err(|e| e.to_string());
    let child = match child {
        Ok(m) => m,
        Err(e) => return Ok(Err(RenormRejection::ChildInvalid(e))),
    };
    let status = if left.touched || right.touched || v > 1.0 - TIE_TOL || u < TIE_TOL {
        RenormStatus::OneSidedOnly
    } else {
        RenormStatus::Analytic
    };
    Ok(Ok(Renormalization {
        l,
        r,
        u,
        v,
        child,
        status,
    }))
}

/// One level of a `(2,2)`-renormalization tower of a symmetric map.
#[derive(Debug, Clone, Serialize)]
pub struct TowerLevel {
    pub l: usize,
    pub r: usize,
    pub u: f64,
    pub v: f64,
    /// Slope of the rescaled child (`≈ β^{2^j}` at level `j`).
    pub child_beta: f64,
    /// Max deviation of the child from `F_{β^{2^j}}` on a 1000-point grid.
    pub family_deviation: f64,
}

/// The full `(F², F²)`-renormalization tower of `F_β`.
///
/// For `β ∈ (β_{i+1}, β_i]` the tower has exactly `i` levels with children
/// `F_{β^{2^j}}`; each child is verified pointwise against the family member
/// on a grid. Empty for `β > √2`.
pub fn renorm_tower(beta: f64) -> Result<Vec<TowerLevel>, RenormError> {
    let mut current = symmetric_beta(beta)?;
    let mut expected = beta;
    let mut levels = Vec::new();
    for _ in 0..64 {
        let step = renormalize(&current, 2, 2)?;
        let Ok(renorm) = step else { break };
        expected = expected * expected;
        let family = symmetric_beta(expected.min(2.0))?;
        let mut dev = 0.0_f64;
        for i in 0..1000 {
            let x = (i as f64 + 0.3) / 1000.0;
            let a = renorm.child.eval(SidedPoint::plain(x))?.x;
            let b = family.eval(SidedPoint::plain(x))?.x;
            dev = dev.max((a - b).abs());
        }
        levels.push(TowerLevel {
            l: renorm.l,
            r: renorm.r,
            u: renorm.u,
            v: renorm.v,
            child_beta: renorm.child.slope_left(),
            family_deviation: dev,
        });
        current = renorm.child;
    }
    Ok(levels)
}

/// A rotation-ordered periodic orbit `z_0 < … < z_{n-1}` with `F(z_j) =
/// z_{j+k mod n}`, the first `n-k` points left of `c`.
#[derive(Debug, Clone, Serialize)]
pub struct NkCycle {
    pub n: usize,
    pub k: usize,
    /// Sorted cycle points.
    pub points: Vec<f64>,
    /// `z_{k-1} ≤ F(0)` and `F(1) ≤ z_k`.
    pub primary: bool,
    /// Max residual of the cycle equations.
    pub residual: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Searches for the n(k)-cycle through its rotation-structured word: the
/// symbol of `z_j` is 0 for `j < n-k` and 1 otherwise, read along the orbit
/// in steps of `k`.
pub fn find_nk_cycle(
    map: &ExpandingLorenzMap,
    n: usize,
    k: usize,
) -> Result<Option<NkCycle>, RenormError> {
    if !(n > k && k >= 1 && gcd(n, k) == 1) {
        return Err(RenormError::BadCycleShape(n, k));
    }
    let symbol_of_rank = |j: usize| u8::from(j >= n - k);
    let mut bits = Vec::with_capacity(n);
    let mut j = 0;
    for _ in 0..n {
        bits.push(symbol_of_rank(j));
        j = (j + k) % n;
    }
    let word = Word::new(bits).expect("n >= 1");
    let orbit = match map.point_from_itinerary(&word) {
        Ok(orbit) => orbit,
        Err(OrbitRejection::OrbitMismatch) | Err(OrbitRejection::CriticalCollision) => {
            return Ok(None)
        }
    };
    let mut points = orbit.points.clone();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let c = map.critical();
    for (rank, &z) in points.iter().enumerate() {
        let expect_right = rank >= n - k;
        if (z > c) != expect_right {
            return Ok(None);
        }
    }
    let mut residual = 0.0_f64;
    for (rank, &z) in points.iter().enumerate() {
        let image = map.eval(SidedPoint::plain(z))?.x;
        let target = points[(rank + k) % n];
        residual = residual.max((image - target).abs());
    }
    if residual > CYCLE_TOL {
        return Ok(None);
    }
    let primary = (k == 0 || points[k - 1] <= map.at_zero() + CYCLE_TOL)
        && map.at_one() <= points[k] + CYCLE_TOL;
    Ok(Some(NkCycle {
        n,
        k,
        points,
        primary,
        residual,
    }))
}

/// Searches small (n,k) for a primary cycle, smallest `n` first.
pub fn find_primary_cycle(
    map: &ExpandingLorenzMap,
    max_n: usize,
) -> Result<Option<NkCycle>, RenormError> {
    for n in 2..=max_n {
        for k in 1..n {
            if gcd(n, k) != 1 {
                continue;
            }
            if let Some(cycle) = find_nk_cycle(map, n, k)? {
                if cycle.primary {
                    return Ok(Some(cycle));
                }
            }
        }
    }
    Ok(None)
}

/// The period-set algebra check `P_F = n·P_G ∪ {n}` attached to a period set
/// when a primary n(k)-cycle exists.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodAlgebra {
    pub n: usize,
    pub k: usize,
    pub child_periods: BTreeSet<usize>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodSetReport {
    pub periods: BTreeSet<usize>,
    pub algebra: Option<PeriodAlgebra>,
}

/// Brute-force period set to `max_period`, with the renormalization algebra
/// verified whenever a primary n(k)-cycle is present.
pub fn period_set(
    map: &ExpandingLorenzMap,
    max_period: usize,
) -> Result<PeriodSetReport, RenormError> {
    let periods: BTreeSet<usize> = map
        .periodic_orbits(max_period)
        .iter()
        .map(|o| o.period)
        .collect();
    let algebra = match find_primary_cycle(map, 6)? {
        Some(cycle) => {
            let renorm = renormalize(map, cycle.n, cycle.n)?;
            match renorm {
                Ok(renorm) => {
                    let child_periods: BTreeSet<usize> = renorm
                        .child
                        .periodic_orbits(max_period / cycle.n)
                        .iter()
                        .map(|o| o.period)
                        .collect();
                    let mut expect: BTreeSet<usize> =
                        child_periods.iter().map(|&q| q * cycle.n).collect();
                    expect.insert(cycle.n);
                    expect.retain(|&p| p <= max_period);
                    let holds = expect == periods;
                    Some(PeriodAlgebra {
                        n: cycle.n,
                        k: cycle.k,
                        child_periods,
                        holds,
                    })
                }
                Err(_) => None,
            }
        }
        None => None,
    };
    Ok(PeriodSetReport { periods, algebra })
}

/// Result of the dyadic-ladder membership test.
#[derive(Debug, Clone, Serialize)]
pub struct FullyRenormalizable {
    pub i: usize,
    pub tower_depth: usize,
    pub final_child_beta: f64,
    /// Tower re-run confirmed the final child is the doubling map.
    pub certified: bool,
}

/// Tests `|β - 2^(1/2^i)| < tol` for some `i ≤ 20` and certifies by running
/// the tower and checking its final child against `F_2`.
pub fn is_fully_renormalizable(
    beta: f64,
    tol: f64,
) -> Result<Option<FullyRenormalizable>, RenormError> {
    let ladder = BetaLadder::new(20);
    let mut index = None;
    for i in 1..=20 {
        if (beta - ladder.get(i)).abs() < tol {
            index = Some(i);
            break;
        }
    }
    let Some(i) = index else { return Ok(None) };
    let tower = renorm_tower(beta)?;
    let final_child_beta = tower.last().map(|lvl| lvl.child_beta).unwrap_or(beta);
    let certified = tower.len() == i && (final_child_beta - 2.0).abs() < 1e-6;
    Ok(Some(FullyRenormalizable {
        i,
        tower_depth: tower.len(),
        final_child_beta,
        certified,
    }))
}

/// First index with `|F^n(c-) - F^n(c+)| <` [`MATCHING_TOL`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MatchingRecord {
    pub index: usize,
    pub residual: f64,
}

/// Tracks both one-sided critical orbits and reports the smallest matching
/// index, if any, up to `max_n ≤ 64`.
pub fn matching_index(
    map: &ExpandingLorenzMap,
    max_n: usize,
) -> Result<Option<MatchingRecord>, RenormError> {
    assert!(max_n <= 64, "matching search bound exceeded");
    let plus = map.critical_orbit(Side::Plus, max_n)?;
    let minus = map.critical_orbit(Side::Minus, max_n)?;
    for n in 1..=max_n {
        let residual = (plus[n] - minus[n]).abs();
        if residual < MATCHING_TOL {
            return Ok(Some(MatchingRecord { index: n, residual }));
        }
    }
    Ok(None)
}

/// Report of the cut-and-paste diagnostics around a (possibly symbolic)
/// renormalization with return times `(l, r)`.
#[derive(Debug, Clone, Serialize)]
pub struct CutPasteReport {
    pub l: usize,
    pub r: usize,
    pub u: f64,
    pub v: f64,
    /// `[u,c)` meets no preimage of `c` before its return time.
    pub left_clean: bool,
    /// `(c,v]` meets no preimage of `c` before its return time.
    pub right_clean: bool,
    /// An endpoint orbit runs exactly through `c` (the analytic/symbolic
    /// renormalization discrepancy).
    pub endpoint_touch: bool,
    pub matching: Option<MatchingRecord>,
    /// The general cut-and-paste condition, equivalent to matching.
    pub general_cut_and_paste: bool,
}

/// Probes `[u,c) ∩ ⋃_{j<l} F^{-j}(c)` and `(c,v] ∩ ⋃_{j<r} F^{-j}(c)` by
/// forward-iterating interval endpoints, and reports matching.
pub fn cut_and_paste_check(
    map: &ExpandingLorenzMap,
    l: usize,
    r: usize,
) -> Result<CutPasteReport, RenormError> {
    if l <= 1 || r <= 1 {
        return Err(RenormError::BadReturnTimes(l, r));
    }
    let c = map.critical();
    let u = map.critical_orbit(Side::Plus, r)?[r];
    let v = map.critical_orbit(Side::Minus, l)?[l];
    let left = track_interval(map, SidedPoint::plus(u), SidedPoint::minus(c), l)?;
    let right = track_interval(map, SidedPoint::plus(c), SidedPoint::minus(v), r)?;
    let matching = matching_index(map, 64)?;
    Ok(CutPasteReport {
        l,
        r,
        u,
        v,
        left_clean: left.straddle.is_none(),
        right_clean: right.straddle.is_none(),
        endpoint_touch: left.touched || right.touched,
        matching,
        general_cut_and_paste: matching.is_some(),
    })
}

/// Detects a symbolic renormalization from a certified kneading invariant:
/// word lengths `(l, r)` such that `η-` decomposes into blocks `L = η-[..l]`,
/// `R = η+[..r]` starting with `L`, and `η+` likewise starting with `R`.
pub fn detect_symbolic_renorm(
    kneading: &KneadingInvariant,
    max_len: usize,
) -> Option<(usize, usize)> {
    let plus = kneading.plus.as_stream()?;
    let minus = kneading.minus.as_stream()?;
    for total in 4..=2 * max_len {
        for l in 2..total.min(max_len + 1) {
            let r = total - l;
            if !(2..=max_len).contains(&r) {
                continue;
            }
            let l_word = minus.prefix(l);
            let r_word = plus.prefix(r);
            if l_word.symbol(0) != 0 || r_word.symbol(0) != 1 {
                continue;
            }
            if decomposes(plus, &r_word, &l_word) && decomposes(minus, &l_word, &r_word) {
                return Some((l, r));
            }
        }
    }
    None
}

/// True when the stream is an infinite concatenation of `first` followed by
/// blocks from `{first, second}` in which `second` occurs at least once.
/// (The renormalizable kneading forms are `RL^∞` / alternating mixtures;
/// a pure power of a single block does not qualify.)
fn decomposes(stream: &crate::symbolic::SymbolStream, first: &Word, second: &Word) -> bool {
    let pre = stream.preperiod().len();
    let per = stream.period().len();
    let count = pre + per;
    let canon = |p: usize| if p < pre { p } else { pre + (p - pre) % per };
    let matches_at = |p: usize, w: &Word| (0..w.len()).all(|i| stream.symbol(p + i) == w.symbol(i));
    if !matches_at(0, first) {
        return false;
    }
    // Finite graph on canonical positions. `alive` is the greatest fixed
    // point of "some block matches here and leads to an alive position":
    // exactly the positions from which the decomposition continues forever.
    let step = |p: usize, w: &Word| canon(p + w.len());
    let mut alive = vec![true; count];
    loop {
        let mut changed = false;
        for p in 0..count {
            if !alive[p] {
                continue;
            }
            let ok = (matches_at(p, first) && alive[step(p, first)])
                || (matches_at(p, second) && alive[step(p, second)]);
            if !ok {
                alive[p] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Reachability from the forced first block, tracking whether `second`
    // has been used; accept on an alive position with the flag set.
    let start = canon(first.len());
    let mut seen = vec![[false; 2]; count];
    let mut stack = vec![(start, false)];
    while let Some((p, used)) = stack.pop() {
        if seen[p][usize::from(used)] {
            continue;
        }
        seen[p][usize::from(used)] = true;
        if used && alive[p] {
            return true;
        }
        if matches_at(p, first) {
            stack.push((step(p, first), used));
        }
        if matches_at(p, second) {
            stack.push((step(p, second), true));
        }
    }
    false
}

/// Splits `n = 2^a · b` with `b` odd.
fn dyadic_split(n: usize) -> (u32, usize) {
    let a = n.trailing_zeros();
    (a, n >> a)
}

/// Whether prime period `n` forces prime period `m` in the Sharkovsky order
/// (`n ⊳ m`, `n ≠ m`).
pub fn sharkovsky_forces(n: usize, m: usize) -> bool {
    if n == m || n == 0 || m == 0 {
        return false;
    }
    let (a1, b1) = dyadic_split(n);
    let (a2, b2) = dyadic_split(m);
    match (b1 > 1, b2 > 1) {
        (true, true) => a1 < a2 || (a1 == a2 && b1 < b2),
        (true, false) => true,
        (false, true) => false,
        (false, false) => a1 > a2,
    }
}

/// Checks downward closure of a period set in the Sharkovsky order with
/// fixed points excluded.
pub fn sharkovsky_closed(periods: &BTreeSet<usize>, max_period: usize) -> bool {
    for &n in periods {
        for m in 2..=max_period {
            if sharkovsky_forces(n, m) && !periods.contains(&m) {
                return false;
            }
        }
    }
    true
}

/// Re-validates an externally produced orbit as an n(k)-cycle (used by tests).
pub fn orbit_is_nk_cycle(map: &ExpandingLorenzMap, orbit: &PeriodicOrbit, k: usize) -> bool {
    let n = orbit.period;
    if n == 0 || gcd(n, k.max(1)) != 1 {
        return false;
    }
    let mut points = orbit.points.clone();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    points
        .iter()
        .enumerate()
        .all(|(rank, &z)| match map.eval(SidedPoint::plain(z)) {
            Ok(img) => (img.x - points[(rank + k) % n]).abs() <= CYCLE_TOL,
            Err(_) => false,
        })
}
