//! The invariant density of the symmetric β-transformations.
//!
//! The unique absolutely continuous invariant probability measure of `F_β`
//! has density `K Σ_{n≥0} β^{-n} (1_{[0,F^n(1)]} - 1_{[0,F^n(0)]})`, where
//! the endpoint orbits are the one-sided ones `F^n(1-)`, `F^n(0+)` and `K`
//! normalizes the integral to 1. Truncating at `N` terms leaves an error
//! below `β^{-N}/(1 - 1/β)`.
//!
//! The truncated density is an explicit step function, so it is stored as
//! breakpoints and levels; integrals against polynomials (normalization,
//! invariance residuals, histogram bin masses) are evaluated exactly on the
//! pieces, and a uniform midpoint grid is kept alongside for CSV output and
//! support scans.

use serde::Serialize;
use thiserror::Error;

use crate::maps::{ExpandingLorenzMap, MapError, Side, SidedPoint};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("need at least {need} {what} (got {got})")]
    TooCoarse {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A polynomial in the monomial basis, used as a test function for
/// invariance residuals.
#[derive(Debug, Clone, Serialize)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value of the antiderivative with zero constant term.
    pub fn anti_eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.0.iter().enumerate().rev() {
            acc = acc * x + c / (k as f64 + 1.0);
        }
        acc * x
    }
}

/// Truncated series density: exact step representation plus a uniform
/// midpoint grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityApprox {
    pub beta: f64,
    /// Truncation depth N.
    pub terms: usize,
    /// Grid size M (midpoints `(m+1/2)/M`).
    pub grid_size: usize,
    /// Normalizing factor applied to the raw series.
    pub normalizer: f64,
    /// Upper bound `β^{-N}/(1-1/β)` on the truncated tail.
    pub truncation_bound: f64,
    /// Sorted interior breakpoints of the step function.
    breakpoints: Vec<f64>,
    /// Piece values; `levels[i]` holds on `(breakpoints[i-1], breakpoints[i])`.
    levels: Vec<f64>,
    /// `(x, density)` on the midpoint grid.
    pub grid: Vec<(f64, f64)>,
}

impl DensityApprox {
    /// Density value at `x`. Exactly on a breakpoint the two one-sided
    /// limits are averaged, which keeps the grid view mirror-symmetric even
    /// when dyadic orbit points collide with dyadic grid abscissas.
    pub fn value(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b < x);
        if idx < self.breakpoints.len() && self.breakpoints[idx] == x {
            0.5 * (self.levels[idx] + self.levels[idx + 1])
        } else {
            self.levels[idx]
        }
    }

    /// Exact `∫ f dμ` for a polynomial `f`.
    pub fn integrate(&self, f: &Polynomial) -> f64 {
        let mut total = 0.0;
        let mut left = 0.0_f64;
        for (i, &level) in self.levels.iter().enumerate() {
            let right = if i < self.breakpoints.len() {
                self.breakpoints[i]
            } else {
                1.0
            };
            total += level * (f.anti_eval(right) - f.anti_eval(left));
            left = right;
        }
        total
    }

    /// Exact `∫ f∘F dμ` for a polynomial `f`: pieces are further split at
    /// the critical point, where `F` is affine on each side.
    pub fn integrate_composed(&self, map: &ExpandingLorenzMap, f: &Polynomial) -> f64 {
        let c = map.critical();
        let mut total = 0.0;
        let mut left = 0.0_f64;
        for (i, &level) in self.levels.iter().enumerate() {
            let right = if i < self.breakpoints.len() {
                self.breakpoints[i]
            } else {
                1.0
            };
            for (a, b) in [(left, right.min(c)), (left.max(c), right)] {
                if b <= a {
                    continue;
                }
                let (slope, offset) = if b <= c {
                    (map.slope_left(), map.offset_left())
                } else {
                    (map.slope_right(), map.offset_right())
                };
                // ∫_a^b f(slope·x + offset) dx = [anti_f(slope·x+offset)]/slope.
                let hi = f.anti_eval((slope * b + offset).clamp(0.0, 1.0));
                let lo = f.anti_eval((slope * a + offset).clamp(0.0, 1.0));
                total += level * (hi - lo) / slope;
            }
            left = right;
        }
        total
    }

    /// Mass of `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.integrate_window(a, b)
    }

    fn integrate_window(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let mut left = 0.0_f64;
        for (i, &level) in self.levels.iter().enumerate() {
            let right = if i < self.breakpoints.len() {
                self.breakpoints[i]
            } else {
                1.0
            };
            let lo = left.max(a);
            let hi = right.min(b);
            if hi > lo {
                total += level * (hi - lo);
            }
            left = right;
        }
        total
    }
}

/// Evaluates the truncated Parry-type series for `F_β` (`N` terms, grid of
/// `M` midpoints), normalized to integral 1.
pub fn density(beta: f64, terms: usize, grid_size: usize) -> Result<DensityApprox, MeasureError> {
    if terms < 8 {
        return Err(MeasureError::TooCoarse {
            what: "series terms",
            need: 8,
            got: terms,
        });
    }
    if grid_size < 256 {
        return Err(MeasureError::TooCoarse {
            what: "grid points",
            need: 256,
            got: grid_size,
        });
    }
    let map = crate::maps::symmetric_beta(beta)?;
    // The series needs the orbits F^n(1-) and F^n(0+) for n < terms; these
    // are the one-sided critical orbits shifted by one step.
    let upper = map.critical_orbit(Side::Minus, terms)?;
    let lower = map.critical_orbit(Side::Plus, terms)?;
    let a: Vec<f64> = upper.into_iter().skip(1).collect();
    let b: Vec<f64> = lower.into_iter().skip(1).collect();
    debug_assert_eq!(a.len(), terms);
    debug_assert_eq!(b.len(), terms);

    let mut breakpoints: Vec<f64> = a
        .iter()
        .chain(b.iter())
        .copied()
        .filter(|&x| 0.0 < x && x < 1.0)
        .collect();
    breakpoints.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    breakpoints.dedup();

    let mut levels = Vec::with_capacity(breakpoints.len() + 1);
    let mut left = 0.0_f64;
    for i in 0..=breakpoints.len() {
        let right = if i < breakpoints.len() {
            breakpoints[i]
        } else {
            1.0
        };
        let mid = 0.5 * (left + right);
        let mut v = 0.0;
        let mut weight = 1.0;
        for n in 0..terms {
            v += weight * (f64::from(mid <= a[n]) - f64::from(mid <= b[n]));
            weight /= beta;
        }
        // The exact series is nonnegative; the truncated one can dip below
        // zero by at most the tail bound.
        levels.push(v.max(0.0));
        left = right;
    }

    // Normalize exactly over the pieces.
    let mut integral = 0.0;
    let mut l = 0.0;
    for (i, &v) in levels.iter().enumerate() {
        let rgt = if i < breakpoints.len() {
            breakpoints[i]
        } else {
            1.0
        };
        integral += v * (rgt - l);
        l = rgt;
    }
    let normalizer = 1.0 / integral;
    for v in &mut levels {
        *v *= normalizer;
    }

    let mut d = DensityApprox {
        beta,
        terms,
        grid_size,
        normalizer,
        truncation_bound: beta.powi(-(terms as i32)) / (1.0 - 1.0 / beta),
        breakpoints,
        levels,
        grid: Vec::with_capacity(grid_size),
    };
    let grid = (0..grid_size)
        .map(|m| {
            let x = (m as f64 + 0.5) / grid_size as f64;
            (x, d.value(x))
        })
        .collect();
    d.grid = grid;
    Ok(d)
}

/// `|∫ f∘F dμ - ∫ f dμ|` for each test polynomial, via exact piecewise
/// integration of the step density through both branches.
pub fn invariance_residual(
    map: &ExpandingLorenzMap,
    d: &DensityApprox,
    testfns: &[Polynomial],
) -> Vec<f64> {
    testfns
        .iter()
        .map(|f| (d.integrate_composed(map, f) - d.integrate(f)).abs())
        .collect()
}

/// Topological entropy of `F_β` is `ln β`.
pub fn entropy(beta: f64) -> f64 {
    beta.ln()
}

/// Companion estimator: `(1/n)·ln #{w ∈ {0,1}^n : w^∞ realized}`.
pub fn entropy_word_count(map: &ExpandingLorenzMap, n: usize) -> (usize, f64) {
    assert!(n <= 20, "word enumeration bound exceeded");
    let mut count = 0usize;
    let mut bits = vec![0u8; n];
    loop {
        let w = crate::symbolic::Word::new(bits.clone()).expect("n >= 1");
        if map.point_from_itinerary(&w).is_ok() {
            count += 1;
        }
        // Binary increment.
        let mut k = n;
        loop {
            if k == 0 {
                let estimate = (count as f64).ln() / n as f64;
                return (count, estimate);
            }
            k -= 1;
            if bits[k] == 0 {
                bits[k] = 1;
                break;
            }
            bits[k] = 0;
        }
    }
}

/// Maximal grid runs with density above `threshold`, merged across
/// single-cell gaps; returned as `[start, end]` in `x` coordinates.
pub fn support_intervals(d: &DensityApprox, threshold: f64) -> Vec<(f64, f64)> {
    assert!(threshold > 0.0);
    let m = d.grid_size as f64;
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (i, &(_, v)) in d.grid.iter().enumerate() {
        if v > threshold {
            current = match current {
                Some((s, _)) => Some((s, i)),
                None => Some((i, i)),
            };
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    if let Some(run) = current {
        runs.push(run);
    }
    // Merge across gaps of one cell.
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for run in runs {
        match merged.last_mut() {
            Some(last) if run.0 <= last.1 + 2 => last.1 = run.1,
            _ => merged.push(run),
        }
    }
    merged
        .into_iter()
        .map(|(s, e)| (s as f64 / m, (e + 1) as f64 / m))
        .collect()
}

/// Birkhoff histogram oracle: L1 distance between the empirical bin masses
/// of a long orbit and the analytic masses of `d`.
///
/// The orbit carries seeded jitter of size `1e-12` per step. Pure f64
/// iteration exhausts the mantissa for dyadic slopes (every double is
/// dyadic, so an exact `F_2` orbit collapses onto the fixed point within
/// ~53 steps); the jitter keeps the pseudo-orbit exploring at scales far
/// below the bin width.
pub fn histogram_l1_distance(
    map: &ExpandingLorenzMap,
    d: &DensityApprox,
    x0: f64,
    iterations: usize,
    bins: usize,
    burn_in: usize,
) -> Result<f64, MeasureError> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1017);
    let mut counts = vec![0usize; bins];
    let mut p = SidedPoint::plus(x0);
    let mut kept = 0usize;
    for k in 0..iterations + burn_in {
        if k >= burn_in {
            let idx = ((p.x * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
            kept += 1;
        }
        p = map.eval(p)?;
        p.x = (p.x + 1e-12 * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0);
    }
    let mut l1 = 0.0;
    for (i, &cnt) in counts.iter().enumerate() {
        let a = i as f64 / bins as f64;
        let b = (i + 1) as f64 / bins as f64;
        let analytic = d.mass(a, b);
        let empirical = cnt as f64 / kept as f64;
        l1 += (empirical - analytic).abs();
    }
    Ok(l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::symmetric_beta;

    #[test]
    fn doubling_density_is_lebesgue() {
        let d = density(2.0, 40, 1024).unwrap();
        for &(x, v) in &d.grid {
            assert!((v - 1.0).abs() < 1e-10, "x={x}: {v}");
        }
        assert!((d.integrate(&Polynomial(vec![1.0])) - 1.0).abs() < 1e-12);
        // ∫ x dμ = 1/2 for Lebesgue.
        assert!((d.integrate(&Polynomial(vec![0.0, 1.0])) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn densities_are_normalized_probability_densities() {
        for beta in [1.2, 1.5, 1.8, 2.0] {
            let d = density(beta, 40, 4096).unwrap();
            assert!((d.integrate(&Polynomial(vec![1.0])) - 1.0).abs() < 1e-6);
            assert!(d.grid.iter().all(|&(_, v)| v >= 0.0));
        }
    }

    #[test]
    fn invariance_residuals_are_small() {
        for beta in [1.5, 1.8, 2.0] {
            let map = symmetric_beta(beta).unwrap();
            let d = density(beta, 40, 4096).unwrap();
            let fns = [Polynomial(vec![0.0, 1.0]), Polynomial(vec![0.0, 0.0, 1.0])];
            for (i, r) in invariance_residual(&map, &d, &fns).iter().enumerate() {
                assert!(*r < 1e-4, "beta={beta}, f{i}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn invariance_residual_decreases_with_depth() {
        let map = symmetric_beta(1.5).unwrap();
        // A sin-like polynomial proxy: x(1-x)(1-2x) scaled.
        let f = Polynomial(vec![0.0, 1.0, -3.0, 2.0]);
        let mut last = f64::INFINITY;
        for terms in [10, 20, 40] {
            let d = density(1.5, terms, 2048).unwrap();
            let r = invariance_residual(&map, &d, std::slice::from_ref(&f))[0];
            assert!(r < last.max(1e-12) * 1.5, "terms={terms}: {r:.3e}");
            last = r;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn density_is_symmetric() {
        for beta in [1.3, 1.5, 1.8] {
            let d = density(beta, 40, 4096).unwrap();
            let m = d.grid.len();
            for i in 0..m / 2 {
                let (_, v) = d.grid[i];
                let (_, w) = d.grid[m - 1 - i];
                assert!((v - w).abs() < 1e-6, "beta={beta}, i={i}");
            }
        }
    }

    #[test]
    fn entropy_estimates() {
        assert!((entropy(2.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((entropy(2.0_f64.sqrt()) - std::f64::consts::LN_2 / 2.0).abs() < 1e-15);

        for beta in [1.6, 1.9] {
            let map = symmetric_beta(beta).unwrap();
            let (_, estimate) = entropy_word_count(&map, 16);
            assert!(
                (estimate - beta.ln()).abs() < 0.05,
                "beta={beta}: estimate {estimate:.4} vs {:.4}",
                beta.ln()
            );
        }
    }

    #[test]
    fn support_examples() {
        // Full support for beta >= sqrt2.
        for beta in [1.5, 1.9, 2.0_f64.sqrt(), crate::kneading::epsilon(2)] {
            let d = density(beta, 40, 4096).unwrap();
            let support = support_intervals(&d, 1e-3);
            assert_eq!(support.len(), 1, "beta={beta}: {support:?}");
            let (a, b) = support[0];
            assert!(a < 2.0 / 4096.0 && b > 1.0 - 2.0 / 4096.0, "beta={beta}");
        }

        // beta=1.2 is renormalizable: the support splits into several
        // intervals (the renormalization interval [F(0),F(1)] plus its
        // images, which reach the endpoints since F(c±) = 0, 1), leaving
        // genuine gaps. In the trapping-region coordinates of the
        // unrescaled factor map those pieces sit strictly inside (0,1).
        let d = density(1.2, 60, 4096).unwrap();
        let support = support_intervals(&d, 1e-3);
        assert!(support.len() >= 2, "{support:?}");
        let covered: f64 = support.iter().map(|(a, b)| b - a).sum();
        assert!(covered < 0.9, "support should have gaps: {support:?}");

        // A threshold above the maximum empties the list.
        let max = d.grid.iter().map(|&(_, v)| v).fold(0.0, f64::max);
        assert!(support_intervals(&d, max + 1.0).is_empty());
    }

    #[test]
    fn histogram_matches_density() {
        for beta in [1.5, 1.8, 2.0] {
            let map = symmetric_beta(beta).unwrap();
            let d = density(beta, 40, 4096).unwrap();
            let l1 = histogram_l1_distance(&map, &d, 0.1234567891, 1_000_000, 512, 1000).unwrap();
            assert!(l1 < 0.05, "beta={beta}: L1 {l1:.4}");
        }
    }

    #[test]
    fn histogram_matches_density_in_renormalizable_range() {
        let map = symmetric_beta(1.2).unwrap();
        let d = density(1.2, 60, 4096).unwrap();
        let l1 = histogram_l1_distance(&map, &d, 0.437, 1_000_000, 512, 1000).unwrap();
        assert!(l1 < 0.05, "L1 {l1:.4}");
    }
}
