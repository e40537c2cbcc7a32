//! The two-slope maps `H_{s,r}` and their conjugate β-transformations.
//!
//! A non-symmetric perturbation of the factor map has the form `f_{s,r}(x) =
//! rx` on `[0,1/2)` and `1 - s/2 + s(x-1/2)` on `(1/2,1]` with `s,r ∈ (1,2]`.
//! Restricting to the trapping interval `[a,b] = [1-s/2, r/2]` and rescaling
//! to `[0,1]` gives the expanding Lorenz map
//!
//! ```text
//! H_{s,r}(x) = rx + 1 - rc  on [0,c),    s(x - c)  on (c,1],
//! c = (s-1)/(r+s-2),
//! ```
//!
//! which collapses to the symmetric `F_s` when `r = s`. For `s ∈ (1,√2]` and
//! `r` between the region curves `L(s)` and `U(s)`, `H_{s,r}` carries a
//! primary 2(1)-cycle with closed-form points and is topologically conjugate
//! to the β-transformation with `β = √(rs)`; the conjugacy is certified here
//! by kneading-prefix equality.

use serde::Serialize;
use thiserror::Error;

use crate::maps::{beta_transform, two_slope_raw, ExpandingLorenzMap, MapError, SidedPoint};

#[derive(Debug, Error)]
pub enum NonSymError {
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error(transparent)]
    Map(#[from] MapError),
}

fn check_unit_slope(name: &'static str, value: f64) -> Result<(), NonSymError> {
    if !(1.0 < value && value <= 2.0) {
        return Err(NonSymError::OutOfRange {
            name,
            value,
            range: "(1,2]",
        });
    }
    Ok(())
}

/// The piecewise map `f_{s,r}` on `[0,1]` before restriction to its trapping
/// interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbedFactorMap {
    pub s: f64,
    pub r: f64,
}

impl PerturbedFactorMap {
    pub fn new(s: f64, r: f64) -> Result<Self, NonSymError> {
        check_unit_slope("s", s)?;
        check_unit_slope("r", r)?;
        Ok(PerturbedFactorMap { s, r })
    }

    /// Pointwise evaluation (undefined exactly at 1/2; the right branch is
    /// used there, matching the one-sided convention downstream).
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.5 {
            self.r * x
        } else {
            1.0 - self.s / 2.0 + self.s * (x - 0.5)
        }
    }

    /// The trapping interval `[a,b] = [f(1/2+), f(1/2-)] = [1-s/2, r/2]`,
    /// which contains 1/2 and absorbs every orbit except the fixed points.
    pub fn trapping_interval(&self) -> (f64, f64) {
        (1.0 - self.s / 2.0, self.r / 2.0)
    }
}

/// `H_{s,r}`: left slope `r`, right slope `s`, critical point
/// `c = (s-1)/(r+s-2)`.
#[derive(Debug, Clone, Serialize)]
pub struct TwoSlopeMap {
    pub s: f64,
    pub r: f64,
    pub critical: f64,
    map: ExpandingLorenzMap,
}

impl TwoSlopeMap {
    pub fn new(s: f64, r: f64) -> Result<Self, NonSymError> {
        check_unit_slope("s", s)?;
        check_unit_slope("r", r)?;
        let critical = (s - 1.0) / (r + s - 2.0);
        let map = two_slope_raw(r, 1.0 - r * critical, s, -s * critical, critical, s, r)?;
        Ok(TwoSlopeMap {
            s,
            r,
            critical,
            map,
        })
    }

    pub fn as_map(&self) -> &ExpandingLorenzMap {
        &self.map
    }

    pub fn into_map(self) -> ExpandingLorenzMap {
        self.map
    }
}

/// Builds `H_{s,r}` from `f_{s,r}` by the closed-form coefficients and
/// verifies them against the direct conjugation `h ∘ f ∘ h⁻¹` on a 100-point
/// grid; the maximal deviation is returned alongside.
pub fn rescale_to_h(f: &PerturbedFactorMap) -> Result<(TwoSlopeMap, f64), NonSymError> {
    let h = TwoSlopeMap::new(f.s, f.r)?;
    let (a, b) = f.trapping_interval();
    let width = b - a;
    let mut dev = 0.0_f64;
    for i in 0..100 {
        let y = (i as f64 + 0.37) / 100.0;
        if (y - h.critical).abs() < 1e-9 {
            continue;
        }
        let direct = (f.eval(a + width * y) - a) / width;
        let closed = h.map.eval(SidedPoint::plain(y))?.x;
        dev = dev.max((closed - direct).abs());
    }
    Ok((h, dev))
}

/// The region curves `L(s) ≤ r ≤ U(s)` of the primary-2(1)-cycle region,
/// defined for `s ∈ (1, √2]`.
pub fn region_curves(s: f64) -> Result<(f64, f64), NonSymError> {
    if !(1.0 < s && s <= 2.0_f64.sqrt() + 1e-15) {
        return Err(NonSymError::OutOfRange {
            name: "s",
            value: s,
            range: "(1, sqrt(2)]",
        });
    }
    let lower =
        1.0 / (2.0 * s) + 0.5 * ((8.0 * s * s - 9.0 * s + 2.0) / (s * s * (2.0 - s))).sqrt();
    let upper = (2.0 * s * s + s - 2.0) / (2.0 * s * s)
        + 0.5 * ((4.0 * s.powi(4) - 4.0 * s.powi(3) + s * s - 4.0 * s + 4.0) / s.powi(4)).sqrt();
    Ok((lower, upper))
}

/// The primary 2(1)-cycle of `H_{s,r}`:
/// `z_0 = s(c+rc-1)/(rs-1)`, `z_1 = (rc(s+1)-1)/(rs-1)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CyclePoints {
    pub z0: f64,
    pub z1: f64,
    /// Residuals of `H(z_0) = z_1` and `H(z_1) = z_0`.
    pub residual: f64,
}

pub fn cycle_points(s: f64, r: f64) -> Result<CyclePoints, NonSymError> {
    let (lower, upper) = region_curves(s)?;
    if !(lower - 1e-12 <= r && r <= upper + 1e-12) {
        return Err(NonSymError::OutOfRange {
            name: "r",
            value: r,
            range: "[L(s), U(s)]",
        });
    }
    let h = TwoSlopeMap::new(s, r)?;
    let c = h.critical;
    let z0 = s * (c + r * c - 1.0) / (r * s - 1.0);
    let z1 = (r * c * (s + 1.0) - 1.0) / (r * s - 1.0);
    let map = h.as_map();
    let fz0 = map.eval(SidedPoint::plain(z0))?.x;
    let fz1 = map.eval(SidedPoint::plain(z1))?.x;
    let residual = (fz0 - z1).abs().max((fz1 - z0).abs());
    debug_assert!(z0 < c && c < z1);
    debug_assert!(z0 <= map.at_zero() + 1e-9 && map.at_one() <= z1 + 1e-9);
    Ok(CyclePoints { z0, z1, residual })
}

/// The conjugate β-transformation of `H_{s,r}` with its kneading
/// certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub beta: f64,
    pub alpha: f64,
    /// Length over which the kneading invariants of `H_{s,r}` and
    /// `F_{β,α}` were compared.
    pub certificate_len: usize,
    pub certificate: bool,
    pub kneading_prefix: String,
}

/// `β = √(rs)` and the closed-form `α`; the conjugacy is certified by
/// kneading equality over `certificate_len` symbols (default callers use
/// 48).
pub fn conjugate_beta_alpha(
    s: f64,
    r: f64,
    certificate_len: usize,
) -> Result<ConjugacyReport, NonSymError> {
    let h = TwoSlopeMap::new(s, r)?;
    let c = h.critical;
    let beta = (r * s).sqrt();
    let alpha = 1.0 / (beta + 1.0)
        - beta * (beta - 1.0) * (c - (1.0 - r * c))
            / ((beta + 1.0) * (s * (1.0 - c) - (1.0 - r * c)));
    let target = beta_transform(beta, alpha.clamp(0.0, 2.0 - beta))?;
    let kh = h.as_map().kneading(certificate_len)?;
    let kt = target.kneading(certificate_len)?;
    let mut certificate = true;
    for i in 0..certificate_len {
        let a = kh.plus.symbol(i);
        let b = kt.plus.symbol(i);
        let am = kh.minus.symbol(i);
        let bm = kt.minus.symbol(i);
        if a != b || am != bm {
            certificate = false;
            break;
        }
    }
    let kneading_prefix = kh
        .plus
        .prefix(certificate_len)
        .map(|w| w.to_string())
        .unwrap_or_default();
    Ok(ConjugacyReport {
        beta,
        alpha,
        certificate_len,
        certificate,
        kneading_prefix,
    })
}
