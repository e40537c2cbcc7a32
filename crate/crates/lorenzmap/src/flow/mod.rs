//! Numerical Lorenz-system harness.
//!
//! The flow `ẋ = σ(y-x)`, `ẏ = x(ρ-z)-y`, `ż = xy-μz` is integrated with
//! the in-repo Dormand–Prince scheme. For parameters in the region
//! `P = {ρ > max(1, (σ+1)²/4σ)}` the plane `z = ρ-1` (which carries both
//! nontrivial fixed points) with downward crossings serves as the numerical
//! cross-section; crossing symbols are `0` for `x < 0` and `1` for `x > 0`.
//!
//! The kneading data of the flow is the pair of crossing itineraries of the
//! two branches of the origin's unstable manifold, launched `±δ` along the
//! unstable eigenvector. The branch starting with symbol 1 is fitted to a
//! symmetric β-transformation through `beta_from_kneading`, with
//! offset-robustness (δ → δ/10) and mirror-consistency diagnostics. Near a
//! heteroclinic trefoil the prefix degenerates to `10^k` with growing `k`
//! and the fitted slope approaches 2.

pub mod ode;

use serde::Serialize;
use thiserror::Error;

use crate::kneading::{beta_from_kneading, ClassifyError, KneadingTarget};
use crate::symbolic::Word;
use ode::{DenseStep, Dopri5, OdeError, State};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("parameters must be positive")]
    BadParameters,
    #[error("parameters lie outside the region P")]
    OutsideRegionP,
    #[error("config: {0}")]
    BadConfig(String),
    #[error("trajectory left the lateral bounds at t = {t:.3}")]
    Escape { t: f64 },
    #[error("no section return within {t_max} time units")]
    Timeout { t_max: f64 },
    #[error("trajectory passed within the guard distance of the origin")]
    NearOrigin,
    #[error("start point is on the numerical discontinuity locus")]
    OnDiscontinuity,
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Fit(#[from] ClassifyError),
}

/// Lorenz parameters `(σ, ρ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub mu: f64,
}

impl LorenzParams {
    pub fn new(sigma: f64, rho: f64, mu: f64) -> Result<Self, FlowError> {
        if !(sigma > 0.0 && rho > 0.0 && mu > 0.0) {
            return Err(FlowError::BadParameters);
        }
        Ok(LorenzParams { sigma, rho, mu })
    }

    /// The classical chaotic parameters `(10, 28, 8/3)`.
    pub fn classic() -> Self {
        LorenzParams {
            sigma: 10.0,
            rho: 28.0,
            mu: 8.0 / 3.0,
        }
    }

    /// The first T-point `(10.2, 30.38, 8/3)`.
    pub fn first_t_point() -> Self {
        LorenzParams {
            sigma: 10.2,
            rho: 30.38,
            mu: 8.0 / 3.0,
        }
    }

    /// `ρ > max(1, (σ+1)²/4σ)`.
    pub fn in_region_p(&self) -> bool {
        self.rho > 1.0_f64.max((self.sigma + 1.0).powi(2) / (4.0 * self.sigma))
    }

    pub fn vector_field(&self, s: &State) -> State {
        [
            self.sigma * (s[1] - s[0]),
            s[0] * (self.rho - s[2]) - s[1],
            s[0] * s[1] - self.mu * s[2],
        ]
    }

    /// The nontrivial fixed points `(±√(μ(ρ-1)), ±√(μ(ρ-1)), ρ-1)`.
    pub fn fixed_points(&self) -> Option<(State, State)> {
        if self.rho <= 1.0 {
            return None;
        }
        let a = (self.mu * (self.rho - 1.0)).sqrt();
        Some(([a, a, self.rho - 1.0], [-a, -a, self.rho - 1.0]))
    }

    /// Positive eigenvalue and unit eigenvector (x-component > 0) of the
    /// linearization at the origin; the z-direction decouples.
    pub fn unstable_direction(&self) -> (f64, State) {
        let s = self.sigma;
        let disc = ((s + 1.0).powi(2) + 4.0 * s * (self.rho - 1.0)).sqrt();
        let lambda = 0.5 * (-(s + 1.0) + disc);
        let v = [s, s + lambda, 0.0];
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        (lambda, [v[0] / norm, v[1] / norm, 0.0])
    }
}

/// The plane `z = ρ-1` with lateral bounds, crossed downward.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossSection {
    pub z_plane: f64,
    pub x_bound: f64,
    pub y_bound: f64,
}

impl CrossSection {
    /// Bounds scaled so the fixed points sit strictly inside.
    pub fn standard(params: &LorenzParams) -> Self {
        let a = (params.mu * (params.rho - 1.0).max(0.0)).sqrt();
        let bound = (6.0 * a).max(25.0);
        CrossSection {
            z_plane: params.rho - 1.0,
            x_bound: bound,
            y_bound: bound,
        }
    }
}

/// Numerical knobs of the harness.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowConfig {
    /// Integration tolerance (both absolute and relative).
    pub tol: f64,
    /// Separatrix launch offset along the unstable eigenvector.
    pub delta: f64,
    /// Near-origin guard distance: closer passes truncate symbol streams.
    pub delta0: f64,
    /// Time budget per section return.
    pub t_max: f64,
    /// Crossings earlier than this after a start on the section are ignored.
    pub min_return_time: f64,
    /// Lateral section bounds; `None` scales them from the fixed points.
    pub x_bound: Option<f64>,
    pub y_bound: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            tol: 1e-12,
            delta: 1e-8,
            delta0: 1e-5,
            t_max: 50.0,
            min_return_time: 1e-3,
            x_bound: None,
            y_bound: None,
        }
    }
}

impl FlowConfig {
    /// Parses a line-based `key=value` config body.
    pub fn parse(text: &str) -> Result<Self, FlowError> {
        let mut cfg = FlowConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(FlowError::BadConfig(format!(
                    "line {}: expected key=value",
                    lineno + 1
                )));
            };
            let value: f64 = value.trim().parse().map_err(|_| {
                FlowError::BadConfig(format!("line {}: bad number {value:?}", lineno + 1))
            })?;
            match key.trim() {
                "tol" => cfg.tol = value,
                "delta" => cfg.delta = value,
                "delta0" => cfg.delta0 = value,
                "t_max" => cfg.t_max = value,
                "min_return_time" => cfg.min_return_time = value,
                "x_bound" => cfg.x_bound = Some(value),
                "y_bound" => cfg.y_bound = Some(value),
                other => {
                    return Err(FlowError::BadConfig(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        if !(1e-13..=1e-6).contains(&cfg.tol) {
            return Err(FlowError::BadConfig(format!(
                "tol = {} outside [1e-13, 1e-6]",
                cfg.tol
            )));
        }
        if !(1e-10..=1e-6).contains(&cfg.delta) {
            return Err(FlowError::BadConfig(format!(
                "delta = {} outside [1e-10, 1e-6]",
                cfg.delta
            )));
        }
        Ok(cfg)
    }
}

/// One Poincaré return: landing point, flight time, side symbol.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReturnRecord {
    pub point: (f64, f64),
    pub return_time: f64,
    pub symbol: u8,
}

/// Why a symbol stream stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    None,
    NearOrigin,
    Timeout,
    Escape,
}

struct Crossing {
    t: f64,
    state: State,
}

/// Scans a dense step for the first downward crossing of the plane after
/// `t_min`, localized by bisection to 1e-10 in time.
fn locate_crossing(step: &DenseStep, z_plane: f64, t_min: f64) -> Option<Crossing> {
    const SUBSAMPLES: usize = 8;
    let g = |t: f64| step.eval(t)[2] - z_plane;
    let mut t_prev = step.t0.max(t_min);
    if t_prev >= step.t_end() {
        return None;
    }
    let mut g_prev = g(t_prev);
    for k in 1..=SUBSAMPLES {
        let t_next = step.t0 + step.h * (k as f64) / (SUBSAMPLES as f64);
        if t_next <= t_prev {
            continue;
        }
        let g_next = g(t_next);
        if g_prev > 0.0 && g_next <= 0.0 {
            let (mut lo, mut hi) = (t_prev, t_next);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t_hit = 0.5 * (lo + hi);
            return Some(Crossing {
                t: t_hit,
                state: step.eval(t_hit),
            });
        }
        t_prev = t_next;
        g_prev = g_next;
    }
    None
}

struct SymbolRun {
    symbols: Vec<u8>,
    records: Vec<ReturnRecord>,
    truncation: Truncation,
}

/// Integrates from `start`, collecting up to `n_symbols` downward section
/// crossings. The near-origin guard arms once the trajectory has left the
/// origin's neighborhood and truncates the stream on any later close pass.
fn run_symbols(
    params: &LorenzParams,
    section: &CrossSection,
    config: &FlowConfig,
    start: State,
    n_symbols: usize,
) -> Result<SymbolRun, FlowError> {
    let rhs = |s: &State| params.vector_field(s);
    let mut ode = Dopri5::new(rhs, config.tol);
    ode.h_max = 0.1;
    let mut symbols = Vec::with_capacity(n_symbols);
    let mut records = Vec::with_capacity(n_symbols);
    let mut truncation = Truncation::None;

    let mut t = 0.0;
    let mut y = start;
    let mut h = 1e-6;
    let mut last_cross_t = 0.0;
    let mut armed = {
        let r2 = start.iter().map(|v| v * v).sum::<f64>();
        r2 > (10.0 * config.delta0).powi(2)
    };
    let origin_r2 = config.delta0 * config.delta0;

    while symbols.len() < n_symbols {
        if t - last_cross_t > config.t_max {
            truncation = Truncation::Timeout;
            break;
        }
        let (step, h_next) = ode.step(t, &y, h)?;
        if step.y1[0].abs() > section.x_bound || step.y1[1].abs() > section.y_bound {
            truncation = Truncation::Escape;
            break;
        }
        let r2 = step.y1.iter().map(|v| v * v).sum::<f64>();
        if armed && r2 < origin_r2 {
            truncation = Truncation::NearOrigin;
            break;
        }
        if !armed && r2 > (10.0 * config.delta0).powi(2) {
            armed = true;
        }
        if let Some(cross) = locate_crossing(
            &step,
            section.z_plane,
            last_cross_t + config.min_return_time,
        ) {
            let symbol = u8::from(cross.state[0] > 0.0);
            records.push(ReturnRecord {
                point: (cross.state[0], cross.state[1]),
                return_time: cross.t - last_cross_t,
                symbol,
            });
            symbols.push(symbol);
            last_cross_t = cross.t;
        }
        t = step.t_end();
        y = step.y1;
        h = h_next;
    }
    Ok(SymbolRun {
        symbols,
        records,
        truncation,
    })
}

/// First return of a section point under the flow.
pub fn first_return(
    params: &LorenzParams,
    section: &CrossSection,
    config: &FlowConfig,
    q: (f64, f64),
) -> Result<ReturnRecord, FlowError> {
    if q.0.abs() > section.x_bound || q.1.abs() > section.y_bound {
        return Err(FlowError::Escape { t: 0.0 });
    }
    if q.0 == 0.0 {
        return Err(FlowError::OnDiscontinuity);
    }
    let start = [q.0, q.1, section.z_plane];
    let run = run_symbols(params, section, config, start, 1)?;
    match run.truncation {
        Truncation::None => Ok(run.records[0]),
        Truncation::Timeout => Err(FlowError::Timeout {
            t_max: config.t_max,
        }),
        Truncation::NearOrigin => Err(FlowError::NearOrigin),
        Truncation::Escape => Err(FlowError::Escape { t: 0.0 }),
    }
}

/// Separatrix kneading data with the fitted one-dimensional slope.
#[derive(Debug, Clone, Serialize)]
pub struct FlowKneading {
    /// Itinerary of the branch launched toward x > 0 (starts with 1).
    pub omega0: String,
    /// Itinerary of the mirrored branch.
    pub omega1: String,
    /// Prefix length stable under delta → delta/10.
    pub stable_len: usize,
    /// Prefix length over which omega1 mirrors omega0.
    pub mirror_len: usize,
    pub fitted_beta: f64,
    /// Symbols of omega0 matched by the kneading of the fitted map.
    pub match_len: usize,
    /// Length of the maximal `10^k` prefix of omega0.
    pub k10: usize,
    pub truncation: Truncation,
}

/// Launches the two separatrices `±δ` along the unstable eigenvector,
/// records their crossing itineraries, and fits `β`.
pub fn separatrix_kneading(
    params: &LorenzParams,
    config: &FlowConfig,
    n_symbols: usize,
) -> Result<FlowKneading, FlowError> {
    if !params.in_region_p() {
        return Err(FlowError::OutsideRegionP);
    }
    assert!(n_symbols >= 2);
    let mut section = CrossSection::standard(params);
    if let Some(b) = config.x_bound {
        section.x_bound = b;
    }
    if let Some(b) = config.y_bound {
        section.y_bound = b;
    }
    let (_, v) = params.unstable_direction();

    let launch = |delta: f64, sign: f64| -> Result<SymbolRun, FlowError> {
        let start = [
            sign * delta * v[0],
            sign * delta * v[1],
            sign * delta * v[2],
        ];
        run_symbols(params, &section, config, start, n_symbols)
    };
    let plus = launch(config.delta, 1.0)?;
    let minus = launch(config.delta, -1.0)?;
    let plus_fine = launch(config.delta / 10.0, 1.0)?;

    // Like the upper kneading sequence 1·η(F(c+)) of the maps, the flow
    // itinerary opens with the launch-side symbol: the +x branch makes its
    // initial excursion around the right wing before its first recorded
    // downward crossing.
    let with_lead = |lead: u8, run: &SymbolRun| -> Vec<u8> {
        let mut bits = Vec::with_capacity(run.symbols.len() + 1);
        bits.push(lead);
        bits.extend_from_slice(&run.symbols);
        bits
    };
    let omega0_bits = with_lead(1, &plus);
    let omega1_bits = with_lead(0, &minus);
    let omega0_fine = with_lead(1, &plus_fine);

    let stable_len = omega0_bits
        .iter()
        .zip(&omega0_fine)
        .take_while(|(a, b)| a == b)
        .count();
    let mirror_len = omega0_bits
        .iter()
        .zip(&omega1_bits)
        .take_while(|(a, b)| **a == 1 - **b)
        .count();
    let truncation = plus.truncation;

    let fit_len = stable_len.clamp(1, 48.min(omega0_bits.len()));
    let target = Word::new(omega0_bits[..fit_len].to_vec()).expect("fit_len >= 1");
    let fit = beta_from_kneading(&KneadingTarget::Prefix(target), fit_len.min(48))?;

    let k10 = omega0_bits.iter().skip(1).take_while(|&&s| s == 0).count();
    let word = |bits: &[u8]| bits.iter().map(|b| b.to_string()).collect::<String>();
    Ok(FlowKneading {
        omega0: word(&omega0_bits),
        omega1: word(&omega1_bits),
        stable_len,
        mirror_len,
        fitted_beta: fit.beta,
        match_len: fit.matched_len.min(fit_len),
        k10,
        truncation,
    })
}

/// T-point proximity diagnostics: the `10^k` prefix length and the fitted
/// slope (which tends to 2 as the parameters approach a trefoil).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TPointDiagnostic {
    pub k10: usize,
    pub fitted_beta: f64,
}

pub fn t_point_proximity(
    params: &LorenzParams,
    config: &FlowConfig,
    n_symbols: usize,
) -> Result<TPointDiagnostic, FlowError> {
    let kneading = separatrix_kneading(params, config, n_symbols)?;
    Ok(TPointDiagnostic {
        k10: kneading.k10,
        fitted_beta: kneading.fitted_beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_p_matches_closed_form() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..1000 {
            let sigma = rng.gen_range(0.1..40.0);
            let rho = rng.gen_range(0.1..60.0);
            let mu = rng.gen_range(0.1..10.0);
            let p = LorenzParams::new(sigma, rho, mu).unwrap();
            let quad = (sigma + 1.0) * (sigma + 1.0) / (4.0 * sigma);
            let threshold = if quad > 1.0 { quad } else { 1.0 };
            assert_eq!(p.in_region_p(), rho > threshold);
        }
    }

    #[test]
    fn vector_field_examples() {
        let p = LorenzParams::classic();
        assert_eq!(p.vector_field(&[0.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);

        let (plus, minus) = p.fixed_points().unwrap();
        for fp in [plus, minus] {
            let v = p.vector_field(&fp);
            let norm = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(norm < 1e-12, "residual {norm:.3e}");
        }

        let v = p.vector_field(&[1.0, 1.0, 1.0]);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 26.0);
        assert!((v[2] - (1.0 - 8.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn unstable_direction_is_an_eigenvector() {
        let p = LorenzParams::classic();
        let (lambda, v) = p.unstable_direction();
        assert!(lambda > 0.0);
        // Linearization at the origin: [[-s, s, 0], [rho, -1, 0], [0,0,-mu]].
        let jx = -p.sigma * v[0] + p.sigma * v[1];
        let jy = p.rho * v[0] - v[1];
        assert!((jx - lambda * v[0]).abs() < 1e-12);
        assert!((jy - lambda * v[1]).abs() < 1e-12);
    }

    #[test]
    fn origin_is_stationary_and_orbits_stay_bounded() {
        let p = LorenzParams::classic();
        let ode = Dopri5::new(|s: &State| p.vector_field(s), 1e-10);
        let (_, y) = ode.drive(0.0, [0.0, 0.0, 0.0], 5.0, |_| true).unwrap();
        assert_eq!(y, [0.0, 0.0, 0.0]);

        let mut max_r2_late = 0.0_f64;
        ode.drive(0.0, [3.0, -7.0, 15.0], 50.0, |step| {
            if step.t0 > 25.0 {
                let r2 = step.y1.iter().map(|v| v * v).sum::<f64>();
                max_r2_late = max_r2_late.max(r2);
            }
            true
        })
        .unwrap();
        assert!(max_r2_late < 100.0 * 100.0, "orbit escaped: {max_r2_late}");
    }

    #[test]
    fn equivariance_under_rotation() {
        let p = LorenzParams::classic();
        let ode = Dopri5::new(|s: &State| p.vector_field(s), 1e-12);
        let (_, a) = ode.drive(0.0, [2.0, 3.0, 20.0], 20.0, |_| true).unwrap();
        let (_, b) = ode.drive(0.0, [-2.0, -3.0, 20.0], 20.0, |_| true).unwrap();
        // (x,y,z) -> (-x,-y,z) maps solutions to solutions, exactly in IEEE.
        assert_eq!(a[0], -b[0]);
        assert_eq!(a[1], -b[1]);
        assert_eq!(a[2], b[2]);
    }

    #[test]
    fn integration_tolerance_consistency() {
        let p = LorenzParams::classic();
        let run = |tol: f64| {
            let ode = Dopri5::new(|s: &State| p.vector_field(s), tol);
            ode.drive(0.0, [1.0, 1.0, 20.0], 10.0, |_| true).unwrap().1
        };
        let a = run(1e-12);
        let b = run(1e-13);
        // Chaotic amplification over T=10 is about e^(0.9*10) ~ 1e4.
        let diff = (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-5, "diff = {diff:.3e}");
    }

    #[test]
    fn first_return_basic() {
        let p = LorenzParams::classic();
        let section = CrossSection::standard(&p);
        let config = FlowConfig {
            tol: 1e-10,
            ..FlowConfig::default()
        };
        let record = first_return(&p, &section, &config, (8.0, 9.0)).unwrap();
        assert!(record.return_time > config.min_return_time);
        assert!(record.point.0.abs() <= section.x_bound);

        // Mirrored seeds give mirrored records.
        let mirrored = first_return(&p, &section, &config, (-8.0, -9.0)).unwrap();
        assert!((record.point.0 + mirrored.point.0).abs() < 1e-8);
        assert!((record.point.1 + mirrored.point.1).abs() < 1e-8);
        assert_eq!(record.symbol, 1 - mirrored.symbol);
    }

    #[test]
    fn return_symbols_mirror_for_sampled_seeds() {
        use rand::Rng;
        use rand::SeedableRng;
        let p = LorenzParams::classic();
        let section = CrossSection::standard(&p);
        let config = FlowConfig {
            tol: 1e-10,
            ..FlowConfig::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        let mut checked = 0;
        for _ in 0..50 {
            let x: f64 = rng.gen_range(1.0..12.0);
            let y: f64 = rng.gen_range(-12.0..12.0);
            let a = first_return(&p, &section, &config, (x, y));
            let b = first_return(&p, &section, &config, (-x, -y));
            if let (Ok(a), Ok(b)) = (a, b) {
                assert_eq!(a.symbol, 1 - b.symbol, "seed ({x}, {y})");
                checked += 1;
            }
        }
        assert!(checked >= 40, "only {checked} mirrored pairs returned");
    }

    #[test]
    fn near_origin_guard_triggers() {
        let p = LorenzParams::classic();
        let section = CrossSection::standard(&p);
        let config = FlowConfig::default();
        // The z-axis is invariant and decays straight into the origin, so
        // the armed guard must truncate the run.
        let run = run_symbols(&p, &section, &config, [0.0, 0.0, 1.0], 3).unwrap();
        assert_eq!(run.truncation, Truncation::NearOrigin);
        assert!(run.symbols.is_empty());
    }

    #[test]
    fn config_parsing() {
        let cfg = FlowConfig::parse("tol = 1e-10\n# comment\ndelta=1e-9\nx_bound = 60\n").unwrap();
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.delta, 1e-9);
        assert_eq!(cfg.x_bound, Some(60.0));
        assert!(FlowConfig::parse("tol = banana").is_err());
        assert!(FlowConfig::parse("unknown = 3").is_err());
        assert!(FlowConfig::parse("tol = 0.5").is_err());
    }

    #[test]
    fn separatrix_kneading_at_classic_parameters() {
        let p = LorenzParams::classic();
        let k = separatrix_kneading(&p, &FlowConfig::default(), 30).unwrap();
        assert!(k.omega0.starts_with('1'));
        assert!(k.mirror_len >= 20, "mirror_len = {}", k.mirror_len);
        assert!(k.stable_len >= 20, "stable_len = {}", k.stable_len);
        assert!(1.0 < k.fitted_beta && k.fitted_beta <= 2.0);
        assert!(k.match_len >= 10, "match_len = {}", k.match_len);
    }

    #[test]
    fn t_point_has_long_laminar_prefix() {
        let p = LorenzParams::first_t_point();
        let d = t_point_proximity(&p, &FlowConfig::default(), 24).unwrap();
        assert!(d.k10 >= 5, "k10 = {}", d.k10);
        assert!(
            (d.fitted_beta - 2.0).abs() < 0.15,
            "beta = {}",
            d.fitted_beta
        );
    }

    #[test]
    fn laminar_prefix_grows_toward_the_t_point() {
        let cfg = FlowConfig::default();
        let mut prev = 0usize;
        for rho in [28.0, 29.0, 30.0, 30.38] {
            let p = LorenzParams::new(10.2, rho, 8.0 / 3.0).unwrap();
            let d = t_point_proximity(&p, &cfg, 40).unwrap();
            assert!(
                d.k10 >= prev,
                "k10 dropped from {prev} to {} at rho={rho}",
                d.k10
            );
            prev = d.k10;
        }
        assert!(prev >= 30, "k10 near the T-point: {prev}");
    }

    #[test]
    fn outside_region_p_rejected() {
        let p = LorenzParams::new(10.0, 0.5, 8.0 / 3.0).unwrap();
        assert!(matches!(
            separatrix_kneading(&p, &FlowConfig::default(), 10),
            Err(FlowError::OutsideRegionP)
        ));
    }
}
