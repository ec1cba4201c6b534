//! Second-order rate bounds and moderate-deviation brackets.
//!
//! Every output here is an explicit second-order approximation: the capacity
//! plus the 1/√n terms, with the O(log n/n) and o(1/√n) remainders dropped.
//! Each [`RateBoundResult`] labels which remainder class was discarded on
//! each side.

use thiserror::Error;

use crate::dispersion::{func_c_nats, func_l, func_v, DispersionError, DispersionSet};
use crate::distributions::{EnergyLaw, FadingLaw};
use crate::normal;
use crate::quadrature::{Quadrature, QuadratureError};
use crate::waterfilling::{ChannelConfig, WaterfillSolution};
use crate::LOG2_E_SQ;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    PeakPower,
    AveragePower,
    EnergyHarvest,
    NoCsit,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::PeakPower => "PP",
            Constraint::AveragePower => "AP",
            Constraint::EnergyHarvest => "EH",
            Constraint::NoCsit => "no-CSIT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("alpha grid is empty")]
    EmptyGrid,
    #[error("energy-harvesting bounds need a dispersion set computed with an energy law")]
    MissingEnergyDispersion,
    #[error("energy law mean {energy_mean} does not match the solved average power {pbar}")]
    MeanMismatch { energy_mean: f64, pbar: f64 },
    #[error("moderate-deviation bracket is not defined for the no-CSIT baseline")]
    UnsupportedConstraint,
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Intermediate constants echoed with each bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundConstants {
    pub c_eps: Option<f64>,
    pub alpha: Option<f64>,
    pub k_eps_alpha: Option<f64>,
    pub v_eps_alpha: Option<f64>,
    /// Save-phase length K·√n in slots (not rounded).
    pub save_slots: Option<f64>,
    /// Dispersion constant under the square root of the lower bound (bits²).
    pub dispersion_lower: f64,
    /// Dispersion constant under the square root of the upper bound (bits²).
    pub dispersion_upper: f64,
}

/// Lower/upper second-order rates for one constraint at one blocklength.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBoundResult {
    pub constraint: Constraint,
    /// bits per channel use.
    pub lower: f64,
    pub upper: f64,
    pub capacity: f64,
    pub n: u64,
    pub constants: BoundConstants,
    /// Remainder class dropped from each side of the approximation.
    pub lower_remainder: &'static str,
    pub upper_remainder: &'static str,
    /// Smallest n at which lower ≤ upper; `None` when the 1/√n coefficients
    /// are out of order (then the approximations never satisfy it).
    pub crossover_n0: Option<u64>,
}

impl RateBoundResult {
    #[allow(clippy::too_many_arguments)]
    fn from_coefficients(
        constraint: Constraint,
        capacity: f64,
        n: u64,
        coef_lower: f64,
        coef_upper: f64,
        constants: BoundConstants,
        lower_remainder: &'static str,
        upper_remainder: &'static str,
    ) -> Self {
        let sqrt_n = (n as f64).sqrt();
        Self {
            constraint,
            lower: capacity + coef_lower / sqrt_n,
            upper: capacity + coef_upper / sqrt_n,
            capacity,
            n,
            constants,
            lower_remainder,
            upper_remainder,
            // Both sides are capacity + coef/√n, so the ordering is decided
            // by the coefficients once and for all n.
            crossover_n0: if coef_lower <= coef_upper { Some(1) } else { None },
        }
    }
}

const REMAINDER_LOG: &str = "O(log n / n) dropped";
const REMAINDER_SQRT: &str = "o(1/sqrt(n)) dropped";

/// The back-off constant of the peak-power achievability scheme,
/// `√(2(n_c+1)·ln(1/(αε)))`.
pub fn c_eps(nc: u32, eps: f64, alpha: f64) -> f64 {
    (2.0 * (nc as f64 + 1.0) * (1.0 / (alpha * eps)).ln()).sqrt()
}

/// Peak-power bounds at a fixed achievability split α ∈ (0, 1).
pub fn pp_bounds(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    disp: &DispersionSet,
    alpha: f64,
) -> Result<RateBoundResult, BoundError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundError::InvalidAlpha(alpha));
    }
    let c = c_eps(cfg.nc, cfg.eps, alpha);
    let p_lower = (1.0 - alpha) * cfg.eps / 2.0;
    debug_assert!(p_lower > 0.0 && p_lower < 0.5);
    let coef_lower = -c + disp.v_bf.sqrt() * normal::inverse_cdf(p_lower);
    let coef_upper = disp.v_bf.sqrt() * normal::inverse_cdf(cfg.eps);
    Ok(RateBoundResult::from_coefficients(
        Constraint::PeakPower,
        sol.capacity,
        cfg.n(),
        coef_lower,
        coef_upper,
        BoundConstants {
            c_eps: Some(c),
            alpha: Some(alpha),
            dispersion_lower: disp.v_bf,
            dispersion_upper: disp.v_bf,
            ..Default::default()
        },
        REMAINDER_LOG,
        REMAINDER_SQRT,
    ))
}

/// Peak-power bounds with the lower-bound α maximized over a grid.
pub fn pp_bounds_best_alpha(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    disp: &DispersionSet,
    grid: &[f64],
) -> Result<RateBoundResult, BoundError> {
    if grid.is_empty() {
        return Err(BoundError::EmptyGrid);
    }
    let mut best: Option<RateBoundResult> = None;
    for &alpha in grid {
        let r = pp_bounds(sol, cfg, disp, alpha)?;
        if best.as_ref().is_none_or(|cur| r.lower > cur.lower) {
            best = Some(r);
        }
    }
    Ok(best.expect("nonempty grid"))
}

/// Average-power bounds: the two displayed bounds share the same
/// second-order term, so lower = upper here; they differ only in the
/// dropped remainder class.
pub fn ap_bounds(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    disp: &DispersionSet,
) -> RateBoundResult {
    let coef = disp.v_bf.sqrt() * normal::inverse_cdf(cfg.eps);
    RateBoundResult::from_coefficients(
        Constraint::AveragePower,
        sol.capacity,
        cfg.n(),
        coef,
        coef,
        BoundConstants {
            dispersion_lower: disp.v_bf,
            dispersion_upper: disp.v_bf,
            ..Default::default()
        },
        REMAINDER_LOG,
        REMAINDER_SQRT,
    )
}

/// `K_{ε,α} = √(4(2Ē² + σ_E²) / ((1−α)·ε·Ē²))`, the save-phase constant.
pub fn k_eps_alpha(ebar: f64, sigma_e2: f64, eps: f64, alpha: f64) -> f64 {
    (4.0 * (2.0 * ebar * ebar + sigma_e2) / ((1.0 - alpha) * eps * ebar * ebar)).sqrt()
}

/// `V_{ε,α} = √(V_EF′)·Φ⁻¹(αε) − K_{ε,α}·C`, the 1/√n coefficient of the
/// energy-harvesting lower bound (bits).
pub fn v_eps_alpha(v_ef_prime: f64, capacity: f64, ebar: f64, sigma_e2: f64, eps: f64, alpha: f64) -> f64 {
    v_ef_prime.sqrt() * normal::inverse_cdf(alpha * eps) - k_eps_alpha(ebar, sigma_e2, eps, alpha) * capacity
}

/// The default save-phase split grid: 161 points on [0.1, 0.9].
pub fn default_alpha_grid() -> Vec<f64> {
    alpha_grid(0.1, 0.9, 161)
}

pub fn alpha_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi < 1.0 && lo < hi);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Energy-harvesting bounds, maximizing the lower bound over `alpha_grid`.
///
/// The solution must have been solved with the mean arrival rate in the role
/// of the average power, and `disp` computed with the energy law.
pub fn eh_bounds(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    disp: &DispersionSet,
    energy: &EnergyLaw,
    alpha_grid: &[f64],
) -> Result<RateBoundResult, BoundError> {
    if alpha_grid.is_empty() {
        return Err(BoundError::EmptyGrid);
    }
    let v_ef_dprime = disp.v_ef_dprime.ok_or(BoundError::MissingEnergyDispersion)?;
    let ebar = energy.mean();
    if (ebar - sol.pbar).abs() > 1e-9 * ebar.max(sol.pbar) {
        return Err(BoundError::MeanMismatch { energy_mean: ebar, pbar: sol.pbar });
    }
    let sigma_e2 = energy.variance();

    let mut best_alpha = f64::NAN;
    let mut best_v = f64::NEG_INFINITY;
    for &alpha in alpha_grid {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(BoundError::InvalidAlpha(alpha));
        }
        let v = v_eps_alpha(disp.v_ef_prime, sol.capacity, ebar, sigma_e2, cfg.eps, alpha);
        if v > best_v {
            best_v = v;
            best_alpha = alpha;
        }
    }
    let k = k_eps_alpha(ebar, sigma_e2, cfg.eps, best_alpha);
    let coef_upper = v_ef_dprime.sqrt() * normal::inverse_cdf(cfg.eps);

    Ok(RateBoundResult::from_coefficients(
        Constraint::EnergyHarvest,
        sol.capacity,
        cfg.n(),
        best_v,
        coef_upper,
        BoundConstants {
            alpha: Some(best_alpha),
            k_eps_alpha: Some(k),
            v_eps_alpha: Some(best_v),
            save_slots: Some(k * (cfg.n() as f64).sqrt()),
            dispersion_lower: disp.v_ef_prime,
            dispersion_upper: v_ef_dprime,
            ..Default::default()
        },
        REMAINDER_SQRT,
        REMAINDER_SQRT,
    ))
}

/// Energy-harvesting bounds on the default α grid, refined once around the
/// best coarse cell.
pub fn eh_bounds_refined(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    disp: &DispersionSet,
    energy: &EnergyLaw,
) -> Result<RateBoundResult, BoundError> {
    let coarse_grid = default_alpha_grid();
    let coarse = eh_bounds(sol, cfg, disp, energy, &coarse_grid)?;
    let best = coarse.constants.alpha.expect("eh bounds record alpha");
    let step = (coarse_grid[1] - coarse_grid[0]).abs();
    let lo = (best - step).max(1e-6);
    let hi = (best + step).min(1.0 - 1e-6);
    let fine = eh_bounds(sol, cfg, disp, energy, &alpha_grid(lo, hi, 161))?;
    Ok(if fine.lower >= coarse.lower { fine } else { coarse })
}

/// Baseline without transmitter channel knowledge: the received SNR is
/// |H|²·P̄/σ_N² and the same dispersion recipe applies to that law. The
/// resulting second-order rate is both achievable and tight for this
/// baseline, so lower = upper.
pub fn no_csit_bounds(
    law: &FadingLaw,
    cfg: &ChannelConfig,
    pbar: f64,
    q: &Quadrature,
) -> Result<RateBoundResult, BoundError> {
    let snr = |x: f64| x * pbar / cfg.sigma_n2;
    let capacity_nats = law.expect(|x| func_c_nats(snr(x)), q)?;
    let capacity = capacity_nats * std::f64::consts::LOG2_E;

    let mean_v = law.expect(|x| func_v(snr(x)), q)?;
    let (mean_c, mean_c_sq) = law.expect_pair_kinked(None, |x| func_c_nats(snr(x)), q)?;
    let (mean_l, mean_l_sq) = law.expect_pair_kinked(None, |x| func_l(snr(x)), q)?;
    let var_c = (mean_c_sq - mean_c * mean_c).max(0.0);
    let var_l = (mean_l_sq - mean_l * mean_l).max(0.0);
    let v = (mean_v + cfg.nc as f64 * var_c + var_l) * LOG2_E_SQ;

    let coef = v.sqrt() * normal::inverse_cdf(cfg.eps);
    Ok(RateBoundResult::from_coefficients(
        Constraint::NoCsit,
        capacity,
        cfg.n(),
        coef,
        coef,
        BoundConstants { dispersion_lower: v, dispersion_upper: v, ..Default::default() },
        REMAINDER_SQRT,
        REMAINDER_SQRT,
    ))
}

/// Moderate-deviation bracket endpoints (bits²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModDevBracket {
    pub lo: f64,
    pub hi: f64,
    pub constraint: Constraint,
}

/// The bracket around the moderate-deviation constant: `(V_BF′, V_BF)` for
/// the power-constrained transmitters, `(V_EF′, V_EF″)` for the harvesting
/// one. Endpoints are reported exactly as defined; the power bracket is
/// ordered pointwise (V ≥ L), the harvesting one only when σ_E²/λ² outweighs
/// E[L(1−L)].
pub fn moddev_bracket(disp: &DispersionSet, constraint: Constraint) -> Result<ModDevBracket, BoundError> {
    match constraint {
        Constraint::PeakPower | Constraint::AveragePower => Ok(ModDevBracket {
            lo: disp.v_bf_prime,
            hi: disp.v_bf,
            constraint,
        }),
        Constraint::EnergyHarvest => Ok(ModDevBracket {
            lo: disp.v_ef_prime,
            hi: disp.v_ef_dprime.ok_or(BoundError::MissingEnergyDispersion)?,
            constraint,
        }),
        Constraint::NoCsit => Err(BoundError::UnsupportedConstraint),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::dispersion_set;
    use crate::waterfilling::solve_waterfill;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn c_eps_fixture() {
        // n_c = 10, α = 0.5, ε = 0.05 → √(22·ln 40)
        let c = c_eps(10, 0.05, 0.5);
        assert!((c - 9.0087).abs() < 5e-4, "got {c}");
        assert!((c - (22.0 * 40.0f64.ln()).sqrt()).abs() < 1e-12);
    }

    fn awgn() -> (WaterfillSolution, ChannelConfig, DispersionSet) {
        let law = FadingLaw::point_mass(1.0).unwrap();
        let sol = solve_waterfill(&law, 1.0, 1.0, &q()).unwrap();
        let cfg = ChannelConfig::new(1.0, 10, 1000, 0.05).unwrap();
        let disp = dispersion_set(&sol, &cfg, None, &q()).unwrap();
        (sol, cfg, disp)
    }

    #[test]
    fn awgn_upper_bound_closed_form() {
        let (sol, cfg, disp) = awgn();
        let r = pp_bounds(&sol, &cfg, &disp, 0.5).unwrap();
        let expected = 1.0 + (0.75 * LOG2_E_SQ / 1e4).sqrt() * normal::inverse_cdf(0.05);
        assert!((r.upper - expected).abs() < 1e-9, "upper {}", r.upper);
        assert!(r.lower < r.upper);
        assert_eq!(r.crossover_n0, Some(1));
    }

    #[test]
    fn ap_matches_pp_upper() {
        let (sol, cfg, disp) = awgn();
        let pp = pp_bounds(&sol, &cfg, &disp, 0.5).unwrap();
        let ap = ap_bounds(&sol, &cfg, &disp);
        assert_eq!(ap.lower, ap.upper);
        assert!((ap.upper - pp.upper).abs() < 1e-15);
        assert!(ap.lower >= pp.lower);
    }

    #[test]
    fn second_order_term_vanishes_toward_half() {
        let law = FadingLaw::point_mass(1.0).unwrap();
        let sol = solve_waterfill(&law, 1.0, 1.0, &q()).unwrap();
        let cfg = ChannelConfig::new(1.0, 10, 1000, 0.4999999).unwrap();
        let disp = dispersion_set(&sol, &cfg, None, &q()).unwrap();
        let ap = ap_bounds(&sol, &cfg, &disp);
        assert!((ap.upper - sol.capacity).abs() < 1e-6, "got {}", ap.upper);
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let (sol, cfg, disp) = awgn();
        assert!(matches!(pp_bounds(&sol, &cfg, &disp, 0.0), Err(BoundError::InvalidAlpha(_))));
        assert!(matches!(pp_bounds(&sol, &cfg, &disp, 1.0), Err(BoundError::InvalidAlpha(_))));
    }

    #[test]
    fn k_eps_alpha_fixture() {
        // Ē = 17, σ_E² = 0.1, ε = 0.1, α = 0.104
        let k = k_eps_alpha(17.0, 0.1, 0.1, 0.104);
        assert!(k > 9.4 && k < 9.6, "got {k}");
        // σ_E² = 0: K = √(8/((1−α)ε)) independent of Ē.
        let k0 = k_eps_alpha(17.0, 0.0, 0.1, 0.3);
        assert!((k0 - (8.0f64 / (0.7 * 0.1)).sqrt()).abs() < 1e-12);
        let k0b = k_eps_alpha(3.0, 0.0, 0.1, 0.3);
        assert!((k0 - k0b).abs() < 1e-12);
    }

    #[test]
    fn eh_bounds_argmax_is_exhaustive() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let cfg = ChannelConfig::new(0.4, 20, 400, 0.1).unwrap();
        let energy = EnergyLaw::uniform_with_moments(17.0, 0.1).unwrap();
        let disp = dispersion_set(&sol, &cfg, Some(&energy), &q()).unwrap();
        let grid = default_alpha_grid();
        let r = eh_bounds(&sol, &cfg, &disp, &energy, &grid).unwrap();
        let alpha_star = r.constants.alpha.unwrap();
        let v_star = r.constants.v_eps_alpha.unwrap();
        for &a in &grid {
            let v = v_eps_alpha(disp.v_ef_prime, sol.capacity, 17.0, 0.1, 0.1, a);
            assert!(v <= v_star + 1e-12, "alpha {a} beats recorded argmax {alpha_star}");
        }
        assert!(r.lower < r.upper);
    }

    #[test]
    fn eh_bounds_rejects_mismatched_energy_mean() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let cfg = ChannelConfig::new(0.4, 20, 400, 0.1).unwrap();
        let energy = EnergyLaw::constant(5.0).unwrap();
        let disp = dispersion_set(&sol, &cfg, Some(&energy), &q()).unwrap();
        assert!(matches!(
            eh_bounds(&sol, &cfg, &disp, &energy, &default_alpha_grid()),
            Err(BoundError::MeanMismatch { .. })
        ));
    }

    #[test]
    fn eh_bounds_needs_energy_dispersion() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let cfg = ChannelConfig::new(0.4, 20, 400, 0.1).unwrap();
        let energy = EnergyLaw::uniform_with_moments(17.0, 0.1).unwrap();
        let disp = dispersion_set(&sol, &cfg, None, &q()).unwrap();
        assert!(matches!(
            eh_bounds(&sol, &cfg, &disp, &energy, &default_alpha_grid()),
            Err(BoundError::MissingEnergyDispersion)
        ));
        assert!(matches!(
            eh_bounds(&sol, &cfg, &disp, &energy, &[]),
            Err(BoundError::EmptyGrid)
        ));
    }

    #[test]
    fn no_csit_matches_csit_on_constant_channel() {
        // Power control gains nothing when fading is constant.
        let (sol, cfg, disp) = awgn();
        let pp = pp_bounds(&sol, &cfg, &disp, 0.5).unwrap();
        let law = FadingLaw::point_mass(1.0).unwrap();
        let nb = no_csit_bounds(&law, &cfg, 1.0, &q()).unwrap();
        assert!((nb.upper - pp.upper).abs() < 1e-9, "{} vs {}", nb.upper, pp.upper);
        assert!((nb.capacity - sol.capacity).abs() < 1e-9);
    }

    #[test]
    fn moddev_brackets() {
        let (_, _, disp) = awgn();
        let b = moddev_bracket(&disp, Constraint::PeakPower).unwrap();
        assert!(b.lo <= b.hi);
        assert!((b.lo - disp.v_bf_prime).abs() < 1e-15);
        assert!((b.hi - disp.v_bf).abs() < 1e-15);
        assert!(matches!(
            moddev_bracket(&disp, Constraint::EnergyHarvest),
            Err(BoundError::MissingEnergyDispersion)
        ));
        assert!(matches!(
            moddev_bracket(&disp, Constraint::NoCsit),
            Err(BoundError::UnsupportedConstraint)
        ));
    }

    #[test]
    fn bounds_converge_to_capacity_at_sqrt_rate() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let sol = solve_waterfill(&law, 4.0, 20.0, &q()).unwrap();
        let mut scaled_gaps: Vec<(f64, f64)> = Vec::new();
        for &blocks in &[100u32, 1_000, 10_000, 100_000] {
            let cfg = ChannelConfig::new(4.0, 10, blocks, 0.05).unwrap();
            let disp = dispersion_set(&sol, &cfg, None, &q()).unwrap();
            let r = pp_bounds(&sol, &cfg, &disp, 0.5).unwrap();
            let sqrt_n = (cfg.n() as f64).sqrt();
            assert!(r.lower <= sol.capacity && r.upper <= sol.capacity);
            scaled_gaps.push(((sol.capacity - r.lower) * sqrt_n, (sol.capacity - r.upper) * sqrt_n));
        }
        // √n·|bound − C| is the same constant across decades of n.
        for w in scaled_gaps.windows(2) {
            assert!((w[0].0 - w[1].0).abs() < 1e-6, "lower-gap constant drifts: {scaled_gaps:?}");
            assert!((w[0].1 - w[1].1).abs() < 1e-6, "upper-gap constant drifts: {scaled_gaps:?}");
        }
    }

    #[test]
    fn pp_lower_below_ap_lower() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let sol = solve_waterfill(&law, 4.0, 3.1623, &q()).unwrap();
        let cfg = ChannelConfig::new(4.0, 10, 1000, 0.05).unwrap();
        let disp = dispersion_set(&sol, &cfg, None, &q()).unwrap();
        let ap = ap_bounds(&sol, &cfg, &disp);
        for &alpha in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let pp = pp_bounds(&sol, &cfg, &disp, alpha).unwrap();
            assert!(pp.lower <= ap.lower, "alpha {alpha}");
        }
    }
}
