//! Scalar rate functionals and the dispersion-like constants built from them.
//!
//! With G² the effective SNR of a solved water-filling allocation, four
//! constants drive the second-order bounds, all of the shape
//! `E[·] + n_c·Var[C] + Var[L]`:
//!
//! | constant      | leading term          | used by                    |
//! |---------------|-----------------------|----------------------------|
//! | `v_bf`        | E[V(G²)]              | PP and AP bounds, bracket  |
//! | `v_bf_prime`  | E[L(G²)]              | moderate-deviation bracket |
//! | `v_ef_prime`  | E[L(G²)]              | EH lower bound             |
//! | `v_ef_dprime` | E[L²(G²) + σ_E²/λ²]   | EH upper bound             |
//!
//! Unit convention: rates are in bits, so the constants are reported in
//! bits². The moments are carried in nats internally and the assembled sum is
//! converted once with (log₂e)²; a single conversion point avoids
//! double-scaling bugs between the nat-based second-moment identities and the
//! base-2 rate expressions.

use thiserror::Error;

use crate::distributions::EnergyLaw;
use crate::quadrature::{Quadrature, QuadratureError};
use crate::waterfilling::{ChannelConfig, WaterfillSolution};
use crate::LOG2_E_SQ;

/// C(x) = log₂(1 + x), in bits.
pub fn func_c(x: f64) -> f64 {
    x.ln_1p() * std::f64::consts::LOG2_E
}

/// C(x) in nats.
pub fn func_c_nats(x: f64) -> f64 {
    x.ln_1p()
}

/// L(x) = x / (1 + x).
pub fn func_l(x: f64) -> f64 {
    x / (1.0 + x)
}

/// V(x) = x(2 + x) / (1 + x)², the nat-free dispersion ratio.
pub fn func_v(x: f64) -> f64 {
    x * (2.0 + x) / ((1.0 + x) * (1.0 + x))
}

/// V₁(x) = L²(x) + σ_E²/λ².
pub fn func_v1(x: f64, sigma_e2: f64, lambda: f64) -> f64 {
    let l = func_l(x);
    l * l + sigma_e2 / (lambda * lambda)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispersionError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("energy-harvesting constant requested but no energy law supplied")]
    MissingEnergyLaw,
}

/// Raw moments of the effective-SNR law, in nats where dimensional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionComponents {
    pub mean_v: f64,
    pub mean_l: f64,
    pub mean_l_sq: f64,
    /// E[V₁(G²)] when an energy law was supplied.
    pub mean_v1: Option<f64>,
    /// Var[C(G²)] with C in nats.
    pub var_c: f64,
    pub var_l: f64,
    /// The per-block multiplier applied to `var_c`.
    pub nc: u32,
}

/// The assembled constants, in bits².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSet {
    pub v_bf: f64,
    pub v_bf_prime: f64,
    pub v_ef_prime: f64,
    /// Present only when an energy law supplied σ_E².
    pub v_ef_dprime: Option<f64>,
    pub components: DispersionComponents,
}

/// Compute every dispersion constant for a solved allocation.
///
/// The energy law is only needed for `v_ef_dprime` (it contributes σ_E², with
/// λ taken from the solution, whose average power plays the role of the mean
/// arrival rate).
pub fn dispersion_set(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    energy: Option<&EnergyLaw>,
    q: &Quadrature,
) -> Result<DispersionSet, DispersionError> {
    let mean_v = sol.expect_snr(func_v, q)?;
    let (mean_l, mean_l_sq) = sol.expect_snr_pair(func_l, q)?;
    let (mean_c, mean_c_sq) = sol.expect_snr_pair(func_c_nats, q)?;

    let var_c = (mean_c_sq - mean_c * mean_c).max(0.0);
    let var_l = (mean_l_sq - mean_l * mean_l).max(0.0);
    let nc = cfg.nc as f64;

    let mean_v1 = energy.map(|e| mean_l_sq + e.variance() / (sol.lambda * sol.lambda));

    let shared = nc * var_c + var_l;
    Ok(DispersionSet {
        v_bf: (mean_v + shared) * LOG2_E_SQ,
        v_bf_prime: (mean_l + shared) * LOG2_E_SQ,
        v_ef_prime: (mean_l + shared) * LOG2_E_SQ,
        v_ef_dprime: mean_v1.map(|m| (m + shared) * LOG2_E_SQ),
        components: DispersionComponents {
            mean_v,
            mean_l,
            mean_l_sq,
            mean_v1,
            var_c,
            var_l,
            nc: cfg.nc,
        },
    })
}

/// The α-scaled constant `E[V(αG²)] + n_c·Var[C(αG²)] + Var[L(αG²)]` in
/// bits²; vanishes at α = 0, equals `v_bf` at α = 1, and is nondecreasing in
/// between (both `1 − E²[1−L(αG²)]` and `Var[C(αG²)]` grow with α), so the
/// α = 1 value dominates every scaled variance.
pub fn v_bf_alpha(
    sol: &WaterfillSolution,
    cfg: &ChannelConfig,
    alpha: f64,
    q: &Quadrature,
) -> Result<f64, DispersionError> {
    assert!((0.0..=1.0).contains(&alpha), "alpha out of [0,1]: {alpha}");
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let mean_v = sol.expect_snr(|s| func_v(alpha * s), q)?;
    let (mean_l, mean_l_sq) = sol.expect_snr_pair(|s| func_l(alpha * s), q)?;
    let (mean_c, mean_c_sq) = sol.expect_snr_pair(|s| func_c_nats(alpha * s), q)?;
    let var_c = (mean_c_sq - mean_c * mean_c).max(0.0);
    let var_l = (mean_l_sq - mean_l * mean_l).max(0.0);
    Ok((mean_v + cfg.nc as f64 * var_c + var_l) * LOG2_E_SQ)
}
