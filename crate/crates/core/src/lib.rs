//! Finite-blocklength achievable-rate and converse bounds for a block-fading
//! AWGN channel with channel knowledge at both ends, under peak-power,
//! average-power, and energy-harvesting transmit constraints.
//!
//! The crate is organized around the pipeline used by the CLI:
//!
//! 1. [`distributions`] — fading and energy-arrival laws, expectations by
//!    adaptive quadrature, and seeded i.i.d. sampling with a reproducible
//!    stream-per-chunk contract.
//! 2. [`waterfilling`] — the water level λ, the allocation
//!    `P(g) = (λ − σ_N²/g)⁺`, ergodic capacity, and the truncated
//!    channel-inversion baseline.
//! 3. [`dispersion`] — the scalar functionals C, L, V, V₁ and the
//!    dispersion-like constants they assemble into.
//! 4. [`bounds`] — second-order rate bounds for each constraint plus the
//!    moderate-deviation brackets.
//! 5. [`simulate`] — seeded Monte Carlo oracles that cross-check the analytic
//!    machinery: per-block information-density moments, the power-controller
//!    violation event, and the save-and-transmit energy buffer.
//!
//! All rate outputs are in bits per channel use; dispersion-like constants are
//! in bits². Internally the second-moment identities are carried in nats and
//! converted once at the module boundary.

pub mod bounds;
pub mod dispersion;
pub mod distributions;
pub mod normal;
pub mod quadrature;
pub mod simulate;
pub mod waterfilling;

pub use bounds::{Constraint, ModDevBracket, RateBoundResult};
pub use dispersion::DispersionSet;
pub use distributions::{EnergyLaw, FadingLaw};
pub use quadrature::Quadrature;
pub use simulate::{SimConfig, SimReport};
pub use waterfilling::{ChannelConfig, WaterfillSolution};

/// (log₂ e)², the single nat²→bits² conversion factor.
pub(crate) const LOG2_E_SQ: f64 = std::f64::consts::LOG2_E * std::f64::consts::LOG2_E;
