//! Water-filling power control and the ergodic capacity it achieves.
//!
//! The water level λ solves `E[(λ − σ_N²/|H|²)⁺] = P̄` by bisection: the
//! residual is continuous and strictly increasing in λ wherever the law puts
//! mass on positive gains, so a geometrically expanded bracket plus bisection
//! is robust at the allocation kink. The solved allocation satisfies
//! `0 ≤ P(g) ≤ λ`, which later modules lean on (Hoeffding step of the
//! power-violation bound, the `L(G²) = P(g)/λ` identity).

use thiserror::Error;

use crate::distributions::FadingLaw;
use crate::quadrature::{Quadrature, QuadratureError};

/// Ambient channel description: noise variance, block structure, error target.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub sigma_n2: f64,
    /// Channel uses per coherence block.
    pub nc: u32,
    /// Number of coherence blocks spanned by a codeword.
    pub blocks: u32,
    /// Target average probability of error, in (0, 1/2).
    pub eps: f64,
}

impl ChannelConfig {
    pub fn new(sigma_n2: f64, nc: u32, blocks: u32, eps: f64) -> Result<Self, WaterfillError> {
        if !sigma_n2.is_finite() || sigma_n2 <= 0.0 {
            return Err(WaterfillError::InvalidConfig(format!("sigma_n2 must be positive, got {sigma_n2}")));
        }
        if nc == 0 || blocks == 0 {
            return Err(WaterfillError::InvalidConfig("nc and blocks must be at least 1".into()));
        }
        if eps.is_nan() || eps <= 0.0 || eps >= 0.5 {
            return Err(WaterfillError::InvalidConfig(format!("eps must lie in (0, 1/2), got {eps}")));
        }
        Ok(Self { sigma_n2, nc, blocks, eps })
    }

    /// Codeword length n = B·n_c in complex channel uses.
    pub fn n(&self) -> u64 {
        self.blocks as u64 * self.nc as u64
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaterfillError {
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("law has no mass on positive gains; water-filling undefined")]
    NoMass,
    #[error("average power must be positive, got {0}")]
    InvalidPower(f64),
    #[error("water-level bisection did not converge (residual {residual:.3e} after {iterations} iterations)")]
    NonConvergent { residual: f64, iterations: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A solved water-filling allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution {
    pub lambda: f64,
    pub pbar: f64,
    /// Ergodic capacity in bits per channel use.
    pub capacity: f64,
    pub law: FadingLaw,
    pub sigma_n2: f64,
}

impl WaterfillSolution {
    /// Allocated power (λ − σ_N²/g²)⁺; zero at g² = 0.
    pub fn p_wf(&self, gain_sq: f64) -> f64 {
        p_wf(self.lambda, self.sigma_n2, gain_sq)
    }

    /// Effective SNR G² = g²·P(g)/σ_N²; zero below the threshold.
    pub fn effective_snr(&self, gain_sq: f64) -> f64 {
        gain_sq * self.p_wf(gain_sq) / self.sigma_n2
    }

    /// Gains below σ_N²/λ receive no power.
    pub fn threshold(&self) -> f64 {
        self.sigma_n2 / self.lambda
    }

    /// E[f(G²)] over the fading law, splitting at the allocation threshold.
    pub fn expect_snr<F: Fn(f64) -> f64>(&self, f: F, q: &Quadrature) -> Result<f64, QuadratureError> {
        self.law.expect_kinked(Some(self.threshold()), |x| f(self.effective_snr(x)), q)
    }

    /// (E[f(G²)], E[f(G²)²]) on a shared partition.
    pub fn expect_snr_pair<F: Fn(f64) -> f64>(
        &self,
        f: F,
        q: &Quadrature,
    ) -> Result<(f64, f64), QuadratureError> {
        self.law
            .expect_pair_kinked(Some(self.threshold()), |x| f(self.effective_snr(x)), q)
    }
}

fn p_wf(lambda: f64, sigma_n2: f64, gain_sq: f64) -> f64 {
    if gain_sq <= 0.0 {
        return 0.0;
    }
    (lambda - sigma_n2 / gain_sq).max(0.0)
}

/// Solve for the water level λ with `E[P(|H|²)] = P̄`, and evaluate the
/// resulting ergodic capacity.
pub fn solve_waterfill(
    law: &FadingLaw,
    sigma_n2: f64,
    pbar: f64,
    q: &Quadrature,
) -> Result<WaterfillSolution, WaterfillError> {
    if !pbar.is_finite() || pbar <= 0.0 {
        return Err(WaterfillError::InvalidPower(pbar));
    }
    if !sigma_n2.is_finite() || sigma_n2 <= 0.0 {
        return Err(WaterfillError::InvalidConfig(format!("sigma_n2 must be positive, got {sigma_n2}")));
    }
    if law.positive_mass() <= 0.0 {
        return Err(WaterfillError::NoMass);
    }

    let residual = |lambda: f64| -> Result<f64, WaterfillError> {
        let kink = sigma_n2 / lambda;
        let mean = law.expect_kinked(Some(kink), |x| p_wf(lambda, sigma_n2, x), q)?;
        Ok(mean - pbar)
    };

    // Bracket [σ_N²/q_hi, P̄ + σ_N²/q_lo], expanded geometrically until the
    // residual straddles zero.
    let q_hi = match law {
        FadingLaw::RayleighGainSq { .. } => law.quantile(1.0 - 1e-6),
        FadingLaw::Discrete { atoms } => atoms.last().unwrap().0,
    };
    let q_lo = match law {
        FadingLaw::RayleighGainSq { .. } => law.quantile(1e-6),
        FadingLaw::Discrete { atoms } => atoms.iter().find(|&&(x, _)| x > 0.0).unwrap().0,
    };
    let mut lo = sigma_n2 / q_hi;
    let mut hi = pbar + sigma_n2 / q_lo.max(f64::MIN_POSITIVE);

    for _ in 0..200 {
        if residual(lo)? < 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..200 {
        if residual(hi)? > 0.0 {
            break;
        }
        hi *= 2.0;
    }

    let tol = 1e-10 * pbar;
    let mut last_residual = f64::INFINITY;
    for _ in 0..200 {
        let lambda = 0.5 * (lo + hi);
        last_residual = residual(lambda)?;
        if last_residual.abs() <= tol {
            let capacity = capacity_bits(law, sigma_n2, lambda, q)?;
            return Ok(WaterfillSolution { lambda, pbar, capacity, law: law.clone(), sigma_n2 });
        }
        if last_residual > 0.0 {
            hi = lambda;
        } else {
            lo = lambda;
        }
    }
    Err(WaterfillError::NonConvergent { residual: last_residual, iterations: 200 })
}

fn capacity_bits(law: &FadingLaw, sigma_n2: f64, lambda: f64, q: &Quadrature) -> Result<f64, QuadratureError> {
    let kink = sigma_n2 / lambda;
    law.expect_kinked(Some(kink), |x| (1.0 + x * p_wf(lambda, sigma_n2, x) / sigma_n2).log2(), q)
}

/// Which power constraint a truncated-channel-inversion rate respects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TciVariant {
    /// Average power only: inversion power ρ = P̄ / E[1{g² ≥ g₀}/g²].
    Average,
    /// Peak-feasible: additionally ρ ≤ P̄·g₀ so that every realization keeps
    /// per-use power within P̄.
    Peak,
}

/// Truncated channel inversion at a fixed outage target.
///
/// The gain threshold is the outage-quantile g₀ of the law; power ρ/g² is
/// spent above it and nothing below, and the rate is
/// `(1 − P[g² < g₀])·log₂(1 + ρ/σ_N²)`. Full inversion over a law that is
/// dense at zero (Rayleigh at outage 0) needs `E[1/g²] = ∞`; the limiting
/// rate 0 is returned for that case.
pub fn tci_rate(
    law: &FadingLaw,
    sigma_n2: f64,
    pbar: f64,
    outage_target: f64,
    variant: TciVariant,
    q: &Quadrature,
) -> Result<f64, WaterfillError> {
    if !pbar.is_finite() || pbar <= 0.0 {
        return Err(WaterfillError::InvalidPower(pbar));
    }
    if !(0.0..1.0).contains(&outage_target) {
        return Err(WaterfillError::InvalidConfig(format!(
            "outage target must lie in [0, 1), got {outage_target}"
        )));
    }

    let g0 = law.quantile(outage_target);
    if g0 <= 0.0 {
        // Inversion down to zero gain: divergent for continuous laws and for
        // discrete laws with an atom at zero, so the achievable rate is 0.
        let diverges = match law {
            FadingLaw::RayleighGainSq { .. } => true,
            FadingLaw::Discrete { atoms } => atoms[0].0 <= 0.0,
        };
        if diverges {
            return Ok(0.0);
        }
    }

    let outage = law.cdf_below(g0);
    let inv_mean = law.expect_kinked(Some(g0), |x| if x >= g0 && x > 0.0 { 1.0 / x } else { 0.0 }, q)?;
    if inv_mean.is_nan() || inv_mean <= 0.0 {
        return Ok(0.0);
    }
    let mut rho = pbar / inv_mean;
    if variant == TciVariant::Peak {
        rho = rho.min(pbar * g0);
    }
    Ok((1.0 - outage) * (1.0 + rho / sigma_n2).log2())
}

/// Best truncated-channel-inversion rate over a grid of outage targets.
///
/// The grid has 512 points on [0, 1 − 1e-4]; returns (rate, argmax outage).
pub fn tci_rate_optimized(
    law: &FadingLaw,
    sigma_n2: f64,
    pbar: f64,
    variant: TciVariant,
    q: &Quadrature,
) -> Result<(f64, f64), WaterfillError> {
    const GRID: usize = 512;
    let hi = 1.0 - 1e-4;
    let mut best = (0.0f64, 0.0f64);
    for i in 0..GRID {
        let t = hi * i as f64 / (GRID - 1) as f64;
        let r = tci_rate(law, sigma_n2, pbar, t, variant, q)?;
        if r > best.0 {
            best = (r, t);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn constant_channel_closed_form() {
        // Single gain g² = 1: λ = P̄ + σ_N², allocation P̄, capacity 1 bit.
        let law = FadingLaw::point_mass(1.0).unwrap();
        let sol = solve_waterfill(&law, 1.0, 1.0, &q()).unwrap();
        assert!((sol.lambda - 2.0).abs() < 1e-9, "lambda {}", sol.lambda);
        assert!((sol.p_wf(1.0) - 1.0).abs() < 1e-9);
        assert!((sol.capacity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rayleigh_capacity_fixture() {
        // Mean-0.1 Rayleigh gain-square law in noise 4 at average SNR 5
        // (P̄ = 20): capacity 0.6892 bits per channel use.
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let sol = solve_waterfill(&law, 4.0, 20.0, &q()).unwrap();
        assert!(
            (sol.capacity - 0.6892).abs() < 1e-3,
            "capacity {}",
            sol.capacity
        );
    }

    #[test]
    fn allocation_formula_points() {
        let sol = WaterfillSolution {
            lambda: 2.0,
            pbar: 0.0,
            capacity: 0.0,
            law: FadingLaw::point_mass(1.0).unwrap(),
            sigma_n2: 1.0,
        };
        assert!((sol.p_wf(4.0) - 1.75).abs() < 1e-15);
        assert_eq!(sol.p_wf(0.25), 0.0);
        assert_eq!(sol.p_wf(0.5), 0.0); // boundary σ_N²/λ
        assert_eq!(sol.p_wf(0.0), 0.0);
        assert!((sol.effective_snr(4.0) - 7.0).abs() < 1e-15);
        assert_eq!(sol.effective_snr(0.3), 0.0);
    }

    #[test]
    fn mean_power_is_pbar() {
        let law = FadingLaw::rayleigh_gain_sq(0.5).unwrap();
        let sol = solve_waterfill(&law, 2.0, 3.0, &q()).unwrap();
        let mean = law
            .expect_kinked(Some(sol.threshold()), |x| sol.p_wf(x), &q())
            .unwrap();
        assert!((mean - 3.0).abs() < 1e-8, "got {mean}");
    }

    #[test]
    fn allocation_bounded_by_lambda() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        for i in 0..1000 {
            let g = 1e-3 * (i as f64 + 1.0) * 5.0;
            let p = sol.p_wf(g);
            assert!(p >= 0.0 && p <= sol.lambda);
        }
    }

    #[test]
    fn lambda_increases_with_pbar() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let mut last = 0.0;
        for &p in &[0.5, 1.0, 2.0, 4.0, 8.0] {
            let sol = solve_waterfill(&law, 4.0, p, &q()).unwrap();
            assert!(sol.lambda > last, "lambda not increasing at pbar {p}");
            last = sol.lambda;
        }
    }

    #[test]
    fn capacity_consistent_with_effective_snr_mean() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let via_snr = sol.expect_snr(|s| (1.0 + s).log2(), &q()).unwrap();
        assert!((via_snr - sol.capacity).abs() < 1e-9);
    }

    #[test]
    fn jensen_upper_bound() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let sol = solve_waterfill(&law, 4.0, 3.1623, &q()).unwrap();
        let mean_snr = sol.expect_snr(|s| s, &q()).unwrap();
        assert!(sol.capacity <= (1.0 + mean_snr).log2() + 1e-12);
    }

    #[test]
    fn zero_mass_at_positive_gain_is_rejected() {
        let law = FadingLaw::point_mass(0.0).unwrap();
        assert!(matches!(
            solve_waterfill(&law, 1.0, 1.0, &q()),
            Err(WaterfillError::NoMass)
        ));
    }

    #[test]
    fn tci_constant_channel_full_inversion() {
        let law = FadingLaw::point_mass(1.0).unwrap();
        let r = tci_rate(&law, 1.0, 1.0, 0.0, TciVariant::Average, &q()).unwrap();
        assert!((r - 1.0).abs() < 1e-9, "got {r}");
    }

    #[test]
    fn tci_rayleigh_full_inversion_is_zero() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let r = tci_rate(&law, 4.0, 3.1623, 0.0, TciVariant::Average, &q()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn tci_stays_below_waterfilling_capacity() {
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let pbar = 10f64.powf(0.5);
        let sol = solve_waterfill(&law, 4.0, pbar, &q()).unwrap();
        let (ap, _) = tci_rate_optimized(&law, 4.0, pbar, TciVariant::Average, &q()).unwrap();
        let (pp, _) = tci_rate_optimized(&law, 4.0, pbar, TciVariant::Peak, &q()).unwrap();
        assert!(ap > 0.0 && ap < sol.capacity, "ap {ap} vs capacity {}", sol.capacity);
        assert!(pp > 0.0 && pp <= ap, "pp {pp} vs ap {ap}");
    }

    #[test]
    fn channel_config_validation() {
        assert!(ChannelConfig::new(4.0, 10, 1000, 0.05).is_ok());
        assert!(ChannelConfig::new(0.0, 10, 1000, 0.05).is_err());
        assert!(ChannelConfig::new(4.0, 0, 1000, 0.05).is_err());
        assert!(ChannelConfig::new(4.0, 10, 1000, 0.5).is_err());
        assert_eq!(ChannelConfig::new(4.0, 10, 1000, 0.05).unwrap().n(), 10_000);
    }
}
