//! Fading and energy-arrival laws.
//!
//! [`FadingLaw`] is the distribution of the squared channel gain |H|²; a
//! Rayleigh fading amplitude makes |H|² exponential with mean σ_H². Energy
//! arrivals at the harvesting transmitter follow an [`EnergyLaw`] with
//! nonnegative support and finite fourth moment.
//!
//! Every expectation in the rate-bound machinery funnels through
//! [`FadingLaw::expect_kinked`]: discrete laws take an exact compensated sum,
//! the exponential law integrates by adaptive Gauss–Kronrod over (0, T] with
//! T chosen so the neglected tail mass is below a tenth of the absolute
//! tolerance, splitting at the declared kink (the water-filling threshold is
//! the only non-smooth point any caller supplies).
//!
//! Sampling is a pure function of (law, count, seed): draws are generated in
//! fixed-size chunks, chunk `i` from its own ChaCha stream `(seed, i)`, so the
//! output is bit-identical across runs and worker counts and parallel
//! consumers can derive independent sub-streams the same way.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::quadrature::{self, Quadrature, QuadratureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("invalid law parameter: {0}")]
    InvalidParameter(String),
}

/// Distribution of the squared channel gain |H|².
#[derive(Debug, Clone, PartialEq)]
pub enum FadingLaw {
    /// |H|² of a circularly symmetric complex Gaussian gain: exponential with
    /// mean σ_H² > 0.
    RayleighGainSq { mean: f64 },
    /// Finite-state law: strictly increasing atoms (gain² ≥ 0) with positive
    /// probabilities summing to one.
    Discrete { atoms: Vec<(f64, f64)> },
}

impl FadingLaw {
    pub fn rayleigh_gain_sq(sigma_h2: f64) -> Result<Self, LawError> {
        if !sigma_h2.is_finite() || sigma_h2 <= 0.0 {
            return Err(LawError::InvalidParameter(format!(
                "Rayleigh gain-square mean must be positive and finite, got {sigma_h2}"
            )));
        }
        Ok(Self::RayleighGainSq { mean: sigma_h2 })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self, LawError> {
        if atoms.is_empty() {
            return Err(LawError::InvalidParameter("discrete law needs at least one atom".into()));
        }
        let mut total = 0.0;
        for (i, &(x, p)) in atoms.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(LawError::InvalidParameter(format!("atom {i} has invalid gain² {x}")));
            }
            if !p.is_finite() || p <= 0.0 {
                return Err(LawError::InvalidParameter(format!("atom {i} has invalid probability {p}")));
            }
            if i > 0 && atoms[i - 1].0 >= x {
                return Err(LawError::InvalidParameter("atoms must be strictly increasing".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(LawError::InvalidParameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self::Discrete { atoms })
    }

    /// Degenerate law: a single atom.
    pub fn point_mass(gain_sq: f64) -> Result<Self, LawError> {
        Self::discrete(vec![(gain_sq, 1.0)])
    }

    pub fn description(&self) -> String {
        match self {
            Self::RayleighGainSq { mean } => format!("Rayleigh fading, E[|H|^2] = {mean}"),
            Self::Discrete { atoms } => format!("discrete fading law with {} atoms", atoms.len()),
        }
    }

    /// E[|H|²].
    pub fn mean_gain_sq(&self) -> f64 {
        match self {
            Self::RayleighGainSq { mean } => *mean,
            Self::Discrete { atoms } => atoms.iter().map(|&(x, p)| x * p).sum(),
        }
    }

    /// Probability assigned to gain² > 0.
    pub fn positive_mass(&self) -> f64 {
        match self {
            Self::RayleighGainSq { .. } => 1.0,
            Self::Discrete { atoms } => atoms.iter().filter(|&&(x, _)| x > 0.0).map(|&(_, p)| p).sum(),
        }
    }

    /// Left-continuous quantile: inf { x : F(x) ≥ p } for p ∈ [0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..1.0).contains(&p), "quantile probability out of range: {p}");
        match self {
            Self::RayleighGainSq { mean } => -mean * (-p).ln_1p(),
            Self::Discrete { atoms } => {
                let mut cum = 0.0;
                for &(x, w) in atoms {
                    cum += w;
                    if cum >= p {
                        return x;
                    }
                }
                atoms.last().unwrap().0
            }
        }
    }

    /// P[|H|² < x] (strict, so atoms at `x` do not count).
    pub fn cdf_below(&self, x: f64) -> f64 {
        match self {
            Self::RayleighGainSq { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mean).exp_m1()
                }
            }
            Self::Discrete { atoms } => atoms.iter().filter(|&&(a, _)| a < x).map(|&(_, p)| p).sum(),
        }
    }

    /// E[f(|H|²)] for a piecewise-smooth `f` without a declared kink.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F, q: &Quadrature) -> Result<f64, QuadratureError> {
        self.expect_kinked(None, f, q)
    }

    /// E[f(|H|²)], splitting the integration at `kink` when one is declared.
    pub fn expect_kinked<F: Fn(f64) -> f64>(
        &self,
        kink: Option<f64>,
        f: F,
        q: &Quadrature,
    ) -> Result<f64, QuadratureError> {
        match self {
            Self::Discrete { atoms } => discrete_expect(atoms, |x| {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(QuadratureError::NonFinite(x))
                }
            }),
            Self::RayleighGainSq { mean } => {
                let t = self.integration_cutoff(q);
                let dens = move |x: f64| (-x / mean).exp() / mean;
                quadrature::integrate_split(|x| f(x) * dens(x), 0.0, t, kink.filter(|&k| k > 0.0 && k < t), q)
            }
        }
    }

    /// `(E[f], E[f²])` computed on one shared adaptive partition, so that
    /// the variance `E[f²] − E[f]²` does not pick up independent kink errors.
    pub fn expect_pair_kinked<F: Fn(f64) -> f64>(
        &self,
        kink: Option<f64>,
        f: F,
        q: &Quadrature,
    ) -> Result<(f64, f64), QuadratureError> {
        match self {
            Self::Discrete { atoms } => {
                let mean = discrete_expect(atoms, |x| {
                    let v = f(x);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(QuadratureError::NonFinite(x))
                    }
                })?;
                let second = discrete_expect(atoms, |x| Ok(f(x) * f(x)))?;
                Ok((mean, second))
            }
            Self::RayleighGainSq { mean } => {
                let t = self.integration_cutoff(q);
                let dens = move |x: f64| (-x / mean).exp() / mean;
                let split = kink.filter(|&k| k > 0.0 && k < t);
                let mut out = [0.0f64; 2];
                for (lo, hi) in split_ranges(0.0, t, split) {
                    let piece = quadrature::integrate_many(
                        |x, buf| {
                            let v = f(x);
                            let d = dens(x);
                            buf[0] = v * d;
                            buf[1] = v * v * d;
                        },
                        2,
                        lo,
                        hi,
                        q,
                    )?;
                    out[0] += piece[0];
                    out[1] += piece[1];
                }
                Ok((out[0], out[1]))
            }
        }
    }

    /// Upper integration limit T with exponential tail mass below abs_tol/10.
    fn integration_cutoff(&self, q: &Quadrature) -> f64 {
        match self {
            Self::RayleighGainSq { mean } => mean * (10.0 / q.abs_tol).ln(),
            Self::Discrete { atoms } => atoms.last().unwrap().0,
        }
    }

    /// `count` i.i.d. draws; identical (law, count, seed) triples give
    /// bit-identical output.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        sample_chunked(count, seed, |rng| self.draw(rng))
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Self::RayleighGainSq { mean } => -mean * (-unit_f64(rng)).ln_1p(),
            Self::Discrete { atoms } => {
                let u = unit_f64(rng);
                let mut cum = 0.0;
                for &(x, p) in atoms {
                    cum += p;
                    if u < cum {
                        return x;
                    }
                }
                atoms.last().unwrap().0
            }
        }
    }
}

/// Distribution of the per-slot harvested energy E ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyLaw {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
}

impl EnergyLaw {
    pub fn constant(value: f64) -> Result<Self, LawError> {
        if !value.is_finite() || value < 0.0 {
            return Err(LawError::InvalidParameter(format!("constant arrival must be ≥ 0, got {value}")));
        }
        Ok(Self::Constant { value })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, LawError> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo {
            return Err(LawError::InvalidParameter(format!(
                "uniform arrivals need 0 ≤ lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::Uniform { lo, hi })
    }

    /// Uniform law with the requested mean and variance; the support must
    /// stay nonnegative.
    pub fn uniform_with_moments(mean: f64, variance: f64) -> Result<Self, LawError> {
        if variance == 0.0 {
            return Self::constant(mean);
        }
        if variance < 0.0 {
            return Err(LawError::InvalidParameter(format!("variance must be ≥ 0, got {variance}")));
        }
        let half_width = (3.0 * variance).sqrt();
        if mean - half_width < 0.0 {
            return Err(LawError::InvalidParameter(format!(
                "uniform arrivals with mean {mean} and variance {variance} would have negative support"
            )));
        }
        Self::uniform(mean - half_width, mean + half_width)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self, LawError> {
        // Same invariants as the fading law, reusing its validation.
        match FadingLaw::discrete(atoms)? {
            FadingLaw::Discrete { atoms } => Ok(Self::Discrete { atoms }),
            _ => unreachable!(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Discrete { atoms } => atoms.iter().map(|&(x, p)| x * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Self::Discrete { atoms } => {
                let m = self.mean();
                atoms.iter().map(|&(x, p)| (x - m) * (x - m) * p).sum()
            }
        }
    }

    /// Raw fourth moment `E[E⁴]`; finite for every supported kind.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            Self::Constant { value } => value.powi(4),
            Self::Uniform { lo, hi } => (hi.powi(5) - lo.powi(5)) / (5.0 * (hi - lo)),
            Self::Discrete { atoms } => atoms.iter().map(|&(x, p)| x.powi(4) * p).sum(),
        }
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        sample_chunked(count, seed, |rng| self.draw(rng))
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Uniform { lo, hi } => lo + (hi - lo) * unit_f64(rng),
            Self::Discrete { atoms } => {
                let u = unit_f64(rng);
                let mut cum = 0.0;
                for &(x, p) in atoms {
                    cum += p;
                    if u < cum {
                        return x;
                    }
                }
                atoms.last().unwrap().0
            }
        }
    }
}

/// Draws per ChaCha stream when a sampling call is split into chunks.
pub const SAMPLE_CHUNK: usize = 1 << 16;

/// RNG for chunk `stream` of the generator family keyed by `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in [0, 1) with 53 random bits.
pub(crate) fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample_chunked(count: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    for chunk in 0..chunks {
        let mut rng = stream_rng(seed, chunk as u64);
        let len = SAMPLE_CHUNK.min(count - chunk * SAMPLE_CHUNK);
        for _ in 0..len {
            out.push(draw(&mut rng));
        }
    }
    out
}

fn discrete_expect(
    atoms: &[(f64, f64)],
    f: impl Fn(f64) -> Result<f64, QuadratureError>,
) -> Result<f64, QuadratureError> {
    // Neumaier-compensated weighted sum.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &(x, p) in atoms {
        let term = p * f(x)?;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    Ok(sum + comp)
}

fn split_ranges(a: f64, b: f64, split: Option<f64>) -> Vec<(f64, f64)> {
    match split {
        Some(s) if s > a && s < b => vec![(a, s), (s, b)],
        _ => vec![(a, b)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn discrete_expect_is_exact_weighted_sum() {
        let law = FadingLaw::discrete(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let v = law.expect(|x| x, &q()).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn rayleigh_mean_matches_parameter() {
        let law = FadingLaw::rayleigh_gain_sq(2.0).unwrap();
        let v = law.expect(|x| x, &q()).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn rayleigh_exponential_moments() {
        // E[X^2] = 2 m² for an exponential with mean m.
        let law = FadingLaw::rayleigh_gain_sq(0.7).unwrap();
        let v = law.expect(|x| x * x, &q()).unwrap();
        assert!((v - 2.0 * 0.49).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn fig1_integrand_matches_monte_carlo() {
        // Rate integrand at the first figure fixture, validated by a
        // 10^7-draw sample mean within 3 standard errors.
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let f = |x: f64| (1.0 + x * 3.1623 / 4.0).log2();
        let exact = law.expect(f, &q()).unwrap();

        let n = 10_000_000usize;
        let draws = law.sample(n, 20_240_601);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for x in draws {
            let v = f(x);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sumsq - sum * sum / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (exact - mean).abs() <= 3.0 * se,
            "quadrature {exact} vs Monte Carlo {mean} ± {se}"
        );
    }

    #[test]
    fn expect_rejects_non_finite() {
        let law = FadingLaw::discrete(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let e = law.expect(|x| 1.0 / x, &q());
        assert!(matches!(e, Err(QuadratureError::NonFinite(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let law = FadingLaw::rayleigh_gain_sq(1.0).unwrap();
        assert_eq!(law.sample(1000, 7), law.sample(1000, 7));
        assert_ne!(law.sample(1000, 7), law.sample(1000, 8));
    }

    #[test]
    fn constant_energy_sample_is_degenerate() {
        let law = EnergyLaw::constant(5.0).unwrap();
        assert_eq!(law.sample(3, 42), vec![5.0, 5.0, 5.0]);
    }

    #[test]
    fn rayleigh_sample_mean_law_of_large_numbers() {
        let law = FadingLaw::rayleigh_gain_sq(1.0).unwrap();
        let n = 1_000_000usize;
        let mean = law.sample(n, 7).iter().sum::<f64>() / n as f64;
        // tolerance 4/sqrt(n) = 0.004 < 0.005
        assert!((mean - 1.0).abs() < 0.005, "got {mean}");
    }

    #[test]
    fn discrete_sample_zero_fraction() {
        let law = FadingLaw::discrete(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let n = 1_000_000usize;
        let zeros = law.sample(n, 1).iter().filter(|&&x| x == 0.0).count();
        let frac = zeros as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "got {frac}");
    }

    #[test]
    fn quantiles() {
        let law = FadingLaw::rayleigh_gain_sq(2.0).unwrap();
        assert!((law.quantile(0.5) - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        let d = FadingLaw::discrete(vec![(0.0, 0.25), (1.0, 0.5), (4.0, 0.25)]).unwrap();
        assert_eq!(d.quantile(0.2), 0.0);
        assert_eq!(d.quantile(0.7), 1.0);
        assert_eq!(d.quantile(0.9), 4.0);
    }

    #[test]
    fn energy_moments() {
        let u = EnergyLaw::uniform(1.0, 3.0).unwrap();
        assert!((u.mean() - 2.0).abs() < 1e-15);
        assert!((u.variance() - 4.0 / 12.0).abs() < 1e-15);
        // Raw fourth moment of U[1,3]: (3^5 - 1)/(5·2) = 24.2
        assert!((u.fourth_moment() - 24.2).abs() < 1e-12);

        let m = EnergyLaw::uniform_with_moments(17.0, 0.1).unwrap();
        assert!((m.mean() - 17.0).abs() < 1e-12);
        assert!((m.variance() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn law_validation() {
        assert!(FadingLaw::rayleigh_gain_sq(0.0).is_err());
        assert!(FadingLaw::discrete(vec![]).is_err());
        assert!(FadingLaw::discrete(vec![(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(FadingLaw::discrete(vec![(1.0, 0.6), (2.0, 0.5)]).is_err());
        assert!(FadingLaw::discrete(vec![(-1.0, 1.0)]).is_err());
        assert!(EnergyLaw::uniform(-0.1, 1.0).is_err());
        assert!(EnergyLaw::uniform_with_moments(1.0, 10.0).is_err());
    }
}
