//! Seeded Monte Carlo oracles for the analytic machinery.
//!
//! Three simulators cross-check what the quadrature-based modules compute:
//!
//! * [`info_density_moments`] draws fading gains, Gaussian codeword blocks,
//!   and noise, accumulates the per-block log-likelihood ratio against the
//!   capacity-achieving output law, and checks its mean and variance against
//!   the capacity and dispersion components.
//! * [`power_violation_prob`] estimates the probability that a power
//!   controller driving a uniformly-drawn spherical codeword overshoots the
//!   peak-power budget in some block prefix, versus the Hoeffding-style
//!   analytic bound (reported as vacuous when it exceeds one).
//! * [`save_and_transmit`] runs the harvest-use-store buffer through a saving
//!   phase and a transmission phase, reporting the codeword energy-outage
//!   probability while hard-asserting buffer nonnegativity and the
//!   prefix-sum energy constraint at every slot.
//!
//! Trials are partitioned into fixed-size chunks, chunk `i` drawing from
//! ChaCha stream `(seed, i)`; chunk partials are merged in index order, so a
//! report is a pure function of its [`SimConfig`] regardless of worker count.

use std::collections::BTreeMap;
use std::io::Write;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::dispersion::dispersion_set;
use crate::distributions::{stream_rng, EnergyLaw};
use crate::quadrature::Quadrature;
use crate::waterfilling::{ChannelConfig, WaterfillSolution};

/// Trials per ChaCha stream; fixed so reports do not depend on how chunks are
/// scheduled across workers.
const TRIAL_CHUNK: u64 = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),
    #[error("energy ledger violated during simulation: {0}")]
    ConstraintBreach(String),
    #[error(transparent)]
    Dispersion(#[from] crate::dispersion::DispersionError),
}

/// Inputs shared by all three simulators.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    pub cfg: ChannelConfig,
    pub sol: WaterfillSolution,
    pub energy: Option<EnergyLaw>,
    /// Back-off δ_n ∈ (0, 1) of the spherical codebook (power-violation run).
    pub delta_n: Option<f64>,
    /// Saving-phase length N_n in slots (save-and-transmit run).
    pub save_slots: Option<u64>,
    /// Replace |X'|² by its mean 1 in the energy ledger; a degenerate mode
    /// for validating the buffer recursion against closed-form balances.
    pub unit_energy_symbols: bool,
}

impl SimConfig {
    pub fn new(seed: u64, trials: u64, cfg: ChannelConfig, sol: WaterfillSolution) -> Result<Self, SimError> {
        if trials == 0 {
            return Err(SimError::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(Self {
            seed,
            trials,
            cfg,
            sol,
            energy: None,
            delta_n: None,
            save_slots: None,
            unit_energy_symbols: false,
        })
    }

    pub fn with_energy(mut self, energy: EnergyLaw) -> Self {
        self.energy = Some(energy);
        self
    }

    pub fn with_delta_n(mut self, delta_n: f64) -> Result<Self, SimError> {
        if !(delta_n > 0.0 && delta_n < 1.0) {
            return Err(SimError::InvalidConfig(format!("delta_n must lie in (0, 1), got {delta_n}")));
        }
        self.delta_n = Some(delta_n);
        Ok(self)
    }

    pub fn with_save_slots(mut self, save_slots: u64) -> Self {
        self.save_slots = Some(save_slots);
        self
    }

    pub fn with_unit_energy_symbols(mut self, on: bool) -> Self {
        self.unit_energy_symbols = on;
        self
    }
}

/// Outcome of a simulation: a headline estimate with its standard error,
/// auxiliary statistics in `details`, and any statistical assertions that
/// failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub violated_assertions: Vec<String>,
    pub details: BTreeMap<String, f64>,
}

fn chunk_bounds(trials: u64) -> Vec<(u64, u64)> {
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    (0..chunks)
        .map(|c| {
            let start = c * TRIAL_CHUNK;
            (c, (trials - start).min(TRIAL_CHUNK))
        })
        .collect()
}

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn binomial_se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Per-block information density of the transmission scheme: the Gaussian
/// codeword symbol x' and noise w are CN(0,1), and with effective SNR s the
/// per-slot density in nats is
/// `ln(1+s) + [ s(|x'|² − |w|²) + 2√s·Re(x' w̄) ] / (1+s)`.
fn block_llr_nats(rng: &mut ChaCha8Rng, snr: f64, nc: u32) -> f64 {
    let mut total = nc as f64 * snr.ln_1p();
    if snr == 0.0 {
        return total;
    }
    let root = snr.sqrt();
    for _ in 0..nc {
        let a = std_normal(rng);
        let b = std_normal(rng);
        let c = std_normal(rng);
        let d = std_normal(rng);
        total += (snr * 0.5 * (a * a + b * b - c * c - d * d) + root * (a * c + b * d)) / (1.0 + snr);
    }
    total
}

/// Empirical mean and variance of the codeword log-likelihood ratio.
///
/// `estimate` is the mean per-block density in bits; the details carry the
/// codeword-level mean, its standard error, the per-block variance, and the
/// ratio of that variance to the per-block dispersion assembled from the
/// analytic components.
pub fn info_density_moments(sim: &SimConfig) -> Result<SimReport, SimError> {
    if sim.trials < 10_000 {
        return Err(SimError::InvalidConfig(format!(
            "information-density moments need at least 1e4 trials, got {}",
            sim.trials
        )));
    }
    let cfg = &sim.cfg;
    let sol = &sim.sol;
    let n = cfg.n() as f64;
    let capacity_nats = sol.capacity / std::f64::consts::LOG2_E;
    let center = n * capacity_nats;

    let partials: Vec<(f64, f64)> = chunk_bounds(sim.trials)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = stream_rng(sim.seed, chunk);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..len {
                let mut total = 0.0;
                for _ in 0..cfg.blocks {
                    let gain_sq = sol.law.draw(&mut rng);
                    total += block_llr_nats(&mut rng, sol.effective_snr(gain_sq), cfg.nc);
                }
                let x = total - center;
                sum += x;
                sumsq += x * x;
            }
            (sum, sumsq)
        })
        .collect();

    let trials = sim.trials as f64;
    let (sum, sumsq) = partials.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let mean_total_nats = center + sum / trials;
    let var_total_nats = ((sumsq - sum * sum / trials) / (trials - 1.0)).max(0.0);

    let bits = std::f64::consts::LOG2_E;
    let mean_total_bits = mean_total_nats * bits;
    let se_total_bits = (var_total_nats / trials).sqrt() * bits;
    let var_per_block_bits2 = var_total_nats / cfg.blocks as f64 * bits * bits;

    let disp = dispersion_set(sol, cfg, sim.energy.as_ref(), &Quadrature::default())?;
    let comparator = cfg.nc as f64 * disp.v_bf;
    let expected_mean_bits = n * sol.capacity;

    let mut violated = Vec::new();
    if (mean_total_bits - expected_mean_bits).abs() > 4.0 * se_total_bits {
        violated.push(format!(
            "codeword mean {mean_total_bits:.6} is more than 4 standard errors ({se_total_bits:.3e}) from n*C = {expected_mean_bits:.6}"
        ));
    }

    let mut details = BTreeMap::new();
    details.insert("mean_total_bits".into(), mean_total_bits);
    details.insert("se_total_bits".into(), se_total_bits);
    details.insert("expected_mean_bits".into(), expected_mean_bits);
    details.insert("var_per_block_bits2".into(), var_per_block_bits2);
    details.insert("dispersion_comparator_bits2".into(), comparator);
    details.insert("variance_ratio".into(), var_per_block_bits2 / comparator);

    Ok(SimReport {
        estimate: mean_total_bits / cfg.blocks as f64,
        std_error: se_total_bits / cfg.blocks as f64,
        trials: sim.trials,
        violated_assertions: violated,
        details,
    })
}

/// Probability that the power controller halts: some block prefix of the
/// uniformly-drawn spherical codeword exceeds the peak-power budget.
pub fn power_violation_prob(sim: &SimConfig) -> Result<SimReport, SimError> {
    let delta_n = sim
        .delta_n
        .ok_or_else(|| SimError::InvalidConfig("power-violation run needs delta_n".into()))?;
    let cfg = &sim.cfg;
    let sol = &sim.sol;
    let blocks = cfg.blocks as usize;
    let nc = cfg.nc as usize;
    let n = cfg.n() as f64;
    let budget = n * sol.pbar;

    let counts: Vec<u64> = chunk_bounds(sim.trials)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = stream_rng(sim.seed, chunk);
            let mut block_sq = vec![0.0f64; blocks];
            let mut powers = vec![0.0f64; blocks];
            let mut violations = 0u64;
            for _ in 0..len {
                let mut total_sq = 0.0;
                for b in 0..blocks {
                    let gain_sq = sol.law.draw(&mut rng);
                    powers[b] = sol.p_wf(gain_sq);
                    let mut s = 0.0;
                    for _ in 0..nc {
                        let z = std_normal(&mut rng);
                        s += z * z;
                    }
                    block_sq[b] = s;
                    total_sq += s;
                }
                // Project the Gaussian draw onto the sphere of squared
                // radius n(1−δ_n).
                let scale = n * (1.0 - delta_n) / total_sq;
                let mut prefix = 0.0;
                for b in 0..blocks {
                    prefix += block_sq[b] * scale * powers[b];
                    if prefix > budget {
                        violations += 1;
                        break;
                    }
                }
            }
            violations
        })
        .collect();

    let violations: u64 = counts.iter().sum();
    let estimate = violations as f64 / sim.trials as f64;

    let nc_f = cfg.nc as f64;
    let hoeffding = (-(n * sol.pbar * sol.pbar * delta_n * delta_n)
        / (8.0 * (nc_f + 1.0) * sol.lambda * sol.lambda))
        .exp();
    let residual_term = 64.0 * (2.0 * nc_f + 3.0).powi(4) / n.sqrt();
    let analytic_bound = hoeffding + residual_term;
    let vacuous = analytic_bound >= 1.0;

    let mut violated = Vec::new();
    if !vacuous && estimate > analytic_bound {
        violated.push(format!(
            "violation estimate {estimate:.6} exceeds the analytic bound {analytic_bound:.6}"
        ));
    }

    let mut details = BTreeMap::new();
    details.insert("delta_n".into(), delta_n);
    details.insert("analytic_bound".into(), analytic_bound.min(1.0));
    details.insert("analytic_bound_raw".into(), analytic_bound);
    details.insert("bound_vacuous".into(), if vacuous { 1.0 } else { 0.0 });

    Ok(SimReport {
        estimate,
        std_error: binomial_se(estimate, sim.trials),
        trials: sim.trials,
        violated_assertions: violated,
        details,
    })
}

/// Per-slot trace sink: (slot, arrival, buffer after, symbol energy, outage).
type TraceSink<'a> = &'a mut dyn FnMut(u64, f64, f64, f64, bool);

struct BufferChunk {
    outage_codewords: u64,
    outage_slots: u64,
    breach: Option<String>,
}

fn run_buffer_trial(
    rng: &mut ChaCha8Rng,
    sim: &SimConfig,
    energy: &EnergyLaw,
    save_slots: u64,
    mut trace: Option<TraceSink<'_>>,
) -> Result<(bool, u64), String> {
    let cfg = &sim.cfg;
    let sol = &sim.sol;
    let mut buffer = 0.0f64; // initially empty
    let mut harvested = 0.0f64;
    let mut spent = 0.0f64;
    let mut slot = 0u64;
    let mut outage_slots = 0u64;

    // Prefix-sum check allows for rounding drift of the two running totals.
    let ledger_ok = |spent: f64, harvested: f64| spent <= harvested * (1.0 + 1e-12) + 1e-9;

    for _ in 0..save_slots {
        let e = energy.draw(rng);
        harvested += e;
        buffer += e;
        if let Some(t) = trace.as_deref_mut() {
            t(slot, e, buffer, 0.0, false);
        }
        slot += 1;
    }

    let mut any_outage = false;
    for _ in 0..cfg.blocks {
        let gain_sq = sol.law.draw(rng);
        let power = sol.p_wf(gain_sq);
        for _ in 0..cfg.nc {
            let e = energy.draw(rng);
            harvested += e;
            let available = buffer + e;
            let req = if sim.unit_energy_symbols {
                power
            } else {
                let a = std_normal(rng);
                let b = std_normal(rng);
                power * 0.5 * (a * a + b * b)
            };
            let outage = req > available;
            if outage {
                any_outage = true;
                outage_slots += 1;
                buffer = available;
            } else {
                buffer = available - req;
                spent += req;
            }
            if buffer < 0.0 {
                return Err(format!("buffer went negative ({buffer:.3e}) at slot {slot}"));
            }
            if !ledger_ok(spent, harvested) {
                return Err(format!(
                    "prefix energy constraint failed at slot {slot}: spent {spent:.12e} > harvested {harvested:.12e}"
                ));
            }
            if let Some(t) = trace.as_deref_mut() {
                t(slot, e, buffer, if outage { 0.0 } else { req }, outage);
            }
            slot += 1;
        }
    }
    Ok((any_outage, outage_slots))
}

/// Save-and-transmit energy buffer simulation.
///
/// After `save_slots` idle slots of accumulation, a Gaussian codeword is
/// power-controlled through the buffer; a slot whose symbol energy exceeds
/// the available energy transmits nothing, and a codeword counts as
/// outage-affected if any of its slots did. Buffer nonnegativity and the
/// cumulative harvest-versus-spend constraint are enforced at every slot; a
/// failure is a simulator bug and aborts with [`SimError::ConstraintBreach`].
pub fn save_and_transmit(sim: &SimConfig) -> Result<SimReport, SimError> {
    let energy = sim
        .energy
        .as_ref()
        .ok_or_else(|| SimError::InvalidConfig("save-and-transmit run needs an energy law".into()))?;
    let save_slots = sim
        .save_slots
        .ok_or_else(|| SimError::InvalidConfig("save-and-transmit run needs save_slots".into()))?;

    let chunks: Vec<BufferChunk> = chunk_bounds(sim.trials)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = stream_rng(sim.seed, chunk);
            let mut out = BufferChunk { outage_codewords: 0, outage_slots: 0, breach: None };
            for _ in 0..len {
                match run_buffer_trial(&mut rng, sim, energy, save_slots, None) {
                    Ok((any, slots)) => {
                        out.outage_codewords += any as u64;
                        out.outage_slots += slots;
                    }
                    Err(msg) => {
                        out.breach = Some(msg);
                        break;
                    }
                }
            }
            out
        })
        .collect();

    let mut outage_codewords = 0u64;
    let mut outage_slots = 0u64;
    for c in &chunks {
        if let Some(msg) = &c.breach {
            return Err(SimError::ConstraintBreach(msg.clone()));
        }
        outage_codewords += c.outage_codewords;
        outage_slots += c.outage_slots;
    }

    let estimate = outage_codewords as f64 / sim.trials as f64;
    let mut details = BTreeMap::new();
    details.insert("save_slots".into(), save_slots as f64);
    details.insert("mean_outage_slots".into(), outage_slots as f64 / sim.trials as f64);

    Ok(SimReport {
        estimate,
        std_error: binomial_se(estimate, sim.trials),
        trials: sim.trials,
        violated_assertions: Vec::new(),
        details,
    })
}

/// Debug trace of one save-and-transmit trial, as CSV rows
/// `slot,arrival,buffer,symbol_energy,outage`.
///
/// The trial index addresses the same draws the bulk run uses, so a traced
/// trial reproduces the corresponding trial of [`save_and_transmit`] exactly.
pub fn save_and_transmit_trace<W: Write>(sim: &SimConfig, trial: u64, out: &mut W) -> Result<(), SimError> {
    if trial >= sim.trials {
        return Err(SimError::InvalidConfig(format!(
            "trial index {trial} out of range for {} trials",
            sim.trials
        )));
    }
    let energy = sim
        .energy
        .as_ref()
        .ok_or_else(|| SimError::InvalidConfig("save-and-transmit trace needs an energy law".into()))?;
    let save_slots = sim
        .save_slots
        .ok_or_else(|| SimError::InvalidConfig("save-and-transmit trace needs save_slots".into()))?;

    let chunk = trial / TRIAL_CHUNK;
    let offset = trial % TRIAL_CHUNK;
    let mut rng = stream_rng(sim.seed, chunk);
    for _ in 0..offset {
        run_buffer_trial(&mut rng, sim, energy, save_slots, None).map_err(SimError::ConstraintBreach)?;
    }

    let mut rows: Vec<String> = vec!["slot,arrival,buffer,symbol_energy,outage".into()];
    {
        let mut sink = |slot: u64, arrival: f64, buffer: f64, symbol: f64, outage: bool| {
            rows.push(format!("{slot},{arrival:.9e},{buffer:.9e},{symbol:.9e},{}", outage as u8));
        };
        run_buffer_trial(&mut rng, sim, energy, save_slots, Some(&mut sink))
            .map_err(SimError::ConstraintBreach)?;
    }
    for row in rows {
        writeln!(out, "{row}").map_err(|e| SimError::InvalidConfig(format!("trace write failed: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::FadingLaw;
    use crate::waterfilling::solve_waterfill;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    fn constant_channel(pbar: f64) -> WaterfillSolution {
        let law = FadingLaw::point_mass(1.0).unwrap();
        solve_waterfill(&law, 1.0, pbar, &q()).unwrap()
    }

    #[test]
    fn info_density_constant_channel_single_block() {
        // B = 1, n_c = 1: the mean over noise and codeword draws is C(G²).
        let sol = constant_channel(1.0);
        let cfg = ChannelConfig::new(1.0, 1, 1, 0.05).unwrap();
        let sim = SimConfig::new(11, 200_000, cfg, sol.clone()).unwrap();
        let rep = info_density_moments(&sim).unwrap();
        assert!(rep.violated_assertions.is_empty(), "{:?}", rep.violated_assertions);
        assert!((rep.estimate - sol.capacity).abs() < 4.0 * rep.std_error);
    }

    #[test]
    fn info_density_requires_enough_trials() {
        let sol = constant_channel(1.0);
        let cfg = ChannelConfig::new(1.0, 1, 1, 0.05).unwrap();
        let sim = SimConfig::new(11, 100, cfg, sol).unwrap();
        assert!(matches!(info_density_moments(&sim), Err(SimError::InvalidConfig(_))));
    }

    #[test]
    fn info_density_mean_scales_with_nc() {
        // Doubling n_c doubles the codeword mean under a common seed.
        let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
        let sol = solve_waterfill(&law, 4.0, 3.1623, &q()).unwrap();
        let cfg1 = ChannelConfig::new(4.0, 5, 40, 0.05).unwrap();
        let cfg2 = ChannelConfig::new(4.0, 10, 40, 0.05).unwrap();
        let r1 = info_density_moments(&SimConfig::new(3, 20_000, cfg1, sol.clone()).unwrap()).unwrap();
        let r2 = info_density_moments(&SimConfig::new(3, 20_000, cfg2, sol).unwrap()).unwrap();
        let m1 = r1.details["mean_total_bits"];
        let m2 = r2.details["mean_total_bits"];
        let se = 4.0 * (r1.details["se_total_bits"] + r2.details["se_total_bits"]);
        assert!((2.0 * m1 - m2).abs() < 2.0 * se, "2*{m1} vs {m2}");
    }

    #[test]
    fn power_violation_impossible_when_budget_covers_peak() {
        // λ·n(1−δ) ≤ n·P̄ makes the violation event empty.
        let sol = constant_channel(1.0); // λ = 2, P̄ = 1
        let cfg = ChannelConfig::new(1.0, 4, 25, 0.05).unwrap();
        let sim = SimConfig::new(5, 2_000, cfg, sol)
            .unwrap()
            .with_delta_n(0.6)
            .unwrap(); // 2·(1−0.6) = 0.8 ≤ 1
        let rep = power_violation_prob(&sim).unwrap();
        assert_eq!(rep.estimate, 0.0);
    }

    #[test]
    fn power_violation_constant_inversion_is_zero() {
        // P_WF ≡ P̄ exactly: violation needs ‖X̃‖² > n, impossible on the
        // shrunk sphere.
        let sol = constant_channel(2.5);
        let cfg = ChannelConfig::new(1.0, 4, 25, 0.05).unwrap();
        let sim = SimConfig::new(6, 2_000, cfg, sol).unwrap().with_delta_n(0.05).unwrap();
        let rep = power_violation_prob(&sim).unwrap();
        assert_eq!(rep.estimate, 0.0);
    }

    #[test]
    fn save_and_transmit_deterministic_balance() {
        // Constant arrivals matching a constant per-slot drain, with
        // unit-energy symbols: never an outage, for any saving length. The
        // arrival is pinned to the solved allocation so the balance is exact
        // down to the bisection residual.
        let sol = constant_channel(5.0);
        let energy = EnergyLaw::constant(sol.p_wf(1.0)).unwrap();
        let cfg = ChannelConfig::new(1.0, 10, 20, 0.1).unwrap();
        for save in [0u64, 7] {
            let sim = SimConfig::new(9, 500, cfg.clone(), sol.clone())
                .unwrap()
                .with_energy(energy.clone())
                .with_save_slots(save)
                .with_unit_energy_symbols(true);
            let rep = save_and_transmit(&sim).unwrap();
            assert_eq!(rep.estimate, 0.0, "outage at save={save}");
        }
    }

    #[test]
    fn saving_phase_reduces_outage_with_common_seeds() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let energy = EnergyLaw::uniform_with_moments(17.0, 0.1).unwrap();
        let cfg = ChannelConfig::new(0.4, 20, 50, 0.1).unwrap();
        let base = SimConfig::new(13, 2_000, cfg, sol).unwrap().with_energy(energy);
        let with_save = save_and_transmit(&base.clone().with_save_slots(300)).unwrap();
        let without = save_and_transmit(&base.with_save_slots(0)).unwrap();
        assert!(
            without.estimate > with_save.estimate,
            "{} vs {}",
            without.estimate,
            with_save.estimate
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let law = FadingLaw::rayleigh_gain_sq(0.9).unwrap();
        let sol = solve_waterfill(&law, 0.4, 17.0, &q()).unwrap();
        let energy = EnergyLaw::uniform_with_moments(17.0, 0.1).unwrap();
        let cfg = ChannelConfig::new(0.4, 5, 20, 0.1).unwrap();
        let sim = SimConfig::new(21, 3_000, cfg, sol)
            .unwrap()
            .with_energy(energy)
            .with_save_slots(40);
        let a = save_and_transmit(&sim).unwrap();
        let b = save_and_transmit(&sim).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_matches_bulk_run() {
        let sol = constant_channel(2.0);
        let energy = EnergyLaw::uniform(1.0, 3.0).unwrap();
        let cfg = ChannelConfig::new(1.0, 3, 4, 0.1).unwrap();
        let sim = SimConfig::new(17, 600, cfg, sol).unwrap().with_energy(energy).with_save_slots(5);
        let mut buf = Vec::new();
        save_and_transmit_trace(&sim, 300, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "slot,arrival,buffer,symbol_energy,outage");
        // header + save slots + B·n_c transmission slots
        assert_eq!(lines.len(), 1 + 5 + 12);
        let mut buf2 = Vec::new();
        save_and_transmit_trace(&sim, 300, &mut buf2).unwrap();
        assert_eq!(text, String::from_utf8(buf2).unwrap());
    }
}
