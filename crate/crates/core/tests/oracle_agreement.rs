//! Monte Carlo cross-checks of the quadrature-based moments.
//!
//! Every statistic here is computed twice: analytically through the adaptive
//! quadrature path, and empirically from seeded i.i.d. gain draws. The two
//! routes share nothing past the law itself.

use blockfade::dispersion::{func_c_nats, func_l, func_v};
use blockfade::distributions::FadingLaw;
use blockfade::quadrature::Quadrature;
use blockfade::waterfilling::solve_waterfill;

struct MonteCarlo {
    mean: f64,
    se_mean: f64,
    variance: f64,
    se_variance: f64,
}

fn monte_carlo(values: &[f64]) -> MonteCarlo {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let variance = m2 / (n - 1.0);
    m4 /= n;
    MonteCarlo {
        mean,
        se_mean: (variance / n).sqrt(),
        variance,
        // delta-method standard error of the sample variance
        se_variance: ((m4 - variance * variance).max(0.0) / n).sqrt(),
    }
}

fn check_fixture(label: &str, sigma_h2: f64, sigma_n2: f64, pbar: f64, seed: u64) {
    const DRAWS: usize = 10_000_000;
    let q = Quadrature::default();
    let law = FadingLaw::rayleigh_gain_sq(sigma_h2).unwrap();
    let sol = solve_waterfill(&law, sigma_n2, pbar, &q).unwrap();

    let gains = law.sample(DRAWS, seed);
    let snrs: Vec<f64> = gains.iter().map(|&g| sol.effective_snr(g)).collect();

    let checks: [(&str, fn(f64) -> f64); 3] = [("C", func_c_nats), ("L", func_l), ("V", func_v)];
    for (name, f) in checks {
        let exact_mean = sol.expect_snr(f, &q).unwrap();
        let (m1, m2) = sol.expect_snr_pair(f, &q).unwrap();
        let exact_var = m2 - m1 * m1;

        let values: Vec<f64> = snrs.iter().map(|&s| f(s)).collect();
        let mc = monte_carlo(&values);
        assert!(
            (exact_mean - mc.mean).abs() <= 4.0 * mc.se_mean,
            "{label}: E[{name}] quadrature {exact_mean} vs MC {} ± {}",
            mc.mean,
            mc.se_mean
        );
        assert!(
            (exact_var - mc.variance).abs() <= 4.0 * mc.se_variance,
            "{label}: Var[{name}] quadrature {exact_var} vs MC {} ± {}",
            mc.variance,
            mc.se_variance
        );
    }

    // Capacity in bits through the same agreement gate.
    let values: Vec<f64> = snrs.iter().map(|&s| (1.0 + s).log2()).collect();
    let mc = monte_carlo(&values);
    assert!(
        (sol.capacity - mc.mean).abs() <= 4.0 * mc.se_mean,
        "{label}: capacity quadrature {} vs MC {} ± {}",
        sol.capacity,
        mc.mean,
        mc.se_mean
    );
}

#[test]
fn first_figure_fixture_moments_agree() {
    check_fixture("fig1", 0.1, 4.0, 20.0, 0x5eed_0001);
}

#[test]
fn harvesting_figure_fixture_moments_agree() {
    // The mean arrival rate plays the average-power role here.
    check_fixture("fig4", 0.9, 0.4, 17.0, 0x5eed_0002);
}

#[test]
fn no_csit_snr_moments_agree() {
    const DRAWS: usize = 1_000_000;
    let q = Quadrature::default();
    let law = FadingLaw::rayleigh_gain_sq(0.1).unwrap();
    let pbar = 20.0;
    let snr = |x: f64| x * pbar / 4.0;

    let exact = law.expect(|x| func_c_nats(snr(x)), &q).unwrap();
    let values: Vec<f64> = law.sample(DRAWS, 0x5eed_0003).iter().map(|&x| func_c_nats(snr(x))).collect();
    let mc = monte_carlo(&values);
    assert!(
        (exact - mc.mean).abs() <= 4.0 * mc.se_mean,
        "no-CSIT capacity: quadrature {exact} vs MC {} ± {}",
        mc.mean,
        mc.se_mean
    );
}
