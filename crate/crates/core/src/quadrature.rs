//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7-point Gauss / 15-point Kronrod pair with bisection of the interval
//! carrying the largest error estimate. This is the only integrator the crate
//! needs: every integrand is piecewise smooth with at most one kink (the
//! water-filling threshold), and callers split at the kink before integrating.
//!
//! Several moments of the same law are often needed together (e.g. `E[f]` and
//! `E[f²]` for a variance). [`integrate_many`] refines a shared partition for
//! a small vector of integrands so that both members of such a pair see the
//! same subdivision and the kink error cancels in their difference.

use thiserror::Error;

/// Tolerances and subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Quadrature {
    /// Paper fixtures are quoted to 4 significant digits; the defaults leave
    /// two orders of margin beyond that.
    pub const DEFAULT_REL_TOL: f64 = 1e-9;
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;

    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, QuadratureError> {
        if !rel_tol.is_finite() || rel_tol <= 0.0 || !abs_tol.is_finite() || abs_tol <= 0.0 {
            return Err(QuadratureError::InvalidTolerance { rel_tol, abs_tol });
        }
        if max_subdivisions < 16 {
            return Err(QuadratureError::TooFewSubdivisions(max_subdivisions));
        }
        Ok(Self { rel_tol, abs_tol, max_subdivisions })
    }

    /// Tolerance actually enforced for an integral of magnitude `scale`.
    pub fn tolerance_for(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale.abs())
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            abs_tol: Self::DEFAULT_ABS_TOL,
            max_subdivisions: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("tolerances must be positive, got rel_tol={rel_tol}, abs_tol={abs_tol}")]
    InvalidTolerance { rel_tol: f64, abs_tol: f64 },
    #[error("max_subdivisions must be at least 16, got {0}")]
    TooFewSubdivisions(usize),
    #[error("integrand returned a non-finite value near x={0}")]
    NonFinite(f64),
    #[error("adaptive refinement exhausted {subdivisions} subdivisions (error estimate {err_est:.3e}, target {target:.3e})")]
    NonConvergent { subdivisions: usize, err_est: f64, target: f64 },
}

// 15-point Kronrod abscissae on [0, 1] side of the symmetric rule, and the
// embedded 7-point Gauss weights. Standard published constants.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Up to this many integrands share one adaptive partition.
pub const MAX_COMPONENTS: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: [f64; MAX_COMPONENTS],
    error: f64,
}

fn qk15_many<F>(f: &F, m: usize, a: f64, b: f64) -> Result<Segment, QuadratureError>
where
    F: Fn(f64, &mut [f64; MAX_COMPONENTS]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut kronrod = [0.0f64; MAX_COMPONENTS];
    let mut gauss = [0.0f64; MAX_COMPONENTS];
    let mut buf = [0.0f64; MAX_COMPONENTS];

    let eval = |x: f64, buf: &mut [f64; MAX_COMPONENTS]| -> Result<(), QuadratureError> {
        f(x, buf);
        for v in buf.iter().take(m) {
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite(x));
            }
        }
        Ok(())
    };

    eval(center, &mut buf)?;
    for c in 0..m {
        kronrod[c] = buf[c] * WGK[7];
        gauss[c] = buf[c] * WG[3];
    }

    for j in 0..7 {
        let dx = half * XGK[j];
        eval(center - dx, &mut buf)?;
        let mut fsum = buf;
        eval(center + dx, &mut buf)?;
        for c in 0..m {
            fsum[c] += buf[c];
        }
        for c in 0..m {
            kronrod[c] += WGK[j] * fsum[c];
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * fsum[c];
            }
        }
    }

    let mut value = [0.0f64; MAX_COMPONENTS];
    let mut error = 0.0f64;
    for c in 0..m {
        value[c] = kronrod[c] * half;
        error += ((kronrod[c] - gauss[c]) * half).abs();
    }
    Ok(Segment { a, b, value, error })
}

/// Integrate `m ≤ MAX_COMPONENTS` integrands over `[a, b]` on one shared
/// adaptive partition. `f(x, out)` must fill `out[0..m]`.
pub fn integrate_many<F>(
    f: F,
    m: usize,
    a: f64,
    b: f64,
    q: &Quadrature,
) -> Result<[f64; MAX_COMPONENTS], QuadratureError>
where
    F: Fn(f64, &mut [f64; MAX_COMPONENTS]),
{
    assert!((1..=MAX_COMPONENTS).contains(&m));
    if a == b {
        return Ok([0.0; MAX_COMPONENTS]);
    }

    let mut segments = vec![qk15_many(&f, m, a, b)?];
    loop {
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let scale: f64 = segments
            .iter()
            .map(|s| s.value.iter().take(m).map(|v| v.abs()).sum::<f64>())
            .sum();
        if total_err <= q.tolerance_for(scale) {
            let mut out = [0.0f64; MAX_COMPONENTS];
            for (c, slot) in out.iter_mut().enumerate().take(m) {
                // Neumaier-compensated sum over segments.
                let mut sum = 0.0;
                let mut comp = 0.0;
                for s in &segments {
                    let x = s.value[c];
                    let t = sum + x;
                    comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
                    sum = t;
                }
                *slot = sum + comp;
            }
            return Ok(out);
        }
        if segments.len() >= q.max_subdivisions {
            return Err(QuadratureError::NonConvergent {
                subdivisions: segments.len(),
                err_est: total_err,
                target: q.tolerance_for(scale),
            });
        }
        // Bisect the segment with the largest error estimate.
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .expect("nonempty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval at floating-point resolution; accept its estimate.
            segments.push(Segment { error: 0.0, ..s });
            continue;
        }
        segments.push(qk15_many(&f, m, s.a, mid)?);
        segments.push(qk15_many(&f, m, mid, s.b)?);
    }
}

/// Integrate a single integrand over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &Quadrature) -> Result<f64, QuadratureError> {
    let out = integrate_many(|x, buf| buf[0] = f(x), 1, a, b, q)?;
    Ok(out[0])
}

/// Integrate over `[a, b]` with an interior split point (typically the
/// water-filling kink), so the rule never brackets the non-smooth point.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    split: Option<f64>,
    q: &Quadrature,
) -> Result<f64, QuadratureError> {
    match split {
        Some(s) if s > a && s < b => Ok(integrate(&f, a, s, q)? + integrate(&f, s, b, q)?),
        _ => integrate(f, a, b, q),
    }
}
