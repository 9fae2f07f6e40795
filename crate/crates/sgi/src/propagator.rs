//! Time-dependent coefficients of the damped two-branch propagator.
//!
//! Everything here is assembled from numerically stable building blocks:
//! `expm1`-based rewrites of the coth/sinh combinations, explicit small-x
//! series below a documented switchover, and exponentials that only ever see
//! non-positive arguments so large damping cannot overflow.

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::kernels::SpectralFunction;
use crate::profile::ForceProfile;
use crate::quad::{integrate_2d, QuadratureSpec};

/// gamma*t below which the dedicated series/limit paths are used.
pub const SMALL_X: f64 = 1e-6;

/// The full coefficient set of the propagator at one time.
#[derive(Debug, Clone, Copy)]
pub struct CoeffSet {
    /// Noise action coefficients [kg^2 m^2 / s].
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Kinematic coefficients [kg/s].
    pub l_plus: f64,
    pub l_minus: f64,
    pub n: f64,
    pub m: f64,
    /// Force-driven drift coefficients [kg m / s].
    pub x: f64,
    pub z: f64,
    /// Normalization prefactor [1/(J s) x 1/m^2-equivalent].
    pub g: f64,
    /// Time the set was evaluated at [s].
    pub t: f64,
}

/// How the bath noise enters the A, B, C coefficients.
#[derive(Debug, Clone)]
pub enum NoiseModel<'a> {
    /// No bath: A = B = C = 0.
    Off,
    /// Delta-correlated kernel with the given weight [kg^2 m^2 / s^2].
    HighTemperature { weight: f64 },
    /// Full finite-temperature kernel integrated by quadrature.
    Kernel {
        spectral: &'a SpectralFunction,
        temperature: f64,
        quadrature: QuadratureSpec,
    },
}

fn require_positive_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "time must be finite and strictly positive",
            value: t,
        });
    }
    Ok(())
}

/// (L+, L-, N, M) = m gamma (coth(gamma t) +/- 1), m gamma e^{-+gamma t}/sinh.
pub fn coeff_l_n_m(t: f64, mass: f64, gamma: f64) -> Result<(f64, f64, f64, f64)> {
    require_positive_time(t)?;
    if gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "damping rate must be >= 0",
            value: gamma,
        });
    }
    let x = gamma * t;
    if x < SMALL_X {
        // coth(x) = 1/x + x/3 + O(x^3); the 1/x pole cancels against m*gamma
        let l_plus = mass / t + mass * gamma + mass * gamma * gamma * t / 3.0;
        let l_minus = mass / t - mass * gamma + mass * gamma * gamma * t / 3.0;
        let n = mass / t * (1.0 - x + x * x / 3.0);
        let m = mass / t * (1.0 + x + x * x / 3.0);
        return Ok((l_plus, l_minus, n, m));
    }
    // m g (coth x + 1) = 2 m g / (1 - e^{-2x}); m g (coth x - 1) = 2 m g / (e^{2x} - 1)
    let l_plus = -2.0 * mass * gamma / f64::exp_m1(-2.0 * x);
    let l_minus = 2.0 * mass * gamma / f64::exp_m1(2.0 * x);
    let n = -2.0 * mass * gamma * (-2.0 * x).exp() / f64::exp_m1(-2.0 * x);
    let m = l_plus;
    Ok((l_plus, l_minus, n, m))
}

/// G(t) = m gamma e^{gamma t} / (2 pi hbar sinh gamma t); free limit m/(2 pi hbar t).
pub fn prefactor_g(t: f64, mass: f64, gamma: f64) -> Result<f64> {
    let (_, _, _, m) = coeff_l_n_m(t, mass, gamma)?;
    Ok(m / (2.0 * std::f64::consts::PI * HBAR))
}

/// Drift coefficients (X, Z) for a piecewise-constant force, in closed form
/// per segment.
pub fn coeff_x_z(fp: &ForceProfile, t: f64, gamma: f64) -> Result<(f64, f64)> {
    require_positive_time(t)?;
    let segs = fp.clipped(t)?;
    let x = gamma * t;
    if x < SMALL_X {
        // X -> (1/t) int f u du, Z -> (1/t) int f (t-u) du
        let mut xv = 0.0;
        let mut zv = 0.0;
        for s in &segs {
            let (a, b, f) = (s.t_start, s.t_end, s.f_value);
            xv += f * (b * b - a * a) / (2.0 * t);
            zv += f * ((b - a) - (b * b - a * a) / (2.0 * t));
        }
        return Ok((xv, zv));
    }
    // All exponentials below have non-positive arguments (a, b <= t).
    let denom = -f64::exp_m1(-2.0 * x); // 1 - e^{-2 gamma t}
    let mut xs = 0.0;
    let mut zs = 0.0;
    for s in &segs {
        let (a, b, f) = (s.t_start, s.t_end, s.f_value);
        let eb = (2.0 * gamma * (b - t)).exp();
        let ea = (2.0 * gamma * (a - t)).exp();
        // e^{-2 gamma t} * int_a^b e^{gamma u} sinh(gamma u) du, times 2
        xs += f * ((eb - ea) / (2.0 * gamma) - (-2.0 * x).exp() * (b - a));
        // e^{-gamma t} * int_a^b e^{gamma u} sinh(gamma (t-u)) du, times 2
        zs += f * ((b - a) - (eb - ea) / (2.0 * gamma));
    }
    Ok((xs / denom, zs / denom))
}

// ---------------------------------------------------------------------------
// High-temperature (delta-kernel) A, B, C
// ---------------------------------------------------------------------------

/// Series switchover for the shape functions below.
const ABC_SERIES_X: f64 = 0.05;

/// A(t) = weight * t * shape_a(gamma t); shape_a(0) = 1/3.
fn shape_a(x: f64) -> f64 {
    if x < ABC_SERIES_X {
        return 1.0 / 3.0 - x / 6.0 + x * x / 45.0 + x.powi(3) / 90.0 - x.powi(4) / 315.0
            - x.powi(5) / 945.0
            + 2.0 * x.powi(6) / 4725.0
            + x.powi(7) / 9450.0
            - x.powi(8) / 18711.0;
    }
    let e2 = (-2.0 * x).exp();
    let e4 = (-4.0 * x).exp();
    let denom = (1.0 - e2) * (1.0 - e2);
    ((1.0 - e4) / (4.0 * x) - (e2 - e4) / x + e4) / denom
}

/// B(t) = weight * t * shape_b(gamma t); shape_b(0) = 1/6. Even in x.
fn shape_b(x: f64) -> f64 {
    if x < ABC_SERIES_X {
        let x2 = x * x;
        return 1.0 / 6.0 - x2 / 45.0 + x2 * x2 / 315.0 - 2.0 * x2.powi(3) / 4725.0
            + x2.powi(4) / 18711.0;
    }
    let e2 = (-2.0 * x).exp();
    let e4 = (-4.0 * x).exp();
    let denom = (1.0 - e2) * (1.0 - e2);
    ((1.0 - e4) / (4.0 * x) - e2) / denom
}

/// C(t) = weight * t * shape_c(gamma t); shape_c(0) = 1/3.
fn shape_c(x: f64) -> f64 {
    if x < ABC_SERIES_X {
        return 1.0 / 3.0 + x / 6.0 + x * x / 45.0 - x.powi(3) / 90.0 - x.powi(4) / 315.0
            + x.powi(5) / 945.0
            + 2.0 * x.powi(6) / 4725.0
            - x.powi(7) / 9450.0
            - x.powi(8) / 18711.0;
    }
    let e2 = (-2.0 * x).exp();
    let e4 = (-4.0 * x).exp();
    let denom = (1.0 - e2) * (1.0 - e2);
    (1.0 - (1.0 - e2) / x + (1.0 - e4) / (4.0 * x)) / denom
}

/// Closed-form (A, B, C) for the delta-correlated high-temperature kernel.
pub fn coeff_abc_high_t(t: f64, gamma: f64, weight: f64) -> Result<(f64, f64, f64)> {
    require_positive_time(t)?;
    if weight < 0.0 {
        return Err(Error::InvalidParameter {
            name: "weight",
            reason: "delta-kernel weight must be >= 0",
            value: weight,
        });
    }
    let x = gamma * t;
    Ok((
        weight * t * shape_a(x),
        weight * t * shape_b(x),
        weight * t * shape_c(x),
    ))
}

// ---------------------------------------------------------------------------
// Quadrature A, B, C with a cached, interpolated noise kernel
// ---------------------------------------------------------------------------

/// Number of cache points over [-t, t].
const KERNEL_GRID: usize = 4096;

/// Noise kernel sampled on a uniform grid and interpolated with a 4-point
/// cubic; evenness halves the number of direct evaluations.
struct KernelCache {
    values: Vec<f64>,
    t: f64,
    step: f64,
}

impl KernelCache {
    fn build(
        sf: &SpectralFunction,
        temperature: f64,
        t: f64,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let n = KERNEL_GRID;
        let step = 2.0 * t / (n - 1) as f64;
        let mut values = vec![0.0; n];
        for k in 0..n {
            if 2 * k >= n {
                // alpha_R is even; mirror the already-computed half
                values[k] = values[n - 1 - k];
            } else {
                let s = -t + step * k as f64;
                values[k] = sf.noise_kernel(s, temperature, spec)?;
            }
        }
        Ok(KernelCache { values, t, step })
    }

    fn eval(&self, s: f64) -> f64 {
        let n = self.values.len();
        let pos = (s + self.t) / self.step;
        let i = (pos.floor() as isize).clamp(1, n as isize - 3) as usize;
        let u = pos - i as f64;
        // Catmull-Rom cubic through the four surrounding samples
        let (p0, p1, p2, p3) = (
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        );
        let a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let a2 = -0.5 * p0 + 0.5 * p2;
        ((a0 * u + a1) * u + a2) * u + p1
    }
}

/// Weight function multiplying the kernel for the A coefficient:
/// g(u) = e^{gamma (u - t)} sinh(gamma u) / sinh(gamma t), in [0, 1].
fn weight_g(u: f64, t: f64, gamma: f64) -> f64 {
    let x = gamma * t;
    if x < SMALL_X {
        return u / t;
    }
    (2.0 * gamma * (u - t)).exp() * (-f64::exp_m1(-2.0 * gamma * u)) / (-f64::exp_m1(-2.0 * x))
}

/// Weight function for the C coefficient:
/// c(u) = e^{gamma u} sinh(gamma (t - u)) / sinh(gamma t), in [0, 1].
fn weight_c(u: f64, t: f64, gamma: f64) -> f64 {
    let x = gamma * t;
    if x < SMALL_X {
        return (t - u) / t;
    }
    -f64::exp_m1(-2.0 * gamma * (t - u)) / -f64::exp_m1(-2.0 * x)
}

/// (A, B, C) by direct double quadrature of the kernel integrals.
pub fn coeff_abc_quadrature(
    t: f64,
    gamma: f64,
    temperature: f64,
    sf: &SpectralFunction,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, f64)> {
    require_positive_time(t)?;
    if sf.eta == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let cache = KernelCache::build(sf, temperature, t, spec)?;
    let domain = (0.0, t, 0.0, t);
    let a = integrate_2d(
        |tp, ts| weight_g(tp, t, gamma) * weight_g(ts, t, gamma) * cache.eval(tp - ts),
        domain,
        spec,
    )?;
    let b = integrate_2d(
        |tp, ts| weight_g(tp, t, gamma) * weight_c(ts, t, gamma) * cache.eval(tp - ts),
        domain,
        spec,
    )?;
    let c = integrate_2d(
        |tp, ts| weight_c(tp, t, gamma) * weight_c(ts, t, gamma) * cache.eval(tp - ts),
        domain,
        spec,
    )?;
    Ok((a.value, b.value, c.value))
}

/// Assemble the full coefficient set at time t.
pub fn coeff_set(
    fp: &ForceProfile,
    t: f64,
    mass: f64,
    gamma: f64,
    noise: &NoiseModel,
) -> Result<CoeffSet> {
    let (l_plus, l_minus, n, m) = coeff_l_n_m(t, mass, gamma)?;
    let (x, z) = coeff_x_z(fp, t, gamma)?;
    let g = m / (2.0 * std::f64::consts::PI * HBAR);
    let (a, b, c) = match noise {
        NoiseModel::Off => (0.0, 0.0, 0.0),
        NoiseModel::HighTemperature { weight } => coeff_abc_high_t(t, gamma, *weight)?,
        NoiseModel::Kernel {
            spectral,
            temperature,
            quadrature,
        } => coeff_abc_quadrature(t, gamma, *temperature, spectral, quadrature)?,
    };
    Ok(CoeffSet {
        a,
        b,
        c,
        l_plus,
        l_minus,
        n,
        m,
        x,
        z,
        g,
        t,
    })
}
