//! Reduced density-matrix blocks and the observables read off them.
//!
//! Each spin block is a complex Gaussian in the center coordinate q and the
//! relative coordinate xi. All exponents are kept in log space until the last
//! moment so strongly separated branches (coherences ~ e^{-200}) do not
//! underflow.

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::profile::ForceProfile;
use crate::propagator::{coeff_set, coeff_x_z, CoeffSet, NoiseModel};
use crate::quad::{integrate_1d, QuadratureSpec};
use num_complex::Complex64;

/// Complex Gaussian exp(c_qq q^2 + c_xixi xi^2 + c_qxi q xi + c_q q + c_xi xi
/// + log_prefactor) over (q, xi).
#[derive(Debug, Clone, Copy)]
pub struct GaussianBlock {
    pub c_qq: Complex64,
    pub c_xixi: Complex64,
    pub c_qxi: Complex64,
    pub c_q: Complex64,
    pub c_xi: Complex64,
    pub log_prefactor: Complex64,
}

impl GaussianBlock {
    pub fn eval(&self, q: f64, xi: f64) -> Complex64 {
        self.log_exponent(q, xi).exp()
    }

    /// Full complex exponent including the prefactor, before exponentiation.
    pub fn log_exponent(&self, q: f64, xi: f64) -> Complex64 {
        self.c_qq * q * q
            + self.c_xixi * xi * xi
            + self.c_qxi * q * xi
            + self.c_q * q
            + self.c_xi * xi
            + self.log_prefactor
    }

    /// The real part of the quadratic form must be negative definite for the
    /// block to be normalizable.
    pub fn is_normalizable(&self) -> bool {
        let aq = -self.c_qq.re;
        let ax = -self.c_xixi.re;
        let cross = self.c_qxi.re;
        aq > 0.0 && ax > 0.0 && 4.0 * aq * ax > cross * cross
    }
}

/// a(t) = (1/hbar^2) (L+^2 sigma^2 / 2 + hbar C / 2 + hbar^2 / 8 sigma^2) [1/m^2].
pub fn a_of_t(coeffs: &CoeffSet, sigma: f64) -> f64 {
    let h2 = HBAR * HBAR;
    (coeffs.l_plus * coeffs.l_plus * sigma * sigma / 2.0
        + HBAR * coeffs.c / 2.0
        + h2 / (8.0 * sigma * sigma))
        / h2
}

/// a'(t), the width parameter of the off-diagonal block [1/m^2].
///
/// Evaluated in a rearranged form: the printed leading factor
/// (1 - sigma^2 L+^2 / 2 a hbar^2) suffers total cancellation at t -> 0, so
/// it is replaced by F / 2 a hbar^2 with F = hbar C + hbar^2 / 4 sigma^2,
/// using 2 a hbar^2 = L+^2 sigma^2 + F exactly.
pub fn a_prime(coeffs: &CoeffSet, sigma: f64) -> f64 {
    let a = a_of_t(coeffs, sigma);
    let h2 = HBAR * HBAR;
    let s2 = sigma * sigma;
    let f = HBAR * coeffs.c + h2 / (4.0 * s2);
    let two_a_h2 = 2.0 * a * h2;
    2.0 * s2 * coeffs.n * coeffs.n / h2 * (f / two_a_h2) - coeffs.b * coeffs.b / (a * h2)
        + 2.0 * coeffs.a / HBAR
        + 2.0 * s2 * coeffs.l_plus * coeffs.n * coeffs.b / (a * h2 * HBAR)
}

/// sigma~(t) = hbar sqrt(2 a) / M, the half-width of the diagonal blocks [m].
pub fn packet_width(coeffs: &CoeffSet, sigma: f64) -> f64 {
    HBAR * (2.0 * a_of_t(coeffs, sigma)).sqrt() / coeffs.m
}

/// h(t) = M / (2 hbar sqrt(a a')), the irreversible attenuation factor.
pub fn h_factor(coeffs: &CoeffSet, sigma: f64) -> Result<f64> {
    let a = a_of_t(coeffs, sigma);
    let ap = a_prime(coeffs, sigma);
    if !(ap > 0.0) {
        return Err(Error::Regime(format!(
            "off-diagonal width parameter a' = {ap:e} is not positive at t = {:e}",
            coeffs.t
        )));
    }
    Ok(coeffs.m / (2.0 * HBAR * (a * ap).sqrt()))
}

/// Damped classical center displacement of the spin-up branch:
/// z(t) = (1/2 m gamma) int_0^t f(t') (1 - e^{-2 gamma (t - t')}) dt'.
pub fn packet_center(fp: &ForceProfile, t: f64, mass: f64, gamma: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let segs = fp.clipped(t)?;
    // antiderivative helper: w(tau) = int_0^tau (1 - e^{-2 gamma s}) ds / (2 gamma)
    //                               = (2 gamma tau - 1 + e^{-2 gamma tau}) / (4 gamma^2)
    let w = |tau: f64| -> f64 {
        let x = gamma * tau;
        if x < 1e-4 {
            // cancellation-free series
            tau * tau / 2.0 - gamma * tau * tau * tau / 3.0
                + gamma * gamma * tau * tau * tau * tau / 6.0
        } else {
            (2.0 * x - 1.0 + (-2.0 * x).exp()) / (4.0 * gamma * gamma)
        }
    };
    let mut z = 0.0;
    for s in &segs {
        z += s.f_value * (w(t - s.t_start) - w(t - s.t_end));
    }
    Ok(z / mass)
}

/// Diagonal spin block of the reduced density operator; `spin_sign` = +1/-1
/// selects the up/down branch.
pub fn diagonal_block(coeffs: &CoeffSet, sigma: f64, spin_sign: f64) -> GaussianBlock {
    let a = a_of_t(coeffs, sigma);
    let h2 = HBAR * HBAR;
    let s2 = sigma * sigma;
    // recurring combination sigma^2 N L+ - hbar B
    let k = s2 * coeffs.n * coeffs.l_plus - HBAR * coeffs.b;
    let i = Complex64::i();
    let c_qq = Complex64::new(-coeffs.m * coeffs.m / (4.0 * a * h2), 0.0);
    let c_q = Complex64::new(spin_sign * coeffs.m * coeffs.z / (2.0 * a * h2), 0.0);
    let c_xixi = Complex64::new(
        -(coeffs.a / (2.0 * HBAR) + coeffs.n * coeffs.n * s2 / (2.0 * h2)
            - k * k / (4.0 * a * h2 * h2)),
        0.0,
    );
    let c_qxi = i / HBAR * (coeffs.l_minus - coeffs.m * k / (2.0 * a * h2));
    let c_xi = i / HBAR * spin_sign * (coeffs.x + coeffs.z * k / (2.0 * a * h2));
    let log_prefactor = Complex64::new(
        0.5 * (std::f64::consts::PI / a).ln() + coeffs.g.ln()
            - coeffs.z * coeffs.z / (4.0 * a * h2),
        0.0,
    );
    GaussianBlock {
        c_qq,
        c_xixi,
        c_qxi,
        c_q,
        c_xi,
        log_prefactor,
    }
}

/// Off-diagonal spin block; `branch` = +1/-1 selects which of the two
/// conjugate blocks is built.
pub fn offdiagonal_block(coeffs: &CoeffSet, sigma: f64, branch: f64) -> GaussianBlock {
    let a = a_of_t(coeffs, sigma);
    let ap = a_prime(coeffs, sigma);
    let h2 = HBAR * HBAR;
    let s2 = sigma * sigma;
    // recurring combination B/(2 a hbar) - sigma^2 N L+ / (2 a hbar^2)
    let k = coeffs.b / (2.0 * a * HBAR) - s2 * coeffs.n * coeffs.l_plus / (2.0 * a * h2);
    let i = Complex64::i();
    let c_qq = Complex64::new(-ap, 0.0);
    let c_qxi = i / HBAR * (coeffs.m * k + coeffs.l_minus);
    let c_q = i / HBAR * branch * 2.0 * (coeffs.x - coeffs.z * k);
    let c_xixi = Complex64::new(-coeffs.m * coeffs.m / (16.0 * a * h2), 0.0);
    let c_xi = Complex64::new(branch * coeffs.m * coeffs.z / (4.0 * a * h2), 0.0);
    let log_prefactor = Complex64::new(
        0.5 * (std::f64::consts::PI / a).ln() + coeffs.g.ln()
            - coeffs.z * coeffs.z / (4.0 * a * h2),
        0.0,
    );
    GaussianBlock {
        c_qq,
        c_xixi,
        c_qxi,
        c_q,
        c_xi,
        log_prefactor,
    }
}

/// Point value of the diagonal block.
pub fn rho_diagonal(q: f64, xi: f64, coeffs: &CoeffSet, sigma: f64, spin_sign: f64) -> Complex64 {
    diagonal_block(coeffs, sigma, spin_sign).eval(q, xi)
}

/// Point value of the off-diagonal block.
pub fn rho_offdiagonal(q: f64, xi: f64, coeffs: &CoeffSet, sigma: f64, branch: f64) -> Complex64 {
    offdiagonal_block(coeffs, sigma, branch).eval(q, xi)
}

/// How the coherence is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMode {
    /// Closed-form attenuation and overlap exponents.
    ClosedFormHighT,
    /// 1-D quadrature of the off-diagonal block at xi = 0.
    TraceIntegral,
}

/// ln C(t), always finite even when C underflows f64.
pub fn log_coherence(coeffs: &CoeffSet, sigma: f64) -> Result<f64> {
    let a = a_of_t(coeffs, sigma);
    let ap = a_prime(coeffs, sigma);
    if !(ap > 0.0) {
        return Err(Error::Regime(format!(
            "off-diagonal width parameter a' = {ap:e} is not positive at t = {:e}",
            coeffs.t
        )));
    }
    let h2 = HBAR * HBAR;
    let s2 = sigma * sigma;
    let log_h = (coeffs.m / (2.0 * HBAR)).ln() - 0.5 * (a.ln() + ap.ln());
    let k = coeffs.b / (2.0 * a * HBAR) - s2 * coeffs.n * coeffs.l_plus / (2.0 * a * h2);
    let e1 = (coeffs.x - coeffs.z * k).powi(2) / (ap * h2);
    let e2 = coeffs.z * coeffs.z / (4.0 * a * h2);
    Ok(log_h - e1 - e2)
}

/// C(t), by the requested mode.
pub fn coherence(
    coeffs: &CoeffSet,
    sigma: f64,
    mode: CoherenceMode,
    quadrature: &QuadratureSpec,
) -> Result<f64> {
    match mode {
        CoherenceMode::ClosedFormHighT => Ok(log_coherence(coeffs, sigma)?.exp()),
        CoherenceMode::TraceIntegral => {
            let block = offdiagonal_block(coeffs, sigma, 1.0);
            // integration window from the real q^2 decay, centered on the
            // stationary point of the real part of the exponent
            let ap = -block.c_qq.re;
            if !(ap > 0.0) {
                return Err(Error::Regime(format!(
                    "off-diagonal width parameter a' = {:e} is not positive at t = {:e}",
                    -ap, coeffs.t
                )));
            }
            let center = block.c_q.re / (2.0 * ap);
            let half_width = 14.0 / ap.sqrt();
            // factor the peak log-magnitude out of the integral so strongly
            // attenuated coherences do not underflow
            let peak = block.log_exponent(center, 0.0).re;
            // pre-split so each chunk holds at most ~1 phase oscillation;
            // a single adaptive panel can alias a fast phase to near-zero
            // error estimates
            let cycles = block.c_q.im.abs() * half_width / std::f64::consts::PI;
            let chunks = (2.0 * cycles).ceil().max(4.0) as usize;
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..chunks {
                let q0 = center - half_width + 2.0 * half_width * k as f64 / chunks as f64;
                let q1 = center - half_width + 2.0 * half_width * (k + 1) as f64 / chunks as f64;
                re += integrate_1d(
                    |q| (block.log_exponent(q, 0.0) - peak).exp().re,
                    q0,
                    q1,
                    quadrature,
                )?
                .value;
                im += integrate_1d(
                    |q| (block.log_exponent(q, 0.0) - peak).exp().im,
                    q0,
                    q1,
                    quadrature,
                )?
                .value;
            }
            Ok(peak.exp() * re.hypot(im))
        }
    }
}

/// <S_x>(t) normalized to 1 at t = 0: the real part of the off-diagonal
/// trace. The xi = 0 trace of the off-diagonal block is real and positive
/// (its imaginary q-linear term is odd around the block center), so this
/// coincides with the coherence.
pub fn sx_expectation(coeffs: &CoeffSet, sigma: f64) -> Result<f64> {
    Ok(log_coherence(coeffs, sigma)?.exp())
}

/// First time h(t) drops to 1/e on [t_min, t_max]; `None` when it never does.
pub fn decoherence_time<F: Fn(f64) -> Result<f64>>(
    h: F,
    t_min: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            reason: "need 0 < t_min < t_max",
            value: t_max,
        });
    }
    let target = (-1.0f64).exp();
    let n = 240;
    let log_min = t_min.ln();
    let log_step = (t_max.ln() - log_min) / n as f64;
    let mut prev_t = t_min;
    let mut prev_h = h(t_min)?;
    if prev_h <= target {
        return Ok(Some(t_min));
    }
    for k in 1..=n {
        let t = (log_min + log_step * k as f64).exp();
        let ht = h(t)?;
        if ht <= target {
            // bisect the bracket [prev_t, t]
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid)? <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_t = t;
        prev_h = ht;
    }
    let _ = prev_h;
    Ok(None)
}

/// One sampled instant of the evolution.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: f64,
    pub z_plus: f64,
    pub z_minus: f64,
    pub sigma_tilde: f64,
    pub h: f64,
    pub coherence: f64,
    pub sx: f64,
}

/// The full sampled evolution plus the extracted decoherence time.
#[derive(Debug, Clone)]
pub struct CoherenceTrace {
    pub rows: Vec<TraceRow>,
    pub decoherence_time: Option<f64>,
}

/// Sample the observables on `samples`+1 uniform times covering [0, T_exp].
pub fn coherence_trace(
    fp: &ForceProfile,
    mass: f64,
    gamma: f64,
    sigma: f64,
    noise: &NoiseModel,
    samples: usize,
) -> Result<CoherenceTrace> {
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "need at least one sample interval",
            value: 0.0,
        });
    }
    let t_exp = fp.total_time();
    let mut rows = Vec::with_capacity(samples + 1);
    rows.push(TraceRow {
        t: 0.0,
        z_plus: 0.0,
        z_minus: 0.0,
        sigma_tilde: sigma,
        h: 1.0,
        coherence: 1.0,
        sx: 1.0,
    });
    for k in 1..=samples {
        let t = t_exp * k as f64 / samples as f64;
        let coeffs = coeff_set(fp, t, mass, gamma, noise)?;
        let z = packet_center(fp, t, mass, gamma)?;
        let h = h_factor(&coeffs, sigma)?;
        let c = log_coherence(&coeffs, sigma)?.exp();
        rows.push(TraceRow {
            t,
            z_plus: z,
            z_minus: -z,
            sigma_tilde: packet_width(&coeffs, sigma),
            h,
            coherence: c,
            sx: c,
        });
    }
    let tau = decoherence_time(
        |t| {
            let coeffs = coeff_set(fp, t, mass, gamma, noise)?;
            h_factor(&coeffs, sigma)
        },
        t_exp * 1e-6,
        t_exp,
    )?;
    Ok(CoherenceTrace {
        rows,
        decoherence_time: tau,
    })
}

/// Consistency check between the drift coefficients and the classical
/// trajectory: Z(t)/M(t) must equal packet_center.
pub fn drift_center_consistency(fp: &ForceProfile, t: f64, mass: f64, gamma: f64) -> Result<f64> {
    let (_, z) = coeff_x_z(fp, t, gamma)?;
    let (_, _, _, m) = crate::propagator::coeff_l_n_m(t, mass, gamma)?;
    let zc = packet_center(fp, t, mass, gamma)?;
    Ok((z / m - zc).abs())
}
