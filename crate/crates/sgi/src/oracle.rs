//! Independent brute-force verifiers.
//!
//! Nothing here reuses the closed-form machinery it checks: trajectories are
//! integrated step by step, kernel coefficients come from a plain trapezoid
//! double sum with a Simpson frequency integral at every node, and the
//! off-diagonal trace is a fixed-grid Simpson sum. Slow and simple on
//! purpose.

use crate::constants::{HBAR, K_B};
use crate::density::offdiagonal_block;
use crate::kernels::SpectralFunction;
use crate::profile::ForceProfile;
use crate::propagator::CoeffSet;
use crate::error::{Error, Result};
use num_complex::Complex64;

// ---------------------------------------------------------------------------
// Classical trajectory
// ---------------------------------------------------------------------------

/// One RK4 sample of the damped classical motion.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub z: f64,
    pub v: f64,
}

/// Fourth-order Runge-Kutta integration of m z'' = f(t) - 2 m gamma z',
/// stepping so that no step straddles a force discontinuity.
pub fn classical_trajectory_rk4(
    fp: &ForceProfile,
    mass: f64,
    gamma: f64,
    dt: f64,
) -> Result<Vec<TrajectoryPoint>> {
    let t_exp = fp.total_time();
    if !(dt > 0.0 && dt <= t_exp / 1.0e4) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "step must be positive and at most T_exp/1e4",
            value: dt,
        });
    }
    let mut out = Vec::new();
    let mut z = 0.0;
    let mut v = 0.0;
    out.push(TrajectoryPoint { t: 0.0, z, v });
    for seg in fp.segments() {
        let len = seg.t_end - seg.t_start;
        let steps = (len / dt).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        let acc = |vv: f64| seg.f_value / mass - 2.0 * gamma * vv;
        for k in 0..steps {
            // force is constant inside the segment, so the stage times drop out
            let k1z = v;
            let k1v = acc(v);
            let k2z = v + 0.5 * h * k1v;
            let k2v = acc(v + 0.5 * h * k1v);
            let k3z = v + 0.5 * h * k2v;
            let k3v = acc(v + 0.5 * h * k2v);
            let k4z = v + h * k3v;
            let k4v = acc(v + h * k3v);
            z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            out.push(TrajectoryPoint {
                t: seg.t_start + h * (k + 1) as f64,
                z,
                v,
            });
        }
    }
    Ok(out)
}

/// RK4 position at one time; linear interpolation between the surrounding
/// steps (step error dominates anyway).
pub fn rk4_center_at(fp: &ForceProfile, mass: f64, gamma: f64, t: f64, dt: f64) -> Result<f64> {
    let traj = classical_trajectory_rk4(fp, mass, gamma, dt)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    for pair in traj.windows(2) {
        if t <= pair[1].t {
            let u = (t - pair[0].t) / (pair[1].t - pair[0].t);
            return Ok(pair[0].z + u * (pair[1].z - pair[0].z));
        }
    }
    Ok(traj.last().unwrap().z)
}

// ---------------------------------------------------------------------------
// Noiseless Gaussian evolution
// ---------------------------------------------------------------------------

/// Exact branch overlap <psi_-|psi_+> for undamped evolution under the
/// piecewise-linear potential. Each branch stays a Gaussian with the free
/// complex width; the action phases of the two mirror branches are equal and
/// cancel, so only centers and momenta enter.
pub fn noiseless_evolution(fp: &ForceProfile, mass: f64, sigma: f64, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let segs = fp.clipped(t)?;
    // exact piecewise-constant kinematics of the spin-up branch
    let mut z = 0.0;
    let mut v = 0.0;
    for s in &segs {
        let d = s.t_end - s.t_start;
        let acc = s.f_value / mass;
        z += v * d + 0.5 * acc * d * d;
        v += acc * d;
    }
    let p = mass * v;
    // evolved complex width parameter: psi ~ exp(-(z-zc)^2/(4(sigma^2 + i beta)) + ...)
    let beta = HBAR * t / (2.0 * mass);
    let alpha = 1.0 / Complex64::new(4.0 * sigma * sigma, 4.0 * beta);
    let (zp, zm) = (z, -z);
    let (pp, pm) = (p, -p);
    let big_a = alpha + alpha.conj();
    let big_b =
        2.0 * alpha * zp + 2.0 * alpha.conj() * zm + Complex64::i() * (pp - pm) / HBAR;
    let big_c = -alpha * zp * zp - alpha.conj() * zm * zm
        - Complex64::i() * (pp * zp - pm * zm) / HBAR;
    // normalized overlap; the sqrt(pi/A) normalization cancels against the
    // identical-state case
    Ok((big_b * big_b / (4.0 * big_a) + big_c).exp())
}

/// Log-magnitude of the noiseless overlap, safe when the overlap underflows.
pub fn noiseless_log_overlap(fp: &ForceProfile, mass: f64, sigma: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let segs = fp.clipped(t)?;
    let mut z = 0.0;
    let mut v = 0.0;
    for s in &segs {
        let d = s.t_end - s.t_start;
        let acc = s.f_value / mass;
        z += v * d + 0.5 * acc * d * d;
        v += acc * d;
    }
    let p = mass * v;
    let beta = HBAR * t / (2.0 * mass);
    let alpha = 1.0 / Complex64::new(4.0 * sigma * sigma, 4.0 * beta);
    let big_a = alpha + alpha.conj();
    let big_b = 2.0 * alpha * z - 2.0 * alpha.conj() * z + Complex64::i() * 2.0 * p / HBAR;
    let big_c = -(alpha + alpha.conj()) * z * z - Complex64::i() * 2.0 * p * z / HBAR;
    Ok((big_b * big_b / (4.0 * big_a) + big_c).re)
}

// ---------------------------------------------------------------------------
// Brute-force kernel coefficients
// ---------------------------------------------------------------------------

/// Frequency-integral panel count for the brute noise kernel.
const BRUTE_OMEGA_PANELS: usize = 256;
/// Time grid per axis for the brute double integral.
const BRUTE_TIME_GRID: usize = 2000;

/// Standalone Simpson evaluation of the noise kernel: tabulates the spectrum
/// once, then sums P(omega) cos(omega s) directly.
struct BruteKernel {
    omegas: Vec<f64>,
    weights: Vec<f64>,
}

impl BruteKernel {
    fn new(sf: &SpectralFunction, temperature: f64) -> Self {
        let n = 2 * BRUTE_OMEGA_PANELS; // even interval count for Simpson
        let omega_max = sf.omega_max();
        let h = omega_max / n as f64;
        let mut omegas = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let omega = h * k as f64;
            let p = if omega == 0.0 {
                if temperature > 0.0 {
                    2.0 * sf.eta * K_B * temperature / HBAR
                } else {
                    0.0
                }
            } else {
                let coth = if temperature > 0.0 {
                    let x = HBAR * omega / (2.0 * K_B * temperature);
                    if x > 20.0 { 1.0 } else { 1.0 / x.tanh() }
                } else {
                    1.0
                };
                sf.j_eval(omega) * coth
            };
            let simpson = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            omegas.push(omega);
            weights.push(p * simpson * h / 3.0 / std::f64::consts::PI);
        }
        BruteKernel { omegas, weights }
    }

    fn eval(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        for (omega, w) in self.omegas.iter().zip(&self.weights) {
            sum += w * (omega * s).cos();
        }
        sum
    }
}

/// (A, B, C) by plain trapezoid double summation on a uniform
/// 2000 x 2000 grid, evaluating the kernel directly at every node.
pub fn brute_force_abc(
    t: f64,
    gamma: f64,
    temperature: f64,
    sf: &SpectralFunction,
) -> Result<(f64, f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "time must be strictly positive",
            value: t,
        });
    }
    if sf.eta == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let kernel = BruteKernel::new(sf, temperature);
    let n = BRUTE_TIME_GRID;
    let h = t / (n - 1) as f64;
    let x = gamma * t;
    let sinh_t = x.sinh();
    // direct textbook weights (naive on purpose; fine for moderate gamma t)
    let g_w: Vec<f64> = (0..n)
        .map(|i| {
            let u = h * i as f64;
            if x < 1e-12 {
                u / t
            } else {
                (gamma * (u - t)).exp() * (gamma * u).sinh() / sinh_t
            }
        })
        .collect();
    let c_w: Vec<f64> = (0..n)
        .map(|i| {
            let u = h * i as f64;
            if x < 1e-12 {
                (t - u) / t
            } else {
                (gamma * u).exp() * (gamma * (t - u)).sinh() / sinh_t
            }
        })
        .collect();
    let trap = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    for i in 0..n {
        let ti = h * i as f64;
        for j in 0..n {
            let alpha = kernel.eval(ti - h * j as f64);
            let w = trap(i) * trap(j) * alpha;
            a += w * g_w[i] * g_w[j];
            b += w * g_w[i] * c_w[j];
            c += w * c_w[i] * c_w[j];
        }
    }
    let h2 = h * h;
    Ok((a * h2, b * h2, c * h2))
}

// ---------------------------------------------------------------------------
// Off-diagonal trace
// ---------------------------------------------------------------------------

/// Simpson integral of the off-diagonal block at xi = 0 over
/// [center - 10 sigma~, center + 10 sigma~], plus a window-truncation
/// estimate (magnitude of the edge integrand relative to the peak).
pub fn trace_offdiag_numeric(coeffs: &CoeffSet, sigma: f64) -> Result<(Complex64, f64)> {
    let block = offdiagonal_block(coeffs, sigma, 1.0);
    let ap = -block.c_qq.re;
    if !(ap > 0.0) {
        return Err(Error::Regime(format!(
            "off-diagonal width parameter a' = {:e} is not positive at t = {:e}",
            -ap, coeffs.t
        )));
    }
    // the q-width of |rho_od| is 1/sqrt(2 a'); +-10 standard deviations
    let width = 1.0 / (2.0 * ap).sqrt();
    let center = block.c_q.re / (2.0 * ap);
    let half = 10.0 * width;
    // resolve the phase oscillation: at least 16 points per cycle
    let cycles = block.c_q.im.abs() * half / std::f64::consts::PI + 1.0;
    let mut n = ((16.0 * cycles) as usize).max(4096);
    if n % 2 == 1 {
        n += 1;
    }
    let hq = 2.0 * half / n as f64;
    let peak = block.log_exponent(center, 0.0).re;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let q = center - half + hq * k as f64;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * (block.log_exponent(q, 0.0) - Complex64::new(peak, 0.0)).exp();
    }
    let value = sum * hq / 3.0 * Complex64::new(peak, 0.0).exp();
    let truncation = (-(half * half) * ap).exp();
    Ok((value, truncation))
}

// ---------------------------------------------------------------------------
// Check harness
// ---------------------------------------------------------------------------

/// Result of one oracle-vs-implementation comparison.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub name: &'static str,
    pub achieved: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.achieved <= self.tolerance
    }
}

#[cfg(test)]
mod tests {
    use crate::density::log_coherence;
    use super::*;
    use crate::density::packet_center;
    use crate::propagator::{coeff_abc_high_t, coeff_abc_quadrature, coeff_set, NoiseModel};
    use crate::quad::QuadratureSpec;

    const MASS: f64 = 1.8e-25;
    const SIGMA: f64 = 1.0e-6;
    const T_EXP: f64 = 1.0e-3;

    #[test]
    fn rk4_zero_force() {
        let fp = ForceProfile::constant(0.0, 1.0).unwrap();
        let traj = classical_trajectory_rk4(&fp, 1.0, 0.5, 1e-5).unwrap();
        for p in traj {
            assert_eq!(p.z, 0.0);
            assert_eq!(p.v, 0.0);
        }
    }

    #[test]
    fn rk4_newton_limit() {
        let f = 3.0e-24;
        let fp = ForceProfile::constant(f, T_EXP).unwrap();
        let z = rk4_center_at(&fp, MASS, 1e-9, T_EXP, T_EXP / 2.0e4).unwrap();
        let want = f * T_EXP * T_EXP / (2.0 * MASS);
        assert!((z / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_matches_damped_closed_form() {
        let f = 3.0e-24;
        let gamma = 0.5 / T_EXP;
        let fp = ForceProfile::balanced4(f, T_EXP).unwrap();
        for frac in [0.3, 0.6, 0.9] {
            let t = frac * T_EXP;
            let brute = rk4_center_at(&fp, MASS, gamma, t, T_EXP / 4.0e4).unwrap();
            let closed = packet_center(&fp, t, MASS, gamma).unwrap();
            assert!(
                (brute / closed - 1.0).abs() < 1e-6,
                "rk4 {brute} vs closed {closed} at {frac}"
            );
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let f = 3.0e-24;
        // strong damping, probed early in the transient: that is the only
        // regime where the truncation error sits above the double-precision
        // floor. The probe time is an exact step multiple for both step
        // sizes so no interpolation error enters.
        let gamma = 5000.0 / T_EXP;
        let fp = ForceProfile::constant(f, T_EXP).unwrap();
        let t = 1.0e-3 * T_EXP;
        let exact = packet_center(&fp, t, MASS, gamma).unwrap();
        let e1 = (rk4_center_at(&fp, MASS, gamma, t, T_EXP / 1.0e4).unwrap() - exact).abs();
        let e2 = (rk4_center_at(&fp, MASS, gamma, t, T_EXP / 2.0e4).unwrap() - exact).abs();
        let order = (e1 / e2).log2();
        // a handful of stiff steps dominate, so the observed order floats
        // between the classical 4 and the single-step 5
        assert!(order > 3.5 && order < 5.5, "observed order {order}");
    }

    #[test]
    fn noiseless_overlap_endpoints() {
        let fp = ForceProfile::balanced4(3.0e-23, T_EXP).unwrap();
        let start = noiseless_evolution(&fp, MASS, SIGMA, 0.0).unwrap();
        assert_eq!(start, Complex64::new(1.0, 0.0));
        let end = noiseless_evolution(&fp, MASS, SIGMA, T_EXP).unwrap();
        assert!((end.norm() - 1.0).abs() < 1e-9, "revival {}", end.norm());
        // mid-run local revival: momenta re-align at T/2
        let mid = noiseless_evolution(&fp, MASS, SIGMA, 0.5 * T_EXP).unwrap().norm();
        let before = noiseless_evolution(&fp, MASS, SIGMA, 0.4 * T_EXP).unwrap().norm();
        let after = noiseless_evolution(&fp, MASS, SIGMA, 0.6 * T_EXP).unwrap().norm();
        assert!(mid > before && mid > after);
    }

    #[test]
    fn noiseless_overlap_matches_density_route() {
        let fp = ForceProfile::balanced4(3.0e-23, T_EXP).unwrap();
        let gamma = 1e-8 / T_EXP;
        for frac in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let t = frac * T_EXP;
            let coeffs = coeff_set(&fp, t, MASS, gamma, &NoiseModel::Off).unwrap();
            let closed = log_coherence(&coeffs, SIGMA).unwrap();
            let oracle = noiseless_log_overlap(&fp, MASS, SIGMA, t).unwrap();
            assert!(
                (closed - oracle).abs() < 1e-4 * closed.abs().max(1.0),
                "log C {closed} vs oracle {oracle} at {frac}"
            );
        }
    }

    #[test]
    fn log_overlap_agrees_with_complex_overlap() {
        let fp = ForceProfile::balanced4(1.0e-24, T_EXP).unwrap();
        for frac in [0.2, 0.5, 0.8] {
            let t = frac * T_EXP;
            let direct = noiseless_evolution(&fp, MASS, SIGMA, t).unwrap().norm().ln();
            let logv = noiseless_log_overlap(&fp, MASS, SIGMA, t).unwrap();
            assert!((direct - logv).abs() < 1e-9 * logv.abs().max(1.0));
        }
    }

    #[test]
    fn brute_abc_zero_coupling() {
        let sf = SpectralFunction::sharp(0.0, 10.0).unwrap();
        assert_eq!(brute_force_abc(1.0, 0.5, 1.0, &sf).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn brute_abc_three_way_agreement() {
        // dimensionless benchmark regime: gamma = 1, t = 1, Omega = 400,
        // kT/hbar = 2000 — resolvable by all three evaluations, and
        // Omega t large enough that the delta-kernel closed forms are
        // accurate to well under 1%
        let eta = 1.0e-3;
        let sf = SpectralFunction::sharp(eta, 400.0).unwrap();
        let temp = 2000.0 * HBAR / K_B;
        let (ab, bb, cb) = brute_force_abc(1.0, 1.0, temp, &sf).unwrap();
        let spec = QuadratureSpec {
            relative_tolerance: 1e-5,
            panel_count: 1 << 15,
            ..Default::default()
        };
        let (aq, bq, cq) = coeff_abc_quadrature(1.0, 1.0, temp, &sf, &spec).unwrap();
        assert!((ab / aq - 1.0).abs() < 5e-3, "A {ab} vs {aq}");
        assert!((bb / bq - 1.0).abs() < 5e-3, "B {bb} vs {bq}");
        assert!((cb / cq - 1.0).abs() < 5e-3, "C {cb} vs {cq}");
        let w = sf.noise_kernel_high_t_weight(temp);
        let (ah, bh, ch) = coeff_abc_high_t(1.0, 1.0, w).unwrap();
        assert!((ab / ah - 1.0).abs() < 1e-2, "A {ab} vs highT {ah}");
        assert!((bb / bh - 1.0).abs() < 1e-2, "B {bb} vs highT {bh}");
        assert!((cb / ch - 1.0).abs() < 1e-2, "C {cb} vs highT {ch}");
    }

    #[test]
    fn offdiag_trace_matches_closed_form() {
        let fp = ForceProfile::balanced4(3.0e-24, T_EXP).unwrap();
        let gamma = 100.0;
        let w = 400.0 * MASS * gamma * gamma; // k_B T = 100 hbar gamma
        for frac in [0.15, 0.5, 1.0] {
            let t = frac * T_EXP;
            let coeffs =
                coeff_set(&fp, t, MASS, gamma, &NoiseModel::HighTemperature { weight: w })
                    .unwrap();
            let closed = log_coherence(&coeffs, SIGMA).unwrap().exp();
            let (tr, trunc) = trace_offdiag_numeric(&coeffs, SIGMA).unwrap();
            assert!(trunc < 1e-12);
            assert!(
                (tr.norm() / closed - 1.0).abs() < 1e-4,
                "trace {} vs closed {closed} at {frac}",
                tr.norm()
            );
        }
    }
}
