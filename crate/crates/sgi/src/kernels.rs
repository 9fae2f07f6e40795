//! Bath spectral densities and the kernels built from them.
//!
//! Two spectral shapes are supported: a textbook Ohmic density with a sharp
//! frequency cutoff, and the effective density produced by the lossy SQUID
//! circuit, which rolls off through two poles instead of a hard edge.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, QuadratureSpec};

/// Shape of the bath spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    /// J(w) = eta * w for w < omega_c, zero above.
    SharpCutoffOhmic,
    /// J(w) = eta * w / (1 + (w/omega_c)^2 + (w/omega_c2)^4).
    EffectiveSquid,
}

/// A bath spectral density J(w) [kg m^2 / s^2 = J], parameterised by the
/// friction strength `eta` [kg/s] and one or two cutoff frequencies [rad/s].
#[derive(Debug, Clone, Copy)]
pub struct SpectralFunction {
    pub kind: SpectralKind,
    pub eta: f64,
    pub omega_c: f64,
    pub omega_c2: f64,
}

impl SpectralFunction {
    pub fn sharp(eta: f64, omega_c: f64) -> Result<Self> {
        let sf = SpectralFunction {
            kind: SpectralKind::SharpCutoffOhmic,
            eta,
            omega_c,
            omega_c2: f64::INFINITY,
        };
        sf.validate()?;
        Ok(sf)
    }

    pub fn squid(eta: f64, omega_c: f64, omega_c2: f64) -> Result<Self> {
        let sf = SpectralFunction {
            kind: SpectralKind::EffectiveSquid,
            eta,
            omega_c,
            omega_c2,
        };
        sf.validate()?;
        Ok(sf)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "friction strength must be finite and >= 0",
                value: self.eta,
            });
        }
        if !(self.omega_c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega_c",
                reason: "cutoff frequency must be positive",
                value: self.omega_c,
            });
        }
        if self.kind == SpectralKind::EffectiveSquid && !(self.omega_c2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega_c2",
                reason: "second cutoff frequency must be positive",
                value: self.omega_c2,
            });
        }
        Ok(())
    }

    /// J(w); zero for w <= 0.
    pub fn j_eval(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match self.kind {
            SpectralKind::SharpCutoffOhmic => {
                if omega < self.omega_c {
                    self.eta * omega
                } else {
                    0.0
                }
            }
            SpectralKind::EffectiveSquid => {
                let r1 = omega / self.omega_c;
                let r2 = omega / self.omega_c2;
                self.eta * omega / (1.0 + r1 * r1 + r2 * r2 * r2 * r2)
            }
        }
    }

    /// Upper frequency limit used when integrating over the spectrum. The
    /// sharp density is exactly zero past its cutoff; the two-pole density
    /// falls off as 1/w^3 and is negligible 20 cutoffs out.
    pub fn omega_max(&self) -> f64 {
        match self.kind {
            SpectralKind::SharpCutoffOhmic => self.omega_c,
            SpectralKind::EffectiveSquid => 20.0 * self.omega_c.max(self.omega_c2),
        }
    }

    /// Real (symmetric) part of the bath correlation kernel,
    /// alpha_R(s) = (1/pi) integral_0^inf J(w) coth(hbar w / 2 kT) cos(ws) dw
    /// [J^2 / (J s) units aside: kg^2 m^2 / s^3].
    ///
    /// `temperature` = 0 selects the vacuum kernel (coth -> 1).
    pub fn noise_kernel(&self, s: f64, temperature: f64, spec: &QuadratureSpec) -> Result<f64> {
        let integrand = |omega: f64| {
            let j = self.j_eval(omega);
            let c = coth_thermal(omega, temperature);
            // w -> 0: J*coth -> 2 eta kT / hbar, finite
            if omega == 0.0 {
                if temperature > 0.0 {
                    2.0 * self.eta * K_B * temperature / HBAR * (omega * s).cos()
                } else {
                    0.0
                }
            } else {
                j * c * (omega * s).cos()
            }
        };
        let r = integrate_1d(integrand, 0.0, self.omega_max(), spec)?;
        Ok(r.value / std::f64::consts::PI)
    }

    /// Weight of the delta-function the noise kernel collapses onto in the
    /// high-temperature limit: w = 2 eta k_B T / hbar.
    pub fn noise_kernel_high_t_weight(&self, temperature: f64) -> f64 {
        2.0 * self.eta * K_B * temperature / HBAR
    }

    /// Memory-friction kernel gamma(t) = (2 / m pi) integral_0^inf (J(w)/w) cos(wt) dw
    /// [1/s^2]; for the sharp density this is (2 eta / m pi) sin(omega_c t)/t.
    pub fn damping_kernel(&self, t: f64, mass: f64, spec: &QuadratureSpec) -> Result<f64> {
        let integrand = |omega: f64| {
            if omega == 0.0 {
                // J/w -> eta at the origin for both shapes
                self.eta
            } else {
                self.j_eval(omega) / omega * (omega * t).cos()
            }
        };
        let r = integrate_1d(integrand, 0.0, self.omega_max(), spec)?;
        Ok(2.0 * r.value / (mass * std::f64::consts::PI))
    }
}

/// coth(hbar w / 2 k T), with the T = 0 limit coth -> 1.
fn coth_thermal(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 1.0;
    }
    let x = HBAR * omega / (2.0 * K_B * temperature);
    if x == 0.0 {
        f64::INFINITY
    } else if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn sharp_damping_kernel_matches_closed_form() {
        let eta = 3.7e-3;
        let omega_c = 2.0e4;
        let mass = 1.3;
        let sf = SpectralFunction::sharp(eta, omega_c).unwrap();
        let t = 10.0 / omega_c;
        let got = sf.damping_kernel(t, mass, &quad()).unwrap();
        let want = 2.0 * eta / (mass * PI) * (omega_c * t).sin() / t;
        assert!(
            ((got - want) / want).abs() < 1e-8,
            "got {got:e} want {want:e}"
        );
    }

    #[test]
    fn noise_kernel_is_even() {
        let sf = SpectralFunction::squid(1.0e-5, 1.0e3, 5.0e3).unwrap();
        let temp = 1.0e-4;
        for s in [1.0e-4, 7.3e-4, 3.0e-3] {
            let p = sf.noise_kernel(s, temp, &quad()).unwrap();
            let m = sf.noise_kernel(-s, temp, &quad()).unwrap();
            assert!((p - m).abs() <= 1e-12 * p.abs().max(m.abs()));
        }
    }

    #[test]
    fn high_temperature_kernel_peak() {
        // kT >> hbar omega_c: coth ~ 2kT/(hbar w) across the whole band, so
        // alpha_R(0) -> (2 eta kT / pi hbar) * omega_c for the sharp density.
        let eta = 2.0e-6;
        let omega_c = 1.0e5;
        let temp = 1.0; // hbar*omega_c/kB ~ 7.6e-7 K << 1 K
        let sf = SpectralFunction::sharp(eta, omega_c).unwrap();
        let got = sf.noise_kernel(0.0, temp, &quad()).unwrap();
        let want = 2.0 * eta * K_B * temp / (PI * HBAR) * omega_c;
        assert!(((got - want) / want).abs() < 1e-4);
    }

    #[test]
    fn windowed_kernel_integral_recovers_delta_weight() {
        // Integrating alpha_R over a window many correlation times wide
        // approaches the delta weight w = 2 eta kT / hbar.
        let eta = 2.0e-6;
        let omega_c = 1.0e5;
        let temp = 1.0;
        let sf = SpectralFunction::sharp(eta, omega_c).unwrap();
        let half_window = 200.0 / omega_c;
        let inner = QuadratureSpec {
            relative_tolerance: 1.0e-9,
            ..Default::default()
        };
        let outer = QuadratureSpec {
            relative_tolerance: 1.0e-7,
            panel_count: 1 << 14,
            ..Default::default()
        };
        let r = integrate_1d(
            |s| sf.noise_kernel(s, temp, &inner).unwrap(),
            -half_window,
            half_window,
            &outer,
        )
        .unwrap();
        let w = sf.noise_kernel_high_t_weight(temp);
        assert!(((r.value - w) / w).abs() < 1e-2, "got {:e} want {w:e}", r.value);
    }

    #[test]
    fn vacuum_kernel_is_finite_and_smaller() {
        let sf = SpectralFunction::sharp(1.0e-6, 1.0e5).unwrap();
        let cold = sf.noise_kernel(0.0, 0.0, &quad()).unwrap();
        let hot = sf.noise_kernel(0.0, 1.0, &quad()).unwrap();
        assert!(cold.is_finite() && cold > 0.0);
        assert!(hot > cold);
    }

    #[test]
    fn squid_density_rolls_off() {
        let sf = SpectralFunction::squid(1.0, 10.0, 100.0).unwrap();
        // Ohmic at small w
        assert!((sf.j_eval(1.0e-3) / 1.0e-3 - 1.0).abs() < 1e-4);
        // quartic pole dominates far out, so J ~ 1/w^3 and doubling w gives 1/8
        let ratio = sf.j_eval(40000.0) / sf.j_eval(20000.0);
        assert!((ratio - 0.125).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn rejects_nonpositive_cutoff() {
        assert!(SpectralFunction::sharp(1.0, 0.0).is_err());
        assert!(SpectralFunction::squid(1.0, 1.0, -2.0).is_err());
        assert!(SpectralFunction::sharp(-1.0, 1.0).is_err());
    }
}
