//! Circuit and apparatus parameters, and their reduction to an effective
//! Ohmic bath acting on the beam.

use crate::constants::{MU_0, PHI_0};
use crate::error::{Error, Result};
use crate::kernels::SpectralFunction;

/// Raw SQUID circuit parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidParams {
    /// Junction capacitance [F].
    pub capacitance: f64,
    /// Loop inductance [H].
    pub inductance: f64,
    /// Critical current [A].
    pub critical_current: f64,
    /// Junction shunt resistance [ohm].
    pub resistance: f64,
    /// Index of the flux minimum the loop sits in (>= 1).
    pub flux_index: u32,
    /// Width of the small pickup ring [m].
    pub ring_width: f64,
    /// Length of the small pickup ring [m].
    pub ring_length: f64,
}

impl SquidParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64); 6] = [
            ("capacitance", self.capacitance),
            ("inductance", self.inductance),
            ("critical_current", self.critical_current),
            ("resistance", self.resistance),
            ("ring_width", self.ring_width),
            ("ring_length", self.ring_length),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and strictly positive",
                    value: v,
                });
            }
        }
        if self.flux_index < 1 {
            return Err(Error::InvalidParameter {
                name: "flux_index",
                reason: "must be >= 1",
                value: self.flux_index as f64,
            });
        }
        Ok(())
    }
}

/// Beam and interferometer parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusParams {
    /// Flux-to-gradient geometry factor a [1/m^3].
    pub geometry_factor: f64,
    /// Magnetic moment of the beam particle [J/T].
    pub magnetic_moment: f64,
    /// Particle mass [kg].
    pub particle_mass: f64,
    /// Initial Gaussian packet width sigma [m].
    pub initial_width: f64,
    /// Longitudinal beam velocity [m/s].
    pub beam_velocity: f64,
    /// Length of the interferometer region [m].
    pub apparatus_length: f64,
    /// Bath temperature [K].
    pub temperature: f64,
}

impl ApparatusParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64); 7] = [
            ("geometry_factor", self.geometry_factor),
            ("magnetic_moment", self.magnetic_moment),
            ("particle_mass", self.particle_mass),
            ("initial_width", self.initial_width),
            ("beam_velocity", self.beam_velocity),
            ("apparatus_length", self.apparatus_length),
            ("temperature", self.temperature),
        ];
        for (name, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and strictly positive",
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Transit time through the apparatus [s].
    pub fn experiment_duration(&self) -> f64 {
        self.apparatus_length / self.beam_velocity
    }
}

/// Effective bath and coupling constants derived from the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedBath {
    /// Effective inductance L0 [H].
    pub effective_inductance: f64,
    /// Flux-gradient coupling epsilon = mu * a [J/(Wb m)].
    pub coupling: f64,
    /// Friction coefficient eta = eps^2 L0^2 / R [kg/s].
    pub friction: f64,
    /// First cutoff Omega [rad/s].
    pub cutoff: f64,
    /// Second cutoff Omega' [rad/s].
    pub cutoff2: f64,
    /// Damping rate gamma = eta / 2m [1/s].
    pub damping_rate: f64,
    /// Spin-dependent force scale f0 = eps * n * Phi0 [N].
    pub force_magnitude: f64,
    /// Viscous velocity-relaxation time m/eta = 1/(2 gamma) [s]; infinite
    /// when the coupling is switched off.
    pub relaxation_time: f64,
}

/// Knobs that adjust the derivation without touching the raw inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathOptions {
    /// Use this L0 instead of the value computed from the circuit.
    pub l0_override: Option<f64>,
    /// Multiplies eta before gamma is derived (0 switches the bath off).
    pub eta_scale: f64,
    /// Multiplies gamma after derivation, leaving eta and the cutoffs alone.
    pub gamma_scale: f64,
}

impl Default for BathOptions {
    fn default() -> Self {
        BathOptions {
            l0_override: None,
            eta_scale: 1.0,
            gamma_scale: 1.0,
        }
    }
}

/// L0 = [1/L + 2 pi i0 / (n Phi0)]^-1.
pub fn effective_inductance(sq: &SquidParams) -> Result<f64> {
    sq.validate()?;
    let inv = 1.0 / sq.inductance
        + 2.0 * std::f64::consts::PI * sq.critical_current / (sq.flux_index as f64 * PHI_0);
    Ok(1.0 / inv)
}

/// True iff the washboard potential holds many metastable minima:
/// 2 pi i0 L / Phi0 >= threshold.
pub fn many_minima_check(sq: &SquidParams, threshold: f64) -> bool {
    2.0 * std::f64::consts::PI * sq.critical_current * sq.inductance / PHI_0 >= threshold
}

pub const MANY_MINIMA_DEFAULT_THRESHOLD: f64 = 100.0;

/// epsilon = mu * a.
pub fn coupling_constant(app: &ApparatusParams) -> f64 {
    app.magnetic_moment * app.geometry_factor
}

/// Flux-conservation estimate of the geometry factor a(z) = (1/A^2) dA/dz.
///
/// The field of the pickup ring is approximated by two infinite wires a
/// distance `ring_width` apart, B(d) = mu0 i / (pi d). Flux conservation
/// B(ring_width) * A_ring = B(z) * A(z) gives A(z) = A_ring * z / ring_width,
/// so a(z) = ring_width / (A_ring * z^2).
pub fn geometry_factor_estimate(ring_width: f64, ring_length: f64, z: f64) -> Result<f64> {
    for (name, v) in [
        ("ring_width", ring_width),
        ("ring_length", ring_length),
        ("z", z),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: "must be finite and strictly positive",
                value: v,
            });
        }
    }
    let a_ring = ring_width * ring_length;
    Ok(ring_width / (a_ring * z * z))
}

/// Effective field area A(z) from the same two-wire flux argument; exposed so
/// the geometry factor can be cross-checked by finite differences.
pub fn flux_area(ring_width: f64, ring_length: f64, z: f64) -> f64 {
    let b_center = MU_0 / (std::f64::consts::PI * ring_width);
    let b_z = MU_0 / (std::f64::consts::PI * z);
    b_center * (ring_width * ring_length) / b_z
}

/// Reduce the circuit to the effective bath seen by the beam.
pub fn derive_bath(sq: &SquidParams, app: &ApparatusParams, opts: &BathOptions) -> Result<DerivedBath> {
    sq.validate()?;
    app.validate()?;
    if !(opts.eta_scale >= 0.0 && opts.eta_scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "eta_scale",
            reason: "must be finite and >= 0",
            value: opts.eta_scale,
        });
    }
    if !(opts.gamma_scale >= 0.0 && opts.gamma_scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma_scale",
            reason: "must be finite and >= 0",
            value: opts.gamma_scale,
        });
    }
    let l0 = match opts.l0_override {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::InvalidParameter {
                name: "l0_override",
                reason: "must be finite and strictly positive",
                value: v,
            })
        }
        None => effective_inductance(sq)?,
    };
    let lhs = l0 * l0 / (sq.resistance * sq.resistance);
    let rhs = 2.0 * sq.capacitance * l0;
    if lhs <= rhs {
        return Err(Error::UnusableCutoff { lhs, rhs });
    }
    let eps = coupling_constant(app);
    let eta = opts.eta_scale * eps * eps * l0 * l0 / sq.resistance;
    let gamma = opts.gamma_scale * eta / (2.0 * app.particle_mass);
    Ok(DerivedBath {
        effective_inductance: l0,
        coupling: eps,
        friction: eta,
        cutoff: 1.0 / (lhs - rhs).sqrt(),
        cutoff2: 1.0 / (sq.capacitance * l0).sqrt(),
        damping_rate: gamma,
        force_magnitude: eps * sq.flux_index as f64 * PHI_0,
        relaxation_time: if gamma > 0.0 { 1.0 / (2.0 * gamma) } else { f64::INFINITY },
    })
}

impl DerivedBath {
    /// The two-pole spectral density this bath generates.
    pub fn spectral_function(&self) -> Result<SpectralFunction> {
        SpectralFunction::squid(self.friction, self.cutoff, self.cutoff2)
    }
}
