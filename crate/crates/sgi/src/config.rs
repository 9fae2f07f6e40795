//! Scenario configuration: a small line-anchored INI parser, the scenario
//! and sweep types built from it, and the shipped presets.

use crate::error::{Error, Result};
use crate::kernels::SpectralFunction;
use crate::model::{derive_bath, ApparatusParams, BathOptions, DerivedBath, SquidParams};
use crate::profile::{ForceProfile, Segment};
use crate::propagator::NoiseModel;
use crate::quad::QuadratureSpec;
use std::collections::BTreeMap;

/// How the branch force profile is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    /// Four equal quarters (+1, -1, -1, +1) * f0; `f0 = None` uses the force
    /// magnitude derived from the circuit.
    Balanced4 { f0: Option<f64> },
    /// Explicit segment list.
    Segments(Vec<Segment>),
}

/// Which noise path feeds the propagator coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Off,
    HighTemperature,
    Kernel,
}

/// One sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: SweepAxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxisName {
    Temperature,
    RingWidth,
    BeamVelocity,
    EtaScale,
    GammaScale,
}

impl SweepAxisName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "temperature" => Some(Self::Temperature),
            "ring_width" => Some(Self::RingWidth),
            "beam_velocity" => Some(Self::BeamVelocity),
            "eta_scale" => Some(Self::EtaScale),
            "gamma_scale" => Some(Self::GammaScale),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Temperature => "temperature",
            Self::RingWidth => "ring_width",
            Self::BeamVelocity => "beam_velocity",
            Self::EtaScale => "eta_scale",
            Self::GammaScale => "gamma_scale",
        }
    }
}

/// Parameter sweep: one or two axes, full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config {
                line: 0,
                message: format!("sweep needs 1 or 2 axes, found {}", self.axes.len()),
            });
        }
        let points: usize = self.axes.iter().map(|a| a.values.len()).product();
        if points == 0 {
            return Err(Error::Config {
                line: 0,
                message: "sweep axis has no values".into(),
            });
        }
        if points > 1_000_000 {
            return Err(Error::Config {
                line: 0,
                message: format!("sweep grid has {points} points, limit is 1e6"),
            });
        }
        Ok(())
    }
}

/// Fully parsed scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub squid: SquidParams,
    pub apparatus: ApparatusParams,
    pub bath_options: BathOptions,
    pub profile: ProfileSpec,
    pub samples: usize,
    pub noise: NoiseKind,
    pub quadrature_tolerance: f64,
    pub sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    /// Transit time through the apparatus [s].
    pub fn experiment_duration(&self) -> f64 {
        self.apparatus.experiment_duration()
    }

    pub fn derived_bath(&self) -> Result<DerivedBath> {
        derive_bath(&self.squid, &self.apparatus, &self.bath_options)
    }

    pub fn force_profile(&self, bath: &DerivedBath) -> Result<ForceProfile> {
        let t_exp = self.experiment_duration();
        match &self.profile {
            ProfileSpec::Balanced4 { f0 } => {
                ForceProfile::balanced4(f0.unwrap_or(bath.force_magnitude), t_exp)
            }
            ProfileSpec::Segments(segs) => ForceProfile::from_segments(segs.clone(), t_exp),
        }
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            relative_tolerance: self.quadrature_tolerance,
            ..Default::default()
        }
    }

    /// Noise model for the propagator; borrows the spectral function for the
    /// kernel path.
    pub fn noise_model<'a>(
        &self,
        bath: &DerivedBath,
        spectral: &'a SpectralFunction,
    ) -> NoiseModel<'a> {
        match self.noise {
            NoiseKind::Off => NoiseModel::Off,
            NoiseKind::HighTemperature => NoiseModel::HighTemperature {
                weight: if bath.friction == 0.0 {
                    0.0
                } else {
                    spectral.noise_kernel_high_t_weight(self.apparatus.temperature)
                },
            },
            NoiseKind::Kernel => NoiseModel::Kernel {
                spectral,
                temperature: self.apparatus.temperature,
                quadrature: self.quadrature_spec(),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// INI parsing
// ---------------------------------------------------------------------------

struct RawConfig {
    /// (section, key) -> (line, value)
    entries: BTreeMap<(String, String), (usize, String)>,
}

fn parse_ini(text: &str) -> Result<RawConfig> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("malformed section header `{line}`"),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::Config {
                line: line_no,
                message: "empty key".into(),
            });
        }
        let full_key = (section.clone(), key.clone());
        if entries.contains_key(&full_key) && key != "segment" {
            return Err(Error::Config {
                line: line_no,
                message: format!("duplicate key `{key}` in section `[{section}]`"),
            });
        }
        // `segment` may repeat; store each occurrence under a unique key
        let stored_key = if key == "segment" {
            let n = entries
                .keys()
                .filter(|(s, k)| s == &section && k.starts_with("segment@"))
                .count();
            (section.clone(), format!("segment@{n}"))
        } else {
            full_key
        };
        entries.insert(stored_key, (line_no, value.trim().to_string()));
    }
    Ok(RawConfig { entries })
}

impl RawConfig {
    fn take_f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.entries.remove(&(section.to_string(), key.to_string())) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line,
                    message: format!("`{key}` must be a number, found `{value}`"),
                }),
        }
    }

    fn need_f64(&mut self, section: &str, key: &str) -> Result<f64> {
        self.take_f64(section, key)?.ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing required key `{key}` in section `[{section}]`"),
        })
    }

    fn take_usize(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.entries.remove(&(section.to_string(), key.to_string())) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line,
                    message: format!("`{key}` must be a non-negative integer, found `{value}`"),
                }),
        }
    }

    fn take_string(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }
}

fn parse_axis(raw: &mut RawConfig, name_key: &str, values_key: &str, range_key: &str) -> Result<Option<SweepAxis>> {
    let Some((line, name)) = raw.take_string("sweep", name_key) else {
        return Ok(None);
    };
    let axis_name = SweepAxisName::parse(&name).ok_or_else(|| Error::Config {
        line,
        message: format!(
            "unknown sweep axis `{name}` (expected temperature, ring_width, beam_velocity, eta_scale or gamma_scale)"
        ),
    })?;
    let values = match (raw.take_string("sweep", values_key), raw.take_string("sweep", range_key)) {
        (Some((vline, list)), None) => {
            let mut vals = Vec::new();
            for part in list.split(',') {
                vals.push(part.trim().parse::<f64>().map_err(|_| Error::Config {
                    line: vline,
                    message: format!("bad number `{}` in `{values_key}`", part.trim()),
                })?);
            }
            vals
        }
        (None, Some((rline, range))) => {
            let parts: Vec<&str> = range.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Config {
                    line: rline,
                    message: format!("`{range_key}` must be `<start> <end> <count>`"),
                });
            }
            let start: f64 = parts[0].parse().map_err(|_| Error::Config {
                line: rline,
                message: format!("bad start `{}`", parts[0]),
            })?;
            let end: f64 = parts[1].parse().map_err(|_| Error::Config {
                line: rline,
                message: format!("bad end `{}`", parts[1]),
            })?;
            let count: usize = parts[2].parse().map_err(|_| Error::Config {
                line: rline,
                message: format!("bad count `{}`", parts[2]),
            })?;
            if !(start > 0.0 && end > start && count >= 2) {
                return Err(Error::Config {
                    line: rline,
                    message: "log range needs 0 < start < end and count >= 2".into(),
                });
            }
            let l0 = start.ln();
            let step = (end.ln() - l0) / (count - 1) as f64;
            (0..count).map(|k| (l0 + step * k as f64).exp()).collect()
        }
        (None, None) => {
            return Err(Error::Config {
                line,
                message: format!("sweep axis `{name}` needs `{values_key}` or `{range_key}`"),
            })
        }
        (Some((vline, _)), Some(_)) => {
            return Err(Error::Config {
                line: vline,
                message: format!("give either `{values_key}` or `{range_key}`, not both"),
            })
        }
    };
    Ok(Some(SweepAxis {
        name: axis_name,
        values,
    }))
}

const KNOWN_KEYS: &[(&str, &str)] = &[
    ("squid", "capacitance"),
    ("squid", "inductance"),
    ("squid", "critical_current"),
    ("squid", "resistance"),
    ("squid", "flux_index"),
    ("squid", "ring_width"),
    ("squid", "ring_length"),
    ("apparatus", "geometry_factor"),
    ("apparatus", "magnetic_moment"),
    ("apparatus", "particle_mass"),
    ("apparatus", "initial_width"),
    ("apparatus", "beam_velocity"),
    ("apparatus", "apparatus_length"),
    ("apparatus", "temperature"),
    ("bath", "l0_override"),
    ("bath", "eta_scale"),
    ("bath", "gamma_scale"),
    ("profile", "preset"),
    ("profile", "f0"),
    ("run", "samples"),
    ("run", "noise"),
    ("run", "quadrature_tolerance"),
    ("sweep", "axis"),
    ("sweep", "values"),
    ("sweep", "log_range"),
    ("sweep", "axis2"),
    ("sweep", "values2"),
    ("sweep", "log_range2"),
];

/// Parse a full scenario config from INI text.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let mut raw = parse_ini(text)?;

    // reject typos up front, with the offending line
    for ((section, key), (line, _)) in &raw.entries {
        let known = (section == "profile" && key.starts_with("segment@"))
            || KNOWN_KEYS.iter().any(|(s, k)| s == section && k == key);
        if !known {
            return Err(Error::Config {
                line: *line,
                message: format!("unknown key `{key}` in section `[{section}]`"),
            });
        }
    }

    let squid = SquidParams {
        capacitance: raw.need_f64("squid", "capacitance")?,
        inductance: raw.need_f64("squid", "inductance")?,
        critical_current: raw.need_f64("squid", "critical_current")?,
        resistance: raw.need_f64("squid", "resistance")?,
        flux_index: raw.take_usize("squid", "flux_index")?.unwrap_or(1) as u32,
        ring_width: raw.need_f64("squid", "ring_width")?,
        ring_length: raw.need_f64("squid", "ring_length")?,
    };
    let apparatus = ApparatusParams {
        geometry_factor: raw.need_f64("apparatus", "geometry_factor")?,
        magnetic_moment: raw
            .take_f64("apparatus", "magnetic_moment")?
            .unwrap_or(crate::constants::MU_B),
        particle_mass: raw.need_f64("apparatus", "particle_mass")?,
        initial_width: raw.need_f64("apparatus", "initial_width")?,
        beam_velocity: raw.need_f64("apparatus", "beam_velocity")?,
        apparatus_length: raw.need_f64("apparatus", "apparatus_length")?,
        temperature: raw.need_f64("apparatus", "temperature")?,
    };
    let bath_options = BathOptions {
        l0_override: raw.take_f64("bath", "l0_override")?,
        eta_scale: raw.take_f64("bath", "eta_scale")?.unwrap_or(1.0),
        gamma_scale: raw.take_f64("bath", "gamma_scale")?.unwrap_or(1.0),
    };

    let profile = match raw.take_string("profile", "preset") {
        Some((line, preset)) => {
            if preset != "balanced4" {
                return Err(Error::Config {
                    line,
                    message: format!("unknown profile preset `{preset}` (expected balanced4)"),
                });
            }
            ProfileSpec::Balanced4 {
                f0: raw.take_f64("profile", "f0")?,
            }
        }
        None => {
            let mut segs = Vec::new();
            let mut idx = 0;
            while let Some((line, value)) = raw.take_string("profile", &format!("segment@{idx}")) {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::Config {
                        line,
                        message: "segment must be `<t_start> <t_end> <force>`".into(),
                    });
                }
                let nums: Result<Vec<f64>> = parts
                    .iter()
                    .map(|p| {
                        p.parse::<f64>().map_err(|_| Error::Config {
                            line,
                            message: format!("bad number `{p}` in segment"),
                        })
                    })
                    .collect();
                let nums = nums?;
                segs.push(Segment {
                    t_start: nums[0],
                    t_end: nums[1],
                    f_value: nums[2],
                });
                idx += 1;
            }
            if segs.is_empty() {
                return Err(Error::Config {
                    line: 0,
                    message: "section [profile] needs `preset = balanced4` or `segment` lines"
                        .into(),
                });
            }
            ProfileSpec::Segments(segs)
        }
    };

    let samples = raw.take_usize("run", "samples")?.unwrap_or(1000);
    let noise = match raw.take_string("run", "noise") {
        None => NoiseKind::HighTemperature,
        Some((line, value)) => match value.as_str() {
            "off" => NoiseKind::Off,
            "high-t" => NoiseKind::HighTemperature,
            "kernel" => NoiseKind::Kernel,
            other => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown noise mode `{other}` (expected off, high-t, kernel)"),
                })
            }
        },
    };
    let quadrature_tolerance = raw.take_f64("run", "quadrature_tolerance")?.unwrap_or(1e-10);

    let sweep = {
        let first = parse_axis(&mut raw, "axis", "values", "log_range")?;
        let second = parse_axis(&mut raw, "axis2", "values2", "log_range2")?;
        match (first, second) {
            (None, None) => None,
            (None, Some(_)) => {
                return Err(Error::Config {
                    line: 0,
                    message: "`axis2` given without `axis`".into(),
                })
            }
            (Some(a), None) => Some(SweepSpec { axes: vec![a] }),
            (Some(a), Some(b)) => Some(SweepSpec {
                axes: vec![a, b],
            }),
        }
    };
    if let Some(spec) = &sweep {
        spec.validate()?;
    }

    // no silent typo acceptance
    if let Some(((section, key), (line, _))) = raw.entries.iter().next() {
        return Err(Error::Config {
            line: *line,
            message: format!("unknown key `{key}` in section `[{section}]`"),
        });
    }

    let cfg = ScenarioConfig {
        squid,
        apparatus,
        bath_options,
        profile,
        samples,
        noise,
        quadrature_tolerance,
        sweep,
    };
    cfg.squid.validate()?;
    cfg.apparatus.validate()?;
    if cfg.samples == 0 {
        return Err(Error::Config {
            line: 0,
            message: "`samples` must be at least 1".into(),
        });
    }
    Ok(cfg)
}

/// Text of a shipped preset, by name.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "paper-squid" => Some(include_str!("../presets/paper-squid.ini")),
        "noiseless" => Some(include_str!("../presets/noiseless.ini")),
        "noisy-desk" => Some(include_str!("../presets/noisy-desk.ini")),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["paper-squid", "noiseless", "noisy-desk"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in PRESET_NAMES {
            let cfg = parse_scenario(preset_text(name).unwrap())
                .unwrap_or_else(|e| panic!("preset {name}: {e}"));
            let bath = cfg.derived_bath().unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.force_profile(&bath).unwrap();
        }
    }

    #[test]
    fn paper_preset_values() {
        let cfg = parse_scenario(preset_text("paper-squid").unwrap()).unwrap();
        let bath = cfg.derived_bath().unwrap();
        assert!((bath.effective_inductance / 1.0e-10 - 1.0).abs() < 1e-12);
        assert!((bath.friction / 8.600707600000002e-41 - 1.0).abs() < 1e-12);
        assert!((cfg.experiment_duration() / 1.0e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_preset_is_decoupled() {
        let cfg = parse_scenario(preset_text("noiseless").unwrap()).unwrap();
        let bath = cfg.derived_bath().unwrap();
        assert_eq!(bath.friction, 0.0);
        assert_eq!(cfg.noise, NoiseKind::Off);
    }

    #[test]
    fn desk_preset_regime() {
        let cfg = parse_scenario(preset_text("noisy-desk").unwrap()).unwrap();
        let bath = cfg.derived_bath().unwrap();
        // gamma T_exp = 0.1 with k_B T = 100 hbar gamma
        assert!((bath.damping_rate / 100.0 - 1.0).abs() < 1e-9);
        assert!((cfg.experiment_duration() / 1.0e-3 - 1.0).abs() < 1e-12);
        let ratio = crate::constants::K_B * cfg.apparatus.temperature
            / (crate::constants::HBAR * bath.damping_rate);
        assert!((ratio / 100.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let text = "\n[squid]\ncapacitance = 1e-12\nbogus_key = 3\n";
        match parse_scenario(text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("bogus_key"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_is_line_anchored() {
        let text = "[squid]\ncapacitance = banana\n";
        match parse_scenario(text) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn segments_profile_parses() {
        let mut text = preset_text("noisy-desk").unwrap().to_string();
        text = text.replace(
            "preset = balanced4",
            "segment = 0.0 0.5e-3 3.0e-24\nsegment = 0.5e-3 1.0e-3 -3.0e-24",
        );
        text = text.replace("f0 = 3.0e-24", "");
        let cfg = parse_scenario(&text).unwrap();
        match &cfg.profile {
            ProfileSpec::Segments(segs) => assert_eq!(segs.len(), 2),
            other => panic!("expected segments, got {other:?}"),
        }
        let bath = cfg.derived_bath().unwrap();
        cfg.force_profile(&bath).unwrap();
    }

    #[test]
    fn sweep_axes_parse() {
        let mut text = preset_text("paper-squid").unwrap().to_string();
        text.push_str("\n[sweep]\naxis = temperature\nlog_range = 0.01 10 7\n");
        let cfg = parse_scenario(&text).unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.axes.len(), 1);
        assert_eq!(sweep.axes[0].values.len(), 7);
        assert!((sweep.axes[0].values[0] - 0.01).abs() < 1e-12);
        assert!((sweep.axes[0].values[6] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_value_list_and_limits() {
        let mut text = preset_text("paper-squid").unwrap().to_string();
        text.push_str("\n[sweep]\naxis = eta_scale\nvalues = 0, 0.5, 1\n");
        let cfg = parse_scenario(&text).unwrap();
        assert_eq!(cfg.sweep.unwrap().axes[0].values, vec![0.0, 0.5, 1.0]);
        let mut bad = preset_text("paper-squid").unwrap().to_string();
        bad.push_str("\n[sweep]\naxis = nonsense\nvalues = 1\n");
        assert!(parse_scenario(&bad).is_err());
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = "[squid]\ncapacitance = 1e-12\ncapacitance = 2e-12\n";
        assert!(matches!(
            parse_scenario(text),
            Err(Error::Config { line: 3, .. })
        ));
    }
}
