//! Command-line surface: `run`, `estimate`, `sweep`, `oracle-check`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 oracle check failed.

use crate::config::{self, ScenarioConfig, SweepAxisName};
use crate::constants::{HBAR, K_B};
use crate::density::{self, CoherenceMode};
use crate::error::Error;
use crate::kernels::SpectralFunction;
use crate::model::{self, DerivedBath, MANY_MINIMA_DEFAULT_THRESHOLD};
use crate::oracle::{self, OracleCheck};
use crate::propagator::{coeff_set, NoiseModel};
use crate::svg::{render_plot, Series};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "sgi", about = "Dissipative Stern-Gerlach interferometer simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Path to an INI scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped preset name: paper-squid, noiseless, noisy-desk.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the scenario and write trace.csv (+ units.txt, optional SVG).
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the sample count from the config.
        #[arg(long)]
        samples: Option<usize>,
        /// Also write trace.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Print the derived circuit/bath parameter table.
    Estimate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also write estimate.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the configured parameter sweep and write sweep.csv.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the independent oracles against the main pipeline.
    OracleCheck {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Write the pass/fail table as CSV into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiply every tolerance (0 forces all checks to fail).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        /// Skip the slow brute-force kernel integration.
        #[arg(long)]
        quick: bool,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidParameter { .. } => 2,
        Error::UnusableCutoff { .. }
        | Error::QuadratureNonConvergence { .. }
        | Error::Regime(_) => 3,
    }
}

fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig, Error> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?,
        (None, Some(name)) => config::preset_text(name)
            .ok_or_else(|| Error::Config {
                line: 0,
                message: format!(
                    "unknown preset `{name}` (available: {})",
                    config::PRESET_NAMES.join(", ")
                ),
            })?
            .to_string(),
        (None, None) => {
            return Err(Error::Config {
                line: 0,
                message: "give either --config <path> or --preset <name>".into(),
            })
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let mut cfg = config::parse_scenario(&text)?;
    if let Ok(tol) = std::env::var("SGI_QUAD_TOL") {
        let v: f64 = tol.parse().map_err(|_| Error::Config {
            line: 0,
            message: format!("SGI_QUAD_TOL must be a number, found `{tol}`"),
        })?;
        if !(v > 0.0 && v <= 1e-2) {
            return Err(Error::Config {
                line: 0,
                message: format!("SGI_QUAD_TOL must lie in (0, 1e-2], found {v}"),
            });
        }
        cfg.quadrature_tolerance = v;
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config {
        line: 0,
        message: format!("cannot create {}: {e}", dir.display()),
    })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Config {
        line: 0,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// 17-significant-digit decimal serialization used in every CSV.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

const TRACE_UNITS: &str = "\
trace.csv columns (SI units):
  t            time since entering the splitter [s]
  z_plus       spin-up branch packet center [m]
  z_minus      spin-down branch packet center [m]
  sigma_tilde  evolved packet width [m]
  h            irreversible attenuation factor [dimensionless]
  coherence    |tr rho_ud|, off-diagonal coherence [dimensionless]
  sx           <sigma_x> spin interference signal [dimensionless]
";

fn cmd_run(cfg: &ScenarioConfig, out: &Path, samples: Option<usize>, svg: bool) -> Result<(), Error> {
    let bath = cfg.derived_bath()?;
    let fp = cfg.force_profile(&bath)?;
    let spectral = bath_spectral(&bath)?;
    let noise = cfg.noise_model(&bath, &spectral);
    let samples = samples.unwrap_or(cfg.samples);
    let trace = density::coherence_trace(
        &fp,
        cfg.apparatus.particle_mass,
        bath.damping_rate,
        cfg.apparatus.initial_width,
        &noise,
        samples,
    )?;

    let mut csv = String::from("t,z_plus,z_minus,sigma_tilde,h,coherence,sx\n");
    for r in &trace.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            num(r.t),
            num(r.z_plus),
            num(r.z_minus),
            num(r.sigma_tilde),
            num(r.h),
            num(r.coherence),
            num(r.sx)
        ));
    }
    write_file(out, "trace.csv", &csv)?;
    write_file(out, "units.txt", TRACE_UNITS)?;

    if svg {
        let h_pts: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.h)).collect();
        let c_pts: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.coherence)).collect();
        let doc = render_plot(
            "attenuation and coherence",
            "t [s]",
            "dimensionless",
            &[
                Series { label: "h(t)", color: "#1f77b4", points: &h_pts },
                Series { label: "coherence", color: "#d62728", points: &c_pts },
            ],
        );
        write_file(out, "trace.svg", &doc)?;
    }

    let last = trace.rows.last().expect("trace has rows");
    println!(
        "wrote {} rows to {}; final coherence {:.6}, final h {:.6}",
        trace.rows.len(),
        out.join("trace.csv").display(),
        last.coherence,
        last.h
    );
    match trace.decoherence_time {
        Some(tau) => println!("decoherence time tau = {tau:.6e} s"),
        None => println!("decoherence time tau = inf (h never reaches 1/e)"),
    }
    Ok(())
}

fn bath_spectral(bath: &DerivedBath) -> Result<SpectralFunction, Error> {
    bath.spectral_function()
}

fn cmd_estimate(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<(), Error> {
    let bath = cfg.derived_bath()?;
    let minima_ratio = 2.0 * std::f64::consts::PI * cfg.squid.critical_current
        * cfg.squid.inductance
        / crate::constants::PHI_0;
    let many = model::many_minima_check(&cfg.squid, MANY_MINIMA_DEFAULT_THRESHOLD);
    let rows: Vec<(&str, String, &str)> = vec![
        ("L0", num(bath.effective_inductance), "H"),
        ("epsilon", num(bath.coupling), "J/(Wb m)"),
        ("eta", num(bath.friction), "kg/s"),
        ("Omega", num(bath.cutoff), "rad/s"),
        ("Omega_prime", num(bath.cutoff2), "rad/s"),
        ("gamma", num(bath.damping_rate), "1/s"),
        ("relaxation_time", num(bath.relaxation_time), "s"),
        ("f0", num(bath.force_magnitude), "N"),
        ("many_minima_ratio", num(minima_ratio), "dimensionless"),
        ("many_minima", many.to_string(), "bool"),
    ];
    println!("{:<20} {:<26} {}", "quantity", "value", "unit");
    for (name, value, unit) in &rows {
        println!("{name:<20} {value:<26} {unit}");
    }
    if let Some(dir) = out {
        let mut csv = String::from("quantity,value,unit\n");
        for (name, value, unit) in &rows {
            csv.push_str(&format!("{name},{value},{unit}\n"));
        }
        write_file(dir, "estimate.csv", &csv)?;
    }
    Ok(())
}

/// Scenario with one sweep-axis value applied. The ring-width axis also
/// recomputes the geometry factor from the ring dimensions (field gradient
/// evaluated one ring-width off the loop), so smaller rings couple harder.
fn apply_axis(cfg: &ScenarioConfig, axis: SweepAxisName, value: f64) -> Result<ScenarioConfig, Error> {
    let mut out = cfg.clone();
    match axis {
        SweepAxisName::Temperature => out.apparatus.temperature = value,
        SweepAxisName::BeamVelocity => out.apparatus.beam_velocity = value,
        SweepAxisName::EtaScale => out.bath_options.eta_scale = value,
        SweepAxisName::GammaScale => out.bath_options.gamma_scale = value,
        SweepAxisName::RingWidth => {
            out.squid.ring_width = value;
            out.apparatus.geometry_factor =
                model::geometry_factor_estimate(value, out.squid.ring_length, value)?;
        }
    }
    Ok(out)
}

/// (tau, coherence at T_exp) for one grid point.
fn sweep_point(cfg: &ScenarioConfig) -> Result<(Option<f64>, f64), Error> {
    let bath = cfg.derived_bath()?;
    let fp = cfg.force_profile(&bath)?;
    let spectral = bath_spectral(&bath)?;
    let noise = cfg.noise_model(&bath, &spectral);
    let t_exp = fp.total_time();
    let mass = cfg.apparatus.particle_mass;
    let sigma = cfg.apparatus.initial_width;
    let gamma = bath.damping_rate;
    let quad = cfg.quadrature_spec();
    let coeffs = coeff_set(&fp, t_exp, mass, gamma, &noise)?;
    let coherence = density::coherence(&coeffs, sigma, CoherenceMode::ClosedFormHighT, &quad)?;
    let tau = density::decoherence_time(
        |t| {
            let c = coeff_set(&fp, t, mass, gamma, &noise)?;
            density::h_factor(&c, sigma)
        },
        t_exp * 1e-6,
        t_exp,
    )?;
    Ok((tau, coherence))
}

fn cmd_sweep(cfg: &ScenarioConfig, out: &Path) -> Result<(), Error> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config {
        line: 0,
        message: "scenario has no [sweep] section".into(),
    })?;
    sweep.validate()?;

    let mut csv = String::new();
    for axis in &sweep.axes {
        csv.push_str(axis.name.label());
        csv.push(',');
    }
    csv.push_str("tau,coherence_at_t_exp\n");

    // deterministic row order: first axis outer, second inner
    let second: &[f64] = sweep.axes.get(1).map_or(&[f64::NAN][..], |a| &a.values);
    for &v1 in &sweep.axes[0].values {
        for &v2 in second {
            let mut point = apply_axis(cfg, sweep.axes[0].name, v1)?;
            if let Some(axis2) = sweep.axes.get(1) {
                point = apply_axis(&point, axis2.name, v2)?;
            }
            let (tau, coherence) = sweep_point(&point)?;
            csv.push_str(&num(v1));
            csv.push(',');
            if sweep.axes.len() == 2 {
                csv.push_str(&num(v2));
                csv.push(',');
            }
            match tau {
                Some(t) => csv.push_str(&num(t)),
                None => csv.push_str("inf"),
            }
            csv.push(',');
            csv.push_str(&num(coherence));
            csv.push('\n');
        }
    }
    write_file(out, "sweep.csv", &csv)?;
    let points: usize = sweep.axes.iter().map(|a| a.values.len()).product();
    println!("wrote {points} sweep points to {}", out.join("sweep.csv").display());
    Ok(())
}

/// Run every oracle against the main pipeline; returns the table.
fn oracle_checks(cfg: &ScenarioConfig, quick: bool) -> Result<Vec<OracleCheck>, Error> {
    let bath = cfg.derived_bath()?;
    let fp = cfg.force_profile(&bath)?;
    let spectral = bath_spectral(&bath)?;
    let noise = cfg.noise_model(&bath, &spectral);
    let mass = cfg.apparatus.particle_mass;
    let sigma = cfg.apparatus.initial_width;
    let gamma = bath.damping_rate;
    let t_exp = fp.total_time();
    let mut checks = Vec::new();

    // 1. packet centers against the RK4 trajectory
    {
        let dt = t_exp / 2.0e4;
        let scale = fp
            .segments()
            .iter()
            .map(|s| s.f_value.abs())
            .fold(0.0, f64::max)
            * t_exp
            * t_exp
            / (16.0 * mass);
        let mut worst = 0.0f64;
        for k in 1..=20 {
            let t = t_exp * k as f64 / 20.0;
            let closed = density::packet_center(&fp, t, mass, gamma)?;
            let rk4 = oracle::rk4_center_at(&fp, mass, gamma, t, dt)?;
            worst = worst.max((closed - rk4).abs() / scale.max(f64::MIN_POSITIVE));
        }
        checks.push(OracleCheck {
            name: "packet-center-vs-rk4",
            achieved: worst,
            tolerance: 1e-6,
        });
    }

    // 2. noiseless closed form against the exact Gaussian-overlap oracle
    // (bath switched off for both sides; present for every config so the
    // gamma -> 0 cross-check always has a row)
    {
        let mut worst = 0.0f64;
        for k in [5usize, 10, 15, 20] {
            let t = t_exp * k as f64 / 20.0;
            let coeffs = coeff_set(&fp, t, mass, 0.0, &NoiseModel::Off)?;
            let closed = density::log_coherence(&coeffs, sigma)?;
            let exact = oracle::noiseless_log_overlap(&fp, mass, sigma, t)?;
            worst = worst.max((closed - exact).abs() / exact.abs().max(1.0));
        }
        checks.push(OracleCheck {
            name: "noiseless-overlap",
            achieved: worst,
            tolerance: 1e-6,
        });
    }

    // 3. closed-form coherence against direct integration of the
    // off-diagonal block, with the configured noise
    {
        let quad = cfg.quadrature_spec();
        let mut worst = 0.0f64;
        let mut compared = 0usize;
        for k in (1..=20).rev() {
            if compared == 3 {
                break;
            }
            let t = t_exp * k as f64 / 20.0;
            let coeffs = coeff_set(&fp, t, mass, gamma, &noise)?;
            let closed = density::coherence(&coeffs, sigma, CoherenceMode::ClosedFormHighT, &quad)?;
            // the direct quadrature cannot resolve coherences near the f64
            // floor; only representable values are comparable
            if closed < 1e-10 {
                continue;
            }
            let (numeric, _truncation) = oracle::trace_offdiag_numeric(&coeffs, sigma)?;
            worst = worst.max((numeric.norm() - closed).abs() / closed);
            compared += 1;
        }
        if compared == 0 {
            return Err(Error::Regime(
                "no sampled time has a coherence large enough for the direct \
                 off-diagonal trace oracle"
                    .into(),
            ));
        }
        checks.push(OracleCheck {
            name: "offdiag-trace",
            achieved: worst,
            tolerance: 1e-4,
        });
    }

    // 4. noise-kernel coefficients, three ways, at a fixed benchmark point
    // where all three methods are valid (sharp Ohmic bath, k_B T / hbar =
    // 2000 gamma, cutoff 400/t); slow, so skippable with --quick
    if !quick {
        let (bt, bgamma) = (1.0, 1.0);
        let eta = 1.0e-3;
        let omega_c = 400.0;
        let temperature = 2000.0 * HBAR / K_B;
        let sf = SpectralFunction::sharp(eta, omega_c)?;
        let (ba, bb, bc) = oracle::brute_force_abc(bt, bgamma, temperature, &sf)?;
        let quad = crate::quad::QuadratureSpec {
            relative_tolerance: 1e-5,
            panel_count: 1 << 15,
            ..Default::default()
        };
        let (qa, qb, qc) =
            crate::propagator::coeff_abc_quadrature(bt, bgamma, temperature, &sf, &quad)?;
        let weight = sf.noise_kernel_high_t_weight(temperature);
        let (ha, hb, hc) = crate::propagator::coeff_abc_high_t(bt, bgamma, weight)?;
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        checks.push(OracleCheck {
            name: "kernel-abc-brute-vs-quadrature",
            achieved: rel(ba, qa).max(rel(bb, qb)).max(rel(bc, qc)),
            tolerance: 5e-3,
        });
        checks.push(OracleCheck {
            name: "kernel-abc-vs-high-t",
            achieved: rel(qa, ha).max(rel(qb, hb)).max(rel(qc, hc)),
            tolerance: 1e-2,
        });
    }

    Ok(checks)
}

fn cmd_oracle_check(
    cfg: &ScenarioConfig,
    out: Option<&Path>,
    tolerance_scale: f64,
    quick: bool,
) -> Result<bool, Error> {
    if !(tolerance_scale >= 0.0 && tolerance_scale.is_finite()) {
        return Err(Error::Config {
            line: 0,
            message: format!("--tolerance-scale must be finite and >= 0, found {tolerance_scale}"),
        });
    }
    let checks = oracle_checks(cfg, quick)?;
    let mut all_passed = true;
    let mut csv = String::from("check,achieved,tolerance,status\n");
    println!("{:<34} {:<13} {:<13} status", "check", "achieved", "tolerance");
    for c in &checks {
        let tol = c.tolerance * tolerance_scale;
        let passed = c.achieved <= tol;
        all_passed &= passed;
        let status = if passed { "pass" } else { "FAIL" };
        println!("{:<34} {:<13.3e} {:<13.3e} {status}", c.name, c.achieved, tol);
        csv.push_str(&format!("{},{},{},{}\n", c.name, num(c.achieved), num(tol), status));
    }
    if let Some(dir) = out {
        write_file(dir, "oracle_check.csv", &csv)?;
    }
    Ok(all_passed)
}

/// Entry point; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let result: Result<i32, Error> = (|| match &cli.command {
        Command::Run { scenario, out, samples, svg } => {
            let cfg = load_scenario(scenario)?;
            cmd_run(&cfg, out, *samples, *svg)?;
            Ok(0)
        }
        Command::Estimate { scenario, out } => {
            let cfg = load_scenario(scenario)?;
            cmd_estimate(&cfg, out.as_deref())?;
            Ok(0)
        }
        Command::Sweep { scenario, out } => {
            let cfg = load_scenario(scenario)?;
            cmd_sweep(&cfg, out)?;
            Ok(0)
        }
        Command::OracleCheck { scenario, out, tolerance_scale, quick } => {
            let cfg = load_scenario(scenario)?;
            if cmd_oracle_check(&cfg, out.as_deref(), *tolerance_scale, *quick)? {
                Ok(0)
            } else {
                Ok(4)
            }
        }
    })();
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_map_by_error_class() {
        assert_eq!(exit_code_for(&Error::Config { line: 3, message: "x".into() }), 2);
        assert_eq!(
            exit_code_for(&Error::InvalidParameter {
                name: "x",
                reason: "y",
                value: 0.0
            }),
            2
        );
        assert_eq!(exit_code_for(&Error::Regime("x".into())), 3);
        assert_eq!(
            exit_code_for(&Error::QuadratureNonConvergence { achieved: 1.0, requested: 0.5 }),
            3
        );
        assert_eq!(exit_code_for(&Error::UnusableCutoff { lhs: 1.0, rhs: 2.0 }), 3);
    }

    #[test]
    fn csv_numbers_have_17_significant_digits() {
        let s = num(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(num(1.0e-300), "1.0000000000000000e-300");
    }

    #[test]
    fn ring_width_axis_recomputes_coupling() {
        let cfg = config::parse_scenario(config::preset_text("paper-squid").unwrap()).unwrap();
        let small = apply_axis(&cfg, SweepAxisName::RingWidth, 1.0e-6).unwrap();
        let large = apply_axis(&cfg, SweepAxisName::RingWidth, 1.0e-4).unwrap();
        let eta_small = small.derived_bath().unwrap().friction;
        let eta_large = large.derived_bath().unwrap().friction;
        assert!(eta_small > eta_large);
    }

    #[test]
    fn sweep_point_noise_free_has_infinite_tau() {
        let cfg = config::parse_scenario(config::preset_text("noiseless").unwrap()).unwrap();
        let (tau, coherence) = sweep_point(&cfg).unwrap();
        assert!(tau.is_none());
        assert!((coherence - 1.0).abs() < 1e-6);
    }
}
