use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use qoverlap_core::error::{Error, Result};
use qoverlap_core::nv::{fit_linear, nv_theoretical_fidelity, simulate_nv_point, Beta, NvCurve};

use crate::common::{effective_shots, load_noise, write_output};

/// Sweep the rotation angle, simulate the fidelity curve and fit it
/// against the theoretical one.
#[derive(Debug, Args)]
pub struct NvArgs {
    /// Rotation phase: "pi/2" or "3pi/2"
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    /// Sweep start angle in radians
    #[arg(long, default_value_t = 0.0)]
    pub theta_from: f64,
    /// Sweep end angle in radians (exclusive)
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub theta_to: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Curve CSV output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit JSON output file (defaults to OUT with a .fit.json suffix, or
    /// stdout when no files are written)
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
}

/// Accept "pi/2" / "3pi/2" (also with π) or an equivalent numeric angle.
pub fn parse_beta(s: &str) -> std::result::Result<Beta, String> {
    let normalized = s.trim().replace('π', "pi").to_ascii_lowercase();
    match normalized.as_str() {
        "pi/2" | "0.5pi" | "pi*0.5" => return Ok(Beta::HalfPi),
        "3pi/2" | "1.5pi" | "pi*1.5" => return Ok(Beta::ThreeHalfPi),
        _ => {}
    }
    if let Ok(v) = normalized.parse::<f64>() {
        if (v - Beta::HalfPi.angle()).abs() < 1e-9 {
            return Ok(Beta::HalfPi);
        }
        if (v - Beta::ThreeHalfPi.angle()).abs() < 1e-9 {
            return Ok(Beta::ThreeHalfPi);
        }
    }
    Err(format!("beta must be pi/2 or 3pi/2, got {s:?}"))
}

pub fn run(args: &NvArgs) -> Result<()> {
    if args.points == 0 || !args.theta_from.is_finite() || !args.theta_to.is_finite() {
        return Err(Error::MalformedImage {
            format: "sweep",
            reason: "need at least one finite grid point".into(),
        });
    }
    let noise = load_noise(args.noise.as_ref())?;
    let shots = effective_shots(args.exact, args.shots);
    let span = args.theta_to - args.theta_from;

    let mut samples = Vec::with_capacity(args.points);
    let mut csv = String::from("theta,f_sim,f_th\n");
    for k in 0..args.points {
        let theta = args.theta_from + span * k as f64 / args.points as f64;
        let point_noise = noise
            .as_ref()
            .map(|m| m.with_seed(m.seed().wrapping_add(k as u64)));
        let f_sim = simulate_nv_point(
            theta,
            args.beta,
            shots,
            args.seed.wrapping_add(k as u64),
            point_noise.as_ref(),
        )?;
        let f_th = nv_theoretical_fidelity(theta, args.beta);
        writeln!(csv, "{theta},{f_sim},{f_th}").expect("string write");
        samples.push((theta, f_sim));
    }

    let fit = fit_linear(&NvCurve::new(args.beta, samples)?)?;
    let fit_json = format!("{}\n", fit.to_json());

    write_output(args.out.as_ref(), &csv)?;
    let fit_path = args.fit_out.clone().or_else(|| {
        args.out.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".fit.json");
            PathBuf::from(s)
        })
    });
    write_output(fit_path.as_ref(), &fit_json)
}
