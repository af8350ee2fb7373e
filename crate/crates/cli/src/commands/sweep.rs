use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use qoverlap_core::error::{Error, Result};
use qoverlap_core::image::Image;
use qoverlap_core::noise::NoiseModel;
use qoverlap_core::pipeline::{compare_full, CompareSettings};

use crate::commands::compare::ProtocolArg;
use crate::common::{load_input, load_noise, write_output, OutputFormat, Preprocess};

/// Which noise parameter a sweep varies. `All` drives the single- and
/// two-qubit strengths together, the gate classes the destructive-test
/// circuits use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    P1q,
    P2q,
    P3q,
    All,
    Readout,
}

/// Sweep one noise parameter and tabulate the overlap of an image pair.
#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Target image; defaults to a uniform 2×2 pattern
    pub target: Option<PathBuf>,
    /// Reference image; defaults to the target
    pub reference: Option<PathBuf>,
    /// Parameter to vary
    #[arg(long, value_enum)]
    pub vary: SweepParameter,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    /// Base noise model JSON; swept values override the varied field
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "destructive")]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 100)]
    pub runs: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub binarize: Option<f64>,
    #[arg(long)]
    pub pad: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

/// The swept grid: from, from+step, … up to and including `to` within a
/// half-step tolerance.
pub fn sweep_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from
    {
        return Err(Error::MalformedImage {
            format: "sweep",
            reason: format!("empty or invalid sweep {from}..{to} step {step}"),
        });
    }
    let count = ((to - from) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|k| from + k as f64 * step).collect())
}

fn model_with(base: &NoiseModel, vary: SweepParameter, value: f64) -> Result<NoiseModel> {
    let (p1, p2, p3, r) = match vary {
        SweepParameter::P1q => (value, base.p_2q(), base.p_3q(), base.readout_r()),
        SweepParameter::P2q => (base.p_1q(), value, base.p_3q(), base.readout_r()),
        SweepParameter::P3q => (base.p_1q(), base.p_2q(), value, base.readout_r()),
        SweepParameter::All => (value, value, base.p_3q(), base.readout_r()),
        SweepParameter::Readout => (base.p_1q(), base.p_2q(), base.p_3q(), value),
    };
    NoiseModel::new(p1, p2, p3, r, base.seed())
}

fn default_pattern() -> Image {
    Image::new(2, 2, vec![1.0; 4]).expect("static image")
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let pre = Preprocess {
        binarize: args.binarize,
        pad: args.pad,
    };
    let target = match &args.target {
        Some(p) => load_input(p, None, pre)?,
        None => default_pattern(),
    };
    let reference = match &args.reference {
        Some(p) => load_input(p, None, pre)?,
        None => target.clone(),
    };
    let base = load_noise(args.noise.as_ref())?.unwrap_or_else(|| NoiseModel::noiseless(0));
    let values = sweep_values(args.from, args.to, args.step)?;

    // Validate the whole grid up front so an out-of-bounds endpoint fails
    // before any work is done.
    let models: Vec<NoiseModel> = values
        .iter()
        .map(|&v| model_with(&base, args.vary, v))
        .collect::<Result<_>>()?;

    let target_q = target.encode_qpie()?;
    let reference_q = reference.encode_qpie()?;
    let mut rows: Vec<(f64, NoiseModel, f64, f64)> = Vec::with_capacity(values.len());
    for (k, (value, model)) in values.iter().zip(models).enumerate() {
        let settings = CompareSettings {
            protocol: args.protocol.into(),
            shots: args.shots,
            seed: args.seed.wrapping_add(k as u64 * args.runs as u64),
            noise: Some(model.with_seed(
                model.seed().wrapping_add(k as u64 * args.runs as u64),
            )),
            runs: args.runs,
        };
        let report = compare_full(&target_q, &reference_q, &settings)?;
        let model = settings.noise.expect("set above");
        rows.push((*value, model, report.i_mean, report.i_std));
    }

    let rendered = match args.format {
        OutputFormat::Csv => {
            let mut out =
                String::from("value,p_1q,p_2q,p_3q,readout_r,i_mean,i_std,runs,shots\n");
            for (value, model, i_mean, i_std) in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    value,
                    model.p_1q(),
                    model.p_2q(),
                    model.p_3q(),
                    model.readout_r(),
                    i_mean,
                    i_std,
                    args.runs,
                    args.shots
                )
                .expect("string write");
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(value, model, i_mean, i_std)| {
                    serde_json::json!({
                        "value": value,
                        "p_1q": model.p_1q(),
                        "p_2q": model.p_2q(),
                        "p_3q": model.p_3q(),
                        "readout_r": model.readout_r(),
                        "i_mean": i_mean,
                        "i_std": i_std,
                        "runs": args.runs,
                        "shots": args.shots,
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&rows).expect("rows serialize")
            )
        }
    };
    write_output(args.out.as_ref(), &rendered)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid_is_inclusive() {
        let values = sweep_values(0.05, 1.05, 0.1).unwrap();
        assert_eq!(values.len(), 11);
        assert!((values[0] - 0.05).abs() < 1e-12);
        assert!((values[10] - 1.05).abs() < 1e-12);
        assert!(sweep_values(1.0, 0.5, 0.1).is_err());
        assert!(sweep_values(0.0, 1.0, 0.0).is_err());
        assert_eq!(sweep_values(0.3, 0.3, 0.1).unwrap(), vec![0.3]);
    }
}
