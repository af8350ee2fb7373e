use std::path::PathBuf;

use clap::Args;
use qoverlap_core::error::{Error, Result};
use qoverlap_core::memory::{classify, ReferenceBank};
use qoverlap_core::state::Statevector;

use crate::common::{
    effective_shots, load_input, load_noise, write_output, OutputFormat, Preprocess,
};

/// Classify a target image against labelled references with the
/// associative-memory circuit.
#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Target image
    pub target: PathBuf,
    /// Reference images
    #[arg(required = true)]
    pub references: Vec<PathBuf>,
    /// Comma-separated label bitstrings aligned with the references,
    /// e.g. "11,01,10,00"; defaults to binary indices
    #[arg(long)]
    pub labels: Option<String>,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long)]
    pub binarize: Option<f64>,
    #[arg(long)]
    pub pad: bool,
    /// Histogram output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

pub fn run(args: &ClassifyArgs) -> Result<()> {
    let pre = Preprocess {
        binarize: args.binarize,
        pad: args.pad,
    };
    let target = load_input(&args.target, None, pre)?
        .encode_qpie()?
        .state()
        .clone();
    let states: Vec<Statevector> = args
        .references
        .iter()
        .map(|p| Ok(load_input(p, None, pre)?.encode_qpie()?.state().clone()))
        .collect::<Result<_>>()?;

    let bank = match &args.labels {
        Some(spec) => {
            let labels: Vec<String> = spec.split(',').map(|l| l.trim().to_string()).collect();
            if labels.len() != states.len() {
                return Err(Error::BadLabel {
                    label: spec.clone(),
                    reason: format!(
                        "{} label(s) for {} reference(s)",
                        labels.len(),
                        states.len()
                    ),
                });
            }
            ReferenceBank::new(states, labels)?
        }
        None => ReferenceBank::with_default_labels(states)?,
    };

    let result = classify(
        &target,
        &bank,
        effective_shots(args.exact, args.shots),
        args.seed,
        load_noise(args.noise.as_ref())?.as_ref(),
    )?;

    let rendered = match args.format {
        OutputFormat::Csv => result.histogram_csv(),
        OutputFormat::Json => format!("{}\n", result.to_json()),
    };
    write_output(args.out.as_ref(), &rendered)?;
    // The winner line goes to stdout even when the histogram goes to a file.
    println!("winner label={}", result.winner);
    Ok(())
}
