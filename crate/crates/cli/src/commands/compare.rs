use std::path::PathBuf;

use clap::Args;
use qoverlap_core::error::Result;
use qoverlap_core::noise::NoiseModel;
use qoverlap_core::overlap::Protocol;
use qoverlap_core::pipeline::{compare_full, compare_segmented, CompareSettings};

use crate::common::{
    effective_shots, load_input, load_noise, parse_blocks, write_output, OutputFormat,
    Preprocess,
};

/// Compare two images, whole or segment-wise, and report overlap statistics.
#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Target image (.pgm, .idx or matrix text)
    pub target: PathBuf,
    /// Reference image
    pub reference: PathBuf,
    /// Overlap protocol
    #[arg(long, value_enum, default_value = "destructive")]
    pub protocol: ProtocolArg,
    /// Segment into RxC blocks and score by average overlap
    #[arg(long, value_parser = parse_blocks)]
    pub blocks: Option<(usize, usize)>,
    /// Shots per circuit execution
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    /// Repetitions for mean/std statistics
    #[arg(long, default_value_t = 100)]
    pub runs: u32,
    /// Base seed for sampling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate exact probabilities instead of sampling
    #[arg(long)]
    pub exact: bool,
    /// Noise model JSON file
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Binarize with this threshold before encoding
    #[arg(long)]
    pub binarize: Option<f64>,
    /// Pad image dimensions to the next power of two
    #[arg(long)]
    pub pad: bool,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProtocolArg {
    Swap,
    Destructive,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Swap => Protocol::Swap,
            ProtocolArg::Destructive => Protocol::Destructive,
        }
    }
}

pub fn settings_from(
    protocol: ProtocolArg,
    exact: bool,
    shots: u64,
    runs: u32,
    seed: u64,
    noise: Option<NoiseModel>,
) -> CompareSettings {
    CompareSettings {
        protocol: protocol.into(),
        shots: effective_shots(exact, shots),
        seed,
        noise,
        runs,
    }
}

pub fn run(args: &CompareArgs) -> Result<()> {
    let pre = Preprocess {
        binarize: args.binarize,
        pad: args.pad,
    };
    let target = load_input(&args.target, None, pre)?;
    let reference = load_input(&args.reference, None, pre)?;
    let noise = load_noise(args.noise.as_ref())?;
    let settings = settings_from(
        args.protocol,
        args.exact,
        args.shots,
        args.runs,
        args.seed,
        noise,
    );
    let report = match args.blocks {
        Some((br, bc)) => compare_segmented(&target, &reference, br, bc, &settings)?,
        None => compare_full(&target.encode_qpie()?, &reference.encode_qpie()?, &settings)?,
    };
    let rendered = match args.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    write_output(args.out.as_ref(), &rendered)
}
