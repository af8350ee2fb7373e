use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use qoverlap_core::error::{Error, Result};
use qoverlap_core::image::Image;
use qoverlap_core::imageio::load_idx_images;
use qoverlap_core::pipeline::rank_references;

use crate::commands::compare::{settings_from, ProtocolArg};
use crate::common::{
    load_input, load_noise, parse_blocks, parse_indices, write_output, OutputFormat,
    Preprocess,
};

/// Rank reference images by their overlap with a target image.
#[derive(Debug, Args)]
pub struct RankArgs {
    /// Target image path (omit when using --mnist-idx)
    #[arg(required_unless_present = "mnist_idx", conflicts_with = "mnist_idx")]
    pub target: Option<PathBuf>,
    /// Reference image paths
    #[arg(conflicts_with = "mnist_idx")]
    pub references: Vec<PathBuf>,
    /// Take target and references from an MNIST IDX file instead of paths
    #[arg(long)]
    pub mnist_idx: Option<PathBuf>,
    /// Index of the target image inside the IDX file
    #[arg(long, default_value_t = 0)]
    pub target_index: usize,
    /// Reference indices inside the IDX file, e.g. "0..9" or "1,4,7"
    /// (ranges are inclusive)
    #[arg(long, value_parser = parse_indices)]
    pub indices: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "destructive")]
    pub protocol: ProtocolArg,
    /// Segment into RxC blocks and rank by average overlap
    #[arg(long, value_parser = parse_blocks)]
    pub blocks: Option<(usize, usize)>,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 100)]
    pub runs: u32,
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
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

pub fn run(args: &RankArgs) -> Result<()> {
    let pre = Preprocess {
        binarize: args.binarize,
        pad: args.pad,
    };
    let (target, references, names): (Image, Vec<Image>, Vec<String>) =
        match &args.mnist_idx {
            Some(idx_path) => {
                let indices = args.indices.clone().ok_or_else(|| Error::MalformedImage {
                    format: "arguments",
                    reason: "--mnist-idx requires --indices".into(),
                })?;
                let target = load_idx_images(idx_path, &[args.target_index])?
                    .pop()
                    .expect("one index");
                let refs = load_idx_images(idx_path, &indices)?;
                (
                    pre.apply(target),
                    refs.into_iter().map(|i| pre.apply(i)).collect(),
                    indices.iter().map(|i| i.to_string()).collect(),
                )
            }
            None => {
                let target_path = args.target.as_ref().expect("clap requires a target");
                if args.references.is_empty() {
                    return Err(Error::EmptyReferences);
                }
                let target = load_input(target_path, None, pre)?;
                let refs = args
                    .references
                    .iter()
                    .map(|p| load_input(p, None, pre))
                    .collect::<Result<Vec<_>>>()?;
                let names = args
                    .references
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect();
                (target, refs, names)
            }
        };

    let noise = load_noise(args.noise.as_ref())?;
    let settings = settings_from(
        args.protocol,
        args.exact,
        args.shots,
        args.runs,
        args.seed,
        noise,
    );
    let ranked = rank_references(&target, &references, args.blocks, &settings)?;

    let rendered = match args.format {
        OutputFormat::Csv => {
            let mut out = String::from("rank,reference,score\n");
            for (place, (id, score)) in ranked.iter().enumerate() {
                writeln!(out, "{},{},{}", place + 1, names[*id], score).expect("string write");
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = ranked
                .iter()
                .enumerate()
                .map(|(place, (id, score))| {
                    serde_json::json!({
                        "rank": place + 1,
                        "reference": names[*id],
                        "score": score,
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
