//! Shared plumbing for the subcommands: image loading with preprocessing
//! flags, noise configs, and atomic output writing.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qoverlap_core::error::{Error, Result};
use qoverlap_core::image::Image;
use qoverlap_core::imageio::{load_image, ImageFormat};
use qoverlap_core::noise::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Preprocessing applied to every loaded image.
#[derive(Debug, Clone, Copy, Default)]
pub struct Preprocess {
    pub binarize: Option<f64>,
    pub pad: bool,
}

impl Preprocess {
    pub fn apply(&self, img: Image) -> Image {
        let img = match self.binarize {
            Some(threshold) => img.binarize(threshold),
            None => img,
        };
        if self.pad {
            img.pad_to_pow2()
        } else {
            img
        }
    }
}

/// Load an image, picking the format from the file extension: `.pgm` is
/// PGM, `.idx`/`.idx3-ubyte`/`.ubyte` are IDX (first image unless an index
/// is given), anything else parses as matrix text.
pub fn load_input(path: &Path, idx_index: Option<usize>, pre: Preprocess) -> Result<Image> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let format = match ext.as_str() {
        "pgm" => ImageFormat::Pgm,
        "idx" | "idx3-ubyte" | "ubyte" => ImageFormat::MnistIdx {
            index: idx_index.unwrap_or(0),
        },
        _ => ImageFormat::MatrixText,
    };
    Ok(pre.apply(load_image(path, format)?))
}

/// Read a noise model from a flat JSON config.
pub fn load_noise(path: Option<&PathBuf>) -> Result<Option<NoiseModel>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let model: NoiseModel =
                serde_json::from_str(&text).map_err(|e| Error::MalformedImage {
                    format: "noise JSON",
                    reason: e.to_string(),
                })?;
            Ok(Some(model))
        }
    }
}

/// Parse "RxC" block dimensions, e.g. "2x2".
pub fn parse_blocks(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RxC, got {s:?}"))?;
    let rows = r.trim().parse().map_err(|_| format!("bad rows in {s:?}"))?;
    let cols = c.trim().parse().map_err(|_| format!("bad cols in {s:?}"))?;
    if rows == 0 || cols == 0 {
        return Err(format!("block dimensions must be positive, got {s:?}"));
    }
    Ok((rows, cols))
}

/// Parse an index list such as "0,3,7" or "0..9" (ranges are inclusive);
/// forms can be mixed with commas.
pub fn parse_indices(spec: &str) -> std::result::Result<Vec<usize>, String> {
    let mut indices = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once("..") {
            let start: usize = a.trim().parse().map_err(|_| format!("bad range {part:?}"))?;
            let end: usize = b
                .trim()
                .trim_start_matches('=')
                .trim()
                .parse()
                .map_err(|_| format!("bad range {part:?}"))?;
            if end < start {
                return Err(format!("empty range {part:?}"));
            }
            indices.extend(start..=end);
        } else {
            indices.push(part.parse().map_err(|_| format!("bad index {part:?}"))?);
        }
    }
    if indices.is_empty() {
        return Err("no indices given".into());
    }
    Ok(indices)
}

/// Write to the path atomically (temp file + rename), or to stdout when no
/// path is given.
pub fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, content)?;
            fs::rename(&tmp, p)?;
            Ok(())
        }
    }
}

/// Shots to request: 0 (exact) when `--exact` is set.
pub fn effective_shots(exact: bool, shots: u64) -> u64 {
    if exact {
        0
    } else {
        shots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_spec_parsing() {
        assert_eq!(parse_blocks("2x2").unwrap(), (2, 2));
        assert_eq!(parse_blocks("4X8").unwrap(), (4, 8));
        assert!(parse_blocks("2").is_err());
        assert!(parse_blocks("0x2").is_err());
        assert!(parse_blocks("ax2").is_err());
    }

    #[test]
    fn index_spec_parsing() {
        assert_eq!(parse_indices("0..9").unwrap(), (0..=9).collect::<Vec<_>>());
        assert_eq!(parse_indices("3,5,1").unwrap(), vec![3, 5, 1]);
        assert_eq!(parse_indices("0..=2,7").unwrap(), vec![0, 1, 2, 7]);
        assert!(parse_indices("").is_err());
        assert!(parse_indices("5..2").is_err());
    }
}
