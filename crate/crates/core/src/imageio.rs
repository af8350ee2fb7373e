//! Image ingestion: whitespace-separated matrix text, PGM (ASCII P2 and
//! binary P5, maxval up to 65535) and MNIST IDX image files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

/// Magic number of an IDX file holding unsigned-byte images.
pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// Whitespace-separated reals, one row per line.
    MatrixText,
    /// Portable graymap, P2 or P5.
    Pgm,
    /// MNIST-style IDX file; loads the image at `index`.
    MnistIdx { index: usize },
}

/// Load one image from a file in the given format. Pixel values are kept
/// as stored (greys in 0..=maxval, IDX bytes in 0..=255, text as parsed).
pub fn load_image(path: &Path, format: ImageFormat) -> Result<Image> {
    match format {
        ImageFormat::MatrixText => parse_matrix_text(&fs::read_to_string(path)?),
        ImageFormat::Pgm => parse_pgm(&fs::read(path)?),
        ImageFormat::MnistIdx { index } => {
            Ok(load_idx_images(path, &[index])?.pop().expect("one index"))
        }
    }
}

/// Load several images from an IDX file in one pass.
pub fn load_idx_images(path: &Path, indices: &[usize]) -> Result<Vec<Image>> {
    let bytes = fs::read(path)?;
    parse_idx_images(&bytes, indices)
}

/// Number of images stored in an IDX file.
pub fn idx_image_count(path: &Path) -> Result<usize> {
    let bytes = fs::read(path)?;
    let (count, _, _) = idx_header(&bytes)?;
    Ok(count)
}

pub fn parse_matrix_text(text: &str) -> Result<Image> {
    let malformed = |reason: String| Error::MalformedImage {
        format: "matrix-text",
        reason,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| malformed(format!("bad number {tok:?} on line {}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if !values.is_empty() {
            rows.push(values);
        }
    }
    if rows.is_empty() {
        return Err(malformed("no rows".into()));
    }
    let cols = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(malformed(format!(
            "row {} has {} value(s), expected {cols}",
            bad + 1,
            rows[bad].len()
        )));
    }
    Image::from_rows(&rows)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let malformed = |reason: &str| Error::MalformedImage {
        format: "PGM",
        reason: reason.into(),
    };
    let mut pos = 0usize;
    let magic = next_header_token(bytes, &mut pos).ok_or_else(|| malformed("missing magic"))?;
    if magic != "P2" && magic != "P5" {
        return Err(malformed("magic must be P2 or P5"));
    }
    let mut dims = [0usize; 3];
    for slot in &mut dims {
        let tok = next_header_token(bytes, &mut pos).ok_or_else(|| malformed("truncated header"))?;
        *slot = tok
            .parse()
            .map_err(|_| malformed("non-numeric header field"))?;
    }
    let [width, height, maxval] = dims;
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed("maxval must be in 1..=65535"));
    }

    let count = width * height;
    let pixels = if magic == "P2" {
        let mut pixels = Vec::with_capacity(count);
        while pixels.len() < count {
            let tok =
                next_header_token(bytes, &mut pos).ok_or_else(|| malformed("truncated raster"))?;
            let v: usize = tok.parse().map_err(|_| malformed("non-numeric sample"))?;
            if v > maxval {
                return Err(malformed("sample exceeds maxval"));
            }
            pixels.push(v as f64);
        }
        pixels
    } else {
        // P5: the header ends after exactly one whitespace byte, already
        // consumed by the tokenizer; what follows is the binary raster.
        let wide = maxval > 255;
        let sample_len = if wide { 2 } else { 1 };
        let raster = &bytes[pos..];
        if raster.len() < count * sample_len {
            return Err(malformed("truncated raster"));
        }
        let mut pixels = Vec::with_capacity(count);
        for k in 0..count {
            let v = if wide {
                u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]]) as usize
            } else {
                raster[k] as usize
            };
            if v > maxval {
                return Err(malformed("sample exceeds maxval"));
            }
            pixels.push(v as f64);
        }
        pixels
    };
    Image::new(height, width, pixels)
}

/// Scan the next whitespace-delimited token, skipping '#' comments, and
/// leave `pos` one byte past the single whitespace that ends it.
fn next_header_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    // Skip whitespace and comment lines.
    while *pos < bytes.len() {
        let b = bytes[*pos];
        if b == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else if b.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return None;
    }
    let token = String::from_utf8_lossy(&bytes[start..*pos]).into_owned();
    if *pos < bytes.len() {
        *pos += 1; // consume the single terminating whitespace byte
    }
    Some(token)
}

fn idx_header(bytes: &[u8]) -> Result<(usize, usize, usize)> {
    let malformed = |reason: &str| Error::MalformedImage {
        format: "IDX",
        reason: reason.into(),
    };
    if bytes.len() < 16 {
        return Err(malformed("file shorter than the 16-byte header"));
    }
    let word = |k: usize| u32::from_be_bytes(bytes[4 * k..4 * k + 4].try_into().unwrap());
    if word(0) != IDX_IMAGE_MAGIC {
        return Err(malformed("magic is not 0x00000803"));
    }
    Ok((word(1) as usize, word(2) as usize, word(3) as usize))
}

fn parse_idx_images(bytes: &[u8], indices: &[usize]) -> Result<Vec<Image>> {
    let (count, rows, cols) = idx_header(bytes)?;
    let image_len = rows * cols;
    if bytes.len() < 16 + count * image_len {
        return Err(Error::MalformedImage {
            format: "IDX",
            reason: format!("payload shorter than {count} {rows}x{cols} image(s)"),
        });
    }
    indices
        .iter()
        .map(|&index| {
            if index >= count {
                return Err(Error::ImageIndexOutOfRange { index, count });
            }
            let start = 16 + index * image_len;
            let pixels = bytes[start..start + image_len]
                .iter()
                .map(|&b| b as f64)
                .collect();
            Image::new(rows, cols, pixels)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_bytes(images: &[[u8; 4]]) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IDX_IMAGE_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        for img in images {
            bytes.extend_from_slice(img);
        }
        bytes
    }

    #[test]
    fn parses_ascii_pgm() {
        let img = parse_pgm(b"P2 2 2 255\n0 255 0 255\n").unwrap();
        assert_eq!((img.rows(), img.cols()), (2, 2));
        assert_eq!(img.pixels(), &[0.0, 255.0, 0.0, 255.0]);
    }

    #[test]
    fn parses_binary_pgm_with_comment() {
        let mut bytes = b"P5\n# test image\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 128, 255, 64]);
        let img = parse_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0.0, 128.0, 255.0, 64.0]);
    }

    #[test]
    fn parses_two_byte_samples() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&1000u16.to_be_bytes());
        bytes.extend_from_slice(&65535u16.to_be_bytes());
        let img = parse_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[1000.0, 65535.0]);
    }

    #[test]
    fn rejects_malformed_pgm() {
        assert!(parse_pgm(b"P3 2 2 255\n0 0 0 0").is_err());
        assert!(parse_pgm(b"P2 2 2\n0 0").is_err());
        assert!(parse_pgm(b"P2 2 2 255\n0 0 0").is_err());
        assert!(parse_pgm(b"P2 2 2 70000\n0 0 0 0").is_err());
        let mut truncated = b"P5 2 2 255\n".to_vec();
        truncated.extend_from_slice(&[1, 2, 3]);
        assert!(parse_pgm(&truncated).is_err());
    }

    #[test]
    fn parses_matrix_text() {
        let img = parse_matrix_text("0 1.5 2\n3 4 5.25\n").unwrap();
        assert_eq!((img.rows(), img.cols()), (2, 3));
        assert_eq!(img.pixel(1, 2), 5.25);
    }

    #[test]
    fn rejects_ragged_matrix_text() {
        assert!(matches!(
            parse_matrix_text("1 2 3\n4 5\n"),
            Err(Error::MalformedImage { .. })
        ));
        assert!(parse_matrix_text("").is_err());
        assert!(parse_matrix_text("1 x 3\n").is_err());
    }

    #[test]
    fn idx_selects_the_requested_image() {
        let bytes = idx_bytes(&[[0, 1, 2, 3], [10, 20, 30, 40]]);
        let images = parse_idx_images(&bytes, &[1, 0]).unwrap();
        assert_eq!(images[0].pixels(), &[10.0, 20.0, 30.0, 40.0]);
        assert_eq!(images[1].pixels(), &[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(
            parse_idx_images(&bytes, &[2]),
            Err(Error::ImageIndexOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn idx_rejects_bad_magic_and_truncation() {
        let mut bytes = idx_bytes(&[[0, 1, 2, 3]]);
        bytes[3] = 0x01; // label magic instead of image magic
        assert!(parse_idx_images(&bytes, &[0]).is_err());

        let mut short = idx_bytes(&[[0, 1, 2, 3]]);
        short.truncate(18);
        assert!(parse_idx_images(&short, &[0]).is_err());
    }

    #[test]
    fn load_image_reads_files() {
        let dir = std::env::temp_dir().join("qoverlap-imageio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let pgm = dir.join("t.pgm");
        std::fs::write(&pgm, b"P2 2 2 9\n1 2 3 4\n").unwrap();
        let img = load_image(&pgm, ImageFormat::Pgm).unwrap();
        assert_eq!(img.pixels(), &[1.0, 2.0, 3.0, 4.0]);

        let idx = dir.join("t.idx");
        std::fs::write(&idx, idx_bytes(&[[9, 8, 7, 6]])).unwrap();
        let img = load_image(&idx, ImageFormat::MnistIdx { index: 0 }).unwrap();
        assert_eq!(img.pixels(), &[9.0, 8.0, 7.0, 6.0]);
        assert_eq!(idx_image_count(&idx).unwrap(), 1);
        std::fs::remove_dir_all(&dir).ok();
    }
}
