//! Classical images and their QPIE amplitude encoding.
//!
//! A pixel matrix maps onto a quantum state by stacking its columns — the
//! first P amplitudes hold the first column, the next P the second, and so
//! on — then normalizing. Pixel positions become basis indices and pixel
//! values become (real, non-negative) amplitudes.

use crate::error::{Error, Result};
use crate::state::Statevector;

/// A P×Q matrix of non-negative pixel values, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || pixels.len() != rows * cols {
            return Err(Error::MalformedImage {
                format: "matrix",
                reason: format!("{} pixel(s) for a {rows}x{cols} image", pixels.len()),
            });
        }
        for (k, &v) in pixels.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativePixel {
                    row: k / cols,
                    col: k % cols,
                    value: v,
                });
            }
        }
        Ok(Self { rows, cols, pixels })
    }

    /// Build from row slices; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::MalformedImage {
                format: "matrix",
                reason: "empty image".into(),
            });
        }
        let cols = rows[0].len();
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::MalformedImage {
                format: "matrix",
                reason: format!(
                    "row {bad} has {} value(s), expected {cols}",
                    rows[bad].len()
                ),
            });
        }
        Image::new(rows.len(), cols, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn is_all_zero(&self) -> bool {
        self.pixels.iter().all(|&v| v == 0.0)
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Threshold to a 0/1 image: values greater than or equal to the
    /// threshold become 1.
    pub fn binarize(&self, threshold: f64) -> Image {
        Image {
            rows: self.rows,
            cols: self.cols,
            pixels: self
                .pixels
                .iter()
                .map(|&v| if v >= threshold { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Grow each dimension to the next power of two by appending zero rows
    /// at the bottom and zero columns at the right.
    pub fn pad_to_pow2(&self) -> Image {
        let new_rows = self.rows.next_power_of_two();
        let new_cols = self.cols.next_power_of_two();
        if new_rows == self.rows && new_cols == self.cols {
            return self.clone();
        }
        let mut pixels = vec![0.0; new_rows * new_cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                pixels[r * new_cols + c] = self.pixel(r, c);
            }
        }
        Image {
            rows: new_rows,
            cols: new_cols,
            pixels,
        }
    }

    /// Cut the image into a non-overlapping grid of equally sized blocks.
    /// Block dimensions must divide the image and each block's pixel count
    /// must be amplitude-encodable.
    pub fn segment(&self, block_rows: usize, block_cols: usize) -> Result<SegmentGrid> {
        if block_rows == 0
            || block_cols == 0
            || self.rows % block_rows != 0
            || self.cols % block_cols != 0
        {
            return Err(Error::BlocksDontDivide {
                block_rows,
                block_cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let block_pixels = block_rows * block_cols;
        if block_pixels < 2 || !block_pixels.is_power_of_two() {
            return Err(Error::PixelCountNotPowerOfTwo(block_pixels));
        }
        let grid_rows = self.rows / block_rows;
        let grid_cols = self.cols / block_cols;
        let mut blocks = Vec::with_capacity(grid_rows * grid_cols);
        for br in 0..grid_rows {
            for bc in 0..grid_cols {
                let mut pixels = Vec::with_capacity(block_pixels);
                for r in 0..block_rows {
                    for c in 0..block_cols {
                        pixels.push(self.pixel(br * block_rows + r, bc * block_cols + c));
                    }
                }
                blocks.push(Image {
                    rows: block_rows,
                    cols: block_cols,
                    pixels,
                });
            }
        }
        Ok(SegmentGrid {
            grid_rows,
            grid_cols,
            block_rows,
            block_cols,
            blocks,
        })
    }

    /// QPIE-encode: stack columns, normalize, reject the all-zero image.
    pub fn encode_qpie(&self) -> Result<QuantumImage> {
        let count = self.rows * self.cols;
        if count < 2 || !count.is_power_of_two() {
            return Err(Error::PixelCountNotPowerOfTwo(count));
        }
        let mut column_major = Vec::with_capacity(count);
        for c in 0..self.cols {
            for r in 0..self.rows {
                column_major.push(self.pixel(r, c));
            }
        }
        let state = Statevector::from_real_normalized(&column_major)?;
        Ok(QuantumImage {
            n_qubits: state.n_qubits(),
            state,
            source: self.clone(),
        })
    }
}

/// An image together with its normalized amplitude encoding.
#[derive(Debug, Clone)]
pub struct QuantumImage {
    source: Image,
    n_qubits: usize,
    state: Statevector,
}

impl QuantumImage {
    pub fn source(&self) -> &Image {
        &self.source
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    /// Amplitude index of pixel (row, col) under column-major stacking.
    pub fn amplitude_index(&self, row: usize, col: usize) -> usize {
        col * self.source.rows() + row
    }
}

/// Result of [`Image::segment`]: blocks in row-major coordinate order.
#[derive(Debug, Clone)]
pub struct SegmentGrid {
    grid_rows: usize,
    grid_cols: usize,
    block_rows: usize,
    block_cols: usize,
    blocks: Vec<Image>,
}

impl SegmentGrid {
    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    pub fn block(&self, grid_row: usize, grid_col: usize) -> &Image {
        &self.blocks[grid_row * self.grid_cols + grid_col]
    }

    /// Blocks with their grid coordinates, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Image)> {
        self.blocks
            .iter()
            .enumerate()
            .map(move |(k, b)| (k / self.grid_cols, k % self.grid_cols, b))
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Stitch the blocks back into the original image.
    pub fn reassemble(&self) -> Image {
        let rows = self.grid_rows * self.block_rows;
        let cols = self.grid_cols * self.block_cols;
        let mut pixels = vec![0.0; rows * cols];
        for (br, bc, block) in self.iter() {
            for r in 0..self.block_rows {
                for c in 0..self.block_cols {
                    pixels[(br * self.block_rows + r) * cols + bc * self.block_cols + c] =
                        block.pixel(r, c);
                }
            }
        }
        Image { rows, cols, pixels }
    }
}
