//! The experiment layer: full-image and segment-wise comparisons, the
//! average-overlap score, block skipping and run statistics.
//!
//! Segment-wise comparison runs the chosen protocol only on coordinate
//! pairs where both blocks have at least one nonzero pixel; all-blank
//! blocks cannot be amplitude-encoded. The per-run score is
//! I_avg = Σ (non-skipped segment overlaps) / max{N₁, N₂} with N₁, N₂ the
//! nonzero-block counts of the two images. Means and standard deviations
//! aggregate per-run scores, not per-segment ones.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{Image, QuantumImage};
use crate::noise::NoiseModel;
use crate::overlap::{estimate_overlap, OverlapResult, Protocol};

/// How a comparison was executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonMode {
    Full,
    Segmented,
}

/// Execution settings shared by the comparison experiments.
///
/// `shots == 0` selects exact probability evaluation. Run j of a repeated
/// experiment derives its sampling seed as `seed + j` (and the noise model
/// seed the same way), so repeated runs differ while the whole experiment
/// stays reproducible.
#[derive(Debug, Clone)]
pub struct CompareSettings {
    pub protocol: Protocol,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
    pub runs: u32,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            protocol: Protocol::Destructive,
            shots: 8192,
            seed: 0,
            noise: None,
            runs: 100,
        }
    }
}

impl CompareSettings {
    pub fn exact(protocol: Protocol) -> Self {
        Self {
            protocol,
            shots: 0,
            seed: 0,
            noise: None,
            runs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::ZeroRuns);
        }
        if self.shots == 0 && self.noise.is_some() {
            return Err(Error::ExactModeWithNoise);
        }
        Ok(())
    }

    /// Noise model and sampling seed for one work unit.
    fn for_unit(&self, unit: u64) -> (Option<NoiseModel>, u64) {
        let noise = self
            .noise
            .as_ref()
            .map(|m| m.with_seed(m.seed().wrapping_add(unit)));
        (noise, self.seed.wrapping_add(unit))
    }
}

/// One entry of a segment-wise comparison: grid coordinates plus either an
/// overlap result or a skip marker (at least one side blank).
#[derive(Debug, Clone, Serialize)]
pub struct SegmentRecord {
    pub grid_row: usize,
    pub grid_col: usize,
    pub skipped: bool,
    pub result: Option<OverlapResult>,
}

/// Outcome of a comparison experiment.
///
/// In segmented mode `i_avg` is the mean of the per-run average overlaps
/// and equals `i_mean`; `per_segment` holds the first run's details.
/// `skipped_pairs` counts coordinate pairs where exactly one block was
/// blank — the error source induced by block skipping.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub mode: ComparisonMode,
    pub protocol: Protocol,
    pub block_dims: Option<(usize, usize)>,
    pub per_segment: Vec<SegmentRecord>,
    pub i_avg: Option<f64>,
    pub i_mean: f64,
    pub i_std: f64,
    pub runs: u32,
    pub shots: u64,
    pub skipped_pairs: usize,
    pub nonzero_blocks_target: Option<usize>,
    pub nonzero_blocks_reference: Option<usize>,
}

impl ComparisonReport {
    /// Ranking score: average overlap in segmented mode, mean overlap in
    /// full mode.
    pub fn score(&self) -> f64 {
        self.i_avg.unwrap_or(self.i_mean)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per segment plus a summary row, under a single header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "kind,grid_row,grid_col,skipped,p_success,raw_fidelity,fidelity,overlap,\
             i_avg,i_mean,i_std,runs,shots,skipped_pairs\n",
        );
        for seg in &self.per_segment {
            match &seg.result {
                Some(r) => out.push_str(&format!(
                    "segment,{},{},{},{},{},{},{},,,,,,\n",
                    seg.grid_row,
                    seg.grid_col,
                    seg.skipped,
                    r.p_success,
                    r.raw_fidelity,
                    r.fidelity,
                    r.overlap,
                )),
                None => out.push_str(&format!(
                    "segment,{},{},{},,,,,,,,,,\n",
                    seg.grid_row, seg.grid_col, seg.skipped,
                )),
            }
        }
        let i_avg = self.i_avg.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "summary,,,,,,,,{},{},{},{},{},{}\n",
            i_avg, self.i_mean, self.i_std, self.runs, self.shots, self.skipped_pairs,
        ));
        out
    }
}

/// Compare two whole images over repeated runs of one protocol.
pub fn compare_full(
    target: &QuantumImage,
    reference: &QuantumImage,
    settings: &CompareSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    if !target.source().same_dims(reference.source()) {
        return Err(Error::ImageDimensionMismatch(
            target.source().rows(),
            target.source().cols(),
            reference.source().rows(),
            reference.source().cols(),
        ));
    }
    let overlaps: Vec<f64> = if settings.shots == 0 {
        let r = estimate_overlap(
            settings.protocol,
            target.state(),
            reference.state(),
            0,
            0,
            None,
        )?;
        vec![r.overlap; settings.runs as usize]
    } else {
        (0..settings.runs as u64)
            .into_par_iter()
            .map(|run| {
                let (noise, seed) = settings.for_unit(run);
                Ok(estimate_overlap(
                    settings.protocol,
                    target.state(),
                    reference.state(),
                    settings.shots,
                    seed,
                    noise.as_ref(),
                )?
                .overlap)
            })
            .collect::<Result<_>>()?
    };
    let (i_mean, i_std) = mean_std(&overlaps);
    Ok(ComparisonReport {
        mode: ComparisonMode::Full,
        protocol: settings.protocol,
        block_dims: None,
        per_segment: Vec::new(),
        i_avg: None,
        i_mean,
        i_std,
        runs: settings.runs,
        shots: settings.shots,
        skipped_pairs: 0,
        nonzero_blocks_target: None,
        nonzero_blocks_reference: None,
    })
}

/// Number of blocks with at least one nonzero pixel.
pub fn count_nonzero_blocks(img: &Image, block_rows: usize, block_cols: usize) -> Result<usize> {
    Ok(img
        .segment(block_rows, block_cols)?
        .iter()
        .filter(|(_, _, b)| !b.is_all_zero())
        .count())
}

/// Segment-wise comparison producing the average overlap score.
pub fn compare_segmented(
    target: &Image,
    reference: &Image,
    block_rows: usize,
    block_cols: usize,
    settings: &CompareSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    if !target.same_dims(reference) {
        return Err(Error::ImageDimensionMismatch(
            target.rows(),
            target.cols(),
            reference.rows(),
            reference.cols(),
        ));
    }
    let target_grid = target.segment(block_rows, block_cols)?;
    let reference_grid = reference.segment(block_rows, block_cols)?;
    let n_target = target_grid
        .iter()
        .filter(|(_, _, b)| !b.is_all_zero())
        .count();
    let n_reference = reference_grid
        .iter()
        .filter(|(_, _, b)| !b.is_all_zero())
        .count();
    if n_target == 0 && n_reference == 0 {
        return Err(Error::UndefinedScore);
    }
    let denominator = n_target.max(n_reference) as f64;

    // Encode each active pair once; blanks on either side are skipped.
    let mut active: Vec<(usize, usize, QuantumImage, QuantumImage)> = Vec::new();
    let mut records_template: Vec<SegmentRecord> = Vec::new();
    let mut skipped_pairs = 0usize;
    for (gr, gc, t_block) in target_grid.iter() {
        let r_block = reference_grid.block(gr, gc);
        let t_zero = t_block.is_all_zero();
        let r_zero = r_block.is_all_zero();
        if !t_zero && !r_zero {
            active.push((gr, gc, t_block.encode_qpie()?, r_block.encode_qpie()?));
            records_template.push(SegmentRecord {
                grid_row: gr,
                grid_col: gc,
                skipped: false,
                result: None,
            });
        } else {
            if t_zero != r_zero {
                skipped_pairs += 1;
            }
            records_template.push(SegmentRecord {
                grid_row: gr,
                grid_col: gc,
                skipped: true,
                result: None,
            });
        }
    }

    let pairs = active.len() as u64;
    let run_score = |run: u64| -> Result<(f64, Vec<OverlapResult>)> {
        let results: Vec<OverlapResult> = active
            .iter()
            .enumerate()
            .map(|(k, (_, _, t, r))| {
                let (noise, seed) = settings.for_unit(run * pairs + k as u64);
                estimate_overlap(
                    settings.protocol,
                    t.state(),
                    r.state(),
                    settings.shots,
                    seed,
                    noise.as_ref(),
                )
            })
            .collect::<Result<_>>()?;
        let sum: f64 = results.iter().map(|r| r.overlap).sum();
        Ok((sum / denominator, results))
    };

    let (scores, first_run_results) = if settings.shots == 0 {
        let (score, results) = run_score(0)?;
        (vec![score; settings.runs as usize], results)
    } else {
        let per_run: Vec<(f64, Vec<OverlapResult>)> = (0..settings.runs as u64)
            .into_par_iter()
            .map(run_score)
            .collect::<Result<_>>()?;
        let scores = per_run.iter().map(|(s, _)| *s).collect();
        let first = per_run.into_iter().next().expect("runs >= 1").1;
        (scores, first)
    };

    let mut per_segment = records_template;
    for (record_slot, result) in per_segment
        .iter_mut()
        .filter(|s| !s.skipped)
        .zip(first_run_results)
    {
        record_slot.result = Some(result);
    }

    let (i_mean, i_std) = mean_std(&scores);
    Ok(ComparisonReport {
        mode: ComparisonMode::Segmented,
        protocol: settings.protocol,
        block_dims: Some((block_rows, block_cols)),
        per_segment,
        i_avg: Some(i_mean),
        i_mean,
        i_std,
        runs: settings.runs,
        shots: settings.shots,
        skipped_pairs,
        nonzero_blocks_target: Some(n_target),
        nonzero_blocks_reference: Some(n_reference),
    })
}

/// Score every reference against the target and order them best first.
/// Ties break toward the smaller reference id. All references reuse the
/// same base seed (common random numbers), keeping rankings reproducible.
pub fn rank_references(
    target: &Image,
    references: &[Image],
    block_dims: Option<(usize, usize)>,
    settings: &CompareSettings,
) -> Result<Vec<(usize, f64)>> {
    if references.is_empty() {
        return Err(Error::EmptyReferences);
    }
    let target_encoded = match block_dims {
        None => Some(target.encode_qpie()?),
        Some(_) => None,
    };
    let mut scored: Vec<(usize, f64)> = references
        .iter()
        .enumerate()
        .map(|(id, reference)| {
            let report = match block_dims {
                Some((br, bc)) => compare_segmented(target, reference, br, bc, settings)?,
                None => compare_full(
                    target_encoded.as_ref().expect("encoded above"),
                    &reference.encode_qpie()?,
                    settings,
                )?,
            };
            Ok((id, report.score()))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|(id_a, score_a), (id_b, score_b)| {
        score_b
            .partial_cmp(score_a)
            .expect("scores are finite")
            .then(id_a.cmp(id_b))
    });
    Ok(scored)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
