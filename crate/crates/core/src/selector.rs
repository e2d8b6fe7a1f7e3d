//! Greedy band selection driven by an estimated reference map.
//!
//! Bands are ranked once by their mutual information with the ground truth.
//! The top band seeds the estimate; each following band is averaged into a
//! candidate estimate, and kept only if the candidate's MI with the ground
//! truth beats the best MI so far by more than the threshold. A rejected band
//! leaves the estimate untouched.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cube::{
    average_images, band_image, quantize_band, GroundTruth, HyperCube, QuantizedImage, RealImage,
};
use crate::error::{Error, Result};
use crate::info::{gt_mask, mutual_information, DiscreteMap, PixelMask};

pub const DEFAULT_BINS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Additive MI gate in bits; negative values admit some redundancy.
    pub threshold: f64,
    pub max_bands: usize,
    pub n_bins: u32,
    pub labeled_only: bool,
    /// Restricts the search to these bands; `None` means every band.
    pub candidate_bands: Option<Vec<usize>>,
}

impl SelectionConfig {
    pub fn new(threshold: f64, max_bands: usize) -> Self {
        SelectionConfig {
            threshold,
            max_bands,
            n_bins: DEFAULT_BINS,
            labeled_only: true,
            candidate_bands: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::validation("threshold", "must be finite"));
        }
        if self.max_bands < 1 {
            return Err(Error::validation("max_bands", "must be at least 1"));
        }
        if self.n_bins < 2 {
            return Err(Error::validation("n_bins", "must be at least 2"));
        }
        Ok(())
    }

    fn candidates(&self, n_bands: usize) -> Result<Vec<usize>> {
        let Some(list) = &self.candidate_bands else {
            return Ok((0..n_bands).collect());
        };
        if list.is_empty() {
            return Err(Error::validation("candidate_bands", "empty candidate set"));
        }
        let mut seen = vec![false; n_bands];
        for &band in list {
            if band >= n_bands {
                return Err(Error::BandOutOfRange { band, n_bands });
            }
            if std::mem::replace(&mut seen[band], true) {
                return Err(Error::validation(
                    "candidate_bands",
                    format!("band {band} listed twice"),
                ));
            }
        }
        Ok(list.clone())
    }
}

/// What bands are scored against.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    Truth(&'a GroundTruth),
    /// A quantized estimate of the reference map, e.g. a band average.
    Estimate(&'a QuantizedImage),
}

impl Reference<'_> {
    fn dims(&self) -> (usize, usize) {
        match self {
            Reference::Truth(gt) => gt.dims(),
            Reference::Estimate(q) => q.dims(),
        }
    }

    fn as_map(&self) -> &(dyn DiscreteMap + Sync) {
        match self {
            Reference::Truth(gt) => *gt,
            Reference::Estimate(q) => *q,
        }
    }

    fn mask(&self, labeled_only: bool) -> Option<PixelMask> {
        match self {
            Reference::Truth(gt) => gt_mask(gt, labeled_only),
            Reference::Estimate(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandScore {
    pub band: usize,
    pub mi_with_gt: f64,
}

/// One examined band: the MI of the candidate estimate and the decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub band: usize,
    pub mi: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub config: SelectionConfig,
    /// Accepted bands in acceptance order; the first is the seed.
    pub selected: Vec<usize>,
    /// Every examined band once, seed first.
    pub trajectory: Vec<TrajectoryEntry>,
    pub final_mi: f64,
}

impl SelectionResult {
    /// Short content hash identifying this result.
    pub fn run_id(&self) -> String {
        let json = serde_json::to_vec(self).expect("selection serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `band,accepted` rows, one per trajectory entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("band,accepted\n");
        for entry in &self.trajectory {
            out.push_str(&format!("{},{}\n", entry.band, entry.accepted));
        }
        out
    }
}

fn check_dims(cube: &HyperCube, other: (usize, usize)) -> Result<()> {
    if cube.dims() != other {
        return Err(Error::mismatch(cube.dims(), other));
    }
    Ok(())
}

/// Scores each candidate band by its MI with the reference, best first.
///
/// Ties are broken by lower band index.
pub fn rank_bands(
    cube: &HyperCube,
    reference: Reference<'_>,
    cfg: &SelectionConfig,
) -> Result<Vec<BandScore>> {
    cfg.validate()?;
    check_dims(cube, reference.dims())?;
    let candidates = cfg.candidates(cube.n_bands())?;
    let mask = reference.mask(cfg.labeled_only);
    let target = reference.as_map();

    let mut scores = candidates
        .par_iter()
        .map(|&band| {
            let q = quantize_band(cube, band, cfg.n_bins)?;
            let mi_with_gt = mutual_information(target, &q, mask.as_ref())?;
            Ok(BandScore { band, mi_with_gt })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(|a, b| {
        b.mi_with_gt
            .total_cmp(&a.mi_with_gt)
            .then(a.band.cmp(&b.band))
    });
    Ok(scores)
}

/// Averages a candidate band into the current estimate.
pub fn build_estimated_reference(prev: &RealImage, band: &RealImage) -> Result<RealImage> {
    let next = average_images(prev, band)?;
    log::trace!("estimate updated over {} pixels", next.values().len());
    Ok(next)
}

fn require_classes(gt: &GroundTruth) -> Result<()> {
    let present = gt.classes_present().len();
    if present < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 labeled classes, found {present}"
        )));
    }
    Ok(())
}

/// Runs the greedy selection against a ground truth.
pub fn select_bands(
    cube: &HyperCube,
    gt: &GroundTruth,
    cfg: &SelectionConfig,
) -> Result<SelectionResult> {
    cfg.validate()?;
    check_dims(cube, gt.dims())?;
    require_classes(gt)?;
    let ranking = rank_bands(cube, Reference::Truth(gt), cfg)?;
    let mask = gt_mask(gt, cfg.labeled_only);
    let mask = mask.as_ref();

    let seed = ranking[0].band;
    let mut estimate = band_image(cube, seed)?;
    let mut best = mutual_information(gt, &estimate.quantize(cfg.n_bins), mask)?;
    let mut selected = vec![seed];
    let mut trajectory = vec![TrajectoryEntry {
        band: seed,
        mi: best,
        accepted: true,
    }];
    log::debug!("seed band {seed}, MI = {best}");

    for score in &ranking[1..] {
        if selected.len() >= cfg.max_bands {
            break;
        }
        let candidate = build_estimated_reference(&estimate, &band_image(cube, score.band)?)?;
        let mi = mutual_information(gt, &candidate.quantize(cfg.n_bins), mask)?;
        let accepted = mi > best + cfg.threshold;
        log::debug!(
            "band {}: MI = {mi} vs {best} + {} -> {}",
            score.band,
            cfg.threshold,
            if accepted { "accept" } else { "reject" }
        );
        if accepted {
            best = mi;
            estimate = candidate;
            selected.push(score.band);
        }
        trajectory.push(TrajectoryEntry {
            band: score.band,
            mi,
            accepted,
        });
    }

    Ok(SelectionResult {
        config: cfg.clone(),
        selected,
        trajectory,
        final_mi: best,
    })
}

/// Runs one selection per threshold, results in input order.
pub fn select_sweep(
    cube: &HyperCube,
    gt: &GroundTruth,
    base: &SelectionConfig,
    thresholds: &[f64],
) -> Result<Vec<SelectionResult>> {
    thresholds
        .par_iter()
        .map(|&threshold| {
            let cfg = SelectionConfig {
                threshold,
                ..base.clone()
            };
            select_bands(cube, gt, &cfg)
        })
        .collect()
}
