//! Histogram estimators of entropy and mutual information, plus Fano bounds.
//!
//! All quantities are in bits and use raw empirical frequencies. Mutual
//! information sums its per-cell terms in sorted order, so a histogram and
//! its transpose give bitwise identical results, as do two histograms whose
//! cells differ only by a relabeling of either variable.

use serde::{Deserialize, Serialize};

use crate::cube::{GroundTruth, QuantizedImage};
use crate::error::{Error, Result};

/// A per-pixel discrete variable over the alphabet `0..alphabet_size()`.
pub trait DiscreteMap {
    fn dims(&self) -> (usize, usize);
    fn symbols(&self) -> &[u32];
    fn alphabet_size(&self) -> usize;
}

impl DiscreteMap for GroundTruth {
    fn dims(&self) -> (usize, usize) {
        GroundTruth::dims(self)
    }

    fn symbols(&self) -> &[u32] {
        self.labels()
    }

    fn alphabet_size(&self) -> usize {
        self.n_classes() as usize + 1
    }
}

impl DiscreteMap for QuantizedImage {
    fn dims(&self) -> (usize, usize) {
        QuantizedImage::dims(self)
    }

    fn symbols(&self) -> &[u32] {
        self.bins()
    }

    fn alphabet_size(&self) -> usize {
        self.n_bins() as usize
    }
}

/// Pixel predicate restricting which pixels enter a histogram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    keep: Vec<bool>,
}

impl PixelMask {
    pub fn new(width: usize, height: usize, keep: Vec<bool>) -> Result<Self> {
        if keep.len() != width * height {
            return Err(Error::validation(
                "mask",
                format!("expected {} entries, got {}", width * height, keep.len()),
            ));
        }
        Ok(PixelMask {
            width,
            height,
            keep,
        })
    }

    /// Keeps pixels whose label is nonzero.
    pub fn labeled(gt: &GroundTruth) -> Self {
        PixelMask {
            width: gt.width(),
            height: gt.height(),
            keep: gt.labels().iter().map(|&l| l != 0).collect(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn keeps(&self, pixel: usize) -> bool {
        self.keep[pixel]
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

/// The mask used when a ground truth takes part in an estimate.
pub fn gt_mask(gt: &GroundTruth, labeled_only: bool) -> Option<PixelMask> {
    labeled_only.then(|| PixelMask::labeled(gt))
}

/// Co-occurrence counts of two discrete maps, rows indexed by the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointHistogram {
    n_a: usize,
    n_b: usize,
    counts: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    /// Builds a histogram from a dense row-major count matrix.
    pub fn from_counts(n_a: usize, n_b: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n_a * n_b {
            return Err(Error::validation(
                "counts",
                format!("expected {} cells, got {}", n_a * n_b, counts.len()),
            ));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(JointHistogram {
            n_a,
            n_b,
            counts,
            total,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.n_b + b]
    }

    pub fn marginal_a(&self) -> Vec<u64> {
        self.counts
            .chunks(self.n_b)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n_b];
        for row in self.counts.chunks(self.n_b) {
            for (acc, &c) in out.iter_mut().zip(row) {
                *acc += c;
            }
        }
        out
    }

    pub fn transpose(&self) -> JointHistogram {
        let mut counts = vec![0u64; self.counts.len()];
        for a in 0..self.n_a {
            for b in 0..self.n_b {
                counts[b * self.n_a + a] = self.count(a, b);
            }
        }
        JointHistogram {
            n_a: self.n_b,
            n_b: self.n_a,
            counts,
            total: self.total,
        }
    }

    /// `I(A;B) = sum p(a,b) log2(p(a,b) / (p(a) p(b)))`, clamped at zero.
    pub fn mutual_information(&self) -> f64 {
        let rows = self.marginal_a();
        let cols = self.marginal_b();
        let n = self.total as f64;
        let mut terms = Vec::new();
        for (a, row) in self.counts.chunks(self.n_b).enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                let ratio = (c * n) / (rows[a] as f64 * cols[b] as f64);
                terms.push(c / n * ratio.log2());
            }
        }
        sorted_sum(terms).max(0.0)
    }

    pub fn joint_entropy(&self) -> f64 {
        entropy_of(&self.counts, self.total)
    }
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

fn entropy_of(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    let terms = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .collect();
    sorted_sum(terms)
}

/// Counts pixel pairs `(a, b)` over the pixels the mask keeps.
pub fn joint_histogram<A, B>(a: &A, b: &B, mask: Option<&PixelMask>) -> Result<JointHistogram>
where
    A: DiscreteMap + ?Sized,
    B: DiscreteMap + ?Sized,
{
    if a.dims() != b.dims() {
        return Err(Error::mismatch(a.dims(), b.dims()));
    }
    if let Some(mask) = mask {
        if mask.dims() != a.dims() {
            return Err(Error::mismatch(mask.dims(), a.dims()));
        }
    }
    let (n_a, n_b) = (a.alphabet_size(), b.alphabet_size());
    let mut counts = vec![0u64; n_a * n_b];
    let mut total = 0u64;
    for (pixel, (&x, &y)) in a.symbols().iter().zip(b.symbols()).enumerate() {
        if mask.is_some_and(|m| !m.keeps(pixel)) {
            continue;
        }
        counts[x as usize * n_b + y as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(JointHistogram {
        n_a,
        n_b,
        counts,
        total,
    })
}

/// Shannon entropy in bits of an empirical count vector.
pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Degenerate(
            "entropy of an all-zero count vector".into(),
        ));
    }
    Ok(entropy_of(counts, total))
}

/// Mutual information in bits between two discrete maps.
pub fn mutual_information<A, B>(a: &A, b: &B, mask: Option<&PixelMask>) -> Result<f64>
where
    A: DiscreteMap + ?Sized,
    B: DiscreteMap + ?Sized,
{
    Ok(joint_histogram(a, b, mask)?.mutual_information())
}

/// `H(C|X) = H(C) - I(C;X)`, clamped at zero.
pub fn conditional_entropy(
    c: &GroundTruth,
    x: &QuantizedImage,
    mask: Option<&PixelMask>,
) -> Result<f64> {
    let hist = joint_histogram(c, x, mask)?;
    let h_c = entropy(&hist.marginal_a())?;
    Ok((h_c - hist.mutual_information()).max(0.0))
}

/// Fano-style bounds on the classification error probability.
///
/// `upper` divides by `log2(2) = 1`, so it equals `h_c_given_x`; callers who
/// prefer another normalization can rescale from the raw entropies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanoBounds {
    pub h_c: f64,
    pub h_c_given_x: f64,
    pub mi: f64,
    pub n_classes: usize,
    pub lower: f64,
    pub upper: f64,
}

impl FanoBounds {
    pub fn from_entropies(h_c: f64, mi: f64, n_classes: usize) -> Result<Self> {
        if n_classes < 2 {
            return Err(Error::Degenerate(format!(
                "Fano bounds need at least 2 classes, found {n_classes}"
            )));
        }
        let h_c_given_x = (h_c - mi).max(0.0);
        let lower = ((h_c_given_x - 1.0) / (n_classes as f64).log2()).max(0.0);
        Ok(FanoBounds {
            h_c,
            h_c_given_x,
            mi,
            n_classes,
            lower,
            upper: h_c_given_x,
        })
    }
}

/// Fano bounds for predicting `c` from `x`.
///
/// The class count is the number of distinct labels among the masked pixels.
pub fn fano_bounds(
    c: &GroundTruth,
    x: &QuantizedImage,
    mask: Option<&PixelMask>,
) -> Result<FanoBounds> {
    let hist = joint_histogram(c, x, mask).map_err(|e| match e {
        Error::EmptyMask => Error::Degenerate("no labeled pixels".into()),
        other => other,
    })?;
    let marginal = hist.marginal_a();
    let present = marginal.iter().filter(|&&n| n > 0).count();
    FanoBounds::from_entropies(entropy(&marginal)?, hist.mutual_information(), present)
}
