//! Train/test evaluation of a band subset.
//!
//! Labeled pixels are split at random (optionally per class), features are
//! standardized with training statistics, and a [`Classifier`] is scored on
//! the held-out pixels. [`NearestCentroid`] is the built-in classifier.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cube::{GroundTruth, HyperCube};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.5,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::validation(
                "train_fraction",
                format!("{} not in (0, 1)", self.train_fraction),
            ));
        }
        Ok(())
    }
}

/// Pixel indices (row-major) of each side, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub warnings: Vec<String>,
}

fn train_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Splits the labeled pixels of `gt` into disjoint train and test sets.
///
/// Under stratification every class with at least two pixels lands on both
/// sides; a class with a single pixel goes to training and a warning is
/// recorded.
pub fn split_labeled(gt: &GroundTruth, spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let labeled: Vec<usize> = (0..gt.labels().len())
        .filter(|&p| gt.labels()[p] != 0)
        .collect();
    if labeled.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 labeled pixels, found {}",
            labeled.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut warnings = Vec::new();

    if spec.stratified {
        let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &p in &labeled {
            by_class.entry(gt.labels()[p]).or_default().push(p);
        }
        for (class, mut pixels) in by_class {
            if pixels.len() == 1 {
                warnings.push(format!(
                    "class {class} has a single labeled pixel; kept for training"
                ));
                train.extend(pixels);
                continue;
            }
            pixels.shuffle(&mut rng);
            let k = train_count(pixels.len(), spec.train_fraction);
            train.extend_from_slice(&pixels[..k]);
            test.extend_from_slice(&pixels[k..]);
        }
    } else {
        let mut pixels = labeled;
        pixels.shuffle(&mut rng);
        let k = train_count(pixels.len(), spec.train_fraction);
        test = pixels.split_off(k);
        train = pixels;
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        test,
        warnings,
    })
}

/// A supervised classifier over standardized feature vectors.
pub trait Classifier: Sync {
    fn fit(&mut self, samples: &[Vec<f64>], labels: &[u32]) -> Result<()>;
    fn predict(&self, sample: &[f64]) -> u32;
}

/// Assigns the class whose training centroid is nearest in Euclidean
/// distance. Exact ties go to the class with more training pixels, then to
/// the lower label.
#[derive(Clone, Debug, Default)]
pub struct NearestCentroid {
    classes: Vec<(u32, usize, Vec<f64>)>,
}

impl Classifier for NearestCentroid {
    fn fit(&mut self, samples: &[Vec<f64>], labels: &[u32]) -> Result<()> {
        if samples.is_empty() || samples.len() != labels.len() {
            return Err(Error::Degenerate("no training samples".into()));
        }
        let dim = samples[0].len();
        let mut sums: BTreeMap<u32, (usize, Vec<f64>)> = BTreeMap::new();
        for (x, &y) in samples.iter().zip(labels) {
            let (n, acc) = sums.entry(y).or_insert_with(|| (0, vec![0.0; dim]));
            *n += 1;
            for (a, v) in acc.iter_mut().zip(x) {
                *a += v;
            }
        }
        self.classes = sums
            .into_iter()
            .map(|(label, (n, acc))| (label, n, acc.into_iter().map(|s| s / n as f64).collect()))
            .collect();
        Ok(())
    }

    fn predict(&self, sample: &[f64]) -> u32 {
        let mut best: Option<(f64, usize, u32)> = None;
        for (label, count, centroid) in &self.classes {
            let d: f64 = centroid
                .iter()
                .zip(sample)
                .map(|(c, x)| (c - x) * (c - x))
                .sum();
            let better = match best {
                None => true,
                Some((bd, bc, _)) => d < bd || (d == bd && *count > bc),
            };
            if better {
                best = Some((d, *count, *label));
            }
        }
        best.map(|(_, _, label)| label).unwrap_or(0)
    }
}

/// Per-feature affine map to zero mean, unit variance on the training set.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    /// Fits on training rows. Zero-variance features get scale 1.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Percent of test pixels classified correctly.
    pub overall_accuracy: f64,
    pub per_class_accuracy: BTreeMap<u32, f64>,
    pub per_class_test_count: BTreeMap<u32, usize>,
    pub n_train: usize,
    pub n_test: usize,
    pub bands_used: Vec<usize>,
    pub split: SplitSpec,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Id of the selection run the bands came from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_run: Option<String>,
}

/// Hex prefix of the SHA-256 of the comma-joined band list.
pub fn bands_hash(bands: &[usize]) -> String {
    let joined: Vec<String> = bands.iter().map(usize::to_string).collect();
    let digest = Sha256::digest(joined.join(",").as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl EvalReport {
    /// Header plus one `bands_hash,n_bands,accuracy` row.
    pub fn to_csv(&self) -> String {
        format!(
            "bands_hash,n_bands,accuracy\n{},{},{}\n",
            bands_hash(&self.bands_used),
            self.bands_used.len(),
            self.overall_accuracy
        )
    }
}

fn features(cube: &HyperCube, bands: &[usize], pixel: usize) -> Vec<f64> {
    let n = cube.n_pixels();
    bands
        .iter()
        .map(|&b| f64::from(cube.samples()[b * n + pixel]))
        .collect()
}

/// Scores `bands` with the built-in nearest-centroid classifier.
pub fn evaluate_subset(
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    spec: &SplitSpec,
) -> Result<EvalReport> {
    evaluate_with(&mut NearestCentroid::default(), cube, gt, bands, spec)
}

/// Scores `bands` with any classifier.
pub fn evaluate_with<C: Classifier>(
    classifier: &mut C,
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    spec: &SplitSpec,
) -> Result<EvalReport> {
    if bands.is_empty() {
        return Err(Error::validation("bands", "empty band list"));
    }
    if let Some(&band) = bands.iter().find(|&&b| b >= cube.n_bands()) {
        return Err(Error::BandOutOfRange {
            band,
            n_bands: cube.n_bands(),
        });
    }
    if cube.dims() != gt.dims() {
        return Err(Error::mismatch(cube.dims(), gt.dims()));
    }
    if gt.labeled_count() == 0 {
        return Err(Error::Degenerate("no labeled pixels".into()));
    }
    let split = split_labeled(gt, spec)?;
    if split.test.is_empty() {
        return Err(Error::Degenerate("no test pixels after split".into()));
    }

    let raw_train: Vec<Vec<f64>> = split
        .train
        .iter()
        .map(|&p| features(cube, bands, p))
        .collect();
    let standardizer = Standardizer::fit(&raw_train);
    let train: Vec<Vec<f64>> = raw_train.iter().map(|r| standardizer.apply(r)).collect();
    let train_labels: Vec<u32> = split.train.iter().map(|&p| gt.labels()[p]).collect();
    classifier.fit(&train, &train_labels)?;

    let predictions: Vec<u32> = {
        let clf = &*classifier;
        split
            .test
            .par_iter()
            .map(|&p| clf.predict(&standardizer.apply(&features(cube, bands, p))))
            .collect()
    };

    let mut hits: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (&p, &predicted) in split.test.iter().zip(&predictions) {
        let truth = gt.labels()[p];
        let entry = hits.entry(truth).or_default();
        entry.1 += 1;
        if predicted == truth {
            entry.0 += 1;
        }
    }
    let correct: usize = hits.values().map(|h| h.0).sum();
    let n_test = split.test.len();
    Ok(EvalReport {
        overall_accuracy: 100.0 * correct as f64 / n_test as f64,
        per_class_accuracy: hits
            .iter()
            .map(|(&c, &(ok, n))| (c, 100.0 * ok as f64 / n as f64))
            .collect(),
        per_class_test_count: hits.iter().map(|(&c, &(_, n))| (c, n)).collect(),
        n_train: split.train.len(),
        n_test,
        bands_used: bands.to_vec(),
        split: *spec,
        warnings: split.warnings,
        source_run: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::separable_scenario;

    fn stripes(sizes: &[(u32, usize)]) -> GroundTruth {
        let labels: Vec<u32> = sizes
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat_n(c, n))
            .collect();
        GroundTruth::new(labels.len(), 1, labels).unwrap()
    }

    fn spec(seed: u64, stratified: bool) -> SplitSpec {
        SplitSpec {
            train_fraction: 0.5,
            seed,
            stratified,
        }
    }

    #[test]
    fn half_split_of_ten() {
        let gt = stripes(&[(1, 10), (0, 3)]);
        let s = split_labeled(&gt, &spec(3, false)).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (5, 5));
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_seeded() {
        let gt = stripes(&[(1, 20), (2, 20)]);
        assert_eq!(
            split_labeled(&gt, &spec(5, true)).unwrap(),
            split_labeled(&gt, &spec(5, true)).unwrap()
        );
        assert_ne!(
            split_labeled(&gt, &spec(5, true)).unwrap(),
            split_labeled(&gt, &spec(6, true)).unwrap()
        );
    }

    #[test]
    fn stratified_counts() {
        let gt = stripes(&[(1, 6), (2, 4)]);
        let s = split_labeled(&gt, &spec(1, true)).unwrap();
        let train_1 = s.train.iter().filter(|&&p| gt.labels()[p] == 1).count();
        let train_2 = s.train.iter().filter(|&&p| gt.labels()[p] == 2).count();
        assert_eq!((train_1, train_2), (3, 2));
    }

    #[test]
    fn singleton_class_goes_to_train() {
        let gt = stripes(&[(1, 4), (2, 1)]);
        let s = split_labeled(&gt, &spec(0, true)).unwrap();
        assert!(s.train.contains(&4));
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn too_few_labeled() {
        let gt = stripes(&[(0, 4), (1, 1)]);
        assert!(matches!(
            split_labeled(&gt, &spec(0, true)),
            Err(Error::Degenerate(_))
        ));
        let bad = SplitSpec {
            train_fraction: 1.0,
            ..spec(0, true)
        };
        assert!(split_labeled(&stripes(&[(1, 4)]), &bad).is_err());
    }

    #[test]
    fn separable_scene_is_perfect() {
        let (cube, gt) = separable_scenario(16).unwrap();
        let r = evaluate_subset(&cube, &gt, &[0, 2, 4], &SplitSpec::default()).unwrap();
        assert_eq!(r.overall_accuracy, 100.0);
        assert_eq!(r.n_train + r.n_test, gt.labeled_count());
    }

    #[test]
    fn constant_band_predicts_majority() {
        // class 2 is the largest; every test pixel is predicted as class 2
        let gt = stripes(&[(1, 10), (2, 30), (3, 20)]);
        let cube = HyperCube::new(60, 1, 1, vec![700; 60]).unwrap();
        let r = evaluate_subset(&cube, &gt, &[0], &SplitSpec::default()).unwrap();
        let majority = r.per_class_test_count[&2] as f64 / r.n_test as f64 * 100.0;
        assert!((r.overall_accuracy - majority).abs() < 1e-12);
        assert_eq!(r.per_class_accuracy[&2], 100.0);
    }

    #[test]
    fn per_class_aggregates_to_overall() {
        let (cube, gt) = separable_scenario(16).unwrap();
        let r = evaluate_subset(&cube, &gt, &[4], &spec(2, false)).unwrap();
        let weighted: f64 = r
            .per_class_accuracy
            .iter()
            .map(|(c, acc)| acc * r.per_class_test_count[c] as f64)
            .sum::<f64>()
            / r.n_test as f64;
        assert!((weighted - r.overall_accuracy).abs() < 1e-9);
    }

    #[test]
    fn bad_band_lists() {
        let (cube, gt) = separable_scenario(8).unwrap();
        assert!(evaluate_subset(&cube, &gt, &[], &SplitSpec::default()).is_err());
        assert!(matches!(
            evaluate_subset(&cube, &gt, &[6], &SplitSpec::default()),
            Err(Error::BandOutOfRange { band: 6, .. })
        ));
        let unlabeled = GroundTruth::new(8, 8, vec![0; 64]).unwrap();
        assert!(matches!(
            evaluate_subset(&cube, &unlabeled, &[0], &SplitSpec::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn standardizer_handles_constant_feature() {
        let s = Standardizer::fit(&[vec![1.0, 5.0], vec![3.0, 5.0]]);
        assert_eq!(s.apply(&[3.0, 5.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn csv_row() {
        let (cube, gt) = separable_scenario(8).unwrap();
        let r = evaluate_subset(&cube, &gt, &[0, 2, 4], &SplitSpec::default()).unwrap();
        let csv = r.to_csv();
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row, format!("{},3,100", bands_hash(&[0, 2, 4])));
    }
}
