//! Synthetic ground truths and class-indicator bands.
//!
//! The `table1` scene mirrors the three-band redundancy experiment: band A
//! lights up class 11, band B class 14, and band C both of them. Fill values
//! are far apart so 256-bin quantization never merges two region values,
//! which keeps the redundancy equalities exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{GroundTruth, HyperCube, RealImage};
use crate::error::{Error, Result};
use crate::info::entropy;

pub const CLASS_A: u32 = 11;
pub const CLASS_B: u32 = 14;
pub const FILL_A: f64 = 1000.0;
pub const FILL_B: f64 = 3000.0;

/// An axis-aligned rectangle of pixels carrying one label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub label: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub n_classes: u32,
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default)]
    pub noise_seed: Option<u64>,
    #[serde(default)]
    pub noise_amplitude: f64,
}

impl SceneSpec {
    /// A `size x size` scene with columns for classes 11 (40%), 14 (20%),
    /// 2 and 5; the bottom eighth of the class-5 strip is unlabeled.
    pub fn table1(size: usize) -> Result<Self> {
        if size < 8 {
            return Err(Error::validation("size", "table1 scene needs size >= 8"));
        }
        let cut = |num: usize| size * num / 5;
        let column = |from: usize, to: usize, rows: usize, label: u32| Region {
            x: from,
            y: 0,
            width: to - from,
            height: rows,
            label,
        };
        Ok(SceneSpec {
            width: size,
            height: size,
            n_classes: 16,
            regions: vec![
                column(0, cut(2), size, CLASS_A),
                column(cut(2), cut(3), size, CLASS_B),
                column(cut(3), cut(4), size, 2),
                column(cut(4), size, size * 7 / 8, 5),
            ],
            noise_seed: None,
            noise_amplitude: 0.0,
        })
    }

    /// Four equal quadrants labeled 1 (top left) to 4 (bottom right).
    pub fn quadrants(size: usize) -> Result<Self> {
        if size < 2 || !size.is_multiple_of(2) {
            return Err(Error::validation(
                "size",
                "quadrant scene needs an even size >= 2",
            ));
        }
        let half = size / 2;
        let quad = |x: usize, y: usize, label: u32| Region {
            x,
            y,
            width: half,
            height: half,
            label,
        };
        Ok(SceneSpec {
            width: size,
            height: size,
            n_classes: 4,
            regions: vec![
                quad(0, 0, 1),
                quad(half, 0, 2),
                quad(0, half, 3),
                quad(half, half, 4),
            ],
            noise_seed: None,
            noise_amplitude: 0.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation(
                "size",
                "scene dimensions must be positive",
            ));
        }
        if !(self.noise_amplitude >= 0.0 && self.noise_amplitude.is_finite()) {
            return Err(Error::validation(
                "noise_amplitude",
                "must be finite and nonnegative",
            ));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.x + r.width > self.width || r.y + r.height > self.height {
                return Err(Error::validation(
                    format!("regions[{i}]"),
                    "extends past the scene bounds",
                ));
            }
            if r.label > self.n_classes {
                return Err(Error::validation(
                    format!("regions[{i}]"),
                    format!("label {} exceeds n_classes {}", r.label, self.n_classes),
                ));
            }
        }
        Ok(())
    }
}

/// Paints the regions of `spec`; unassigned pixels are unlabeled.
pub fn make_gt(spec: &SceneSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let mut assigned: Vec<Option<u32>> = vec![None; spec.width * spec.height];
    for (i, r) in spec.regions.iter().enumerate() {
        for y in r.y..r.y + r.height {
            for x in r.x..r.x + r.width {
                let cell = &mut assigned[y * spec.width + x];
                match *cell {
                    Some(prev) if prev != r.label => {
                        return Err(Error::validation(
                            format!("regions[{i}]"),
                            format!(
                                "pixel ({x}, {y}) already labeled {prev}, conflicts with {}",
                                r.label
                            ),
                        ))
                    }
                    _ => *cell = Some(r.label),
                }
            }
        }
    }
    let labels = assigned.into_iter().map(|l| l.unwrap_or(0)).collect();
    GroundTruth::with_classes(spec.width, spec.height, labels, spec.n_classes)
}

/// A generated band and the requested classes absent from the ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorBand {
    pub image: RealImage,
    pub missing_classes: Vec<u32>,
}

/// Fills the pixels of each listed class with its value, everything else
/// with `background`. Class pixels get uniform noise in
/// `[-noise_amplitude, noise_amplitude]` drawn from `seed`.
pub fn make_indicator_band(
    gt: &GroundTruth,
    fills: &[(u32, f64)],
    background: f64,
    noise_amplitude: f64,
    seed: u64,
) -> Result<IndicatorBand> {
    if fills.is_empty() {
        return Err(Error::validation("classes", "at least one class required"));
    }
    if !(noise_amplitude >= 0.0 && noise_amplitude.is_finite()) {
        return Err(Error::validation(
            "noise_amplitude",
            "must be finite and nonnegative",
        ));
    }
    let present = gt.classes_present();
    let missing_classes: Vec<u32> = fills
        .iter()
        .map(|&(c, _)| c)
        .filter(|c| !present.contains(c))
        .collect();
    if !missing_classes.is_empty() {
        log::warn!("indicator classes {missing_classes:?} do not occur in the ground truth");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = gt
        .labels()
        .iter()
        .map(|label| match fills.iter().find(|(c, _)| c == label) {
            Some(&(_, fill)) if noise_amplitude > 0.0 => {
                fill + rng.random_range(-noise_amplitude..=noise_amplitude)
            }
            Some(&(_, fill)) => fill,
            None => background,
        })
        .collect();
    Ok(IndicatorBand {
        image: RealImage::new(gt.width(), gt.height(), values)?,
        missing_classes,
    })
}

/// Rounds an image into 16-bit samples.
pub fn to_samples(image: &RealImage) -> Result<Vec<u16>> {
    image
        .values()
        .iter()
        .map(|&v| {
            let r = v.round();
            if (0.0..=f64::from(u16::MAX)).contains(&r) {
                Ok(r as u16)
            } else {
                Err(Error::validation(
                    "fill_value",
                    format!("{v} does not fit in u16"),
                ))
            }
        })
        .collect()
}

/// Closed-form expectations for the three-band scene.
///
/// Each synthetic band is a function of the label, so its MI with the
/// ground truth over labeled pixels is the entropy of the label partition it
/// induces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Facts {
    pub labeled: usize,
    pub count_a: usize,
    pub count_b: usize,
    pub mi_a: f64,
    pub mi_b: f64,
    pub mi_c: f64,
    /// Band indices of A, B and C sorted by expected MI, best first.
    pub expected_order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Scenario {
    /// Bands in order A, B, C.
    pub cube: HyperCube,
    pub gt: GroundTruth,
    pub expected: Table1Facts,
}

pub fn table1_scenario(spec: &SceneSpec) -> Result<Table1Scenario> {
    let gt = make_gt(spec)?;
    let present = gt.classes_present();
    for class in [CLASS_A, CLASS_B] {
        if !present.contains(&class) {
            return Err(Error::validation(
                "regions",
                format!("scene must contain class {class}"),
            ));
        }
    }
    let seed = spec.noise_seed.unwrap_or(0);
    let amp = spec.noise_amplitude;
    let a = make_indicator_band(&gt, &[(CLASS_A, FILL_A)], 0.0, amp, seed)?;
    let b = make_indicator_band(&gt, &[(CLASS_B, FILL_B)], 0.0, amp, seed.wrapping_add(1))?;
    let c = make_indicator_band(
        &gt,
        &[(CLASS_A, FILL_A), (CLASS_B, FILL_B)],
        0.0,
        amp,
        seed.wrapping_add(2),
    )?;
    let bands = [&a, &b, &c]
        .iter()
        .map(|band| to_samples(&band.image))
        .collect::<Result<Vec<_>>>()?;
    let cube = HyperCube::from_bands(gt.width(), gt.height(), &bands)?;

    let labeled = gt.labeled_count();
    let count_of = |class: u32| gt.labels().iter().filter(|&&l| l == class).count();
    let (count_a, count_b) = (count_of(CLASS_A), count_of(CLASS_B));
    let rest = labeled - count_a - count_b;
    let partition = |parts: &[usize]| {
        let counts: Vec<u64> = parts.iter().map(|&n| n as u64).collect();
        entropy(&counts)
    };
    let mi_a = partition(&[count_a, labeled - count_a])?;
    let mi_b = partition(&[count_b, labeled - count_b])?;
    let mi_c = partition(&[count_a, count_b, rest])?;
    let mut expected_order = vec![0, 1, 2];
    let mis = [mi_a, mi_b, mi_c];
    expected_order.sort_by(|&i, &j| mis[j].total_cmp(&mis[i]).then(i.cmp(&j)));

    Ok(Table1Scenario {
        cube,
        gt,
        expected: Table1Facts {
            labeled,
            count_a,
            count_b,
            mi_a,
            mi_b,
            mi_c,
            expected_order,
        },
    })
}

/// Per-class fills of the informative bands in [`separable_scenario`].
pub const SEPARABLE_FILLS: [[u16; 4]; 3] = [
    [1000, 1000, 3000, 3000],
    [1000, 3000, 1000, 3000],
    [1000, 2000, 2000, 3000],
];

/// Values of the constant bands in [`separable_scenario`].
pub const SEPARABLE_CONSTANTS: [u16; 3] = [500, 2000, 4000];

/// Quadrant scene with three informative bands at even indices and three
/// constant bands at odd indices. No single band separates all four
/// classes; bands 4 and 0 together do.
pub fn separable_scenario(size: usize) -> Result<(HyperCube, GroundTruth)> {
    let gt = make_gt(&SceneSpec::quadrants(size)?)?;
    let mut bands = Vec::with_capacity(6);
    for (fills, constant) in SEPARABLE_FILLS.iter().zip(SEPARABLE_CONSTANTS) {
        bands.push(gt.labels().iter().map(|&l| fills[l as usize - 1]).collect());
        bands.push(vec![constant; gt.labels().len()]);
    }
    let cube = HyperCube::from_bands(gt.width(), gt.height(), &bands)?;
    Ok((cube, gt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(width: usize, height: usize, regions: Vec<Region>) -> SceneSpec {
        SceneSpec {
            width,
            height,
            n_classes: 16,
            regions,
            noise_seed: None,
            noise_amplitude: 0.0,
        }
    }

    fn region(x: usize, y: usize, width: usize, height: usize, label: u32) -> Region {
        Region {
            x,
            y,
            width,
            height,
            label,
        }
    }

    #[test]
    fn full_cover_region() {
        let gt = make_gt(&spec(4, 3, vec![region(0, 0, 4, 3, 1)])).unwrap();
        assert!(gt.labels().iter().all(|&l| l == 1));
    }

    #[test]
    fn half_planes() {
        let gt = make_gt(&spec(
            4,
            2,
            vec![region(0, 0, 2, 2, 11), region(2, 0, 2, 2, 14)],
        ))
        .unwrap();
        assert_eq!(gt.labels(), &[11, 11, 14, 14, 11, 11, 14, 14]);
        assert_eq!(gt.classes_present(), vec![11, 14]);
    }

    #[test]
    fn empty_layout_is_unlabeled() {
        let gt = make_gt(&spec(3, 3, vec![])).unwrap();
        assert_eq!(gt.labeled_count(), 0);
    }

    #[test]
    fn overlap_rules() {
        let same = spec(4, 4, vec![region(0, 0, 3, 3, 2), region(1, 1, 3, 3, 2)]);
        assert!(make_gt(&same).is_ok());
        let conflict = spec(4, 4, vec![region(0, 0, 3, 3, 2), region(1, 1, 3, 3, 5)]);
        assert!(make_gt(&conflict).is_err());
        let outside = spec(4, 4, vec![region(2, 2, 3, 3, 2)]);
        assert!(make_gt(&outside).is_err());
        let bad_label = spec(4, 4, vec![region(0, 0, 1, 1, 17)]);
        assert!(make_gt(&bad_label).is_err());
    }

    #[test]
    fn indicator_bands() {
        let gt = make_gt(&spec(
            4,
            1,
            vec![
                region(0, 0, 1, 1, 11),
                region(1, 0, 1, 1, 14),
                region(2, 0, 1, 1, 3),
            ],
        ))
        .unwrap();
        let a = make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 0.0, 0).unwrap();
        assert_eq!(a.image.values(), &[1000.0, 0.0, 0.0, 0.0]);
        assert!(a.missing_classes.is_empty());
        let c = make_indicator_band(&gt, &[(11, 1000.0), (14, 3000.0)], 7.0, 0.0, 0).unwrap();
        assert_eq!(c.image.values(), &[1000.0, 3000.0, 7.0, 7.0]);
        let missing = make_indicator_band(&gt, &[(9, 1.0)], 0.0, 0.0, 0).unwrap();
        assert_eq!(missing.missing_classes, vec![9]);
        assert!(make_indicator_band(&gt, &[], 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn noise_is_seeded_and_bounded() {
        let gt = make_gt(&spec(8, 8, vec![region(0, 0, 8, 4, 11)])).unwrap();
        let one = make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 25.0, 9).unwrap();
        let two = make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 25.0, 9).unwrap();
        assert_eq!(one, two);
        let other = make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 25.0, 10).unwrap();
        assert_ne!(one, other);
        assert!(one.image.values()[..32]
            .iter()
            .all(|v| (975.0..=1025.0).contains(v)));
        assert!(one.image.values()[32..].iter().all(|&v| v == 0.0));
        let clean = make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 0.0, 1).unwrap();
        assert_eq!(
            clean,
            make_indicator_band(&gt, &[(11, 1000.0)], 0.0, 0.0, 1).unwrap()
        );
    }

    #[test]
    fn table1_preset_shape() {
        let s = table1_scenario(&SceneSpec::table1(64).unwrap()).unwrap();
        assert_eq!(s.cube.n_bands(), 3);
        assert_eq!(s.cube.dims(), (64, 64));
        assert_eq!(s.expected.expected_order, vec![2, 0, 1]);
        assert!(s.expected.mi_c > s.expected.mi_a && s.expected.mi_a > s.expected.mi_b);
        assert!(SceneSpec::table1(4).is_err());
    }

    #[test]
    fn table1_requires_both_classes() {
        let only_a = spec(4, 4, vec![region(0, 0, 2, 4, 11), region(2, 0, 2, 4, 3)]);
        assert!(table1_scenario(&only_a).is_err());
    }

    #[test]
    fn equal_regions_give_equal_mi() {
        let s = spec(
            6,
            2,
            vec![
                region(0, 0, 2, 2, 11),
                region(2, 0, 2, 2, 14),
                region(4, 0, 2, 2, 1),
            ],
        );
        let t = table1_scenario(&s).unwrap();
        assert_eq!(t.expected.mi_a, t.expected.mi_b);
        let order = &t.expected.expected_order;
        assert_eq!(order[0], 2);
    }

    #[test]
    fn separable_layout() {
        let (cube, gt) = separable_scenario(8).unwrap();
        assert_eq!(cube.n_bands(), 6);
        assert_eq!(gt.classes_present(), vec![1, 2, 3, 4]);
        for odd in [1, 3, 5] {
            let band = cube.band(odd).unwrap();
            assert!(band.iter().all(|&v| v == band[0]));
        }
        assert!(separable_scenario(7).is_err());
    }
}
