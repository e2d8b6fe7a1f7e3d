//! Hyperspectral cubes, ground-truth maps and their discretization.
//!
//! Cubes are stored band-sequential: all rows of band 0, then band 1, and so
//! on. Within a band pixels are row-major, so pixel `(x, y)` of band `b` lives
//! at `b * width * height + y * width + x`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsio::write_atomic;

/// A `width x height x n_bands` grid of 16-bit reflectance samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperCube {
    width: usize,
    height: usize,
    n_bands: usize,
    samples: Vec<u16>,
}

impl HyperCube {
    pub fn new(width: usize, height: usize, n_bands: usize, samples: Vec<u16>) -> Result<Self> {
        check_positive("width", width)?;
        check_positive("height", height)?;
        check_positive("bands", n_bands)?;
        let expected = width * height * n_bands;
        if samples.len() != expected {
            return Err(Error::validation(
                "samples",
                format!("expected {expected} samples, got {}", samples.len()),
            ));
        }
        Ok(HyperCube {
            width,
            height,
            n_bands,
            samples,
        })
    }

    /// Stacks equally sized bands into a cube.
    pub fn from_bands(width: usize, height: usize, bands: &[Vec<u16>]) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height * bands.len());
        for (i, band) in bands.iter().enumerate() {
            if band.len() != width * height {
                return Err(Error::validation(
                    format!("band {i}"),
                    format!("expected {} samples, got {}", width * height, band.len()),
                ));
            }
            samples.extend_from_slice(band);
        }
        HyperCube::new(width, height, bands.len(), samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn n_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    /// Raw samples of one band, row-major.
    pub fn band(&self, band: usize) -> Result<&[u16]> {
        if band >= self.n_bands {
            return Err(Error::BandOutOfRange {
                band,
                n_bands: self.n_bands,
            });
        }
        let n = self.n_pixels();
        Ok(&self.samples[band * n..(band + 1) * n])
    }

    /// The spectrum of one pixel across all bands.
    pub fn pixel_vector(&self, pixel: usize) -> Vec<u16> {
        let n = self.n_pixels();
        (0..self.n_bands)
            .map(|b| self.samples[b * n + pixel])
            .collect()
    }
}

/// Per-pixel class labels. `0` is unlabeled; classes are `1..=n_classes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    n_classes: u32,
}

impl GroundTruth {
    /// Builds a map, taking `n_classes` from the largest label present.
    /// An all-unlabeled map has `n_classes == 0`; consumers reject it.
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        let n_classes = labels.iter().copied().max().unwrap_or(0);
        GroundTruth::with_classes(width, height, labels, n_classes)
    }

    pub fn with_classes(
        width: usize,
        height: usize,
        labels: Vec<u32>,
        n_classes: u32,
    ) -> Result<Self> {
        check_positive("width", width)?;
        check_positive("height", height)?;
        if labels.len() != width * height {
            return Err(Error::validation(
                "labels",
                format!("expected {} labels, got {}", width * height, labels.len()),
            ));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > n_classes) {
            return Err(Error::validation(
                "labels",
                format!("label {bad} exceeds declared class count {n_classes}"),
            ));
        }
        Ok(GroundTruth {
            width,
            height,
            labels,
            n_classes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != 0).count()
    }

    /// Distinct nonzero labels, ascending.
    pub fn classes_present(&self) -> Vec<u32> {
        let mut seen = vec![false; self.n_classes as usize + 1];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (1..=self.n_classes).filter(|&c| seen[c as usize]).collect()
    }
}

/// Bin indices in `0..n_bins`, one per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedImage {
    width: usize,
    height: usize,
    bins: Vec<u32>,
    n_bins: u32,
}

impl QuantizedImage {
    pub fn new(width: usize, height: usize, bins: Vec<u32>, n_bins: u32) -> Result<Self> {
        check_positive("width", width)?;
        check_positive("height", height)?;
        check_positive("n_bins", n_bins as usize)?;
        if bins.len() != width * height {
            return Err(Error::validation(
                "bins",
                format!("expected {} bins, got {}", width * height, bins.len()),
            ));
        }
        if let Some(bad) = bins.iter().find(|&&b| b >= n_bins) {
            return Err(Error::validation(
                "bins",
                format!("bin {bad} not below n_bins {n_bins}"),
            ));
        }
        Ok(QuantizedImage {
            width,
            height,
            bins,
            n_bins,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bins(&self) -> &[u32] {
        &self.bins
    }

    pub fn n_bins(&self) -> u32 {
        self.n_bins
    }
}

/// A real-valued image, e.g. a running estimate of the reference map.
#[derive(Clone, Debug, PartialEq)]
pub struct RealImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_positive("width", width)?;
        check_positive("height", height)?;
        if values.len() != width * height {
            return Err(Error::validation(
                "values",
                format!("expected {} values, got {}", width * height, values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                "values",
                format!("non-finite value at pixel {i}"),
            ));
        }
        Ok(RealImage {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn quantize(&self, n_bins: u32) -> QuantizedImage {
        QuantizedImage {
            width: self.width,
            height: self.height,
            bins: quantize_values(&self.values, n_bins),
            n_bins,
        }
    }
}

fn check_positive(field: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::validation(field, "must be positive"));
    }
    Ok(())
}

/// Linear min-max binning into `0..n_bins`.
///
/// The maximum maps to `n_bins - 1`; a constant input maps to bin 0.
///
/// # Panics
///
/// If `n_bins` is zero.
pub fn quantize_values(values: &[f64], n_bins: u32) -> Vec<u32> {
    assert!(n_bins >= 1, "n_bins must be at least 1");
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = max - min;
    if span.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return vec![0; values.len()];
    }
    let top = n_bins - 1;
    let scale = f64::from(n_bins);
    values
        .iter()
        .map(|&v| {
            let bin = ((v - min) * scale / span).floor();
            // `bin` is in [0, n_bins]; only v == max can reach n_bins.
            (bin as u32).min(top)
        })
        .collect()
}

/// Quantizes a real image.
pub fn quantize(image: &RealImage, n_bins: u32) -> QuantizedImage {
    image.quantize(n_bins)
}

/// Quantizes one raw band of a cube.
pub fn quantize_band(cube: &HyperCube, band: usize, n_bins: u32) -> Result<QuantizedImage> {
    let values: Vec<f64> = cube.band(band)?.iter().map(|&s| f64::from(s)).collect();
    Ok(QuantizedImage {
        width: cube.width,
        height: cube.height,
        bins: quantize_values(&values, n_bins),
        n_bins,
    })
}

/// One band's samples as reals, unmodified.
pub fn band_image(cube: &HyperCube, band: usize) -> Result<RealImage> {
    let values = cube.band(band)?.iter().map(|&s| f64::from(s)).collect();
    Ok(RealImage {
        width: cube.width,
        height: cube.height,
        values,
    })
}

/// Pixel-wise mean of two images.
pub fn average_images(a: &RealImage, b: &RealImage) -> Result<RealImage> {
    if a.dims() != b.dims() {
        return Err(Error::mismatch(a.dims(), b.dims()));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| (x + y) / 2.0)
        .collect();
    Ok(RealImage {
        width: a.width,
        height: a.height,
        values,
    })
}

/// Pixel-wise mean over the inclusive band range `first..=last`.
///
/// Serves as an estimated reference map when no ground truth is available.
pub fn approx_gt_band_average(cube: &HyperCube, first: usize, last: usize) -> Result<RealImage> {
    if first > last {
        return Err(Error::validation(
            "band_range",
            format!("empty range {first}:{last}"),
        ));
    }
    if last >= cube.n_bands {
        return Err(Error::BandOutOfRange {
            band: last,
            n_bands: cube.n_bands,
        });
    }
    let n = cube.n_pixels();
    let mut sums = vec![0.0f64; n];
    for band in first..=last {
        for (sum, &s) in sums.iter_mut().zip(cube.band(band)?) {
            *sum += f64::from(s);
        }
    }
    let count = (last - first + 1) as f64;
    for sum in &mut sums {
        *sum /= count;
    }
    Ok(RealImage {
        width: cube.width,
        height: cube.height,
        values: sums,
    })
}

/// JSON header describing a raw band-sequential cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeHeader {
    pub width: usize,
    pub height: usize,
    pub bands: usize,
    pub dtype: String,
    pub interleave: String,
    pub endian: String,
    /// Raw file path, relative to the header's directory.
    pub raw: String,
}

impl CubeHeader {
    pub fn for_cube(cube: &HyperCube, raw: impl Into<String>) -> Self {
        CubeHeader {
            width: cube.width,
            height: cube.height,
            bands: cube.n_bands,
            dtype: "u16".into(),
            interleave: "bsq".into(),
            endian: "little".into(),
            raw: raw.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        check_positive("width", self.width)?;
        check_positive("height", self.height)?;
        check_positive("bands", self.bands)?;
        for (field, got, want) in [
            ("dtype", &self.dtype, "u16"),
            ("interleave", &self.interleave, "bsq"),
            ("endian", &self.endian, "little"),
        ] {
            if got != want {
                return Err(Error::validation(
                    field,
                    format!("unsupported value {got:?}, expected {want:?}"),
                ));
            }
        }
        if self.raw.is_empty() {
            return Err(Error::validation("raw", "empty path"));
        }
        Ok(())
    }
}

fn sibling(header_path: &Path, relative: &str) -> PathBuf {
    header_path
        .parent()
        .map(|dir| dir.join(relative))
        .unwrap_or_else(|| PathBuf::from(relative))
}

/// Reads a cube from its JSON header and the raw file it names.
pub fn load_cube(path: impl AsRef<Path>) -> Result<HyperCube> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header: CubeHeader = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    header.validate()?;

    let raw_path = sibling(path, &header.raw);
    let expected = (header.width * header.height * header.bands * 2) as u64;
    let bytes = match fs::read(&raw_path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::CorruptInput {
                path: raw_path,
                expected,
                actual: 0,
            })
        }
        Err(e) => return Err(Error::io(raw_path, e)),
    };
    if bytes.len() as u64 != expected {
        return Err(Error::CorruptInput {
            path: raw_path,
            expected,
            actual: bytes.len() as u64,
        });
    }
    let samples = bytes
        .chunks_exact(2)
        .map(|pair| u16::from_le_bytes([pair[0], pair[1]]))
        .collect();
    HyperCube::new(header.width, header.height, header.bands, samples)
}

/// Writes `cube` as a JSON header at `header_path` plus a raw file named
/// `<stem>.raw` next to it.
pub fn write_cube(cube: &HyperCube, header_path: impl AsRef<Path>) -> Result<()> {
    let header_path = header_path.as_ref();
    let stem = header_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("cube");
    let raw_name = format!("{stem}.raw");
    let header = CubeHeader::for_cube(cube, raw_name.clone());

    let mut raw = Vec::with_capacity(cube.samples.len() * 2);
    for s in &cube.samples {
        raw.extend_from_slice(&s.to_le_bytes());
    }
    write_atomic(sibling(header_path, &raw_name), &raw)?;

    let mut json = serde_json::to_vec_pretty(&header).expect("header serializes");
    json.push(b'\n');
    write_atomic(header_path, &json)
}

fn csv_rows(path: &Path, text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::validation(format!("row {}", i + 1), e.to_string()))?;
        rows.push(record.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Err(Error::validation(
            "grid",
            format!("{} contains no rows", path.display()),
        ));
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::validation(
                format!("row {}", i + 1),
                format!("has {} cells, expected {width}", row.len()),
            ));
        }
    }
    Ok(rows)
}

/// Parses a ground-truth CSV grid.
///
/// An optional first line `#classes=<N>` fixes the class count; otherwise it
/// is the largest label found.
pub fn parse_gt(path: &Path, text: &str) -> Result<GroundTruth> {
    let mut declared = None;
    let mut body = text;
    if let Some(rest) = text.strip_prefix('#') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        let value = line
            .trim()
            .strip_prefix("classes=")
            .ok_or_else(|| Error::validation("header", format!("unrecognized line #{line}")))?;
        let n: u32 = value
            .trim()
            .parse()
            .map_err(|_| Error::validation("classes", format!("not a count: {value:?}")))?;
        declared = Some(n);
        body = tail;
    }

    let rows = csv_rows(path, body)?;
    let height = rows.len();
    let width = rows[0].len();
    let mut labels = Vec::with_capacity(width * height);
    for (i, row) in rows.iter().enumerate() {
        for cell in row {
            let value: i64 = cell.parse().map_err(|_| {
                Error::validation(
                    format!("row {}", i + 1),
                    format!("non-integer cell {cell:?}"),
                )
            })?;
            if value < 0 {
                return Err(Error::validation(
                    format!("row {}", i + 1),
                    format!("negative label {value}"),
                ));
            }
            let label = u32::try_from(value).map_err(|_| {
                Error::validation(format!("row {}", i + 1), format!("label {value} too large"))
            })?;
            labels.push(label);
        }
    }
    match declared {
        Some(n) => GroundTruth::with_classes(width, height, labels, n),
        None => GroundTruth::new(width, height, labels),
    }
}

/// Reads a ground-truth CSV grid from disk.
pub fn load_gt(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gt(path, &text)
}

/// Writes a ground truth with a `#classes=` header line.
pub fn write_gt(gt: &GroundTruth, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("#classes={}\n", gt.n_classes);
    for row in gt.labels.chunks(gt.width) {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Writes a real image as a row-major CSV grid.
pub fn write_real_csv(image: &RealImage, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for row in image.values.chunks(image.width) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a real image written by [`write_real_csv`].
pub fn load_real_csv(path: impl AsRef<Path>) -> Result<RealImage> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows = csv_rows(path, &text)?;
    let height = rows.len();
    let width = rows[0].len();
    let mut values = Vec::with_capacity(width * height);
    for (i, row) in rows.iter().enumerate() {
        for cell in row {
            let v: f64 = cell.parse().map_err(|_| {
                Error::validation(
                    format!("row {}", i + 1),
                    format!("non-numeric cell {cell:?}"),
                )
            })?;
            values.push(v);
        }
    }
    RealImage::new(width, height, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_1band() -> HyperCube {
        HyperCube::new(2, 2, 1, vec![1, 2, 3, 4]).unwrap()
    }

    fn real(values: &[f64]) -> RealImage {
        RealImage::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn smallest_cube_loads() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("tiny.json");
        fs::write(
            &header,
            r#"{"width":2,"height":2,"bands":1,"dtype":"u16","interleave":"bsq","endian":"little","raw":"tiny.raw"}"#,
        )
        .unwrap();
        fs::write(dir.path().join("tiny.raw"), [1, 0, 2, 0, 3, 0, 4, 0]).unwrap();
        let cube = load_cube(&header).unwrap();
        assert_eq!(cube.samples(), &[1, 2, 3, 4]);
        assert_eq!(cube.dims(), (2, 2));
    }

    #[test]
    fn full_aviris_shape_loads() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("aviris.json");
        let n = 145 * 145 * 220;
        let cube = HyperCube::new(
            145,
            145,
            220,
            (0..n).map(|i| (i % 8451 + 955) as u16).collect(),
        )
        .unwrap();
        write_cube(&cube, &header).unwrap();
        let back = load_cube(&header).unwrap();
        assert_eq!(back.samples().len(), 220 * 145 * 145);
        assert_eq!(back, cube);
    }

    #[test]
    fn short_raw_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("c.json");
        write_cube(&cube_1band(), &header).unwrap();
        fs::write(dir.path().join("c.raw"), [1, 0, 2, 0, 3, 0, 4]).unwrap();
        match load_cube(&header) {
            Err(Error::CorruptInput {
                expected, actual, ..
            }) => assert_eq!((expected, actual), (8, 7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_raw_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("c.json");
        write_cube(&cube_1band(), &header).unwrap();
        fs::remove_file(dir.path().join("c.raw")).unwrap();
        assert!(matches!(
            load_cube(&header),
            Err(Error::CorruptInput { actual: 0, .. })
        ));
    }

    #[test]
    fn header_fields_are_validated() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("c.json");
        fs::write(
            &header,
            r#"{"width":0,"height":2,"bands":1,"dtype":"u16","interleave":"bsq","endian":"little","raw":"c.raw"}"#,
        )
        .unwrap();
        assert!(
            matches!(load_cube(&header), Err(Error::Validation { field, .. }) if field == "width")
        );
        fs::write(
            &header,
            r#"{"width":2,"height":2,"bands":1,"dtype":"u16","interleave":"bil","endian":"little","raw":"c.raw"}"#,
        )
        .unwrap();
        assert!(
            matches!(load_cube(&header), Err(Error::Validation { field, .. }) if field == "interleave")
        );
    }

    #[test]
    fn gt_parses_row_major() {
        let gt = parse_gt(Path::new("gt.csv"), "0,1\n16,0").unwrap();
        assert_eq!(gt.dims(), (2, 2));
        assert_eq!(gt.labels(), &[0, 1, 16, 0]);
        assert_eq!(gt.n_classes(), 16);
    }

    #[test]
    fn gt_header_line_sets_classes() {
        let gt = parse_gt(Path::new("gt.csv"), "#classes=16\n0,1\n2,0\n").unwrap();
        assert_eq!(gt.n_classes(), 16);
        assert!(parse_gt(Path::new("gt.csv"), "#classes=1\n0,1\n2,0\n").is_err());
    }

    #[test]
    fn all_unlabeled_gt_is_valid() {
        let gt = parse_gt(Path::new("gt.csv"), "0,0\n0,0").unwrap();
        assert_eq!(gt.labeled_count(), 0);
    }

    #[test]
    fn gt_rejects_bad_rows() {
        let err = parse_gt(Path::new("gt.csv"), "0,1\n1,2,3\n").unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "row 2"),
            "{err}"
        );
        let err = parse_gt(Path::new("gt.csv"), "0,-1\n").unwrap_err();
        assert!(err.to_string().contains("negative"));
        let err = parse_gt(Path::new("gt.csv"), "0,1\n1.5,2\n").unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(
            quantize(&real(&[0.0, 1.0, 2.0, 3.0]), 2).bins(),
            &[0, 0, 1, 1]
        );
        assert_eq!(quantize(&real(&[5.0, 5.0, 5.0]), 7).bins(), &[0, 0, 0]);
        // floor((5180 - 955) * 256 / 8451) = floor(127.98) = 127
        assert_eq!(
            quantize(&real(&[955.0, 9406.0, 5180.0]), 256).bins(),
            &[0, 255, 127]
        );
    }

    #[test]
    fn band_image_extracts_band() {
        let cube = cube_1band();
        assert_eq!(
            band_image(&cube, 0).unwrap().values(),
            &[1.0, 2.0, 3.0, 4.0]
        );
        assert!(matches!(
            band_image(&cube, 1),
            Err(Error::BandOutOfRange {
                band: 1,
                n_bands: 1
            })
        ));
    }

    #[test]
    fn averaging() {
        let a = real(&[2.0, 4.0]);
        let b = real(&[4.0, 8.0]);
        assert_eq!(average_images(&a, &b).unwrap().values(), &[3.0, 6.0]);
        assert_eq!(average_images(&a, &a).unwrap(), a);
        assert!(average_images(&a, &real(&[1.0])).is_err());
    }

    #[test]
    fn band_average_ranges() {
        let cube = HyperCube::from_bands(2, 1, &[vec![2, 4], vec![4, 8]]).unwrap();
        assert_eq!(
            approx_gt_band_average(&cube, 0, 1).unwrap().values(),
            &[3.0, 6.0]
        );
        assert_eq!(
            approx_gt_band_average(&cube, 1, 1).unwrap(),
            band_image(&cube, 1).unwrap()
        );
        assert!(approx_gt_band_average(&cube, 1, 0).is_err());
        assert!(approx_gt_band_average(&cube, 0, 2).is_err());
    }

    #[test]
    fn real_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("est.csv");
        let image = RealImage::new(2, 2, vec![0.5, 1.0 / 3.0, 1e9, -2.25]).unwrap();
        write_real_csv(&image, &path).unwrap();
        assert_eq!(load_real_csv(&path).unwrap(), image);
    }

    #[test]
    fn pixel_vector_walks_bands() {
        let cube = HyperCube::from_bands(2, 1, &[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        assert_eq!(cube.pixel_vector(1), vec![2, 4, 6]);
    }
}
