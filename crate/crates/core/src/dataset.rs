//! Coenobium labels, the 215-dimensional feature vector layout, labeled
//! datasets, and the `path,label` CSV manifest format.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of cells in a coenobium. Exactly four classes occur in the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LabelClass {
    One,
    Two,
    Four,
    Eight,
}

impl LabelClass {
    pub const ALL: [LabelClass; 4] = [LabelClass::One, LabelClass::Two, LabelClass::Four, LabelClass::Eight];

    pub fn cells(self) -> u8 {
        match self {
            LabelClass::One => 1,
            LabelClass::Two => 2,
            LabelClass::Four => 4,
            LabelClass::Eight => 8,
        }
    }

    pub fn from_cells(cells: u8) -> Option<LabelClass> {
        match cells {
            1 => Some(LabelClass::One),
            2 => Some(LabelClass::Two),
            4 => Some(LabelClass::Four),
            8 => Some(LabelClass::Eight),
            _ => None,
        }
    }

    /// Position in the canonical class order 1, 2, 4, 8.
    pub fn index(self) -> usize {
        match self {
            LabelClass::One => 0,
            LabelClass::Two => 1,
            LabelClass::Four => 2,
            LabelClass::Eight => 3,
        }
    }

    pub fn from_index(idx: usize) -> LabelClass {
        Self::ALL[idx]
    }
}

impl fmt::Display for LabelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cells())
    }
}

/// Total feature dimensionality: 7 Hu + 81 HOG + 40 Zernike + 59 LBP + 28 Haralick.
pub const FEATURE_DIM: usize = 215;

/// Descriptor blocks in vector order, with their half-open index ranges.
pub mod blocks {
    use std::ops::Range;

    pub const HU: Range<usize> = 0..7;
    pub const HOG: Range<usize> = 7..88;
    pub const ZERNIKE: Range<usize> = 88..128;
    pub const LBP: Range<usize> = 128..187;
    pub const HARALICK: Range<usize> = 187..215;

    pub const NAMES: [&str; 5] = ["hu", "hog", "zernike", "lbp", "haralick"];

    pub fn range(name: &str) -> Option<Range<usize>> {
        match name {
            "hu" => Some(HU),
            "hog" => Some(HOG),
            "zernike" => Some(ZERNIKE),
            "lbp" => Some(LBP),
            "haralick" => Some(HARALICK),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FeatureVectorError {
    #[error("feature vector has {0} values, expected {FEATURE_DIM}")]
    WrongLength(usize),
    #[error("feature {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
}

/// 215 finite reals in the fixed Hu|HOG|Zernike|LBP|Haralick block layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FeatureVectorError> {
        if values.len() != FEATURE_DIM {
            return Err(FeatureVectorError::WrongLength(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(FeatureVectorError::NonFinite { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn block(&self, name: &str) -> Option<&[f64]> {
        blocks::range(name).map(|r| &self.0[r])
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest not found: {0}")]
    FileNotFound(String),
    #[error("row {row}: expected 2 columns (path,label), found {found}")]
    MalformedRow { row: usize, found: usize },
    #[error("row {row}: bad label {label:?} (expected 1, 2, 4, 8, or blank)")]
    BadLabel { row: usize, label: String },
    #[error("missing or wrong header; expected `path,label`")]
    BadHeader,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// One manifest row: an image path (resolved against the manifest directory)
/// and an optional class label.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Option<LabelClass>,
}

/// Reads a `path,label` CSV manifest. Relative paths are resolved against
/// the manifest's own directory; row order is preserved.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>, ManifestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            ManifestError::FileNotFound(path.display().to_string())
        } else {
            ManifestError::Io(e)
        }
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file);
    {
        let headers = reader.headers()?;
        if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "label" {
            return Err(ManifestError::BadHeader);
        }
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2; // 1-based, counting the header line
        // A trailing `,` yields an empty second field; a bare path yields one field.
        if record.len() != 2 {
            return Err(ManifestError::MalformedRow { row, found: record.len() });
        }
        let label_str = record[1].trim();
        let label = if label_str.is_empty() {
            None
        } else {
            let cells: u8 = label_str
                .parse()
                .map_err(|_| ManifestError::BadLabel { row, label: label_str.to_string() })?;
            Some(LabelClass::from_cells(cells).ok_or_else(|| ManifestError::BadLabel {
                row,
                label: label_str.to_string(),
            })?)
        };
        let p = Path::new(&record[0]);
        let resolved = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        entries.push(ManifestEntry { path: resolved, label });
    }
    Ok(entries)
}

/// Writes a manifest with paths as given (no resolution). Parsing the output
/// from the same directory reproduces the entries.
pub fn write_manifest(
    path: impl AsRef<Path>,
    rows: &[(String, Option<LabelClass>)],
) -> Result<(), ManifestError> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["path", "label"])?;
    for (p, label) in rows {
        let label = label.map(|l| l.to_string()).unwrap_or_default();
        writer.write_record([p.as_str(), label.as_str()])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("duplicate sample id {0:?}")]
    DuplicateSampleId(String),
    #[error(transparent)]
    Feature(#[from] FeatureVectorError),
}

/// One labeled sample: id, its 215-dim descriptor and the class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub features: FeatureVector,
    pub label: LabelClass,
}

/// Feature vectors with coenobium labels, optionally tracking the manifest
/// they came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDataset {
    samples: Vec<Sample>,
    pub provenance: Option<PathBuf>,
}

impl LabeledDataset {
    pub fn new(samples: Vec<Sample>, provenance: Option<PathBuf>) -> Result<Self, DatasetError> {
        let mut seen = std::collections::HashSet::new();
        for s in &samples {
            if !seen.insert(s.id.clone()) {
                return Err(DatasetError::DuplicateSampleId(s.id.clone()));
            }
        }
        Ok(Self { samples, provenance })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Per-class sample counts in canonical 1,2,4,8 order.
    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for s in &self.samples {
            counts[s.label.index()] += 1;
        }
        counts
    }

    /// Feature matrix restricted to `indices` (row per sample).
    pub fn matrix(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        self.samples
            .iter()
            .map(|s| indices.iter().map(|&i| s.features.values()[i]).collect())
            .collect()
    }

    pub fn labels(&self) -> Vec<LabelClass> {
        self.samples.iter().map(|s| s.label).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }

    #[test]
    fn manifest_basic_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.csv", "path,label\na.png,4\nb.png,\n");
        let rows = read_manifest(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].path, dir.path().join("a.png"));
        assert_eq!(rows[0].label, Some(LabelClass::Four));
        assert_eq!(rows[1].label, None);
    }

    #[test]
    fn manifest_bad_label_16() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.csv", "path,label\nc.png,16\n");
        match read_manifest(&p) {
            Err(ManifestError::BadLabel { row, label }) => {
                assert_eq!(row, 2);
                assert_eq!(label, "16");
            }
            other => panic!("expected BadLabel, got {other:?}"),
        }
    }

    #[test]
    fn manifest_malformed_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.csv", "path,label\na.png,1,extra\n");
        assert!(matches!(read_manifest(&p), Err(ManifestError::MalformedRow { row: 2, found: 3 })));
    }

    #[test]
    fn manifest_crlf_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "m.csv", "path,label\r\na.png,8\r\n");
        let rows = read_manifest(&p).unwrap();
        assert_eq!(rows[0].label, Some(LabelClass::Eight));
    }

    #[test]
    fn manifest_round_trip_identity() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            ("x.pgm".to_string(), Some(LabelClass::One)),
            ("y.pgm".to_string(), None),
            ("sub/z.pgm".to_string(), Some(LabelClass::Two)),
        ];
        let p = dir.path().join("m.csv");
        write_manifest(&p, &rows).unwrap();
        let back = read_manifest(&p).unwrap();
        assert_eq!(back.len(), rows.len());
        for (entry, (orig_path, orig_label)) in back.iter().zip(&rows) {
            assert_eq!(entry.path, dir.path().join(orig_path));
            assert_eq!(&entry.label, orig_label);
        }
    }

    #[test]
    fn feature_vector_checks_length_and_finiteness() {
        assert!(matches!(
            FeatureVector::new(vec![0.0; 10]),
            Err(FeatureVectorError::WrongLength(10))
        ));
        let mut v = vec![0.0; FEATURE_DIM];
        v[100] = f64::NAN;
        assert!(matches!(
            FeatureVector::new(v),
            Err(FeatureVectorError::NonFinite { index: 100, .. })
        ));
        assert!(FeatureVector::new(vec![1.5; FEATURE_DIM]).is_ok());
    }

    #[test]
    fn block_layout_covers_215() {
        assert_eq!(blocks::HU.len(), 7);
        assert_eq!(blocks::HOG.len(), 81);
        assert_eq!(blocks::ZERNIKE.len(), 40);
        assert_eq!(blocks::LBP.len(), 59);
        assert_eq!(blocks::HARALICK.len(), 28);
        assert_eq!(blocks::HARALICK.end, FEATURE_DIM);
        assert_eq!(blocks::HU.end, blocks::HOG.start);
        assert_eq!(blocks::HOG.end, blocks::ZERNIKE.start);
        assert_eq!(blocks::ZERNIKE.end, blocks::LBP.start);
        assert_eq!(blocks::LBP.end, blocks::HARALICK.start);
    }

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let fv = FeatureVector::new(vec![0.0; FEATURE_DIM]).unwrap();
        let s = |id: &str| Sample { id: id.into(), features: fv.clone(), label: LabelClass::One };
        assert!(LabeledDataset::new(vec![s("a"), s("a")], None).is_err());
        assert!(LabeledDataset::new(vec![s("a"), s("b")], None).is_ok());
    }
}
