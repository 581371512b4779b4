//! The five descriptor blocks and the assembled 215-dimensional vector.
//!
//! Block layout (see [`crate::dataset::blocks`]): 7 Hu moments, 81 HOG,
//! 40 Zernike magnitudes, 59 uniform-LBP bins, 28 Haralick statistics
//! (14 means, 14 ranges over the four GLCM directions).
//!
//! Mask handling: background contributes zero intensity to the moment
//! integrals (Hu, Zernike), is excluded from GLCM pairs and LBP centers,
//! and is zeroed before the HOG resize.

mod haralick;
mod hog;
mod hu;
mod lbp;
mod zernike;

pub use haralick::{haralick_features, haralick_stats_for_direction};
pub use hog::hog_descriptor;
pub use hu::hu_moments;
pub use lbp::lbp_histogram;
pub use zernike::{zernike_moments, ZERNIKE_ORDERS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{FeatureVector, FEATURE_DIM};
use crate::patch::RegionPatch;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("mask is empty or carries no intensity mass")]
    EmptyMask,
    #[error("patch {0}x{1} below the {2}x{2} minimum")]
    PatchTooSmall(u32, u32, u32),
    #[error("mask excludes all pixel adjacencies; co-occurrence undefined")]
    NoValidPairs,
    #[error("{block} block failed: {source}")]
    Block {
        block: &'static str,
        #[source]
        source: Box<FeatureError>,
    },
}

impl FeatureError {
    fn in_block(self, block: &'static str) -> FeatureError {
        FeatureError::Block { block, source: Box::new(self) }
    }
}

/// Computes all five descriptor blocks and concatenates them in the fixed
/// order. Fails with the offending block's name if any descriptor rejects
/// the patch.
pub fn extract_all(patch: &RegionPatch) -> Result<FeatureVector, FeatureError> {
    let mut values = Vec::with_capacity(FEATURE_DIM);
    values.extend_from_slice(&hu_moments(patch).map_err(|e| e.in_block("hu"))?);
    values.extend_from_slice(&hog_descriptor(patch));
    values.extend_from_slice(&zernike_moments(patch).map_err(|e| e.in_block("zernike"))?);
    values.extend_from_slice(&lbp_histogram(patch).map_err(|e| e.in_block("lbp"))?);
    values.extend_from_slice(&haralick_features(patch).map_err(|e| e.in_block("haralick"))?);
    debug_assert_eq!(values.len(), FEATURE_DIM);
    FeatureVector::new(values).map_err(|_| FeatureError::EmptyMask)
}

#[derive(Debug, Error)]
pub enum StandardizeError {
    #[error("need at least 2 samples to fit a standardizer, got {0}")]
    TooFewSamples(usize),
    #[error("sample {0} has {1} dims, expected {2}")]
    DimMismatch(usize, usize, usize),
}

/// Per-dimension z-score parameters fitted on a training set.
///
/// `apply` maps x to (x - mean) / std; dimensions with zero std map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits mean and population standard deviation per dimension.
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self, StandardizeError> {
        if samples.len() < 2 {
            return Err(StandardizeError::TooFewSamples(samples.len()));
        }
        let dim = samples[0].len();
        for (i, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(StandardizeError::DimMismatch(i, s.len(), dim));
            }
        }
        let n = samples.len() as f64;
        let mut mean = vec![0.0; dim];
        for s in samples {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for s in samples {
            for ((v, x), m) in var.iter_mut().zip(s).zip(&mean) {
                let d = x - m;
                *v += d * d;
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.mean.len(), "standardizer dimension mismatch");
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn apply_all(&self, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| self.apply(x)).collect()
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::image::{BinaryMask, GrayImage};
    use crate::patch::RegionPatch;

    /// Patch whose mask marks every pixel.
    pub fn full_patch(img: GrayImage) -> RegionPatch {
        let mask = BinaryMask::new(
            img.width(),
            img.height(),
            vec![true; (img.width() * img.height()) as usize],
        )
        .unwrap();
        RegionPatch::new(img, mask, (0, 0), 0.0, "test#0".into()).unwrap()
    }

    /// Solid disk of the given radius on a dark background, canvas
    /// 2*(radius+margin)+1 square, disk intensity `fill`.
    pub fn disk_patch(radius: u32, margin: u32, fill: u8) -> RegionPatch {
        let side = 2 * (radius + margin) + 1;
        let c = (radius + margin) as f64;
        let r2 = (radius as f64) * (radius as f64);
        let img = GrayImage::from_fn(side, side, |x, y| {
            let dx = x as f64 - c;
            let dy = y as f64 - c;
            if dx * dx + dy * dy <= r2 {
                fill
            } else {
                0
            }
        });
        let mask = BinaryMask::new(
            side,
            side,
            img.data().iter().map(|&v| v > 0).collect(),
        )
        .unwrap();
        RegionPatch::new(img, mask, (0, 0), 0.0, "disk#0".into()).unwrap()
    }

    /// 90-degree counterclockwise grid rotation of a patch (lossless).
    pub fn rotate90(patch: &RegionPatch) -> RegionPatch {
        let (w, h) = (patch.width(), patch.height());
        let img = GrayImage::from_fn(h, w, |x, y| patch.image.get(w - 1 - y, x));
        let mask_img = BinaryMask::new(
            h,
            w,
            (0..w * h)
                .map(|i| {
                    let (x, y) = (i % h, i / h);
                    patch.mask.get(w - 1 - y, x)
                })
                .collect(),
        )
        .unwrap();
        RegionPatch::new(img, mask_img, (0, 0), 0.0, patch.source_id.clone()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizer_two_point() {
        let s = Standardizer::fit(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(s.std, vec![1.0]);
        assert_eq!(s.apply(&[0.0]), vec![-1.0]);
    }

    #[test]
    fn standardizer_constant_dim_maps_to_zero() {
        let s = Standardizer::fit(&[vec![5.0, 1.0], vec![5.0, 3.0]]).unwrap();
        assert_eq!(s.apply(&[5.0, 1.0])[0], 0.0);
        assert!((s.apply(&[5.0, 1.0])[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn standardizer_train_set_recenters() {
        let data: Vec<Vec<f64>> =
            (0..20).map(|i| vec![i as f64 * 0.7 - 3.0, (i * i) as f64 * 0.01]).collect();
        let s = Standardizer::fit(&data).unwrap();
        let applied = s.apply_all(&data);
        for d in 0..2 {
            let mean: f64 = applied.iter().map(|v| v[d]).sum::<f64>() / applied.len() as f64;
            assert!(mean.abs() < 1e-9, "dim {d} mean {mean}");
        }
    }

    #[test]
    fn standardizer_rejects_single_sample() {
        assert!(matches!(
            Standardizer::fit(&[vec![1.0]]),
            Err(StandardizeError::TooFewSamples(1))
        ));
    }
}
