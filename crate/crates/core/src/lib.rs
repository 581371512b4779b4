//! Batch analysis of *Scenedesmus* coenobia in grayscale microscope frames.
//!
//! The pipeline stages, each in its own module:
//!
//! 1. **preprocess** - CLAHE, color quantization, Otsu binarization.
//! 2. **contour / segment** - contour hierarchy, candidate selection,
//!    spectrum-based alignment, active-contour border refinement.
//! 3. **features** - Hu moments, HOG, Zernike moments, uniform LBP and
//!    Haralick statistics assembled into a 215-dimensional vector.
//! 4. **select** - sequential forward selection with an exhaustive choice
//!    of the best feature-prefix length.
//! 5. **classify** - one-vs-one soft-margin SVM (SMO) and a two-hidden-layer
//!    MLP, each with its hyperparameter grid search.
//! 6. **evaluate** - Hoover region metrics, pixel precision/recall/F,
//!    stratified k-fold cross-validation.
//! 7. **synth** - deterministic synthetic coenobium generator used for
//!    end-to-end validation.

pub mod contour;
pub mod dataset;
pub mod image;
pub mod patch;
pub mod features;
pub mod preprocess;

pub use contour::{find_contours, Contour, ContourForest, ContourId};
pub use dataset::{
    read_manifest, write_manifest, FeatureVector, LabelClass, LabeledDataset, ManifestEntry,
    Sample, FEATURE_DIM,
};
pub use image::{load_image, save_pgm, BinaryMask, GrayImage};
pub use patch::RegionPatch;
