//! One candidate alga cut out of a source frame.

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage};

#[derive(Debug, Error)]
pub enum PatchError {
    #[error("patch image {0}x{1} and mask {2}x{3} dimensions differ")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("patch mask has no foreground pixels")]
    EmptyMask,
}

/// Cropped image + aligned mask + provenance.
///
/// `orientation_deg` records the orientation estimated for the region in its
/// source frame, in [-90, 90). After alignment the crop content itself sits
/// at 0 degrees; the field keeps the measured value.
#[derive(Debug, Clone)]
pub struct RegionPatch {
    pub image: GrayImage,
    pub mask: BinaryMask,
    /// Crop origin (x, y) in the source image.
    pub offset: (u32, u32),
    pub orientation_deg: f64,
    pub source_id: String,
}

impl RegionPatch {
    pub fn new(
        image: GrayImage,
        mask: BinaryMask,
        offset: (u32, u32),
        orientation_deg: f64,
        source_id: String,
    ) -> Result<Self, PatchError> {
        if image.width() != mask.width() || image.height() != mask.height() {
            return Err(PatchError::DimensionMismatch(
                image.width(),
                image.height(),
                mask.width(),
                mask.height(),
            ));
        }
        if mask.count_foreground() == 0 {
            return Err(PatchError::EmptyMask);
        }
        Ok(Self { image, mask, offset, orientation_deg, source_id })
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }

    /// Image with background (mask = false) forced to zero.
    pub fn masked_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width(), self.height(), |x, y| {
            if self.mask.get(x, y) {
                self.image.get(x, y)
            } else {
                0
            }
        })
    }
}
