//! Contrast equalization, color quantization, and global thresholding.
//!
//! The three steps turn a raw microscope frame into a foreground mask seed:
//! CLAHE evens out illumination, posterization collapses the intensity
//! alphabet so algae separate from background, and Otsu's threshold
//! binarizes the result. Algae are darker than the background, so
//! [`binarize`] keeps pixels at or below the threshold.

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("image {0}x{1} smaller than one {2}x{3} tile grid")]
    ImageSmallerThanTile(u32, u32, u32, u32),
    #[error("image has a single intensity; no threshold separates two classes")]
    AllSameIntensity,
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

/// CLAHE tiling and clip limit. The clip limit is a multiple of the uniform
/// bin height (tile pixels / 256).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaheConfig {
    pub tiles_x: u32,
    pub tiles_y: u32,
    pub clip_limit: f64,
}

impl Default for ClaheConfig {
    fn default() -> Self {
        Self { tiles_x: 8, tiles_y: 8, clip_limit: 2.0 }
    }
}

impl ClaheConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.tiles_x < 1 || self.tiles_y < 1 {
            return Err(PreprocessError::BadConfig("CLAHE tiles must be >= 1".into()));
        }
        if !(self.clip_limit > 0.0) {
            return Err(PreprocessError::BadConfig("CLAHE clip limit must be > 0".into()));
        }
        Ok(())
    }
}

/// Number of quantization steps n_L; the output alphabet has n_L + 1 levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizationLevels(u8);

impl QuantizationLevels {
    pub fn new(n_l: u8) -> Result<Self, PreprocessError> {
        if n_l == 0 {
            return Err(PreprocessError::BadConfig("quantization levels must be >= 1".into()));
        }
        Ok(Self(n_l))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for QuantizationLevels {
    fn default() -> Self {
        Self(3)
    }
}

/// Rounds half away from zero, the convention used throughout this pipeline.
#[inline]
fn round_half_away(v: f64) -> f64 {
    v.round()
}

/// Contrast-limited adaptive histogram equalization.
///
/// Per-tile histograms are clipped at `clip_limit * (tile pixels / 256)` and
/// the excess is redistributed uniformly over all bins. Each tile's mapping
/// is the normalized CDF; per-pixel output bilinearly interpolates the four
/// neighboring tile mappings, clamping at the borders.
pub fn clahe(img: &GrayImage, cfg: &ClaheConfig) -> Result<GrayImage, PreprocessError> {
    cfg.validate()?;
    let (w, h) = (img.width(), img.height());
    if w < cfg.tiles_x || h < cfg.tiles_y {
        return Err(PreprocessError::ImageSmallerThanTile(w, h, cfg.tiles_x, cfg.tiles_y));
    }
    let tiles_x = cfg.tiles_x as usize;
    let tiles_y = cfg.tiles_y as usize;
    let tile_w = (w as usize).div_ceil(tiles_x);
    let tile_h = (h as usize).div_ceil(tiles_y);

    // One LUT per tile.
    let mut luts = vec![[0u8; 256]; tiles_x * tiles_y];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let x0 = tx * tile_w;
            let y0 = ty * tile_h;
            let x1 = ((tx + 1) * tile_w).min(w as usize);
            let y1 = ((ty + 1) * tile_h).min(h as usize);
            let mut hist = [0u64; 256];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[img.get(x as u32, y as u32) as usize] += 1;
                }
            }
            let n = ((x1 - x0) * (y1 - y0)) as u64;
            luts[ty * tiles_x + tx] = tile_lut(&hist, n, cfg.clip_limit);
        }
    }

    // Bilinear interpolation between the four nearest tile mappings.
    let mut out = GrayImage::filled(w, h, 0);
    for y in 0..h {
        let tyf = (y as f64 + 0.5) / tile_h as f64 - 0.5;
        let ty0 = tyf.floor();
        let fy = tyf - ty0;
        let ty0 = (ty0 as i64).clamp(0, tiles_y as i64 - 1) as usize;
        let ty1 = (ty0 + 1).min(tiles_y - 1);
        for x in 0..w {
            let txf = (x as f64 + 0.5) / tile_w as f64 - 0.5;
            let tx0 = txf.floor();
            let fx = txf - tx0;
            let tx0 = (tx0 as i64).clamp(0, tiles_x as i64 - 1) as usize;
            let tx1 = (tx0 + 1).min(tiles_x - 1);
            let v = img.get(x, y) as usize;
            let tl = luts[ty0 * tiles_x + tx0][v] as f64;
            let tr = luts[ty0 * tiles_x + tx1][v] as f64;
            let bl = luts[ty1 * tiles_x + tx0][v] as f64;
            let br = luts[ty1 * tiles_x + tx1][v] as f64;
            let top = tl * (1.0 - fx) + tr * fx;
            let bottom = bl * (1.0 - fx) + br * fx;
            let mixed = top * (1.0 - fy) + bottom * fy;
            out.set(x, y, round_half_away(mixed).clamp(0.0, 255.0) as u8);
        }
    }
    Ok(out)
}

/// Clips a tile histogram at `clip_limit * n / 256` and spreads the excess
/// uniformly: every bin gains `excess / 256`, the first `excess % 256` bins
/// one more. No bin ends above clip + excess/256 + 1.
pub(crate) fn clip_and_redistribute(hist: &[u64; 256], n: u64, clip_limit: f64) -> [u64; 256] {
    let mut hist = *hist;
    let clip = ((clip_limit * n as f64 / 256.0).floor() as u64).max(1);
    let mut excess = 0u64;
    for bin in hist.iter_mut() {
        if *bin > clip {
            excess += *bin - clip;
            *bin = clip;
        }
    }
    let batch = excess / 256;
    let residue = (excess % 256) as usize;
    for (i, bin) in hist.iter_mut().enumerate() {
        *bin += batch;
        if i < residue {
            *bin += 1;
        }
    }
    hist
}

/// Clipped, redistributed histogram -> normalized-CDF lookup table.
fn tile_lut(hist: &[u64; 256], n: u64, clip_limit: f64) -> [u8; 256] {
    let hist = clip_and_redistribute(hist, n, clip_limit);
    let mut lut = [0u8; 256];
    let mut cdf = [0u64; 256];
    let mut acc = 0u64;
    let mut cdf_min = 0u64;
    for i in 0..256 {
        acc += hist[i];
        cdf[i] = acc;
        if cdf_min == 0 && hist[i] > 0 {
            cdf_min = acc;
        }
    }
    if n == cdf_min {
        // Degenerate tile: all mass in one bin and no clipping spread.
        for (i, l) in lut.iter_mut().enumerate() {
            *l = i as u8;
        }
        return lut;
    }
    let denom = (n - cdf_min) as f64;
    for i in 0..256 {
        let v = round_half_away((cdf[i].saturating_sub(cdf_min)) as f64 / denom * 255.0);
        lut[i] = v.clamp(0.0, 255.0) as u8;
    }
    lut
}

/// Color quantization: v -> round(round(v * n_L / 255) * (255 / n_L)),
/// rounding half away from zero. For n_L = 3 the output alphabet is exactly
/// {0, 85, 170, 255}.
pub fn posterize(img: &GrayImage, q: QuantizationLevels) -> GrayImage {
    let n_l = q.get() as f64;
    let mut lut = [0u8; 256];
    for (v, out) in lut.iter_mut().enumerate() {
        let step = round_half_away(v as f64 * n_l / 255.0);
        *out = round_half_away(step * (255.0 / n_l)).clamp(0.0, 255.0) as u8;
    }
    GrayImage::from_fn(img.width(), img.height(), |x, y| lut[img.get(x, y) as usize])
}

/// Otsu's threshold: maximizes the between-class variance over the 256-bin
/// histogram, breaking ties toward the smallest threshold.
///
/// The comparison is exact (128-bit rational cross-multiplication) whenever
/// the products fit, which covers images up to several hundred thousand
/// pixels; larger images fall back to f64 which is indistinguishable in
/// practice.
pub fn otsu_threshold(img: &GrayImage) -> Result<u8, PreprocessError> {
    let hist = img.histogram();
    otsu_from_histogram(&hist)
}

pub fn otsu_from_histogram(hist: &[u64; 256]) -> Result<u8, PreprocessError> {
    let distinct = hist.iter().filter(|&&c| c > 0).count();
    if distinct < 2 {
        return Err(PreprocessError::AllSameIntensity);
    }
    let n: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();

    // sigma_B^2(t) = (S0*w1 - S1*w0)^2 / (w0*w1), compared as fractions.
    let exact = exact_comparison_fits(n);
    let mut best_t = 0u8;
    let mut best: Option<(i128, u128, f64)> = None; // (numerator sqrt, denom, f64 score)
    let mut w0 = 0u64;
    let mut s0 = 0u64;
    for t in 0..=254u32 {
        w0 += hist[t as usize];
        s0 += t as u64 * hist[t as usize];
        let w1 = n - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let s1 = total_sum - s0;
        let a = s0 as i128 * w1 as i128 - s1 as i128 * w0 as i128;
        let denom = w0 as u128 * w1 as u128;
        let score = {
            let af = a as f64;
            af * af / denom as f64
        };
        let better = match &best {
            None => true,
            Some((ba, bd, bscore)) => {
                if exact {
                    // a^2/denom > ba^2/bd  <=>  a^2*bd > ba^2*denom
                    a.unsigned_abs().pow(2) * bd > ba.unsigned_abs().pow(2) * denom
                } else {
                    score > *bscore
                }
            }
        };
        if better {
            best = Some((a, denom, score));
            best_t = t as u8;
        }
    }
    Ok(best_t)
}

// |a| <= 255 n^2 and denom <= n^2/4, so the cross products stay below
// 65025 n^6 / 4; that fits u128 up to roughly n = 4.6e5 pixels.
fn exact_comparison_fits(n: u64) -> bool {
    n <= 400_000
}

/// Foreground = pixels at or below the threshold (algae are darker than the
/// posterized background).
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryMask {
    BinaryMask::new(
        img.width(),
        img.height(),
        img.data().iter().map(|&v| v <= threshold).collect(),
    )
    .expect("dimensions come from a valid image")
}
