//! Uniform local binary patterns (P = 8, R = 1): 58 uniform codes plus one
//! catch-all bin, L1-normalized over interior mask pixels.

use std::sync::OnceLock;

use crate::features::FeatureError;
use crate::patch::RegionPatch;

/// Neighbor offsets starting east, counterclockwise (y grows downward, so
/// counterclockwise steps move through north first).
const NEIGHBORS: [(i32, i32); 8] =
    [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];

/// Bin index per 8-bit code: uniform codes (at most 2 circular transitions)
/// in ascending order occupy bins 0..58, everything else maps to bin 58.
fn u2_table() -> &'static [u8; 256] {
    static TABLE: OnceLock<[u8; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [58u8; 256];
        let mut next = 0u8;
        for code in 0..256usize {
            let c = code as u8;
            let transitions = (c ^ c.rotate_right(1)).count_ones();
            if transitions <= 2 {
                table[code] = next;
                next += 1;
            }
        }
        debug_assert_eq!(next, 58);
        table
    })
}

pub fn lbp_histogram(patch: &RegionPatch) -> Result<[f64; 59], FeatureError> {
    let (w, h) = (patch.width(), patch.height());
    if w < 3 || h < 3 {
        return Err(FeatureError::PatchTooSmall(w, h, 3));
    }
    let table = u2_table();
    let mut hist = [0.0f64; 59];
    let mut total = 0.0f64;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            if !patch.mask.get(x, y) {
                continue;
            }
            let center = patch.image.get(x, y);
            let mut code = 0u8;
            for (k, (dx, dy)) in NEIGHBORS.iter().enumerate() {
                let nv = patch.image.get((x as i32 + dx) as u32, (y as i32 + dy) as u32);
                if nv >= center {
                    code |= 1 << k;
                }
            }
            hist[table[code as usize] as usize] += 1.0;
            total += 1.0;
        }
    }
    // A mask with no interior pixels yields the all-zero histogram.
    if total > 0.0 {
        for v in hist.iter_mut() {
            *v /= total;
        }
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_support::full_patch;
    use crate::image::{BinaryMask, GrayImage};

    /// Brute-force oracle: compute the code of one pixel directly from the
    /// definition, without the lookup table.
    fn oracle_code(img: &GrayImage, x: u32, y: u32) -> u8 {
        let c = img.get(x, y);
        let mut code = 0u8;
        for (k, (dx, dy)) in NEIGHBORS.iter().enumerate() {
            if img.get((x as i32 + dx) as u32, (y as i32 + dy) as u32) >= c {
                code |= 1 << k;
            }
        }
        code
    }

    fn is_uniform(c: u8) -> bool {
        (c ^ c.rotate_right(1)).count_ones() <= 2
    }

    #[test]
    fn table_has_58_uniform_codes() {
        let t = u2_table();
        let mut bins: Vec<u8> = (0..256).filter(|&c| is_uniform(c as u8)).map(|c| t[c]).collect();
        bins.sort_unstable();
        bins.dedup();
        assert_eq!(bins.len(), 58);
        assert!(t.iter().all(|&b| b <= 58));
    }

    #[test]
    fn constant_image_masses_one_bin() {
        let p = full_patch(GrayImage::filled(10, 10, 99));
        let hist = lbp_histogram(&p).unwrap();
        // All neighbors >= center, so every interior pixel codes 0b11111111.
        let bin = u2_table()[255] as usize;
        assert!((hist[bin] - 1.0).abs() < 1e-12);
        let sum: f64 = hist.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_sums_to_one_with_59_bins() {
        let p = full_patch(GrayImage::from_fn(20, 20, |x, y| ((x * 31 + y * 7) % 256) as u8));
        let hist = lbp_histogram(&p).unwrap();
        assert_eq!(hist.len(), 59);
        let sum: f64 = hist.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn checkerboard_matches_per_pixel_oracle() {
        // 2x2 checkerboard tiling: the interior codes alternate between two
        // patterns predicted by the brute-force oracle.
        let img = GrayImage::from_fn(12, 12, |x, y| if (x + y) % 2 == 0 { 30 } else { 220 });
        let p = full_patch(img.clone());
        let hist = lbp_histogram(&p).unwrap();
        let mut expected = [0.0f64; 59];
        let mut total = 0.0;
        for y in 1..11 {
            for x in 1..11 {
                let code = oracle_code(&img, x, y);
                expected[u2_table()[code as usize] as usize] += 1.0;
                total += 1.0;
            }
        }
        for v in expected.iter_mut() {
            *v /= total;
        }
        for (a, b) in hist.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        // And per the definition: dark centers pass >= for all 8 neighbors
        // (code 255, uniform); bright centers pass only on the 4 equal
        // diagonals (code 0b10101010, non-uniform -> catch-all bin 58).
        let dark_bin = u2_table()[255] as usize;
        assert_eq!(u2_table()[0b10101010], 58);
        assert!(hist[dark_bin] > 0.0);
        assert!(hist[58] > 0.0);
        assert!((hist[dark_bin] + hist[58] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_small_patch_rejected() {
        let p = full_patch(GrayImage::filled(2, 5, 10));
        assert!(matches!(lbp_histogram(&p), Err(FeatureError::PatchTooSmall(2, 5, 3))));
    }

    #[test]
    fn no_interior_centers_gives_zero_histogram() {
        let img = GrayImage::filled(5, 5, 7);
        let mut mask = BinaryMask::empty(5, 5);
        mask.set(0, 0, true); // only a border pixel
        let p = RegionPatch::new(img, mask, (0, 0), 0.0, "lbp#0".into()).unwrap();
        let hist = lbp_histogram(&p).unwrap();
        assert!(hist.iter().all(|&v| v == 0.0));
    }
}
