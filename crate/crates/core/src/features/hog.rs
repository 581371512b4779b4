//! Histogram of oriented gradients: 3x3 cells of 9 unsigned orientation
//! bins over a 48x48 resample of the masked patch, 81 values total.

use crate::patch::RegionPatch;

const SIDE: usize = 48;
const CELLS: usize = 3;
const CELL_PX: usize = SIDE / CELLS;
const BINS: usize = 9;
const BIN_WIDTH: f64 = 180.0 / BINS as f64;
const NORM_EPS: f64 = 1e-6;

pub fn hog_descriptor(patch: &RegionPatch) -> [f64; 81] {
    let resized = resize_masked(patch);

    // Per-cell orientation histograms with linear vote interpolation
    // between the two nearest bin centers (circular over 180 degrees).
    let mut cells = [[0.0f64; BINS]; CELLS * CELLS];
    for y in 0..SIDE {
        for x in 0..SIDE {
            let xm = resized[y * SIDE + x.max(1) - 1];
            let xp = resized[y * SIDE + (x + 1).min(SIDE - 1)];
            let ym = resized[(y.max(1) - 1) * SIDE + x];
            let yp = resized[(y + 1).min(SIDE - 1) * SIDE + x];
            let gx = (xp - xm) / 2.0;
            let gy = (yp - ym) / 2.0;
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let mut angle = gy.atan2(gx).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            if angle >= 180.0 {
                angle -= 180.0;
            }
            // Bin centers at k * 20 degrees; votes split linearly between
            // the two nearest centers, wrapping 180 back to 0.
            let pos = angle / BIN_WIDTH;
            let k0 = pos.floor();
            let frac = pos - k0;
            let b0 = (k0 as i64).rem_euclid(BINS as i64) as usize;
            let b1 = (b0 + 1) % BINS;
            let cell = (y / CELL_PX) * CELLS + x / CELL_PX;
            cells[cell][b0] += mag * (1.0 - frac);
            cells[cell][b1] += mag * frac;
        }
    }

    let mut out = [0.0f64; 81];
    for (c, hist) in cells.iter().enumerate() {
        let norm = (hist.iter().map(|v| v * v).sum::<f64>() + NORM_EPS * NORM_EPS).sqrt();
        for (b, &v) in hist.iter().enumerate() {
            out[c * BINS + b] = v / norm;
        }
    }
    out
}

/// Bilinear resample of the mask-zeroed patch to 48x48, in floats.
fn resize_masked(patch: &RegionPatch) -> Vec<f64> {
    let (w, h) = (patch.width() as usize, patch.height() as usize);
    let src: Vec<f64> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as u32, (i / w) as u32);
            if patch.mask.get(x, y) {
                patch.image.get(x, y) as f64
            } else {
                0.0
            }
        })
        .collect();
    let mut dst = vec![0.0; SIDE * SIDE];
    for oy in 0..SIDE {
        let sy = ((oy as f64 + 0.5) * h as f64 / SIDE as f64 - 0.5).clamp(0.0, (h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let fy = sy - y0 as f64;
        for ox in 0..SIDE {
            let sx = ((ox as f64 + 0.5) * w as f64 / SIDE as f64 - 0.5).clamp(0.0, (w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let fx = sx - x0 as f64;
            let top = src[y0 * w + x0] * (1.0 - fx) + src[y0 * w + x1] * fx;
            let bottom = src[y1 * w + x0] * (1.0 - fx) + src[y1 * w + x1] * fx;
            dst[oy * SIDE + ox] = top * (1.0 - fy) + bottom * fy;
        }
    }
    dst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_support::full_patch;
    use crate::image::GrayImage;

    #[test]
    fn constant_image_gives_all_zeros() {
        let p = full_patch(GrayImage::filled(30, 30, 128));
        let hog = hog_descriptor(&p);
        assert!(hog.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn output_length_is_81_and_finite() {
        let p = full_patch(GrayImage::from_fn(25, 37, |x, y| ((x * 7 + y * 13) % 256) as u8));
        let hog = hog_descriptor(&p);
        assert_eq!(hog.len(), 81);
        assert!(hog.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn vertical_step_edges_vote_into_zero_degree_bin() {
        // A vertical step in every cell: the gradient points along x, so the
        // bin whose center is 0 degrees takes the mass in every cell.
        let img = GrayImage::from_fn(48, 48, |x, _| if x % 16 < 8 { 40 } else { 210 });
        let p = full_patch(img);
        let hog = hog_descriptor(&p);
        for cell in 0..9 {
            let hist = &hog[cell * 9..(cell + 1) * 9];
            let total: f64 = hist.iter().sum();
            assert!(total > 0.0, "cell {cell} saw no gradient");
            assert!(
                hist[0] / total >= 0.8,
                "cell {cell}: 0-degree bin holds {:.2} of the mass",
                hist[0] / total
            );
        }
    }

    #[test]
    fn cell_norms_bounded_by_one() {
        let img = GrayImage::from_fn(64, 40, |x, y| ((x * x + y * 3) % 256) as u8);
        let p = full_patch(img);
        let hog = hog_descriptor(&p);
        for cell in 0..9 {
            let sumsq: f64 = hog[cell * 9..(cell + 1) * 9].iter().map(|v| v * v).sum();
            assert!(sumsq <= 1.0 + 1e-9, "cell {cell} norm {sumsq}");
        }
    }
}
