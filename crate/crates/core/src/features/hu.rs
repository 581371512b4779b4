//! Hu's seven moment invariants over masked intensities.
//!
//! Raw invariants span tens of orders of magnitude, which would make
//! z-scoring meaningless, so each output is compressed with a signed log:
//! sign(phi) * log10(|phi| + 1e-30).

use crate::features::FeatureError;
use crate::patch::RegionPatch;

/// Dynamic-range floor inside the signed log transform.
const LOG_FLOOR: f64 = 1e-30;

pub fn hu_moments(patch: &RegionPatch) -> Result<[f64; 7], FeatureError> {
    let (w, h) = (patch.width(), patch.height());

    // Raw moments m00, m10, m01 over masked intensities.
    let mut m00 = 0.0;
    let mut m10 = 0.0;
    let mut m01 = 0.0;
    for y in 0..h {
        for x in 0..w {
            if patch.mask.get(x, y) {
                let f = patch.image.get(x, y) as f64;
                m00 += f;
                m10 += x as f64 * f;
                m01 += y as f64 * f;
            }
        }
    }
    if m00 <= 0.0 {
        return Err(FeatureError::EmptyMask);
    }
    let cx = m10 / m00;
    let cy = m01 / m00;

    // Central moments up to third order.
    let (mut mu20, mut mu02, mut mu11) = (0.0, 0.0, 0.0);
    let (mut mu30, mut mu03, mut mu21, mut mu12) = (0.0, 0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            if patch.mask.get(x, y) {
                let f = patch.image.get(x, y) as f64;
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                mu20 += dx * dx * f;
                mu02 += dy * dy * f;
                mu11 += dx * dy * f;
                mu30 += dx * dx * dx * f;
                mu03 += dy * dy * dy * f;
                mu21 += dx * dx * dy * f;
                mu12 += dx * dy * dy * f;
            }
        }
    }

    // Normalized central moments eta_pq = mu_pq / m00^(1 + (p+q)/2).
    let n2 = m00 * m00;
    let n3 = m00.powf(2.5);
    let e20 = mu20 / n2;
    let e02 = mu02 / n2;
    let e11 = mu11 / n2;
    let e30 = mu30 / n3;
    let e03 = mu03 / n3;
    let e21 = mu21 / n3;
    let e12 = mu12 / n3;

    let phi1 = e20 + e02;
    let phi2 = (e20 - e02).powi(2) + 4.0 * e11 * e11;
    let phi3 = (e30 - 3.0 * e12).powi(2) + (3.0 * e21 - e03).powi(2);
    let phi4 = (e30 + e12).powi(2) + (e21 + e03).powi(2);
    let phi5 = (e30 - 3.0 * e12)
        * (e30 + e12)
        * ((e30 + e12).powi(2) - 3.0 * (e21 + e03).powi(2))
        + (3.0 * e21 - e03) * (e21 + e03) * (3.0 * (e30 + e12).powi(2) - (e21 + e03).powi(2));
    let phi6 = (e20 - e02) * ((e30 + e12).powi(2) - (e21 + e03).powi(2))
        + 4.0 * e11 * (e30 + e12) * (e21 + e03);
    let phi7 = (3.0 * e21 - e03)
        * (e30 + e12)
        * ((e30 + e12).powi(2) - 3.0 * (e21 + e03).powi(2))
        - (e30 - 3.0 * e12) * (e21 + e03) * (3.0 * (e30 + e12).powi(2) - (e21 + e03).powi(2));

    Ok([phi1, phi2, phi3, phi4, phi5, phi6, phi7].map(signed_log))
}

fn signed_log(phi: f64) -> f64 {
    let sign = if phi < 0.0 { -1.0 } else { 1.0 };
    sign * (phi.abs() + LOG_FLOOR).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_support::{disk_patch, full_patch, rotate90};
    use crate::image::{BinaryMask, GrayImage};

    fn blob_patch(seed: u64) -> RegionPatch {
        // Irregular blob with intensity texture, deterministic from seed.
        let side = 40;
        let img = GrayImage::from_fn(side, side, |x, y| {
            let v = seed
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add((x as u64) << 32 | y as u64)
                .wrapping_mul(0xbf58476d1ce4e5b9);
            100 + ((v >> 48) % 100) as u8
        });
        let c = side as f64 / 2.0;
        let mask = BinaryMask::new(
            side,
            side,
            (0..side * side)
                .map(|i| {
                    let (x, y) = ((i % side) as f64, (i / side) as f64);
                    let angle = (y - c).atan2(x - c);
                    let r = ((x - c).powi(2) + (y - c).powi(2)).sqrt();
                    let wobble = 3.0 * (3.0 * angle + seed as f64).sin();
                    r < 12.0 + wobble
                })
                .collect(),
        )
        .unwrap();
        RegionPatch::new(img, mask, (0, 0), 0.0, format!("blob#{seed}")).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
    }

    #[test]
    fn rotation_90_exact_within_1e6() {
        for seed in 0..5 {
            let p = blob_patch(seed);
            let a = hu_moments(&p).unwrap();
            let b = hu_moments(&rotate90(&p)).unwrap();
            for i in 0..7 {
                assert!(rel_close(a[i], b[i], 1e-6), "phi{} {} vs {}", i + 1, a[i], b[i]);
            }
        }
    }

    #[test]
    fn translation_invariance_exact() {
        let p = blob_patch(3);
        let (w, h) = (p.width(), p.height());
        let mut img = GrayImage::filled(w + 17, h + 9, 0);
        let mut mask = BinaryMask::empty(w + 17, h + 9);
        for y in 0..h {
            for x in 0..w {
                img.set(x + 13, y + 5, p.image.get(x, y));
                mask.set(x + 13, y + 5, p.mask.get(x, y));
            }
        }
        let shifted = RegionPatch::new(img, mask, (0, 0), 0.0, "shifted#0".into()).unwrap();
        let a = hu_moments(&p).unwrap();
        let b = hu_moments(&shifted).unwrap();
        for i in 0..7 {
            assert!(rel_close(a[i], b[i], 1e-6), "phi{} {} vs {}", i + 1, a[i], b[i]);
        }
    }

    #[test]
    fn scale_invariance_within_2_percent() {
        let p = blob_patch(7);
        let (w, h) = (p.width(), p.height());
        // 2x nearest-neighbor upscale.
        let img = GrayImage::from_fn(2 * w, 2 * h, |x, y| p.image.get(x / 2, y / 2));
        let mask = BinaryMask::new(
            2 * w,
            2 * h,
            (0..4 * w * h)
                .map(|i| {
                    let (x, y) = (i % (2 * w), i / (2 * w));
                    p.mask.get(x / 2, y / 2)
                })
                .collect(),
        )
        .unwrap();
        let scaled = RegionPatch::new(img, mask, (0, 0), 0.0, "scaled#0".into()).unwrap();
        let a = hu_moments(&p).unwrap();
        let b = hu_moments(&scaled).unwrap();
        for i in 0..7 {
            assert!(rel_close(a[i], b[i], 0.02), "phi{} {} vs {}", i + 1, a[i], b[i]);
        }
    }

    #[test]
    fn mirror_flips_phi7_sign() {
        let p = blob_patch(11);
        let (w, h) = (p.width(), p.height());
        let img = GrayImage::from_fn(w, h, |x, y| p.image.get(w - 1 - x, y));
        let mask = BinaryMask::new(
            w,
            h,
            (0..w * h)
                .map(|i| {
                    let (x, y) = (i % w, i / w);
                    p.mask.get(w - 1 - x, y)
                })
                .collect(),
        )
        .unwrap();
        let mirrored = RegionPatch::new(img, mask, (0, 0), 0.0, "mirror#0".into()).unwrap();
        let a = hu_moments(&p).unwrap();
        let b = hu_moments(&mirrored).unwrap();
        assert!(a[6] * b[6] < 0.0, "phi7 sign must flip: {} vs {}", a[6], b[6]);
        assert!(rel_close(a[6].abs(), b[6].abs(), 1e-6));
        // The six symmetric invariants are preserved.
        for i in 0..6 {
            assert!(rel_close(a[i], b[i], 1e-6), "phi{} {} vs {}", i + 1, a[i], b[i]);
        }
    }

    #[test]
    fn empty_mask_rejected() {
        let img = GrayImage::filled(8, 8, 50);
        let mask = {
            let mut m = BinaryMask::empty(8, 8);
            m.set(3, 3, true);
            m
        };
        let mut p = RegionPatch::new(img, mask, (0, 0), 0.0, "t#0".into()).unwrap();
        // Zero intensity under the mask also counts as empty.
        p.image.set(3, 3, 0);
        assert!(matches!(hu_moments(&p), Err(FeatureError::EmptyMask)));
    }

    #[test]
    fn disk_and_full_patch_finite() {
        for p in [disk_patch(10, 3, 180), full_patch(GrayImage::from_fn(9, 9, |x, _| x as u8 + 1))]
        {
            let hu = hu_moments(&p).unwrap();
            assert!(hu.iter().all(|v| v.is_finite()));
        }
    }
}
