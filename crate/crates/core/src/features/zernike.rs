//! Zernike moment magnitudes on the unit disk.
//!
//! The patch is mapped onto the unit disk centered at the mask centroid with
//! radius equal to the farthest mask pixel, which normalizes translation and
//! scale; the magnitudes |A_nm| are rotation invariant. Intensities are
//! mass-normalized so a brighter copy of the same shape scores identically.

use crate::features::FeatureError;
use crate::patch::RegionPatch;

/// The 40 (n, m) index pairs, n ascending, m in {n mod 2, ..., n} step 2,
/// starting from (1, 1) and truncated inside order 11.
pub const ZERNIKE_ORDERS: [(u32, u32); 40] = build_orders();

const fn build_orders() -> [(u32, u32); 40] {
    let mut out = [(0u32, 0u32); 40];
    let mut k = 0;
    let mut n = 1u32; // starting at n = 1 skips the constant (0, 0) term
    while k < 40 {
        let mut m = n % 2;
        while m <= n && k < 40 {
            out[k] = (n, m);
            k += 1;
            m += 2;
        }
        n += 1;
    }
    out
}

pub fn zernike_moments(patch: &RegionPatch) -> Result<[f64; 40], FeatureError> {
    let (w, h) = (patch.width(), patch.height());

    // Mask centroid and normalization radius.
    let mut count = 0usize;
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    for y in 0..h {
        for x in 0..w {
            if patch.mask.get(x, y) {
                count += 1;
                sx += x as f64;
                sy += y as f64;
            }
        }
    }
    if count == 0 {
        return Err(FeatureError::EmptyMask);
    }
    let cx = sx / count as f64;
    let cy = sy / count as f64;
    let mut radius: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            if patch.mask.get(x, y) {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                radius = radius.max(d);
            }
        }
    }
    if radius == 0.0 {
        radius = 1.0; // single-pixel mask sits at the disk center
    }

    // Collect polar samples and intensity weights.
    let mut rho = Vec::with_capacity(count);
    let mut theta = Vec::with_capacity(count);
    let mut weight = Vec::with_capacity(count);
    let mut mass = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            if patch.mask.get(x, y) {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                let f = patch.image.get(x, y) as f64;
                rho.push((dx * dx + dy * dy).sqrt() / radius);
                theta.push(dy.atan2(dx));
                weight.push(f);
                mass += f;
            }
        }
    }
    if mass <= 0.0 {
        return Err(FeatureError::EmptyMask);
    }
    let inv_mass = 1.0 / mass;

    let mut out = [0.0f64; 40];
    for (k, &(n, m)) in ZERNIKE_ORDERS.iter().enumerate() {
        let coeffs = radial_coefficients(n, m);
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for i in 0..rho.len() {
            let r = radial_eval(&coeffs, n, rho[i]);
            let mt = m as f64 * theta[i];
            let fw = weight[i] * inv_mass;
            // conj(V_nm) = R_nm(rho) * exp(-i m theta)
            re += fw * r * mt.cos();
            im -= fw * r * mt.sin();
        }
        let scale = (n as f64 + 1.0) / std::f64::consts::PI;
        out[k] = scale * (re * re + im * im).sqrt();
    }
    Ok(out)
}

/// Coefficients c_s of R_nm(rho) = sum_s c_s rho^(n-2s).
fn radial_coefficients(n: u32, m: u32) -> Vec<f64> {
    let top = (n - m) / 2;
    let bot = (n + m) / 2;
    (0..=top)
        .map(|s| {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(n - s) / (factorial(s) * factorial(bot - s) * factorial(top - s))
        })
        .collect()
}

fn radial_eval(coeffs: &[f64], n: u32, rho: f64) -> f64 {
    let mut acc = 0.0;
    for (s, &c) in coeffs.iter().enumerate() {
        acc += c * rho.powi((n - 2 * s as u32) as i32);
    }
    acc
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|v| v as f64).product()
}
