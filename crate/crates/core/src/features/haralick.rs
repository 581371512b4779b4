//! Haralick texture statistics from gray-level co-occurrence matrices.
//!
//! Intensities quantize to 8 levels (v >> 5). Symmetric, normalized GLCMs
//! are built at distance 1 for 0, 45, 90 and 135 degrees, skipping pairs
//! that leave the mask. The output is the 14 classic statistics averaged
//! over the four directions followed by their ranges (max - min), 28 total.
//!
//! Conventions: levels are 0-based, entropies use the natural log, and the
//! sum-variance statistic centers on the sum average (the usual reading of
//! the original definition). The 14th statistic, the maximal correlation
//! coefficient, is the square root of the second-largest eigenvalue of the
//! Q matrix, computed through a symmetric similarity transform.

use crate::features::FeatureError;
use crate::patch::RegionPatch;

const LEVELS: usize = 8;

/// Displacements for 0, 45, 90, 135 degrees at distance 1.
const DIRECTIONS: [(i32, i32); 4] = [(1, 0), (1, -1), (0, -1), (-1, -1)];

pub fn haralick_features(patch: &RegionPatch) -> Result<[f64; 28], FeatureError> {
    let (w, h) = (patch.width(), patch.height());
    if w < 2 || h < 2 {
        return Err(FeatureError::PatchTooSmall(w, h, 2));
    }
    let mut per_direction = [[0.0f64; 14]; 4];
    for (d, &dir) in DIRECTIONS.iter().enumerate() {
        let glcm = glcm(patch, dir)?;
        per_direction[d] = statistics(&glcm);
    }
    let mut out = [0.0f64; 28];
    for f in 0..14 {
        let vals = [
            per_direction[0][f],
            per_direction[1][f],
            per_direction[2][f],
            per_direction[3][f],
        ];
        let mean = vals.iter().sum::<f64>() / 4.0;
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        out[f] = mean;
        out[14 + f] = max - min;
    }
    Ok(out)
}

/// The 14 statistics for a single direction; exposed so tests and callers
/// can check per-direction values against closed forms.
pub fn haralick_stats_for_direction(
    patch: &RegionPatch,
    direction_index: usize,
) -> Result<[f64; 14], FeatureError> {
    let glcm = glcm(patch, DIRECTIONS[direction_index])?;
    Ok(statistics(&glcm))
}

/// Symmetric normalized co-occurrence matrix for one displacement. Both
/// pixels of a pair must be inside the mask.
fn glcm(patch: &RegionPatch, (dx, dy): (i32, i32)) -> Result<[[f64; LEVELS]; LEVELS], FeatureError> {
    let (w, h) = (patch.width() as i32, patch.height() as i32);
    let mut counts = [[0u64; LEVELS]; LEVELS];
    let mut total = 0u64;
    for y in 0..h {
        for x in 0..w {
            if !patch.mask.get(x as u32, y as u32) {
                continue;
            }
            let nx = x + dx;
            let ny = y + dy;
            if nx < 0 || ny < 0 || nx >= w || ny >= h || !patch.mask.get(nx as u32, ny as u32) {
                continue;
            }
            let a = (patch.image.get(x as u32, y as u32) >> 5) as usize;
            let b = (patch.image.get(nx as u32, ny as u32) >> 5) as usize;
            counts[a][b] += 1;
            counts[b][a] += 1;
            total += 2;
        }
    }
    if total == 0 {
        return Err(FeatureError::NoValidPairs);
    }
    let mut p = [[0.0f64; LEVELS]; LEVELS];
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            p[i][j] = counts[i][j] as f64 / total as f64;
        }
    }
    Ok(p)
}

fn statistics(p: &[[f64; LEVELS]; LEVELS]) -> [f64; 14] {
    let n = LEVELS;
    // Marginals (equal for a symmetric matrix, kept separate for clarity).
    let mut px = [0.0; LEVELS];
    let mut py = [0.0; LEVELS];
    for i in 0..n {
        for j in 0..n {
            px[i] += p[i][j];
            py[j] += p[i][j];
        }
    }
    let mut p_sum = [0.0; 2 * LEVELS - 1]; // indexed by i + j
    let mut p_diff = [0.0; LEVELS]; // indexed by |i - j|
    for i in 0..n {
        for j in 0..n {
            p_sum[i + j] += p[i][j];
            p_diff[i.abs_diff(j)] += p[i][j];
        }
    }

    let mean_x: f64 = px.iter().enumerate().map(|(i, &v)| i as f64 * v).sum();
    let mean_y: f64 = py.iter().enumerate().map(|(j, &v)| j as f64 * v).sum();
    let var_x: f64 = px.iter().enumerate().map(|(i, &v)| (i as f64 - mean_x).powi(2) * v).sum();
    let var_y: f64 = py.iter().enumerate().map(|(j, &v)| (j as f64 - mean_y).powi(2) * v).sum();
    let std_x = var_x.sqrt();
    let std_y = var_y.sqrt();

    // f1 angular second moment
    let asm: f64 = p.iter().flatten().map(|v| v * v).sum();
    // f2 contrast
    let mut contrast = 0.0;
    for i in 0..n {
        for j in 0..n {
            contrast += ((i as f64 - j as f64).powi(2)) * p[i][j];
        }
    }
    // f3 correlation
    let correlation = if std_x > 1e-12 && std_y > 1e-12 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += i as f64 * j as f64 * p[i][j];
            }
        }
        (acc - mean_x * mean_y) / (std_x * std_y)
    } else {
        0.0
    };
    // f4 sum of squares: variance
    let variance: f64 = {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (i as f64 - mean_x).powi(2) * p[i][j];
            }
        }
        acc
    };
    // f5 inverse difference moment
    let mut idm = 0.0;
    for i in 0..n {
        for j in 0..n {
            idm += p[i][j] / (1.0 + (i as f64 - j as f64).powi(2));
        }
    }
    // f6 sum average
    let sum_avg: f64 = p_sum.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
    // f7 sum variance (centered on the sum average)
    let sum_var: f64 =
        p_sum.iter().enumerate().map(|(k, &v)| (k as f64 - sum_avg).powi(2) * v).sum();
    // f8 sum entropy
    let sum_entropy: f64 = -p_sum.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>();
    // f9 entropy
    let entropy: f64 =
        -p.iter().flatten().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>();
    // f10 difference variance
    let diff_mean: f64 = p_diff.iter().enumerate().map(|(k, &v)| k as f64 * v).sum();
    let diff_var: f64 =
        p_diff.iter().enumerate().map(|(k, &v)| (k as f64 - diff_mean).powi(2) * v).sum();
    // f11 difference entropy
    let diff_entropy: f64 =
        -p_diff.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>();
    // f12, f13 information measures of correlation
    let hx: f64 = -px.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>();
    let hy: f64 = -py.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>();
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let q = px[i] * py[j];
            if q > 0.0 {
                if p[i][j] > 0.0 {
                    hxy1 -= p[i][j] * q.ln();
                }
                hxy2 -= q * q.ln();
            }
        }
    }
    let imc1 = if hx.max(hy) > 1e-12 { (entropy - hxy1) / hx.max(hy) } else { 0.0 };
    let imc2 = (1.0 - (-2.0 * (hxy2 - entropy)).exp()).max(0.0).sqrt();
    // f14 maximal correlation coefficient
    let mcc = maximal_correlation(p, &px, &py);

    [
        asm,
        contrast,
        correlation,
        variance,
        idm,
        sum_avg,
        sum_var,
        sum_entropy,
        entropy,
        diff_var,
        diff_entropy,
        imc1,
        imc2,
        mcc,
    ]
}

/// sqrt of the second-largest eigenvalue of Q(i,j) = sum_k p(i,k) p(j,k) /
/// (px(i) py(k)). Q is similar to the symmetric matrix B(i,j) = sum_k
/// p(i,k) p(j,k) / (sqrt(px(i) px(j)) py(k)) so a Jacobi sweep on B
/// suffices.
fn maximal_correlation(p: &[[f64; LEVELS]; LEVELS], px: &[f64; LEVELS], py: &[f64; LEVELS]) -> f64 {
    let support: Vec<usize> = (0..LEVELS).filter(|&i| px[i] > 0.0).collect();
    let m = support.len();
    if m < 2 {
        return 0.0;
    }
    let mut b = vec![vec![0.0f64; m]; m];
    for (a, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            let mut acc = 0.0;
            for &k in &support {
                if py[k] > 0.0 {
                    acc += p[i][k] * p[j][k] / py[k];
                }
            }
            b[a][c] = acc / (px[i] * px[j]).sqrt();
        }
    }
    let mut eig = jacobi_eigenvalues(&mut b);
    eig.sort_by(|x, y| y.total_cmp(x));
    eig[1].max(0.0).sqrt()
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(a: &mut [Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for pq in 0..n {
            for qq in pq + 1..n {
                if a[pq][qq].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[qq][qq] - a[pq][pq]) / (2.0 * a[pq][qq]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][pq];
                    let akq = a[k][qq];
                    a[k][pq] = c * akp - s * akq;
                    a[k][qq] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[pq][k];
                    let aqk = a[qq][k];
                    a[pq][k] = c * apk - s * aqk;
                    a[qq][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
