// scratch probe for zernike disk magnitudes
use coenocount_core::features::{zernike_moments, ZERNIKE_ORDERS};
use coenocount_core::image::{BinaryMask, GrayImage};
use coenocount_core::patch::RegionPatch;

fn disk(radius: u32, fill: u8) -> RegionPatch {
    let side = 2 * (radius + 3) + 1;
    let c = (radius + 3) as f64;
    let r2 = (radius as f64) * (radius as f64);
    let img = GrayImage::from_fn(side, side, |x, y| {
        let dx = x as f64 - c; let dy = y as f64 - c;
        if dx * dx + dy * dy <= r2 { fill } else { 0 }
    });
    let mask = BinaryMask::new(side, side, img.data().iter().map(|&v| v > 0).collect()).unwrap();
    RegionPatch::new(img, mask, (0, 0), 0.0, "d#0".into()).unwrap()
}

fn main() {
    for r in [10u32, 20, 40] {
        let z = zernike_moments(&disk(r, 200)).unwrap();
        println!("radius {r}:");
        for (k, &(n, m)) in ZERNIKE_ORDERS.iter().enumerate() {
            if m != 0 {
                println!("  ({n},{m}) -> {:.3e}", z[k]);
            }
        }
    }
}
