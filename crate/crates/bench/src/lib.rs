//! Deterministic synthetic inputs shared by the criterion benches.

use diledge::{GrayImage, RealPlane};

/// Cheap integer hash used as reproducible pixel noise.
fn hash(x: usize, y: usize, seed: u64) -> u64 {
    let mut h = (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F) ^ seed;
    h ^= h >> 33;
    h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    h ^ (h >> 33)
}

/// Uniform noise in `[0, 256)`.
pub fn noise_plane(width: usize, height: usize, seed: u64) -> RealPlane {
    RealPlane::from_fn(width, height, |x, y| (hash(x, y, seed) % 25_600) as f64 / 100.0)
}

/// A disc, a bar and a rectangle over a horizontal ramp with mild noise.
pub fn scene(width: usize, height: usize) -> GrayImage {
    let (cx, cy, r) = (
        width as f64 * 0.35,
        height as f64 * 0.45,
        width.min(height) as f64 * 0.2,
    );
    GrayImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let mut v = 40.0 + 60.0 * fx / width as f64;
        if (fx - cx).hypot(fy - cy) < r {
            v = 190.0;
        }
        if x > width * 6 / 10 && x < width * 8 / 10 && y > height / 5 && y < height * 4 / 5 {
            v = 150.0;
        }
        if y > height * 85 / 100 && y < height * 9 / 10 {
            v = 230.0;
        }
        let n = (hash(x, y, 7) % 9) as f64 - 4.0;
        (v + n).clamp(0.0, 255.0) as u8
    })
}
