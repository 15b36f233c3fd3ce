//! Image planes, border-aware convolution, scaling and global thresholding.

mod convolve;
mod io;

pub use convolve::{
    convolve_dense, convolve_sparse, convolve_sparse_counted, gaussian_blur, gaussian_blur_sized, BorderPolicy,
};
pub use io::{load_gray, load_rgb, save_edges, save_gray, save_plane};

use crate::error::{Error, Result};

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(GrayImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage::new(width, height, vec![value; width * height]).expect("non-empty dimensions")
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        GrayImage::new(width, height, pixels).expect("non-empty dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn max(&self) -> u8 {
        self.pixels.iter().copied().max().unwrap_or(0)
    }

    pub fn to_plane(&self) -> RealPlane {
        RealPlane {
            width: self.width,
            height: self.height,
            values: self.pixels.iter().map(|&p| p as f64).collect(),
        }
    }
}

/// Signed real-valued plane holding intermediate responses.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("plane", format!("non-finite value at index {i}")));
        }
        Ok(RealPlane { width, height, values })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        RealPlane::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be positive");
        RealPlane {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        RealPlane::new(width, height, values).expect("finite values and non-empty dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealPlane {
        RealPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn zip_map(&self, other: &RealPlane, f: impl Fn(f64, f64) -> f64) -> RealPlane {
        debug_assert_eq!((self.width, self.height), (other.width, other.height));
        RealPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Tab-separated text grid, one image row per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for row in self.values.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Binary boundary map. Serialized as 0 / 255.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl EdgeMap {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(EdgeMap { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        EdgeMap::new(width, height, vec![false; width * height]).expect("non-empty dimensions")
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        EdgeMap::new(width, height, bits).expect("non-empty dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Coordinates `(x, y)` of set pixels in raster order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }

    pub fn is_subset_of(&self, other: &EdgeMap) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &EdgeMap) -> Result<EdgeMap> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(EdgeMap {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect(),
        })
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    /// Any nonzero pixel counts as boundary.
    pub fn from_gray(img: &GrayImage) -> EdgeMap {
        EdgeMap {
            width: img.width,
            height: img.height,
            bits: img.pixels.iter().map(|&p| p != 0).collect(),
        }
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::param("dimensions", format!("{width}x{height} is empty")));
    }
    if width * height != len {
        return Err(Error::param(
            "dimensions",
            format!("{width}x{height} needs {} samples, got {len}", width * height),
        ));
    }
    Ok(())
}

/// BT.601 luma, rounded: `0.299 R + 0.587 G + 0.114 B`.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    y.round().clamp(0.0, 255.0) as u8
}

/// Converts interleaved samples (1, 3 or 4 channels; alpha ignored) to gray.
pub fn gray_from_interleaved(width: usize, height: usize, channels: u8, data: &[u8]) -> Result<GrayImage> {
    let pixels = match channels {
        1 => data.to_vec(),
        3 | 4 => data
            .chunks_exact(channels as usize)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect(),
        n => return Err(Error::UnsupportedChannels(n)),
    };
    GrayImage::new(width, height, pixels)
}

/// Gray conversion for an 8-bit RGB image.
pub fn to_grayscale(rgb: &image::RgbImage) -> GrayImage {
    let (w, h) = rgb.dimensions();
    gray_from_interleaved(w as usize, h as usize, 3, rgb.as_raw()).expect("rgb buffer matches dimensions")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    /// `clamp(|v|, 0, 255)`
    ClampAbs,
    /// `clamp(v / 2 + 128, 0, 255)`
    ShiftHalf,
    /// `255 |v| / max|v|`; a plane whose peak is at most [`FLAT_PEAK`] maps to zero.
    NormalizeMax,
}

/// Peak magnitude below which a response counts as flat: rounding residue
/// of zero-sum masks on constant input is far smaller than one gray level.
pub const FLAT_PEAK: f64 = 1e-6;

pub fn scale_to_byte(p: &RealPlane, mode: ScaleMode) -> GrayImage {
    let peak = if mode == ScaleMode::NormalizeMax {
        p.max_abs()
    } else {
        0.0
    };
    let pixels = p
        .values
        .iter()
        .map(|&v| {
            let s = match mode {
                ScaleMode::ClampAbs => v.abs(),
                ScaleMode::ShiftHalf => v / 2.0 + 128.0,
                ScaleMode::NormalizeMax if peak > FLAT_PEAK => 255.0 * v.abs() / peak,
                ScaleMode::NormalizeMax => 0.0,
            };
            s.clamp(0.0, 255.0).round() as u8
        })
        .collect();
    GrayImage {
        width: p.width,
        height: p.height,
        pixels,
    }
}

/// Marks every pixel `>= thr`.
pub fn threshold_global(img: &GrayImage, thr: u8) -> EdgeMap {
    EdgeMap {
        width: img.width,
        height: img.height,
        bits: img.pixels.iter().map(|&p| p >= thr).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_extremes_and_red() {
        assert_eq!(luma(255, 255, 255), 255);
        assert_eq!(luma(0, 0, 0), 0);
        assert_eq!(luma(255, 0, 0), 76);
    }

    #[test]
    fn interleaved_rejects_two_channels() {
        assert!(matches!(
            gray_from_interleaved(1, 1, 2, &[0, 0]),
            Err(Error::UnsupportedChannels(2))
        ));
        let g = gray_from_interleaved(2, 1, 4, &[255, 0, 0, 9, 0, 0, 0, 9]).unwrap();
        assert_eq!(g.pixels(), &[76, 0]);
    }

    #[test]
    fn plane_rejects_nan() {
        assert!(RealPlane::new(1, 1, vec![f64::NAN]).is_err());
        assert!(RealPlane::new(2, 1, vec![0.0]).is_err());
    }

    #[test]
    fn scale_modes() {
        let p = RealPlane::new(4, 1, vec![0.0, -250.0, 300.0, -300.0]).unwrap();
        assert_eq!(scale_to_byte(&p, ScaleMode::ClampAbs).pixels(), &[0, 250, 255, 255]);
        assert_eq!(scale_to_byte(&p, ScaleMode::ShiftHalf).pixels(), &[128, 3, 255, 0]);
        assert_eq!(scale_to_byte(&p, ScaleMode::NormalizeMax).pixels(), &[0, 213, 255, 255]);
        let z = RealPlane::zeros(3, 3);
        assert!(scale_to_byte(&z, ScaleMode::ClampAbs).pixels().iter().all(|&v| v == 0));
        assert!(scale_to_byte(&z, ScaleMode::NormalizeMax)
            .pixels()
            .iter()
            .all(|&v| v == 0));
    }

    #[test]
    fn threshold_is_inclusive() {
        let img = GrayImage::filled(3, 3, 50);
        assert_eq!(threshold_global(&img, 50).count(), 9);
        assert_eq!(threshold_global(&img, 0).count(), 9);
        let dim = GrayImage::filled(3, 3, 200);
        assert!(threshold_global(&dim, 255).is_empty());
    }

    #[test]
    fn edge_map_round_trips_through_gray() {
        let e = EdgeMap::from_fn(4, 3, |x, y| (x + y) % 2 == 0);
        let g = e.to_gray();
        assert!(g.pixels().iter().all(|&p| p == 0 || p == 255));
        assert_eq!(EdgeMap::from_gray(&g), e);
    }
}
