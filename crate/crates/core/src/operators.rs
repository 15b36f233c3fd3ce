//! Raw edge responses: orthogonal gradients, compass maxima, Frei-Chen
//! projections and second-order (Laplace / LoG) responses.

use crate::error::{Error, Result};
use crate::imgproc::{convolve_sparse, gaussian_blur, BorderPolicy, RealPlane};
use crate::kernels::{
    build_log, compass_set, dilate, frei_chen_basis, gaussian_support, rotate_orthogonal, Family, Kernel,
    LaplaceVariant, LogMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MagnitudeMode {
    /// `sqrt(gx^2 + gy^2)`
    #[default]
    Exact,
    /// `|gx| + |gy|`
    Approx,
}

impl MagnitudeMode {
    #[inline]
    pub fn combine(self, gx: f64, gy: f64) -> f64 {
        match self {
            MagnitudeMode::Exact => gx.hypot(gy),
            MagnitudeMode::Approx => gx.abs() + gy.abs(),
        }
    }
}

/// Per-pixel gradient components and derived quantities.
#[derive(Debug, Clone)]
pub struct GradientMap {
    pub gx: RealPlane,
    pub gy: RealPlane,
    pub magnitude: RealPlane,
    /// `atan2(gx, gy)` in `(-pi, pi]`.
    pub orientation: RealPlane,
    /// `true` marks a vertical edge (`|gx| >= |gy|`), `false` a horizontal one.
    pub vertical: Vec<bool>,
}

impl GradientMap {
    pub fn is_vertical(&self, x: usize, y: usize) -> bool {
        self.vertical[y * self.gx.width() + x]
    }
}

fn require_family(k: &Kernel, expected: Family) -> Result<()> {
    if k.family() == expected {
        Ok(())
    } else {
        Err(Error::WrongFamily {
            name: k.name().to_string(),
            found: k.family().as_str(),
            expected: expected.as_str(),
        })
    }
}

fn correlate(img: &RealPlane, k: &Kernel) -> RealPlane {
    convolve_sparse(img, &k.sparse(), BorderPolicy::Replicate)
}

/// Applies an orthogonal x-axis mask and its 90-degree companion.
pub fn gradient_orthogonal(img: &RealPlane, base: &Kernel, mode: MagnitudeMode) -> Result<GradientMap> {
    require_family(base, Family::Orthogonal)?;
    let gx = correlate(img, base);
    let gy = correlate(img, &rotate_orthogonal(base));
    Ok(gradient_from_components(gx, gy, mode))
}

pub fn gradient_from_components(gx: RealPlane, gy: RealPlane, mode: MagnitudeMode) -> GradientMap {
    let magnitude = gx.zip_map(&gy, |a, b| mode.combine(a, b));
    let orientation = gx.zip_map(&gy, f64::atan2);
    let vertical = gx
        .values()
        .iter()
        .zip(gy.values())
        .map(|(a, b)| a.abs() >= b.abs())
        .collect();
    GradientMap {
        gx,
        gy,
        magnitude,
        orientation,
        vertical,
    }
}

#[derive(Debug, Clone)]
pub struct CompassResponse {
    pub magnitude: RealPlane,
    /// Rotation index in `0..8` of the winning kernel.
    pub best_index: Vec<u8>,
}

/// Maximum response over the eight compass rotations; the lowest index wins ties.
pub fn compass_gradient(img: &RealPlane, base: &Kernel) -> Result<CompassResponse> {
    require_family(base, Family::Compass)?;
    let set = compass_set(base)?;
    let mut magnitude = correlate(img, &set[0]);
    let mut best_index = vec![0u8; img.width() * img.height()];
    for (z, k) in set.iter().enumerate().skip(1) {
        let r = correlate(img, k);
        for ((m, b), &v) in magnitude.values_mut().iter_mut().zip(&mut best_index).zip(r.values()) {
            if v > *m {
                *m = v;
                *b = z as u8;
            }
        }
    }
    Ok(CompassResponse { magnitude, best_index })
}

#[derive(Debug, Clone)]
pub struct FreiChenResponse {
    pub edge: RealPlane,
    pub line: RealPlane,
}

/// Projection ratios onto the edge (G1..G4) and line (G5..G8) subspaces.
/// Pixels where all nine responses vanish get 0.
pub fn frei_chen(img: &RealPlane, dilation: usize) -> FreiChenResponse {
    let responses: Vec<RealPlane> = frei_chen_basis()
        .iter()
        .map(|k| correlate(img, &dilate(k, dilation)))
        .collect();
    let (w, h) = (img.width(), img.height());
    let mut edge = RealPlane::zeros(w, h);
    let mut line = RealPlane::zeros(w, h);
    for i in 0..w * h {
        let sq = |k: usize| responses[k].values()[i].powi(2);
        let e: f64 = (0..4).map(sq).sum();
        let l: f64 = (4..8).map(sq).sum();
        let total = e + l + sq(8);
        if total > 0.0 {
            edge.values_mut()[i] = (e / total).sqrt().min(1.0);
            line.values_mut()[i] = (l / total).sqrt().min(1.0);
        }
    }
    FreiChenResponse { edge, line }
}

/// A Laplace mask selection: variant, published size and dilation factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaplaceSpec {
    pub variant: LaplaceVariant,
    pub size: usize,
    pub dilation: usize,
}

impl LaplaceSpec {
    pub fn new(variant: LaplaceVariant, size: usize, dilation: usize) -> Self {
        LaplaceSpec {
            variant,
            size,
            dilation,
        }
    }

    pub fn kernel(&self) -> Result<Kernel> {
        Ok(dilate(&self.variant.kernel(self.size)?, self.dilation))
    }
}

/// Signed second-order response of a single (dilated) Laplace mask.
pub fn laplace(img: &RealPlane, spec: LaplaceSpec) -> Result<RealPlane> {
    Ok(correlate(img, &spec.kernel()?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogSource {
    Laplace(LaplaceSpec),
    /// Sampled closed-form LoG at `2 ceil(3 sigma) + 1` support, dilated by the factor.
    Analytic {
        dilation: usize,
    },
}

/// LoG as Gaussian smoothing followed by the Laplace mask.
pub fn log_response(img: &RealPlane, sigma: f64, source: LogSource) -> Result<RealPlane> {
    match source {
        LogSource::Laplace(spec) => laplace(&gaussian_blur(img, sigma)?, spec),
        LogSource::Analytic { dilation } => {
            let k = build_log(sigma, gaussian_support(sigma), &LogMode::Analytic)?;
            Ok(correlate(img, &dilate(&k, dilation)))
        }
    }
}

/// LoG as one pass with the Gaussian-convolved Laplace kernel.
pub fn log_single_kernel(img: &RealPlane, sigma: f64, spec: LaplaceSpec) -> Result<RealPlane> {
    let k = build_log(sigma, gaussian_support(sigma), &LogMode::LaplaceConv(spec.kernel()?))?;
    Ok(correlate(img, &k))
}
