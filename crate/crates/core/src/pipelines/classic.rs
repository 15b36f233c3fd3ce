use crate::error::{Error, Result};
use crate::imgproc::{
    gaussian_blur, scale_to_byte, threshold_global, EdgeMap, GrayImage, RealPlane, ScaleMode, FLAT_PEAK,
};
use crate::kernels::{catalog_get, dilate, Family, Kernel};
use crate::operators::{
    compass_gradient, frei_chen, gradient_orthogonal, laplace, log_response, log_single_kernel, GradientMap,
    LaplaceSpec, LogSource, MagnitudeMode,
};
use crate::postprocess::{
    guo_hall_thin, hysteresis_link, non_max_suppression, zero_crossing, HysteresisParams, ThresholdScale,
    ZeroCrossParams,
};

/// A catalog mask picked by name and published size, then dilated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSpec {
    pub name: String,
    pub size: usize,
    pub dilation: usize,
}

impl OperatorSpec {
    pub fn new(name: impl Into<String>, size: usize, dilation: usize) -> Self {
        OperatorSpec {
            name: name.into(),
            size,
            dilation,
        }
    }

    pub fn kernel(&self) -> Result<Kernel> {
        Ok(dilate(&catalog_get(&self.name, self.size)?, self.dilation))
    }

    /// Like [`kernel`](Self::kernel), but `kirsch` resolves to `kirsch_compass`
    /// when a compass mask is wanted.
    pub fn compass_kernel(&self) -> Result<Kernel> {
        let plain = catalog_get(&self.name, self.size);
        let base = match plain {
            Ok(k) if k.family() == Family::Compass => k,
            _ => match catalog_get(&format!("{}_compass", self.name), self.size) {
                Ok(k) => k,
                Err(_) => plain?,
            },
        };
        Ok(dilate(&base, self.dilation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstOrderFamily {
    Orthogonal,
    Compass,
    FreiChenEdge,
    FreiChenLine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderParams {
    pub operator: OperatorSpec,
    pub sigma: f64,
    pub threshold: u8,
    pub magnitude: MagnitudeMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams {
    pub laplace: LaplaceSpec,
    pub threshold: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogParams {
    pub laplace: LaplaceSpec,
    pub sigma: f64,
    pub threshold: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarrHildrethParams {
    pub laplace: LaplaceSpec,
    pub sigma: f64,
    pub zc_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CannyParams {
    pub operator: OperatorSpec,
    pub sigma: f64,
    pub low: u8,
    pub high: u8,
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::param("sigma", format!("must be > 0, got {sigma}")))
    }
}

/// Smoothed signed or unsigned response of a first-order family, before scaling.
pub fn first_order_response(gray: &GrayImage, p: &FirstOrderParams, family: FirstOrderFamily) -> Result<RealPlane> {
    check_sigma(p.sigma)?;
    let smooth = gaussian_blur(&gray.to_plane(), p.sigma)?;
    Ok(match family {
        FirstOrderFamily::Orthogonal => gradient_orthogonal(&smooth, &p.operator.kernel()?, p.magnitude)?.magnitude,
        FirstOrderFamily::Compass => compass_gradient(&smooth, &p.operator.compass_kernel()?)?.magnitude,
        FirstOrderFamily::FreiChenEdge => frei_chen(&smooth, p.operator.dilation).edge.map(|v| 255.0 * v),
        FirstOrderFamily::FreiChenLine => frei_chen(&smooth, p.operator.dilation).line.map(|v| 255.0 * v),
    })
}

/// Byte image that the first-order threshold is applied to. Gradient
/// magnitudes are normalized to the plane maximum; Frei-Chen ratios are
/// already in `[0, 255]`.
pub fn first_order_scaled(gray: &GrayImage, p: &FirstOrderParams, family: FirstOrderFamily) -> Result<GrayImage> {
    let r = first_order_response(gray, p, family)?;
    let mode = match family {
        FirstOrderFamily::Orthogonal | FirstOrderFamily::Compass => ScaleMode::NormalizeMax,
        FirstOrderFamily::FreiChenEdge | FirstOrderFamily::FreiChenLine => ScaleMode::ClampAbs,
    };
    Ok(scale_to_byte(&r, mode))
}

pub fn run_first_order(gray: &GrayImage, p: &FirstOrderParams, family: FirstOrderFamily) -> Result<EdgeMap> {
    let scaled = first_order_scaled(gray, p, family)?;
    Ok(guo_hall_thin(&threshold_global(&scaled, p.threshold)))
}

pub fn run_laplace(gray: &GrayImage, p: &LaplaceParams) -> Result<EdgeMap> {
    let r = laplace(&gray.to_plane(), p.laplace)?;
    let scaled = scale_to_byte(&r, ScaleMode::ClampAbs);
    Ok(guo_hall_thin(&threshold_global(&scaled, p.threshold)))
}

pub fn log_plane(gray: &GrayImage, p: &LogParams) -> Result<RealPlane> {
    check_sigma(p.sigma)?;
    log_response(&gray.to_plane(), p.sigma, LogSource::Laplace(p.laplace))
}

pub fn run_log(gray: &GrayImage, p: &LogParams) -> Result<EdgeMap> {
    let scaled = scale_to_byte(&log_plane(gray, p)?, ScaleMode::ClampAbs);
    Ok(guo_hall_thin(&threshold_global(&scaled, p.threshold)))
}

/// Single-kernel LoG response rescaled so that `max |v| = 255`.
pub fn marr_hildreth_plane(gray: &GrayImage, p: &MarrHildrethParams) -> Result<RealPlane> {
    check_sigma(p.sigma)?;
    let r = log_single_kernel(&gray.to_plane(), p.sigma, p.laplace)?;
    let peak = r.max_abs();
    Ok(if peak > FLAT_PEAK {
        r.map(|v| 255.0 * v / peak)
    } else {
        RealPlane::zeros(r.width(), r.height())
    })
}

pub fn run_marr_hildreth(gray: &GrayImage, p: &MarrHildrethParams) -> Result<EdgeMap> {
    let zc = ZeroCrossParams::new(p.zc_delta)?;
    Ok(guo_hall_thin(&zero_crossing(&marr_hildreth_plane(gray, p)?, zc)))
}

pub fn canny_gradient(gray: &GrayImage, p: &CannyParams) -> Result<GradientMap> {
    check_sigma(p.sigma)?;
    let smooth = gaussian_blur(&gray.to_plane(), p.sigma)?;
    gradient_orthogonal(&smooth, &p.operator.kernel()?, MagnitudeMode::Exact)
}

/// Thresholds are `L / 255` and `H / 255` of the brightest gray pixel.
pub fn canny_hysteresis(gray: &GrayImage, p: &CannyParams) -> Result<HysteresisParams> {
    HysteresisParams::new(
        p.low as f64,
        p.high as f64,
        ThresholdScale::Reference(gray.max() as f64),
    )
}

pub fn run_canny(gray: &GrayImage, p: &CannyParams) -> Result<EdgeMap> {
    let hyst = canny_hysteresis(gray, p)?;
    let nms = non_max_suppression(&canny_gradient(gray, p)?);
    Ok(hysteresis_link(&nms, &hyst))
}
