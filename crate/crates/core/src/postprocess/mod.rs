//! Edge-map refinement shared by the pipelines.

mod hysteresis;
mod thinning;

pub use hysteresis::{hysteresis_classify, hysteresis_link, HysteresisParams, ThresholdScale};
pub use thinning::guo_hall_thin;

use crate::error::{Error, Result};
use crate::imgproc::{EdgeMap, RealPlane};
use crate::operators::GradientMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossParams {
    pub min_delta: f64,
}

impl ZeroCrossParams {
    pub fn new(min_delta: f64) -> Result<Self> {
        if !(min_delta >= 0.0) {
            return Err(Error::param("min_delta", format!("must be >= 0, got {min_delta}")));
        }
        Ok(ZeroCrossParams { min_delta })
    }
}

const OPPOSITE_PAIRS: [((isize, isize), (isize, isize)); 4] = [
    ((-1, 0), (1, 0)),
    ((0, -1), (0, 1)),
    ((-1, -1), (1, 1)),
    ((1, -1), (-1, 1)),
];

/// Marks pixels whose opposite neighbors (W/E, N/S, NW/SE, NE/SW) have
/// strictly opposite signs and differ by at least `min_delta`. Zeros never
/// take part in a crossing; pairs leaving the image are skipped.
pub fn zero_crossing(p: &RealPlane, params: ZeroCrossParams) -> EdgeMap {
    let (w, h) = (p.width() as isize, p.height() as isize);
    let at = |x: isize, y: isize| -> Option<f64> {
        (x >= 0 && y >= 0 && x < w && y < h).then(|| p.get(x as usize, y as usize))
    };
    EdgeMap::from_fn(p.width(), p.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        OPPOSITE_PAIRS
            .iter()
            .any(|&((ax, ay), (bx, by))| match (at(x + ax, y + ay), at(x + bx, y + by)) {
                (Some(a), Some(b)) => a * b < 0.0 && (a - b).abs() >= params.min_delta,
                _ => false,
            })
    })
}

/// Neighbor offsets along the gradient direction, quantized to 0/45/90/135 degrees.
fn gradient_neighbors(gx: f64, gy: f64) -> (isize, isize) {
    let mut deg = gy.atan2(gx).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if !(22.5..157.5).contains(&deg) {
        (1, 0)
    } else if deg < 67.5 {
        (1, 1)
    } else if deg < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Keeps magnitudes that are `>=` both neighbors along the quantized
/// gradient direction; everything else becomes 0. Outside reads as 0.
pub fn non_max_suppression(g: &GradientMap) -> RealPlane {
    let m = &g.magnitude;
    let (w, h) = (m.width() as isize, m.height() as isize);
    let at = |x: isize, y: isize| {
        if x >= 0 && y >= 0 && x < w && y < h {
            m.get(x as usize, y as usize)
        } else {
            0.0
        }
    };
    RealPlane::from_fn(m.width(), m.height(), |x, y| {
        let v = m.get(x, y);
        if v <= 0.0 {
            return 0.0;
        }
        let (dx, dy) = gradient_neighbors(g.gx.get(x, y), g.gy.get(x, y));
        let (x, y) = (x as isize, y as isize);
        if v >= at(x + dx, y + dy) && v >= at(x - dx, y - dy) {
            v
        } else {
            0.0
        }
    })
}
