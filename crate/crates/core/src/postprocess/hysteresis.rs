use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::imgproc::{EdgeMap, GrayImage, RealPlane};

/// How the byte-scale thresholds are turned into plane units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdScale {
    /// Use `low` / `high` as given.
    Absolute,
    /// `t = v / 255 * max(plane)`
    PlaneMax,
    /// `t = v / 255 * reference`, e.g. the maximum of the source gray image.
    Reference(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HysteresisParams {
    pub low: f64,
    pub high: f64,
    pub scale: ThresholdScale,
}

impl HysteresisParams {
    pub fn new(low: f64, high: f64, scale: ThresholdScale) -> Result<Self> {
        if !(low >= 0.0) {
            return Err(Error::param("low", format!("must be >= 0, got {low}")));
        }
        if !(low <= high) {
            return Err(Error::param("low", format!("{low} exceeds high threshold {high}")));
        }
        Ok(HysteresisParams { low, high, scale })
    }

    /// Thresholds in plane units.
    pub fn resolve(&self, p: &RealPlane) -> (f64, f64) {
        let factor = match self.scale {
            ThresholdScale::Absolute => return (self.low, self.high),
            ThresholdScale::PlaneMax => p.max().max(0.0) / 255.0,
            ThresholdScale::Reference(r) => r / 255.0,
        };
        (self.low * factor, self.high * factor)
    }
}

/// 0 = suppressed, 1 = weak, 2 = strong.
fn classes(p: &RealPlane, params: &HysteresisParams) -> Vec<u8> {
    let (lo, hi) = params.resolve(p);
    p.values()
        .iter()
        .map(|&v| {
            if v >= hi {
                2
            } else if v >= lo {
                1
            } else {
                0
            }
        })
        .collect()
}

/// Strong pixels plus every weak pixel 8-connected to one through weak or
/// strong pixels.
pub fn hysteresis_link(p: &RealPlane, params: &HysteresisParams) -> EdgeMap {
    let (w, h) = (p.width(), p.height());
    let class = classes(p, params);
    let mut out = vec![false; w * h];
    let mut queue: VecDeque<usize> = class
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 2)
        .map(|(i, _)| i)
        .collect();
    for &i in &queue {
        out[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !out[j] && class[j] > 0 {
                    out[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    EdgeMap::new(w, h, out).expect("dimensions come from the plane")
}

/// Three-level debug image: 0 suppressed, 128 weak, 255 strong.
pub fn hysteresis_classify(p: &RealPlane, params: &HysteresisParams) -> GrayImage {
    let px = classes(p, params)
        .into_iter()
        .map(|c| [0, 128, 255][c as usize])
        .collect();
    GrayImage::new(p.width(), p.height(), px).expect("dimensions come from the plane")
}
