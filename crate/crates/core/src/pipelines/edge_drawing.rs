use crate::error::{Error, Result};
use crate::imgproc::{gaussian_blur_sized, EdgeMap, GrayImage, RealPlane};
use crate::operators::{gradient_orthogonal, MagnitudeMode};

use super::classic::{check_sigma, OperatorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct EdParams {
    pub operator: OperatorSpec,
    pub gauss_size: usize,
    pub sigma: f64,
    pub grad_thr: f64,
    pub anchor_thr: f64,
    pub scan_interval: usize,
}

impl EdParams {
    /// Sigma conventionally paired with a `size` x `size` Gaussian.
    pub fn sigma_for_size(size: usize) -> f64 {
        0.3 * ((size as f64 - 1.0) / 2.0 - 1.0) + 0.8
    }

    pub fn validate(&self) -> Result<()> {
        check_sigma(self.sigma)?;
        if self.gauss_size == 0 || self.gauss_size.is_multiple_of(2) {
            return Err(Error::param(
                "gauss-size",
                format!("must be odd, got {}", self.gauss_size),
            ));
        }
        if self.scan_interval == 0 {
            return Err(Error::param("scan-interval", "must be >= 1"));
        }
        if !(self.grad_thr >= 0.0) || !(self.anchor_thr >= 0.0) {
            return Err(Error::param("grad-thr", "thresholds must be >= 0"));
        }
        Ok(())
    }
}

/// Everything ED produced for one image.
#[derive(Debug, Clone)]
pub struct EdTrace {
    /// Thresholded gradient magnitude.
    pub gradient: RealPlane,
    pub anchors: Vec<(usize, usize)>,
    /// One 8-connected pixel path per routed anchor.
    pub chains: Vec<Vec<(usize, usize)>>,
    pub edges: EdgeMap,
    /// Number of routing moves performed.
    pub steps: usize,
}

struct Router<'a> {
    g: &'a RealPlane,
    vertical: &'a [bool],
    visited: Vec<bool>,
    steps: usize,
}

impl Router<'_> {
    fn mag(&self, x: isize, y: isize) -> Option<f64> {
        let (w, h) = (self.g.width() as isize, self.g.height() as isize);
        (x >= 0 && y >= 0 && x < w && y < h).then(|| self.g.get(x as usize, y as usize))
    }

    fn is_vertical(&self, x: usize, y: usize) -> bool {
        self.vertical[y * self.g.width() + x]
    }

    /// Heading along the local edge axis, keeping the sign of `prev` on that axis.
    fn heading(&self, x: usize, y: usize, prev: (isize, isize)) -> (isize, isize) {
        let (xi, yi) = (x as isize, y as isize);
        let pick = |a: Option<f64>, b: Option<f64>| a.unwrap_or(-1.0) >= b.unwrap_or(-1.0);
        if self.is_vertical(x, y) {
            let dy = match prev.1 {
                0 => {
                    if pick(self.mag(xi, yi - 1), self.mag(xi, yi + 1)) {
                        -1
                    } else {
                        1
                    }
                }
                d => d.signum(),
            };
            (0, dy)
        } else {
            let dx = match prev.0 {
                0 => {
                    if pick(self.mag(xi - 1, yi), self.mag(xi + 1, yi)) {
                        -1
                    } else {
                        1
                    }
                }
                d => d.signum(),
            };
            (dx, 0)
        }
    }

    /// Walks from `start` with initial heading `dir` until the gradient runs
    /// out or an already visited pixel is chosen.
    fn walk(&mut self, start: (usize, usize), dir: (isize, isize)) -> Vec<(usize, usize)> {
        let w = self.g.width();
        let mut path = Vec::new();
        let (mut x, mut y) = start;
        let mut axis = dir;
        loop {
            let (dx, dy) = axis;
            // straight, then clockwise, then counter-clockwise (image coordinates, y down)
            let cands = if dx != 0 {
                [(dx, 0), (dx, dx), (dx, -dx)]
            } else {
                [(0, dy), (-dy, dy), (dy, dy)]
            };
            let (xi, yi) = (x as isize, y as isize);
            let mut best: Option<((isize, isize), f64)> = None;
            for (cx, cy) in cands {
                if let Some(m) = self.mag(xi + cx, yi + cy) {
                    if best.is_none_or(|(_, bm)| m > bm) {
                        best = Some(((cx, cy), m));
                    }
                }
            }
            let Some(((cx, cy), m)) = best else { break };
            if m <= 0.0 {
                break;
            }
            let (nx, ny) = ((xi + cx) as usize, (yi + cy) as usize);
            if self.visited[ny * w + nx] {
                break;
            }
            self.visited[ny * w + nx] = true;
            self.steps += 1;
            path.push((nx, ny));
            let last = (cx, cy);
            x = nx;
            y = ny;
            if self.is_vertical(x, y) != (axis.0 == 0) {
                axis = self.heading(x, y, last);
            }
        }
        path
    }
}

pub fn edge_drawing_trace(gray: &GrayImage, p: &EdParams) -> Result<EdTrace> {
    p.validate()?;
    let smooth = gaussian_blur_sized(&gray.to_plane(), p.sigma, p.gauss_size)?;
    let grad = gradient_orthogonal(&smooth, &p.operator.kernel()?, MagnitudeMode::Approx)?;
    let gradient = grad.magnitude.map(|m| if m >= p.grad_thr { m } else { 0.0 });
    let (w, h) = (gradient.width(), gradient.height());

    let mut anchors = Vec::new();
    for y in (1..h.saturating_sub(1)).step_by(p.scan_interval) {
        for x in (1..w.saturating_sub(1)).step_by(p.scan_interval) {
            let g = gradient.get(x, y);
            if g <= 0.0 {
                continue;
            }
            let (a, b) = if grad.is_vertical(x, y) {
                (gradient.get(x - 1, y), gradient.get(x + 1, y))
            } else {
                (gradient.get(x, y - 1), gradient.get(x, y + 1))
            };
            if g > a && g > b && g - a >= p.anchor_thr && g - b >= p.anchor_thr {
                anchors.push((x, y));
            }
        }
    }
    // strongest anchors first; the sort is stable so raster order breaks ties
    let mut order = anchors.clone();
    order.sort_by(|&(ax, ay), &(bx, by)| gradient.get(bx, by).total_cmp(&gradient.get(ax, ay)));

    let mut router = Router {
        g: &gradient,
        vertical: &grad.vertical,
        visited: vec![false; w * h],
        steps: 0,
    };
    let mut chains = Vec::new();
    for (x, y) in order {
        if router.visited[y * w + x] {
            continue;
        }
        router.visited[y * w + x] = true;
        let (first, second) = if router.is_vertical(x, y) {
            ((0, -1), (0, 1))
        } else {
            ((-1, 0), (1, 0))
        };
        let mut back = router.walk((x, y), first);
        let fwd = router.walk((x, y), second);
        back.reverse();
        back.push((x, y));
        back.extend(fwd);
        chains.push(back);
    }
    let steps = router.steps;
    let mut edges = EdgeMap::empty(w, h);
    for &(x, y) in chains.iter().flatten() {
        edges.set(x, y, true);
    }
    Ok(EdTrace {
        gradient,
        anchors,
        chains,
        edges,
        steps,
    })
}

pub fn run_edge_drawing(gray: &GrayImage, p: &EdParams) -> Result<EdgeMap> {
    Ok(edge_drawing_trace(gray, p)?.edges)
}
