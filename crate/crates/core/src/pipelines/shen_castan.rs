use crate::error::{Error, Result};
use crate::imgproc::{EdgeMap, GrayImage, RealPlane};
use crate::operators::{laplace, LaplaceSpec};
use crate::postprocess::{guo_hall_thin, hysteresis_link, HysteresisParams, ThresholdScale};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsefParams {
    pub b: f64,
    pub window: usize,
    pub zc_ratio: f64,
    pub thinning_factor: f64,
    pub laplace_threshold: u8,
}

impl IsefParams {
    pub fn validate(&self) -> Result<()> {
        check_b(self.b)?;
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::param(
                "window",
                format!("must be odd and >= 3, got {}", self.window),
            ));
        }
        if !(0.0..=1.0).contains(&self.zc_ratio) {
            return Err(Error::param(
                "ratio",
                format!("must lie in [0, 1], got {}", self.zc_ratio),
            ));
        }
        if !(0.0..=1.0).contains(&self.thinning_factor) {
            return Err(Error::param(
                "thinning",
                format!("must lie in [0, 1], got {}", self.thinning_factor),
            ));
        }
        Ok(())
    }
}

/// Second-derivative estimate applied after ISEF smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShenCastanLaplacian {
    /// Band-limited Laplacian: smoothed minus original.
    Bli,
    /// A Laplace mask applied to the smoothed image.
    Mask(LaplaceSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShenCastanParams {
    pub laplacian: ShenCastanLaplacian,
    pub isef: IsefParams,
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b < 1.0 {
        Ok(())
    } else {
        Err(Error::param("b", format!("must lie in (0, 1), got {b}")))
    }
}

/// One causal + anticausal pass with unit DC gain; impulse response
/// `(1 - b) / (1 + b) * b^|n|`.
fn isef_1d(line: &mut [f64], b: f64, causal: &mut Vec<f64>, anti: &mut Vec<f64>) {
    let n = line.len();
    if n == 0 {
        return;
    }
    let a = 1.0 - b;
    causal.clear();
    causal.resize(n, 0.0);
    anti.clear();
    anti.resize(n, 0.0);
    causal[0] = line[0];
    for i in 1..n {
        causal[i] = a * line[i] + b * causal[i - 1];
    }
    anti[n - 1] = line[n - 1];
    for i in (0..n - 1).rev() {
        anti[i] = a * line[i] + b * anti[i + 1];
    }
    for i in 0..n {
        line[i] = (causal[i] + anti[i] - a * line[i]) / (1.0 + b);
    }
}

/// Separable recursive exponential smoothing, rows first, then columns.
pub fn isef_filter(img: &RealPlane, b: f64) -> Result<RealPlane> {
    check_b(b)?;
    let (w, h) = (img.width(), img.height());
    let mut out = img.clone();
    let (mut c, mut a) = (Vec::new(), Vec::new());
    let v = out.values_mut();
    for row in v.chunks_mut(w) {
        isef_1d(row, b, &mut c, &mut a);
    }
    let mut col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = v[y * w + x];
        }
        isef_1d(&mut col, b, &mut c, &mut a);
        for y in 0..h {
            v[y * w + x] = col[y];
        }
    }
    Ok(out)
}

/// Intermediate products of the Shen-Castan chain.
#[derive(Debug, Clone)]
pub struct ShenCastanTrace {
    pub smoothed: RealPlane,
    pub laplacian: RealPlane,
    /// Positive-region boundary pixels.
    pub candidates: EdgeMap,
    /// Adaptive gradient at candidates, 0 elsewhere.
    pub gradient: RealPlane,
    pub edges: EdgeMap,
}

/// `|mean(original | positive) - mean(original | non-positive)|` over the
/// window; 0 when either side is empty.
fn adaptive_gradient(orig: &RealPlane, positive: &[bool], x: usize, y: usize, half: usize) -> f64 {
    let (w, h) = (orig.width(), orig.height());
    let (mut s_on, mut n_on, mut s_off, mut n_off) = (0.0, 0usize, 0.0, 0usize);
    for yy in y.saturating_sub(half)..(y + half + 1).min(h) {
        for xx in x.saturating_sub(half)..(x + half + 1).min(w) {
            let v = orig.get(xx, yy);
            if positive[yy * w + xx] {
                s_on += v;
                n_on += 1;
            } else {
                s_off += v;
                n_off += 1;
            }
        }
    }
    if n_on == 0 || n_off == 0 {
        0.0
    } else {
        (s_on / n_on as f64 - s_off / n_off as f64).abs()
    }
}

/// Value below which a `ratio` fraction of `values` falls (nearest rank).
fn quantile(values: &mut [f64], ratio: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let idx = ((ratio * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
    values[idx]
}

pub fn shen_castan_trace(gray: &GrayImage, p: &ShenCastanParams) -> Result<ShenCastanTrace> {
    p.isef.validate()?;
    let orig = gray.to_plane();
    let (w, h) = (orig.width(), orig.height());
    let smoothed = isef_filter(&orig, p.isef.b)?;
    let lap = match p.laplacian {
        ShenCastanLaplacian::Bli => smoothed.zip_map(&orig, |s, o| s - o),
        ShenCastanLaplacian::Mask(spec) => laplace(&smoothed, spec)?,
    };
    let positive: Vec<bool> = lap.values().iter().map(|&v| v > 0.0).collect();
    let candidates = EdgeMap::from_fn(w, h, |x, y| {
        if !positive[y * w + x] {
            return false;
        }
        let off = |xx: isize, yy: isize| {
            xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h && !positive[yy as usize * w + xx as usize]
        };
        let (x, y) = (x as isize, y as isize);
        off(x - 1, y) || off(x + 1, y) || off(x, y - 1) || off(x, y + 1)
    });
    let half = p.isef.window / 2;
    let gate = p.isef.laplace_threshold as f64;
    let gradient = RealPlane::from_fn(w, h, |x, y| {
        if !candidates.get(x, y) {
            return 0.0;
        }
        let g = adaptive_gradient(&orig, &positive, x, y, half);
        if g >= gate && g > 0.0 {
            g
        } else {
            0.0
        }
    });
    let mut strengths: Vec<f64> = gradient.values().iter().copied().filter(|&g| g > 0.0).collect();
    let edges = if strengths.is_empty() {
        EdgeMap::empty(w, h)
    } else {
        let high = quantile(&mut strengths, p.isef.zc_ratio);
        let low = (p.isef.thinning_factor * high).max(f64::MIN_POSITIVE);
        let hyst = HysteresisParams::new(low, high, ThresholdScale::Absolute)?;
        guo_hall_thin(&hysteresis_link(&gradient, &hyst))
    };
    Ok(ShenCastanTrace {
        smoothed,
        laplacian: lap,
        candidates,
        gradient,
        edges,
    })
}

pub fn run_shen_castan(gray: &GrayImage, p: &ShenCastanParams) -> Result<EdgeMap> {
    Ok(shen_castan_trace(gray, p)?.edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::LaplaceVariant;

    fn tuned(laplacian: ShenCastanLaplacian) -> ShenCastanParams {
        ShenCastanParams {
            laplacian,
            isef: IsefParams {
                b: 0.9,
                window: 7,
                zc_ratio: 0.9,
                thinning_factor: 0.5,
                laplace_threshold: 40,
            },
        }
    }

    #[test]
    fn constant_is_preserved() {
        let img = RealPlane::filled(13, 9, 73.0);
        let out = isef_filter(&img, 0.7).unwrap();
        for &v in out.values() {
            assert!((v - 73.0).abs() < 1e-6);
        }
    }

    #[test]
    fn impulse_response_is_two_sided_exponential() {
        let b = 0.6;
        let n = 41;
        let mut line = vec![0.0; n];
        line[20] = 1.0;
        let (mut c, mut a) = (Vec::new(), Vec::new());
        isef_1d(&mut line, b, &mut c, &mut a);
        let k = (1.0 - b) / (1.0 + b);
        for (i, &v) in line.iter().enumerate() {
            let d = (i as i32 - 20).unsigned_abs() as i32;
            assert!((v - k * b.powi(d)).abs() < 1e-12, "offset {d}");
        }
    }

    #[test]
    fn separable_impulse_matches_product() {
        let b = 0.5;
        let img = RealPlane::from_fn(15, 15, |x, y| if (x, y) == (7, 7) { 1.0 } else { 0.0 });
        let out = isef_filter(&img, b).unwrap();
        let k = (1.0 - b) / (1.0 + b);
        for y in 3..12 {
            for x in 3..12 {
                let e = (x as i32 - 7).abs() + (y as i32 - 7).abs();
                assert!((out.get(x, y) - k * k * b.powi(e)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiny_b_is_nearly_identity() {
        let img = RealPlane::from_fn(9, 9, |x, y| ((x * 7 + y * 3) % 11) as f64);
        let out = isef_filter(&img, 1e-9).unwrap();
        for (a, b) in out.values().iter().zip(img.values()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn b_out_of_range() {
        let img = RealPlane::zeros(3, 3);
        assert!(isef_filter(&img, 0.0).is_err());
        assert!(isef_filter(&img, 1.0).is_err());
    }

    #[test]
    fn constant_image_has_no_edges() {
        let g = GrayImage::filled(20, 20, 90);
        let p = tuned(ShenCastanLaplacian::Mask(LaplaceSpec::new(LaplaceVariant::V1, 3, 0)));
        assert!(run_shen_castan(&g, &p).unwrap().is_empty());
    }

    #[test]
    fn edges_are_candidates_on_a_square() {
        let g = GrayImage::from_fn(40, 40, |x, y| {
            if (10..30).contains(&x) && (10..30).contains(&y) {
                210
            } else {
                30
            }
        });
        for lap in [
            ShenCastanLaplacian::Bli,
            ShenCastanLaplacian::Mask(LaplaceSpec::new(LaplaceVariant::V1, 3, 1)),
        ] {
            let t = shen_castan_trace(&g, &tuned(lap)).unwrap();
            assert!(t.edges.count() > 20, "{lap:?}");
            assert!(t.edges.is_subset_of(&t.candidates));
            for (x, y) in t.edges.points() {
                let near = |c: usize| (c as i32 - 10).abs() <= 2 || (c as i32 - 29).abs() <= 2;
                assert!(near(x) || near(y), "({x}, {y})");
            }
        }
    }

    #[test]
    fn window_must_be_odd() {
        let mut p = tuned(ShenCastanLaplacian::Bli);
        p.isef.window = 6;
        assert!(run_shen_castan(&GrayImage::filled(8, 8, 0), &p).is_err());
    }
}
