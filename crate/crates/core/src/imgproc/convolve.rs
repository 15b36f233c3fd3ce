use super::RealPlane;
use crate::error::Result;
use crate::kernels::{build_gaussian, gaussian_support, Kernel, SparseKernel};

/// How reads outside the image are resolved. Only edge replication exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    #[default]
    Replicate,
}

impl BorderPolicy {
    #[inline]
    fn resolve(self, i: isize, len: usize) -> usize {
        match self {
            BorderPolicy::Replicate => i.clamp(0, len as isize - 1) as usize,
        }
    }
}

/// Reference correlation: every kernel entry, zeros included, per output pixel.
pub fn convolve_dense(img: &RealPlane, k: &Kernel, border: BorderPolicy) -> RealPlane {
    let (w, h) = (img.width(), img.height());
    let (ar, ac) = k.anchor();
    let src = img.values();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for r in 0..k.rows() {
                let sy = border.resolve(y as isize + r as isize - ar as isize, h);
                let row = &src[sy * w..(sy + 1) * w];
                for c in 0..k.cols() {
                    let sx = border.resolve(x as isize + c as isize - ac as isize, w);
                    acc += k.get(r, c) * row[sx];
                }
            }
            out.push(acc);
        }
    }
    RealPlane::new(w, h, out).expect("finite inputs give finite outputs")
}

/// Correlation over the nonzero taps only; gaps cost nothing.
///
/// Taps are accumulated in the same order as [`convolve_dense`] visits
/// them, so both paths agree exactly.
pub fn convolve_sparse(img: &RealPlane, k: &SparseKernel, border: BorderPolicy) -> RealPlane {
    convolve_sparse_counted(img, k, border).0
}

/// [`convolve_sparse`] that also reports the multiply-accumulates performed.
pub fn convolve_sparse_counted(img: &RealPlane, k: &SparseKernel, border: BorderPolicy) -> (RealPlane, u64) {
    let (w, h) = (img.width(), img.height());
    let src = img.values();
    let mut out = RealPlane::zeros(w, h);
    let dst = out.values_mut();
    let mut macs = 0u64;
    for tap in &k.taps {
        let wt = tap.weight;
        let lo = (-tap.dx).clamp(0, w as isize) as usize;
        let hi = (w as isize - tap.dx).clamp(lo as isize, w as isize) as usize;
        for y in 0..h {
            let sy = border.resolve(y as isize + tap.dy, h);
            let srow = &src[sy * w..(sy + 1) * w];
            let drow = &mut dst[y * w..(y + 1) * w];
            for (x, d) in drow[..lo].iter_mut().enumerate() {
                *d += wt * srow[border.resolve(x as isize + tap.dx, w)];
            }
            if hi > lo {
                let shifted = &srow[(lo as isize + tap.dx) as usize..(hi as isize + tap.dx) as usize];
                for (d, s) in drow[lo..hi].iter_mut().zip(shifted) {
                    *d += wt * s;
                }
            }
            for (x, d) in drow[hi..].iter_mut().enumerate() {
                *d += wt * srow[border.resolve((x + hi) as isize + tap.dx, w)];
            }
        }
        macs += (w * h) as u64;
    }
    (out, macs)
}

/// Gaussian smoothing with the default `2 ceil(3 sigma) + 1` support.
pub fn gaussian_blur(img: &RealPlane, sigma: f64) -> Result<RealPlane> {
    gaussian_blur_sized(img, sigma, gaussian_support(sigma))
}

pub fn gaussian_blur_sized(img: &RealPlane, sigma: f64, size: usize) -> Result<RealPlane> {
    let g = build_gaussian(sigma, size)?;
    Ok(convolve_sparse(img, &g.sparse(), BorderPolicy::Replicate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{catalog_get, dilate, Family};

    fn impulse(n: usize) -> RealPlane {
        RealPlane::from_fn(n, n, |x, y| if (x, y) == (n / 2, n / 2) { 1.0 } else { 0.0 })
    }

    #[test]
    fn zero_sum_kernel_on_constant_is_zero() {
        let img = RealPlane::filled(9, 7, 42.0);
        let k = catalog_get("sobel", 5).unwrap();
        let out = convolve_dense(&img, &k, BorderPolicy::Replicate);
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_gives_point_mirrored_mask() {
        // correlation footprint: out(x) = k(-offset), i.e. the mask rotated 180 degrees
        let out = convolve_dense(&impulse(5), &catalog_get("sobel", 3).unwrap(), BorderPolicy::Replicate);
        let expected = [[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]];
        for (r, row) in expected.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(out.get(1 + c, 1 + r), v);
            }
        }
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(4, 4), 0.0);
    }

    #[test]
    fn identity_kernel_is_identity() {
        let id = Kernel::from_rows("id", Family::Orthogonal, [[0., 0., 0.], [0., 1., 0.], [0., 0., 0.]]);
        let img = RealPlane::from_fn(6, 4, |x, y| (x * 7 + y * 3) as f64);
        assert_eq!(convolve_dense(&img, &id, BorderPolicy::Replicate), img);
        assert_eq!(convolve_sparse(&img, &id.sparse(), BorderPolicy::Replicate), img);
    }

    #[test]
    fn empty_taps_give_zero_plane() {
        let img = RealPlane::from_fn(5, 5, |x, _| x as f64);
        let (out, macs) = convolve_sparse_counted(&img, &SparseKernel::empty(), BorderPolicy::Replicate);
        assert!(out.values().iter().all(|&v| v == 0.0));
        assert_eq!(macs, 0);
    }

    #[test]
    fn sparse_matches_dense_with_large_overhang() {
        // kernel wider than the image exercises both clamped edges of every row
        let k = dilate(&catalog_get("kirsch", 5).unwrap(), 2);
        let img = RealPlane::from_fn(7, 5, |x, y| ((x * 31 + y * 17) % 11) as f64 - 5.0);
        assert_eq!(
            convolve_sparse(&img, &k.sparse(), BorderPolicy::Replicate),
            convolve_dense(&img, &k, BorderPolicy::Replicate)
        );
        let tiny = RealPlane::from_fn(3, 2, |x, y| (x + 4 * y) as f64);
        assert_eq!(
            convolve_sparse(&tiny, &k.sparse(), BorderPolicy::Replicate),
            convolve_dense(&tiny, &k, BorderPolicy::Replicate)
        );
    }

    #[test]
    fn mac_count_is_taps_times_pixels() {
        let img = RealPlane::zeros(10, 8);
        for f in 0..3 {
            let k = dilate(&catalog_get("sobel", 3).unwrap(), f).sparse();
            let (_, macs) = convolve_sparse_counted(&img, &k, BorderPolicy::Replicate);
            assert_eq!(macs / 80, 6);
        }
    }

    #[test]
    fn blur_preserves_constant() {
        let img = RealPlane::filled(12, 12, 77.0);
        let out = gaussian_blur(&img, 2.75).unwrap();
        assert!(out.values().iter().all(|&v| (v - 77.0).abs() < 1e-6));
    }

    #[test]
    fn blur_of_impulse_peaks_at_site() {
        let out = gaussian_blur(&impulse(15), 1.0).unwrap();
        let peak = out.get(7, 7);
        for y in 0..15 {
            for x in 0..15 {
                if (x, y) != (7, 7) {
                    assert!(out.get(x, y) < peak);
                }
            }
        }
    }

    #[test]
    fn blur_of_step_is_monotone_sigmoid() {
        let img = RealPlane::from_fn(40, 3, |x, _| if x < 20 { 0.0 } else { 100.0 });
        let out = gaussian_blur(&img, 2.75).unwrap();
        let row: Vec<f64> = (0..40).map(|x| out.get(x, 1)).collect();
        for pair in row.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        // 1-D analytic value at the half-pixel boundary is 50; sampled kernel stays close
        assert!((row[19] + row[20] - 100.0).abs() < 1e-9);
        assert!(row[19] < 50.0 && row[20] > 50.0);
    }
}
