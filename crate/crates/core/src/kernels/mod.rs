//! Kernel catalog and the geometric transforms applied to it.
//!
//! Every mask is stored in application orientation (correlation convention):
//! coefficient `(r, c)` multiplies the pixel at offset `(r - anchor_r, c - anchor_c)`.
//! Dilation inserts exact zeros between the original taps, so a dilated
//! kernel carries the same number of nonzero taps as its base.

mod catalog;

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub use catalog::{catalog_all, catalog_entries, catalog_get, frei_chen_basis, LaplaceVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Orthogonal,
    Compass,
    FreiChen,
    Laplace,
    Gaussian,
    Log,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Orthogonal => "orthogonal",
            Family::Compass => "compass",
            Family::FreiChen => "frei-chen",
            Family::Laplace => "laplace",
            Family::Gaussian => "gaussian",
            Family::Log => "log",
        }
    }
}

/// A named, odd-sized coefficient grid anchored at its center.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    name: String,
    family: Family,
    rows: usize,
    cols: usize,
    coeffs: Vec<f64>,
    dilation: usize,
}

impl Kernel {
    pub fn new(name: impl Into<String>, family: Family, rows: usize, cols: usize, coeffs: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(Error::param(
                "kernel",
                format!("`{name}` has even dimensions {rows}x{cols}"),
            ));
        }
        if coeffs.len() != rows * cols {
            return Err(Error::param(
                "kernel",
                format!("`{name}` expects {} coefficients, got {}", rows * cols, coeffs.len()),
            ));
        }
        Ok(Kernel {
            name,
            family,
            rows,
            cols,
            coeffs,
            dilation: 0,
        })
    }

    /// Builds a kernel from row slices. Panics on ragged or even-sized input,
    /// which only happens for literal tables inside this crate.
    pub(crate) fn from_rows<const N: usize>(name: &str, family: Family, rows: [[f64; N]; N]) -> Self {
        let coeffs = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Kernel::new(name, family, N, N, coeffs).expect("literal kernel table is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length for square kernels (the row count otherwise).
    pub fn size(&self) -> usize {
        self.rows
    }

    pub fn dilation_factor(&self) -> usize {
        self.dilation
    }

    /// Side length of the undilated kernel this one was produced from.
    pub fn base_size(&self) -> usize {
        (self.rows - 1) / (self.dilation + 1) + 1
    }

    pub fn anchor(&self) -> (usize, usize) {
        (self.rows / 2, self.cols / 2)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.coeffs[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.coeffs[r * self.cols..(r + 1) * self.cols]
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Nonzero taps as offsets from the anchor, in row-major order.
    pub fn sparse(&self) -> SparseKernel {
        let (ar, ac) = self.anchor();
        let taps = (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let w = self.get(r, c);
                (w != 0.0).then_some(Tap {
                    dy: r as isize - ar as isize,
                    dx: c as isize - ac as isize,
                    weight: w,
                })
            })
            .collect::<Vec<_>>();
        SparseKernel {
            base_nnz: taps.len(),
            taps,
        }
    }

    /// Tab-separated grid, one row per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line = self
                .row(r)
                .iter()
                .map(|v| format_coeff(*v))
                .collect::<Vec<_>>()
                .join("\t");
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Full (untruncated) discrete convolution of two kernels. The result
    /// applied by correlation equals correlating with `self` then `other`.
    pub fn convolve_full(&self, other: &Kernel) -> Kernel {
        let rows = self.rows + other.rows - 1;
        let cols = self.cols + other.cols - 1;
        let mut coeffs = vec![0.0; rows * cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a == 0.0 {
                    continue;
                }
                for rr in 0..other.rows {
                    for cc in 0..other.cols {
                        coeffs[(r + rr) * cols + c + cc] += a * other.get(rr, cc);
                    }
                }
            }
        }
        Kernel {
            name: format!("{}*{}", self.name, other.name),
            family: Family::Log,
            rows,
            cols,
            coeffs,
            dilation: 0,
        }
    }
}

fn format_coeff(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub dy: isize,
    pub dx: isize,
    pub weight: f64,
}

/// The nonzero entries of a kernel as anchor-relative taps.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseKernel {
    pub taps: Vec<Tap>,
    pub base_nnz: usize,
}

impl SparseKernel {
    pub fn empty() -> Self {
        SparseKernel {
            taps: Vec::new(),
            base_nnz: 0,
        }
    }

    /// Multiply-accumulates performed per output pixel.
    pub fn macs_per_pixel(&self) -> usize {
        self.taps.len()
    }

    /// Largest absolute vertical and horizontal tap offset.
    pub fn reach(&self) -> (usize, usize) {
        self.taps.iter().fold((0, 0), |(ry, rx), t| {
            (ry.max(t.dy.unsigned_abs()), rx.max(t.dx.unsigned_abs()))
        })
    }
}

/// Inserts `factor` zero rows/columns between adjacent coefficients.
///
/// The output side is `k + (k - 1) * factor`. Dilating an already dilated
/// kernel composes: the base taps end up `(d + 1) * (factor + 1)` apart.
pub fn dilate(k: &Kernel, factor: usize) -> Kernel {
    if factor == 0 {
        return k.clone();
    }
    let step = factor + 1;
    let rows = k.rows + (k.rows - 1) * factor;
    let cols = k.cols + (k.cols - 1) * factor;
    let mut coeffs = vec![0.0; rows * cols];
    for r in 0..k.rows {
        for c in 0..k.cols {
            coeffs[r * step * cols + c * step] = k.get(r, c);
        }
    }
    Kernel {
        name: k.name.clone(),
        family: k.family,
        rows,
        cols,
        coeffs,
        dilation: (k.dilation + 1) * step - 1,
    }
}

/// Recovers the undilated base of a dilated kernel by sampling the tap lattice.
pub fn undilate(k: &Kernel) -> Kernel {
    if k.dilation == 0 {
        return k.clone();
    }
    let step = k.dilation + 1;
    let rows = (k.rows - 1) / step + 1;
    let cols = (k.cols - 1) / step + 1;
    let coeffs = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| k.get(r * step, c * step))
        .collect();
    Kernel {
        name: k.name.clone(),
        family: k.family,
        rows,
        cols,
        coeffs,
        dilation: 0,
    }
}

/// Rotates by 90 degrees clockwise, turning an x-axis mask into its y-axis companion.
pub fn rotate_orthogonal(k: &Kernel) -> Kernel {
    let (rows, cols) = (k.cols, k.rows);
    let mut coeffs = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            coeffs[i * cols + j] = k.get(k.rows - 1 - j, i);
        }
    }
    Kernel {
        name: k.name.clone(),
        family: k.family,
        rows,
        cols,
        coeffs,
        dilation: k.dilation,
    }
}

// Outer ring of a 3x3 grid, clockwise from the top-left corner.
const RING: [(usize, usize); 8] = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)];

/// Shifts the outer ring of a 3x3 kernel by one position (a 45 degree turn).
fn ring_shift(k: &Kernel) -> Kernel {
    let mut out = k.clone();
    for (i, &(r, c)) in RING.iter().enumerate() {
        let (sr, sc) = RING[(i + 1) % 8];
        out.coeffs[r * 3 + c] = k.get(sr, sc);
    }
    out
}

/// The eight 45-degree orientations of a compass kernel.
///
/// Element 0 is the input itself. Dilated inputs are rotated on their base
/// grid and dilated again afterwards.
pub fn compass_set(k: &Kernel) -> Result<Vec<Kernel>> {
    let base = undilate(k);
    if base.rows != 3 || base.cols != 3 {
        return Err(Error::NotCompassBase {
            rows: base.rows,
            cols: base.cols,
        });
    }
    let mut set = Vec::with_capacity(8);
    let mut cur = base;
    for _ in 0..8 {
        let next = ring_shift(&cur);
        set.push(dilate(&cur, k.dilation));
        cur = next;
    }
    Ok(set)
}

fn check_sigma_size(sigma: f64, size: usize) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if size.is_multiple_of(2) {
        return Err(Error::param("size", format!("must be odd, got {size}")));
    }
    Ok(())
}

/// Default Gaussian support: `2 * ceil(3 sigma) + 1`.
pub fn gaussian_support(sigma: f64) -> usize {
    2 * (3.0 * sigma).ceil() as usize + 1
}

/// Sampled 2-D Gaussian normalized to unit sum.
pub fn build_gaussian(sigma: f64, size: usize) -> Result<Kernel> {
    check_sigma_size(sigma, size)?;
    let half = (size / 2) as f64;
    let denom = 2.0 * sigma * sigma;
    let profile: Vec<f64> = (0..size)
        .map(|i| {
            let x = i as f64 - half;
            (-x * x / denom).exp()
        })
        .collect();
    let mut coeffs: Vec<f64> = (0..size * size)
        .map(|i| profile[i / size] * profile[i % size])
        .collect();
    let total: f64 = coeffs.iter().sum();
    coeffs.iter_mut().for_each(|v| *v /= total);
    Kernel::new(format!("gaussian_s{sigma}"), Family::Gaussian, size, size, coeffs)
}

/// How a Laplacian-of-Gaussian kernel is synthesized.
#[derive(Debug, Clone, PartialEq)]
pub enum LogMode {
    /// Sample the closed-form Mexican hat and remove its DC component.
    Analytic,
    /// Convolve the Gaussian with a (possibly dilated) Laplace mask, untruncated.
    LaplaceConv(Kernel),
}

pub fn build_log(sigma: f64, size: usize, mode: &LogMode) -> Result<Kernel> {
    check_sigma_size(sigma, size)?;
    match mode {
        LogMode::Analytic => {
            let half = (size / 2) as f64;
            let s2 = sigma * sigma;
            let scale = -1.0 / (std::f64::consts::PI * s2 * s2);
            let mut coeffs: Vec<f64> = (0..size * size)
                .map(|i| {
                    let y = (i / size) as f64 - half;
                    let x = (i % size) as f64 - half;
                    let q = (x * x + y * y) / (2.0 * s2);
                    scale * (1.0 - q) * (-q).exp()
                })
                .collect();
            let mean = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
            coeffs.iter_mut().for_each(|v| *v -= mean);
            Kernel::new(format!("log_s{sigma}"), Family::Log, size, size, coeffs)
        }
        LogMode::LaplaceConv(lap) => {
            if lap.family() != Family::Laplace {
                return Err(Error::WrongFamily {
                    name: lap.name().to_string(),
                    found: lap.family().as_str(),
                    expected: Family::Laplace.as_str(),
                });
            }
            let g = build_gaussian(sigma, size)?;
            Ok(g.convolve_full(lap))
        }
    }
}
