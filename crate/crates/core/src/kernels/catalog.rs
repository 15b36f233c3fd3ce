//! Published edge-detection masks, stored exactly as printed.
//!
//! Orthogonal and compass entries hold only the x-axis (or 0-degree) mask;
//! the companions come from [`super::rotate_orthogonal`] and
//! [`super::compass_set`].

use std::f64::consts::SQRT_2;

use super::{Family, Kernel};
use crate::error::{Error, Result};

const S2: f64 = SQRT_2;

/// Laplace approximations available at 3x3 (V1..V5) and 5x5 (V1, V2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplaceVariant {
    V1,
    V2,
    V3,
    V4,
    V5,
}

impl LaplaceVariant {
    pub const ALL: [LaplaceVariant; 5] = [
        LaplaceVariant::V1,
        LaplaceVariant::V2,
        LaplaceVariant::V3,
        LaplaceVariant::V4,
        LaplaceVariant::V5,
    ];

    pub fn catalog_name(self) -> &'static str {
        match self {
            LaplaceVariant::V1 => "laplace_v1",
            LaplaceVariant::V2 => "laplace_v2",
            LaplaceVariant::V3 => "laplace_v3",
            LaplaceVariant::V4 => "laplace_v4",
            LaplaceVariant::V5 => "laplace_v5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.strip_prefix("laplace_").unwrap_or(&s);
        match s {
            "v1" | "1" => Some(LaplaceVariant::V1),
            "v2" | "2" => Some(LaplaceVariant::V2),
            "v3" | "3" => Some(LaplaceVariant::V3),
            "v4" | "4" => Some(LaplaceVariant::V4),
            "v5" | "5" => Some(LaplaceVariant::V5),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        &self.catalog_name()["laplace_".len()..]
    }

    pub fn kernel(self, size: usize) -> Result<Kernel> {
        catalog_get(self.catalog_name(), size)
    }
}

/// Every `(name, sizes)` pair the catalog can serve.
pub fn catalog_entries() -> &'static [(&'static str, &'static [usize])] {
    &[
        ("pixel_difference", &[3]),
        ("separated_pixel_difference", &[3]),
        ("sobel", &[3, 5, 7]),
        ("prewitt", &[3, 5, 7]),
        ("kirsch", &[3, 5]),
        ("kitchen_malin", &[3]),
        ("kayyali", &[3]),
        ("scharr", &[3, 5]),
        ("kroon", &[3]),
        ("orhei", &[3, 5]),
        ("prewitt_compass", &[3]),
        ("robinson_compass", &[3]),
        ("kirsch_compass", &[3]),
        ("frei_chen_g1", &[3]),
        ("frei_chen_g2", &[3]),
        ("frei_chen_g3", &[3]),
        ("frei_chen_g4", &[3]),
        ("frei_chen_g5", &[3]),
        ("frei_chen_g6", &[3]),
        ("frei_chen_g7", &[3]),
        ("frei_chen_g8", &[3]),
        ("frei_chen_g9", &[3]),
        ("laplace_v1", &[3, 5]),
        ("laplace_v2", &[3, 5]),
        ("laplace_v3", &[3]),
        ("laplace_v4", &[3]),
        ("laplace_v5", &[3]),
    ]
}

/// Every catalog mask at every published size.
pub fn catalog_all() -> Vec<Kernel> {
    catalog_entries()
        .iter()
        .flat_map(|(name, sizes)| sizes.iter().map(move |&s| catalog_get(name, s)))
        .collect::<Result<Vec<_>>>()
        .expect("catalog entries resolve")
}

/// The nine Frei-Chen masks G1..G9 in order.
pub fn frei_chen_basis() -> [Kernel; 9] {
    std::array::from_fn(|i| catalog_get(&format!("frei_chen_g{}", i + 1), 3).expect("frei-chen basis is complete"))
}

/// Looks up a published mask. Returns a fresh copy.
pub fn catalog_get(name: &str, size: usize) -> Result<Kernel> {
    use Family::*;
    let name = name.trim().to_ascii_lowercase().replace('-', "_");
    let k3 = |f: Family, m: [[f64; 3]; 3]| Ok(Kernel::from_rows(&name, f, m));
    let k5 = |f: Family, m: [[f64; 5]; 5]| Ok(Kernel::from_rows(&name, f, m));
    let k7 = |f: Family, m: [[f64; 7]; 7]| Ok(Kernel::from_rows(&name, f, m));
    #[rustfmt::skip]
    let found = match (name.as_str(), size) {
        ("pixel_difference", 3) => k3(Orthogonal, [[0., 0., 0.], [0., -1., 1.], [0., 0., 0.]]),
        ("separated_pixel_difference", 3) => k3(Orthogonal, [[0., 0., 0.], [-1., 0., 1.], [0., 0., 0.]]),
        ("sobel", 3) => k3(Orthogonal, [[-1., 0., 1.], [-2., 0., 2.], [-1., 0., 1.]]),
        ("prewitt", 3) => k3(Orthogonal, [[-1., 0., 1.], [-1., 0., 1.], [-1., 0., 1.]]),
        ("kirsch", 3) => k3(Orthogonal, [[-3., -3., 5.], [-3., 0., 5.], [-3., -3., 5.]]),
        ("kitchen_malin", 3) => k3(Orthogonal, [[-2., 0., 2.], [-3., 0., 3.], [-2., 0., 2.]]),
        ("kayyali", 3) => k3(Orthogonal, [[-6., 0., 6.], [0., 0., 0.], [6., 0., -6.]]),
        ("scharr", 3) => k3(Orthogonal, [[-3., 0., 3.], [-10., 0., 10.], [-3., 0., 3.]]),
        ("kroon", 3) => k3(Orthogonal, [[-17., 0., 17.], [-61., 0., 61.], [-17., 0., 17.]]),
        ("orhei", 3) => k3(Orthogonal, [[-1., 0., 1.], [-4., 0., 4.], [-1., 0., 1.]]),

        ("sobel", 5) => k5(Orthogonal, [
            [-5., -4., 0., 4., 5.],
            [-8., -10., 0., 10., 8.],
            [-10., -20., 0., 20., 10.],
            [-8., -10., 0., 10., 8.],
            [-5., -4., 0., 4., 5.],
        ]),
        ("prewitt", 5) => k5(Orthogonal, [
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
        ]),
        ("kirsch", 5) => k5(Orthogonal, [
            [-7., -7., -7., 9., 9.],
            [-7., -3., -3., 5., 9.],
            [-7., -3., 0., 5., 9.],
            [-7., -3., -3., 5., 9.],
            [-7., -7., -7., 9., 9.],
        ]),
        // Row 2 is asymmetric as published.
        ("scharr", 5) => k5(Orthogonal, [
            [-1., -1., 0., 1., 1.],
            [-2., -2., 0., 1., 2.],
            [-3., -6., 0., 6., 3.],
            [-2., -2., 0., 2., 2.],
            [-1., -1., 0., 1., 1.],
        ]),
        ("orhei", 5) => k5(Orthogonal, [
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
            [-8., -4., 0., 4., 8.],
            [-2., -1., 0., 1., 2.],
            [-2., -1., 0., 1., 2.],
        ]),

        ("sobel", 7) => k7(Orthogonal, [
            [-780., -720., -468., 0., 468., 720., 780.],
            [-1080., -1170., -936., 0., 936., 1170., 1080.],
            [-1404., -1872., -2340., 0., 2340., 1872., 1404.],
            [-1560., -2340., -4680., 0., 4680., 2340., 1560.],
            [-1404., -1872., -2340., 0., 2340., 1872., 1404.],
            [-1080., -1170., -936., 0., 936., 1170., 1080.],
            [-780., -720., -468., 0., 468., 720., 780.],
        ]),
        ("prewitt", 7) => k7(Orthogonal, [[-3., -2., -1., 0., 1., 2., 3.]; 7]),

        ("prewitt_compass", 3) => k3(Compass, [[-1., 1., 1.], [-1., -2., 1.], [-1., 1., 1.]]),
        ("robinson_compass", 3) => k3(Compass, [[-1., 0., 1.], [-2., 0., 2.], [-1., 0., 1.]]),
        ("kirsch_compass", 3) => k3(Compass, [[-3., -3., 5.], [-3., 0., 5.], [-3., -3., 5.]]),

        ("frei_chen_g1", 3) => k3(FreiChen, [[-1., 0., 1.], [-S2, 0., S2], [-1., 0., 1.]]),
        ("frei_chen_g2", 3) => k3(FreiChen, [[-1., -S2, -1.], [0., 0., 0.], [1., S2, 1.]]),
        // G3 and G4 carry the classical negative corner; with the positive sign
        // the ripple masks would respond to flat regions.
        ("frei_chen_g3", 3) => k3(FreiChen, [[0., -1., S2], [1., 0., -1.], [-S2, 1., 0.]]),
        ("frei_chen_g4", 3) => k3(FreiChen, [[S2, -1., 0.], [-1., 0., 1.], [0., 1., -S2]]),
        ("frei_chen_g5", 3) => k3(FreiChen, [[0., 1., 0.], [-1., 0., -1.], [0., 1., 0.]]),
        ("frei_chen_g6", 3) => k3(FreiChen, [[-1., 0., 1.], [0., 0., 0.], [1., 0., -1.]]),
        ("frei_chen_g7", 3) => k3(FreiChen, [[1., -2., 1.], [-2., 4., -2.], [1., -2., 1.]]),
        ("frei_chen_g8", 3) => k3(FreiChen, [[-2., 1., -2.], [1., 4., 1.], [-2., 1., -2.]]),
        ("frei_chen_g9", 3) => k3(FreiChen, [[1., 1., 1.], [1., 1., 1.], [1., 1., 1.]]),

        ("laplace_v1", 3) => k3(Laplace, [[0., 1., 0.], [1., -4., 1.], [0., 1., 0.]]),
        ("laplace_v2", 3) => k3(Laplace, [[1., 1., 1.], [1., -8., 1.], [1., 1., 1.]]),
        ("laplace_v3", 3) => k3(Laplace, [[-1., 2., -1.], [2., -4., 2.], [-1., 2., -1.]]),
        ("laplace_v4", 3) => k3(Laplace, [[1., 4., 1.], [4., -20., 4.], [1., 4., 1.]]),
        // Sums to 2 and breaks symmetry as published; kept verbatim.
        ("laplace_v5", 3) => k3(Laplace, [[2., -1., 2.], [-1., -4., 1.], [2., -1., 2.]]),
        ("laplace_v1", 5) => k5(Laplace, [
            [0., 0., 1., 0., 0.],
            [0., 1., 2., 1., 0.],
            [1., 2., -17., 2., 1.],
            [0., 1., 2., 1., 0.],
            [0., 0., 1., 0., 0.],
        ]),
        ("laplace_v2", 5) => k5(Laplace, [
            [1., 1., 1., 1., 1.],
            [1., 1., 1., 1., 1.],
            [1., 1., -18., 1., 1.],
            [1., 1., 1., 1., 1.],
            [1., 1., 1., 1., 1.],
        ]),
        _ => Err(()),
    };
    found.map_err(|()| {
        if catalog_entries().iter().any(|(n, _)| *n == name) {
            Error::UnsupportedSize { name, size }
        } else {
            Error::UnknownKernel(name)
        }
    })
}
