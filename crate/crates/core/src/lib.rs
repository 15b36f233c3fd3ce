//! Dilated variants of classical edge-detection filters, the detection
//! pipelines built on them, and a boundary benchmark harness.
//!
//! A dilated kernel spreads the taps of a base mask apart by inserting zero
//! gaps; its reach grows while the multiply-accumulate count per pixel stays
//! that of the base mask. The pieces, bottom-up:
//!
//! - [`kernels`]: the mask catalog plus dilation, rotation and synthesis
//! - [`imgproc`]: image planes, replicate-border convolution, thresholding
//! - [`operators`]: gradient, compass, Frei-Chen, Laplace and LoG responses
//! - [`postprocess`]: zero crossing, NMS, hysteresis and Guo-Hall thinning
//! - [`pipelines`]: end-to-end detectors producing benchmark-ready edge maps
//! - [`bench`]: pixel correspondence matching, scoring, dataset runs and sweeps

// `!(x >= 0.0)` guards are written that way on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
mod fsutil;
pub mod imgproc;
pub mod kernels;
pub mod operators;
pub mod pipelines;
pub mod postprocess;

pub use error::{Error, Result};
pub use fsutil::write_atomic;
pub use imgproc::{EdgeMap, GrayImage, RealPlane};
pub use kernels::{Family, Kernel, SparseKernel};
