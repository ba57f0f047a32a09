//! Identification of impulse transient functions (ITFs) in a wavelet basis.
//!
//! Input and output records are split by a continuous wavelet transform into
//! scale-indexed "frequency channels". Each channel is treated as a linear
//! subsystem and deconvolved on its own; the stacked channel estimates form an
//! ITF surface `h(a, τ)` over scale and lag.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command-line
//! front end live in the `wavident` crate.
//!
//! Module map:
//!
//! - [`signals`]: sampled series, seeded generation, statistics, correlation.
//! - [`spectral`]: FFT, convolution and regularised spectral division.
//! - [`toeplitz`]: symmetric Toeplitz solver shared by the deconvolution paths.
//! - [`wavelet`]: mother wavelets, CWT / inverse CWT, Daubechies-4 DWT.
//! - [`identify`]: channel deconvolution, ITF surfaces, Wiener–Hopf, restore error.
//! - [`systems`]: synthetic LTI / Hammerstein / Wiener models and classification.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod identify;
pub mod signals;
pub mod spectral;
pub mod systems;
pub mod toeplitz;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;
