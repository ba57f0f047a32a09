//! Mother wavelets, the continuous wavelet transform and its inverse, and a
//! Daubechies-4 discrete transform.

mod cwt;
mod dwt;
mod grid;
mod mother;

pub use cwt::{calibrate_delta_constant, cwt, icwt, shift_check, CoefficientSurface};
pub(crate) use cwt::{check_resolvable, padded_len};
pub use dwt::{dwt_d4, idwt_d4, DwtTree};
pub use grid::{ScaleGrid, Spacing};
pub use mother::{Admissibility, MotherWavelet, ADMISSIBILITY_TOL, MAX_ORDER};
