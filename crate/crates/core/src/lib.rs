//! Amplitude-based generalized Hough transforms.
//!
//! Shape evidence is accumulated as complex amplitudes over the four-parameter
//! similarity group (translation, scale, rotation) and turned into a
//! probability map by taking squared magnitudes. The crate is organised
//! bottom-up:
//!
//! - [`grid`]: sampled real/complex fields with a physical frame, bilinear
//!   sampling and finite-difference feature expansion.
//! - [`wave`]: plane waves, intensities, interference, and the far-field
//!   aperture transform.
//! - [`correlation`]: linear cross-correlation (direct and FFT) and 2-D DFTs.
//! - [`radon`]: the line Radon transform and its Fourier-slice relation.
//! - [`group`]: similarity group elements, parameter lattices, template curves
//!   and the curve-based extended Radon transform.
//! - [`filters`]: the correlation filter family, complex superposition of
//!   accumulators, probability maps and peak detection.
//! - [`io`]: PGM, CSV, the `AMPH` accumulator format and detection reports.

pub mod correlation;
pub mod error;
pub mod filters;
pub mod grid;
pub mod group;
pub mod io;
pub mod radon;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64;
