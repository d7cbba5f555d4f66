//! Frequency-domain post-processing of response traces.

mod dsf;
mod fit;
mod fourier;

pub use dsf::{assemble_dsf, DsfGrid};
pub use fit::{fit_sinusoids_bic, FitOptions, Mode, SpectralModel};
pub use fourier::{dominant_peak, dominant_peak_complex, fourier_time, SpectrumResult, Window};
