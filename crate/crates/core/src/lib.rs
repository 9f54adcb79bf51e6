//! Coherent frequency-diverse-array (C-FDA) radar simulation library.
//!
//! Models an airborne monostatic radar with `M` transmit elements carrying a
//! small per-element carrier offset `Δf`, alongside three reference
//! architectures (phased array, MIMO, FDA-MIMO). The transmit chain applies
//! per-element beamforming, the receive chain demodulates the overlapped
//! spectra with multi-channel frequency mixing (MFM) followed by
//! multi-channel matched filtering (MMF), and the adaptive back end covers
//! mainlobe-jammer suppression (MVDR) and range-ambiguous clutter
//! suppression (space-time-range adaptive processing).
//!
//! Everything is simulated at complex baseband relative to the common
//! carrier; only the per-element offsets `(m-1)Δf` are carried explicitly in
//! the sampled signals, while carrier phase terms enter analytically.
//!
//! Module map:
//! - [`scene`]: physical parameters, delays, spatial/Doppler/range frequencies
//! - [`waveform`]: LFM baseband, per-element transmit bank, Gram matrix
//! - [`steering`]: steering vectors and ideal snapshots for all architectures
//! - [`txchain`]: transmit beamforming and composite transmit signal
//! - [`rxchain`]: echo synthesis, MFM+MMF and baseline receivers, array gains
//! - [`interference`]: mainlobe-jammer study (MVDR, closed-form SINR, Capon)
//! - [`clutter`]: clutter rings, SRDC, STRAP filtering, SDR loss curves
//! - [`numerics`]: dense complex linear algebra, FFT convolution, Dirichlet kernel

pub mod clutter;
pub mod interference;
pub mod numerics;
pub mod rxchain;
pub mod scene;
pub mod steering;
pub mod txchain;
pub mod waveform;

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Propagation speed used for all range/delay conversions (m/s).
///
/// The round number keeps derived quantities exact: a 1 MHz offset gives a
/// secondary ambiguity period of exactly 150 m and a 100 us PRI gives an
/// unambiguous range of exactly 15 km.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Errors surfaced by the simulation chain.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: {field}: {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    #[error("waveform undersampled: sample rate {sample_rate_hz} Hz < 2B = {nyquist_hz} Hz")]
    Undersampled { sample_rate_hz: f64, nyquist_hz: f64 },
    #[error("range {range_m} m is below platform height {height_m} m")]
    RangeBelowPlatform { range_m: f64, height_m: f64 },
    #[error("echo delay {delay_s} s falls outside the sampled window of {window_s} s")]
    DelayOutsideWindow { delay_s: f64, window_s: f64 },
    #[error("matrix is not positive definite{}", if *.loaded { " even after diagonal loading" } else { "; consider diagonal loading" })]
    NotPositiveDefinite { loaded: bool },
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds tolerance")]
    NotHermitian { asymmetry: f64 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
