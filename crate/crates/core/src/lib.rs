//! Spectral analysis toolkit for RF chain-free (time-modulated-array)
//! transmitters.
//!
//! The modulating circuit of such a transmitter is modelled as a stepped
//! pulse train: every clock period `T_c` the beamformer weight moves
//! linearly from its previous value to the next one over a fixed response
//! time `T_t`. The crate provides:
//!
//! - [`waveform`]: ideal, realistic and stepped pulses, their closed-form
//!   spectra and an exact analytic Fourier transform for any
//!   piecewise-linear waveform,
//! - [`impaired_dft`]: the hardware-impaired DFT operator mapping amplitude
//!   differences to spectrum samples, and its inverse on the admissible band,
//! - [`shaping`]: root-raised-cosine design and symbol shaping,
//! - [`txchain`]: QPSK mapping and beamformer register quantization,
//! - [`rxsim`]: an idealized matched-filter receiver and phase-error metrics,
//! - [`metrics`]: peak-normalized PSD and harmonic-suppression measurement.
//!
//! ```
//! use tma_core::impaired_dft::{build_operator, forward, FrequencyGrid};
//! use tma_core::waveform::{AmplitudeSequence, HardwareProfile};
//! use num_complex::Complex64;
//!
//! let hw = HardwareProfile::new(10e-9, 20e-9, 6, 6).unwrap();
//! let seq = AmplitudeSequence::from_real(&[0.0, 0.5, 1.0, 0.5, 0.0]).unwrap();
//! let grid = FrequencyGrid::new(vec![1e6, 2e6, 3e6]).unwrap();
//! let op = build_operator(&grid, &hw, seq.transitions()).unwrap();
//! let spectrum: Vec<Complex64> = forward(&op, &seq).unwrap();
//! assert_eq!(spectrum.len(), 3);
//! ```

pub mod error;
pub mod impaired_dft;
pub mod metrics;
pub mod rxsim;
pub mod shaping;
pub mod txchain;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
