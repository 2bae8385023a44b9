//! Idealized receiver.
//!
//! The transmitted waveform is reconstructed exactly from the weights,
//! sampled once per clock period at the clock edges, matched-filtered,
//! delay-compensated and decimated to symbol rate. A least-squares fit
//! against the known reference symbols then removes the deterministic
//! linear response of the chain: a single complex gain by default, or a
//! short symbol-spaced FIR when the truncated RRC pair leaves residual ISI.
//! There is no noise, carrier offset or timing error.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::shaping::RrcFilter;
use crate::txchain::WeightSequence;
use crate::waveform::{to_piecewise_linear, PiecewiseLinearWaveform};

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedConstellation {
    pub symbols: Vec<Complex64>,
    pub reference: Vec<Complex64>,
    pub phase_error_rms_deg: f64,
    pub evm_rms_pct: f64,
}

impl ReceivedConstellation {
    pub fn from_lists(symbols: Vec<Complex64>, reference: Vec<Complex64>) -> Result<Self> {
        let phase_error_rms_deg = phase_error_rms(&symbols, &reference)?;
        let evm_rms_pct = evm_rms(&symbols, &reference)?;
        Ok(Self {
            symbols,
            reference,
            phase_error_rms_deg,
            evm_rms_pct,
        })
    }
}

/// Continuous-time output of the modulating circuit for `seq`.
pub fn synthesize(seq: &WeightSequence) -> PiecewiseLinearWaveform {
    to_piecewise_linear(&seq.amplitudes(), seq.hardware())
}

/// Uniform samples of `w`, `oversample` per clock period, for export.
pub fn export_samples(
    w: &PiecewiseLinearWaveform,
    t_clock: f64,
    oversample: usize,
) -> Result<Vec<(f64, Complex64)>> {
    if oversample == 0 {
        return domain("oversample factor must be at least 1");
    }
    Ok(w.sample_uniform(t_clock / oversample as f64))
}

/// Matched-filter receiver with a data-aided least-squares normalization.
#[derive(Debug, Clone)]
pub struct Receiver {
    filter: Option<RrcFilter>,
    t_clock: f64,
    hold_sps: usize,
    equalizer_taps: usize,
}

impl Receiver {
    /// Receiver for RRC-shaped streams. The normalization fit spans
    /// `2·span + 1` symbols, the extent of the composite response. At one
    /// sample per symbol the pair is far from Nyquist and the fit doubles.
    pub fn matched(filter: RrcFilter, t_clock: f64) -> Self {
        let equalizer_taps = if filter.sps == 1 { 4 } else { 2 } * filter.span + 1;
        Self {
            filter: Some(filter),
            t_clock,
            hold_sps: 1,
            equalizer_taps,
        }
    }

    /// Receiver for unshaped streams holding each symbol for `sps` clock
    /// periods. Samples the middle of each symbol.
    pub fn unshaped(t_clock: f64, sps: usize) -> Self {
        Self {
            filter: None,
            t_clock,
            hold_sps: sps.max(1),
            equalizer_taps: 1,
        }
    }

    /// Overrides the width of the least-squares fit; `1` is a plain
    /// gain/phase normalization.
    pub fn with_equalizer_taps(mut self, taps: usize) -> Self {
        self.equalizer_taps = taps.max(1);
        self
    }

    pub fn equalizer_taps(&self) -> usize {
        self.equalizer_taps
    }

    /// Recovers `reference.len()` symbols from `w`.
    pub fn receive(
        &self,
        w: &PiecewiseLinearWaveform,
        reference: &[Complex64],
    ) -> Result<ReceivedConstellation> {
        let n = reference.len();
        if n == 0 {
            return domain("no reference symbols to receive");
        }
        if !(self.t_clock.is_finite() && self.t_clock > 0.0) {
            return domain(format!("t_clock must be positive, got {}", self.t_clock));
        }
        let sample = |i: isize| w.eval(i as f64 * self.t_clock);
        // Decimated outputs for symbols −half..n+half, so the fit sees the
        // true neighbours of the first and last symbols.
        let taps = self.equalizer_taps.min(n);
        let half = (taps / 2) as isize;
        let symbol_range = -half..n as isize + half;
        let raw: Vec<Complex64> = match &self.filter {
            Some(filt) => {
                let sps = filt.sps as isize;
                let delay = (filt.span * filt.sps) as isize;
                self.check_length(w, 1 + (n as isize - 1) * sps + delay / 2, n)?;
                let h = filt.taps();
                symbol_range
                    .map(|k| {
                        let j = 1 + k * sps + delay;
                        h.iter()
                            .enumerate()
                            .map(|(m, &hm)| sample(j - m as isize) * hm)
                            .sum()
                    })
                    .collect()
            }
            None => {
                let sps = self.hold_sps as isize;
                let index = |k: isize| 1 + k * sps + sps / 2;
                self.check_length(w, index(n as isize - 1), n)?;
                symbol_range.map(|k| sample(index(k))).collect()
            }
        };
        let centre = &raw[half as usize..half as usize + n];
        if centre.iter().all(|r| r.norm_sqr() == 0.0) {
            return Err(Error::Degenerate(
                "received signal is identically zero".into(),
            ));
        }
        let symbols = least_squares_fit(&raw, reference, taps)?;
        ReceivedConstellation::from_lists(symbols, reference.to_vec())
    }

    fn check_length(&self, w: &PiecewiseLinearWaveform, last_index: isize, n: usize) -> Result<()> {
        let needed = last_index as f64 * self.t_clock;
        if needed > w.end_time() * (1.0 + 1e-12) {
            return Err(Error::InsufficientLength(format!(
                "{n} symbols need the waveform to reach {needed:e} s but it ends at {:e} s",
                w.end_time()
            )));
        }
        Ok(())
    }
}

/// Fits a `taps`-long symbol-spaced FIR mapping `raw` onto `reference` in
/// the least-squares sense and returns the fitted output. `raw` carries
/// `taps / 2` extra outputs on each side of the reference span.
fn least_squares_fit(
    raw: &[Complex64],
    reference: &[Complex64],
    taps: usize,
) -> Result<Vec<Complex64>> {
    let design = DMatrix::from_fn(reference.len(), taps, |k, l| raw[k + l]);
    let gram = design.adjoint() * &design;
    let rhs = design.adjoint() * DVector::from_column_slice(reference);
    let coeffs = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("normalization fit is singular".into()))?;
    Ok((&design * coeffs).iter().copied().collect())
}

fn check_pair(received: &[Complex64], reference: &[Complex64]) -> Result<()> {
    if received.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            actual: received.len(),
        });
    }
    if reference.is_empty() {
        return domain("constellation metrics need at least one symbol");
    }
    if reference.iter().any(|r| r.norm_sqr() == 0.0) {
        return domain("reference symbols must be nonzero");
    }
    Ok(())
}

/// RMS of the wrapped angle `arg(received · conj(reference))`, in degrees.
pub fn phase_error_rms(received: &[Complex64], reference: &[Complex64]) -> Result<f64> {
    check_pair(received, reference)?;
    let ms = received
        .iter()
        .zip(reference)
        .map(|(r, s)| (r * s.conj()).arg().powi(2))
        .sum::<f64>()
        / received.len() as f64;
    Ok(ms.sqrt().to_degrees())
}

/// RMS error vector magnitude relative to the reference power, in percent.
pub fn evm_rms(received: &[Complex64], reference: &[Complex64]) -> Result<f64> {
    check_pair(received, reference)?;
    let err: f64 = received
        .iter()
        .zip(reference)
        .map(|(r, s)| (r - s).norm_sqr())
        .sum();
    let pow: f64 = reference.iter().map(|s| s.norm_sqr()).sum();
    Ok(100.0 * (err / pow).sqrt())
}
