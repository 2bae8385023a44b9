//! Spectral measurements on exact transforms.
//!
//! Everything here evaluates the analytic spectrum directly, so there is no
//! windowing, leakage or noise floor. Levels are in dB relative to a peak.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::impaired_dft::{stepped_spectrum, FrequencyGrid};
use crate::waveform::{
    numeric_spectrum_oracle, AmplitudeSequence, HardwareProfile, PiecewiseLinearWaveform,
};

/// Anything with an exact Fourier transform.
pub trait SpectrumSource {
    fn spectrum(&self, freqs: &[f64]) -> Vec<Complex64>;

    /// Time extent of the signal, used for the default resolution.
    fn duration(&self) -> f64;
}

impl SpectrumSource for PiecewiseLinearWaveform {
    fn spectrum(&self, freqs: &[f64]) -> Vec<Complex64> {
        freqs
            .iter()
            .map(|&f| numeric_spectrum_oracle(self, f))
            .collect()
    }

    fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }
}

/// A stepped stream evaluated through the matrix-free impaired DFT. Same
/// transform as its piecewise-linear waveform, much cheaper for long streams.
#[derive(Debug, Clone, Copy)]
pub struct SteppedStream<'a> {
    pub seq: &'a AmplitudeSequence,
    pub hw: &'a HardwareProfile,
}

impl SpectrumSource for SteppedStream<'_> {
    fn spectrum(&self, freqs: &[f64]) -> Vec<Complex64> {
        stepped_spectrum(self.seq, self.hw, freqs)
    }

    fn duration(&self) -> f64 {
        self.seq.transitions() as f64 * self.hw.t_clock + self.hw.t_transition
    }
}

fn db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// `|X(f)|²` in dB relative to its maximum over `grid`.
pub fn psd<S: SpectrumSource + ?Sized>(src: &S, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return domain("PSD needs a nonempty frequency grid");
    }
    let power: Vec<f64> = src
        .spectrum(grid.freqs())
        .iter()
        .map(|x| x.norm_sqr())
        .collect();
    if power.iter().any(|p| p.is_nan()) {
        return domain("spectrum is undefined on the grid (DC of a signal with nonzero tails)");
    }
    let peak = power.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Degenerate(
            "spectrum is identically zero on the grid".into(),
        ));
    }
    Ok(power.iter().map(|&p| db(p / peak)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandMeasure {
    /// Marker reading: strongest point in the band.
    Peak,
    /// Channel power: sum over the band.
    Integrated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuppressionOptions {
    /// Roll-off that sets the measurement half-width `R(1+β)/2`.
    pub rolloff: f64,
    /// Grid spacing inside each band. `None` uses `1/duration`.
    pub resolution_hz: Option<f64>,
    pub measure: BandMeasure,
}

impl Default for SuppressionOptions {
    fn default() -> Self {
        Self {
            rolloff: 0.5,
            resolution_hz: None,
            measure: BandMeasure::Peak,
        }
    }
}

/// Offsets covering `(−w, w)` at roughly `step` spacing. The count is kept
/// even so no offset lands on zero.
fn band_offsets(half_width: f64, step: f64) -> Vec<f64> {
    let mut n = (2.0 * half_width / step).ceil().max(2.0) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let d = 2.0 * half_width / n as f64;
    (0..n).map(|i| -half_width + (i as f64 + 0.5) * d).collect()
}

fn band_level(spectrum: &[Complex64], measure: BandMeasure) -> f64 {
    let p = spectrum.iter().map(|x| x.norm_sqr());
    match measure {
        BandMeasure::Peak => p.fold(0.0, f64::max),
        BandMeasure::Integrated => p.sum(),
    }
}

/// Level of the baseband signal above its `k`-th clock image, in dB.
///
/// Both bands have half-width `symbol_rate·(1+β)/2`; the carrier band is
/// centered on DC and the image band on `k/t_clock`. Positive means the
/// image is weaker.
pub fn harmonic_suppression<S: SpectrumSource + ?Sized>(
    src: &S,
    symbol_rate: f64,
    t_clock: f64,
    k: usize,
    opts: &SuppressionOptions,
) -> Result<f64> {
    if k == 0 {
        return domain("harmonic index must be at least 1");
    }
    if !(symbol_rate.is_finite() && symbol_rate > 0.0) {
        return domain(format!("symbol rate must be positive, got {symbol_rate}"));
    }
    if !(t_clock.is_finite() && t_clock > 0.0) {
        return domain(format!("t_clock must be positive, got {t_clock}"));
    }
    if !(opts.rolloff >= 0.0 && opts.rolloff <= 1.0) {
        return domain(format!("roll-off must lie in [0, 1], got {}", opts.rolloff));
    }
    let half = symbol_rate * (1.0 + opts.rolloff) / 2.0;
    let center = k as f64 / t_clock;
    if center < 2.0 * half {
        return domain(format!(
            "carrier and image bands overlap: image at {center:e} Hz, band half-width {half:e} Hz"
        ));
    }
    let step = match opts.resolution_hz {
        Some(r) if r.is_finite() && r > 0.0 => r,
        Some(r) => return domain(format!("resolution must be positive, got {r}")),
        None => 1.0 / src.duration(),
    };
    let offsets = band_offsets(half, step);
    let image: Vec<f64> = offsets.iter().map(|o| center + o).collect();
    let carrier = band_level(&src.spectrum(&offsets), opts.measure);
    let harmonic = band_level(&src.spectrum(&image), opts.measure);
    if carrier == 0.0 {
        return Err(Error::Degenerate(
            "no signal power in the carrier band".into(),
        ));
    }
    if harmonic == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(db(carrier / harmonic))
}

/// Max-hold sweep: `bins` analyzer bins of width `rbw` starting at `start`,
/// each reporting the strongest of `points_per_bin` evenly spaced points.
/// Returns bin centers and levels in dB relative to the strongest bin.
pub fn max_hold_sweep<S: SpectrumSource + ?Sized>(
    src: &S,
    start: f64,
    rbw: f64,
    bins: usize,
    points_per_bin: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if bins == 0 || points_per_bin == 0 {
        return domain("sweep needs at least one bin and one point per bin");
    }
    if !(rbw.is_finite() && rbw > 0.0 && start.is_finite()) {
        return domain("sweep start and bin width must be finite, width positive");
    }
    let d = rbw / points_per_bin as f64;
    let freqs: Vec<f64> = (0..bins * points_per_bin)
        .map(|i| start + (i as f64 + 0.5) * d)
        .collect();
    let spec = src.spectrum(&freqs);
    let levels: Vec<f64> = spec
        .chunks(points_per_bin)
        .map(|c| band_level(c, BandMeasure::Peak))
        .collect();
    let peak = levels.iter().cloned().fold(0.0, f64::max);
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::Degenerate("sweep found no signal power".into()));
    }
    let centers = (0..bins).map(|b| start + (b as f64 + 0.5) * rbw).collect();
    Ok((centers, levels.iter().map(|&p| db(p / peak)).collect()))
}

/// Indices of strict interior local maxima.
pub fn local_maxima(levels: &[f64]) -> Vec<usize> {
    (1..levels.len().saturating_sub(1))
        .filter(|&i| levels[i] > levels[i - 1] && levels[i] > levels[i + 1])
        .collect()
}
