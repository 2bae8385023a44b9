//! The hardware-impaired DFT.
//!
//! The spectrum of a stepped pulse depends on its amplitudes only through
//! the step differences `x'_i = a_i − a_{i+1}`:
//!
//! ```text
//! X(f) = k(f) · s(f)^H · x'
//! k(f) = sinc(π T_t f) / (−j2πf) · e^{−jπ f T_t}
//! s(f) = (1, e^{j2πf T_c}, e^{j4πf T_c}, …)
//! ```
//!
//! Stacking one row per frequency gives an `M × N` matrix that maps the
//! difference vector to spectrum samples. Because `s(f)` is periodic in
//! `1/T_c`, every spectral image at `f + k/T_c` is a copy of the baseband
//! scaled only by the kernel `k(f)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::waveform::{cis_cycles, sinc, AmplitudeSequence, HardwareProfile};

/// Largest condition number accepted by [`inverse_design`].
pub const CONDITION_THRESHOLD: f64 = 1e12;

/// Caller-supplied analysis frequencies, in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    freqs: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        if let Some(i) = freqs.iter().position(|f| !f.is_finite()) {
            return domain(format!("grid frequency {i} is not finite"));
        }
        if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
            return domain(format!(
                "grid frequencies must increase strictly (index {})",
                i + 1
            ));
        }
        Ok(Self { freqs })
    }

    /// `count` points spaced `step` apart starting at `start`.
    pub fn uniform(start: f64, step: f64, count: usize) -> Result<Self> {
        if step.is_nan() || step <= 0.0 {
            return domain(format!("grid step must be positive, got {step}"));
        }
        Self::new((0..count).map(|i| start + i as f64 * step).collect())
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Every point shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(self.freqs.iter().map(|f| f + offset).collect())
    }
}

/// Transition kernel `k(f)`. Undefined at DC, where the waveform spectrum
/// has to come from its area instead.
pub fn kernel_k(f: f64, t_transition: f64) -> Result<Complex64> {
    if f == 0.0 {
        return domain("kernel k(f) has a pole at f = 0; use the waveform area for the DC value");
    }
    Ok(kernel_unchecked(f, t_transition))
}

fn kernel_unchecked(f: f64, t_transition: f64) -> Complex64 {
    let mag = sinc(PI * t_transition * f) / (2.0 * PI * f);
    // 1/(−j) = j
    Complex64::from_polar(mag, -PI * f * t_transition) * Complex64::new(0.0, 1.0)
}

/// Steering column `s(f)`, element `i` = `e^{j2πf·iT_c}`.
pub fn steering_s(f: f64, t_clock: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| cis_cycles(f, t_clock, i as f64).conj())
        .collect()
}

/// `x'_i = a_i − a_{i+1}`.
pub fn difference_vector(seq: &AmplitudeSequence) -> Vec<Complex64> {
    seq.samples().windows(2).map(|w| w[0] - w[1]).collect()
}

/// Stacked `k(f_m)·s(f_m)^H` rows for a fixed grid and circuit.
#[derive(Debug, Clone)]
pub struct ImpairedDftOperator {
    matrix: DMatrix<Complex64>,
    hw: HardwareProfile,
    grid: FrequencyGrid,
}

impl ImpairedDftOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn hardware(&self) -> &HardwareProfile {
        &self.hw
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// Number of transitions the operator accepts.
    pub fn columns(&self) -> usize {
        self.matrix.ncols()
    }

    /// Applies the matrix to a raw difference vector.
    pub fn apply(&self, diff: &[Complex64]) -> Result<Vec<Complex64>> {
        if diff.len() != self.columns() {
            return Err(Error::DimensionMismatch {
                expected: self.columns(),
                actual: diff.len(),
            });
        }
        let x = DVector::from_column_slice(diff);
        Ok((&self.matrix * x).iter().copied().collect())
    }
}

pub fn build_operator(
    grid: &FrequencyGrid,
    hw: &HardwareProfile,
    n: usize,
) -> Result<ImpairedDftOperator> {
    if n == 0 {
        return domain("operator needs at least one transition column");
    }
    if let Some(i) = grid.freqs().iter().position(|&f| f == 0.0) {
        return domain(format!(
            "grid frequency {i} is DC; the impaired DFT excludes f = 0"
        ));
    }
    let freqs = grid.freqs();
    let matrix = DMatrix::from_fn(freqs.len(), n, |m, i| {
        let f = freqs[m];
        kernel_unchecked(f, hw.t_transition) * cis_cycles(f, hw.t_clock, i as f64)
    });
    Ok(ImpairedDftOperator {
        matrix,
        hw: *hw,
        grid: grid.clone(),
    })
}

/// Spectrum of `seq` on the operator's grid.
pub fn forward(op: &ImpairedDftOperator, seq: &AmplitudeSequence) -> Result<Vec<Complex64>> {
    op.apply(&difference_vector(seq))
}

/// Term-by-term evaluation of the stepped-pulse spectrum,
/// `Σ j(a_i − a_{i+1})/(2πf) · sinc(π T_t f) · e^{−j2πf(iT_c + T_t/2)}`.
pub fn stepped_spectrum_direct(
    seq: &AmplitudeSequence,
    hw: &HardwareProfile,
    f: f64,
) -> Result<Complex64> {
    if f == 0.0 {
        return domain("the stepped-pulse sum is undefined at f = 0");
    }
    let a = seq.samples();
    let envelope = sinc(hw.t_transition * PI * f) / (2.0 * PI * f);
    let mid = cis_cycles(f, hw.t_transition, 0.5);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..seq.transitions() {
        let phase = cis_cycles(f, hw.t_clock, i as f64) * mid;
        acc += Complex64::new(0.0, 1.0) * (a[i] - a[i + 1]) * envelope * phase;
    }
    Ok(acc)
}

/// Matrix-free spectrum of a stepped pulse on an arbitrary grid.
///
/// Evaluates `k(f)·Σ x'_i z^i` with `z = e^{−j2πfT_c}` by Horner's rule,
/// so long sequences never materialize the `M × N` matrix. DC points are
/// filled from the waveform area.
pub fn stepped_spectrum(
    seq: &AmplitudeSequence,
    hw: &HardwareProfile,
    freqs: &[f64],
) -> Vec<Complex64> {
    let diff = difference_vector(seq);
    freqs
        .iter()
        .map(|&f| {
            if f == 0.0 {
                return crate::waveform::numeric_spectrum_oracle(
                    &crate::waveform::to_piecewise_linear(seq, hw),
                    0.0,
                );
            }
            let z = cis_cycles(f, hw.t_clock, 1.0);
            let sum = diff
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &d| acc * z + d);
            kernel_unchecked(f, hw.t_transition) * sum
        })
        .collect()
}

/// Outcome of a frequency-domain sample design.
#[derive(Debug, Clone)]
pub struct InverseDesign {
    pub sequence: AmplitudeSequence,
    /// 2-norm condition number of the square impaired-DFT matrix.
    pub condition_number: f64,
}

/// Finds the amplitude sequence whose spectrum hits `targets` on `grid`.
///
/// The grid must be square with the unknowns (one frequency per
/// transition), nonzero, inside `[−1/T_t, 1/T_t)` and clear of the kernel
/// nulls at multiples of `1/T_t`. The differences are solved by LU with
/// partial pivoting and integrated from `a0`.
pub fn inverse_design(
    targets: &[Complex64],
    grid: &FrequencyGrid,
    hw: &HardwareProfile,
    a0: Complex64,
) -> Result<InverseDesign> {
    let n = grid.len();
    if n == 0 {
        return domain("inverse design needs at least one frequency");
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: targets.len(),
        });
    }
    let band = 1.0 / hw.t_transition;
    for (i, &f) in grid.freqs().iter().enumerate() {
        if f == 0.0 {
            return domain(format!(
                "grid frequency {i} is DC; the kernel has a pole there"
            ));
        }
        let cycles = f * hw.t_transition;
        if cycles.round() != 0.0 && (cycles - cycles.round()).abs() < 1e-9 {
            return domain(format!(
                "grid frequency {i} ({f} Hz) sits on a kernel null at a multiple of 1/T_t; the row is singular"
            ));
        }
        if !(-band..band).contains(&f) {
            return domain(format!(
                "grid frequency {i} ({f} Hz) is outside the invertible band [-1/T_t, 1/T_t) = [{:-e}, {:e})",
                -band, band
            ));
        }
    }
    let op = build_operator(grid, hw, n)?;
    let sv = op.matrix.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > CONDITION_THRESHOLD {
        return Err(Error::IllConditioned {
            condition,
            threshold: CONDITION_THRESHOLD,
        });
    }
    let rhs = DVector::from_column_slice(targets);
    let diff = op.matrix.lu().solve(&rhs).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
        threshold: CONDITION_THRESHOLD,
    })?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(a0);
    let mut a = a0;
    for d in diff.iter() {
        a -= d;
        samples.push(a);
    }
    Ok(InverseDesign {
        sequence: AmplitudeSequence::new(samples)?,
        condition_number: condition,
    })
}

/// Image frequencies `f_base + k/T_c` for `k = −k_max..=−1, 1..=k_max`,
/// ascending.
pub fn harmonic_images(f_base: f64, t_clock: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(t_clock.is_finite() && t_clock > 0.0) {
        return domain(format!("t_clock must be positive, got {t_clock}"));
    }
    let k = k_max as i64;
    Ok((-k..=k)
        .filter(|&i| i != 0)
        .map(|i| f_base + i as f64 / t_clock)
        .collect())
}
