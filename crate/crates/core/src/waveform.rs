//! Time-domain pulse models and their spectra.
//!
//! Three pulse families are covered: the ideal rectangle, the realistic
//! trapezoid whose edges take `T_t` to complete, and the stepped pulse
//! produced by a modulating circuit that is re-programmed every `T_c` and
//! needs `T_t` to settle after each update.
//!
//! Every synthesized signal can be converted to a [`PiecewiseLinearWaveform`],
//! whose continuous-time Fourier transform is evaluated exactly by
//! [`numeric_spectrum_oracle`]. The oracle integrates `(α + βt)·e^{-j2πft}`
//! analytically over each segment and is the ground truth the closed-form
//! spectra are checked against.
//!
//! All quantities are SI: seconds and hertz.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Unnormalized sinc, `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Impairment parameters of the modulating circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareProfile {
    /// Response time of one weight update, `T_t`.
    pub t_transition: f64,
    /// Interval between weight updates, `T_c`.
    pub t_clock: f64,
    pub phase_bits: u32,
    pub amp_bits: u32,
}

impl HardwareProfile {
    pub fn new(t_transition: f64, t_clock: f64, phase_bits: u32, amp_bits: u32) -> Result<Self> {
        if !(t_transition.is_finite() && t_transition > 0.0) {
            return domain(format!("t_transition must be positive, got {t_transition}"));
        }
        if !(t_clock.is_finite() && t_clock >= t_transition) {
            return domain(format!(
                "t_clock ({t_clock}) must be finite and at least t_transition ({t_transition})"
            ));
        }
        if !(1..=24).contains(&phase_bits) || !(1..=24).contains(&amp_bits) {
            return domain(format!(
                "register widths must lie in 1..=24 bits, got phase={phase_bits} amp={amp_bits}"
            ));
        }
        Ok(Self {
            t_transition,
            t_clock,
            phase_bits,
            amp_bits,
        })
    }

    /// Same circuit, different clock period.
    pub fn with_clock(&self, t_clock: f64) -> Result<Self> {
        Self::new(self.t_transition, t_clock, self.phase_bits, self.amp_bits)
    }

    pub fn clock_rate(&self) -> f64 {
        1.0 / self.t_clock
    }
}

impl Default for HardwareProfile {
    /// The beamformer used in the over-the-air experiments: 20 ns response
    /// time, 857 kHz update clock, 6-bit phase and attenuation registers.
    fn default() -> Self {
        Self {
            t_transition: 20e-9,
            t_clock: 1.0 / 857e3,
            phase_bits: 6,
            amp_bits: 6,
        }
    }
}

/// Per-clock step amplitudes `a_0, a_1, …, a_N`.
///
/// `a_0` is the value held before the first transition; transition `i`
/// (starting at `i·T_c`) moves the output from `a_i` to `a_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSequence {
    samples: Vec<Complex64>,
}

impl AmplitudeSequence {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return domain("an amplitude sequence needs at least two samples (one transition)");
        }
        if let Some(i) = samples
            .iter()
            .position(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return domain(format!("sample {i} is not finite"));
        }
        Ok(Self { samples })
    }

    pub fn from_real(samples: &[f64]) -> Result<Self> {
        Self::new(samples.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of transitions `N` (one less than the sample count).
    pub fn transitions(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn peak_magnitude(&self) -> f64 {
        self.samples.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&a| a * factor).collect(),
        }
    }
}

/// Exact continuous-time representation of a synthesized signal.
///
/// Between consecutive breakpoints the value changes linearly. Before the
/// first and after the last breakpoint the boundary values are held.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearWaveform {
    breakpoints: Vec<(f64, Complex64)>,
}

impl PiecewiseLinearWaveform {
    pub fn new(breakpoints: Vec<(f64, Complex64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return domain("a piecewise-linear waveform needs at least two breakpoints");
        }
        for (i, (t, v)) in breakpoints.iter().enumerate() {
            if !(t.is_finite() && v.re.is_finite() && v.im.is_finite()) {
                return domain(format!("breakpoint {i} is not finite"));
            }
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[1].0 <= w[0].0) {
            return domain(format!(
                "breakpoint times must increase strictly (index {})",
                i + 1
            ));
        }
        Ok(Self { breakpoints })
    }

    pub fn from_real(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&(t, v)| (t, Complex64::new(v, 0.0)))
                .collect(),
        )
    }

    pub fn breakpoints(&self) -> &[(f64, Complex64)] {
        &self.breakpoints
    }

    pub fn start_time(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// True when the waveform is zero outside its breakpoints, i.e. it has
    /// finite energy and a finite DC value.
    pub fn has_zero_tails(&self) -> bool {
        self.breakpoints[0].1 == Complex64::new(0.0, 0.0)
            && self.breakpoints[self.breakpoints.len() - 1].1 == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let bp = &self.breakpoints;
        // First index whose time is > t; the segment [k-1, k) contains t.
        let k = bp.partition_point(|&(tk, _)| tk <= t);
        if k == 0 {
            return bp[0].1;
        }
        if k == bp.len() {
            return bp[bp.len() - 1].1;
        }
        let (t0, v0) = bp[k - 1];
        let (t1, v1) = bp[k];
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|&(t, v)| (t, v * factor))
                .collect(),
        }
    }

    pub fn shifted(&self, tau: f64) -> Self {
        Self {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|&(t, v)| (t + tau, v))
                .collect(),
        }
    }

    /// `∫|w(t)|² dt`. Infinite when the tails are not zero.
    pub fn energy(&self) -> f64 {
        if !self.has_zero_tails() {
            return f64::INFINITY;
        }
        self.breakpoints
            .windows(2)
            .map(|w| {
                let (t0, g0) = w[0];
                let (t1, g1) = w[1];
                (t1 - t0) * (g0.norm_sqr() + (g0 * g1.conj()).re + g1.norm_sqr()) / 3.0
            })
            .sum()
    }

    /// Samples `(t, w(t))` on a uniform grid covering the breakpoints, for
    /// export.
    pub fn sample_uniform(&self, dt: f64) -> Vec<(f64, Complex64)> {
        let t0 = self.start_time();
        let n = ((self.end_time() - t0) / dt).ceil() as usize;
        (0..=n)
            .map(|i| {
                let t = t0 + i as f64 * dt;
                (t, self.eval(t))
            })
            .collect()
    }
}

fn check_symbol(t_symbol: f64) -> Result<()> {
    if !(t_symbol.is_finite() && t_symbol > 0.0) {
        return domain(format!("t_symbol must be positive, got {t_symbol}"));
    }
    Ok(())
}

fn check_real_pulse(t_symbol: f64, t_transition: f64) -> Result<()> {
    check_symbol(t_symbol)?;
    if !(t_transition.is_finite() && t_transition > 0.0) {
        return domain(format!("t_transition must be positive, got {t_transition}"));
    }
    if 2.0 * t_transition > t_symbol {
        return domain(format!(
            "t_transition ({t_transition}) exceeds half the symbol period ({t_symbol}); the ramps would overlap"
        ));
    }
    Ok(())
}

/// `A·[u(t) − u(t − T_s)]` with `u(0) = 1`.
pub fn eval_ideal_pulse(t: f64, amplitude: f64, t_symbol: f64) -> Result<f64> {
    check_symbol(t_symbol)?;
    Ok(if (0.0..t_symbol).contains(&t) {
        amplitude
    } else {
        0.0
    })
}

/// `A·T_s·sinc(π T_s f)·e^{−jπ T_s f}`.
pub fn spectrum_ideal(f: f64, amplitude: f64, t_symbol: f64) -> Result<Complex64> {
    check_symbol(t_symbol)?;
    let x = PI * t_symbol * f;
    Ok(Complex64::from_polar(amplitude * t_symbol * sinc(x), -x))
}

/// Trapezoid with linear rise on `[0, T_t]`, flat top, and linear fall on
/// `[T_s − T_t, T_s]`.
pub fn eval_real_pulse(t: f64, amplitude: f64, t_symbol: f64, t_transition: f64) -> Result<f64> {
    check_real_pulse(t_symbol, t_transition)?;
    let v = if t <= 0.0 || t >= t_symbol {
        0.0
    } else if t < t_transition {
        t / t_transition
    } else if t > t_symbol - t_transition {
        (t_symbol - t) / t_transition
    } else {
        1.0
    };
    Ok(amplitude * v)
}

/// The commonly quoted closed form of the realistic pulse spectrum,
/// `−A(T_t+T_s)·sinc(−T_t π f)·sinc(−(T_t+T_s) π f)·e^{−jT_s π f}`.
///
/// It does not agree with the exact transform of [`eval_real_pulse`]; see
/// [`real_pulse_discrepancy`].
pub fn spectrum_real_closed_form(
    f: f64,
    amplitude: f64,
    t_symbol: f64,
    t_transition: f64,
) -> Result<Complex64> {
    check_real_pulse(t_symbol, t_transition)?;
    let width = t_transition + t_symbol;
    let mag = -amplitude * width * sinc(-t_transition * PI * f) * sinc(-width * PI * f);
    Ok(Complex64::from_polar(1.0, -t_symbol * PI * f) * mag)
}

/// Result of comparing [`spectrum_real_closed_form`] with the exact
/// transform of the trapezoid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPulseDiscrepancy {
    /// Worst `|closed form − exact| / max|exact|` over the probed frequencies.
    pub closed_form_max_rel_error: f64,
    /// Same for `A(T_s−T_t)·sinc(πT_t f)·sinc(π(T_s−T_t) f)·e^{−jπT_s f}`,
    /// the convolution of rectangles of widths `T_t` and `T_s − T_t`.
    pub convolution_form_max_rel_error: f64,
    pub closed_form_dc: f64,
    pub exact_dc: f64,
}

/// Probes the closed-form realistic-pulse spectrum against the oracle.
pub fn real_pulse_discrepancy(
    amplitude: f64,
    t_symbol: f64,
    t_transition: f64,
    freqs: &[f64],
) -> Result<RealPulseDiscrepancy> {
    check_real_pulse(t_symbol, t_transition)?;
    let w = real_pulse_waveform(amplitude, t_symbol, t_transition)?;
    let exact: Vec<Complex64> = freqs
        .iter()
        .map(|&f| numeric_spectrum_oracle(&w, f))
        .collect();
    let scale = exact
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut closed = 0.0_f64;
    let mut conv = 0.0_f64;
    for (&f, x) in freqs.iter().zip(&exact) {
        let p = spectrum_real_closed_form(f, amplitude, t_symbol, t_transition)?;
        let flat = t_symbol - t_transition;
        let c = Complex64::from_polar(
            amplitude * flat * sinc(PI * t_transition * f) * sinc(PI * flat * f),
            -PI * t_symbol * f,
        );
        closed = closed.max((p - x).norm() / scale);
        conv = conv.max((c - x).norm() / scale);
    }
    Ok(RealPulseDiscrepancy {
        closed_form_max_rel_error: closed,
        convolution_form_max_rel_error: conv,
        closed_form_dc: spectrum_real_closed_form(0.0, amplitude, t_symbol, t_transition)?.re,
        exact_dc: numeric_spectrum_oracle(&w, 0.0).re,
    })
}

/// Breakpoints of the realistic trapezoid.
pub fn real_pulse_waveform(
    amplitude: f64,
    t_symbol: f64,
    t_transition: f64,
) -> Result<PiecewiseLinearWaveform> {
    check_real_pulse(t_symbol, t_transition)?;
    let mut pts = vec![(0.0, 0.0), (t_transition, amplitude)];
    if t_symbol - t_transition > t_transition {
        pts.push((t_symbol - t_transition, amplitude));
    }
    pts.push((t_symbol, 0.0));
    PiecewiseLinearWaveform::from_real(&pts)
}

/// Breakpoints of the ideal rectangle, with the edges approximated by
/// ramps of width `edge` (a rectangle itself is not continuous).
pub fn ideal_pulse_waveform(
    amplitude: f64,
    t_symbol: f64,
    edge: f64,
) -> Result<PiecewiseLinearWaveform> {
    check_real_pulse(t_symbol, edge)?;
    PiecewiseLinearWaveform::from_real(&[
        (-edge / 2.0, 0.0),
        (edge / 2.0, amplitude),
        (t_symbol - edge / 2.0, amplitude),
        (t_symbol + edge / 2.0, 0.0),
    ])
}

/// Output of the modulating circuit at time `t`.
///
/// During `[iT_c, iT_c + T_t)` the amplitude ramps from `a_i` to `a_{i+1}`,
/// then holds `a_{i+1}` until the next clock edge.
pub fn eval_stepped_pulse(t: f64, seq: &AmplitudeSequence, hw: &HardwareProfile) -> Complex64 {
    let a = seq.samples();
    if t < 0.0 {
        return a[0];
    }
    let n = seq.transitions();
    let i = ((t / hw.t_clock).floor() as usize).min(n - 1);
    // floor() can land one period late right below a clock edge.
    let i = if i > 0 && t < i as f64 * hw.t_clock {
        i - 1
    } else {
        i
    };
    let local = t - i as f64 * hw.t_clock;
    if local < hw.t_transition {
        a[i] + (a[i + 1] - a[i]) * (local / hw.t_transition)
    } else {
        a[i + 1]
    }
}

/// Canonical breakpoint list of the stepped pulse.
///
/// Breakpoints sit at `iT_c` and `iT_c + T_t`; runs of equal values are
/// collapsed to their end points.
pub fn to_piecewise_linear(
    seq: &AmplitudeSequence,
    hw: &HardwareProfile,
) -> PiecewiseLinearWaveform {
    let a = seq.samples();
    let n = seq.transitions();
    let mut pts: Vec<(f64, Complex64)> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let start = i as f64 * hw.t_clock;
        let end = start + hw.t_transition;
        push_point(&mut pts, start, a[i]);
        // When T_t == T_c the ramp end coincides with the next clock edge.
        let next = (i + 1) as f64 * hw.t_clock;
        if i + 1 == n || end < next {
            push_point(&mut pts, end, a[i + 1]);
        }
    }
    PiecewiseLinearWaveform { breakpoints: pts }
}

fn push_point(pts: &mut Vec<(f64, Complex64)>, t: f64, v: Complex64) {
    if let Some(&(tl, vl)) = pts.last() {
        if t <= tl {
            // Coincident edge; values agree by construction.
            return;
        }
        if pts.len() >= 2 && vl == v && pts[pts.len() - 2].1 == v {
            pts.last_mut().expect("nonempty").0 = t;
            return;
        }
    }
    pts.push((t, v));
}

/// `∫_0^1 e^{−jxu} du`.
fn phi0(x: f64) -> Complex64 {
    if x.abs() < 1.0 {
        series(x, 1)
    } else {
        Complex64::from_polar(sinc(x / 2.0), -x / 2.0)
    }
}

/// `∫_0^1 u·e^{−jxu} du`.
fn phi1(x: f64) -> Complex64 {
    if x.abs() < 1.0 {
        series(x, 2)
    } else {
        // Midpoint form: e^{−jx/2}·(sinc(x/2)/2 + ∫_{−½}^{½} v·e^{−jxv} dv).
        let (s, c) = (x / 2.0).sin_cos();
        let odd = Complex64::new(0.0, c / x - 2.0 * s / (x * x));
        Complex64::from_polar(1.0, -x / 2.0) * (sinc(x / 2.0) / 2.0 + odd)
    }
}

/// `Σ_n (−jx)^n / (n!·(n + offset))`.
fn series(x: f64, offset: u32) -> Complex64 {
    let step = Complex64::new(0.0, -x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..30u32 {
        if n > 0 {
            term = term * step / n as f64;
        }
        sum += term / (n + offset) as f64;
    }
    sum
}

/// Exact Fourier transform `∫ w(t)·e^{−j2πft} dt`.
///
/// Each segment contributes the closed-form integral of a linear function
/// against the complex exponential. Non-zero boundary values are held to
/// ±∞ and contribute the (Abel-regularized) transform of a one-sided
/// constant, which is finite for `f ≠ 0`. At `f = 0` the result is the total
/// area, or NaN when a tail is non-zero (the DC term would be a Dirac).
pub fn numeric_spectrum_oracle(w: &PiecewiseLinearWaveform, f: f64) -> Complex64 {
    let bp = &w.breakpoints;
    let omega = 2.0 * PI * f;
    if f == 0.0 {
        if !w.has_zero_tails() {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let area: Complex64 = bp
            .windows(2)
            .map(|s| (s[0].1 + s[1].1) * (0.5 * (s[1].0 - s[0].0)))
            .sum();
        return area;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for s in bp.windows(2) {
        let (t0, g0) = s[0];
        let (t1, g1) = s[1];
        let len = t1 - t0;
        let x = omega * len;
        let e0 = cis_cycles(f, t0, 1.0);
        acc += e0 * (g0 * phi0(x) + (g1 - g0) * phi1(x)) * len;
    }
    let (tf, vf) = bp[0];
    let (tl, vl) = bp[bp.len() - 1];
    let j_over_omega = Complex64::new(0.0, 1.0 / omega);
    if vf != Complex64::new(0.0, 0.0) {
        acc += vf * cis_cycles(f, tf, 1.0) * j_over_omega;
    }
    if vl != Complex64::new(0.0, 0.0) {
        acc -= vl * cis_cycles(f, tl, 1.0) * j_over_omega;
    }
    acc
}

/// `e^{−j2π·f·t·m}`, with the cycle count formed in double-double and
/// reduced modulo one before scaling by 2π. Keeps full accuracy when the
/// product is many thousands of cycles.
pub fn cis_cycles(f: f64, t: f64, m: f64) -> Complex64 {
    let hi = f * t;
    let lo = f.mul_add(t, -hi);
    let p = hi * m;
    let e = hi.mul_add(m, -p) + lo * m;
    let frac = (p - p.round()) + e;
    Complex64::from_polar(1.0, -2.0 * PI * frac)
}

/// A single pulse whose edges are each split into `steps` staircase steps.
///
/// The symbol period `t_symbol` is fixed. Each edge occupies a quarter of
/// it, so the clock period is `t_symbol / (4·steps)` and the flat top lasts
/// half a symbol. With `steps = 1` the edges are single `T_t` ramps; more
/// steps spread the same edge over finer increments of `amplitude / steps`.
pub fn stepped_trapezoid(
    steps: usize,
    amplitude: f64,
    t_symbol: f64,
    t_transition: f64,
) -> Result<(AmplitudeSequence, HardwareProfile)> {
    if steps == 0 {
        return domain("stepped trapezoid needs at least one step per edge");
    }
    check_symbol(t_symbol)?;
    let t_clock = t_symbol / (4 * steps) as f64;
    let hw = HardwareProfile::new(t_transition, t_clock, 6, 6)?;
    let n = steps as f64;
    let mut a = Vec::with_capacity(4 * steps + 1);
    a.push(0.0);
    for i in 0..4 * steps {
        let level = if i < steps {
            (i + 1) as f64 / n
        } else if i < 3 * steps {
            1.0
        } else {
            (4 * steps - i - 1) as f64 / n
        };
        a.push(amplitude * level);
    }
    Ok((AmplitudeSequence::from_real(&a)?, hw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TS: f64 = 1e-6;

    #[test]
    fn ideal_pulse_values() {
        assert_eq!(eval_ideal_pulse(TS / 2.0, 1.0, TS).unwrap(), 1.0);
        assert_eq!(eval_ideal_pulse(-TS, 1.0, TS).unwrap(), 0.0);
        assert_eq!(eval_ideal_pulse(0.0, 2.0, TS).unwrap(), 2.0);
        assert_eq!(eval_ideal_pulse(TS, 2.0, TS).unwrap(), 0.0);
        assert!(eval_ideal_pulse(0.0, 1.0, 0.0).is_err());
        assert!(eval_ideal_pulse(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn ideal_spectrum_dc_and_nulls() {
        let x0 = spectrum_ideal(0.0, 1.0, TS).unwrap();
        assert_eq!(x0, Complex64::new(1e-6, 0.0));
        for k in [1, 2, 5, -3] {
            let x = spectrum_ideal(k as f64 / TS, 1.7, TS).unwrap();
            assert!(x.norm() < 1e-20, "k={k}: {x}");
        }
    }

    #[test]
    fn ideal_spectrum_matches_oracle() {
        // A rectangle is the limit of the trapezoid; sub-femtosecond edges
        // keep the comparison within 1e-12 at 0.3 MHz.
        let w = ideal_pulse_waveform(1.0, TS, 1e-18).unwrap();
        let f = 0.3e6;
        let exact = numeric_spectrum_oracle(&w, f);
        let closed = spectrum_ideal(f, 1.0, TS).unwrap();
        assert!((exact - closed).norm() / closed.norm() < 1e-12);
    }

    #[test]
    fn real_pulse_values() {
        let tt = TS / 10.0;
        assert_relative_eq!(
            eval_real_pulse(tt / 2.0, 1.0, TS, tt).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            eval_real_pulse(TS / 2.0, 1.0, TS, tt).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            eval_real_pulse(TS - tt / 4.0, 1.0, TS, tt).unwrap(),
            0.25,
            epsilon = 1e-9
        );
        assert_eq!(eval_real_pulse(-1e-9, 1.0, TS, tt).unwrap(), 0.0);
        assert_eq!(eval_real_pulse(2.0 * TS, 1.0, TS, tt).unwrap(), 0.0);
        assert!(eval_real_pulse(0.0, 1.0, TS, 0.6 * TS).is_err());
    }

    #[test]
    fn closed_form_real_spectrum_dc() {
        let tt = 20e-9;
        let x = spectrum_real_closed_form(0.0, 1.0, TS, tt).unwrap();
        assert_relative_eq!(x.re, -(tt + TS), max_relative = 1e-15);
        assert_eq!(x.im, 0.0);
    }

    #[test]
    fn closed_form_real_spectrum_rolls_off_past_transition_frequency() {
        let tt = 20e-9;
        // Stay off the ideal pulse's own nulls.
        let f = 10.0 / tt + 0.5 / TS;
        let real = spectrum_real_closed_form(f, 1.0, TS, tt).unwrap().norm();
        let ideal = spectrum_ideal(f, 1.0, TS).unwrap().norm();
        assert!(real < ideal, "{real} vs {ideal}");
    }

    #[test]
    fn closed_form_real_spectrum_disagrees_with_oracle() {
        let tt = 50e-9;
        let freqs: Vec<f64> = (1..200).map(|k| k as f64 * 0.137e6).collect();
        let d = real_pulse_discrepancy(1.0, TS, tt, &freqs).unwrap();
        assert!(d.closed_form_max_rel_error > 0.1, "{d:?}");
        assert!(d.convolution_form_max_rel_error < 1e-12, "{d:?}");
        assert_relative_eq!(d.exact_dc, TS - tt, max_relative = 1e-12);
        assert_relative_eq!(d.closed_form_dc, -(TS + tt), max_relative = 1e-12);
    }

    #[test]
    fn stepped_pulse_ramp_points() {
        let hw = HardwareProfile::new(10e-9, 40e-9, 6, 6).unwrap();
        let seq = AmplitudeSequence::from_real(&[0.0, 1.0, -0.5, 0.25]).unwrap();
        let a = seq.samples();
        for i in 0..3 {
            let t0 = i as f64 * hw.t_clock;
            let mid = eval_stepped_pulse(t0 + hw.t_transition / 2.0, &seq, &hw);
            assert!((mid - (a[i] + a[i + 1]) / 2.0).norm() < 1e-12);
            let end = eval_stepped_pulse(t0 + hw.t_transition, &seq, &hw);
            assert!((end - a[i + 1]).norm() < 1e-12);
        }
        assert_eq!(eval_stepped_pulse(-1.0, &seq, &hw), a[0]);
        assert_eq!(eval_stepped_pulse(1.0, &seq, &hw), a[3]);
    }

    #[test]
    fn continuous_trapezoid_matches_real_pulse() {
        let tt = 10e-9;
        let hw = HardwareProfile::new(tt, tt, 6, 6).unwrap();
        let seq = AmplitudeSequence::from_real(&[0.0, 1.5, 1.5, 0.0]).unwrap();
        for k in 0..=300 {
            let t = -5e-9 + k as f64 * 0.12e-9;
            let stepped = eval_stepped_pulse(t, &seq, &hw);
            let real = eval_real_pulse(t, 1.5, 3.0 * tt, tt).unwrap();
            assert!(
                (stepped.re - real).abs() < 1e-12 && stepped.im == 0.0,
                "t={t}"
            );
        }
    }

    #[test]
    fn piecewise_breakpoint_counts() {
        let tt = 10e-9;
        let hw = HardwareProfile::new(tt, tt, 6, 6).unwrap();
        let w = to_piecewise_linear(&AmplitudeSequence::from_real(&[0.0, 1.0]).unwrap(), &hw);
        assert_eq!(
            w.breakpoints(),
            &[
                (0.0, Complex64::new(0.0, 0.0)),
                (tt, Complex64::new(1.0, 0.0))
            ]
        );
        for t_clock in [tt, 3.0 * tt] {
            let hw = HardwareProfile::new(tt, t_clock, 6, 6).unwrap();
            let w = to_piecewise_linear(
                &AmplitudeSequence::from_real(&[0.0, 1.0, 1.0, 0.0]).unwrap(),
                &hw,
            );
            assert_eq!(w.breakpoints().len(), 4, "{:?}", w.breakpoints());
        }
    }

    #[test]
    fn oracle_dc_is_area() {
        let w = PiecewiseLinearWaveform::from_real(&[
            (0.0, 0.0),
            (1e-9, 2.0),
            (1e-6, 2.0),
            (1.001e-6, 0.0),
        ])
        .unwrap();
        assert_relative_eq!(
            numeric_spectrum_oracle(&w, 0.0).re,
            2.0 * 1e-6,
            max_relative = 1e-12
        );
        let step = PiecewiseLinearWaveform::from_real(&[(0.0, 0.0), (1e-9, 1.0)]).unwrap();
        assert!(numeric_spectrum_oracle(&step, 0.0).re.is_nan());
    }

    #[test]
    fn oracle_handles_held_tails() {
        // A unit step ramping over T: X(f) = sinc(πfT)·e^{−jπfT}/(j2πf).
        let t = 7e-9;
        let w = PiecewiseLinearWaveform::from_real(&[(0.0, 0.0), (t, 1.0)]).unwrap();
        for f in [1e5, 3.3e7, -2e8] {
            let expected = Complex64::from_polar(sinc(PI * f * t), -PI * f * t)
                / Complex64::new(0.0, 2.0 * PI * f);
            let got = numeric_spectrum_oracle(&w, f);
            assert!((got - expected).norm() / expected.norm() < 1e-12, "f={f}");
        }
    }

    #[test]
    fn oracle_conjugate_symmetry_and_shift() {
        let w = PiecewiseLinearWaveform::from_real(&[
            (0.0, 0.0),
            (3e-9, 0.7),
            (9e-9, -0.2),
            (20e-9, 0.0),
        ])
        .unwrap();
        let tau = 4.2e-9;
        let ws = w.shifted(tau);
        for f in [1e6, 5.5e7, 2.9e8] {
            let x = numeric_spectrum_oracle(&w, f);
            let xn = numeric_spectrum_oracle(&w, -f);
            assert!((xn - x.conj()).norm() < 1e-12 * x.norm().max(1e-30));
            let expected = x * Complex64::from_polar(1.0, -2.0 * PI * f * tau);
            assert!((numeric_spectrum_oracle(&ws, f) - expected).norm() < 1e-12 * x.norm());
        }
    }

    #[test]
    fn stepped_trapezoid_shape() {
        let (seq, hw) = stepped_trapezoid(2, 1.0, 500e-9, 10e-9).unwrap();
        let re: Vec<f64> = seq.samples().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![0.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.0]);
        assert_relative_eq!(hw.t_clock, 62.5e-9, max_relative = 1e-15);
        assert!(stepped_trapezoid(0, 1.0, 500e-9, 10e-9).is_err());
        // Edge steps shorter than the response time are not realizable.
        assert!(stepped_trapezoid(20, 1.0, 500e-9, 10e-9).is_err());
    }

    #[test]
    fn energy_of_trapezoid() {
        let tt = 0.1;
        let w = real_pulse_waveform(1.0, 1.0, tt).unwrap();
        // Flat part 0.8 plus two ramps of energy T_t/3.
        assert_relative_eq!(w.energy(), 0.8 + 2.0 * tt / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn hardware_profile_validation() {
        assert!(HardwareProfile::new(0.0, 1e-6, 6, 6).is_err());
        assert!(HardwareProfile::new(2e-6, 1e-6, 6, 6).is_err());
        assert!(HardwareProfile::new(1e-9, 1e-6, 0, 6).is_err());
        assert!(HardwareProfile::new(1e-9, 1e-9, 6, 6).is_ok());
        let hw = HardwareProfile::default();
        assert_eq!((hw.phase_bits, hw.amp_bits), (6, 6));
        assert_relative_eq!(hw.clock_rate(), 857e3, max_relative = 1e-12);
    }

    #[test]
    fn amplitude_sequence_validation() {
        assert!(AmplitudeSequence::from_real(&[1.0]).is_err());
        assert!(AmplitudeSequence::from_real(&[0.0, f64::NAN]).is_err());
        assert_eq!(
            AmplitudeSequence::from_real(&[0.0, 1.0, 0.0])
                .unwrap()
                .transitions(),
            2
        );
    }
}
