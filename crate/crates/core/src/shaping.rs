//! Root-raised-cosine pulse shaping.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::waveform::AmplitudeSequence;

/// Default filter length in symbols.
pub const DEFAULT_SPAN: usize = 8;

/// Linear-phase RRC filter, normalized to unit energy.
#[derive(Debug, Clone, PartialEq)]
pub struct RrcFilter {
    pub rolloff: f64,
    pub sps: usize,
    pub span: usize,
    taps: Vec<f64>,
}

impl RrcFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Delay of the filter peak, in samples.
    pub fn group_delay(&self) -> usize {
        self.span * self.sps / 2
    }
}

/// RRC impulse response at `t` symbol periods from the peak (unscaled).
fn rrc_impulse(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    let q = 4.0 * beta * t;
    if (1.0 - q * q).abs() < 1e-9 {
        let arg = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    ((PI * t * (1.0 - beta)).sin() + q * (PI * t * (1.0 + beta)).cos()) / (PI * t * (1.0 - q * q))
}

pub fn design_rrc(rolloff: f64, sps: usize, span: usize) -> Result<RrcFilter> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return domain(format!("RRC roll-off must lie in (0, 1], got {rolloff}"));
    }
    if sps == 0 {
        return domain("samples per symbol must be at least 1");
    }
    if span < 2 || !span.is_multiple_of(2) {
        return domain(format!(
            "RRC span must be an even number of symbols >= 2, got {span}"
        ));
    }
    let len = span * sps + 1;
    let center = (len / 2) as isize;
    let mut taps: Vec<f64> = (0..len as isize)
        .map(|i| rrc_impulse((i - center) as f64 / sps as f64, rolloff))
        .collect();
    let norm = taps.iter().map(|h| h * h).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|h| *h /= norm);
    Ok(RrcFilter {
        rolloff,
        sps,
        span,
        taps,
    })
}

/// Zero-stuffs `symbols` by the filter's SPS and convolves with the taps.
///
/// The result has `len(symbols)·sps + span·sps` filtered samples preceded by
/// the idle value `a_0 = 0`.
pub fn shape_symbols(symbols: &[Complex64], filt: &RrcFilter) -> Result<AmplitudeSequence> {
    if symbols.is_empty() {
        return domain("cannot shape an empty symbol stream");
    }
    let sps = filt.sps;
    let taps = filt.taps();
    let out_len = symbols.len() * sps + filt.span * sps;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len + 1];
    for (k, &s) in symbols.iter().enumerate() {
        let base = 1 + k * sps;
        for (m, &h) in taps.iter().enumerate() {
            out[base + m] += s * h;
        }
    }
    AmplitudeSequence::new(out)
}

/// Rectangular shaping: each symbol is held for `sps` clock periods between
/// idle zeros.
pub fn hold_symbols(symbols: &[Complex64], sps: usize) -> Result<AmplitudeSequence> {
    if symbols.is_empty() {
        return domain("cannot shape an empty symbol stream");
    }
    if sps == 0 {
        return domain("samples per symbol must be at least 1");
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(symbols.len() * sps + 2);
    out.push(zero);
    for &s in symbols {
        out.extend(std::iter::repeat_n(s, sps));
    }
    out.push(zero);
    AmplitudeSequence::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn filter_invariants() {
        let f = design_rrc(0.5, 8, 8).unwrap();
        let h = f.taps();
        assert_eq!(h.len(), 65);
        assert_relative_eq!(
            h.iter().map(|x| x * x).sum::<f64>(),
            1.0,
            max_relative = 1e-14
        );
        for i in 0..h.len() {
            assert_relative_eq!(h[i], h[h.len() - 1 - i], max_relative = 1e-12);
        }
        let c = h[32];
        assert!(h.iter().all(|&x| x <= c));
        assert_eq!(f.group_delay(), 32);
    }

    #[test]
    fn singular_points_use_limits() {
        for beta in [0.25, 0.5, 1.0] {
            let t = 1.0 / (4.0 * beta);
            let at = rrc_impulse(t, beta);
            for eps in [1e-6, -1e-6] {
                assert!(
                    (rrc_impulse(t + eps, beta) - at).abs() < 1e-5,
                    "beta {beta}"
                );
            }
        }
        assert!((rrc_impulse(1e-7, 0.5) - rrc_impulse(0.0, 0.5)).abs() < 1e-6);
        // β = 0.25, sps = 4 puts taps exactly on t = ±1 symbol.
        assert!(design_rrc(0.25, 4, 8)
            .unwrap()
            .taps()
            .iter()
            .all(|x| x.is_finite()));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(design_rrc(0.0, 8, 8).is_err());
        assert!(design_rrc(1.5, 8, 8).is_err());
        assert!(design_rrc(0.5, 0, 8).is_err());
        assert!(design_rrc(0.5, 8, 7).is_err());
        assert!(design_rrc(0.5, 8, 0).is_err());
        assert!(design_rrc(1.0, 1, 2).is_ok());
    }

    #[test]
    fn composite_response_is_nyquist() {
        let f = design_rrc(0.5, 8, 8).unwrap();
        let h = f.taps();
        let mut rc = vec![0.0; 2 * h.len() - 1];
        for (i, a) in h.iter().enumerate() {
            for (j, b) in h.iter().enumerate() {
                rc[i + j] += a * b;
            }
        }
        let mid = h.len() - 1;
        for k in 1..=8 {
            for idx in [mid + k * 8, mid - k * 8] {
                assert!(rc[idx].abs() < 1e-3 * rc[mid], "offset {k}: {}", rc[idx]);
            }
        }
    }

    #[test]
    fn composite_bandwidth() {
        // The raised-cosine composite H = |H_rrc|² passes 0.5 (−6 dB in
        // amplitude) at R/2 and vanishes beyond the (1+β)R/2 band edge.
        let f = design_rrc(0.5, 8, 8).unwrap();
        let h = f.taps();
        let composite = |nu: f64| {
            // nu in cycles per symbol; 8 samples per symbol.
            let (mut re, mut im) = (0.0, 0.0);
            for (n, &x) in h.iter().enumerate() {
                let ph = -2.0 * PI * nu * n as f64 / 8.0;
                re += x * ph.cos();
                im += x * ph.sin();
            }
            re * re + im * im
        };
        let dc = composite(0.0);
        let edge = (0..20000)
            .map(|i| i as f64 * 1e-4)
            .find(|&nu| composite(nu) < 0.5 * dc)
            .unwrap();
        assert!((edge - 0.5).abs() < 0.05 * 0.5, "edge {edge}");
        let band_edge = (1.0 + 0.5) / 2.0;
        for i in 0..400 {
            let nu = band_edge * 1.05 + i as f64 * 1e-3;
            assert!(composite(nu) < 1e-2 * dc, "nu {nu}");
        }
    }

    #[test]
    fn shaping_traces_the_impulse_response() {
        let f = design_rrc(0.5, 4, 4).unwrap();
        let seq = shape_symbols(&[Complex64::new(1.0, 0.0)], &f).unwrap();
        let s = seq.samples();
        assert_eq!(s.len(), 4 + 16 + 1);
        assert_eq!(s[0], Complex64::new(0.0, 0.0));
        for (m, &h) in f.taps().iter().enumerate() {
            assert_eq!(s[1 + m], Complex64::new(h, 0.0));
        }
        assert!(s[f.taps().len() + 1..].iter().all(|x| x.norm() == 0.0));
        let zeros = shape_symbols(&[Complex64::new(0.0, 0.0); 5], &f).unwrap();
        assert!(zeros.samples().iter().all(|x| x.norm() == 0.0));
        assert!(shape_symbols(&[], &f).is_err());
    }

    #[test]
    fn held_symbols() {
        let one = Complex64::new(1.0, 0.0);
        let seq = hold_symbols(&[one, -one], 3).unwrap();
        let re: Vec<f64> = seq.samples().iter().map(|x| x.re).collect();
        assert_eq!(re, vec![0.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 0.0]);
        assert!(hold_symbols(&[one], 0).is_err());
        assert!(hold_symbols(&[], 2).is_err());
    }
}
