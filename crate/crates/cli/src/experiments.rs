//! Named experiments. Each writes CSV files and a `summary.txt` into the
//! output directory and returns the paths it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tma_core::impaired_dft::{stepped_spectrum, FrequencyGrid};
use tma_core::metrics::{
    harmonic_suppression, psd, BandMeasure, SteppedStream, SuppressionOptions,
};
use tma_core::rxsim::{export_samples, synthesize, ReceivedConstellation, Receiver};
use tma_core::shaping::{design_rrc, hold_symbols, shape_symbols, RrcFilter};
use tma_core::txchain::{build_weight_sequence, map_qpsk, normalize_full_scale, WeightSequence};
use tma_core::waveform::{
    ideal_pulse_waveform, numeric_spectrum_oracle, real_pulse_discrepancy, real_pulse_waveform,
    spectrum_ideal, spectrum_real_closed_form, stepped_trapezoid, AmplitudeSequence,
    HardwareProfile,
};

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Ideal rectangle vs. finite-transition trapezoid spectra.
    PulseCompare,
    /// Single pulse with edges split into clock steps.
    SteppedSpectrum,
    /// First-harmonic suppression of an RRC stream vs. clock period.
    RrcSweep,
    /// Unshaped QPSK through the beamformer chain.
    ExpQpsk,
    /// RRC-shaped QPSK through the beamformer chain.
    ExpRrc,
    /// Suppression at fixed SPS over several clock rates.
    ClockSweep,
}

/// Over-the-air measurements, for comparison only. They include oscillator
/// phase noise and receiver effects the simulator does not model.
const HW_PHASE_ERROR_UNSHAPED_DEG: f64 = 2.11;
const HW_PHASE_ERROR_RRC_DEG: f64 = 2.99;
const HW_SUPPRESSION_DB: f64 = 29.0;

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
    summary: String,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            summary: String::new(),
        })
    }

    fn csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<()> {
        let mut text = String::with_capacity(1 << 16);
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        self.file(name, &text)
    }

    fn file(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn finish(mut self) -> Result<Vec<PathBuf>> {
        let summary = std::mem::take(&mut self.summary);
        self.file("summary.txt", &summary)?;
        Ok(self.written)
    }
}

pub fn run(exp: Experiment, cfg: &Config, out: &Path) -> Result<Vec<PathBuf>> {
    let mut o = Output::new(out)?;
    o.line(format!(
        "experiment: {}",
        exp.to_possible_value().expect("named").get_name()
    ));
    match exp {
        Experiment::PulseCompare => pulse_compare(cfg, &mut o)?,
        Experiment::SteppedSpectrum => stepped_study(cfg, &mut o)?,
        Experiment::RrcSweep => rrc_sweep(cfg, &mut o)?,
        Experiment::ExpQpsk => chain_experiment(cfg, &mut o, false)?,
        Experiment::ExpRrc => chain_experiment(cfg, &mut o, true)?,
        Experiment::ClockSweep => clock_sweep(cfg, &mut o)?,
    }
    o.finish()
}

fn db(x: f64) -> f64 {
    20.0 * x.log10()
}

fn hardware(cfg: &Config) -> Result<HardwareProfile> {
    let h = &cfg.hardware;
    Ok(HardwareProfile::new(
        h.t_transition,
        1.0 / h.clock_rate,
        h.phase_bits,
        h.amp_bits,
    )?)
}

fn qpsk_symbols(cfg: &Config) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.stream.seed);
    let bits: Vec<bool> = (0..2 * cfg.stream.symbols).map(|_| rng.gen()).collect();
    Ok(map_qpsk(&bits)?)
}

fn rrc(cfg: &Config, rolloff: f64, sps: usize) -> Result<RrcFilter> {
    Ok(design_rrc(rolloff, sps, cfg.shaping.span)?)
}

fn shaped(symbols: &[Complex64], filt: &RrcFilter) -> Result<AmplitudeSequence> {
    Ok(normalize_full_scale(&shape_symbols(symbols, filt)?)?.0)
}

fn weights(cfg: &Config, seq: &AmplitudeSequence, hw: &HardwareProfile) -> Result<WeightSequence> {
    Ok(build_weight_sequence(seq, hw, cfg.stream.quantized)?)
}

fn suppression(
    cfg: &Config,
    seq: &AmplitudeSequence,
    hw: &HardwareProfile,
    rate: f64,
    rolloff: f64,
) -> Result<f64> {
    let opts = SuppressionOptions {
        rolloff,
        resolution_hz: cfg.spectrum.resolution_hz,
        measure: if cfg.spectrum.integrated {
            BandMeasure::Integrated
        } else {
            BandMeasure::Peak
        },
    };
    Ok(harmonic_suppression(
        &SteppedStream { seq, hw },
        rate,
        hw.t_clock,
        1,
        &opts,
    )?)
}

fn stream_header(cfg: &Config, o: &mut Output) {
    o.line(format!("symbols: {}", cfg.stream.symbols));
    o.line(format!("seed: {}", cfg.stream.seed));
    o.line(format!(
        "weights: {}",
        if cfg.stream.quantized {
            format!(
                "quantized ({} phase bits, {} amplitude bits)",
                cfg.hardware.phase_bits, cfg.hardware.amp_bits
            )
        } else {
            "exact".to_string()
        }
    ));
}

fn psd_csv(
    cfg: &Config,
    o: &mut Output,
    name: &str,
    seq: &AmplitudeSequence,
    hw: &HardwareProfile,
) -> Result<()> {
    let top = (cfg.spectrum.max_harmonic as f64 + 0.5) / hw.t_clock;
    let n = cfg.spectrum.points;
    let grid = FrequencyGrid::uniform(0.0, top / (n - 1) as f64, n)?;
    let p = psd(&SteppedStream { seq, hw }, &grid)?;
    o.csv(
        name,
        "f_hz,psd_db",
        grid.freqs()
            .iter()
            .zip(&p)
            .map(|(f, d)| format!("{f},{d:.6}")),
    )
}

fn pulse_compare(cfg: &Config, o: &mut Output) -> Result<()> {
    let (ts, tt) = (cfg.sweep.t_symbol, cfg.sweep.t_transition);
    let n = cfg.spectrum.points;
    let grid = FrequencyGrid::uniform(0.0, 20.0 / ts / (n - 1) as f64, n)?;
    let trapezoid = real_pulse_waveform(1.0, ts, tt)?;
    let reference = ts;
    let mut rows = Vec::with_capacity(n);
    for &f in grid.freqs() {
        let ideal = spectrum_ideal(f, 1.0, ts)?.norm();
        let exact = numeric_spectrum_oracle(&trapezoid, f).norm();
        let closed = spectrum_real_closed_form(f, 1.0, ts, tt)?.norm();
        rows.push(format!(
            "{f},{:.6},{:.6},{:.6}",
            db(ideal / reference),
            db(exact / reference),
            db(closed / reference)
        ));
    }
    o.csv(
        "pulse_spectra.csv",
        "f_hz,ideal_db,trapezoid_db,closed_form_db",
        rows,
    )?;

    let rect = ideal_pulse_waveform(1.0, ts, ts * 1e-9)?;
    let dt = ts / 200.0;
    let samples: Vec<String> = (-20..=220)
        .map(|i| {
            let t = i as f64 * dt;
            format!("{t},{},{}", rect.eval(t).re, trapezoid.eval(t).re)
        })
        .collect();
    o.csv("pulse_waveforms.csv", "t_s,ideal,trapezoid", samples)?;

    let d = real_pulse_discrepancy(1.0, ts, tt, &grid.freqs()[1..])?;
    o.line(format!("t_symbol_s: {ts}"));
    o.line(format!("t_transition_s: {tt}"));
    o.line(format!("trapezoid_dc: {:.6e} (A(T_s - T_t))", d.exact_dc));
    o.line(format!(
        "closed_form_dc: {:.6e} (-A(T_s + T_t))",
        d.closed_form_dc
    ));
    o.line(format!(
        "closed_form_max_rel_error: {:.4e}",
        d.closed_form_max_rel_error
    ));
    o.line(format!(
        "convolution_form_max_rel_error: {:.4e}",
        d.convolution_form_max_rel_error
    ));
    Ok(())
}

fn stepped_study(cfg: &Config, o: &mut Output) -> Result<()> {
    let (ts, tt) = (cfg.sweep.t_symbol, cfg.sweep.t_transition);
    let n = cfg.spectrum.points;
    let grid = FrequencyGrid::uniform(0.0, 10.0 / ts / (n - 1) as f64, n)?;
    let mut columns = Vec::new();
    let mut probes = Vec::new();
    for &steps in &cfg.sweep.steps {
        let (seq, hw) = stepped_trapezoid(steps, 1.0, ts, tt)?;
        columns.push(stepped_spectrum(&seq, &hw, grid.freqs()));
        probes.push((
            steps,
            hw.t_clock,
            stepped_spectrum(&seq, &hw, &[3.0 / ts])[0].norm(),
        ));
    }
    let header = std::iter::once("f_hz".to_string())
        .chain(cfg.sweep.steps.iter().map(|s| format!("steps_{s}_db")))
        .collect::<Vec<_>>()
        .join(",");
    let rows = grid.freqs().iter().enumerate().map(|(i, f)| {
        let mut r = format!("{f}");
        for c in &columns {
            let _ = write!(r, ",{:.6}", db(c[i].norm() / ts));
        }
        r
    });
    o.csv("stepped_spectra.csv", &header, rows)?;
    o.line(format!("t_symbol_s: {ts}"));
    o.line(format!("t_transition_s: {tt}"));
    for (steps, tc, m) in &probes {
        o.line(format!(
            "steps {steps}: t_clock {:.3} ns, |X(3/T_s)| {m:.6e} ({:.2} dB re A*T_s)",
            tc * 1e9,
            db(m / ts)
        ));
    }
    let monotone = probes.windows(2).all(|w| w[1].2 < w[0].2);
    o.line(format!(
        "sideband at 3/T_s decreases with steps: {}",
        if monotone { "yes" } else { "no" }
    ));
    Ok(())
}

fn rrc_sweep(cfg: &Config, o: &mut Output) -> Result<()> {
    let (ts, tt) = (cfg.sweep.t_symbol, cfg.sweep.t_transition);
    let symbols = qpsk_symbols(cfg)?;
    let rate = 1.0 / ts;
    let measure = |tc_nominal: f64,
                   rolloff: f64|
     -> Result<(f64, usize, AmplitudeSequence, HardwareProfile)> {
        // The clock has to divide the symbol period.
        let sps = ((ts / tc_nominal).round() as usize).max(1);
        let hw = HardwareProfile::new(
            tt,
            ts / sps as f64,
            cfg.hardware.phase_bits,
            cfg.hardware.amp_bits,
        )?;
        let seq = weights(cfg, &shaped(&symbols, &rrc(cfg, rolloff, sps)?)?, &hw)?.amplitudes();
        let s = suppression(cfg, &seq, &hw, rate, rolloff)?;
        Ok((s, sps, seq, hw))
    };
    stream_header(cfg, o);
    o.line(format!("t_symbol_s: {ts}"));
    o.line(format!("t_transition_s: {tt}"));
    o.line(format!("rolloff: {}", cfg.shaping.rolloff));
    let mut rows = Vec::new();
    let mut missed = false;
    for (i, &tc) in cfg.sweep.clock_periods.iter().enumerate() {
        let (s, sps, seq, hw) = measure(tc, cfg.shaping.rolloff)?;
        let target = cfg.sweep.targets_db.get(i).copied();
        let mut line = format!(
            "t_clock {:.3} ns (sps {sps}): suppression {s:.2} dB",
            hw.t_clock * 1e9
        );
        if let Some(t) = target {
            let _ = write!(line, " (target {t} dB, deviation {:+.2} dB)", s - t);
            missed |= (s - t).abs() > 3.0;
        }
        o.line(line);
        rows.push(format!(
            "{},{sps},{s:.4},{}",
            hw.t_clock,
            target.map(|t| t.to_string()).unwrap_or_default()
        ));
        psd_csv(cfg, o, &format!("rrc_sweep_psd_{i}.csv"), &seq, &hw)?;
    }
    o.csv(
        "rrc_sweep.csv",
        "t_clock_s,sps,suppression_db,target_db",
        rows,
    )?;
    if missed {
        o.line("deviation beyond 3 dB; roll-off sensitivity (dB per clock period):");
        for &b in &cfg.sweep.sensitivity_rolloffs {
            let vals = cfg
                .sweep
                .clock_periods
                .iter()
                .map(|&tc| measure(tc, b).map(|m| format!("{:.2}", m.0)))
                .collect::<Result<Vec<_>>>()?;
            o.line(format!("  beta {b}: {}", vals.join(" / ")));
        }
    }
    Ok(())
}

fn constellation_csv(o: &mut Output, rx: &ReceivedConstellation) -> Result<()> {
    o.csv(
        "constellation.csv",
        "re,im,ref_re,ref_im",
        rx.symbols
            .iter()
            .zip(&rx.reference)
            .map(|(s, r)| format!("{:.9},{:.9},{},{}", s.re, s.im, r.re, r.im)),
    )
}

fn chain_experiment(cfg: &Config, o: &mut Output, shaped_stream: bool) -> Result<()> {
    let hw = hardware(cfg)?;
    let sps = cfg.shaping.sps;
    let symbols = qpsk_symbols(cfg)?;
    let (seq, receiver) = if shaped_stream {
        let filt = rrc(cfg, cfg.shaping.rolloff, sps)?;
        (
            shaped(&symbols, &filt)?,
            Receiver::matched(filt, hw.t_clock),
        )
    } else {
        (
            hold_symbols(&symbols, sps)?,
            Receiver::unshaped(hw.t_clock, sps),
        )
    };
    let receiver = match cfg.receiver.equalizer_taps {
        Some(k) => receiver.with_equalizer_taps(k),
        None => receiver,
    };
    let ws = weights(cfg, &seq, &hw)?;
    let w = synthesize(&ws);
    let rx = receiver.receive(&w, &symbols)?;
    let applied = ws.amplitudes();
    let rate = 1.0 / (sps as f64 * hw.t_clock);
    let s = suppression(cfg, &applied, &hw, rate, cfg.shaping.rolloff)?;

    if let Some(regs) = ws.registers() {
        o.csv(
            "weights.csv",
            "index,phase_code,amp_code",
            regs.iter()
                .enumerate()
                .map(|(i, r)| format!("{i},{},{}", r.phase_code, r.amp_code)),
        )?;
    } else {
        o.csv(
            "weights.csv",
            "index,re,im",
            applied
                .samples()
                .iter()
                .enumerate()
                .map(|(i, a)| format!("{i},{},{}", a.re, a.im)),
        )?;
    }
    let head = w.start_time() + (32 * sps) as f64 * hw.t_clock;
    o.csv(
        "waveform.csv",
        "t_s,i,q",
        export_samples(&w, hw.t_clock, 8)?
            .into_iter()
            .take_while(|(t, _)| *t <= head)
            .map(|(t, v)| format!("{t},{:.9},{:.9}", v.re, v.im)),
    )?;
    constellation_csv(o, &rx)?;
    psd_csv(cfg, o, "psd.csv", &applied, &hw)?;

    stream_header(cfg, o);
    o.line(format!("t_transition_s: {}", hw.t_transition));
    o.line(format!("clock_hz: {}", cfg.hardware.clock_rate));
    o.line(format!("sps: {sps}"));
    if shaped_stream {
        o.line(format!("rolloff: {}", cfg.shaping.rolloff));
    }
    o.line(format!("equalizer_taps: {}", receiver.equalizer_taps()));
    o.line(format!(
        "phase_error_rms_deg: {:.4}",
        rx.phase_error_rms_deg
    ));
    o.line(format!("evm_rms_pct: {:.4}", rx.evm_rms_pct));
    let hw_ref = if shaped_stream {
        HW_PHASE_ERROR_RRC_DEG
    } else {
        HW_PHASE_ERROR_UNSHAPED_DEG
    };
    o.line(format!(
        "hardware phase error for comparison: {hw_ref} deg (includes oscillator phase noise, not simulated)"
    ));
    let mut line = format!("first_harmonic_suppression_db: {s:.2}");
    if shaped_stream {
        let _ = write!(line, " (target {HW_SUPPRESSION_DB} dB)");
    }
    o.line(line);
    Ok(())
}

fn clock_sweep(cfg: &Config, o: &mut Output) -> Result<()> {
    let base = hardware(cfg)?;
    let sps = cfg.shaping.sps;
    let symbols = qpsk_symbols(cfg)?;
    let filt = rrc(cfg, cfg.shaping.rolloff, sps)?;
    let seq = shaped(&symbols, &filt)?;
    stream_header(cfg, o);
    o.line(format!("sps: {sps}"));
    o.line(format!("rolloff: {}", cfg.shaping.rolloff));
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &m in &cfg.sweep.clock_multipliers {
        let clock = m * cfg.hardware.clock_rate;
        let hw = base.with_clock(1.0 / clock)?;
        let applied = weights(cfg, &seq, &hw)?.amplitudes();
        let s = suppression(cfg, &applied, &hw, clock / sps as f64, cfg.shaping.rolloff)?;
        o.line(format!(
            "clock {clock:.0} Hz: suppression {s:.2} dB (target {HW_SUPPRESSION_DB} dB)"
        ));
        rows.push(format!("{clock},{s:.4}"));
        values.push(s);
    }
    o.csv("clock_sweep.csv", "clock_hz,suppression_db", rows)?;
    if !values.is_empty() {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        o.line(format!("spread_db: {:.3}", hi - lo));
    }
    Ok(())
}
