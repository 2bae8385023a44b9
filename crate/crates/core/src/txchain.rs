//! Bits to beamformer register commands.
//!
//! Each complex sample becomes a phase-shifter code and an attenuator code.
//! Phase codes index `2^phase_bits` uniform steps over `[0°, 360°)` and
//! amplitude codes index `2^amp_bits` uniform levels over `[0, 1]` of full
//! scale (linear attenuator law).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::waveform::{AmplitudeSequence, HardwareProfile};

/// Slack allowed above full scale for samples that were normalized to 1.
const FULL_SCALE_SLACK: f64 = 1e-12;

/// Gray-coded QPSK: bit pair `(b0, b1)` maps to `((1−2b0) + j(1−2b1))/√2`.
pub fn map_qpsk(bits: &[bool]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return domain(format!(
            "QPSK needs an even number of bits, got {}",
            bits.len()
        ));
    }
    let level = |b: bool| if b { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Ok(bits
        .chunks_exact(2)
        .map(|p| Complex64::new(level(p[0]), level(p[1])))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterCommand {
    pub phase_code: u32,
    pub amp_code: u32,
}

fn phase_step(hw: &HardwareProfile) -> f64 {
    2.0 * PI / (1u64 << hw.phase_bits) as f64
}

fn amp_levels(hw: &HardwareProfile) -> f64 {
    ((1u64 << hw.amp_bits) - 1) as f64
}

pub fn quantize(sample: Complex64, hw: &HardwareProfile) -> Result<RegisterCommand> {
    let mag = sample.norm();
    if !mag.is_finite() || mag > 1.0 + FULL_SCALE_SLACK {
        return domain(format!(
            "sample magnitude {mag} exceeds full scale; normalize or clip first"
        ));
    }
    let phase_states = 1u64 << hw.phase_bits;
    let phase = sample.arg().rem_euclid(2.0 * PI);
    let phase_code = ((phase / phase_step(hw) + 0.5).floor() as u64 % phase_states) as u32;
    let amp_code = ((mag.min(1.0) * amp_levels(hw) + 0.5).floor()) as u32;
    Ok(RegisterCommand {
        phase_code,
        amp_code,
    })
}

pub fn dequantize(cmd: RegisterCommand, hw: &HardwareProfile) -> Complex64 {
    let amp = cmd.amp_code as f64 / amp_levels(hw);
    Complex64::from_polar(amp, cmd.phase_code as f64 * phase_step(hw))
}

/// One clock period's weight: a register word, or the exact value when the
/// chain is run with infinite resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightCommand {
    Register(RegisterCommand),
    Exact(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    commands: Vec<WeightCommand>,
    hw: HardwareProfile,
}

impl WeightSequence {
    pub fn commands(&self) -> &[WeightCommand] {
        &self.commands
    }

    pub fn hardware(&self) -> &HardwareProfile {
        &self.hw
    }

    pub fn is_quantized(&self) -> bool {
        matches!(self.commands.first(), Some(WeightCommand::Register(_)))
    }

    /// The amplitudes the beamformer actually applies.
    pub fn amplitudes(&self) -> AmplitudeSequence {
        let samples = self
            .commands
            .iter()
            .map(|c| match *c {
                WeightCommand::Register(r) => dequantize(r, &self.hw),
                WeightCommand::Exact(v) => v,
            })
            .collect();
        AmplitudeSequence::new(samples).expect("weight sequences hold at least two finite samples")
    }

    /// Register words in program order.
    pub fn registers(&self) -> Option<Vec<RegisterCommand>> {
        self.commands
            .iter()
            .map(|c| match c {
                WeightCommand::Register(r) => Some(*r),
                WeightCommand::Exact(_) => None,
            })
            .collect()
    }
}

pub fn build_weight_sequence(
    samples: &AmplitudeSequence,
    hw: &HardwareProfile,
    quantized: bool,
) -> Result<WeightSequence> {
    let commands = samples
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if quantized {
                quantize(s, hw).map(WeightCommand::Register)
            } else if s.norm() > 1.0 + FULL_SCALE_SLACK {
                domain(format!(
                    "sample {i} magnitude {} exceeds full scale",
                    s.norm()
                ))
            } else {
                Ok(WeightCommand::Exact(s))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightSequence { commands, hw: *hw })
}

/// Scales `seq` so its largest magnitude is exactly full scale. Returns the
/// scaled sequence and the applied factor.
pub fn normalize_full_scale(seq: &AmplitudeSequence) -> Result<(AmplitudeSequence, f64)> {
    let peak = seq.peak_magnitude();
    if peak == 0.0 {
        return Err(Error::Degenerate(
            "cannot normalize an all-zero sequence".into(),
        ));
    }
    let factor = 1.0 / peak;
    Ok((seq.scaled(Complex64::new(factor, 0.0)), factor))
}
