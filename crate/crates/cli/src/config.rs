//! Experiment configuration.
//!
//! A TOML file with optional sections. Every key has a default, so an empty
//! file (or no file) reproduces the over-the-air setup: 20 ns transition
//! time, 857 kHz clock, 8 samples per symbol, β = 0.5, 6-bit registers.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub hardware: Hardware,
    pub shaping: Shaping,
    pub stream: Stream,
    pub sweep: Sweep,
    pub spectrum: Spectrum,
    pub receiver: ReceiverConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hardware {
    /// Seconds.
    pub t_transition: f64,
    /// Hertz.
    pub clock_rate: f64,
    pub phase_bits: u32,
    pub amp_bits: u32,
}

impl Default for Hardware {
    fn default() -> Self {
        Self {
            t_transition: 20e-9,
            clock_rate: 857e3,
            phase_bits: 6,
            amp_bits: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Shaping {
    pub rolloff: f64,
    pub sps: usize,
    /// Filter length in symbols.
    pub span: usize,
}

impl Default for Shaping {
    fn default() -> Self {
        Self {
            rolloff: 0.5,
            sps: 8,
            span: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stream {
    pub symbols: usize,
    pub seed: u64,
    pub quantized: bool,
}

impl Default for Stream {
    fn default() -> Self {
        Self {
            symbols: 1000,
            seed: 1,
            quantized: true,
        }
    }
}

/// Parameters of the single-pulse and clock-period studies.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub t_transition: f64,
    pub t_symbol: f64,
    /// Clock periods for `rrc-sweep`, seconds.
    pub clock_periods: Vec<f64>,
    /// Expected first-harmonic suppression per clock period, dB.
    pub targets_db: Vec<f64>,
    /// Roll-offs reported when a suppression misses its target.
    pub sensitivity_rolloffs: Vec<f64>,
    /// Multiples of `hardware.clock_rate` for `clock-sweep`.
    pub clock_multipliers: Vec<f64>,
    /// Steps per edge for `stepped-spectrum`.
    pub steps: Vec<usize>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            t_transition: 10e-9,
            t_symbol: 500e-9,
            clock_periods: vec![50e-9, 33e-9, 20e-9, 10e-9],
            targets_db: vec![27.0, 31.0, 36.0, 45.0],
            sensitivity_rolloffs: vec![0.25, 0.5, 1.0],
            clock_multipliers: vec![0.5, 0.75, 1.0, 1.5, 2.0],
            steps: vec![1, 2, 4, 8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Spectrum {
    /// Exported PSD points.
    pub points: usize,
    /// Highest clock harmonic covered by exported PSDs.
    pub max_harmonic: usize,
    /// Band grid spacing for suppression, Hz. Defaults to 1/duration.
    pub resolution_hz: Option<f64>,
    /// `true` measures channel power instead of the in-band peak.
    pub integrated: bool,
}

impl Default for Spectrum {
    fn default() -> Self {
        Self {
            points: 4000,
            max_harmonic: 3,
            resolution_hz: None,
            integrated: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverConfig {
    /// Width of the least-squares normalization; defaults per receiver.
    pub equalizer_taps: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name}: must be a positive number, got {v}");
            }
            Ok(())
        }
        positive("hardware.t_transition", self.hardware.t_transition)?;
        positive("hardware.clock_rate", self.hardware.clock_rate)?;
        positive("sweep.t_transition", self.sweep.t_transition)?;
        positive("sweep.t_symbol", self.sweep.t_symbol)?;
        for (i, &t) in self.sweep.clock_periods.iter().enumerate() {
            positive(&format!("sweep.clock_periods[{i}]"), t)?;
        }
        for (i, &m) in self.sweep.clock_multipliers.iter().enumerate() {
            positive(&format!("sweep.clock_multipliers[{i}]"), m)?;
        }
        if let Some(r) = self.spectrum.resolution_hz {
            positive("spectrum.resolution_hz", r)?;
        }
        if !self.sweep.targets_db.is_empty()
            && self.sweep.targets_db.len() != self.sweep.clock_periods.len()
        {
            bail!(
                "sweep.targets_db: expected {} entries to match sweep.clock_periods, got {}",
                self.sweep.clock_periods.len(),
                self.sweep.targets_db.len()
            );
        }
        if self.stream.symbols == 0 {
            bail!("stream.symbols: must be at least 1");
        }
        if self.shaping.sps == 0 {
            bail!("shaping.sps: must be at least 1");
        }
        if self.spectrum.points < 2 {
            bail!("spectrum.points: must be at least 2");
        }
        if self.spectrum.max_harmonic == 0 {
            bail!("spectrum.max_harmonic: must be at least 1");
        }
        Ok(())
    }
}
