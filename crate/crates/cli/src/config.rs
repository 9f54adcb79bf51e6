//! Scenario configuration file: flat JSON with SI units, degrees at the
//! boundary. Unknown or missing fields fail with a diagnostic naming the
//! field.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cfda_core::scene::{EmitterKind, PointEmitter, Scenario};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub azimuth_deg: f64,
    pub range_m: f64,
    pub velocity_mps: f64,
    /// Mean scattering power σ_t² (linear).
    pub power: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerConfig {
    /// Towed-jammer range (m); azimuth and Doppler follow the target.
    pub range_m: f64,
    pub inr_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutterConfig {
    /// Patches per equidistant ring.
    pub num_patches: usize,
    /// Number of ambiguous rings beyond the cell under test.
    pub num_ambiguities: usize,
    pub cnr_db: f64,
    /// Patch azimuths span ±sector/2 around boresight.
    pub sector_deg: f64,
    /// Ring power decay exponent (power ∝ R^-exp).
    pub ring_decay_exp: f64,
}

impl Default for ClutterConfig {
    fn default() -> Self {
        Self {
            num_patches: 60,
            num_ambiguities: 3,
            cnr_db: 40.0,
            sector_deg: 360.0,
            ring_decay_exp: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub carrier_frequency_hz: f64,
    pub frequency_offset_hz: f64,
    pub bandwidth_hz: f64,
    pub pulse_width_s: f64,
    pub pri_s: f64,
    pub element_spacing_m: f64,
    pub num_tx: usize,
    pub num_rx: usize,
    pub num_pulses: usize,
    pub platform_height_m: f64,
    pub platform_velocity_mps: f64,
    pub yaw_deg: f64,
    pub sample_rate_hz: f64,
    pub noise_power: f64,
    pub rng_seed: u64,
    pub target: TargetConfig,
    #[serde(default)]
    pub jammer: Option<JammerConfig>,
    #[serde(default)]
    pub clutter: Option<ClutterConfig>,
}

impl Config {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("malformed scenario file {}", path.display()))?;
        Ok(cfg)
    }

    /// Core scenario with the configured offset, optionally rescaled to the
    /// full table values (M = N = K = 8, f_s = 100 MHz).
    pub fn scenario(&self, fig_scale: bool) -> anyhow::Result<Scenario> {
        let sc = Scenario {
            carrier_hz: self.carrier_frequency_hz,
            freq_offset_hz: self.frequency_offset_hz,
            bandwidth_hz: self.bandwidth_hz,
            pulse_width_s: self.pulse_width_s,
            pri_s: self.pri_s,
            spacing_m: self.element_spacing_m,
            num_tx: if fig_scale { 8 } else { self.num_tx },
            num_rx: if fig_scale { 8 } else { self.num_rx },
            num_pulses: if fig_scale { 8 } else { self.num_pulses },
            height_m: self.platform_height_m,
            velocity_mps: self.platform_velocity_mps,
            yaw_rad: self.yaw_deg.to_radians(),
            sample_rate_hz: if fig_scale { 100.0e6 } else { self.sample_rate_hz },
            noise_power: self.noise_power,
            rng_seed: self.rng_seed,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Target as a point emitter; fails before any computation when the
    /// geometry is infeasible (range below the platform).
    pub fn target(&self, sc: &Scenario) -> anyhow::Result<PointEmitter> {
        if self.target.power < 0.0 {
            bail!("invalid scenario: target.power: must be non-negative");
        }
        Ok(PointEmitter::on_ground(
            sc,
            EmitterKind::Target,
            self.target.azimuth_deg.to_radians(),
            self.target.range_m,
            self.target.velocity_mps,
            self.target.power,
        )?)
    }

    pub fn jammer_power(&self, sc: &Scenario) -> anyhow::Result<(f64, f64)> {
        let j = self
            .jammer
            .as_ref()
            .context("this experiment needs a `jammer` section in the scenario file")?;
        Ok((j.range_m, sc.noise_power * 10f64.powf(j.inr_db / 10.0)))
    }
}
