//! Transmit beamforming and the composite transmitted signal.
//!
//! The beamforming weight of element `m` carries that element's own carrier
//! `f_c + (m-1)Δf`, so the array phases up exactly at the steered direction
//! for every element frequency. Under the narrow-band assumption the
//! displacement delays `τ_m` enter only as phases, never as envelope shifts.

use crate::numerics::phasor;
use crate::scene::{delays, PointEmitter, Scenario};
use crate::waveform::{ComplexSignal, WaveformBank};
use crate::{C64, Error, Result};

/// Unit-modulus transmit beamforming weights and the direction they steer to.
#[derive(Debug, Clone)]
pub struct BeamformWeights {
    pub weights: Vec<C64>,
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
}

/// Beamforming weights toward `(φ, θ)`:
/// `v_m = exp{-j2π[f_c+(m-1)Δf](m-1)(d/c)cosφcosθ}`.
pub fn tx_weights(sc: &Scenario, azimuth_rad: f64, elevation_rad: f64) -> BeamformWeights {
    let unit_delay = sc.spacing_m / crate::SPEED_OF_LIGHT * azimuth_rad.cos() * elevation_rad.cos();
    let weights = (0..sc.num_tx)
        .map(|m| {
            let freq = sc.carrier_hz + m as f64 * sc.freq_offset_hz;
            phasor(-freq * m as f64 * unit_delay)
        })
        .collect();
    BeamformWeights { weights, azimuth_rad, elevation_rad }
}

/// Composite transmit signal as seen from the direction of `e`, at complex
/// baseband:
/// `s(t) = Σ_m v_m* u_m(t) · exp{-j2π[f_c+(m-1)Δf] τ_m(e)}`.
///
/// When the weights are steered at `e` the per-element phases cancel and the
/// elements add coherently.
pub fn transmit_signal(
    sc: &Scenario,
    bank: &WaveformBank,
    w: &BeamformWeights,
    e: &PointEmitter,
) -> Result<ComplexSignal> {
    if bank.num_elements() != w.weights.len() {
        return Err(Error::DimensionMismatch {
            context: format!("bank has {} elements, weights {}", bank.num_elements(), w.weights.len()),
        });
    }
    let tone_amplitudes = element_phases_toward(sc, w, e);
    let base = &bank.elements[0];
    let mut samples = vec![C64::default(); base.len()];
    for (m, elem) in bank.elements.iter().enumerate() {
        let a = tone_amplitudes[m];
        for (acc, z) in samples.iter_mut().zip(&elem.samples) {
            *acc += a * z;
        }
    }
    Ok(ComplexSignal { samples, sample_rate_hz: base.sample_rate_hz, t0_s: base.t0_s })
}

/// Per-element complex amplitude at the emitter direction:
/// `v_m* · exp{-j2π[f_c+(m-1)Δf] τ_m(e)}`. All ones when the weights are
/// steered exactly at `e`.
pub fn element_phases_toward(sc: &Scenario, w: &BeamformWeights, e: &PointEmitter) -> Vec<C64> {
    let d = delays(sc, e);
    (0..sc.num_tx)
        .map(|m| {
            let freq = sc.carrier_hz + m as f64 * sc.freq_offset_hz;
            w.weights[m].conj() * phasor(-freq * d.tx_s[m])
        })
        .collect()
}
