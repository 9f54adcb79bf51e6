//! Steering vectors and ideal (closed-form) snapshots for the four
//! architectures.
//!
//! Flat-index convention, fixed project-wide: the space-time-range vector
//! stacks range ⊗ receive ⊗ Doppler, so `(m, n, k)` maps to
//! `(m·N + n)·K + k`. Every covariance and every receiver output uses this
//! same layout.

use crate::numerics::{kron3, phasor};
use crate::scene::{self, PointEmitter, Scenario};
use crate::C64;

/// Radar architecture selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Phased array: common waveform, coherent transmit, NK-dimensional snapshots.
    Pa,
    /// Orthogonal-waveform MIMO: FDA-MIMO signal model with the range
    /// steering forced to all-ones (its `Δf`-free limit).
    Mimo,
    /// FDA-MIMO: offset at least the bandwidth, separable waveforms.
    FdaMimo,
    /// Coherent FDA: offset well below the bandwidth, MFM+MMF receiver.
    Cfda,
}

impl Architecture {
    /// Snapshot dimension for this architecture.
    pub fn dim(&self, sc: &Scenario) -> usize {
        match self {
            Architecture::Pa => sc.num_rx * sc.num_pulses,
            _ => sc.mnk(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Pa => "pa",
            Architecture::Mimo => "mimo",
            Architecture::FdaMimo => "fda-mimo",
            Architecture::Cfda => "c-fda",
        }
    }
}

/// Space-time(-range) sample vector for one fast-time bin.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub data: Vec<C64>,
    pub architecture: Architecture,
    /// Fast-time bin the sample was taken from, when it came from the
    /// time-domain chain.
    pub fast_time_bin: Option<usize>,
}

/// Flat index of `(m, n, k)` in the range ⊗ receive ⊗ Doppler layout.
pub fn flat_index(m: usize, n: usize, k: usize, num_rx: usize, num_pulses: usize) -> usize {
    (m * num_rx + n) * num_pulses + k
}

/// Inverse of [`flat_index`].
pub fn unflatten(idx: usize, num_rx: usize, num_pulses: usize) -> (usize, usize, usize) {
    let k = idx % num_pulses;
    let rest = idx / num_pulses;
    (rest / num_rx, rest % num_rx, k)
}

fn unit_progression(len: usize, freq: f64) -> Vec<C64> {
    (0..len).map(|i| phasor(i as f64 * freq)).collect()
}

/// Transmit spatial steering `a_t(φ, θ)`: element `m = e^{j2π(m-1)f_φ}`.
pub fn tx_steering(sc: &Scenario, azimuth_rad: f64, elevation_rad: f64) -> Vec<C64> {
    unit_progression(sc.num_tx, scene::spatial_frequency(sc, azimuth_rad, elevation_rad))
}

/// Receive spatial steering `a_φ(φ, θ)`: same progression with `N` elements.
pub fn rx_steering(sc: &Scenario, azimuth_rad: f64, elevation_rad: f64) -> Vec<C64> {
    unit_progression(sc.num_rx, scene::spatial_frequency(sc, azimuth_rad, elevation_rad))
}

/// Doppler steering `a_D(f_D)` over `K` pulses.
pub fn doppler_steering(sc: &Scenario, doppler_freq: f64) -> Vec<C64> {
    unit_progression(sc.num_pulses, doppler_freq)
}

/// Range steering `a_R(R)`: element `m = e^{j2π(m-1)f_R}` with
/// `f_R = -2RΔf/c`.
pub fn range_steering(sc: &Scenario, range_m: f64) -> Vec<C64> {
    unit_progression(sc.num_tx, scene::range_frequency(sc, range_m))
}

/// Steering-vector factory bound to one scenario and architecture.
///
/// `amplitude_coeff` is the coherent-processing amplitude `E` of the C-FDA
/// receive chain (see `rxchain::amplitude_coefficient`); it scales only the
/// C-FDA snapshot and is ignored by the other architectures.
#[derive(Debug, Clone, Copy)]
pub struct SteeringModel<'a> {
    pub scenario: &'a Scenario,
    pub architecture: Architecture,
    pub amplitude_coeff: f64,
}

impl<'a> SteeringModel<'a> {
    pub fn new(scenario: &'a Scenario, architecture: Architecture) -> Self {
        Self { scenario, architecture, amplitude_coeff: 1.0 }
    }

    pub fn with_amplitude(mut self, e: f64) -> Self {
        self.amplitude_coeff = e;
        self
    }

    pub fn dim(&self) -> usize {
        self.architecture.dim(self.scenario)
    }

    /// Unit-amplitude steering vector toward `(φ, θ, R, f_D)` in the
    /// architecture's layout (no scattering amplitude, no gain factors).
    pub fn steering(&self, azimuth_rad: f64, elevation_rad: f64, range_m: f64, doppler: f64) -> Vec<C64> {
        let sc = self.scenario;
        let a_rx = rx_steering(sc, azimuth_rad, elevation_rad);
        let a_dop = doppler_steering(sc, doppler);
        match self.architecture {
            Architecture::Pa => crate::numerics::kron(&a_rx, &a_dop),
            Architecture::Mimo => {
                let a_tx = tx_steering(sc, azimuth_rad, elevation_rad);
                kron3(&a_tx, &a_rx, &a_dop)
            }
            Architecture::FdaMimo => {
                let a_tx = tx_steering(sc, azimuth_rad, elevation_rad);
                let a_rng = range_steering(sc, range_m);
                let tx_rng: Vec<C64> = a_tx.iter().zip(&a_rng).map(|(a, b)| a * b).collect();
                kron3(&tx_rng, &a_rx, &a_dop)
            }
            Architecture::Cfda => {
                let a_rng = range_steering(sc, range_m);
                kron3(&a_rng, &a_rx, &a_dop)
            }
        }
    }

    /// Closed-form snapshot of a point emitter with scattering amplitude
    /// `xi`:
    /// - PA: `√M·ξ·(a_r ⊗ a_D)`
    /// - MIMO: `ξ·(a_t ⊗ a_r ⊗ a_D)`
    /// - FDA-MIMO: `ξ·([a_t ⊙ a_R] ⊗ a_r ⊗ a_D)`
    /// - C-FDA: `E·ξ·(a_R ⊗ a_φ ⊗ a_D)`
    pub fn ideal_snapshot(&self, e: &PointEmitter, xi: C64) -> Snapshot {
        let fd = scene::doppler_frequency(self.scenario, e);
        let mut data = self.steering(e.azimuth_rad, e.elevation_rad, e.range_m, fd);
        let scale = match self.architecture {
            Architecture::Pa => (self.scenario.num_tx as f64).sqrt(),
            Architecture::Mimo | Architecture::FdaMimo => 1.0,
            Architecture::Cfda => self.amplitude_coeff,
        };
        for z in &mut data {
            *z *= xi * scale;
        }
        Snapshot { data, architecture: self.architecture, fast_time_bin: None }
    }
}
