//! Physical scenario parameters and the geometric/frequency derivations the
//! rest of the chain is built on: propagation and array displacement delays,
//! spatial frequency, normalized Doppler, and the offset-induced range
//! frequency.
//!
//! All angles are radians internally; degrees exist only at the config
//! boundary. Wavelength is computed from the common carrier alone — the
//! per-element offsets are orders of magnitude below the carrier and are
//! neglected in spatial phase terms (narrow-band assumption).

use crate::{Error, Result, SPEED_OF_LIGHT};

/// Full radar / platform / sampling parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Carrier frequency `f_c` (Hz).
    pub carrier_hz: f64,
    /// Per-element frequency offset `Δf` (Hz). Zero for PA/MIMO, ≥ B for
    /// FDA-MIMO, small relative to B for C-FDA.
    pub freq_offset_hz: f64,
    /// Baseband bandwidth `B` (Hz).
    pub bandwidth_hz: f64,
    /// Pulse width `T_p` (s).
    pub pulse_width_s: f64,
    /// Pulse repetition interval `T` (s).
    pub pri_s: f64,
    /// Element spacing `d` (m), shared by transmit and receive arrays.
    pub spacing_m: f64,
    /// Number of transmit elements `M`.
    pub num_tx: usize,
    /// Number of receive elements `N`.
    pub num_rx: usize,
    /// Number of coherent pulses `K`.
    pub num_pulses: usize,
    /// Platform height `H` (m).
    pub height_m: f64,
    /// Platform velocity `v_a` (m/s).
    pub velocity_mps: f64,
    /// Yaw angle `ψ` (rad): angle between flight direction and array axis.
    pub yaw_rad: f64,
    /// Sample rate `f_s` (Hz).
    pub sample_rate_hz: f64,
    /// Noise power `σ_n²` per sample (linear).
    pub noise_power: f64,
    /// Seed for every stochastic component touching this scenario.
    pub rng_seed: u64,
}

impl Scenario {
    /// Checks the structural invariants. Every consumer may assume a
    /// validated scenario.
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidScenario { field, reason: format!("must be positive, got {v}") })
            }
        }
        positive("carrier_hz", self.carrier_hz)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("pulse_width_s", self.pulse_width_s)?;
        positive("spacing_m", self.spacing_m)?;
        positive("height_m", self.height_m)?;
        positive("noise_power", self.noise_power)?;
        if self.freq_offset_hz < 0.0 {
            return Err(Error::InvalidScenario {
                field: "freq_offset_hz",
                reason: format!("must be non-negative, got {}", self.freq_offset_hz),
            });
        }
        if self.pri_s < self.pulse_width_s {
            return Err(Error::InvalidScenario {
                field: "pri_s",
                reason: format!("PRI {} s shorter than pulse width {} s", self.pri_s, self.pulse_width_s),
            });
        }
        if self.num_tx == 0 || self.num_rx == 0 || self.num_pulses == 0 {
            return Err(Error::InvalidScenario {
                field: "num_tx/num_rx/num_pulses",
                reason: "element and pulse counts must be at least 1".into(),
            });
        }
        if self.sample_rate_hz < 2.0 * self.bandwidth_hz {
            return Err(Error::Undersampled {
                sample_rate_hz: self.sample_rate_hz,
                nyquist_hz: 2.0 * self.bandwidth_hz,
            });
        }
        Ok(())
    }

    /// Carrier wavelength `λ = c / f_c`.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Samples per pulse `N_s = round(f_s · T_p)`.
    pub fn samples_per_pulse(&self) -> usize {
        (self.sample_rate_hz * self.pulse_width_s).round() as usize
    }

    /// Unambiguous range `R_u = c·T/2`.
    pub fn unambiguous_range(&self) -> f64 {
        SPEED_OF_LIGHT * self.pri_s / 2.0
    }

    /// Fast-time range bin width `c/(2 f_s)`.
    pub fn range_bin(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.sample_rate_hz)
    }

    /// Space-time-range snapshot dimension `M·N·K`.
    pub fn mnk(&self) -> usize {
        self.num_tx * self.num_rx * self.num_pulses
    }
}

/// What a point emitter models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitterKind {
    Target,
    Jammer,
    ClutterPatch,
}

/// Far-field point emitter: target, towed jammer, or clutter patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEmitter {
    /// Azimuth `φ` (rad).
    pub azimuth_rad: f64,
    /// Elevation `θ` (rad), consistent with `range` when built through
    /// [`PointEmitter::on_ground`].
    pub elevation_rad: f64,
    /// Slant range `R` (m).
    pub range_m: f64,
    /// Radial velocity `v` (m/s); zero for jammers and clutter patches.
    pub velocity_mps: f64,
    /// Mean power `σ² = E{|ξ|²}` (linear).
    pub power: f64,
    pub kind: EmitterKind,
}

impl PointEmitter {
    /// Emitter whose elevation follows from its slant range and the platform
    /// height (`θ = arcsin(H/R)`).
    pub fn on_ground(
        sc: &Scenario,
        kind: EmitterKind,
        azimuth_rad: f64,
        range_m: f64,
        velocity_mps: f64,
        power: f64,
    ) -> Result<Self> {
        Ok(Self {
            azimuth_rad,
            elevation_rad: elevation_from_range(sc, range_m)?,
            range_m,
            velocity_mps,
            power,
            kind,
        })
    }
}

/// The four delay families of one transmit→target→receive path: two-way
/// propagation, transmit and receive array displacement, and the
/// pulse-to-pulse Doppler advance.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySet {
    /// Two-way propagation delay `τ_p = 2R/c` (s).
    pub propagation_s: f64,
    /// Per-transmit-element displacement delay, index `m = 0..M`.
    pub tx_s: Vec<f64>,
    /// Per-receive-element displacement delay, index `n = 0..N`.
    pub rx_s: Vec<f64>,
    /// Per-pulse Doppler delay, index `k = 0..K`.
    pub doppler_s: Vec<f64>,
}

impl DelaySet {
    /// Combined delay `τ_{n,k} = τ_p − τ_n − τ_k` seen by receive element
    /// `n` on pulse `k` (transmit displacement handled separately in the
    /// transmit chain).
    pub fn combined(&self, n: usize, k: usize) -> f64 {
        self.propagation_s - self.rx_s[n] - self.doppler_s[k]
    }
}

/// All delay families for one emitter.
pub fn delays(sc: &Scenario, e: &PointEmitter) -> DelaySet {
    let cos_dir = e.azimuth_rad.cos() * e.elevation_rad.cos();
    let unit = sc.spacing_m / SPEED_OF_LIGHT * cos_dir;
    let dop_unit = 2.0 * (sc.velocity_mps + e.velocity_mps) / SPEED_OF_LIGHT
        * sc.pri_s
        * (e.azimuth_rad + sc.yaw_rad).cos()
        * e.elevation_rad.cos();
    DelaySet {
        propagation_s: 2.0 * e.range_m / SPEED_OF_LIGHT,
        tx_s: (0..sc.num_tx).map(|m| m as f64 * unit).collect(),
        rx_s: (0..sc.num_rx).map(|n| n as f64 * unit).collect(),
        doppler_s: (0..sc.num_pulses).map(|k| k as f64 * dop_unit).collect(),
    }
}

/// Normalized spatial frequency `f_φ = (d/λ) cos φ cos θ`.
pub fn spatial_frequency(sc: &Scenario, azimuth_rad: f64, elevation_rad: f64) -> f64 {
    sc.spacing_m / sc.wavelength() * azimuth_rad.cos() * elevation_rad.cos()
}

/// Normalized Doppler `f_D = 2(v_a + v)T/λ · cos(φ + ψ) cos θ`.
pub fn doppler_frequency(sc: &Scenario, e: &PointEmitter) -> f64 {
    2.0 * (sc.velocity_mps + e.velocity_mps) * sc.pri_s / sc.wavelength()
        * (e.azimuth_rad + sc.yaw_rad).cos()
        * e.elevation_rad.cos()
}

/// Range frequency `f_R = −2RΔf/c` induced by the per-element offset.
pub fn range_frequency(sc: &Scenario, range_m: f64) -> f64 {
    -2.0 * range_m * sc.freq_offset_hz / SPEED_OF_LIGHT
}

/// Elevation of a ground point at slant range `R`: `θ = arcsin(H/R)`.
///
/// Errors when `R < H` (no ground intersection).
pub fn elevation_from_range(sc: &Scenario, range_m: f64) -> Result<f64> {
    if range_m < sc.height_m {
        return Err(Error::RangeBelowPlatform { range_m, height_m: sc.height_m });
    }
    Ok((sc.height_m / range_m).asin())
}


#[cfg(test)]
mod tests {
    use super::test_support::{desk_scenario, fig_scenario};
    use super::*;

    #[test]
    fn scenarios_validate() {
        fig_scenario().validate().unwrap();
        desk_scenario().validate().unwrap();
    }

    #[test]
    fn validation_catches_undersampling_and_bad_pri() {
        let mut sc = desk_scenario();
        sc.sample_rate_hz = 1.5e6;
        assert!(matches!(sc.validate(), Err(Error::Undersampled { .. })));
        let mut sc = desk_scenario();
        sc.pri_s = 1.0e-6;
        assert!(sc.validate().is_err());
    }

    #[test]
    fn propagation_delay_at_12_km_is_80_us() {
        let sc = fig_scenario();
        let e = PointEmitter::on_ground(&sc, EmitterKind::Target, 0.0, 12.0e3, 25.0, 1.0).unwrap();
        let d = delays(&sc, &e);
        assert!((d.propagation_s - 80.0e-6).abs() < 1e-18);
        // first element has zero displacement delay
        assert_eq!(d.tx_s[0], 0.0);
        assert_eq!(d.rx_s[0], 0.0);
    }

    #[test]
    fn tx_displacement_delay_matches_hand_value() {
        // H = 3 km, R = 12 km → cos θ = 0.96825; second element (m = 2)
        let sc = fig_scenario();
        let e = PointEmitter::on_ground(&sc, EmitterKind::Target, 0.0, 12.0e3, 0.0, 1.0).unwrap();
        assert!((e.elevation_rad.cos() - 0.968246).abs() < 1e-6);
        let d = delays(&sc, &e);
        assert!((d.tx_s[1] - 4.841e-11).abs() < 1e-14);
    }

    #[test]
    fn delays_are_linear_in_index() {
        let sc = fig_scenario();
        let e = PointEmitter::on_ground(&sc, EmitterKind::Target, 0.3, 9.0e3, 10.0, 1.0).unwrap();
        let d = delays(&sc, &e);
        let step = d.tx_s[1] - d.tx_s[0];
        for m in 1..sc.num_tx {
            assert!((d.tx_s[m] - d.tx_s[m - 1] - step).abs() < 1e-22);
        }
        let kstep = d.doppler_s[1] - d.doppler_s[0];
        for k in 1..sc.num_pulses {
            assert!((d.doppler_s[k] - d.doppler_s[k - 1] - kstep).abs() < 1e-22);
        }
    }

    #[test]
    fn spatial_frequency_hand_values() {
        let sc = fig_scenario();
        let theta = elevation_from_range(&sc, 12.0e3).unwrap();
        assert!((spatial_frequency(&sc, 0.0, theta) - 0.48412).abs() < 1e-5);
        assert!(spatial_frequency(&sc, std::f64::consts::FRAC_PI_2, 0.0).abs() < 1e-12);
        // half-wavelength spacing at broadside
        assert!((spatial_frequency(&sc, 0.0, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn doppler_frequency_hand_values() {
        // ψ = 90°, φ = 0 → cos(φ+ψ) = 0
        let sc = fig_scenario();
        let e = PointEmitter::on_ground(&sc, EmitterKind::Target, 0.0, 12.0e3, 25.0, 1.0).unwrap();
        assert!(doppler_frequency(&sc, &e).abs() < 1e-12);

        // stationary platform and target
        let mut sc0 = fig_scenario();
        sc0.velocity_mps = 0.0;
        let e0 = PointEmitter { velocity_mps: 0.0, ..e };
        assert_eq!(doppler_frequency(&sc0, &e0), 0.0);

        // ψ = 0, φ = θ = 0, v_a + v_t = 75 m/s, T = 100 us, λ = 0.03 → 0.5
        let mut sc1 = fig_scenario();
        sc1.yaw_rad = 0.0;
        let e1 = PointEmitter {
            azimuth_rad: 0.0,
            elevation_rad: 0.0,
            range_m: 12.0e3,
            velocity_mps: 0.0,
            power: 1.0,
            kind: EmitterKind::Target,
        };
        assert!((doppler_frequency(&sc1, &e1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn range_frequency_hand_values() {
        let mut sc = fig_scenario();
        sc.freq_offset_hz = 50.0e3;
        assert!((range_frequency(&sc, 12.0e3) - (-4.0)).abs() < 1e-12);
        sc.freq_offset_hz = 0.0;
        assert_eq!(range_frequency(&sc, 12.0e3), 0.0);
        sc.freq_offset_hz = 1.0e6;
        assert!((range_frequency(&sc, 12.0e3) - (-80.0)).abs() < 1e-12);
    }

    #[test]
    fn range_frequency_is_linear_and_negative() {
        let mut sc = fig_scenario();
        sc.freq_offset_hz = 37.0e3;
        let f1 = range_frequency(&sc, 5.0e3);
        let f2 = range_frequency(&sc, 10.0e3);
        assert!((f2 - 2.0 * f1).abs() < 1e-12);
        assert!(f1 < 0.0);
    }

    #[test]
    fn elevation_from_range_hand_values() {
        let sc = fig_scenario();
        let th = elevation_from_range(&sc, 12.0e3).unwrap();
        assert!((th - 0.25268).abs() < 1e-4);
        assert!((elevation_from_range(&sc, 3000.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(elevation_from_range(&sc, 1.0e12).unwrap() < 1e-8);
        assert!(matches!(
            elevation_from_range(&sc, 2999.0),
            Err(Error::RangeBelowPlatform { .. })
        ));
    }

    #[test]
    fn elevation_range_round_trip_is_identity() {
        let sc = fig_scenario();
        for i in 1..=40 {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 40.0;
            let r = sc.height_m / theta.sin();
            let back = elevation_from_range(&sc, r).unwrap();
            assert!((back - theta).abs() < 1e-12, "theta {theta}: got {back}");
        }
    }
}
