//! LFM baseband pulse and the per-element transmit bank.
//!
//! Conventions that the whole receive chain depends on:
//!
//! - The baseband pulse is a unit-amplitude rectangular-envelope chirp
//!   `exp(jπκt²)` with `κ = B/T_p`, referenced to the envelope *center*:
//!   support `[-T_p/2, T_p/2)`. Per-element offset tones `exp(j2π(m-1)Δf t)`
//!   use the same centered time axis. Centering makes the multi-tone matched
//!   filter symmetric, which is what gives the coherent processing gain its
//!   clean `Δf → 0` limit.
//! - Samples sit on a half-sample-offset grid (`t_i = t0 + i/f_s` with
//!   `t0 = -T_p/2 + 0.5/f_s`), so the grid is symmetric under time reversal
//!   and matched filtering is exact in discrete time.
//! - Envelope amplitude is 1, so pulse energy is `N_s = round(f_s·T_p)`
//!   samples and matched-filter peaks come out in units of `N_s`.

use num_complex::Complex;

use crate::numerics::{fft, phasor};
use crate::scene::Scenario;
use crate::{C64, Error, Result};

/// Uniformly sampled complex baseband time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<C64>,
    /// Sample rate (Hz).
    pub sample_rate_hz: f64,
    /// Time of the first sample (s).
    pub t0_s: f64,
}

impl ComplexSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0_s + i as f64 / self.sample_rate_hz
    }

    /// Duration covered by the samples (s).
    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    /// Sum of squared magnitudes (sample-count units).
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Linear-FM baseband pulse: rectangular envelope of width `T_p`, amplitude
/// 1, chirp rate `κ = B/T_p`, centered support.
pub fn lfm_baseband(pulse_width_s: f64, bandwidth_hz: f64, sample_rate_hz: f64) -> Result<ComplexSignal> {
    if sample_rate_hz < 2.0 * bandwidth_hz {
        return Err(Error::Undersampled {
            sample_rate_hz,
            nyquist_hz: 2.0 * bandwidth_hz,
        });
    }
    let ns = (sample_rate_hz * pulse_width_s).round() as usize;
    let kappa = bandwidth_hz / pulse_width_s;
    let t0 = -pulse_width_s / 2.0 + 0.5 / sample_rate_hz;
    let samples = (0..ns)
        .map(|i| {
            let t = t0 + i as f64 / sample_rate_hz;
            // exp(jπκt²) — phase is far below one cycle per sample here
            Complex::from_polar(1.0, std::f64::consts::PI * kappa * t * t)
        })
        .collect();
    Ok(ComplexSignal { samples, sample_rate_hz, t0_s: t0 })
}

/// Per-element transmit waveforms at complex baseband: element `m` carries
/// the common chirp shifted by `(m-1)Δf`.
#[derive(Debug, Clone)]
pub struct WaveformBank {
    pub elements: Vec<ComplexSignal>,
    pub freq_offset_hz: f64,
}

impl WaveformBank {
    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }
}

/// Builds the `M`-element bank for a scenario.
pub fn transmit_bank(sc: &Scenario) -> Result<WaveformBank> {
    let base = lfm_baseband(sc.pulse_width_s, sc.bandwidth_hz, sc.sample_rate_hz)?;
    let elements = (0..sc.num_tx)
        .map(|m| {
            let samples = base
                .samples
                .iter()
                .enumerate()
                .map(|(i, &z)| z * phasor(m as f64 * sc.freq_offset_hz * base.time(i)))
                .collect();
            ComplexSignal { samples, ..base.clone() }
        })
        .collect();
    Ok(WaveformBank { elements, freq_offset_hz: sc.freq_offset_hz })
}

/// Waveform cross-correlation (Gram) matrix `G[i][j] = ∫ u_i u_j* dt`,
/// normalized to unit diagonal. All-ones at `Δf = 0`; off-diagonals shrink
/// toward zero once the offsets exceed the bandwidth.
pub fn gram_matrix(bank: &WaveformBank) -> crate::numerics::CMat {
    let m = bank.num_elements();
    let mut g = crate::numerics::CMat::zeros(m);
    let norm: Vec<f64> = bank.elements.iter().map(|e| e.energy().sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            let dot: C64 = bank.elements[i]
                .samples
                .iter()
                .zip(&bank.elements[j].samples)
                .map(|(a, b)| a * b.conj())
                .sum();
            g[(i, j)] = dot / (norm[i] * norm[j]);
        }
    }
    g
}

/// Index of the strongest FFT bin of a signal (zero-padded 4x), as a
/// frequency in Hz on the unwrapped [-fs/2, fs/2) axis.
pub fn spectral_peak_hz(sig: &ComplexSignal) -> f64 {
    let n = (4 * sig.len()).next_power_of_two();
    let mut buf = sig.samples.clone();
    buf.resize(n, Complex::default());
    let spec = fft(&buf);
    let (imax, _) = spec
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .expect("non-empty spectrum");
    let mut f = imax as f64 / n as f64;
    if f >= 0.5 {
        f -= 1.0;
    }
    f * sig.sample_rate_hz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm_sqr;
    use crate::scene::test_support::{desk_scenario, fig_scenario};

    #[test]
    fn chirp_rate_times_width_is_bandwidth() {
        let tp = 10.0e-6_f64;
        let b = 1.0e6_f64;
        let kappa = b / tp;
        assert!((kappa * tp - b).abs() / b < 1e-12);
        // N_s = round(f_s T_p): 20 MHz × 10 us → 200
        let sig = lfm_baseband(tp, b, 20.0e6).unwrap();
        assert_eq!(sig.len(), 200);
        // fig scale: 100 MHz → 1000
        assert_eq!(lfm_baseband(tp, b, 100.0e6).unwrap().len(), 1000);
    }

    #[test]
    fn zero_bandwidth_is_constant_phase() {
        let sig = lfm_baseband(10.0e-6, 0.0, 20.0e6).unwrap();
        for z in &sig.samples {
            assert!((z - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn undersampled_is_rejected() {
        assert!(matches!(
            lfm_baseband(10.0e-6, 1.0e6, 1.0e6),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn grid_is_symmetric_under_time_reversal() {
        let sig = lfm_baseband(10.0e-6, 1.0e6, 20.0e6).unwrap();
        let n = sig.len();
        for i in 0..n {
            assert!((sig.time(i) + sig.time(n - 1 - i)).abs() < 1e-18);
        }
    }

    #[test]
    fn element_energy_is_ns_for_all_elements() {
        let mut sc = desk_scenario();
        sc.freq_offset_hz = 50.0e3;
        let bank = transmit_bank(&sc).unwrap();
        for e in &bank.elements {
            assert!((e.energy() - 200.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_offset_bank_elements_are_identical() {
        let sc = desk_scenario();
        let bank = transmit_bank(&sc).unwrap();
        for m in 1..bank.num_elements() {
            let diff: f64 = bank.elements[m]
                .samples
                .iter()
                .zip(&bank.elements[0].samples)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            assert!(diff < 1e-20);
        }
    }

    #[test]
    fn single_element_bank_is_the_baseband() {
        let mut sc = desk_scenario();
        sc.num_tx = 1;
        sc.freq_offset_hz = 123.0e3;
        let bank = transmit_bank(&sc).unwrap();
        let base = lfm_baseband(sc.pulse_width_s, sc.bandwidth_hz, sc.sample_rate_hz).unwrap();
        assert_eq!(bank.elements.len(), 1);
        let diff: f64 = bank.elements[0].samples.iter().zip(&base.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(diff < 1e-20);
    }

    #[test]
    fn spectral_support_shifts_by_offset_per_element() {
        let mut sc = fig_scenario();
        sc.freq_offset_hz = 1.0e6; // Δf = B: adjacent spectra abut
        let bank = transmit_bank(&sc).unwrap();
        let bin = sc.sample_rate_hz / (4 * bank.elements[0].len()).next_power_of_two() as f64;
        let f0 = spectral_peak_hz(&bank.elements[0]);
        for m in 1..4 {
            let fm = spectral_peak_hz(&bank.elements[m]);
            let got = fm - f0;
            let want = m as f64 * sc.freq_offset_hz;
            assert!((got - want).abs() <= sc.bandwidth_hz / 2.0 + bin, "element {m}: {got} vs {want}");
        }
    }

    #[test]
    fn gram_all_ones_at_zero_offset() {
        let sc = desk_scenario();
        let g = gram_matrix(&transmit_bank(&sc).unwrap());
        for i in 0..sc.num_tx {
            for j in 0..sc.num_tx {
                assert!((g[(i, j)] - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_off_diagonals_small_at_offset_ge_bandwidth() {
        for df in [1.0e6, 1.5e6] {
            let mut sc = desk_scenario();
            sc.freq_offset_hz = df;
            let g = gram_matrix(&transmit_bank(&sc).unwrap());
            for i in 0..sc.num_tx {
                for j in 0..sc.num_tx {
                    if i != j {
                        assert!(g[(i, j)].norm() <= 0.05, "G[{i}][{j}] = {}", g[(i, j)].norm());
                    }
                }
            }
        }
    }

    #[test]
    fn gram_hermitian_unit_diagonal_psd_always() {
        for df in [0.0, 10.0e3, 50.0e3, 333.0e3, 1.0e6] {
            let mut sc = desk_scenario();
            sc.freq_offset_hz = df;
            let g = gram_matrix(&transmit_bank(&sc).unwrap());
            assert!(g.asymmetry() < 1e-12);
            for i in 0..sc.num_tx {
                assert!((g[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
            let h = crate::numerics::HermitianMatrix::new(g).unwrap();
            assert!(h.is_psd_within(1e-9), "Gram not PSD at df = {df}");
        }
    }

    #[test]
    fn gram_psd_via_random_quadratic_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let mut sc = desk_scenario();
        sc.freq_offset_hz = 80.0e3;
        let g = gram_matrix(&transmit_bank(&sc).unwrap());
        let h = crate::numerics::HermitianMatrix::new(g).unwrap();
        for _ in 0..50 {
            let x: Vec<C64> = (0..sc.num_tx)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            assert!(h.quad_form(&x) >= -1e-9 * norm_sqr(&x));
        }
    }
}
