//! Mainlobe-jammer study: MVDR suppression, closed-form output SINR, the
//! secondary range ambiguity (SRA) grid, and the Capon range-azimuth
//! spectrum.
//!
//! The jammer is towed: same azimuth and same Doppler as the target, at a
//! different range, so the only handle an adaptive filter has on it is the
//! offset-induced range steering. For FDA-MIMO the range steering repeats
//! with period `c/(2Δf)`, which is exactly the SRA failure mode; the small
//! C-FDA offset pushes that period far beyond the detection window.

use crate::numerics::{dirichlet, inner, CholeskyFactor, HermitianMatrix};
use crate::rxchain::{amplitude_coefficient, AmplitudeMethod};
use crate::scene::{self, PointEmitter, Scenario};
use crate::steering::{Architecture, Snapshot, SteeringModel};
use crate::{C64, Error, Result, SPEED_OF_LIGHT};

/// Where a covariance estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceSource {
    JammingPlusNoise,
    ClutterPlusNoise,
    TargetPlusJamming,
}

/// Hermitian PSD covariance with provenance and the loading used when it
/// gets inverted.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub matrix: HermitianMatrix,
    pub source: CovarianceSource,
    pub diagonal_loading: f64,
}

impl CovarianceEstimate {
    /// Default loading when a plain factorization fails:
    /// `1e-6 · tr(R)/dim`.
    pub fn default_loading(&self) -> f64 {
        1e-6 * self.matrix.trace_re() / self.matrix.dim() as f64
    }

    /// Factorizes with the configured loading, falling back to the default
    /// loading when the plain factorization is not positive definite.
    pub fn factor(&self) -> Result<CholeskyFactor> {
        match self.matrix.cholesky(self.diagonal_loading) {
            Ok(f) => Ok(f),
            Err(_) => self.matrix.cholesky(self.default_loading()),
        }
    }
}

/// Target plus towed mainlobe jammer for one architecture.
///
/// Snapshot amplitude conventions (unit scatterer): PA targets carry the
/// transmit-coherent amplitude `M`, MIMO and FDA-MIMO carry `1`, C-FDA
/// carries the chain amplitude `E`. The jammer shares the target's angle
/// and Doppler blocks and differs only in the range block.
#[derive(Debug, Clone)]
pub struct JammerScene {
    pub scenario: Scenario,
    pub architecture: Architecture,
    pub target: PointEmitter,
    pub jammer_range_m: f64,
    /// Jammer power `σ_j²` (linear).
    pub jammer_power: f64,
    /// C-FDA chain amplitude coefficient `E` (1.0 for other architectures).
    pub e_coeff: f64,
}

impl JammerScene {
    pub fn new(
        scenario: Scenario,
        architecture: Architecture,
        target: PointEmitter,
        jammer_range_m: f64,
        jammer_power: f64,
    ) -> Result<Self> {
        scenario.validate()?;
        let e_coeff = match architecture {
            Architecture::Cfda => amplitude_coefficient(&scenario, AmplitudeMethod::Spectral)?.e,
            _ => 1.0,
        };
        Ok(Self { scenario, architecture, target, jammer_range_m, jammer_power, e_coeff })
    }

    fn amplitude(&self) -> f64 {
        match self.architecture {
            Architecture::Pa => self.scenario.num_tx as f64,
            Architecture::Mimo | Architecture::FdaMimo => 1.0,
            Architecture::Cfda => self.e_coeff,
        }
    }

    fn model(&self) -> SteeringModel<'_> {
        SteeringModel::new(&self.scenario, self.architecture)
    }

    /// Deterministic (unit-scatterer) target snapshot.
    pub fn target_snapshot(&self) -> Snapshot {
        let fd = scene::doppler_frequency(&self.scenario, &self.target);
        let mut data = self.model().steering(
            self.target.azimuth_rad,
            self.target.elevation_rad,
            self.target.range_m,
            fd,
        );
        let a = self.amplitude();
        for z in &mut data {
            *z *= a;
        }
        Snapshot { data, architecture: self.architecture, fast_time_bin: None }
    }

    /// Deterministic jammer snapshot: the target's angle and Doppler blocks
    /// with the range block taken at the jammer range.
    pub fn jammer_snapshot(&self) -> Snapshot {
        let fd = scene::doppler_frequency(&self.scenario, &self.target);
        let mut data = self.model().steering(
            self.target.azimuth_rad,
            self.target.elevation_rad,
            self.jammer_range_m,
            fd,
        );
        let a = self.amplitude();
        for z in &mut data {
            *z *= a;
        }
        Snapshot { data, architecture: self.architecture, fast_time_bin: None }
    }

    /// Jamming-plus-noise covariance `σ_j² j jᴴ + σ_n² I`.
    pub fn jn_covariance(&self) -> CovarianceEstimate {
        let j = self.jammer_snapshot();
        let m = HermitianMatrix::from_outer_products(
            j.data.len(),
            std::slice::from_ref(&j.data),
            &[self.jammer_power],
            self.scenario.noise_power,
        );
        CovarianceEstimate { matrix: m, source: CovarianceSource::JammingPlusNoise, diagonal_loading: 0.0 }
    }

    /// Target-plus-jamming covariance for spectral mapping,
    /// `σ_t² t tᴴ + σ_j² j jᴴ + σ_n² I`.
    pub fn tj_covariance(&self) -> CovarianceEstimate {
        let t = self.target_snapshot();
        let j = self.jammer_snapshot();
        let m = HermitianMatrix::from_outer_products(
            t.data.len(),
            &[t.data, j.data],
            &[self.target.power, self.jammer_power],
            self.scenario.noise_power,
        );
        CovarianceEstimate { matrix: m, source: CovarianceSource::TargetPlusJamming, diagonal_loading: 0.0 }
    }

    /// Interference-to-noise ratio `σ_j²/σ_n²`.
    pub fn inr(&self) -> f64 {
        self.jammer_power / self.scenario.noise_power
    }

    /// Input SNR `σ_t²/σ_n²`.
    pub fn snr_in(&self) -> f64 {
        self.target.power / self.scenario.noise_power
    }
}

/// Sample covariance from noisy snapshot draws: each draw is
/// `Σ_w ξ_w c_w + n` with `ξ_w ~ CN(0, σ_w²)` and white noise `n`, averaged
/// over `num_snapshots` outer products. Converges to the clairvoyant
/// `Σ σ_w² c_w c_wᴴ + σ_n² I` as the draw count grows; the clairvoyant form
/// is what the acceptance tests use.
pub fn sample_covariance(
    columns: &[Vec<C64>],
    powers: &[f64],
    noise_power: f64,
    dim: usize,
    num_snapshots: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
    source: CovarianceSource,
) -> CovarianceEstimate {
    use rand_distr::{Distribution, StandardNormal};
    let mut acc = crate::numerics::CMat::zeros(dim);
    let sigma_n = (noise_power / 2.0).sqrt();
    let mut snap = vec![C64::default(); dim];
    for _ in 0..num_snapshots {
        for z in &mut snap {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *z = num_complex::Complex::new(re * sigma_n, im * sigma_n);
        }
        for (col, &p) in columns.iter().zip(powers) {
            let s = (p / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let xi = num_complex::Complex::new(re * s, im * s);
            for (z, c) in snap.iter_mut().zip(col) {
                *z += xi * c;
            }
        }
        acc.add_outer(&snap, 1.0 / num_snapshots as f64);
    }
    CovarianceEstimate {
        matrix: HermitianMatrix::symmetrized(acc),
        source,
        diagonal_loading: 0.0,
    }
}

/// MVDR weights `w = R⁻¹t / (tᴴR⁻¹t)`; `wᴴt = 1` exactly.
pub fn mvdr_weights(t: &[C64], r: &CovarianceEstimate) -> Result<Vec<C64>> {
    if t.len() != r.matrix.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("steering length {} vs covariance dim {}", t.len(), r.matrix.dim()),
        });
    }
    let factor = r.factor()?;
    let rinv_t = factor.solve(t);
    let denom = inner(t, &rinv_t);
    Ok(rinv_t.into_iter().map(|z| z / denom).collect())
}

/// Closed-form output SINR after MVDR.
///
/// The jammer projection onto the target reduces to a Dirichlet kernel in
/// the range offset: `Φ_R = sin[Mπ(2ΔRΔf/c)]/sin[π(2ΔRΔf/c)]`, taking the
/// limit `M` at the removable singularities. PA and MIMO have no range
/// discrimination at all, so their jammer is exactly parallel to the target.
pub fn sinr_closed_form(scene: &JammerScene) -> f64 {
    let sc = &scene.scenario;
    let m = sc.num_tx as f64;
    let nk = (sc.num_rx * sc.num_pulses) as f64;
    let snr = scene.snr_in();
    let inr = scene.inr();
    let delta_r = (scene.jammer_range_m - scene.target.range_m).abs();
    let phi_r = dirichlet(sc.num_tx, 2.0 * delta_r * sc.freq_offset_hz / SPEED_OF_LIGHT);
    match scene.architecture {
        Architecture::Cfda => {
            let e2 = scene.e_coeff * scene.e_coeff;
            snr * (e2 * m * nk
                - e2 * e2 * nk * nk * inr * phi_r * phi_r / (1.0 + e2 * m * nk * inr))
        }
        Architecture::FdaMimo => {
            snr * (m * nk - nk * nk * inr * phi_r * phi_r / (1.0 + m * nk * inr))
        }
        Architecture::Pa => {
            let g = m * m * nk;
            snr * g / (1.0 + g * inr)
        }
        Architecture::Mimo => {
            let g = m * nk;
            snr * g / (1.0 + g * inr)
        }
    }
}

/// Brute-force output SINR: assemble `R_{j+n}`, solve for the MVDR weights,
/// and evaluate `σ_t²|wᴴt|²/(wᴴRw)`. Algebraically identical to
/// [`sinr_closed_form`] by the matrix inversion lemma.
pub fn sinr_direct(scene: &JammerScene) -> Result<f64> {
    let t = scene.target_snapshot();
    let r = scene.jn_covariance();
    let w = mvdr_weights(&t.data, &r)?;
    let num = scene.target.power * inner(&w, &t.data).norm_sqr();
    let den = r.matrix.quad_form(&w);
    Ok(num / den)
}

/// All secondary-range-ambiguous jammer ranges
/// `R_j = R_t ± L·c/(2Δf), L ≥ 1` inside the detection window
/// `[R_t - R_d/2, R_t + R_d/2]`, sorted ascending. Empty when `Δf = 0`.
///
/// Within the full unambiguous window `R_d = c/(2T)` the count is `⌊Δf·T⌋`.
pub fn sra_ranges(sc: &Scenario, target_range_m: f64, detection_width_m: f64) -> Vec<f64> {
    if sc.freq_offset_hz <= 0.0 {
        return Vec::new();
    }
    let period = SPEED_OF_LIGHT / (2.0 * sc.freq_offset_hz);
    let half = detection_width_m / 2.0;
    let l_max = (half / period).floor() as i64;
    let mut out = Vec::new();
    for l in (-l_max..=l_max).filter(|&l| l != 0) {
        out.push(target_range_m + l as f64 * period);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Capon spectrum `P_F(R, φ) = 1/(sᴴQ⁻¹s)` over a range×azimuth grid, with
/// `Q` the target-plus-jamming covariance and `s` a copy of the target
/// steering swept in range and azimuth: elevation and Doppler stay at the
/// target's values, range enters only through the offset-induced range
/// steering. Rows follow `range_grid`, columns follow `azimuth_grid`.
pub fn capon_map(
    scene: &JammerScene,
    range_grid: &[f64],
    azimuth_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    let q = scene.tj_covariance();
    let factor = q.factor()?;
    let sc = &scene.scenario;
    let fd = scene::doppler_frequency(sc, &scene.target);
    let elevation = scene.target.elevation_rad;
    let model = scene.model();
    // grid rows are independent; output order follows the input grid
    Ok(range_grid
        .par_iter()
        .map(|&r| {
            azimuth_grid
                .iter()
                .map(|&az| {
                    let s = model.steering(az, elevation, r, fd);
                    let qinv_s = factor.solve(&s);
                    1.0 / inner(&s, &qinv_s).re.max(1e-300)
                })
                .collect()
        })
        .collect())
}
