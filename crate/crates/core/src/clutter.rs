//! Range-ambiguous ground clutter: ring synthesis, secondary range
//! dependence compensation (SRDC), space-time-range adaptive filtering, and
//! closed-form output SDR.
//!
//! The fast-time cell under test collects one equidistant clutter ring per
//! pulse-repetition ambiguity: ring `p` sits at `R_p = R_cut + p·R_u` with
//! `R_u = cT/2`, seen at elevation `θ_p = arcsin(H/R_p)`. Each ring holds
//! `I` point patches spread in azimuth; a patch's Doppler follows its own
//! ring elevation, which is what makes ambiguous rings distinguishable in
//! Doppler (and what Doppler-warping STAP tries to undo).
//!
//! Patch powers are equal within a ring, decay as `1/R_p^4` across rings,
//! and are globally scaled so that `CNR = tr(R_d)/(σ_n²·dim)` matches the
//! configured value.

use rayon::prelude::*;

use crate::interference::{mvdr_weights, CovarianceEstimate, CovarianceSource};
use crate::numerics::{dirichlet, inner, HermitianMatrix};
use crate::scene::{self, PointEmitter, Scenario};
use crate::steering::{Architecture, SteeringModel};
use crate::{C64, Error, Result, SPEED_OF_LIGHT};

/// One equidistant clutter ring.
#[derive(Debug, Clone)]
pub struct ClutterRing {
    /// Slant range of the ring (m).
    pub range_m: f64,
    /// Elevation `arcsin(H/R_p)` (rad).
    pub elevation_rad: f64,
    /// Ambiguity index `p` (0 = unambiguous ring in the CUT).
    pub ambiguity_index: usize,
    /// Patch azimuths (rad).
    pub azimuths_rad: Vec<f64>,
    /// Per-patch power `σ²` (linear), equal within the ring.
    pub patch_power: f64,
}

/// Complete clutter configuration for one cell under test.
#[derive(Debug, Clone)]
pub struct ClutterModel {
    /// Rings `p = 0..=P`.
    pub rings: Vec<ClutterRing>,
    /// Range of the cell under test (m).
    pub cut_range_m: f64,
    /// Configured clutter-to-noise ratio (linear).
    pub cnr: f64,
    /// Patch azimuth half-sector (rad); patches span `(-sector, +sector)`.
    pub sector_rad: f64,
    /// Ring power decay exponent (power ∝ `R_p^-decay`).
    pub ring_decay_exp: f64,
}

impl ClutterModel {
    /// Builds the ring set for a CUT at `cut_range_m` with `num_patches`
    /// azimuth patches per ring and `num_ambiguities` ambiguous rings.
    /// Patch powers are left unnormalized here; [`clutter_columns`] scales
    /// them to the configured CNR against the actual column norms.
    pub fn new(
        sc: &Scenario,
        cut_range_m: f64,
        num_patches: usize,
        num_ambiguities: usize,
        cnr: f64,
        sector_rad: f64,
        ring_decay_exp: f64,
    ) -> Result<Self> {
        if cnr <= 1.0 {
            return Err(Error::InvalidScenario {
                field: "cnr",
                reason: format!("CNR must exceed 1 (linear), got {cnr}"),
            });
        }
        let ru = sc.unambiguous_range();
        let rings = (0..=num_ambiguities)
            .map(|p| {
                let range_m = cut_range_m + p as f64 * ru;
                Ok(ClutterRing {
                    range_m,
                    elevation_rad: scene::elevation_from_range(sc, range_m)?,
                    ambiguity_index: p,
                    azimuths_rad: (0..num_patches)
                        .map(|i| -sector_rad + 2.0 * sector_rad * (i as f64 + 0.5) / num_patches as f64)
                        .collect(),
                    patch_power: range_m.powf(-ring_decay_exp),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rings, cut_range_m, cnr, sector_rad, ring_decay_exp })
    }

    /// Total patch count `I·(P+1)`.
    pub fn num_patches_total(&self) -> usize {
        self.rings.iter().map(|r| r.azimuths_rad.len()).sum()
    }
}

/// Clutter columns (one per patch per ring) plus per-column powers scaled to
/// the configured CNR.
#[derive(Debug, Clone)]
pub struct ClutterColumns {
    pub columns: Vec<Vec<C64>>,
    pub powers: Vec<f64>,
    /// Ring index of each column.
    pub ring_of: Vec<usize>,
}

/// Patch Doppler on ring `p`: `(2 v_a T/λ)·cos θ_p·cos(φ_i + ψ)`.
pub fn patch_doppler(sc: &Scenario, ring: &ClutterRing, azimuth_rad: f64) -> f64 {
    2.0 * sc.velocity_mps * sc.pri_s / sc.wavelength()
        * ring.elevation_rad.cos()
        * (azimuth_rad + sc.yaw_rad).cos()
}

/// Assembles the clutter column of one patch.
fn patch_column(
    sc: &Scenario,
    arch: Architecture,
    e_coeff: f64,
    ring: &ClutterRing,
    azimuth_rad: f64,
    doppler_override: Option<f64>,
) -> Vec<C64> {
    let fd = doppler_override.unwrap_or_else(|| patch_doppler(sc, ring, azimuth_rad));
    let model = SteeringModel::new(sc, arch);
    let mut col = model.steering(azimuth_rad, ring.elevation_rad, ring.range_m, fd);
    let amp = match arch {
        Architecture::Cfda => e_coeff,
        _ => 1.0,
    };
    for z in &mut col {
        *z *= amp;
    }
    col
}

/// All clutter columns for a model, with powers scaled so the assembled
/// disturbance covariance satisfies `tr(R_d)/(σ_n²·dim) = CNR`.
///
/// `doppler_warp` rescales every patch Doppler by `cosθ_0/cosθ_p` (ring
/// Doppler centroid alignment); used by the Doppler-warping STAP variant
/// when building its filter-side covariance.
pub fn clutter_columns(
    sc: &Scenario,
    model: &ClutterModel,
    arch: Architecture,
    e_coeff: f64,
    doppler_warp: bool,
) -> ClutterColumns {
    let cos0 = model.rings[0].elevation_rad.cos();
    let mut columns = Vec::with_capacity(model.num_patches_total());
    let mut raw_powers = Vec::with_capacity(model.num_patches_total());
    let mut ring_of = Vec::with_capacity(model.num_patches_total());
    for (p, ring) in model.rings.iter().enumerate() {
        for &az in &ring.azimuths_rad {
            let fd = if doppler_warp {
                Some(patch_doppler(sc, ring, az) * cos0 / ring.elevation_rad.cos())
            } else {
                None
            };
            columns.push(patch_column(sc, arch, e_coeff, ring, az, fd));
            raw_powers.push(ring.patch_power);
            ring_of.push(p);
        }
    }
    let dim = arch.dim(sc) as f64;
    let col_norm_sq: f64 = crate::numerics::norm_sqr(&columns[0]);
    let total_unscaled: f64 = raw_powers.iter().map(|w| w * col_norm_sq).sum();
    let alpha = if total_unscaled > 0.0 {
        (model.cnr - 1.0) * sc.noise_power * dim / total_unscaled
    } else {
        0.0
    };
    let powers = raw_powers.into_iter().map(|w| w * alpha).collect();
    ClutterColumns { columns, powers, ring_of }
}

/// SRDC compensation vector `r ⊗ 1_N ⊗ 1_K` referenced to the CUT range:
/// `r_m = exp(+j2π(m-1)·2RΔf/c)`, the conjugate of the CUT's range steering,
/// so the unambiguous ring's range block compensates to exactly all-ones.
pub fn srdc_vector(sc: &Scenario, cut_range_m: f64) -> Vec<C64> {
    let cycles_per_elem = 2.0 * cut_range_m * sc.freq_offset_hz / SPEED_OF_LIGHT;
    let r: Vec<C64> = (0..sc.num_tx).map(|m| crate::numerics::phasor(m as f64 * cycles_per_elem)).collect();
    let ones = vec![C64::new(1.0, 0.0); sc.num_rx * sc.num_pulses];
    crate::numerics::kron(&r, &ones)
}

/// Applies a compensation vector entrywise (Hadamard product).
pub fn apply_srdc(v: &mut [C64], rc: &[C64]) {
    for (z, r) in v.iter_mut().zip(rc) {
        *z *= r;
    }
}

/// Clairvoyant disturbance covariance `R_d = Σ σ_w² c_w c_wᴴ + σ_n² I`.
pub fn clutter_covariance(columns: &ClutterColumns, noise_power: f64, dim: usize) -> CovarianceEstimate {
    let matrix = HermitianMatrix::from_outer_products(dim, &columns.columns, &columns.powers, noise_power);
    CovarianceEstimate { matrix, source: CovarianceSource::ClutterPlusNoise, diagonal_loading: 0.0 }
}

/// Monte-Carlo disturbance covariance: averages outer products of noisy
/// snapshots with i.i.d. circular complex Gaussian patch draws at the
/// configured variances. Realism mode; the acceptance path stays
/// clairvoyant.
pub fn sampled_clutter_covariance(
    columns: &ClutterColumns,
    noise_power: f64,
    dim: usize,
    num_snapshots: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> CovarianceEstimate {
    crate::interference::sample_covariance(
        &columns.columns,
        &columns.powers,
        noise_power,
        dim,
        num_snapshots,
        rng,
        CovarianceSource::ClutterPlusNoise,
    )
}

/// STRAP weights `w = R_d⁻¹ t / (tᴴ R_d⁻¹ t)`; identical machinery to the
/// MVDR jammer filter.
pub fn strap_weights(t: &[C64], r_d: &CovarianceEstimate) -> Result<Vec<C64>> {
    mvdr_weights(t, r_d)
}

/// Exact output SDR `σ_t²·tᴴR_d⁻¹t` (the quadratic form the STRAP weights
/// achieve). Oracle for [`sdr_closed_form`].
pub fn sdr_direct(target: &[C64], target_power: f64, r_d: &CovarianceEstimate) -> Result<f64> {
    let f = r_d.factor()?;
    Ok(target_power * inner(target, &f.solve(target)).re)
}

/// Closed-form output SDR via the diagonal (per-patch) Woodbury
/// approximation: each patch subtracts
/// `ϱ_w·|tᴴc_w|²` with `ϱ_w = σ_w²/(σ_n²·(σ_n² + |c|²σ_w²))`, and the
/// patch-target correlations factor into Dirichlet kernels per block
/// (transmit/range, receive, Doppler).
///
/// The approximation drops cross-patch coupling, so it is only meaningful
/// when the columns are near-orthogonal (sparse, well-separated patches);
/// dense rings at high CNR overshoot the subtraction and the result is
/// clamped at zero. The direct quadratic form is authoritative.
pub fn sdr_closed_form(
    sc: &Scenario,
    model: &ClutterModel,
    arch: Architecture,
    e_coeff: f64,
    target: &PointEmitter,
    target_doppler: f64,
) -> f64 {
    let amp = match arch {
        Architecture::Cfda => e_coeff,
        _ => 1.0,
    };
    let dim = arch.dim(sc) as f64;
    let snr = target.power / sc.noise_power;
    let t_norm_sq = amp * amp * dim;

    // rebuild the CNR power scale exactly as clutter_columns does
    let col_norm_sq = amp * amp * dim;
    let total_unscaled: f64 = model
        .rings
        .iter()
        .map(|r| r.patch_power * r.azimuths_rad.len() as f64 * col_norm_sq)
        .sum();
    let alpha = if total_unscaled > 0.0 {
        (model.cnr - 1.0) * sc.noise_power * dim / total_unscaled
    } else {
        0.0
    };

    let d_over_lambda = sc.spacing_m / sc.wavelength();
    let cos_t = target.azimuth_rad.cos() * target.elevation_rad.cos();
    let f_r_t = scene::range_frequency(sc, target.range_m);

    let mut subtracted = 0.0;
    for ring in &model.rings {
        let sigma2 = ring.patch_power * alpha;
        let rho = sigma2 / (sc.noise_power + col_norm_sq * sigma2);
        let f_r_p = scene::range_frequency(sc, ring.range_m);
        for &az in &ring.azimuths_rad {
            let cos_i = az.cos() * ring.elevation_rad.cos();
            let d_angle = d_over_lambda * (cos_i - cos_t);
            let d_range = f_r_p - f_r_t;
            let phi_rx = dirichlet(sc.num_rx, d_angle);
            let phi_dop = dirichlet(sc.num_pulses, patch_doppler(sc, ring, az) - target_doppler);
            let phi_tx = match arch {
                // C-FDA transmit block carries only range
                Architecture::Cfda => dirichlet(sc.num_tx, d_range),
                // FDA-MIMO transmit block carries angle and range jointly
                Architecture::FdaMimo => dirichlet(sc.num_tx, d_angle + d_range),
                Architecture::Mimo => dirichlet(sc.num_tx, d_angle),
                Architecture::Pa => 1.0,
            };
            let corr_unit_sq = (phi_tx * phi_rx * phi_dop).powi(2);
            // |tᴴc_w|² = amp⁴ · |unit correlation|²
            subtracted += rho * amp.powi(4) * corr_unit_sq;
        }
    }
    (snr * (t_norm_sq - subtracted)).max(0.0)
}

// ── SDR loss curves ─────────────────────────────────────────────────────────

/// Which adaptive method supplies the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StapMethod {
    /// Full space-time-range solve against the CUT covariance.
    Strap,
    /// Alias of [`StapMethod::Strap`]: the full MNK-dimensional solve.
    ThreeDStap,
    /// Doppler-warping: filter-side covariance built with ring Doppler
    /// centroids aligned to the unambiguous ring, evaluated against the true
    /// covariance. Mismatch makes it suboptimal by construction.
    DwStap,
}

/// Where the filter-side covariance comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceMode {
    /// Known model covariance of the CUT itself. SRDC is an exact unitary
    /// invariance here (it cannot change `tᴴR⁻¹t`).
    Clairvoyant,
    /// Average of per-cell model covariances over a symmetric training
    /// window around the CUT (guarded). Without SRDC the per-cell range
    /// phases smear across the window; with SRDC each cell is compensated
    /// by its own range before averaging.
    RangeTraining {
        cells_each_side: usize,
        guard_cells: usize,
        cell_width_m: f64,
    },
}

/// One point of an SDR-loss sweep.
#[derive(Debug, Clone, Copy)]
pub struct SdrLossPoint {
    pub doppler: f64,
    /// Output SDR (linear).
    pub sdr_output: f64,
    /// Eq.-47-style loss: output SDR over input SDR `SNR_in/(1+CNR)` (dB).
    pub sdr_loss_db: f64,
    /// Output SDR normalized by the clutter-free output (dB, ≤ 0).
    pub normalized_loss_db: f64,
}

fn cut_covariance(
    sc: &Scenario,
    model: &ClutterModel,
    arch: Architecture,
    e_coeff: f64,
    srdc: bool,
    warp: bool,
) -> CovarianceEstimate {
    let mut cols = clutter_columns(sc, model, arch, e_coeff, warp);
    if srdc {
        let rc = srdc_vector(sc, model.cut_range_m);
        for c in &mut cols.columns {
            apply_srdc(c, &rc);
        }
    }
    clutter_covariance(&cols, sc.noise_power, arch.dim(sc))
}

fn training_covariance(
    sc: &Scenario,
    model: &ClutterModel,
    arch: Architecture,
    e_coeff: f64,
    srdc: bool,
    warp: bool,
    cells_each_side: usize,
    guard_cells: usize,
    cell_width_m: f64,
) -> Result<CovarianceEstimate> {
    let dim = arch.dim(sc);
    let mut acc = crate::numerics::CMat::zeros(dim);
    let mut count = 0usize;
    for side in [-1.0f64, 1.0] {
        for c in (guard_cells + 1)..=(guard_cells + cells_each_side) {
            let range = model.cut_range_m + side * c as f64 * cell_width_m;
            if range <= sc.height_m {
                continue;
            }
            let cell_model = ClutterModel::new(
                sc,
                range,
                model.rings[0].azimuths_rad.len(),
                model.rings.len() - 1,
                model.cnr,
                model.sector_rad,
                model.ring_decay_exp,
            )?;
            let mut cols = clutter_columns(sc, &cell_model, arch, e_coeff, warp);
            if srdc {
                let rc = srdc_vector(sc, range);
                for col in &mut cols.columns {
                    apply_srdc(col, &rc);
                }
            }
            for (col, &p) in cols.columns.iter().zip(&cols.powers) {
                acc.add_outer(col, p);
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InvalidScenario {
            field: "training window",
            reason: "no usable training cells above the platform height".into(),
        });
    }
    let scale = 1.0 / count as f64;
    let mut mat = crate::numerics::CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            mat[(i, j)] = acc[(i, j)] * scale;
        }
        mat[(i, i)] += sc.noise_power;
    }
    Ok(CovarianceEstimate {
        matrix: HermitianMatrix::symmetrized(mat),
        source: CovarianceSource::ClutterPlusNoise,
        diagonal_loading: 0.0,
    })
}

/// SDR loss across a Doppler grid, with the target steering swept in
/// Doppler. Grid points are processed in parallel; the output order follows
/// the input grid.
#[allow(clippy::too_many_arguments)]
pub fn sdr_loss_curve(
    sc: &Scenario,
    model: &ClutterModel,
    arch: Architecture,
    e_coeff: f64,
    target: &PointEmitter,
    doppler_grid: &[f64],
    method: StapMethod,
    srdc: bool,
    mode: CovarianceMode,
) -> Result<Vec<SdrLossPoint>> {
    let warp_filter = method == StapMethod::DwStap;
    let truth = cut_covariance(sc, model, arch, e_coeff, srdc, false);
    let filter_side = match mode {
        CovarianceMode::Clairvoyant => {
            if warp_filter {
                cut_covariance(sc, model, arch, e_coeff, srdc, true)
            } else {
                truth.clone()
            }
        }
        CovarianceMode::RangeTraining { cells_each_side, guard_cells, cell_width_m } => {
            training_covariance(
                sc, model, arch, e_coeff, srdc, warp_filter, cells_each_side, guard_cells, cell_width_m,
            )?
        }
    };
    let factor = filter_side.factor()?;

    let amp = match arch {
        Architecture::Cfda => e_coeff,
        _ => 1.0,
    };
    let steer_model = SteeringModel::new(sc, arch);
    let rc = srdc_vector(sc, model.cut_range_m);
    let clutter_free = amp * amp * arch.dim(sc) as f64 * target.power / sc.noise_power;
    let input_sdr = (target.power / sc.noise_power) / (1.0 + model.cnr);

    let points: Vec<SdrLossPoint> = doppler_grid
        .par_iter()
        .map(|&fd| {
            let mut t = steer_model.steering(target.azimuth_rad, target.elevation_rad, target.range_m, fd);
            for z in &mut t {
                *z *= amp;
            }
            if srdc {
                apply_srdc(&mut t, &rc);
            }
            let w_unnorm = factor.solve(&t);
            let gain = inner(&t, &w_unnorm);
            let w: Vec<C64> = w_unnorm.iter().map(|z| z / gain).collect();
            let num = target.power * inner(&w, &t).norm_sqr();
            let den = truth.matrix.quad_form(&w);
            let sdr = num / den;
            SdrLossPoint {
                doppler: fd,
                sdr_output: sdr,
                sdr_loss_db: 10.0 * (sdr / input_sdr).log10(),
                normalized_loss_db: 10.0 * (sdr / clutter_free).log10(),
            }
        })
        .collect();
    Ok(points)
}

/// Counts connected dips deeper than `depth_db` below the curve's plateau
/// (median of the upper half), returning `(count, plateau_db)`.
pub fn count_notches(curve_db: &[f64], depth_db: f64) -> (usize, f64) {
    let mut sorted: Vec<f64> = curve_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    let upper = &sorted[sorted.len() / 2..];
    let plateau = upper[upper.len() / 2];
    let mut count = 0;
    let mut inside = false;
    for &v in curve_db {
        let below = v < plateau - depth_db;
        if below && !inside {
            count += 1;
        }
        inside = below;
    }
    (count, plateau)
}
