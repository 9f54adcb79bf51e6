//! The six experiment runners. Each returns a CSV header, pre-sorted rows,
//! and a JSON sidecar of every resolved parameter, so identical inputs
//! produce byte-identical outputs.

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use cfda_core::clutter::{
    clutter_columns, clutter_covariance, sdr_loss_curve, ClutterModel, CovarianceMode, StapMethod,
};
use cfda_core::interference::{capon_map, sinr_closed_form, JammerScene};
use cfda_core::rxchain::{
    amplitude_coefficient, cfda_chain, fdamimo_receiver, measure_array_gains, pa_receiver,
    synthesize_echo, AmplitudeMethod,
};
use cfda_core::scene::Scenario;
use cfda_core::steering::{Architecture, SteeringModel};
use cfda_core::txchain::{tx_weights, BeamformWeights};
use cfda_core::{C64, SPEED_OF_LIGHT};

use crate::config::Config;

pub struct Emitted {
    pub header: &'static str,
    pub rows: Vec<String>,
    pub sidecar: Value,
}

fn scenario_json(sc: &Scenario) -> Value {
    json!({
        "carrier_frequency_hz": sc.carrier_hz,
        "frequency_offset_hz": sc.freq_offset_hz,
        "bandwidth_hz": sc.bandwidth_hz,
        "pulse_width_s": sc.pulse_width_s,
        "pri_s": sc.pri_s,
        "element_spacing_m": sc.spacing_m,
        "num_tx": sc.num_tx,
        "num_rx": sc.num_rx,
        "num_pulses": sc.num_pulses,
        "platform_height_m": sc.height_m,
        "platform_velocity_mps": sc.velocity_mps,
        "yaw_rad": sc.yaw_rad,
        "sample_rate_hz": sc.sample_rate_hz,
        "noise_power": sc.noise_power,
        "rng_seed": sc.rng_seed,
        "samples_per_pulse": sc.samples_per_pulse(),
        "unambiguous_range_m": sc.unambiguous_range(),
        "range_bin_m": sc.range_bin(),
    })
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn e_coeff_for(sc: &Scenario, arch: Architecture) -> Result<f64> {
    Ok(match arch {
        Architecture::Cfda => amplitude_coefficient(sc, AmplitudeMethod::Spectral)?.e,
        _ => 1.0,
    })
}

// ── mf-profile ──────────────────────────────────────────────────────────────

pub fn mf_profile(
    cfg: &Config,
    sc: &Scenario,
    arch: Architecture,
    all_channels: bool,
    with_noise: bool,
    seed: u64,
) -> Result<Emitted> {
    let target = cfg.target(sc)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let out = match arch {
        Architecture::Pa => {
            let mut sc_pa = sc.clone();
            sc_pa.freq_offset_hz = 0.0;
            let w = tx_weights(&sc_pa, target.azimuth_rad, target.elevation_rad);
            let cube = synthesize_echo(&sc_pa, &w, &target, C64::new(1.0, 0.0), with_noise, &mut rng)?;
            pa_receiver(&sc_pa, &cube)?
        }
        Architecture::FdaMimo | Architecture::Mimo => {
            let w = BeamformWeights {
                weights: vec![C64::new(1.0, 0.0); sc.num_tx],
                azimuth_rad: 0.0,
                elevation_rad: 0.0,
            };
            let cube = synthesize_echo(sc, &w, &target, C64::new(1.0, 0.0), with_noise, &mut rng)?;
            fdamimo_receiver(sc, &cube)?
        }
        Architecture::Cfda => cfda_chain(sc, &target, C64::new(1.0, 0.0), with_noise, &mut rng)?,
    };

    let mut rows = Vec::new();
    let (rx_take, pulse_take) = if all_channels {
        (out.num_rx, out.num_pulses)
    } else {
        (1, 1) // the paper's display: first channel of the first element
    };
    for m in 0..out.num_tx {
        for n in 0..rx_take {
            for k in 0..pulse_take {
                let prof = out.profile(m, n, k);
                for (bin, z) in prof.samples.iter().enumerate() {
                    let range = out.bin_to_range(bin);
                    if range < 0.0 {
                        continue;
                    }
                    rows.push(format!("{},{},{},{},{},{}", m + 1, n + 1, k + 1, range, z.norm(), z.arg()));
                }
            }
        }
    }
    Ok(Emitted {
        header: "channel_m,rx_n,pulse_k,range_m,magnitude,phase_rad",
        rows,
        sidecar: json!({
            "experiment": "mf_profile",
            "architecture": arch.name(),
            "scenario": scenario_json(sc),
            "target_range_m": cfg.target.range_m,
            "all_channels": all_channels,
            "with_noise": with_noise,
            "seed": seed,
        }),
    })
}

// ── gain-sweep ──────────────────────────────────────────────────────────────

pub fn gain_sweep(cfg: &Config, sc: &Scenario, delta_f: &[f64], trials: usize, seed: u64) -> Result<Emitted> {
    let mut rows = Vec::new();
    let mut offsets = delta_f.to_vec();
    offsets.sort_by(f64::total_cmp);
    for &df in &offsets {
        let mut sci = sc.clone();
        sci.freq_offset_hz = df;
        let e_time = amplitude_coefficient(&sci, AmplitudeMethod::TimePeak)?;
        let e_spec = amplitude_coefficient(&sci, AmplitudeMethod::Spectral)?;
        let g = measure_array_gains(&sci, trials, seed)?;
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            df, e_time.e, e_spec.e, g.omega_pa, g.omega_fdamimo, g.omega_cfda,
            e_time.within_regime,
        ));
    }
    Ok(Emitted {
        header: "delta_f_hz,e_time_peak,e_spectral,omega_pa,omega_fda_mimo,omega_cfda,within_regime",
        rows,
        sidecar: json!({
            "experiment": "gain_sweep",
            "scenario": scenario_json(sc),
            "delta_f_hz": offsets,
            "trials": trials,
            "seed": seed,
            "target_range_m": cfg.target.range_m,
        }),
    })
}

// ── sinr-sweep ──────────────────────────────────────────────────────────────

pub fn sinr_sweep(
    cfg: &Config,
    sc: &Scenario,
    archs: &[Architecture],
    delta_f: &[f64],
    max_offset_m: f64,
    step_m: f64,
) -> Result<Emitted> {
    let target = cfg.target(sc)?;
    let (_, jammer_power) = cfg.jammer_power(sc)?;
    let mut rows = Vec::new();
    let mut n_points = 0usize;
    let mut dr = -max_offset_m;
    let mut offsets = Vec::new();
    while dr <= max_offset_m + 1e-9 {
        offsets.push(dr);
        dr += step_m;
    }
    for arch in archs {
        let dfs: Vec<f64> = match arch {
            Architecture::Pa | Architecture::Mimo => vec![0.0],
            Architecture::FdaMimo => vec![sc.bandwidth_hz],
            Architecture::Cfda => delta_f.to_vec(),
        };
        for df in dfs {
            let mut sci = sc.clone();
            sci.freq_offset_hz = df;
            for &dr in &offsets {
                let scene = JammerScene::new(sci.clone(), *arch, target, cfg.target.range_m + dr, jammer_power)?;
                let sinr = sinr_closed_form(&scene);
                rows.push(format!("{},{},{},{}", dr, arch.name(), db(sinr), df));
                n_points += 1;
            }
        }
    }
    Ok(Emitted {
        header: "delta_r_m,architecture,sinr_db,delta_f_hz",
        rows,
        sidecar: json!({
            "experiment": "sinr_sweep",
            "scenario": scenario_json(sc),
            "architectures": archs.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "delta_f_hz": delta_f,
            "jammer": cfg.jammer,
            "target_range_m": cfg.target.range_m,
            "points": n_points,
        }),
    })
}

// ── capon-map ───────────────────────────────────────────────────────────────

#[allow(clippy::too_many_arguments)]
pub fn capon(
    cfg: &Config,
    sc: &Scenario,
    arch: Architecture,
    range_min: f64,
    range_max: f64,
    range_points: usize,
    az_span_deg: f64,
    az_points: usize,
) -> Result<Emitted> {
    let target = cfg.target(sc)?;
    let (jr, jp) = cfg.jammer_power(sc)?;
    let scene = JammerScene::new(sc.clone(), arch, target, jr, jp)?;
    let ranges: Vec<f64> = (0..range_points)
        .map(|i| range_min + (range_max - range_min) * i as f64 / (range_points - 1).max(1) as f64)
        .collect();
    let azimuths: Vec<f64> = (0..az_points)
        .map(|i| {
            (-az_span_deg + 2.0 * az_span_deg * i as f64 / (az_points - 1).max(1) as f64).to_radians()
        })
        .collect();
    let map = capon_map(&scene, &ranges, &azimuths)?;
    let mut rows = Vec::new();
    for (i, row) in map.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            rows.push(format!("{},{},{}", ranges[i], azimuths[j].to_degrees(), db(v)));
        }
    }
    Ok(Emitted {
        header: "range_m,azimuth_deg,p_f_db",
        rows,
        sidecar: json!({
            "experiment": "capon_map",
            "architecture": arch.name(),
            "scenario": scenario_json(sc),
            "jammer": cfg.jammer,
            "range_grid": { "min_m": range_min, "max_m": range_max, "points": range_points },
            "azimuth_grid": { "span_deg": az_span_deg, "points": az_points },
            "e_coeff": scene.e_coeff,
        }),
    })
}

// ── clutter-spectrum ────────────────────────────────────────────────────────

#[allow(clippy::too_many_arguments)]
pub fn clutter_spectrum(
    cfg: &Config,
    sc: &Scenario,
    arch: Architecture,
    gates: usize,
    gate_step_m: f64,
    doppler_bins: usize,
    after_stap: bool,
) -> Result<Emitted> {
    let clcfg = cfg.clutter.clone().unwrap_or_default();
    let target = cfg.target(sc)?;
    let e_coeff = e_coeff_for(sc, arch)?;
    let steer = SteeringModel::new(sc, arch);
    let mut rows = Vec::new();
    let half = gates as i64 / 2;
    for g in 0..gates {
        let gate_range = cfg.target.range_m + (g as i64 - half) as f64 * gate_step_m;
        if gate_range <= sc.height_m {
            continue;
        }
        let model = ClutterModel::new(
            sc,
            gate_range,
            clcfg.num_patches,
            clcfg.num_ambiguities,
            10f64.powf(clcfg.cnr_db / 10.0),
            (clcfg.sector_deg / 2.0).to_radians(),
            clcfg.ring_decay_exp,
        )?;
        let cols = clutter_columns(sc, &model, arch, e_coeff, false);
        let cov = clutter_covariance(&cols, sc.noise_power, arch.dim(sc));
        let factor = if after_stap { Some(cov.factor()?) } else { None };
        let elevation = cfda_core::scene::elevation_from_range(sc, gate_range)?;
        for dbin in 0..doppler_bins {
            let fd = -0.5 + dbin as f64 / (doppler_bins - 1).max(1) as f64;
            let s = steer.steering(target.azimuth_rad, elevation, gate_range, fd);
            let p = match &factor {
                // residual spectrum after adaptive filtering
                Some(f) => {
                    let sol = f.solve(&s);
                    1.0 / cfda_core::numerics::inner(&s, &sol).re.max(1e-300)
                }
                // raw matched-energy clutter spectrum
                None => cov.matrix.quad_form(&s) / cfda_core::numerics::norm_sqr(&s),
            };
            rows.push(format!("{},{},{}", g, dbin, db(p)));
        }
    }
    Ok(Emitted {
        header: "range_bin,doppler_bin,power_db",
        rows,
        sidecar: json!({
            "experiment": "clutter_spectrum",
            "architecture": arch.name(),
            "scenario": scenario_json(sc),
            "clutter": clcfg,
            "gates": gates,
            "gate_step_m": gate_step_m,
            "doppler_bins": doppler_bins,
            "after_stap": after_stap,
            "e_coeff": e_coeff,
        }),
    })
}

// ── sdr-loss ────────────────────────────────────────────────────────────────

#[allow(clippy::too_many_arguments)]
pub fn sdr_loss(
    cfg: &Config,
    sc: &Scenario,
    archs: &[Architecture],
    delta_f: &[f64],
    methods: &[StapMethod],
    srdc_variants: &[bool],
    doppler_bins: usize,
    train_cells: usize,
    guard_cells: usize,
) -> Result<Emitted> {
    let clcfg = cfg.clutter.clone().unwrap_or_default();
    let target = cfg.target(sc)?;
    let grid: Vec<f64> = (0..doppler_bins)
        .map(|i| -0.5 + i as f64 / (doppler_bins - 1).max(1) as f64)
        .collect();
    let mode = if train_cells == 0 {
        CovarianceMode::Clairvoyant
    } else {
        CovarianceMode::RangeTraining {
            cells_each_side: train_cells,
            guard_cells,
            cell_width_m: SPEED_OF_LIGHT / (2.0 * sc.bandwidth_hz),
        }
    };
    let mut rows = Vec::new();
    for arch in archs {
        let dfs: Vec<f64> = match arch {
            Architecture::Pa | Architecture::Mimo => vec![0.0],
            Architecture::FdaMimo => vec![sc.bandwidth_hz],
            Architecture::Cfda => delta_f.to_vec(),
        };
        for df in dfs {
            let mut sci = sc.clone();
            sci.freq_offset_hz = df;
            let model = ClutterModel::new(
                &sci,
                cfg.target.range_m,
                clcfg.num_patches,
                clcfg.num_ambiguities,
                10f64.powf(clcfg.cnr_db / 10.0),
                (clcfg.sector_deg / 2.0).to_radians(),
                clcfg.ring_decay_exp,
            )?;
            let e_coeff = e_coeff_for(&sci, *arch)?;
            for method in methods {
                for &srdc in srdc_variants {
                    let curve = sdr_loss_curve(
                        &sci, &model, *arch, e_coeff, &target, &grid, *method, srdc, mode,
                    )?;
                    let mname = match method {
                        StapMethod::Strap => "strap",
                        StapMethod::ThreeDStap => "3d_stap",
                        StapMethod::DwStap => "dw_stap",
                    };
                    for p in &curve {
                        rows.push(format!(
                            "{},{},{},{},{},{},{}",
                            p.doppler, p.sdr_loss_db, mname, srdc, arch.name(), df,
                            p.normalized_loss_db,
                        ));
                    }
                }
            }
        }
    }
    Ok(Emitted {
        header: "doppler_normalized,sdr_loss_db,method,srdc_flag,architecture,delta_f_hz,sdr_loss_norm_db",
        rows,
        sidecar: json!({
            "experiment": "sdr_loss",
            "scenario": scenario_json(sc),
            "clutter": clcfg,
            "architectures": archs.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "delta_f_hz": delta_f,
            "doppler_bins": doppler_bins,
            "covariance": if train_cells == 0 { json!("clairvoyant") } else {
                json!({ "training_cells_each_side": train_cells, "guard_cells": guard_cells })
            },
            "target_range_m": cfg.target.range_m,
        }),
    })
}
