//! End-to-end tests of the `cfda` binary: output determinism, config
//! diagnostics, and the documented CSV schemas.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cfda"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cfda-cli-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn desk_config() -> serde_json::Value {
    serde_json::json!({
        "carrier_frequency_hz": 1.0e10,
        "frequency_offset_hz": 50.0e3,
        "bandwidth_hz": 1.0e6,
        "pulse_width_s": 1.0e-5,
        "pri_s": 1.0e-4,
        "element_spacing_m": 0.015,
        "num_tx": 4,
        "num_rx": 4,
        "num_pulses": 4,
        "platform_height_m": 3000.0,
        "platform_velocity_mps": 75.0,
        "yaw_deg": 90.0,
        "sample_rate_hz": 2.0e7,
        "noise_power": 1.0,
        "rng_seed": 7,
        "target": { "azimuth_deg": 0.0, "range_m": 12000.0, "velocity_mps": 25.0, "power": 1.0 },
        "jammer": { "range_m": 12500.0, "inr_db": 30.0 },
        "clutter": { "num_patches": 24, "num_ambiguities": 2, "cnr_db": 40.0,
                     "sector_deg": 360.0, "ring_decay_exp": 4.0 }
    })
}

fn write_config(dir: &Path, value: &serde_json::Value) -> PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tmpdir("rerun");
    let cfg = write_config(&dir, &desk_config());
    let run = |out: &Path| {
        let status = bin()
            .args(["gain-sweep", "--scenario"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--delta-f", "0,10e3", "--trials", "300", "--seed", "42"])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    run(&a);
    run(&b);
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "CSV outputs differ between identical runs");
    let side_a = std::fs::read(dir.join("a.csv.json")).unwrap();
    let side_b = std::fs::read(dir.join("b.csv.json")).unwrap();
    assert_eq!(side_a, side_b, "sidecars differ between identical runs");
    println!("criterion 9b (byte-identical CLI reruns): PASS");
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tmpdir("badcfg");
    let mut cfg = desk_config();
    cfg.as_object_mut().unwrap().remove("bandwidth_hz");
    let path = write_config(&dir, &cfg);
    let out = bin()
        .args(["mf-profile", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("x.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bandwidth_hz"), "diagnostic was: {stderr}");

    // unknown fields are named too
    let mut cfg = desk_config();
    cfg.as_object_mut().unwrap().insert("bandwidht_hz".into(), serde_json::json!(1.0));
    let path = write_config(&dir, &cfg);
    let out = bin()
        .args(["mf-profile", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("y.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bandwidht_hz"), "diagnostic was: {stderr}");
}

#[test]
fn infeasible_geometry_is_rejected_before_compute() {
    let dir = tmpdir("geom");
    let mut cfg = desk_config();
    cfg["target"]["range_m"] = serde_json::json!(2000.0); // below the platform
    let path = write_config(&dir, &cfg);
    let out = bin()
        .args(["mf-profile", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("x.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("below platform height"), "diagnostic was: {stderr}");
    assert!(!dir.join("x.csv").exists(), "no output should be written");
}

#[test]
fn mf_profile_pa_peaks_at_target_range_with_full_gain() {
    let dir = tmpdir("mfpa");
    let cfg = write_config(&dir, &desk_config());
    let out_csv = dir.join("mf.csv");
    let status = bin()
        .args(["mf-profile", "--scenario"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .args(["--arch", "pa"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut best = (0.0f64, 0.0f64);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let range: f64 = cols[3].parse().unwrap();
        let mag: f64 = cols[4].parse().unwrap();
        if mag > best.1 {
            best = (range, mag);
        }
    }
    // desk scale: peak M·N_s = 800 at 12 km within a range bin (7.5 m)
    assert!((best.0 - 12000.0).abs() <= 7.5, "peak at {} m", best.0);
    assert!((best.1 - 800.0).abs() / 800.0 <= 0.02, "peak magnitude {}", best.1);
}

#[test]
fn gain_sweep_e_column_is_within_theorem_bounds() {
    let dir = tmpdir("gains");
    let cfg = write_config(&dir, &desk_config());
    let out_csv = dir.join("g.csv");
    let status = bin()
        .args(["gain-sweep", "--scenario"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .args(["--delta-f", "0,1e3,5e3,10e3", "--trials", "300"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let m = 4.0f64;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let e: f64 = cols[1].parse().unwrap();
        assert!(e > m.sqrt() && e <= m + 1e-9, "E = {e} out of bounds in {line}");
    }
}

#[test]
fn sinr_sweep_shows_sra_notch_only_for_fda_mimo() {
    let dir = tmpdir("sinr");
    let cfg = write_config(&dir, &desk_config());
    let out_csv = dir.join("s.csv");
    let status = bin()
        .args(["sinr-sweep", "--scenario"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .args(["--arch", "pa,fda-mimo,c-fda", "--delta-f", "50e3", "--max-offset", "600", "--step", "50"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut rows: Vec<(f64, String, f64)> = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        rows.push((cols[0].parse().unwrap(), cols[1].to_string(), cols[2].parse().unwrap()));
    }
    let at = |arch: &str, dr: f64| -> f64 {
        rows.iter()
            .find(|(r, a, _)| a == arch && (r - dr).abs() < 1e-6)
            .map(|(_, _, s)| *s)
            .unwrap()
    };
    // PA has no range discrimination: flat across ΔR
    assert!((at("pa", 100.0) - at("pa", 500.0)).abs() < 1e-9);
    // FDA-MIMO collapses at the SRA multiple (150 m at Δf = B) and recovers off it
    assert!(at("fda-mimo", 150.0) < at("fda-mimo", 250.0) - 20.0);
    // C-FDA at 50 kHz holds its gain for jammers beyond the range-steering
    // mainlobe (c/(2MΔf) = 750 m at desk scale): within 3 dB of the best at
    // ΔR = ±500 m
    let best = rows
        .iter()
        .filter(|(_, a, _)| a == "c-fda")
        .map(|(_, _, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    for dr in [-500.0, 500.0] {
        assert!(best - at("c-fda", dr) <= 3.0, "C-FDA at {dr}: {} vs best {best}", at("c-fda", dr));
    }
}

#[test]
fn sdr_loss_rows_cover_requested_variants() {
    let dir = tmpdir("sdr");
    let cfg = write_config(&dir, &desk_config());
    let out_csv = dir.join("l.csv");
    let status = bin()
        .args(["sdr-loss", "--scenario"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .args([
            "--arch", "c-fda", "--delta-f", "50e3", "--method", "strap,dw-stap",
            "--srdc", "both", "--doppler-bins", "21", "--train-cells", "8",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "doppler_normalized,sdr_loss_db,method,srdc_flag,architecture,delta_f_hz,sdr_loss_norm_db");
    assert_eq!(lines.len() - 1, 21 * 2 * 2, "one row per bin × method × srdc flag");
    // normalized loss is ≤ 0 dB by construction
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let norm: f64 = cols[6].parse().unwrap();
        assert!(norm <= 1e-9, "normalized loss must be ≤ 0 dB: {line}");
    }
}

#[test]
fn capon_map_locates_target_and_jammer() {
    let dir = tmpdir("capon");
    let cfg = write_config(&dir, &desk_config());
    let out_csv = dir.join("c.csv");
    let status = bin()
        .args(["capon-map", "--scenario"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_csv)
        .args(["--range-min", "11500", "--range-max", "13000", "--range-points", "61", "--az-points", "31"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        rows.push((cols[0].parse().unwrap(), cols[1].parse().unwrap(), cols[2].parse().unwrap()));
    }
    rows.sort_by(|a, b| b.2.total_cmp(&a.2));
    // the two strongest cells sit at the jammer and target ranges
    let mut top_ranges = [rows[0].0, rows.iter().find(|r| (r.0 - rows[0].0).abs() > 100.0).unwrap().0];
    top_ranges.sort_by(f64::total_cmp);
    assert!((top_ranges[0] - 12000.0).abs() <= 25.0, "target cell at {}", top_ranges[0]);
    assert!((top_ranges[1] - 12500.0).abs() <= 25.0, "jammer cell at {}", top_ranges[1]);
}
