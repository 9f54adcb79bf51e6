//! `cfda` — experiment runner for the C-FDA radar simulation.
//!
//! Each subcommand loads a JSON scenario, runs one experiment, and writes a
//! CSV plus a `<out>.json` sidecar with every resolved parameter. Outputs
//! are byte-identical across reruns with the same scenario and seed.

mod config;
mod experiments;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, ValueEnum};

use cfda_core::clutter::StapMethod;
use cfda_core::steering::Architecture;

use config::Config;
use experiments::Emitted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchArg {
    Pa,
    Mimo,
    #[value(name = "fda-mimo")]
    FdaMimo,
    #[value(name = "c-fda")]
    Cfda,
}

impl From<ArchArg> for Architecture {
    fn from(a: ArchArg) -> Self {
        match a {
            ArchArg::Pa => Architecture::Pa,
            ArchArg::Mimo => Architecture::Mimo,
            ArchArg::FdaMimo => Architecture::FdaMimo,
            ArchArg::Cfda => Architecture::Cfda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Strap,
    #[value(name = "3d-stap")]
    ThreeDStap,
    #[value(name = "dw-stap")]
    DwStap,
}

impl From<MethodArg> for StapMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Strap => StapMethod::Strap,
            MethodArg::ThreeDStap => StapMethod::ThreeDStap,
            MethodArg::DwStap => StapMethod::DwStap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SrdcArg {
    On,
    Off,
    Both,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path; the parameter sidecar goes to `<out>.json`.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Switch to full table scale: M = N = K = 8, f_s = 100 MHz.
    #[arg(long)]
    fig_scale: bool,
}

#[derive(Debug, Parser)]
#[command(name = "cfda", about = "Coherent-FDA radar experiments", version)]
enum Cli {
    /// Range-profile dump of the receive chain for one architecture.
    MfProfile {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "c-fda")]
        arch: ArchArg,
        /// Emit every (m, n, k) channel instead of the first element/pulse.
        #[arg(long)]
        all_channels: bool,
        /// Add per-sample receiver noise (seeded).
        #[arg(long)]
        with_noise: bool,
    },
    /// Amplitude coefficient and Monte-Carlo array gains across offsets.
    GainSweep {
        #[command(flatten)]
        common: Common,
        /// Frequency offsets in Hz.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 10.0e3, 50.0e3, 100.0e3])]
        delta_f: Vec<f64>,
        /// Monte-Carlo noise draws per gain estimate.
        #[arg(long, default_value_t = 4000)]
        trials: usize,
    },
    /// Output SINR versus jammer range offset per architecture.
    SinrSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = vec![ArchArg::Pa, ArchArg::Mimo, ArchArg::FdaMimo, ArchArg::Cfda])]
        arch: Vec<ArchArg>,
        /// C-FDA frequency offsets in Hz.
        #[arg(long, value_delimiter = ',', default_values_t = vec![50.0e3])]
        delta_f: Vec<f64>,
        /// Largest |ΔR| in meters.
        #[arg(long, default_value_t = 1200.0)]
        max_offset: f64,
        /// ΔR step in meters.
        #[arg(long, default_value_t = 10.0)]
        step: f64,
    },
    /// Capon range-azimuth spectrum of target plus jammer.
    CaponMap {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "c-fda")]
        arch: ArchArg,
        #[arg(long, default_value_t = 11.5e3)]
        range_min: f64,
        #[arg(long, default_value_t = 13.0e3)]
        range_max: f64,
        #[arg(long, default_value_t = 100)]
        range_points: usize,
        /// Azimuth half-span in degrees.
        #[arg(long, default_value_t = 30.0)]
        az_span: f64,
        #[arg(long, default_value_t = 61)]
        az_points: usize,
    },
    /// Range-Doppler clutter spectrum across fast-time gates.
    ClutterSpectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "c-fda")]
        arch: ArchArg,
        #[arg(long, default_value_t = 41)]
        gates: usize,
        /// Gate spacing in meters (default: the range resolution c/2B).
        #[arg(long)]
        gate_step: Option<f64>,
        #[arg(long, default_value_t = 64)]
        doppler_bins: usize,
        /// Emit the residual spectrum after adaptive filtering instead of
        /// the raw clutter spectrum.
        #[arg(long)]
        after_stap: bool,
    },
    /// SDR loss versus target Doppler for the STAP variants.
    SdrLoss {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = vec![ArchArg::FdaMimo, ArchArg::Cfda])]
        arch: Vec<ArchArg>,
        /// C-FDA frequency offsets in Hz.
        #[arg(long, value_delimiter = ',', default_values_t = vec![50.0e3])]
        delta_f: Vec<f64>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MethodArg::Strap])]
        method: Vec<MethodArg>,
        #[arg(long, value_enum, default_value = "off")]
        srdc: SrdcArg,
        #[arg(long, default_value_t = 121)]
        doppler_bins: usize,
        /// Training cells each side of the CUT (0 = clairvoyant covariance).
        #[arg(long, default_value_t = 0)]
        train_cells: usize,
        #[arg(long, default_value_t = 2)]
        guard_cells: usize,
    },
}

fn write_outputs(common: &Common, emitted: Emitted) -> Result<()> {
    if let Some(dir) = common.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        }
    }
    let mut csv = Vec::with_capacity(emitted.rows.len() * 32 + 64);
    writeln!(csv, "{}", emitted.header)?;
    for row in &emitted.rows {
        writeln!(csv, "{row}")?;
    }
    std::fs::write(&common.out, &csv)
        .with_context(|| format!("cannot write {}", common.out.display()))?;

    let mut sidecar_path = common.out.clone().into_os_string();
    sidecar_path.push(".json");
    let sidecar_path = PathBuf::from(sidecar_path);
    let pretty = serde_json::to_string_pretty(&emitted.sidecar)?;
    std::fs::write(&sidecar_path, pretty.as_bytes())
        .with_context(|| format!("cannot write {}", sidecar_path.display()))?;

    println!(
        "wrote {} rows to {} (sidecar {})",
        emitted.rows.len(),
        common.out.display(),
        sidecar_path.display()
    );
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli {
        Cli::MfProfile { common, arch, all_channels, with_noise } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let seed = common.seed.unwrap_or(sc.rng_seed);
            let emitted = experiments::mf_profile(&cfg, &sc, arch.into(), all_channels, with_noise, seed)?;
            write_outputs(&common, emitted)
        }
        Cli::GainSweep { common, delta_f, trials } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let seed = common.seed.unwrap_or(sc.rng_seed);
            let emitted = experiments::gain_sweep(&cfg, &sc, &delta_f, trials, seed)?;
            write_outputs(&common, emitted)
        }
        Cli::SinrSweep { common, arch, delta_f, max_offset, step } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let archs: Vec<Architecture> = arch.into_iter().map(Into::into).collect();
            let emitted = experiments::sinr_sweep(&cfg, &sc, &archs, &delta_f, max_offset, step)?;
            write_outputs(&common, emitted)
        }
        Cli::CaponMap { common, arch, range_min, range_max, range_points, az_span, az_points } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let emitted = experiments::capon(
                &cfg, &sc, arch.into(), range_min, range_max, range_points, az_span, az_points,
            )?;
            write_outputs(&common, emitted)
        }
        Cli::ClutterSpectrum { common, arch, gates, gate_step, doppler_bins, after_stap } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let step = gate_step.unwrap_or(cfda_core::SPEED_OF_LIGHT / (2.0 * sc.bandwidth_hz));
            let emitted = experiments::clutter_spectrum(
                &cfg, &sc, arch.into(), gates, step, doppler_bins, after_stap,
            )?;
            write_outputs(&common, emitted)
        }
        Cli::SdrLoss {
            common, arch, delta_f, method, srdc, doppler_bins, train_cells, guard_cells,
        } => {
            let cfg = Config::load(&common.scenario)?;
            let sc = cfg.scenario(common.fig_scale)?;
            let archs: Vec<Architecture> = arch.into_iter().map(Into::into).collect();
            let methods: Vec<StapMethod> = method.into_iter().map(Into::into).collect();
            let srdc_variants = match srdc {
                SrdcArg::On => vec![true],
                SrdcArg::Off => vec![false],
                SrdcArg::Both => vec![false, true],
            };
            let emitted = experiments::sdr_loss(
                &cfg, &sc, &archs, &delta_f, &methods, &srdc_variants, doppler_bins,
                train_cells, guard_cells,
            )?;
            write_outputs(&common, emitted)
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
