//! Command line front end.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 for I/O.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::detect::{calibrate_threshold, decide, DetectorKind, SensingMetric, Threshold};
use crate::error::{Error, Result};
use crate::scd::{alpha_grid, cycle_profile, make_window, DftMode, WindowKind};
use crate::siggen::{
    add_awgn, generate, noise_variance_for, ChannelSpec, ModulationKind, ModulationSpec,
    DEFAULT_AM_INDEX, DEFAULT_SYMBOL_RATE_HZ,
};

use super::io::{
    emit_profile_csv, emit_roc_csv, format_profile_csv, format_roc_csv, format_threshold,
    load_signal, load_threshold, save_threshold,
};
use super::stats::binomial_rate_interval;
use super::{
    calibration_sample, complexity_model, run_roc, run_roc_with_threads, MetricEngine,
    SensingConfig, DEFAULT_N, DEFAULT_SAMPLE_RATE_HZ, DEFAULT_SEED, DEFAULT_SMOOTHING_LEN,
    DEFAULT_TRIALS, TABLE_SMOOTHING_LEN,
};

#[derive(Parser, Debug)]
#[command(
    name = "cyclosense",
    version,
    about = "Cyclostationary single-cycle-frequency spectrum sensing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo ROC sweep for both detectors, written as CSV.
    Roc(RocArgs),
    /// Cycle-frequency profile I(alpha) of a generated or loaded signal.
    Profile(ProfileArgs),
    /// One-shot H0/H1 decision on a signal file.
    Detect(DetectArgs),
    /// Calibrate a threshold for a target false-alarm rate.
    Calibrate(CalibrateArgs),
    /// Real multiply/add counts of both detectors.
    ///
    /// The smoothing length defaults to 1300, the value the operation counts
    /// are usually quoted at; the estimator itself needs an odd length and
    /// defaults to 1301 elsewhere.
    Complexity(ComplexityArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModulationArg {
    Am,
    Bpsk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WindowArg {
    Hamming,
    Rectangular,
}

impl From<WindowArg> for WindowKind {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Hamming => WindowKind::Hamming,
            WindowArg::Rectangular => WindowKind::Rectangular,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DetectorArg {
    Cycle,
    Energy,
}

impl From<DetectorArg> for DetectorKind {
    fn from(d: DetectorArg) -> Self {
        match d {
            DetectorArg::Cycle => DetectorKind::CycleFeature,
            DetectorArg::Energy => DetectorKind::Energy,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SignalArgs {
    #[arg(long, value_enum, default_value = "am")]
    modulation: ModulationArg,
    /// Carrier frequency f_c in Hz.
    #[arg(long, default_value_t = 1e6)]
    fc_hz: f64,
    /// Sampling frequency in Hz.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE_HZ)]
    fs_hz: f64,
    /// AM message bandwidth in Hz.
    #[arg(long, default_value_t = 10e3)]
    bandwidth_hz: f64,
    #[arg(long, default_value_t = DEFAULT_AM_INDEX)]
    am_index: f64,
    #[arg(long, default_value_t = DEFAULT_SYMBOL_RATE_HZ)]
    symbol_rate_hz: f64,
    /// Samples per sensing buffer (N).
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
    /// Odd frequency-smoothing length (L).
    #[arg(long, default_value_t = DEFAULT_SMOOTHING_LEN)]
    smoothing_len: usize,
    #[arg(long, value_enum, default_value = "hamming")]
    window: WindowArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl SignalArgs {
    fn modulation_spec(&self) -> ModulationSpec {
        ModulationSpec {
            kind: match self.modulation {
                ModulationArg::Am => ModulationKind::Am,
                ModulationArg::Bpsk => ModulationKind::Bpsk,
            },
            carrier_hz: self.fc_hz,
            bandwidth_hz: self.bandwidth_hz,
            am_mod_index: self.am_index,
            symbol_rate_hz: self.symbol_rate_hz,
        }
    }

    fn config(&self) -> SensingConfig {
        SensingConfig {
            modulation: self.modulation_spec(),
            n_samples: self.n,
            smoothing_len: self.smoothing_len,
            sample_rate_hz: self.fs_hz,
            window_kind: self.window.into(),
            master_seed: self.seed,
            ..SensingConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct RocArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// SNR in dB (total signal power over full-band noise power); repeatable.
    #[arg(long, allow_negative_numbers = true, default_values_t = vec![-22.0])]
    snr_db: Vec<f64>,
    /// Target false-alarm probability; repeatable.
    #[arg(long, default_values_t = vec![0.01, 0.05, 0.1])]
    target_pf: Vec<f64>,
    /// Fresh noise-only trials per SNR.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Signal-present trials per SNR (defaults to --trials).
    #[arg(long)]
    h1_trials: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    calibration_trials: usize,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Add white noise at this SNR; noiseless when absent.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Load the signal from a sample file instead of generating one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest |alpha| on the grid (default: f_s, exclusive).
    #[arg(long)]
    alpha_max_hz: Option<f64>,
    /// Grid spacing (default: 2 f_s / N).
    #[arg(long)]
    alpha_step_hz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CalibrationArgs {
    #[arg(long, value_enum, default_value = "cycle")]
    detector: DetectorArg,
    #[arg(long, default_value_t = 0.1)]
    target_pf: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    calibration_trials: usize,
    /// Noise level as an SNR against a unit-power signal.
    #[arg(long, allow_negative_numbers = true, default_value_t = -22.0)]
    snr_db: f64,
    /// Noise variance; overrides --snr-db.
    #[arg(long)]
    noise_variance: Option<f64>,
}

impl CalibrationArgs {
    fn variance(&self) -> f64 {
        self.noise_variance
            .unwrap_or_else(|| noise_variance_for(1.0, self.snr_db))
    }

    fn threshold(&self, config: &SensingConfig) -> Result<Threshold> {
        let config = SensingConfig {
            calibration_trials: self.calibration_trials,
            target_pf_list: vec![self.target_pf],
            ..config.clone()
        };
        config.validate()?;
        let detector: DetectorKind = self.detector.into();
        let sample: Vec<f64> = calibration_sample(&config, self.variance())?
            .iter()
            .map(|m| m.get(detector))
            .collect();
        calibrate_threshold(&sample, self.target_pf, detector)
    }
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    signal: SignalArgs,
    #[command(flatten)]
    calibration: CalibrationArgs,
    /// Threshold file path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Signal file to classify.
    #[arg(long)]
    input: PathBuf,
    /// Threshold file; when absent the threshold is calibrated from the
    /// calibration flags.
    #[arg(long)]
    threshold: Option<PathBuf>,
    #[command(flatten)]
    calibration: CalibrationArgs,
}

#[derive(Args, Debug)]
struct ComplexityArgs {
    #[arg(long, default_value_t = DEFAULT_N as u64)]
    n: u64,
    #[arg(long, default_value_t = TABLE_SMOOTHING_LEN as u64)]
    smoothing_len: u64,
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::io(path, e)),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Roc(a) => roc(a, stdout, stderr),
        Command::Profile(a) => profile(a, stdout),
        Command::Detect(a) => detect(a, stdout),
        Command::Calibrate(a) => calibrate(a, stdout),
        Command::Complexity(a) => {
            let r = complexity_model(a.n, a.smoothing_len)?;
            writeln!(stdout, "{r}").map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn roc(a: RocArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let config = SensingConfig {
        snr_db_list: a.snr_db,
        target_pf_list: a.target_pf,
        trials: a.trials,
        h1_trials: a.h1_trials.unwrap_or(a.trials),
        calibration_trials: a.calibration_trials,
        dft_mode: DftMode::PowerOfTwoOnly,
        ..a.signal.config()
    };
    let points = match a.threads {
        Some(t) => run_roc_with_threads(&config, t)?,
        None => run_roc(&config)?,
    };
    match &a.out {
        Some(path) => emit_roc_csv(&points, path)?,
        None => emit(&None, stdout, &format_roc_csv(&points))?,
    }
    for p in &points {
        let (lo, hi) = binomial_rate_interval(p.h0_trials as u64, p.target_pf, 0.99);
        let _ = writeln!(
            stderr,
            "{:>13} snr={:>6} dB pf_target={:<5} pf={:.4} (99% band {:.4}..{:.4}) pd={:.4}",
            p.detector.name(),
            p.snr_db,
            p.target_pf,
            p.measured_pf,
            lo,
            hi,
            p.measured_pd
        );
    }
    Ok(())
}

fn profile(a: ProfileArgs, stdout: &mut dyn Write) -> Result<()> {
    let sig = &a.signal;
    let buf = match &a.input {
        Some(path) => load_signal(path)?,
        None => {
            let clean = generate(&sig.modulation_spec(), sig.n, sig.fs_hz, sig.seed)?;
            match a.snr_db {
                Some(snr_db) => add_awgn(
                    &clean,
                    ChannelSpec {
                        snr_db,
                        seed: sig.seed.wrapping_add(1),
                    },
                )?,
                None => clean,
            }
        }
    };
    let window = make_window(sig.window.into(), sig.smoothing_len)?;
    let grid = alpha_grid(buf.sample_rate_hz(), buf.len(), a.alpha_max_hz, a.alpha_step_hz)?;
    let prof = cycle_profile(&buf, &grid, &window)?;
    match &a.out {
        Some(path) => emit_profile_csv(&prof, path),
        None => emit(&None, stdout, &format_profile_csv(&prof)),
    }
}

fn calibrate(a: CalibrateArgs, stdout: &mut dyn Write) -> Result<()> {
    let t = a.calibration.threshold(&a.signal.config())?;
    match &a.out {
        Some(path) => save_threshold(&t, path),
        None => emit(&None, stdout, &format_threshold(&t)),
    }
}

fn detect(a: DetectArgs, stdout: &mut dyn Write) -> Result<()> {
    let buf = load_signal(&a.input)?;
    let config = SensingConfig {
        n_samples: buf.len(),
        sample_rate_hz: buf.sample_rate_hz(),
        dft_mode: DftMode::Auto,
        ..a.signal.config()
    };
    let threshold = match &a.threshold {
        Some(path) => load_threshold(path)?,
        None => a.calibration.threshold(&config)?,
    };
    let engine = MetricEngine::new(&config)?;
    let m = engine.metrics(&buf)?;
    let metric = SensingMetric {
        value: m.get(threshold.detector),
        detector: threshold.detector,
        alpha_effective_hz: (threshold.detector == DetectorKind::CycleFeature)
            .then(|| crate::scd::effective_alpha(config.alpha0_hz(), config.sample_rate_hz / buf.len() as f64)),
    };
    let decision = decide(&metric, &threshold)?;
    writeln!(
        stdout,
        "detector={} metric={} threshold={} decision={}",
        metric.detector, metric.value, threshold.value, decision
    )
    .map_err(|e| Error::io("<stdout>", e))
}
