//! Monte Carlo ROC engine and supporting plumbing.
//!
//! For every SNR the engine draws three independent batches of buffers:
//! noise-only calibration buffers that fix the threshold for each target Pf,
//! fresh noise-only buffers that measure Pf, and signal-plus-noise buffers
//! that measure Pd. Every buffer is seeded from `(master_seed, phase, trial)`
//! so results do not depend on how trials are scheduled across threads.

pub mod cli;
pub mod complexity;
pub mod io;
pub mod seed;
pub mod stats;

use rayon::prelude::*;

use crate::detect::{calibrate_threshold, energy_metric, exceeds, Decision, DetectorKind};
use crate::error::{Error, Result};
use crate::scd::{make_window, DftMode, SliceEngine, WindowKind};
use crate::siggen::{
    add_awgn, generate, noise_only, noise_variance_for, ChannelSpec, ModulationSpec, SampleBuffer,
};

pub use complexity::{complexity_model, ComplexityReport};
use seed::{trial_seed, Phase};

pub const DEFAULT_N: usize = 4096;
pub const DEFAULT_SMOOTHING_LEN: usize = 1301;
/// Smoothing length used verbatim by the operation-count model.
pub const TABLE_SMOOTHING_LEN: usize = 1300;
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 3e6;
pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq)]
pub struct SensingConfig {
    pub modulation: ModulationSpec,
    pub n_samples: usize,
    pub smoothing_len: usize,
    pub sample_rate_hz: f64,
    pub snr_db_list: Vec<f64>,
    pub target_pf_list: Vec<f64>,
    /// Fresh H0 trials per SNR.
    pub trials: usize,
    /// H1 trials per SNR.
    pub h1_trials: usize,
    pub calibration_trials: usize,
    pub master_seed: u64,
    pub window_kind: WindowKind,
    pub dft_mode: DftMode,
}

impl Default for SensingConfig {
    fn default() -> Self {
        SensingConfig {
            modulation: ModulationSpec::table1_am(),
            n_samples: DEFAULT_N,
            smoothing_len: DEFAULT_SMOOTHING_LEN,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            snr_db_list: vec![-22.0],
            target_pf_list: vec![0.01, 0.05, 0.1],
            trials: DEFAULT_TRIALS,
            h1_trials: DEFAULT_TRIALS,
            calibration_trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            window_kind: WindowKind::Hamming,
            dft_mode: DftMode::PowerOfTwoOnly,
        }
    }
}

impl SensingConfig {
    /// The cycle frequency tested by the feature detector, `2 f_c`.
    pub fn alpha0_hz(&self) -> f64 {
        2.0 * self.modulation.carrier_hz
    }

    pub fn validate(&self) -> Result<()> {
        self.modulation.validate(self.sample_rate_hz)?;
        if self.n_samples < 2 {
            return Err(Error::config("n_samples must be at least 2"));
        }
        if self.dft_mode == DftMode::PowerOfTwoOnly && !self.n_samples.is_power_of_two() {
            return Err(Error::config(format!(
                "n_samples = {} is not a power of two",
                self.n_samples
            )));
        }
        make_window(self.window_kind, self.smoothing_len)?;
        if self.smoothing_len >= self.n_samples {
            return Err(Error::config(format!(
                "smoothing length {} must be below n_samples {}",
                self.smoothing_len, self.n_samples
            )));
        }
        if self.snr_db_list.is_empty() {
            return Err(Error::config("at least one SNR is required"));
        }
        if let Some(s) = self.snr_db_list.iter().find(|s| !s.is_finite()) {
            return Err(Error::config(format!("SNR must be finite, got {s}")));
        }
        if self.target_pf_list.is_empty() {
            return Err(Error::config("at least one target Pf is required"));
        }
        for &pf in &self.target_pf_list {
            if !(pf > 0.0 && pf < 1.0) {
                return Err(Error::config(format!("target Pf must lie in (0, 1), got {pf}")));
            }
            let need = crate::detect::min_calibration_size(pf);
            if self.calibration_trials < need {
                return Err(Error::Calibration {
                    target_pf: pf,
                    required: need,
                    got: self.calibration_trials,
                });
            }
        }
        if self.trials == 0 || self.h1_trials == 0 {
            return Err(Error::config("trial counts must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocPoint {
    pub detector: DetectorKind,
    pub snr_db: f64,
    pub target_pf: f64,
    pub threshold: f64,
    pub measured_pf: f64,
    pub measured_pd: f64,
    pub h0_trials: usize,
    pub h1_trials: usize,
}

/// Cycle-feature and energy metrics of one buffer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricPair {
    pub cycle: f64,
    pub energy: f64,
}

impl MetricPair {
    pub fn get(&self, detector: DetectorKind) -> f64 {
        match detector {
            DetectorKind::CycleFeature => self.cycle,
            DetectorKind::Energy => self.energy,
        }
    }
}

/// Computes both sensing metrics for buffers of one fixed length.
pub struct MetricEngine {
    slices: SliceEngine,
    alpha0_hz: f64,
}

impl MetricEngine {
    pub fn new(config: &SensingConfig) -> Result<Self> {
        let window = make_window(config.window_kind, config.smoothing_len)?;
        Ok(MetricEngine {
            slices: SliceEngine::new(config.n_samples, &window)?,
            alpha0_hz: config.alpha0_hz(),
        })
    }

    pub fn metrics(&self, buf: &SampleBuffer) -> Result<MetricPair> {
        let spectrum = self.slices.spectrum(buf)?;
        let slice = self
            .slices
            .slice(&spectrum, self.alpha0_hz, buf.sample_period_s())?;
        Ok(MetricPair {
            cycle: slice.max_magnitude(),
            energy: energy_metric(buf).value,
        })
    }
}

struct Batches {
    calibration: Vec<MetricPair>,
    null: Vec<MetricPair>,
    signal: Vec<MetricPair>,
}

fn null_metrics(
    config: &SensingConfig,
    engine: &MetricEngine,
    phase: Phase,
    count: usize,
    variance: f64,
) -> Result<Vec<MetricPair>> {
    (0..count)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(config.master_seed, phase, t as u64);
            let buf = noise_only(config.n_samples, variance, config.sample_rate_hz, seed)?;
            engine.metrics(&buf)
        })
        .collect()
}

fn signal_metrics(
    config: &SensingConfig,
    engine: &MetricEngine,
    snr_db: f64,
) -> Result<Vec<MetricPair>> {
    (0..config.h1_trials)
        .into_par_iter()
        .map(|t| {
            let t = t as u64;
            let clean = generate(
                &config.modulation,
                config.n_samples,
                config.sample_rate_hz,
                trial_seed(config.master_seed, Phase::Signal, t),
            )?;
            let channel = ChannelSpec {
                snr_db,
                seed: trial_seed(config.master_seed, Phase::SignalNoise, t),
            };
            engine.metrics(&add_awgn(&clean, channel)?)
        })
        .collect()
}

fn batches(config: &SensingConfig, engine: &MetricEngine, snr_db: f64) -> Result<Batches> {
    // generated signals have unit power, so this is also the H1 noise level
    let variance = noise_variance_for(1.0, snr_db);
    Ok(Batches {
        calibration: null_metrics(config, engine, Phase::Calibration, config.calibration_trials, variance)?,
        null: null_metrics(config, engine, Phase::NullMeasurement, config.trials, variance)?,
        signal: signal_metrics(config, engine, snr_db)?,
    })
}

fn crossing_rate(sample: &[MetricPair], detector: DetectorKind, threshold: f64) -> f64 {
    let hits = sample
        .iter()
        .filter(|m| exceeds(m.get(detector), threshold) == Decision::H1Active)
        .count();
    hits as f64 / sample.len() as f64
}

/// Full sweep over SNRs, target false-alarm rates and both detectors.
/// Points are sorted by `(detector, snr_db, target_pf)`.
pub fn run_roc(config: &SensingConfig) -> Result<Vec<RocPoint>> {
    config.validate()?;
    let engine = MetricEngine::new(config)?;
    let mut points = Vec::new();
    for &snr_db in &config.snr_db_list {
        let b = batches(config, &engine, snr_db)?;
        for detector in [DetectorKind::CycleFeature, DetectorKind::Energy] {
            let cal: Vec<f64> = b.calibration.iter().map(|m| m.get(detector)).collect();
            for &target_pf in &config.target_pf_list {
                let t = calibrate_threshold(&cal, target_pf, detector)?;
                points.push(RocPoint {
                    detector,
                    snr_db,
                    target_pf,
                    threshold: t.value,
                    measured_pf: crossing_rate(&b.null, detector, t.value),
                    measured_pd: crossing_rate(&b.signal, detector, t.value),
                    h0_trials: b.null.len(),
                    h1_trials: b.signal.len(),
                });
            }
        }
    }
    sort_points(&mut points);
    Ok(points)
}

/// [`run_roc`] on a dedicated pool of `threads` workers.
pub fn run_roc_with_threads(config: &SensingConfig, threads: usize) -> Result<Vec<RocPoint>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_roc(config))
}

pub fn sort_points(points: &mut [RocPoint]) {
    points.sort_by(|a, b| {
        a.detector
            .cmp(&b.detector)
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.target_pf.total_cmp(&b.target_pf))
    });
}

/// Noise-only metrics for a single detector, e.g. to write a threshold file.
pub fn calibration_sample(
    config: &SensingConfig,
    noise_variance: f64,
) -> Result<Vec<MetricPair>> {
    let engine = MetricEngine::new(config)?;
    null_metrics(config, &engine, Phase::Calibration, config.calibration_trials, noise_variance)
}
