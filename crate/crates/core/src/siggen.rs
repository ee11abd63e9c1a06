//! Primary-user waveforms and the AWGN channel.
//!
//! All buffers are real passband samples. Generators are pure functions of
//! their arguments and seed; the same inputs always give bit-identical output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default AM modulation index.
pub const DEFAULT_AM_INDEX: f64 = 0.5;
/// Default BPSK symbol rate, Hz.
pub const DEFAULT_SYMBOL_RATE_HZ: f64 = 10e3;

/// A real-valued time series together with its sampling rate.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBuffer {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl SampleBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::config("sample buffer must not be empty"));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::config(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::config(format!("sample {i} is not finite")));
        }
        Ok(SampleBuffer {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Observation time `N * T_s` in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Mean of `x[k]^2`.
    pub fn average_power(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    /// Multiply every sample by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        SampleBuffer::new(
            self.samples.iter().map(|x| x * c).collect(),
            self.sample_rate_hz,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModulationKind {
    Am,
    Bpsk,
}

impl ModulationKind {
    pub fn name(self) -> &'static str {
        match self {
            ModulationKind::Am => "am",
            ModulationKind::Bpsk => "bpsk",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulationSpec {
    pub kind: ModulationKind,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// AM only, in (0, 1]. Zero is accepted and yields a bare carrier.
    pub am_mod_index: f64,
    /// BPSK only.
    pub symbol_rate_hz: f64,
}

impl ModulationSpec {
    /// AM at 1 MHz with a 10 kHz message, index 0.5.
    pub fn table1_am() -> Self {
        ModulationSpec {
            kind: ModulationKind::Am,
            carrier_hz: 1e6,
            bandwidth_hz: 10e3,
            am_mod_index: DEFAULT_AM_INDEX,
            symbol_rate_hz: DEFAULT_SYMBOL_RATE_HZ,
        }
    }

    /// BPSK at 1 MHz, 10 kbaud rectangular pulses.
    pub fn table1_bpsk() -> Self {
        ModulationSpec {
            kind: ModulationKind::Bpsk,
            ..Self::table1_am()
        }
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        pos("sample rate", sample_rate_hz)?;
        pos("carrier frequency", self.carrier_hz)?;
        pos("bandwidth", self.bandwidth_hz)?;
        if self.carrier_hz >= sample_rate_hz / 2.0 {
            return Err(Error::config(format!(
                "carrier {} Hz is not below Nyquist ({} Hz)",
                self.carrier_hz,
                sample_rate_hz / 2.0
            )));
        }
        if self.bandwidth_hz >= self.carrier_hz {
            return Err(Error::config(format!(
                "bandwidth {} Hz must be below the carrier {} Hz",
                self.bandwidth_hz, self.carrier_hz
            )));
        }
        match self.kind {
            ModulationKind::Am => {
                if !(0.0..=1.0).contains(&self.am_mod_index) {
                    return Err(Error::config(format!(
                        "AM modulation index must lie in [0, 1], got {}",
                        self.am_mod_index
                    )));
                }
            }
            ModulationKind::Bpsk => {
                pos("symbol rate", self.symbol_rate_hz)?;
                if self.symbol_rate_hz >= sample_rate_hz {
                    return Err(Error::config(format!(
                        "symbol rate {} Hz must be below the sample rate {} Hz",
                        self.symbol_rate_hz, sample_rate_hz
                    )));
                }
            }
        }
        Ok(())
    }
}

/// AWGN channel parameters. `snr_db = +inf` disables the noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Noise variance giving `snr_db` against a signal of power `signal_power`.
pub fn noise_variance_for(signal_power: f64, snr_db: f64) -> f64 {
    signal_power / 10f64.powf(snr_db / 10.0)
}

fn check_len(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        Err(Error::config("n_samples must be at least 1"))
    } else {
        Ok(())
    }
}

fn normalize_power(mut x: Vec<f64>) -> Vec<f64> {
    let p = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    if p > 0.0 {
        let g = p.sqrt().recip();
        x.iter_mut().for_each(|v| *v *= g);
    }
    x
}

fn carrier(k: usize, carrier_hz: f64, sample_rate_hz: f64) -> f64 {
    (2.0 * PI * carrier_hz * k as f64 / sample_rate_hz).cos()
}

/// Zero-mean, unit-RMS Gaussian message, brick-wall lowpassed to `bandwidth_hz`.
fn lowpass_gaussian(n: usize, bandwidth_hz: f64, sample_rate_hz: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(rng), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let df = sample_rate_hz / n as f64;
    for (k, b) in buf.iter_mut().enumerate() {
        // signed frequency of bin k
        let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        if k == 0 || (kk * df).abs() > bandwidth_hz {
            // DC is dropped so the message is zero-mean.
            *b = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let m: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let rms = (m.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        m.into_iter().map(|v| v / rms).collect()
    } else {
        m
    }
}

/// Real passband AM: `(1 + mu * m[k]) * cos(2 pi f_c k T_s)`, scaled to unit
/// average power.
pub fn generate_am(
    spec: &ModulationSpec,
    n_samples: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<SampleBuffer> {
    if spec.kind != ModulationKind::Am {
        return Err(Error::config("generate_am called with a non-AM spec"));
    }
    check_len(n_samples)?;
    spec.validate(sample_rate_hz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = lowpass_gaussian(n_samples, spec.bandwidth_hz, sample_rate_hz, &mut rng);
    let x = m
        .iter()
        .enumerate()
        .map(|(k, mk)| (1.0 + spec.am_mod_index * mk) * carrier(k, spec.carrier_hz, sample_rate_hz))
        .collect();
    SampleBuffer::new(normalize_power(x), sample_rate_hz)
}

/// Rectangular-pulse BPSK on a cosine carrier, unit average power.
pub fn generate_bpsk(
    spec: &ModulationSpec,
    n_samples: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<SampleBuffer> {
    if spec.kind != ModulationKind::Bpsk {
        return Err(Error::config("generate_bpsk called with a non-BPSK spec"));
    }
    check_len(n_samples)?;
    spec.validate(sample_rate_hz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples_per_symbol = sample_rate_hz / spec.symbol_rate_hz;
    let n_symbols = (n_samples as f64 / samples_per_symbol).ceil() as usize + 1;
    let symbols: Vec<f64> = (0..n_symbols)
        .map(|_| if rand::Rng::random::<bool>(&mut rng) { 1.0 } else { -1.0 })
        .collect();
    let x = (0..n_samples)
        .map(|k| {
            let s = symbols[(k as f64 / samples_per_symbol).floor() as usize];
            s * carrier(k, spec.carrier_hz, sample_rate_hz)
        })
        .collect();
    SampleBuffer::new(normalize_power(x), sample_rate_hz)
}

/// Dispatch on `spec.kind`.
pub fn generate(
    spec: &ModulationSpec,
    n_samples: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<SampleBuffer> {
    match spec.kind {
        ModulationKind::Am => generate_am(spec, n_samples, sample_rate_hz, seed),
        ModulationKind::Bpsk => generate_bpsk(spec, n_samples, sample_rate_hz, seed),
    }
}

fn gaussian(n: usize, sigma: f64, seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(move |_| {
        let z: f64 = StandardNormal.sample(&mut rng);
        sigma * z
    })
}

/// `signal + n`, with `n` white Gaussian of variance `P_signal / 10^(snr/10)`
/// where `P_signal` is the buffer's average power over the full band.
pub fn add_awgn(signal: &SampleBuffer, channel: ChannelSpec) -> Result<SampleBuffer> {
    if channel.snr_db.is_nan() {
        return Err(Error::config("SNR must not be NaN"));
    }
    if channel.snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    let var = noise_variance_for(signal.average_power(), channel.snr_db);
    if !var.is_finite() {
        return Err(Error::config(format!(
            "SNR {} dB gives a non-finite noise variance",
            channel.snr_db
        )));
    }
    let y = signal
        .samples()
        .iter()
        .zip(gaussian(signal.len(), var.sqrt(), channel.seed))
        .map(|(s, n)| s + n)
        .collect();
    SampleBuffer::new(y, signal.sample_rate_hz())
}

/// I.i.d. zero-mean Gaussian buffer.
pub fn noise_only(
    n_samples: usize,
    variance: f64,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<SampleBuffer> {
    check_len(n_samples)?;
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::config(format!(
            "noise variance must be positive, got {variance}"
        )));
    }
    SampleBuffer::new(
        gaussian(n_samples, variance.sqrt(), seed).collect(),
        sample_rate_hz,
    )
}
