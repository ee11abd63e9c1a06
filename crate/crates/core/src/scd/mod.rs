//! Spectral correlation density at a single cycle frequency.
//!
//! The estimator is the frequency-smoothed cyclic periodogram
//!
//! ```text
//! S[l] = 1/((N-1) T_s) * 1/L * sum_{v=-(L-1)/2}^{(L-1)/2} X[l + a + v] * conj(X[l - a + v]) * W(v)
//! ```
//!
//! with `X` the unnormalized DFT of the buffer and `a = round(alpha / (2 F_s))`
//! the half cycle frequency in bins (`F_s = f_s / N`). Spectrum indices wrap
//! modulo `N`. [`naive`] evaluates the same expression with explicit loops and
//! is kept independent of this module's fast path so the two can be checked
//! against each other.

pub mod naive;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::siggen::SampleBuffer;

pub use naive::scd_slice_naive;

/// Unnormalized forward DFT of a [`SampleBuffer`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
    freq_resolution_hz: f64,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>, freq_resolution_hz: f64) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::config("spectrum must have at least one bin"));
        }
        if !(freq_resolution_hz.is_finite() && freq_resolution_hz > 0.0) {
            return Err(Error::config("frequency resolution must be positive"));
        }
        Ok(Spectrum {
            bins,
            freq_resolution_hz,
        })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn n(&self) -> usize {
        self.bins.len()
    }

    /// `F_s = f_s / N`.
    pub fn freq_resolution_hz(&self) -> f64 {
        self.freq_resolution_hz
    }
}

/// How [`dft_with`] treats lengths that are not a power of two.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DftMode {
    /// Fast transform for powers of two, O(N^2) summation otherwise.
    #[default]
    Auto,
    /// Reject lengths that are not a power of two.
    PowerOfTwoOnly,
}

/// `X[v] = sum_k x[k] e^{-i 2 pi v k / N}`.
pub fn dft(signal: &SampleBuffer) -> Spectrum {
    dft_with(signal, DftMode::Auto).expect("Auto mode accepts every length")
}

pub fn dft_with(signal: &SampleBuffer, mode: DftMode) -> Result<Spectrum> {
    let n = signal.len();
    let df = signal.sample_rate_hz() / n as f64;
    let bins = if n.is_power_of_two() {
        let mut buf: Vec<Complex64> = signal
            .samples()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf
    } else {
        match mode {
            DftMode::PowerOfTwoOnly => {
                return Err(Error::config(format!(
                    "fast transform needs a power-of-two length, got {n}"
                )))
            }
            DftMode::Auto => slow_dft(signal.samples()),
        }
    };
    Spectrum::new(bins, df)
}

fn slow_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();
    (0..n)
        .map(|v| {
            x.iter()
                .enumerate()
                .map(|(k, &xk)| twiddle[(v * k) % n] * xk)
                .sum()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Hamming,
    Rectangular,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Hamming => "hamming",
            WindowKind::Rectangular => "rectangular",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Symmetric, odd-length frequency-smoothing window with unit mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingWindow {
    weights: Vec<f64>,
    kind: WindowKind,
}

impl SmoothingWindow {
    /// Weights ordered from `v = -(L-1)/2` to `v = (L-1)/2`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn half_width(&self) -> usize {
        (self.weights.len() - 1) / 2
    }

    /// `W(v)` for `|v| <= (L-1)/2`.
    pub fn weight(&self, v: isize) -> f64 {
        self.weights[(v + self.half_width() as isize) as usize]
    }
}

pub fn make_window(kind: WindowKind, len: usize) -> Result<SmoothingWindow> {
    if len == 0 {
        return Err(Error::config("smoothing length must be at least 1"));
    }
    if len.is_multiple_of(2) {
        return Err(Error::config(format!(
            "smoothing length must be odd so the window centres on v = 0; got {len}, use {} or {}",
            len - 1,
            len + 1
        )));
    }
    let raw: Vec<f64> = match kind {
        _ if len == 1 => vec![1.0],
        WindowKind::Rectangular => vec![1.0; len],
        WindowKind::Hamming => {
            let m = (len - 1) as f64;
            (0..len)
                .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / m).cos())
                .collect()
        }
    };
    let mean = raw.iter().sum::<f64>() / len as f64;
    Ok(SmoothingWindow {
        weights: raw.into_iter().map(|w| w / mean).collect(),
        kind,
    })
}

/// Half cycle frequency in bins: `round(alpha / (2 F_s))`.
pub fn half_alpha_bins(alpha_hz: f64, freq_resolution_hz: f64) -> i64 {
    (alpha_hz / (2.0 * freq_resolution_hz)).round() as i64
}

/// The cycle frequency actually evaluated for a request of `alpha_hz`.
pub fn effective_alpha(alpha_hz: f64, freq_resolution_hz: f64) -> f64 {
    2.0 * half_alpha_bins(alpha_hz, freq_resolution_hz) as f64 * freq_resolution_hz
}

/// SCD estimate over all `N` discrete frequencies at one cycle frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct ScdSlice {
    pub values: Vec<Complex64>,
    pub alpha_requested_hz: f64,
    pub alpha_effective_hz: f64,
    /// `1 / ((N - 1) T_s)`.
    pub scale: f64,
}

impl ScdSlice {
    /// `max_l |S[l]|`.
    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `1 / ((N - 1) T_s)`. For `N = 1` the factor is undefined and taken as 1/T_s.
pub fn scd_scale(n: usize, sample_period_s: f64) -> f64 {
    1.0 / ((n.max(2) - 1) as f64 * sample_period_s)
}

fn check_slice_args(n: usize, window: &SmoothingWindow, sample_period_s: f64) -> Result<()> {
    if window.len() >= n {
        return Err(Error::config(format!(
            "smoothing length {} must be below the transform length {n}",
            window.len()
        )));
    }
    if !(sample_period_s.is_finite() && sample_period_s > 0.0) {
        return Err(Error::config("sample period must be positive"));
    }
    Ok(())
}

// Windows up to this length are applied by direct summation; longer ones by
// circular correlation through the FFT.
const DIRECT_SMOOTHING_MAX_LEN: usize = 9;

/// Fast SCD evaluator for one transform length and window, reusable across
/// many cycle frequencies.
pub struct SliceEngine {
    n: usize,
    window: SmoothingWindow,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // conj(DFT of the window laid out circularly), pre-divided by N
    window_spectrum: Vec<Complex64>,
}

impl SliceEngine {
    pub fn new(n: usize, window: &SmoothingWindow) -> Result<Self> {
        check_slice_args(n, window, 1.0)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let h = window.half_width() as isize;
        let mut circ = vec![Complex64::new(0.0, 0.0); n];
        for v in -h..=h {
            circ[v.rem_euclid(n as isize) as usize] += window.weight(v);
        }
        forward.process(&mut circ);
        let inv_n = 1.0 / n as f64;
        let window_spectrum = circ.iter().map(|c| c.conj() * inv_n).collect();
        Ok(SliceEngine {
            n,
            window: window.clone(),
            forward,
            inverse,
            window_spectrum,
        })
    }

    pub fn window(&self) -> &SmoothingWindow {
        &self.window
    }

    /// [`dft`] reusing this engine's transform plan.
    pub fn spectrum(&self, signal: &SampleBuffer) -> Result<Spectrum> {
        if signal.len() != self.n {
            return Err(Error::config(format!(
                "buffer has {} samples, engine was built for {}",
                signal.len(),
                self.n
            )));
        }
        let df = signal.sample_rate_hz() / self.n as f64;
        if !self.n.is_power_of_two() {
            return Spectrum::new(slow_dft(signal.samples()), df);
        }
        let mut buf: Vec<Complex64> = signal
            .samples()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        self.forward.process(&mut buf);
        Spectrum::new(buf, df)
    }

    pub fn slice(&self, spectrum: &Spectrum, alpha_hz: f64, sample_period_s: f64) -> Result<ScdSlice> {
        if spectrum.n() != self.n {
            return Err(Error::config(format!(
                "spectrum has {} bins, engine was built for {}",
                spectrum.n(),
                self.n
            )));
        }
        check_slice_args(self.n, &self.window, sample_period_s)?;
        let df = spectrum.freq_resolution_hz();
        let a = half_alpha_bins(alpha_hz, df);
        let products = lag_products(spectrum.bins(), a);
        let mut values = if self.window.len() <= DIRECT_SMOOTHING_MAX_LEN {
            smooth_direct(&products, &self.window)
        } else {
            self.smooth_fft(products)
        };
        let scale = scd_scale(self.n, sample_period_s);
        let k = scale / self.window.len() as f64;
        values.iter_mut().for_each(|c| *c *= k);
        Ok(ScdSlice {
            values,
            alpha_requested_hz: alpha_hz,
            alpha_effective_hz: 2.0 * a as f64 * df,
            scale,
        })
    }

    fn smooth_fft(&self, mut p: Vec<Complex64>) -> Vec<Complex64> {
        self.forward.process(&mut p);
        p.iter_mut()
            .zip(&self.window_spectrum)
            .for_each(|(x, w)| *x *= w);
        self.inverse.process(&mut p);
        p
    }
}

/// `P[j] = X[(j + a) mod N] * conj(X[(j - a) mod N])`.
fn lag_products(x: &[Complex64], a: i64) -> Vec<Complex64> {
    let n = x.len() as i64;
    (0..n)
        .map(|j| x[(j + a).rem_euclid(n) as usize] * x[(j - a).rem_euclid(n) as usize].conj())
        .collect()
}

fn smooth_direct(p: &[Complex64], window: &SmoothingWindow) -> Vec<Complex64> {
    let n = p.len() as isize;
    let h = window.half_width() as isize;
    (0..n)
        .map(|l| {
            (-h..=h)
                .map(|v| p[(l + v).rem_euclid(n) as usize] * window.weight(v))
                .sum()
        })
        .collect()
}

/// Frequency-smoothed SCD estimate at `alpha_hz`.
pub fn scd_slice(
    spectrum: &Spectrum,
    alpha_hz: f64,
    window: &SmoothingWindow,
    sample_period_s: f64,
) -> Result<ScdSlice> {
    SliceEngine::new(spectrum.n(), window)?.slice(spectrum, alpha_hz, sample_period_s)
}

/// `I(alpha) = max_l |S^alpha[l]|` over a grid of cycle frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleProfile {
    /// Effective (bin-rounded) cycle frequencies.
    pub alphas_hz: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl CycleProfile {
    pub fn len(&self) -> usize {
        self.alphas_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas_hz.is_empty()
    }

    /// Index of the largest magnitude among `alpha > 0`. On exact ties the
    /// first (smallest alpha) wins.
    pub fn peak_positive(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, (&a, &m)) in self.alphas_hz.iter().zip(&self.magnitudes).enumerate() {
            if a > 0.0 && best.is_none_or(|b| m > self.magnitudes[b]) {
                best = Some(i);
            }
        }
        best
    }

    /// Every `alpha > 0` whose magnitude is within `rel_tol` of the positive
    /// peak. For real input `I(alpha) = I(f_s - alpha)`, so a single feature
    /// always shows up at least twice in `(0, f_s)`.
    pub fn co_maximizers_positive(&self, rel_tol: f64) -> Vec<usize> {
        let Some(p) = self.peak_positive() else {
            return Vec::new();
        };
        let top = self.magnitudes[p];
        (0..self.len())
            .filter(|&i| self.alphas_hz[i] > 0.0 && self.magnitudes[i] >= top * (1.0 - rel_tol))
            .collect()
    }
}

/// Distance between two cycle frequencies of a real sampled signal, where
/// `alpha`, `-alpha` and `alpha + k f_s` are the same feature.
pub fn alias_distance(alpha1_hz: f64, alpha2_hz: f64, sample_rate_hz: f64) -> f64 {
    let fold = |a: f64| {
        let r = a.rem_euclid(sample_rate_hz);
        r.min(sample_rate_hz - r)
    };
    let d = (fold(alpha1_hz) - fold(alpha2_hz)).abs();
    d.min(sample_rate_hz - d)
}

/// Symmetric grid `k * step` for every integer `k` with `|k * step| <= max_hz`
/// and `|k * step| < f_s`. `step_hz = None` uses `2 F_s`, the spacing of
/// representable cycle frequencies.
pub fn alpha_grid(
    sample_rate_hz: f64,
    n: usize,
    max_hz: Option<f64>,
    step_hz: Option<f64>,
) -> Result<Vec<f64>> {
    let df = sample_rate_hz / n as f64;
    let step = step_hz.unwrap_or(2.0 * df);
    let max = max_hz.unwrap_or(sample_rate_hz);
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::config(format!("alpha step must be positive, got {step}")));
    }
    if !(max.is_finite() && max >= 0.0) {
        return Err(Error::config(format!("alpha range must be non-negative, got {max}")));
    }
    let kmax = (max / step).floor() as i64;
    Ok((-kmax..=kmax)
        .map(|k| k as f64 * step)
        .filter(|a| a.abs() < sample_rate_hz)
        .collect())
}

pub fn cycle_profile(
    signal: &SampleBuffer,
    alphas_hz: &[f64],
    window: &SmoothingWindow,
) -> Result<CycleProfile> {
    let fs = signal.sample_rate_hz();
    if let Some(a) = alphas_hz.iter().find(|a| a.is_nan() || a.abs() >= fs) {
        return Err(Error::config(format!(
            "cycle frequency {a} Hz outside (-f_s, f_s)"
        )));
    }
    let spectrum = dft(signal);
    let engine = SliceEngine::new(spectrum.n(), window)?;
    let ts = signal.sample_period_s();
    let rows = alphas_hz
        .par_iter()
        .map(|&a| {
            engine
                .slice(&spectrum, a, ts)
                .map(|s| (s.alpha_effective_hz, s.max_magnitude()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (alphas_hz, magnitudes) = rows.into_iter().unzip();
    Ok(CycleProfile {
        alphas_hz,
        magnitudes,
    })
}
