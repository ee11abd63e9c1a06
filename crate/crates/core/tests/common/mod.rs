#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclosense::siggen::SampleBuffer;

pub fn random_buffer(n: usize, sample_rate_hz: f64, seed: u64) -> SampleBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleBuffer::new(
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        sample_rate_hz,
    )
    .unwrap()
}

/// `max |a - b| / max |b|`, or the absolute error when `b` is identically zero.
pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn cosine(n: usize, bin: usize, sample_rate_hz: f64) -> SampleBuffer {
    SampleBuffer::new(
        (0..n)
            .map(|k| (2.0 * std::f64::consts::PI * (bin * k % n) as f64 / n as f64).cos())
            .collect(),
        sample_rate_hz,
    )
    .unwrap()
}
