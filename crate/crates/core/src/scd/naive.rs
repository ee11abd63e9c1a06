//! Reference SCD evaluation by explicit summation.
//!
//! Shares only the type definitions with the fast path: the DFT is the
//! textbook double loop and the smoothing sum is written out term by term.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ScdSlice, SmoothingWindow};
use crate::error::{Error, Result};
use crate::siggen::SampleBuffer;

/// `X[v] = sum_k x[k] exp(-i 2 pi v k / N)`, O(N^2).
pub fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &xk) in x.iter().enumerate() {
            // reduce v*k mod N before converting, to keep the angle small
            let phase = -2.0 * PI * ((v * k) % n) as f64 / n as f64;
            re += xk * phase.cos();
            im += xk * phase.sin();
        }
        out.push(Complex64::new(re, im));
    }
    out
}

/// Same estimate as [`super::scd_slice`], by brute force. Cost is
/// O(N^2 + N L); keep `N` at a few thousand or below.
pub fn scd_slice_naive(
    signal: &SampleBuffer,
    alpha_hz: f64,
    window: &SmoothingWindow,
) -> Result<ScdSlice> {
    let n = signal.len();
    let len = window.weights().len();
    if len >= n {
        return Err(Error::config(format!(
            "smoothing length {len} must be below the transform length {n}"
        )));
    }
    let ts = 1.0 / signal.sample_rate_hz();
    let big_f = 1.0 / (n as f64 * ts);
    let a = (alpha_hz / (2.0 * big_f)).round() as i64;
    let x = naive_dft(signal.samples());
    let scale = 1.0 / ((n.max(2) - 1) as f64 * ts);
    let h = ((len - 1) / 2) as i64;
    let ni = n as i64;

    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (l, out) in values.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in -h..=h {
            let up = (l as i64 + a + v).rem_euclid(ni) as usize;
            let down = (l as i64 - a + v).rem_euclid(ni) as usize;
            let w = window.weights()[(v + h) as usize];
            acc += x[up] * x[down].conj() * w;
        }
        *out = acc * (scale / len as f64);
    }
    Ok(ScdSlice {
        values,
        alpha_requested_hz: alpha_hz,
        alpha_effective_hz: 2.0 * a as f64 * big_f,
        scale,
    })
}
