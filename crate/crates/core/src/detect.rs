//! Sensing metrics, threshold calibration and decisions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scd::ScdSlice;
use crate::siggen::SampleBuffer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectorKind {
    CycleFeature,
    Energy,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::CycleFeature => "cycle_feature",
            DetectorKind::Energy => "energy",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle_feature" | "cycle" => Ok(DetectorKind::CycleFeature),
            "energy" => Ok(DetectorKind::Energy),
            _ => Err(Error::config(format!(
                "unknown detector '{s}', expected cycle_feature or energy"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensingMetric {
    pub value: f64,
    pub detector: DetectorKind,
    /// Only meaningful for [`DetectorKind::CycleFeature`].
    pub alpha_effective_hz: Option<f64>,
}

/// `M = max_l |S^{alpha_0}[l]|`.
pub fn cycle_metric(slice: &ScdSlice) -> Result<SensingMetric> {
    if slice.values.is_empty() {
        return Err(Error::config("cannot take a metric of an empty SCD slice"));
    }
    Ok(SensingMetric {
        value: slice.max_magnitude(),
        detector: DetectorKind::CycleFeature,
        alpha_effective_hz: Some(slice.alpha_effective_hz),
    })
}

/// `E = sum_i x(i) x*(i)`.
pub fn energy_metric(signal: &SampleBuffer) -> SensingMetric {
    SensingMetric {
        value: signal.samples().iter().map(|x| x * x).sum(),
        detector: DetectorKind::Energy,
        alpha_effective_hz: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub target_pf: f64,
    pub calibration_trials: usize,
    pub detector: DetectorKind,
}

/// Smallest calibration sample that leaves about ten points in the tail.
pub fn min_calibration_size(target_pf: f64) -> usize {
    (10.0 / target_pf - 1e-9).ceil() as usize
}

/// 1-based rank of the `(1 - target_pf)` order statistic in a sample of `k`.
pub fn quantile_rank(k: usize, target_pf: f64) -> usize {
    // The small offset keeps e.g. 0.9 * 100 = 90.00000000000001 at rank 90.
    let r = ((1.0 - target_pf) * k as f64 - 1e-9).ceil() as usize;
    r.clamp(1, k)
}

/// Empirical `(1 - target_pf)` quantile of noise-only metrics.
pub fn calibrate_threshold(
    metric_sample: &[f64],
    target_pf: f64,
    detector: DetectorKind,
) -> Result<Threshold> {
    if !(target_pf > 0.0 && target_pf < 1.0) {
        return Err(Error::config(format!(
            "target Pf must lie in (0, 1), got {target_pf}"
        )));
    }
    let required = min_calibration_size(target_pf);
    if metric_sample.len() < required {
        return Err(Error::Calibration {
            target_pf,
            required,
            got: metric_sample.len(),
        });
    }
    if let Some(m) = metric_sample.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::config(format!(
            "calibration metrics must be finite and non-negative, found {m}"
        )));
    }
    let mut sorted = metric_sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = quantile_rank(sorted.len(), target_pf);
    Ok(Threshold {
        value: sorted[rank - 1],
        target_pf,
        calibration_trials: sorted.len(),
        detector,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    H0Inactive,
    H1Active,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::H0Inactive => "H0_Inactive",
            Decision::H1Active => "H1_Active",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `H1` iff `M >= lambda`; a metric exactly on the threshold counts as a detection.
pub fn decide(metric: &SensingMetric, threshold: &Threshold) -> Result<Decision> {
    if metric.detector != threshold.detector {
        return Err(Error::DetectorMismatch {
            metric: metric.detector.name(),
            threshold: threshold.detector.name(),
        });
    }
    Ok(exceeds(metric.value, threshold.value))
}

pub(crate) fn exceeds(value: f64, threshold: f64) -> Decision {
    if value >= threshold {
        Decision::H1Active
    } else {
        Decision::H0Inactive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scd::{dft, make_window, scd_slice, WindowKind};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn thr(value: f64) -> Threshold {
        Threshold {
            value,
            target_pf: 0.1,
            calibration_trials: 100,
            detector: DetectorKind::CycleFeature,
        }
    }

    fn metric(value: f64) -> SensingMetric {
        SensingMetric {
            value,
            detector: DetectorKind::CycleFeature,
            alpha_effective_hz: Some(0.0),
        }
    }

    #[test]
    fn zero_slice_has_zero_metric() {
        let s = ScdSlice {
            values: vec![Complex64::new(0.0, 0.0); 8],
            alpha_requested_hz: 1.0,
            alpha_effective_hz: 1.0,
            scale: 1.0,
        };
        assert_eq!(cycle_metric(&s).unwrap().value, 0.0);
        let empty = ScdSlice {
            values: vec![],
            ..s
        };
        assert!(cycle_metric(&empty).is_err());
    }

    #[test]
    fn cycle_metric_is_quadratic_in_amplitude() {
        let x: Vec<f64> = (0..64).map(|k| ((k * 13 % 17) as f64 - 8.0) / 5.0).collect();
        let w = make_window(WindowKind::Hamming, 11).unwrap();
        let m = |c: f64| {
            let b = SampleBuffer::new(x.iter().map(|v| v * c).collect(), 1.0).unwrap();
            cycle_metric(&scd_slice(&dft(&b), 0.3, &w, 1.0).unwrap()).unwrap().value
        };
        let (m1, m3) = (m(1.0), m(3.0));
        assert!((m3 - 9.0 * m1).abs() <= 1e-12 * m3);
    }

    #[test]
    fn energy_metric_examples() {
        let z = SampleBuffer::new(vec![0.0; 16], 1.0).unwrap();
        assert_eq!(energy_metric(&z).value, 0.0);
        let ones = SampleBuffer::new(vec![1.0; 4096], 1.0).unwrap();
        assert_eq!(energy_metric(&ones).value, 4096.0);
    }

    #[test]
    fn energy_matches_reverse_accumulation() {
        // dyadic values make every partial sum exact, so order cannot matter
        let x: Vec<f64> = (0..1000).map(|k| ((k * 37 % 101) as f64 - 50.0) / 64.0).collect();
        let b = SampleBuffer::new(x.clone(), 1.0).unwrap();
        let mut acc = 0.0;
        for v in x.iter().rev() {
            acc += v * v;
        }
        assert_eq!(energy_metric(&b).value, acc);
    }

    #[test]
    fn calibrate_on_one_to_hundred() {
        let s: Vec<f64> = (1..=100).map(f64::from).collect();
        let t = calibrate_threshold(&s, 0.1, DetectorKind::Energy).unwrap();
        assert_eq!(t.value, 90.0);
        assert_eq!(t.calibration_trials, 100);
        let t = calibrate_threshold(&s, 0.5, DetectorKind::Energy).unwrap();
        assert_eq!(t.value, 50.0);
    }

    #[test]
    fn calibrate_rejects_small_samples() {
        let s = vec![1.0; 999];
        match calibrate_threshold(&s, 0.01, DetectorKind::Energy) {
            Err(Error::Calibration { required, got, .. }) => {
                assert_eq!((required, got), (1000, 999));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(calibrate_threshold(&s, 0.0, DetectorKind::Energy).is_err());
        assert!(calibrate_threshold(&s, 1.0, DetectorKind::Energy).is_err());
    }

    #[test]
    fn decide_examples() {
        assert_eq!(decide(&metric(0.0), &thr(1.0)).unwrap(), Decision::H0Inactive);
        assert_eq!(decide(&metric(2.0), &thr(1.0)).unwrap(), Decision::H1Active);
        assert_eq!(decide(&metric(1.0), &thr(1.0)).unwrap(), Decision::H1Active);
        let e = SensingMetric {
            detector: DetectorKind::Energy,
            ..metric(1.0)
        };
        assert!(matches!(decide(&e, &thr(1.0)), Err(Error::DetectorMismatch { .. })));
    }

    proptest! {
        #[test]
        fn threshold_non_increasing_in_pf(
            sample in prop::collection::vec(0.0f64..1e6, 100..400),
            p1 in 0.1f64..0.9,
            p2 in 0.1f64..0.9,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let a = calibrate_threshold(&sample, lo, DetectorKind::Energy).unwrap();
            let b = calibrate_threshold(&sample, hi, DetectorKind::Energy).unwrap();
            prop_assert!(b.value <= a.value);
        }

        #[test]
        fn decision_monotone_in_metric(m in 0.0f64..10.0, d in 0.0f64..10.0, l in 0.0f64..10.0) {
            if decide(&metric(m), &thr(l)).unwrap() == Decision::H1Active {
                prop_assert_eq!(decide(&metric(m + d), &thr(l)).unwrap(), Decision::H1Active);
            }
        }

        #[test]
        fn decisions_scale_equivariant(
            sample in prop::collection::vec(0.0f64..1e3, 100..200),
            test in 0.0f64..1e3,
            c in 1e-3f64..1e3,
        ) {
            let t = calibrate_threshold(&sample, 0.1, DetectorKind::CycleFeature).unwrap();
            let scaled: Vec<f64> = sample.iter().map(|v| v * c).collect();
            let ts = calibrate_threshold(&scaled, 0.1, DetectorKind::CycleFeature).unwrap();
            prop_assert_eq!(
                decide(&metric(test), &t).unwrap(),
                decide(&metric(test * c), &ts).unwrap()
            );
        }

        #[test]
        fn energy_additive_over_concatenation(
            x in prop::collection::vec(-64i32..64, 1..50),
            y in prop::collection::vec(-64i32..64, 1..50),
        ) {
            // integer-valued samples keep every sum exact
            let fx: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let fy: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let both: Vec<f64> = fx.iter().chain(&fy).copied().collect();
            let e = |v: Vec<f64>| energy_metric(&SampleBuffer::new(v, 1.0).unwrap()).value;
            prop_assert_eq!(e(both), e(fx) + e(fy));
        }
    }
}
