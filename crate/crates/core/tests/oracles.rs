//! Fast paths against brute-force evaluation, plus algebraic properties of
//! the estimator.

mod common;

use common::{cosine, random_buffer, rel_err};
use proptest::prelude::*;

use cyclosense::scd::naive::naive_dft;
use cyclosense::scd::{
    alias_distance, alpha_grid, cycle_profile, dft, make_window, scd_slice, scd_slice_naive,
    WindowKind,
};
use cyclosense::siggen::{
    add_awgn, generate_am, generate_bpsk, noise_only, ChannelSpec, ModulationSpec, SampleBuffer,
};

fn window_strategy() -> impl Strategy<Value = (WindowKind, usize)> {
    (
        prop_oneof![Just(WindowKind::Hamming), Just(WindowKind::Rectangular)],
        prop_oneof![Just(1usize), Just(5), Just(31)],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fast_slice_matches_naive(
        n in prop_oneof![Just(16usize), Just(64), Just(256)],
        (kind, len) in window_strategy(),
        fs in 1.0f64..1e7,
        aligned in any::<bool>(),
        a in -200i64..200,
        frac in -0.999f64..0.999,
        seed in any::<u64>(),
    ) {
        prop_assume!(len < n);
        let df = fs / n as f64;
        let alpha = if aligned {
            2.0 * (a % n as i64) as f64 * df
        } else {
            frac * fs
        };
        let buf = random_buffer(n, fs, seed);
        let w = make_window(kind, len).unwrap();
        let fast = scd_slice(&dft(&buf), alpha, &w, buf.sample_period_s()).unwrap();
        let slow = scd_slice_naive(&buf, alpha, &w).unwrap();
        // F_s is fs/N on one side and 1/(N T_s) on the other; allow for the rounding
        prop_assert!((fast.alpha_effective_hz - slow.alpha_effective_hz).abs() <= 1e-12 * fs);
        prop_assert!((fast.scale - slow.scale).abs() <= 1e-12 * slow.scale);
        let e = rel_err(&fast.values, &slow.values);
        prop_assert!(e <= 1e-9, "relative error {e}");
    }

    #[test]
    fn fast_dft_matches_naive(log2n in 0u32..=10, seed in any::<u64>()) {
        let buf = random_buffer(1 << log2n, 1.0, seed);
        let e = rel_err(dft(&buf).bins(), &naive_dft(buf.samples()));
        prop_assert!(e <= 1e-9, "relative error {e}");
    }

    #[test]
    fn fallback_dft_matches_naive(n in 3usize..200, seed in any::<u64>()) {
        let buf = random_buffer(n, 1.0, seed);
        let e = rel_err(dft(&buf).bins(), &naive_dft(buf.samples()));
        prop_assert!(e <= 1e-9, "relative error {e}");
    }

    #[test]
    fn parseval(log2n in 0u32..=12, seed in any::<u64>()) {
        let buf = random_buffer(1 << log2n, 1.0, seed);
        let n = buf.len() as f64;
        let time: f64 = buf.samples().iter().map(|x| x * x).sum();
        let freq: f64 = dft(&buf).bins().iter().map(|c| c.norm_sqr()).sum::<f64>() / n;
        prop_assert!((time - freq).abs() <= 1e-9 * time);
    }

    #[test]
    fn slice_is_quadratic_in_amplitude(
        seed in any::<u64>(),
        shift in -8i32..8,
        c in 0.01f64..100.0,
        alpha in -0.9f64..0.9,
    ) {
        let buf = random_buffer(128, 1.0, seed);
        let w = make_window(WindowKind::Hamming, 31).unwrap();
        let s1 = scd_slice(&dft(&buf), alpha, &w, 1.0).unwrap();
        // power-of-two factors commute exactly with every rounding step
        let p = 2f64.powi(shift);
        let sp = scd_slice(&dft(&buf.scaled(p).unwrap()), alpha, &w, 1.0).unwrap();
        for (a, b) in s1.values.iter().zip(&sp.values) {
            prop_assert_eq!(*a * (p * p), *b);
        }
        let sc = scd_slice(&dft(&buf.scaled(c).unwrap()), alpha, &w, 1.0).unwrap();
        let want: Vec<_> = s1.values.iter().map(|v| v * (c * c)).collect();
        prop_assert!(rel_err(&sc.values, &want) <= 1e-12);
    }

    #[test]
    fn profile_is_even_and_fs_periodic(seed in any::<u64>()) {
        let n = 128;
        let buf = random_buffer(n, 1.0, seed);
        let w = make_window(WindowKind::Hamming, 9).unwrap();
        let grid = alpha_grid(1.0, n, None, None).unwrap();
        let prof = cycle_profile(&buf, &grid, &w).unwrap();
        let mid = prof.len() / 2;
        prop_assert_eq!(prof.alphas_hz[mid], 0.0);
        let top = prof.magnitudes.iter().cloned().fold(0.0, f64::max);
        for i in 1..=mid {
            // I(alpha) = I(-alpha)
            prop_assert!((prof.magnitudes[mid + i] - prof.magnitudes[mid - i]).abs() <= 1e-9 * top);
        }
        for i in 1..n / 2 {
            // I(alpha) = I(f_s - alpha); the grid step is 2 f_s / N
            let j = mid + n / 2 - i;
            prop_assert!((prof.magnitudes[mid + i] - prof.magnitudes[j]).abs() <= 1e-9 * top);
        }
    }
}

#[test]
fn alpha_zero_rectangular_one_is_scaled_periodogram() {
    let buf = random_buffer(64, 2.0, 3);
    let w = make_window(WindowKind::Rectangular, 1).unwrap();
    let s = scd_slice(&dft(&buf), 0.0, &w, buf.sample_period_s()).unwrap();
    let x = naive_dft(buf.samples());
    for (v, xb) in s.values.iter().zip(&x) {
        let want = s.scale * xb.norm_sqr();
        assert!((v.re - want).abs() <= 1e-9 * want.max(1.0));
        assert!(v.im.abs() <= 1e-9 * want.max(1.0));
    }
}

#[test]
fn sixteen_point_cosine_feature() {
    // cosine at bin 4 of 16, alpha = 2 * 4 F_s, L = 1: peak scale * (N/2)^2 at l = 0
    let n = 16;
    let buf = cosine(n, 4, 1.0);
    let w = make_window(WindowKind::Rectangular, 1).unwrap();
    let s = scd_slice(&dft(&buf), 8.0 / n as f64, &w, 1.0).unwrap();
    let want = s.scale * 64.0;
    assert!((s.values[0].norm() - want).abs() < 1e-9);
    assert!((s.max_magnitude() - want).abs() < 1e-9);
    let naive = scd_slice_naive(&buf, 8.0 / n as f64, &w).unwrap();
    assert!(rel_err(&s.values, &naive.values) < 1e-9);
}

#[test]
fn tone_feature_is_at_twice_its_frequency() {
    let (n, fs) = (256, 1024.0);
    let w = make_window(WindowKind::Hamming, 5).unwrap();
    let grid = alpha_grid(fs, n, None, None).unwrap();
    for bin in [5usize, 17, 40, 90, 120] {
        let f0 = bin as f64 * fs / n as f64;
        let prof = cycle_profile(&cosine(n, bin, fs), &grid, &w).unwrap();
        // brute-force scan of the grid
        let top = prof
            .alphas_hz
            .iter()
            .zip(&prof.magnitudes)
            .filter(|(a, _)| **a > 0.0)
            .map(|(_, m)| *m)
            .fold(0.0, f64::max);
        let winners: Vec<f64> = prof
            .alphas_hz
            .iter()
            .zip(&prof.magnitudes)
            .filter(|(a, m)| **a > 0.0 && **m >= top * (1.0 - 1e-9))
            .map(|(a, _)| *a)
            .collect();
        assert!(winners.contains(&(2.0 * f0)), "bin {bin}: {winners:?}");
        for a in winners {
            assert_eq!(alias_distance(a, 2.0 * f0, fs), 0.0, "bin {bin}: {a}");
        }
    }
}

#[test]
fn modulated_profiles_peak_at_twice_the_carrier() {
    let (n, fs) = (4096, 3e6);
    let w = make_window(WindowKind::Hamming, 1301).unwrap();
    let grid = alpha_grid(fs, n, None, None).unwrap();
    let step = 2.0 * fs / n as f64;
    for spec in [ModulationSpec::table1_am(), ModulationSpec::table1_bpsk()] {
        let x = match spec.kind {
            cyclosense::siggen::ModulationKind::Am => generate_am(&spec, n, fs, 1).unwrap(),
            cyclosense::siggen::ModulationKind::Bpsk => generate_bpsk(&spec, n, fs, 1).unwrap(),
        };
        let prof = cycle_profile(&x, &grid, &w).unwrap();
        let winners = prof.co_maximizers_positive(1e-9);
        assert!(
            winners
                .iter()
                .any(|&i| (prof.alphas_hz[i] - 2e6).abs() <= step),
            "{:?}: {:?}",
            spec.kind,
            winners.iter().map(|&i| prof.alphas_hz[i]).collect::<Vec<_>>()
        );
        for i in winners {
            assert!(alias_distance(prof.alphas_hz[i], 2e6, fs) <= step);
        }
    }
}

#[test]
fn noise_features_are_weaker_off_zero_alpha() {
    let (n, fs) = (4096, 3e6);
    let w = make_window(WindowKind::Hamming, 1301).unwrap();
    let mut at_alpha0 = Vec::new();
    let mut at_zero = Vec::new();
    for seed in 0..100 {
        let b = noise_only(n, 1.0, fs, seed).unwrap();
        let s = dft(&b);
        at_alpha0.push(scd_slice(&s, 2e6, &w, b.sample_period_s()).unwrap().max_magnitude());
        at_zero.push(scd_slice(&s, 0.0, &w, b.sample_period_s()).unwrap().max_magnitude());
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        (v[49] + v[50]) / 2.0
    };
    assert!(median(&mut at_alpha0) < median(&mut at_zero));
}

#[test]
fn noisy_am_still_peaks_at_twice_the_carrier() {
    let (n, fs) = (4096, 3e6);
    let x = generate_am(&ModulationSpec::table1_am(), n, fs, 4).unwrap();
    let y: SampleBuffer = add_awgn(&x, ChannelSpec { snr_db: 0.0, seed: 5 }).unwrap();
    let w = make_window(WindowKind::Hamming, 1301).unwrap();
    let grid = alpha_grid(fs, n, None, None).unwrap();
    let prof = cycle_profile(&y, &grid, &w).unwrap();
    let p = prof.peak_positive().unwrap();
    assert!(alias_distance(prof.alphas_hz[p], 2e6, fs) <= 2.0 * fs / n as f64);
}
