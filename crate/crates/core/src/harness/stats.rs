use statrs::distribution::{Binomial, DiscreteCDF};

/// Central `confidence` interval, in counts, of `Binomial(trials, p)`:
/// `[Q(a), Q(1 - a)]` with `a = (1 - confidence) / 2` and `Q` the
/// smallest count whose CDF reaches the level.
pub fn binomial_count_interval(trials: u64, p: f64, confidence: f64) -> (u64, u64) {
    let b = Binomial::new(p, trials).expect("p in [0, 1]");
    let a = (1.0 - confidence) / 2.0;
    (b.inverse_cdf(a), b.inverse_cdf(1.0 - a))
}

/// Same interval expressed as rates.
pub fn binomial_rate_interval(trials: u64, p: f64, confidence: f64) -> (f64, f64) {
    let (lo, hi) = binomial_count_interval(trials, p, confidence);
    (lo as f64 / trials as f64, hi as f64 / trials as f64)
}

/// Normal-approximation standard error of a rate estimated from `trials`.
pub fn rate_std_error(rate: f64, trials: u64) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}
