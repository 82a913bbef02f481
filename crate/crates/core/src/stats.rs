//! Small statistical helpers shared by the testers and studies.

/// Two-sided standard normal quantile for 99% coverage.
pub const Z_99: f64 = 2.575_829_303_548_900_4;
/// Two-sided standard normal quantile for 99.9% coverage.
pub const Z_999: f64 = 3.290_526_731_491_926;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Largest distance from the point estimate to either Wilson bound.
pub fn wilson_halfwidth(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let p = successes as f64 / trials as f64;
    let (lo, hi) = wilson_interval(successes, trials, z);
    (p - lo).max(hi - p)
}

/// Sample mean, unbiased sample variance and fourth central moment of `xs`.
///
/// Sums are taken pairwise so the result does not depend on how the input
/// was produced, only on its order.
pub fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = if xs.len() > 1 {
        pairwise_sum(&sq) / (n - 1.0)
    } else {
        0.0
    };
    let m4: Vec<f64> = sq.iter().map(|s| s * s).collect();
    (mean, var, pairwise_sum(&m4) / n)
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Falling factorial `a (a−1) ⋯ (a−t+1)`, zero when `t > a`.
pub fn falling(a: u64, t: u64) -> f64 {
    if t > a {
        return 0.0;
    }
    (0..t).map(|i| (a - i) as f64).product()
}
