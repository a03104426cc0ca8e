//! Contamination-robust location estimators and their confidence radii.
//!
//! Both robust means sort a private copy of the sample; callers that keep a
//! sorted copy around (the policies do) can use the `*_sorted` entry points.
//!
//! Index conventions:
//!
//! - the α-trimmed mean drops `cut = ceil(α·n)` points from each end and
//!   averages the remaining `n − 2·cut` points;
//! - the α-shorth mean averages the shortest window of exactly
//!   `floor((1 − α)·n)` consecutive order statistics.
//!
//! Both counts are computed with a `1e-9` slack so that e.g. `0.1 · 30` is
//! treated as exactly 3.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const COUNT_SLACK: f64 = 1e-9;

/// Number of points removed from each end by the α-trimmed mean.
pub fn trim_count(n: usize, alpha: f64) -> usize {
    (alpha * n as f64 - COUNT_SLACK).ceil().max(0.0) as usize
}

/// Window length used by the α-shorth mean.
pub fn shorth_window(n: usize, alpha: f64) -> usize {
    ((1.0 - alpha) * n as f64 + COUNT_SLACK).floor().max(0.0) as usize
}

/// Arithmetic mean.
pub fn mean(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return domain("mean of an empty sample");
    }
    Ok(sample.iter().sum::<f64>() / sample.len() as f64)
}

fn sorted_copy(sample: &[f64]) -> Vec<f64> {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// α-trimmed mean of an unsorted sample.
pub fn trimmed_mean(sample: &[f64], alpha: f64) -> Result<f64> {
    if sample.is_empty() {
        return domain("trimmed mean of an empty sample");
    }
    trimmed_mean_sorted(&sorted_copy(sample), alpha)
}

/// α-trimmed mean of an ascending sample.
pub fn trimmed_mean_sorted(sorted: &[f64], alpha: f64) -> Result<f64> {
    let n = sorted.len();
    if n == 0 {
        return domain("trimmed mean of an empty sample");
    }
    if !(0.0..0.5).contains(&alpha) {
        return domain(format!("trim fraction {alpha} outside [0, 1/2)"));
    }
    let cut = trim_count(n, alpha);
    if 2 * cut >= n {
        return domain(format!(
            "trimming {cut} points from each end of a sample of {n} leaves nothing"
        ));
    }
    mean(&sorted[cut..n - cut])
}

/// α-shorth mean of an unsorted sample. `rng` breaks ties between windows of
/// equal width and is only consulted when such a tie exists.
pub fn shorth_mean<R: Rng + ?Sized>(sample: &[f64], alpha: f64, rng: &mut R) -> Result<f64> {
    if sample.is_empty() {
        return domain("shorth mean of an empty sample");
    }
    shorth_mean_sorted(&sorted_copy(sample), alpha, rng)
}

/// α-shorth mean of an ascending sample.
pub fn shorth_mean_sorted<R: Rng + ?Sized>(sorted: &[f64], alpha: f64, rng: &mut R) -> Result<f64> {
    let n = sorted.len();
    if n == 0 {
        return domain("shorth mean of an empty sample");
    }
    if !(0.0..1.0).contains(&alpha) {
        return domain(format!("shorth fraction {alpha} outside [0, 1)"));
    }
    let w = shorth_window(n, alpha);
    if w == 0 {
        return domain(format!("shorth window is empty for n = {n}, alpha = {alpha}"));
    }

    let mut best = f64::INFINITY;
    let mut starts: Vec<usize> = Vec::new();
    for k in 0..=n - w {
        let width = sorted[k + w - 1] - sorted[k];
        if width < best {
            best = width;
            starts.clear();
            starts.push(k);
        } else if width == best {
            starts.push(k);
        }
    }
    let start = if starts.len() == 1 {
        starts[0]
    } else {
        starts[rng.random_range(0..starts.len())]
    };
    mean(&sorted[start..start + w])
}

/// Empirical median; the mean of the two middle order statistics for even `n`.
pub fn empirical_median(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return domain("median of an empty sample");
    }
    Ok(median_sorted(&sorted_copy(sample)))
}

/// Median of a non-empty ascending sample.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn check_radius_args(n: usize, t: usize, alpha: f64, alpha_limit: f64, sigma: f64) -> Result<()> {
    if n == 0 {
        return domain("radius needs n >= 1");
    }
    if t < n {
        return domain(format!("radius needs t >= n (t = {t}, n = {n})"));
    }
    if t < 2 {
        return domain("radius needs t >= 2 so that log t > 0");
    }
    if !(alpha >= 0.0 && alpha < alpha_limit) {
        return domain(format!("alpha = {alpha} outside [0, {alpha_limit})"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return domain(format!("sigma = {sigma} must be positive and finite"));
    }
    Ok(())
}

/// Confidence radius of the α-trimmed mean over `n` points at round `t`:
/// `σ/(1−2α) · (√(4 ln t / n) + 4α √(6 ln t))`, valid for `α < 1/2`.
pub fn trimmed_radius(n: usize, t: usize, alpha: f64, sigma: f64) -> Result<f64> {
    check_radius_args(n, t, alpha, 0.5, sigma)?;
    let log_t = (t as f64).ln();
    let spread = (4.0 * log_t / n as f64).sqrt();
    let bias = 4.0 * alpha * (6.0 * log_t).sqrt();
    Ok(sigma / (1.0 - 2.0 * alpha) * (spread + bias))
}

/// Confidence radius of the α-shorth mean over `n` points at round `t`:
/// `σ/(1−2α) · √(4 ln t / n) + (6α − 8α²)σ/((1−2α)(1−α)) · √(6 ln t)`,
/// valid for `α < 1/3`.
pub fn shorth_radius(n: usize, t: usize, alpha: f64, sigma: f64) -> Result<f64> {
    check_radius_args(n, t, alpha, 1.0 / 3.0, sigma)?;
    let log_t = (t as f64).ln();
    let spread = sigma / (1.0 - 2.0 * alpha) * (4.0 * log_t / n as f64).sqrt();
    let bias = (6.0 * alpha - 8.0 * alpha * alpha) * sigma / ((1.0 - 2.0 * alpha) * (1.0 - alpha))
        * (6.0 * log_t).sqrt();
    Ok(spread + bias)
}

/// The two robust means, for callers that switch between them at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobustMean {
    Trimmed,
    Shorth,
}

impl RobustMean {
    /// Exclusive upper limit on α for which the radius holds.
    pub fn alpha_limit(self) -> f64 {
        match self {
            RobustMean::Trimmed => 0.5,
            RobustMean::Shorth => 1.0 / 3.0,
        }
    }

    pub fn estimate<R: Rng + ?Sized>(self, sample: &[f64], alpha: f64, rng: &mut R) -> Result<f64> {
        match self {
            RobustMean::Trimmed => trimmed_mean(sample, alpha),
            RobustMean::Shorth => shorth_mean(sample, alpha, rng),
        }
    }

    pub fn estimate_sorted<R: Rng + ?Sized>(
        self,
        sorted: &[f64],
        alpha: f64,
        rng: &mut R,
    ) -> Result<f64> {
        match self {
            RobustMean::Trimmed => trimmed_mean_sorted(sorted, alpha),
            RobustMean::Shorth => shorth_mean_sorted(sorted, alpha, rng),
        }
    }

    /// Whether the estimate is defined for a sample of `n` points.
    pub fn defined_for(self, n: usize, alpha: f64) -> bool {
        match self {
            RobustMean::Trimmed => n > 2 * trim_count(n, alpha),
            RobustMean::Shorth => shorth_window(n, alpha) >= 1,
        }
    }

    pub fn radius(self, n: usize, t: usize, alpha: f64, sigma: f64) -> Result<f64> {
        match self {
            RobustMean::Trimmed => trimmed_radius(n, t, alpha, sigma),
            RobustMean::Shorth => shorth_radius(n, t, alpha, sigma),
        }
    }
}
