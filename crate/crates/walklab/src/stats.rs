//! Monte Carlo estimate bookkeeping: point estimates with standard errors,
//! empirical quantiles, and the two-sample Kolmogorov-Smirnov distance used
//! by distribution-equality checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("insufficient trials for quantile p={p}: need at least {needed}, got {got}")]
    InsufficientTrials { p: f64, needed: u64, got: u64 },
    #[error("quantile p must lie in (0,1), got {0}")]
    InvalidQuantile(f64),
    #[error("estimate requires at least {needed} trials, got {got}")]
    TooFewTrials { needed: u64, got: u64 },
}

/// A Monte Carlo result: point estimate, standard error, 95% CI, trial count
/// and the seed that reproduces it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub trials: u64,
    pub seed: u64,
    pub metric_tag: String,
    /// True when some trial hit its step/round/event cap, making the
    /// estimate a flagged partial result.
    pub capped: bool,
}

impl Estimate {
    /// Build an estimate from per-trial values, summed in trial order so the
    /// result is bit-identical regardless of how trials were scheduled.
    pub fn from_samples(samples: &[f64], seed: u64, metric_tag: &str) -> Self {
        assert!(!samples.is_empty(), "estimate needs at least one sample");
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            0.0
        };
        Self::from_moments(mean, stderr, samples.len() as u64, seed, metric_tag)
    }

    pub fn from_moments(mean: f64, stderr: f64, trials: u64, seed: u64, metric_tag: &str) -> Self {
        Estimate {
            mean,
            stderr,
            ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
            trials,
            seed,
            metric_tag: metric_tag.to_string(),
            capped: false,
        }
    }

    pub fn with_capped(mut self, capped: bool) -> Self {
        self.capped = capped;
        self
    }

    /// Ratio of two independent estimates with the delta-method standard
    /// error: se(x/y) ~= |x/y| * sqrt((se_x/x)^2 + (se_y/y)^2).
    pub fn ratio(num: &Estimate, den: &Estimate, metric_tag: &str) -> Estimate {
        let r = num.mean / den.mean;
        let rel = ((num.stderr / num.mean).powi(2) + (den.stderr / den.mean).powi(2)).sqrt();
        let stderr = r.abs() * rel;
        Estimate::from_moments(r, stderr, num.trials.min(den.trials), num.seed, metric_tag)
            .with_capped(num.capped || den.capped)
    }
}

/// Empirical p-quantile as the order statistic of rank ceil(p * n) (1-based).
///
/// Requires `n >= 10 / (1 - p)` samples so the upper tail is actually
/// resolved; callers asking for a 1 - 1/n quantile must budget accordingly.
pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64, StatsError> {
    if !(0.0 < p && p < 1.0) {
        return Err(StatsError::InvalidQuantile(p));
    }
    let needed = (10.0 / (1.0 - p)).ceil() as u64;
    let got = samples.len() as u64;
    if got < needed {
        return Err(StatsError::InsufficientTrials { p: 1.0 - p, needed, got });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (p * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.max(1) - 1])
}

/// Two-sample Kolmogorov-Smirnov distance, max_t |F_a(t) - F_b(t)|.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Least-squares slope and R^2 of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}
