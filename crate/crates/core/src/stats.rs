//! Summary statistics for Monte Carlo estimates: compensated sums,
//! streaming moments, binomial confidence intervals, distribution
//! distances, and least-squares slope fits.

use crate::error::{Error, Result};

/// Compensated (Neumaier) accumulator, robust to magnitude disparities
/// so that chunked parallel sums merge reproducibly.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Streaming mean and variance (Welford), mergeable across workers.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    /// Exact pooled combination of two disjoint sample sets.
    pub fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        let mean = a.mean + d * (b.n as f64 / n as f64);
        let m2 = a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64 / n as f64);
        Self { n, mean, m2 }
    }

    pub fn estimate(&self) -> MeanEstimate {
        MeanEstimate { mean: self.mean(), std_error: self.std_error(), n: self.n }
    }
}

/// A point estimate with its standard error and sample count.
#[derive(Clone, Copy, Debug)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One-sample Kolmogorov–Smirnov statistic of ascending `sorted` samples
/// against the analytic CDF `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs());
        sup = sup.max(((i + 1) as f64 / n - f).abs());
    }
    sup
}

/// Rigorous upper bound on sup|F_n − F| when F is known only at grid
/// points `(x_j, F(x_j))`, strictly increasing in x with F monotone.
/// Between grid points both curves are bracketed by monotonicity, so the
/// bound tightens to the true statistic as the grid refines.
pub fn ks_bound_on_grid(sorted: &[f64], grid: &[(f64, f64)]) -> f64 {
    let n = sorted.len() as f64;
    // Empirical CDF just below / at a point, via binary search.
    let below = |x: f64| sorted.partition_point(|&s| s < x) as f64 / n;
    let at = |x: f64| sorted.partition_point(|&s| s <= x) as f64 / n;
    let mut sup: f64 = 0.0;
    for (j, &(x, f)) in grid.iter().enumerate() {
        sup = sup.max((below(x) - f).abs()).max((at(x) - f).abs());
        if j + 1 < grid.len() {
            let (x2, f2) = grid[j + 1];
            // Worst mismatch inside the open segment.
            sup = sup.max(below(x2) - f).max(f2 - at(x));
        }
    }
    if let Some(&(x0, f0)) = grid.first() {
        sup = sup.max(below(x0)).max(f0);
    }
    if let Some(&(x1, f1)) = grid.last() {
        sup = sup.max(1.0 - at(x1)).max(1.0 - f1);
    }
    sup
}

/// Nearest-rank quantile of ascending `sorted` samples, q in [0, 1].
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * q.clamp(0.0, 1.0)).round() as usize;
    sorted[idx]
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("linear_fit", "need two aligned points at least"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return Err(Error::degenerate("linear_fit", "abscissa has zero spread"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

// ── Tests ────────────────────────────────────────────────────────────────
