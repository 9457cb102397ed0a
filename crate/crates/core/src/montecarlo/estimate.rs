use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// `sqrt(s^2 / samples)` with the unbiased sample variance; infinite for
    /// a single sample.
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Welford pass over `values` in order.
    pub fn from_samples(values: &[f64]) -> Self {
        let mut acc = Welford::default();
        for &v in values {
            acc.push(v);
        }
        acc.estimate()
    }

    /// `|a - b|` in units of the combined standard error.
    pub fn z_distance(&self, other: &Estimate) -> f64 {
        (self.mean - other.mean).abs() / self.stderr.hypot(other.stderr)
    }

    pub fn rel_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::INFINITY
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let stderr = if self.count < 2 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        };
        Estimate {
            mean: self.mean,
            stderr,
            samples: self.count,
        }
    }
}
