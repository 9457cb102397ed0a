//! The conditional CDF `mu(x | lambda) = P(sum (lambda_i - x) Y_i <= 0)`
//! with `Y_i ~ Exp(1)`, by plain Monte Carlo and by exponential tilting.
//!
//! Under the tilt `exp(gamma S)` with `S = sum a_i Y_i`, `a_i = lambda_i - x`,
//! the `Y_i` stay independent exponentials with rates `1 - gamma a_i`, and the
//! likelihood ratio is `exp(-gamma S - sum log(1 - gamma a_i))` exactly.
//! Choosing `gamma` so that the tilted mean of `S` is zero puts half the
//! samples on the event. The rarer of `{S <= 0}` and `{S > 0}` is estimated
//! and the other follows by complement, so both `log mu` and `log (1 - mu)`
//! stay accurate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::labels;
use crate::error::{Error, Result};
use crate::ratefn::{self, RateContext};
use crate::rng;
use crate::roots;

/// Samples per random stream. Block `b` always draws from stream `b`, so
/// the same seed gives the same exponentials at every `x`.
pub(crate) const BLOCK: usize = 1024;
const MIN_ESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedCdfResult {
    pub x: f64,
    /// `log mu(x | lambda)`.
    pub log_prob: f64,
    /// `log (1 - mu(x | lambda))`.
    pub log_complement: f64,
    pub ess: f64,
    pub gamma: f64,
    pub samples: usize,
    /// Relative standard error of the estimated tail.
    pub rel_stderr: f64,
    /// Set when the tilt could not be solved for and `alpha*` was used.
    pub fallback: bool,
}

impl TiltedCdfResult {
    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltOptions {
    /// Aspect ratio for the `alpha*` fallback tilt.
    pub fallback_beta: Option<f64>,
    pub max_root_iter: usize,
}

impl Default for TiltOptions {
    fn default() -> Self {
        TiltOptions {
            fallback_beta: None,
            max_root_iter: 200,
        }
    }
}

/// Fraction of samples with `sum (lambda_i - x) Y_i <= 0`.
pub fn conditional_cdf_mc(lambda: &[f64], x: f64, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 || lambda.is_empty() {
        return Err(Error::domain("need at least one sample and one eigenvalue"));
    }
    let a: Vec<f64> = lambda.iter().map(|l| l - x).collect();
    let blocks = samples.div_ceil(BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::labelled_substream(seed, labels::PLAIN, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            (0..count)
                .filter(|_| a.iter().map(|ai| ai * rng::standard_exponential(&mut r)).sum::<f64>() <= 0.0)
                .count()
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}

pub fn conditional_cdf_tilted(lambda: &[f64], x: f64, samples: usize, seed: u64) -> Result<TiltedCdfResult> {
    conditional_cdf_tilted_with(lambda, x, samples, seed, &TiltOptions::default())
}

pub fn conditional_cdf_tilted_with(
    lambda: &[f64],
    x: f64,
    samples: usize,
    seed: u64,
    opts: &TiltOptions,
) -> Result<TiltedCdfResult> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let (lo, hi) = extent(lambda)?;
    if !(x > lo && x < hi) {
        return Err(Error::domain(format!(
            "x = {x} must lie strictly between min and max of lambda ({lo}, {hi})"
        )));
    }
    let a: Vec<f64> = lambda.iter().map(|l| l - x).collect();
    let drift: f64 = a.iter().sum();
    // positive drift makes {S <= 0} the rare side
    let lower = drift > 0.0;
    let oriented: Vec<f64> = if lower { a } else { a.iter().map(|v| -v).collect() };
    let fallback = || -> Option<f64> {
        let beta = opts.fallback_beta?;
        let ctx = RateContext::with_beta(beta, x).ok()?;
        let g = ratefn::alpha_star(&ctx);
        let g = if lower { g } else { -g };
        oriented.iter().all(|ai| g * ai < 1.0).then_some(g)
    };
    let (gamma, used_fallback) = match solve_tilt(&oriented, opts.max_root_iter) {
        Ok(g) => (g, false),
        Err(e) => match fallback() {
            Some(g) => (g, true),
            None => return Err(e),
        },
    };
    let t = tilted_tail(&oriented, gamma, samples, seed);
    if t.ess.is_nan() || t.ess < MIN_ESS {
        return Err(Error::Reliability {
            x,
            ess: t.ess,
            gamma: if lower { gamma } else { -gamma },
        });
    }
    let tail = t.log_tail.min(0.0);
    let other = (-tail.exp()).ln_1p();
    let (log_prob, log_complement) = if lower { (tail, other) } else { (other, tail) };
    Ok(TiltedCdfResult {
        x,
        log_prob,
        log_complement,
        ess: t.ess,
        gamma: if lower { gamma } else { -gamma },
        samples,
        rel_stderr: t.rel_stderr,
        fallback: used_fallback,
    })
}

pub(crate) fn extent(lambda: &[f64]) -> Result<(f64, f64)> {
    if lambda.is_empty() || lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::domain("lambda must be a non-empty vector of finite values"));
    }
    let lo = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Root of `sum a_i / (1 - gamma a_i) = 0` in `(1/a_min, 1/a_max)`.
fn solve_tilt(a: &[f64], max_iter: usize) -> Result<f64> {
    let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
    let amax = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = |g: f64| a.iter().map(|ai| ai / (1.0 - g * ai)).sum::<f64>();
    if h(0.0) == 0.0 {
        return Ok(0.0);
    }
    let shrink = 1.0 - 1e-12;
    let (lo, hi) = if h(0.0) > 0.0 {
        (shrink / amin, 0.0)
    } else {
        (0.0, shrink / amax)
    };
    roots::brent(h, lo, hi, 1e-14 * (1.0 / amin).abs().max(1.0 / amax), max_iter).map_err(|e| Error::Numeric {
        seed: 0,
        reason: format!("tilt equation: {e}"),
    })
}

struct Tail {
    log_tail: f64,
    ess: f64,
    rel_stderr: f64,
}

/// Importance-sampling estimate of `log P(sum a_i Y_i <= 0)` under the tilt
/// `gamma`.
fn tilted_tail(a: &[f64], gamma: f64, samples: usize, seed: u64) -> Tail {
    let rates: Vec<f64> = a.iter().map(|ai| 1.0 - gamma * ai).collect();
    let log_norm: f64 = rates.iter().map(|r| r.ln()).sum();
    let scaled: Vec<f64> = a.iter().zip(&rates).map(|(ai, r)| ai / r).collect();
    let blocks = samples.div_ceil(BLOCK);
    let weights: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::labelled_substream(seed, labels::TILT, b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut out = Vec::new();
            for _ in 0..count {
                let s: f64 = scaled.iter().map(|c| c * rng::standard_exponential(&mut r)).sum();
                if s <= 0.0 {
                    out.push(-gamma * s - log_norm);
                }
            }
            out
        })
        .collect();
    let top = weights.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Tail {
            log_tail: f64::NEG_INFINITY,
            ess: 0.0,
            rel_stderr: f64::INFINITY,
        };
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for lw in weights.iter().flatten() {
        let w = (lw - top).exp();
        s1 += w;
        s2 += w * w;
    }
    let n = samples as f64;
    let rel_var = if samples > 1 {
        ((n * s2 / (s1 * s1) - 1.0) / (n - 1.0)).max(0.0)
    } else {
        f64::INFINITY
    };
    Tail {
        log_tail: top + s1.ln() - n.ln(),
        ess: s1 * s1 / s2,
        rel_stderr: rel_var.sqrt(),
    }
}
