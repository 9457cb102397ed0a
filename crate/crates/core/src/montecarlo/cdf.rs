//! Codebook statistics through the conditional CDF `mu(x | lambda)`, without
//! enumerating the `2^R` codewords.
//!
//! With `K = 2^R` independent isotropic codewords,
//!
//! ```text
//! E[min | lambda] = lambda_min + ∫ (1 - mu(x))^K dx
//! E[max | lambda] = lambda_min + ∫ (1 - mu(x)^K) dx
//! ```
//!
//! over `[lambda_min, lambda_max]`. For every codebook of size `K`,
//! `c_min >= x^- - K ∫_{lambda_min}^{x^-} mu dx` with `mu(x^-) = 1/K`, and
//! `c_max <= x^+ + K ∫_{x^+}^{lambda_max} (1 - mu) dx` with
//! `1 - mu(x^+) = 1/K`.

use std::f64::consts::LN_2;

use super::tilted::{conditional_cdf_tilted, extent};
use super::Mode;
use crate::error::{Error, Result};

/// Adaptive trapezoid grid: `initial` uniform nodes, then any interval whose
/// integrand values differ by more than `max_jump` is bisected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub initial: usize,
    pub max_jump: f64,
    pub max_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            initial: 64,
            max_jump: 0.2,
            max_nodes: 4096,
        }
    }
}

/// `log mu` and `log (1 - mu)` at `x`, exact at the ends of the spectrum.
fn log_cdf(lambda: &[f64], lo: f64, hi: f64, x: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if x <= lo {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if x >= hi {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let t = conditional_cdf_tilted(lambda, x, samples, seed)?;
    Ok((t.log_prob, t.log_complement))
}

/// `K log(1 - p)` given `log p` and `log(1 - p)`, keeping precision when
/// `p` is tiny and `K` huge.
fn k_log_complement(log_k: f64, log_p: f64, log_q: f64) -> f64 {
    if log_p < -30.0 {
        -(log_k + log_p).exp()
    } else {
        log_k.exp() * log_q
    }
}

fn integrate_adaptive<F>(a: f64, b: f64, grid: &GridConfig, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b <= a {
        return Ok(0.0);
    }
    let n0 = grid.initial.max(2);
    let mut xs: Vec<f64> = (0..n0).map(|i| a + (b - a) * i as f64 / (n0 - 1) as f64).collect();
    xs[n0 - 1] = b;
    let mut fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    loop {
        let mut nx = Vec::with_capacity(xs.len() * 2);
        let mut nf = Vec::with_capacity(xs.len() * 2);
        let mut refined = false;
        for i in 0..xs.len() - 1 {
            nx.push(xs[i]);
            nf.push(fs[i]);
            let mid = 0.5 * (xs[i] + xs[i + 1]);
            if (fs[i + 1] - fs[i]).abs() > grid.max_jump && mid > xs[i] && mid < xs[i + 1] {
                nx.push(mid);
                nf.push(f(mid)?);
                refined = true;
            }
        }
        nx.push(xs[xs.len() - 1]);
        nf.push(fs[fs.len() - 1]);
        xs = nx;
        fs = nf;
        if !refined {
            break;
        }
        if xs.len() > grid.max_nodes {
            return Err(Error::GridBudget {
                max_nodes: grid.max_nodes,
            });
        }
    }
    Ok(xs
        .windows(2)
        .zip(fs.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum())
}

/// `E[min_k or max_k of v_k^† Λ v_k | lambda]` for `2^R` isotropic codewords,
/// conditional on the spectrum and before any outer scaling.
pub fn c_rand_via_cdf(lambda: &[f64], r_fb: u32, mode: Mode, samples: usize, seed: u64) -> Result<f64> {
    c_rand_via_cdf_with(lambda, r_fb, mode, samples, seed, &GridConfig::default())
}

pub fn c_rand_via_cdf_with(
    lambda: &[f64],
    r_fb: u32,
    mode: Mode,
    samples: usize,
    seed: u64,
    grid: &GridConfig,
) -> Result<f64> {
    let (lo, hi) = extent(lambda)?;
    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
        return Ok(lo);
    }
    let log_k = r_fb as f64 * LN_2;
    let integral = integrate_adaptive(lo, hi, grid, |x| {
        let (lp, lq) = log_cdf(lambda, lo, hi, x, samples, seed)?;
        Ok(match mode {
            Mode::Min => k_log_complement(log_k, lp, lq).exp(),
            Mode::Max => -k_log_complement(log_k, lq, lp).exp_m1(),
        })
    })?;
    Ok(lo + integral)
}

/// Solves `log mu(x) = level` (`Mode::Min`) or `log(1 - mu(x)) = level`
/// (`Mode::Max`) by bisection, stopping once the residual is within the
/// estimator's relative error.
pub fn quantile_x_n_log(lambda: &[f64], level: f64, tail: Mode, samples: usize, seed: u64) -> Result<f64> {
    let (lo, hi) = extent(lambda)?;
    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
        return Err(Error::domain("lambda needs at least two distinct values"));
    }
    if level.is_nan() || level >= 0.0 {
        return Err(Error::domain(format!("log level must be negative, got {level}")));
    }
    // g increases with x on both tails
    let g = |x: f64| -> Result<(f64, f64)> {
        let t = conditional_cdf_tilted(lambda, x, samples, seed)?;
        Ok(match tail {
            Mode::Min => (t.log_prob - level, t.rel_stderr),
            Mode::Max => (level - t.log_complement, t.rel_stderr),
        })
    };
    let (mut a, mut b) = (lo, hi);
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || b - a <= 1e-13 * (hi - lo) {
            break;
        }
        let (v, err) = g(mid)?;
        if v.abs() <= err {
            break;
        }
        if v < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(mid)
}

/// `x_p` with `mu(x_p | lambda) = p`.
pub fn quantile_x_n(lambda: &[f64], p: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    if p <= 0.5 {
        quantile_x_n_log(lambda, p.ln(), Mode::Min, samples, seed)
    } else {
        quantile_x_n_log(lambda, (-p).ln_1p(), Mode::Max, samples, seed)
    }
}

/// Lower bound on `c_min` (`Mode::Min`) or upper bound on `c_max`
/// (`Mode::Max`) that holds for every codebook of `2^R` vectors, given the
/// spectrum.
pub fn uniform_codebook_bound(lambda: &[f64], r_fb: u32, mode: Mode, samples: usize, seed: u64) -> Result<f64> {
    let (lo, hi) = extent(lambda)?;
    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
        return Err(Error::domain("lambda needs at least two distinct values"));
    }
    let grid = GridConfig::default();
    let log_k = r_fb as f64 * LN_2;
    let level = -log_k;
    match mode {
        Mode::Min => {
            let xq = if r_fb == 0 {
                hi
            } else {
                quantile_x_n_log(lambda, level, Mode::Min, samples, seed)?
            };
            let area = integrate_adaptive(lo, xq, &grid, |x| {
                let (lp, _) = log_cdf(lambda, lo, hi, x, samples, seed)?;
                Ok((log_k + lp).exp().min(1.0))
            })?;
            Ok(xq - area)
        }
        Mode::Max => {
            let xq = if r_fb == 0 {
                lo
            } else {
                quantile_x_n_log(lambda, level, Mode::Max, samples, seed)?
            };
            let area = integrate_adaptive(xq, hi, &grid, |x| {
                let (_, lq) = log_cdf(lambda, lo, hi, x, samples, seed)?;
                Ok((log_k + lq).exp().min(1.0))
            })?;
            Ok(xq + area)
        }
    }
}
