use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cdf::c_rand_via_cdf;
use super::codebook::{isotropic_matrix, Codebook};
use super::estimate::Estimate;
use super::{labels, Mode};
use crate::error::{Error, Result};
use crate::rng;
use crate::spectra::sample_spectrum;

pub const DEFAULT_BUDGET: f64 = 1e9;

/// Largest feedback rate the enumerating estimators accept.
pub const MAX_ENUMERATED_BITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub m: usize,
    pub r_fb: u32,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Cap on `2^R * n * trials` for the enumerating estimators.
    pub budget: f64,
}

impl SimConfig {
    pub fn new(n: usize, m: usize, r_fb: u32, trials: usize, seed: u64, mode: Mode) -> Self {
        SimConfig {
            n,
            m,
            r_fb,
            trials,
            seed,
            mode,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    pub fn codebook_size(&self) -> f64 {
        (self.r_fb as f64).exp2()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::domain(format!(
                "n and m must be positive, got n={}, m={}",
                self.n, self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.r_fb > 1000 {
            return Err(Error::domain(format!("R_fb = {} is not representable", self.r_fb)));
        }
        Ok(())
    }

    fn check_enumeration(&self) -> Result<usize> {
        self.validate()?;
        let work = self.codebook_size() * self.n as f64 * self.trials as f64;
        if self.r_fb > MAX_ENUMERATED_BITS || work > self.budget {
            return Err(Error::Budget {
                work,
                budget: self.budget,
                advice: "use the CDF path (simulate_c_cdf / --method cdf), which does not enumerate codewords".into(),
            });
        }
        Ok(1usize << self.r_fb)
    }

    fn scale(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodebookSource {
    /// A fresh isotropic codebook for every channel draw.
    RandomPerTrial,
    Fixed(Codebook),
}

fn extremum(values: impl Iterator<Item = f64>, mode: Mode) -> f64 {
    // strict comparisons keep the lowest index on ties
    let mut best = match mode {
        Mode::Min => f64::INFINITY,
        Mode::Max => f64::NEG_INFINITY,
    };
    for v in values {
        let better = match mode {
            Mode::Min => v < best,
            Mode::Max => v > best,
        };
        if better {
            best = v;
        }
    }
    best
}

/// Per-trial values of `min/max_k v_k^† ((1/n) H H^†) v_k`, in trial order.
///
/// Trial `t` draws `H` and then, for [`CodebookSource::RandomPerTrial`], the
/// codebook from its own stream, so a fixed codebook sees the same channels
/// for equal seeds.
pub fn simulate_c_direct_samples(cfg: &SimConfig, source: &CodebookSource) -> Result<Vec<f64>> {
    let k = cfg.check_enumeration()?;
    let fixed = match source {
        CodebookSource::Fixed(cb) => {
            if cb.n != cfg.n || cb.len() != k {
                return Err(Error::domain(format!(
                    "codebook has {} vectors in C^{}, configuration needs {k} in C^{}",
                    cb.len(),
                    cb.n,
                    cfg.n
                )));
            }
            Some(cb.matrix().adjoint())
        }
        CodebookSource::RandomPerTrial => None,
    };
    let (n, m) = (cfg.n, cfg.m);
    let inv_n = 1.0 / n as f64;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::labelled_substream(cfg.seed, labels::TRIAL, t as u64);
            let h: DMatrix<Complex64> = DMatrix::from_fn(n, m, |_, _| rng::complex_normal(&mut r));
            let g = match &fixed {
                Some(vh) => vh * &h,
                None => isotropic_matrix(&mut r, n, k).adjoint() * &h,
            };
            let forms = g
                .row_iter()
                .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>() * inv_n);
            Ok(extremum(forms, cfg.mode))
        })
        .collect()
}

/// Direct enumeration over codewords, averaged over channel draws.
pub fn simulate_c_direct(cfg: &SimConfig, source: &CodebookSource) -> Result<Estimate> {
    Ok(Estimate::from_samples(&simulate_c_direct_samples(cfg, source)?))
}

/// Same quantity through the spectrum: per trial, eigenvalues of
/// `(1/m) H H^†` and `2^R` ratios `sum lambda_i Y_i / sum Y_i`, scaled by
/// `m/n`.
pub fn simulate_c_spectral(cfg: &SimConfig) -> Result<Estimate> {
    let k = cfg.check_enumeration()?;
    let scale = cfg.scale();
    let values: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = sample_spectrum(cfg.n, cfg.m, rng::derive_seed(cfg.seed, labels::SPECTRUM, t as u64))?;
            let mut r = rng::labelled_substream(cfg.seed, labels::TRIAL, t as u64);
            let ratios = (0..k).map(|_| {
                let (mut num, mut den) = (0.0, 0.0);
                for &l in &s.eigenvalues {
                    let y = rng::standard_exponential(&mut r);
                    num += l * y;
                    den += y;
                }
                num / den
            });
            Ok(scale * extremum(ratios, cfg.mode))
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&values))
}

/// Outer average over spectra of [`c_rand_via_cdf`], scaled by `m/n`. Any
/// `R_fb` up to 1000 bits; `samples` is the tilted-estimator size per grid
/// node.
pub fn simulate_c_cdf(cfg: &SimConfig, samples: usize) -> Result<Estimate> {
    cfg.validate()?;
    let scale = cfg.scale();
    let values: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = sample_spectrum(cfg.n, cfg.m, rng::derive_seed(cfg.seed, labels::SPECTRUM, t as u64))?;
            let tilt_seed = rng::derive_seed(cfg.seed, labels::TILT, t as u64);
            Ok(scale * c_rand_via_cdf(&s.eigenvalues, cfg.r_fb, cfg.mode, samples, tilt_seed)?)
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&values))
}
