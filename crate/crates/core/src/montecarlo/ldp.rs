use serde::{Deserialize, Serialize};

use super::labels;
use super::tilted::conditional_cdf_tilted;
use crate::error::{Error, Result};
use crate::rng;
use crate::spectra::{mp_law, sample_spectrum};

/// Empirical rate `-(1/n) log mu(x | lambda)` for one sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdpPoint {
    pub n: usize,
    pub m: usize,
    pub rate: f64,
    pub ess: f64,
}

/// One spectrum per `n` with `m = round(n / beta)`, and the tilted tail
/// estimate at `x`. Below the mean the lower tail `mu(x)` is used, above it
/// the upper tail `1 - mu(x)`.
pub fn ldp_rate_estimate(beta: f64, x: f64, n_list: &[usize], samples: usize, seed: u64) -> Result<Vec<LdpPoint>> {
    let law = mp_law(beta)?;
    if !(x > law.lambda_t_minus && x < law.lambda_plus) || x == 1.0 {
        return Err(Error::domain(format!(
            "x = {x} must lie in ({}, 1) or (1, {})",
            law.lambda_t_minus, law.lambda_plus
        )));
    }
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::domain("n must be positive"));
            }
            let m = ((n as f64 / beta).round() as usize).max(1);
            let s = sample_spectrum(n, m, rng::derive_seed(seed, labels::SPECTRUM, n as u64))?;
            let t = conditional_cdf_tilted(
                &s.eigenvalues,
                x,
                samples,
                rng::derive_seed(seed, labels::TILT, n as u64),
            )?;
            let log_tail = if x < 1.0 { t.log_prob } else { t.log_complement };
            Ok(LdpPoint {
                n,
                m,
                rate: -log_tail / n as f64,
                ess: t.ess,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratefn::{psi_star_zero, RateContext};

    #[test]
    fn rate_at_n200_matches_limit() {
        let limit = psi_star_zero(&RateContext::with_beta(1.0, 0.5).unwrap()).unwrap().value;
        let p = ldp_rate_estimate(1.0, 0.5, &[200], 4000, 3).unwrap();
        assert!((p[0].rate - limit).abs() / limit < 0.1, "{:?} vs {limit}", p[0]);
    }

    #[test]
    fn rate_vanishes_at_the_mean() {
        let p = ldp_rate_estimate(1.0, 1.0 - 1e-6, &[200], 4000, 3).unwrap();
        assert!(p[0].rate.abs() < 0.01, "{:?}", p[0]);
    }

    #[test]
    fn rate_decreases_toward_the_mean() {
        let a = ldp_rate_estimate(1.0, 0.3, &[200], 4000, 3).unwrap()[0].rate;
        let b = ldp_rate_estimate(1.0, 0.7, &[200], 4000, 3).unwrap()[0].rate;
        assert!(a > b, "{a} <= {b}");
    }

    #[test]
    fn upper_tail_and_domain() {
        let limit = psi_star_zero(&RateContext::with_beta(0.5, 2.0).unwrap()).unwrap().value;
        let p = ldp_rate_estimate(0.5, 2.0, &[100, 300], 4000, 8).unwrap();
        assert_eq!(p[0].m, 200);
        assert!((p[1].rate - limit).abs() / limit < 0.15, "{p:?} vs {limit}");
        assert!(ldp_rate_estimate(1.0, 1.0, &[10], 100, 1).is_err());
        assert!(ldp_rate_estimate(1.0, 5.0, &[10], 100, 1).is_err());
    }
}
