//! Asymptotic limits `x_r^-` and `x_r^+`.
//!
//! Both solve `psi_x*(0) = r log 2`, below and above the spectral mean 1.
//! Inside the bulk this reduces to `x e^{1-x} = 2^{-beta r}`; once the
//! maximizing tilt sits on an endpoint of its interval the solution is
//! explicit. The thresholds `r_min` (only for `beta < 1`) and `r_max` mark
//! the switch.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::ratefn::{self, RateContext};
use crate::roots;
use crate::spectra::{mp_law, MpLaw, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Explicit,
    FixedPoint,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Explicit => "explicit",
            Branch::FixedPoint => "fixed_point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub beta: f64,
    pub r: f64,
    pub x_r_minus: f64,
    pub x_r_plus: f64,
    pub c_min_limit: f64,
    pub c_max_limit: f64,
    pub r_min: Option<f64>,
    pub r_max: f64,
    pub branch_minus: Branch,
    pub branch_plus: Branch,
    /// `|psi*_{x}(0) - r log 2|` at `x_r^-` and `x_r^+`.
    pub residuals: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThroughputMode {
    CdmaMin,
    MimoMax,
}

fn check_beta_r(beta: f64, r: f64) -> Result<MpLaw> {
    let law = mp_law(beta)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::domain(format!("r must be positive and finite, got {r}")));
    }
    Ok(law)
}

/// `(r_min, r_max)` in bits per dimension. `r_min` exists only for `beta < 1`.
pub fn thresholds(beta: f64) -> Result<(Option<f64>, f64)> {
    mp_law(beta)?;
    let s = beta.sqrt();
    let r_min = (beta < 1.0).then(|| (-(-s).ln_1p() - s) / (beta * LN_2));
    let r_max = (s - s.ln_1p()) / (beta * LN_2);
    Ok((r_min, r_max))
}

/// Root of `ln x + 1 - x + beta r ln 2 = 0`, i.e. `x e^{1-x} = 2^{-beta r}`,
/// below 1 (`lower`) or above 1.
pub fn fixed_point_root(beta: f64, r: f64, lower: bool) -> Result<f64> {
    let c = beta * r * LN_2;
    if lower {
        // in u = ln x the map is increasing on u < 0 and well scaled
        let g = |u: f64| u + 1.0 - u.exp() + c;
        let u = roots::bisect(g, -(c + 2.0), 0.0, 0.0)?;
        Ok(u.exp())
    } else {
        let g = |x: f64| x.ln() + 1.0 - x + c;
        // g(1) = c > 0, and ln x < sqrt(x) makes g negative at the upper end
        let hi = 2.0 * (2.0 + c);
        let hi = hi * hi;
        roots::bisect(g, 1.0, hi, 0.0)
    }
}

/// Explicit lower-side formula, valid for `beta < 1` and `r >= r_min`.
pub fn x_minus_explicit(beta: f64, r: f64) -> f64 {
    let s = beta.sqrt();
    (1.0 - s) * (1.0 - s) + s * (1.0 - s).powf(1.0 - 1.0 / beta) * (-1.0 / s - r * LN_2).exp()
}

/// Explicit upper-side formula, valid for `r >= r_max`.
pub fn x_plus_explicit(beta: f64, r: f64) -> f64 {
    let s = beta.sqrt();
    (1.0 + s) * (1.0 + s) - s * (1.0 + s).powf(1.0 - 1.0 / beta) * (1.0 / s - r * LN_2).exp()
}

pub fn solve_x_minus(beta: f64, r: f64) -> Result<(f64, Branch)> {
    check_beta_r(beta, r)?;
    let (r_min, _) = thresholds(beta)?;
    match r_min {
        Some(rm) if r > rm => Ok((x_minus_explicit(beta, r), Branch::Explicit)),
        _ => Ok((fixed_point_root(beta, r, true)?, Branch::FixedPoint)),
    }
}

pub fn solve_x_plus(beta: f64, r: f64) -> Result<(f64, Branch)> {
    check_beta_r(beta, r)?;
    let (_, r_max) = thresholds(beta)?;
    if r > r_max {
        Ok((x_plus_explicit(beta, r), Branch::Explicit))
    } else {
        Ok((fixed_point_root(beta, r, false)?, Branch::FixedPoint))
    }
}

/// `psi_x*(0) - r log 2` through the rate-function module.
pub fn rate_residual(law: &MpLaw, x: f64, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let ctx = RateContext::new(*law, x, *cfg)?;
    Ok(ratefn::psi_star_zero(&ctx)?.value - r * LN_2)
}

/// Solves `psi_x*(0) = r log 2` by bisection in `x` without using the
/// closed-form limits.
pub fn solve_by_rate_function(beta: f64, r: f64, lower: bool, cfg: &QuadratureConfig) -> Result<f64> {
    let law = check_beta_r(beta, r)?;
    let target = r * LN_2;
    let value = |x: f64| {
        RateContext::new(law, x, *cfg)
            .and_then(|c| ratefn::psi_star_zero(&c))
            .map(|p| p.value - target)
    };
    let edge = if lower { law.lambda_t_minus } else { law.lambda_plus };
    let side = if lower { 1.0 } else { -1.0 };
    let mut delta = 1e-3 * (1.0 - edge).abs();
    let mut end = edge + side * delta;
    while value(end)? <= 0.0 {
        delta *= 1e-2;
        if delta < 1e-300 || end == edge {
            return Err(Error::domain(format!(
                "r = {r} exceeds the range of psi*_x(0) near the edge {edge}"
            )));
        }
        end = edge + side * delta;
    }
    let mut failure = None;
    let f = |x: f64| match value(x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let (lo, hi) = if lower { (end, 1.0) } else { (1.0, end) };
    let root = roots::bisect(f, lo, hi, 1e-13);
    if let Some(e) = failure {
        return Err(e);
    }
    root
}

/// Limits for `(beta, r)`, cross-checked against the defining equation
/// `psi_x*(0) = r log 2` to `1e-8`.
pub fn asymptotic_limits(beta: f64, r: f64) -> Result<AsymptoticResult> {
    const TOLERANCE: f64 = 1e-8;
    let law = check_beta_r(beta, r)?;
    let (r_min, r_max) = thresholds(beta)?;
    let (x_r_minus, branch_minus) = solve_x_minus(beta, r)?;
    let (x_r_plus, branch_plus) = solve_x_plus(beta, r)?;
    let cfg = QuadratureConfig::default();
    let residuals = [
        rate_residual(&law, x_r_minus, r, &cfg)?.abs(),
        rate_residual(&law, x_r_plus, r, &cfg)?.abs(),
    ];
    if !residuals.iter().all(|v| *v <= TOLERANCE) {
        return Err(Error::Consistency {
            what: format!("limits at beta = {beta}, r = {r} do not solve psi*_x(0) = r log 2"),
            residuals: residuals.to_vec(),
            tolerance: TOLERANCE,
        });
    }
    Ok(AsymptoticResult {
        beta,
        r,
        x_r_minus,
        x_r_plus,
        c_min_limit: x_r_minus / beta,
        c_max_limit: x_r_plus / beta,
        r_min,
        r_max,
        branch_minus,
        branch_plus,
        residuals,
    })
}

/// Throughput in nats: `log(1 + 1/(sigma2 + c))` for the CDMA interference
/// floor, `log(1 + c/sigma2)` for the beamforming gain.
pub fn throughput(c: f64, sigma2: f64, mode: ThroughputMode) -> Result<f64> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("c must be non-negative, got {c}")));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(match mode {
        ThroughputMode::CdmaMin => (1.0 / (sigma2 + c)).ln_1p(),
        ThroughputMode::MimoMax => (c / sigma2).ln_1p(),
    })
}
