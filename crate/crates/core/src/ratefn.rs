//! Rate-function calculus for `(lambda - x) Y` with `lambda` drawn from the
//! Marchenko-Pastur law and `Y ~ Exp(1)`.
//!
//! ```text
//! psi_x(alpha)  = -∫ log(1 - alpha (lambda - x)) dmu(lambda)
//! psi_x*(t)     = sup_alpha  alpha t - psi_x(alpha)
//! ```
//!
//! `psi_x` is finite on `[-1/(x - lambda_t^-), 1/(lambda^+ - x)]`. The value
//! `psi_x*(0)` is the exponential decay rate of `P(sum (lambda_i - x) Y_i <= 0)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;
use crate::spectra::{MpLaw, MpQuadrature, QuadratureConfig};

const BRACKET_SHRINK: f64 = 1e-12;
const ALPHA_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RateContext {
    pub law: MpLaw,
    pub x: f64,
    pub cfg: QuadratureConfig,
    quad: MpQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendrePoint {
    pub alpha_star: f64,
    pub value: f64,
    pub t: f64,
    pub boundary_hit: bool,
}

impl RateContext {
    pub fn new(law: MpLaw, x: f64, cfg: QuadratureConfig) -> Result<Self> {
        if !(x > law.lambda_t_minus && x < law.lambda_plus) {
            return Err(Error::domain(format!(
                "x = {x} must lie in ({}, {})",
                law.lambda_t_minus, law.lambda_plus
            )));
        }
        let quad = law.quadrature(&cfg);
        Ok(RateContext { law, x, cfg, quad })
    }

    /// Context with the default quadrature.
    pub fn with_beta(beta: f64, x: f64) -> Result<Self> {
        Self::new(crate::spectra::mp_law(beta)?, x, QuadratureConfig::default())
    }

    /// Closed finiteness interval of `psi_x`.
    pub fn alpha_interval(&self) -> (f64, f64) {
        (
            -1.0 / (self.x - self.law.lambda_t_minus),
            1.0 / (self.law.lambda_plus - self.x),
        )
    }

    pub fn psi(&self, alpha: f64) -> f64 {
        psi(self, alpha)
    }

    pub fn psi_prime(&self, alpha: f64) -> Result<f64> {
        psi_prime(self, alpha)
    }
}

/// `psi_x(alpha)`, `+inf` outside the finiteness interval. At the lower end
/// with an atom present the value is `+inf` as well.
pub fn psi(ctx: &RateContext, alpha: f64) -> f64 {
    let (lo, hi) = ctx.alpha_interval();
    if !(alpha >= lo && alpha <= hi) {
        return f64::INFINITY;
    }
    if alpha == 0.0 {
        return 0.0;
    }
    let x = ctx.x;
    let mut v = -ctx
        .quad
        .integrate_continuous_unchecked(|l| (1.0 - alpha * (l - x)).ln());
    let atom = ctx.quad.atom_mass();
    if atom > 0.0 {
        let a = 1.0 + alpha * x;
        if a <= 0.0 {
            return f64::INFINITY;
        }
        v -= atom * a.ln();
    }
    v
}

/// `-∫ log(1 + alpha (x - lambda)) dmu`, the same function written the other
/// way round.
pub fn psi_alternate(ctx: &RateContext, alpha: f64) -> f64 {
    let (lo, hi) = ctx.alpha_interval();
    if !(alpha >= lo && alpha <= hi) {
        return f64::INFINITY;
    }
    let x = ctx.x;
    let mut v = -ctx.quad.integrate_continuous_unchecked(|l| (alpha * (x - l)).ln_1p());
    let atom = ctx.quad.atom_mass();
    if atom > 0.0 {
        let a = alpha * x;
        if a <= -1.0 {
            return f64::INFINITY;
        }
        v -= atom * a.ln_1p();
    }
    v
}

fn check_open(ctx: &RateContext, alpha: f64) -> Result<()> {
    let (lo, hi) = ctx.alpha_interval();
    if alpha > lo && alpha < hi {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "alpha = {alpha} is not inside the open interval ({lo}, {hi})"
        )))
    }
}

/// `d psi_x / d alpha = ∫ (lambda - x) / (1 - alpha (lambda - x)) dmu`, by
/// quadrature.
pub fn psi_prime(ctx: &RateContext, alpha: f64) -> Result<f64> {
    check_open(ctx, alpha)?;
    Ok(psi_prime_quadrature(ctx, alpha))
}

fn psi_prime_quadrature(ctx: &RateContext, alpha: f64) -> f64 {
    let x = ctx.x;
    let mut v = ctx
        .quad
        .integrate_continuous_unchecked(|l| (l - x) / (1.0 - alpha * (l - x)));
    let atom = ctx.quad.atom_mass();
    if atom > 0.0 {
        v -= atom * x / (1.0 + alpha * x);
    }
    v
}

/// The same derivative through the closed-form Stieltjes integrals of the
/// law. Writing `1 - alpha (lambda - x) = (1 + alpha x)(1 + z lambda)` with
/// `z = -alpha / (1 + alpha x)`,
///
/// ```text
/// psi'(alpha) = [F(z) / (4 z^2 beta) - x (1 - F(z) / (4 z beta))] / (1 + alpha x).
/// ```
///
/// When `1 + alpha x < 0` both radicands of `F` are negative and the
/// principal complex square root continues the formula.
pub fn psi_prime_closed_form(ctx: &RateContext, alpha: f64) -> Result<f64> {
    check_open(ctx, alpha)?;
    let x = ctx.x;
    let beta = ctx.law.beta;
    if alpha == 0.0 {
        return Ok(1.0 - x);
    }
    let d = 1.0 + alpha * x;
    if d.abs() <= 1e-12 {
        // removable point alpha = -1/x, only inside the interval for beta < 1
        return Ok(x * (1.0 - x / (1.0 - beta)));
    }
    let z = -alpha / d;
    let f = verdu_f_continued(z, &ctx.law);
    Ok((f / (4.0 * z * z * beta) - x * (1.0 - f / (4.0 * z * beta))) / d)
}

/// `F(z, beta) = (sqrt(1 + lambda^- z) - sqrt(1 + lambda^+ z))^2` on its real
/// branch.
pub fn verdu_f(z: f64, law: &MpLaw) -> Result<f64> {
    let a = 1.0 + law.lambda_minus * z;
    let b = 1.0 + law.lambda_plus * z;
    if a < 0.0 || b < 0.0 {
        return Err(Error::domain(format!(
            "F(z) has a negative radicand at z = {z} (1 + lambda^- z = {a}, 1 + lambda^+ z = {b})"
        )));
    }
    let d = a.sqrt() - b.sqrt();
    Ok(d * d)
}

fn verdu_f_continued(z: f64, law: &MpLaw) -> f64 {
    let a = Complex64::new(1.0 + law.lambda_minus * z, 0.0).sqrt();
    let b = Complex64::new(1.0 + law.lambda_plus * z, 0.0).sqrt();
    let d = a - b;
    (d * d).re
}

/// `∫ z lambda / (1 + z lambda) dmu = F(z) / (4 z beta)`.
pub fn ratio_integral_closed(z: f64, law: &MpLaw) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(verdu_f(z, law)? / (4.0 * z * law.beta))
}

/// `∫ log(1 + z lambda) dmu
///   = log(1 + z - F/4) + (1/beta) log(1 + z beta - F/4) - F / (4 z beta)`.
pub fn log_integral_closed(z: f64, law: &MpLaw) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    let b = law.beta;
    let f = verdu_f(z, law)?;
    Ok((1.0 + z - 0.25 * f).ln() + (1.0 + z * b - 0.25 * f).ln() / b - f / (4.0 * z * b))
}

/// Maximizer of `-psi_x(alpha)`, that is the tilt attaining `psi_x*(0)`.
pub fn alpha_star(ctx: &RateContext) -> f64 {
    let x = ctx.x;
    let beta = ctx.law.beta;
    let s = beta.sqrt();
    if x >= 1.0 + s {
        1.0 / (ctx.law.lambda_plus - x)
    } else if beta < 1.0 && x <= 1.0 - s {
        -1.0 / (x - ctx.law.lambda_minus)
    } else {
        (x - 1.0) / (beta * x)
    }
}

/// `psi_x*(0)` in closed form. Uses the log-integral identity when its real
/// branch applies at `alpha*`, and the equivalent elementary expressions
/// otherwise.
pub fn psi_star_zero_closed(ctx: &RateContext) -> f64 {
    let a = alpha_star(ctx);
    let x = ctx.x;
    if a == 0.0 {
        return 0.0;
    }
    let d = 1.0 + a * x;
    if d > 0.0 {
        let z = -a / d;
        if let Ok(li) = log_integral_closed(z, &ctx.law) {
            if li.is_finite() {
                return d.ln() + li;
            }
        }
    }
    psi_star_zero_elementary(ctx)
}

/// Piecewise elementary form of `psi_x*(0)`.
pub fn psi_star_zero_elementary(ctx: &RateContext) -> f64 {
    let x = ctx.x;
    let beta = ctx.law.beta;
    let s = beta.sqrt();
    if x >= 1.0 + s {
        1.0 / s + (s * (1.0 + s).powf(1.0 - 1.0 / beta)).ln() - (ctx.law.lambda_plus - x).ln()
    } else if beta < 1.0 && x <= 1.0 - s {
        (s * (1.0 - s).powf(1.0 - 1.0 / beta)).ln() - 1.0 / s - (x - ctx.law.lambda_minus).ln()
    } else {
        (x - 1.0 - x.ln()) / beta
    }
}

/// `psi_x*(0) = -psi_x(alpha*)`. Quadrature gives the value; the closed form
/// must agree with it to `1e-6`.
pub fn psi_star_zero(ctx: &RateContext) -> Result<LegendrePoint> {
    const TOLERANCE: f64 = 1e-6;
    let a = alpha_star(ctx);
    let (lo, hi) = ctx.alpha_interval();
    let quad = -psi(ctx, a);
    let closed = psi_star_zero_closed(ctx);
    let residual = (quad - closed).abs();
    if residual.is_nan() || residual > TOLERANCE {
        return Err(Error::Consistency {
            what: format!("psi*_x(0) at x = {}, beta = {}", ctx.x, ctx.law.beta),
            residuals: vec![residual],
            tolerance: TOLERANCE,
        });
    }
    Ok(LegendrePoint {
        alpha_star: a,
        value: quad.max(0.0),
        t: 0.0,
        boundary_hit: a == lo || a == hi,
    })
}

/// `psi_x*(t)` by solving `psi'(alpha) = t` on the half interval selected by
/// the sign of `t - (1 - x)`.
pub fn psi_star(ctx: &RateContext, t: f64) -> Result<LegendrePoint> {
    if !t.is_finite() {
        return Err(Error::domain(format!("t must be finite, got {t}")));
    }
    let centre = ctx.law.mean - ctx.x;
    if t == centre {
        return Ok(LegendrePoint {
            alpha_star: 0.0,
            value: 0.0,
            t,
            boundary_hit: false,
        });
    }
    let (lo, hi) = ctx.alpha_interval();
    let end = if t < centre { lo } else { hi };
    // h(alpha) = psi'(alpha) - t: zero at the maximizer, sign of (alpha - root)
    let h = |a: f64| psi_prime_quadrature(ctx, a) - t;
    let sign_at_end = if end < 0.0 { -1.0 } else { 1.0 };
    let mut prev = 0.0;
    let mut bracket = None;
    let limit = end * (1.0 - BRACKET_SHRINK);
    for k in 1..=64 {
        let a = (end * (1.0 - 0.5f64.powi(k))).clamp(limit.min(0.0), limit.max(0.0));
        if h(a) * sign_at_end >= 0.0 {
            bracket = Some((prev, a));
            break;
        }
        prev = a;
        if a == limit {
            break;
        }
    }
    let (alpha, boundary_hit) = match bracket {
        Some((a0, a1)) => {
            let (l, r) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
            (roots::brent(h, l, r, ALPHA_TOL, 200)?, false)
        }
        None => (end, true),
    };
    let v = alpha * t - psi(ctx, alpha);
    Ok(LegendrePoint {
        alpha_star: alpha,
        value: v.max(0.0),
        t,
        boundary_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::mp_law;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ctx(beta: f64, x: f64) -> RateContext {
        RateContext::with_beta(beta, x).unwrap()
    }

    fn fine(beta: f64) -> (MpLaw, MpQuadrature) {
        let law = mp_law(beta).unwrap();
        let q = law.quadrature(&QuadratureConfig::new(1 << 15).unwrap());
        (law, q)
    }

    #[test]
    fn context_bounds() {
        assert!(RateContext::with_beta(1.0, 0.0).is_err());
        assert!(RateContext::with_beta(1.0, 4.0).is_err());
        assert!(RateContext::with_beta(0.25, 0.25).is_err());
        assert!(RateContext::with_beta(0.25, 0.26).is_ok());
    }

    #[test]
    fn psi_basics() {
        for (b, x) in [(1.0, 0.5), (2.0, 0.3), (0.5, 1.7)] {
            assert_eq!(psi(&ctx(b, x), 0.0), 0.0);
        }
        let c = ctx(1.0, 1.0);
        let v = psi(&c, 0.01);
        assert!(v > 4e-5 && v < 6e-5, "{v}");
        let c = ctx(1.0, 0.5);
        let (_, hi) = c.alpha_interval();
        assert_abs_diff_eq!(hi, 2.0 / 7.0, epsilon = 1e-15);
        assert!(psi(&c, hi).is_finite());
        assert!(psi(&c, hi + 1e-9).is_infinite());
        // atom makes the lower end infinite
        let c = ctx(2.0, 0.5);
        assert!(psi(&c, c.alpha_interval().0).is_infinite());
    }

    #[test]
    fn psi_spellings_agree() {
        for (b, x) in [(1.0, 0.5), (2.0, 0.3), (0.5, 1.7), (0.25, 0.4)] {
            let c = ctx(b, x);
            let (lo, hi) = c.alpha_interval();
            for k in 1..10 {
                let a = lo + (hi - lo) * k as f64 / 10.0;
                assert_abs_diff_eq!(psi(&c, a), psi_alternate(&c, a), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn psi_near_endpoints_matches_fine_quadrature() {
        // integrable log singularity: default grid against 32x refinement
        let c = ctx(1.0, 0.5);
        let f = RateContext::new(c.law, 0.5, QuadratureConfig::new(1 << 17).unwrap()).unwrap();
        let (lo, hi) = c.alpha_interval();
        assert_abs_diff_eq!(psi(&c, hi), psi(&f, hi), epsilon = 1e-8);
        // at beta = 1 the lower end puts the log singularity on the 1/sqrt
        // edge of the density, where the midpoint rule is first order
        assert_abs_diff_eq!(psi(&c, lo), psi(&f, lo), epsilon = 1e-3);
        let c = ctx(0.5, 0.5);
        let f = RateContext::new(c.law, 0.5, QuadratureConfig::new(1 << 17).unwrap()).unwrap();
        let (lo, hi) = c.alpha_interval();
        assert_abs_diff_eq!(psi(&c, hi), psi(&f, hi), epsilon = 1e-8);
        assert_abs_diff_eq!(psi(&c, lo), psi(&f, lo), epsilon = 1e-8);
    }

    #[test]
    fn unresolved_edge_is_reported() {
        // x = 1e-5 at beta = 1 is below what 4096 nodes resolve
        assert!(matches!(psi_star_zero(&ctx(1.0, 1e-5)), Err(Error::Consistency { .. })));
    }

    #[test]
    fn psi_prime_examples() {
        let c = ctx(1.0, 0.5);
        assert_eq!(psi_prime_closed_form(&c, 0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(psi_prime(&c, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(psi_prime(&c, -1.0).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(psi_prime_closed_form(&c, -1.0).unwrap(), 0.0, epsilon = 1e-9);
        let h = 1e-6;
        let fd = (psi(&c, -0.5 + h) - psi(&c, -0.5 - h)) / (2.0 * h);
        assert_abs_diff_eq!(psi_prime(&c, -0.5).unwrap(), fd, epsilon = 1e-6);
        let (lo, hi) = c.alpha_interval();
        assert!(psi_prime(&c, hi).is_err());
        assert!(psi_prime(&c, lo).is_err());
        assert!(psi_prime_closed_form(&c, hi + 1.0).is_err());
    }

    #[test]
    fn psi_prime_removable_point() {
        let c = ctx(0.25, 0.5);
        let a = -1.0 / c.x;
        let q = psi_prime(&c, a).unwrap();
        assert_abs_diff_eq!(psi_prime_closed_form(&c, a).unwrap(), q, epsilon = 1e-9);
        // just off the removable point the general formula takes over
        assert_abs_diff_eq!(psi_prime_closed_form(&c, a + 1e-6).unwrap(), q, epsilon = 1e-5);
    }

    #[test]
    fn psi_prime_three_ways_on_grid() {
        for b in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let law = mp_law(b).unwrap();
            for xf in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let x = law.lambda_t_minus + xf * (law.lambda_plus - law.lambda_t_minus);
                let c = ctx(b, x);
                let (lo, hi) = c.alpha_interval();
                for af in [0.05, 0.2, 0.4, 0.6, 0.8, 0.95] {
                    let a = lo + af * (hi - lo);
                    let q = psi_prime(&c, a).unwrap();
                    let cf = psi_prime_closed_form(&c, a).unwrap();
                    let h = 1e-6 * (hi - lo);
                    let fd = (psi(&c, a + h) - psi(&c, a - h)) / (2.0 * h);
                    assert!((q - cf).abs() <= 1e-9, "beta {b} x {x} a {a}: {q} vs {cf}");
                    assert!((q - fd).abs() <= 1e-6, "beta {b} x {x} a {a}: {q} vs fd {fd}");
                }
            }
        }
    }

    #[test]
    fn verdu_f_examples() {
        let l = mp_law(1.0).unwrap();
        assert_eq!(verdu_f(0.0, &l).unwrap(), 0.0);
        assert_abs_diff_eq!(verdu_f(1.0, &l).unwrap(), 6.0 - 2.0 * 5f64.sqrt(), epsilon = 1e-14);
        assert!(matches!(verdu_f(-1.0, &l), Err(Error::Domain(_))));
    }

    #[test]
    fn ratio_identity_at_one() {
        let (law, q) = fine(1.0);
        let lhs = q.integrate(|l| l / (1.0 + l)).unwrap();
        assert_abs_diff_eq!(lhs, (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(ratio_integral_closed(1.0, &law).unwrap(), lhs, epsilon = 1e-8);
        assert_abs_diff_eq!(lhs, 0.381966, epsilon = 1e-6);
    }

    #[test]
    fn lemma_identities_against_quadrature() {
        for b in [0.5, 1.0, 2.0] {
            let (law, q) = fine(b);
            let zmin = -1.0 / law.lambda_plus;
            for z in [0.5, 1.0, 2.0, -0.05, 0.5 * zmin] {
                let r = q.integrate(|l| z * l / (1.0 + z * l)).unwrap();
                let g = q.integrate(|l| (z * l).ln_1p()).unwrap();
                assert!(
                    (ratio_integral_closed(z, &law).unwrap() - r).abs() <= 1e-8,
                    "beta {b} z {z}"
                );
                assert!(
                    (log_integral_closed(z, &law).unwrap() - g).abs() <= 1e-8,
                    "beta {b} z {z}"
                );
            }
        }
    }

    #[test]
    fn alpha_star_examples() {
        assert_eq!(alpha_star(&ctx(1.0, 0.5)), -1.0);
        for b in [0.25, 1.0, 3.0] {
            assert_eq!(alpha_star(&ctx(b, 1.0)), 0.0);
        }
        assert_abs_diff_eq!(alpha_star(&ctx(0.25, 2.0)), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn alpha_star_maximizes_over_grid() {
        for b in [0.25, 0.5, 1.0, 2.0] {
            let law = mp_law(b).unwrap();
            for xf in [0.02, 0.2, 0.5, 0.8, 0.98] {
                let x = law.lambda_t_minus + xf * (law.lambda_plus - law.lambda_t_minus);
                let c = ctx(b, x);
                let a = alpha_star(&c);
                let best = -psi(&c, a);
                let (lo, hi) = c.alpha_interval();
                for k in 0..=400 {
                    let s = lo + (hi - lo) * k as f64 / 400.0;
                    assert!(-psi(&c, s) <= best + 1e-9, "beta {b} x {x}");
                }
            }
        }
    }

    #[test]
    fn psi_star_zero_examples() {
        for b in [0.25, 1.0, 4.0] {
            let p = psi_star_zero(&ctx(b, 1.0)).unwrap();
            assert!(p.value.abs() <= 1e-10);
        }
        let a = psi_star_zero(&ctx(1.0, 0.5)).unwrap().value;
        let b = psi_star_zero(&ctx(1.0, 0.8)).unwrap().value;
        assert!(a > b);
        assert!(psi_star_zero(&ctx(1.0, 0.01)).unwrap().value > 2.0);
    }

    #[test]
    fn psi_star_zero_routes_agree_on_every_branch() {
        for b in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let law = mp_law(b).unwrap();
            for k in 1..40 {
                let x = law.lambda_t_minus + (law.lambda_plus - law.lambda_t_minus) * k as f64 / 40.0;
                let c = ctx(b, x);
                let q = -psi(&c, alpha_star(&c));
                assert!((q - psi_star_zero_closed(&c)).abs() <= 1e-8, "beta {b} x {x}");
                assert!((q - psi_star_zero_elementary(&c)).abs() <= 1e-8, "beta {b} x {x}");
            }
        }
    }

    #[test]
    fn boundary_flag() {
        assert!(psi_star_zero(&ctx(0.25, 2.0)).unwrap().boundary_hit);
        assert!(psi_star_zero(&ctx(0.25, 0.3)).unwrap().boundary_hit);
        assert!(!psi_star_zero(&ctx(0.25, 1.2)).unwrap().boundary_hit);
    }

    #[test]
    fn psi_star_examples() {
        let c = ctx(1.0, 0.5);
        let p = psi_star(&c, 0.5).unwrap();
        assert_eq!((p.value, p.alpha_star), (0.0, 0.0));
        let z = psi_star_zero(&c).unwrap();
        let p0 = psi_star(&c, 0.0).unwrap();
        assert_abs_diff_eq!(p0.value, z.value, epsilon = 1e-9);
        let pm = psi_star(&c, -0.1).unwrap();
        assert!(pm.value > z.value);
        // grid-search oracle for the Legendre transform
        let (lo, hi) = c.alpha_interval();
        let grid = (0..=20000)
            .map(|k| lo + (hi - lo) * k as f64 / 20000.0)
            .map(|a| -0.1 * a - psi(&c, a))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((pm.value - grid).abs() < 1e-6, "{} vs {grid}", pm.value);
    }

    #[test]
    fn psi_star_zero_two_paths_on_grid() {
        for b in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let law = mp_law(b).unwrap();
            for k in 1..20 {
                let x = law.lambda_t_minus + (law.lambda_plus - law.lambda_t_minus) * k as f64 / 20.0;
                let c = ctx(b, x);
                let z = psi_star_zero(&c).unwrap();
                let p = psi_star(&c, 0.0).unwrap();
                assert!(
                    (z.value - p.value).abs() <= 1e-9,
                    "beta {b} x {x}: {} vs {}",
                    z.value,
                    p.value
                );
            }
        }
    }

    #[test]
    fn psi_star_zero_monotone_and_divergent() {
        for b in [0.5, 1.0, 2.0] {
            let law = mp_law(b).unwrap();
            let lo = law.lambda_t_minus;
            let below: Vec<f64> = (1..=20)
                .map(|k| lo + (1.0 - lo) * k as f64 / 21.0)
                .map(|x| psi_star_zero(&ctx(b, x)).unwrap().value)
                .collect();
            assert!(below.windows(2).all(|w| w[0] > w[1]));
            let above: Vec<f64> = (1..=20)
                .map(|k| 1.0 + (law.lambda_plus - 1.0) * k as f64 / 21.0)
                .map(|x| psi_star_zero(&ctx(b, x)).unwrap().value)
                .collect();
            assert!(above.windows(2).all(|w| w[0] < w[1]));
            let deepest = if b == 1.0 { 3 } else { 8 };
            let div: Vec<f64> = (1..=deepest)
                .map(|k| psi_star_zero(&ctx(b, lo + 10f64.powi(-k))).unwrap().value)
                .collect();
            assert!(div.windows(2).all(|w| w[1] > w[0]), "{div:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn psi_is_midpoint_convex(b in 0.2f64..4.0, xf in 0.05f64..0.95, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let law = mp_law(b).unwrap();
            let x = law.lambda_t_minus + xf * (law.lambda_plus - law.lambda_t_minus);
            let c = ctx(b, x);
            let (lo, hi) = c.alpha_interval();
            let a1 = lo + (hi - lo) * (0.001 + 0.998 * u.min(v));
            let a3 = lo + (hi - lo) * (0.001 + 0.998 * u.max(v));
            prop_assume!(a3 - a1 > 1e-6);
            let m = 0.5 * (a1 + a3);
            prop_assert!(psi(&c, m) <= 0.5 * (psi(&c, a1) + psi(&c, a3)) + 1e-12);
        }

        #[test]
        fn legendre_point_invariants(b in 0.2f64..4.0, xf in 0.05f64..0.95, t in -2.0f64..2.0) {
            let law = mp_law(b).unwrap();
            let x = law.lambda_t_minus + xf * (law.lambda_plus - law.lambda_t_minus);
            let c = ctx(b, x);
            let p = psi_star(&c, t).unwrap();
            let (lo, hi) = c.alpha_interval();
            prop_assert!(p.value >= 0.0);
            prop_assert!(p.alpha_star >= lo && p.alpha_star <= hi);
            let centre = 1.0 - x;
            if t != centre {
                prop_assert_eq!(p.alpha_star.signum(), (t - centre).signum());
            }
        }

        #[test]
        fn psi_star_zero_nonnegative(b in 0.2f64..4.0, xf in 0.01f64..0.99) {
            let law = mp_law(b).unwrap();
            let x = law.lambda_t_minus + xf * (law.lambda_plus - law.lambda_t_minus);
            prop_assume!((x - 1.0).abs() > 1e-6);
            prop_assert!(psi_star_zero(&ctx(b, x)).unwrap().value > 0.0);
        }
    }
}
