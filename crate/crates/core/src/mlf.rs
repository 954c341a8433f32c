//! The generalized Mittag-Leffler function on the negative real axis,
//!
//! ```text
//! E_{a,b}(-x) = Σ_k (-x)^k / Γ(ak + b),   0 < a ≤ 1, x ≥ 0,
//! ```
//!
//! evaluated in three regimes:
//!
//! * `x ≤ 1`: the Taylor series itself;
//! * `1 < x < 1e5`: trapezoidal inversion of the Laplace pair
//!   `t^{b-1} E_{a,b}(-x t^a) ↔ z^{a-b} / (z^a + x)` at `t = 1`, on the
//!   parabolic contour `z(u) = μ(1 + iu)²`;
//! * `x ≥ 1e5`: the algebraic expansion `-Σ_{k≥1} (-x)^{-k} / Γ(b - ak)`.
//!
//! For `a < 1` the poles of `1/(z^a + x)` lie off the principal sheet, and for
//! `a = 1` the single pole `z = -x` sits on the negative axis, to the left of
//! the contour. The exponentially small term that `a = 1` adds to the
//! expansion is below `e^{-1e5}` and is dropped.

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma, rgamma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Series regime upper limit.
pub const X_SERIES: f64 = 1.0;
/// Asymptotic regime lower limit.
pub const X_ASYM: f64 = 1.0e5;
/// Error bound every automatic evaluation must certify.
pub const ERROR_BOUND: f64 = 1.0e-10;
/// Correction terms kept by the asymptotic regime, including the leading one.
pub const ASYM_TERMS: usize = 6;

/// Target error that sets the contour node count.
const CONTOUR_TARGET: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    Contour,
    Asymptotic,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Regime::Series),
            "contour" => Ok(Regime::Contour),
            "asymptotic" => Ok(Regime::Asymptotic),
            _ => domain(format!("unknown regime '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlQuery {
    pub a: f64,
    pub b: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlResult {
    pub value: f64,
    pub regime: Regime,
    pub est_abs_error: f64,
}

impl MlQuery {
    pub fn new(a: f64, b: f64, x: f64) -> Result<Self> {
        let q = MlQuery { a, b, x };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a <= 1.0) {
            return domain(format!("order a = {} outside (0, 1]", self.a));
        }
        if !self.b.is_finite() {
            return domain(format!("parameter b = {} is not finite", self.b));
        }
        if !(self.x >= 0.0) || !self.x.is_finite() {
            return domain(format!("argument x = {} must be finite and nonnegative", self.x));
        }
        Ok(())
    }

    /// Regime chosen by the thresholds.
    pub fn auto_regime(&self) -> Regime {
        if self.x <= X_SERIES {
            Regime::Series
        } else if self.x < X_ASYM {
            Regime::Contour
        } else {
            Regime::Asymptotic
        }
    }
}

/// E_{a,b}(-x) with the regime picked by thresholds.
pub fn ml_eval(q: MlQuery) -> Result<MlResult> {
    q.validate()?;
    let r = ml_eval_in(q, q.auto_regime())?;
    if !(r.est_abs_error <= ERROR_BOUND) {
        return Err(Error::Convergence {
            what: format!("E_{{{},{}}}(-{}) in the {:?} regime", q.a, q.b, q.x, r.regime),
            est_error: r.est_abs_error,
        });
    }
    Ok(r)
}

/// E_{a,b}(-x) in a caller-chosen regime. The result carries its own error
/// estimate; nothing here enforces [`ERROR_BOUND`].
pub fn ml_eval_in(q: MlQuery, regime: Regime) -> Result<MlResult> {
    q.validate()?;
    let (value, est_abs_error) = match regime {
        Regime::Series => series(q.a, q.b, q.x)?,
        Regime::Contour => contour(q.a, q.b, q.x),
        Regime::Asymptotic => {
            if q.x < X_ASYM {
                return domain(format!(
                    "asymptotic regime needs x >= {X_ASYM:e}, got {}",
                    q.x
                ));
            }
            asymptotic(q.a, q.b, q.x, ASYM_TERMS)
        }
    };
    Ok(MlResult {
        value,
        regime,
        est_abs_error,
    })
}

/// Shorthand for `ml_eval(..).value`.
pub fn ml(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(ml_eval(MlQuery { a, b, x })?.value)
}

/// `t^b E_{a,b+1}(-(λt)^a)`, the antiderivative of `t^{b-1} E_{a,b}(-(λt)^a)`
/// vanishing at 0. The substitution `σ = λs` leaves no extra power of λ.
pub fn ml_antiderivative(a: f64, b: f64, lambda_scale: f64, t: f64) -> Result<f64> {
    if !(b > 0.0) {
        return domain(format!("antiderivative needs b > 0, got {b}"));
    }
    if !(lambda_scale > 0.0) {
        return domain(format!("scale must be positive, got {lambda_scale}"));
    }
    if !(t >= 0.0) {
        return domain(format!("t must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(b) * ml(a, b + 1.0, (lambda_scale * t).powf(a))?)
}

/// The asymptotic expansion with `n_terms` terms, restricted to `x ≥ 1e5`.
/// Requires a nondegenerate leading coefficient, i.e. `b - a` not a pole of Γ.
pub fn ml_asymptotic(a: f64, b: f64, x: f64, n_terms: usize) -> Result<f64> {
    MlQuery::new(a, b, x)?;
    if x < X_ASYM {
        return domain(format!("asymptotic expansion needs x >= {X_ASYM:e}, got {x}"));
    }
    if n_terms == 0 {
        return domain("asymptotic expansion needs at least one term");
    }
    gamma(b - a)?;
    Ok(asymptotic(a, b, x, n_terms).0)
}

/// Leading tail `1/(Γ(b-a) x)` at any x > 0, used to predict decay rates.
pub fn ml_leading_tail(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("tail prediction needs x > 0, got {x}"));
    }
    Ok(1.0 / (gamma(b - a)? * x))
}

fn series(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut xk = 1.0;
    let mut k = 0usize;
    loop {
        let arg = a * k as f64 + b;
        let term = xk * rgamma(arg);
        sum += term;
        abs_sum += term.abs();
        // past the minimum of Γ the terms decrease monotonically
        if arg > 2.0 && k > 0 && (term.abs() < 1e-16 * sum.abs() || term.abs() < 1e-300) {
            let err = term.abs() + 4.0 * f64::EPSILON * abs_sum;
            return Ok((sum, err));
        }
        if !abs_sum.is_finite() || k > 100_000 {
            return Err(Error::Convergence {
                what: format!("series for E_{{{a},{b}}}(-{x})"),
                est_error: f64::INFINITY,
            });
        }
        xk *= -x;
        k += 1;
    }
}

fn contour_nodes(target: f64) -> usize {
    // parabolic contour error decays like exp(-πN/3)
    (3.0 * (1.0 / target).ln() / PI).ceil() as usize
}

/// Trapezoidal sum on `z(u) = μ(1+iu)²`, `μ = πN/12`, `h = 3/N`, using the
/// conjugate symmetry of the integrand. Returns the value and the sum of the
/// magnitudes of the summed terms (for a rounding estimate).
fn contour_sum(a: f64, b: f64, x: f64, n: usize) -> (f64, f64) {
    let mu = PI * n as f64 / 12.0;
    let h = 3.0 / n as f64;
    let mut acc = 0.0;
    let mut mag = 0.0;
    for k in 0..=n {
        let u = k as f64 * h;
        let w = Complex64::new(1.0, u);
        let z = mu * w * w;
        let dz = Complex64::new(0.0, 2.0 * mu) * w;
        let lz = z.ln();
        let za = (a * lz).exp();
        let zab = ((a - b) * lz).exp();
        let g = z.exp() * zab / (za + x) * dz / Complex64::new(0.0, 2.0 * PI);
        let wgt = if k == 0 { 1.0 } else { 2.0 };
        acc += wgt * g.re;
        mag += wgt * g.norm();
    }
    (h * acc, h * mag)
}

fn contour(a: f64, b: f64, x: f64) -> (f64, f64) {
    let n = contour_nodes(CONTOUR_TARGET);
    let (coarse, _) = contour_sum(a, b, x, n - 6);
    let (fine, mag) = contour_sum(a, b, x, n);
    // geometric convergence: dropping 6 nodes costs a factor exp(2π)
    let err = (fine - coarse).abs() * (-2.0 * PI).exp() + 16.0 * f64::EPSILON * mag;
    (fine, err)
}

fn asymptotic(a: f64, b: f64, x: f64, n_terms: usize) -> (f64, f64) {
    let mut sum = 0.0;
    let inv = -1.0 / x;
    let mut p = 1.0;
    for k in 1..=n_terms {
        p *= inv;
        sum -= p * rgamma(b - a * k as f64);
    }
    let next = (p * inv * rgamma(b - a * (n_terms + 1) as f64)).abs();
    // 1/Γ is bounded by ~Γ(1+|arg|)/π off the positive axis; pad the
    // truncation term accordingly
    let pad = x.powi(-(n_terms as i32 + 2)) * gamma(1.0 + a * (n_terms + 2) as f64).unwrap_or(1e3);
    (sum, next + pad + 4.0 * f64::EPSILON * sum.abs())
}

/// Abel kernel `scale · t^{α-1}/Γ(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelKernelSpec {
    pub alpha: f64,
    pub scale: f64,
}

impl AbelKernelSpec {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("Abel exponent alpha = {alpha} outside (0, 1]"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return domain(format!("Abel scale must be positive, got {scale}"));
        }
        Ok(AbelKernelSpec { alpha, scale })
    }
}

/// Point value of the Abel kernel; t = 0 is singular for α < 1.
pub fn abel_eval(spec: AbelKernelSpec, t: f64) -> Result<f64> {
    if spec.alpha == 1.0 && t >= 0.0 {
        return Ok(spec.scale);
    }
    if !(t > 0.0) {
        return Err(Error::Singularity(format!(
            "g_{} is singular at t = {t}",
            spec.alpha
        )));
    }
    Ok(spec.scale * g_alpha(spec.alpha, t))
}

/// `g_α(t) = t^{α-1}/Γ(α)` for t > 0, α > 0.
pub fn g_alpha(alpha: f64, t: f64) -> f64 {
    t.powf(alpha - 1.0) * rgamma(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(ml(1.0, 1.0, 0.0).unwrap(), 1.0);
        assert!((ml(0.4, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((ml(1.0, 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn regime_selection() {
        assert_eq!(MlQuery::new(0.5, 1.0, 0.5).unwrap().auto_regime(), Regime::Series);
        assert_eq!(MlQuery::new(0.5, 1.0, 5.0).unwrap().auto_regime(), Regime::Contour);
        assert_eq!(MlQuery::new(0.5, 1.0, 2e5).unwrap().auto_regime(), Regime::Asymptotic);
    }

    #[test]
    fn domain_errors() {
        assert!(ml(0.0, 1.0, 1.0).is_err());
        assert!(ml(1.5, 1.0, 1.0).is_err());
        assert!(ml(0.5, 1.0, -1.0).is_err());
        assert!(ml_asymptotic(0.5, 1.0, 10.0, 3).is_err());
        assert!(ml_asymptotic(0.5, 0.5, 1e6, 3).is_err());
    }

    #[test]
    fn forced_series_fails_for_large_argument() {
        let q = MlQuery::new(0.5, 1.0, 1e4).unwrap();
        assert!(ml_eval_in(q, Regime::Series).is_err());
    }

    #[test]
    fn exponential_case() {
        for i in 0..=500 {
            let x = i as f64 * 0.1;
            let v = ml(1.0, 1.0, x).unwrap();
            assert!((v - (-x).exp()).abs() < 1e-12, "x = {x}: {v}");
        }
    }

    #[test]
    fn e12_closed_form() {
        for &x in &[0.3, 2.0, 40.0, 3e5] {
            let v = ml(1.0, 2.0, x).unwrap();
            let exact = -(-x).exp_m1() / x;
            assert!((v - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn asymptotic_leading_term() {
        let v = ml_asymptotic(0.5, 1.0, 1e6, 1).unwrap();
        assert!((v - 1.0 / (PI.sqrt() * 1e6)).abs() < 1e-20);
        let w = ml_asymptotic(1.0, 2.0, 1e6, 1).unwrap();
        assert!((w - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn leading_tail_matches_contour_at_1e4() {
        let c = ml(0.7, 0.9, 1e4).unwrap();
        let t = ml_leading_tail(0.7, 0.9, 1e4).unwrap();
        assert!(((t - c) / c).abs() < 1e-3);
    }

    #[test]
    fn antiderivative_exponential() {
        assert_eq!(ml_antiderivative(1.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        for &t in &[0.01, 0.5, 2.0, 30.0] {
            let v = ml_antiderivative(1.0, 1.0, 1.0, t).unwrap();
            assert!((v + (-t).exp_m1()).abs() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_derivative_at_0_7() {
        let (a, b, t, h) = (0.6, 0.8, 0.7, 1e-5);
        let fd = (ml_antiderivative(a, b, 1.0, t + h).unwrap()
            - ml_antiderivative(a, b, 1.0, t - h).unwrap())
            / (2.0 * h);
        let k = t.powf(b - 1.0) * ml(a, b, t.powf(a)).unwrap();
        assert!((fd - k).abs() < 1e-6);
    }

    #[test]
    fn abel_values() {
        let g1 = AbelKernelSpec::new(1.0, 1.0).unwrap();
        assert_eq!(abel_eval(g1, 5.0).unwrap(), 1.0);
        let g = AbelKernelSpec::new(0.5, 1.0).unwrap();
        assert!((abel_eval(g, 1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!(abel_eval(g, 0.0).is_err());
        assert!(abel_eval(g, 0.3).unwrap() > abel_eval(g, 0.4).unwrap());
    }
}
