//! Gamma function on the real line via the Lanczos approximation (g = 7,
//! nine coefficients), with reflection for arguments below 1/2.
//!
//! [`rgamma`] is the entire function 1/Γ and returns exactly 0 at the poles,
//! which is what the Mittag-Leffler series needs. [`gamma`] refuses poles.

use crate::error::{domain, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(sqrt(2π))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut s = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    s
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    // reduce to [-1, 1]
    let r = x - 2.0 * (x / 2.0).round();
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.75 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.75 {
        -(PI * (1.0 + r)).sin()
    } else if r > 0.0 {
        (PI * (0.5 - r)).cos()
    } else {
        -(PI * (0.5 + r)).cos()
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires a positive finite argument, got {x}"));
    }
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1-x)), positive for 0 < x < 1/2
        return Ok(PI.ln() - sin_pi(x).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Γ(x). Poles (0, -1, -2, ...) are a domain error.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("gamma of non-finite argument {x}"));
    }
    if is_pole(x) {
        return domain(format!("gamma has a pole at {x}"));
    }
    if x < 0.5 {
        return Ok(PI / (sin_pi(x) * gamma(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    if x.fract() == 0.0 && x <= 23.0 {
        // exact factorial in f64
        let mut f = 1.0;
        let mut i = 2.0;
        while i < x {
            f *= i;
            i += 1.0;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power to delay overflow near the top of the range
    let p = t.powf((z + 0.5) / 2.0);
    Ok(2.506_628_274_631_000_7 * p * (lanczos_sum(z) * (-t).exp()) * p)
}

/// 1/Γ(x), an entire function: exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g = match gamma(1.0 - x) {
            Ok(g) => g,
            Err(_) => return 0.0,
        };
        if g.is_infinite() {
            // 1-x > 171: use logs, keep the sign of sin(πx)
            let s = sin_pi(x);
            let lg = ln_gamma(1.0 - x).unwrap_or(f64::INFINITY);
            return s.signum() * (s.abs().ln() + lg - PI.ln()).exp();
        }
        return sin_pi(x) * g / PI;
    }
    if x > 171.0 {
        return match ln_gamma(x) {
            Ok(l) => (-l).exp(),
            Err(_) => 0.0,
        };
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_integer_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5).unwrap() / sqrt_pi - 1.0).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() / (0.5 * sqrt_pi) - 1.0).abs() < 1e-14);
        assert!((gamma(-0.5).unwrap() / (-2.0 * sqrt_pi) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn poles() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-3.0).is_err());
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-7.0), 0.0);
        assert_eq!(rgamma(200.0), 0.0);
    }

    #[test]
    fn recurrence() {
        for &x in &[0.1, 0.37, 0.9, 1.3, 2.71, 7.5, 33.3, -0.3, -2.6] {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn large_argument_reciprocal() {
        let r = rgamma(171.5);
        let l = ln_gamma(171.5).unwrap();
        assert!((r.ln() + l).abs() < 1e-10);
        let m = rgamma(-170.5).abs();
        assert!((m.ln() - (l - std::f64::consts::PI.ln())).abs() < 1e-10);
    }

    #[test]
    fn sin_pi_symmetry() {
        for &x in &[0.1, 0.26, 0.5, 0.74, 0.9, 1.3, -2.2, 7.77] {
            assert!((sin_pi(x) - (PI * x).sin()).abs() < 1e-13, "x = {x}");
        }
        assert_eq!(sin_pi(3.0), 0.0);
    }
}
