//! Checks of the two kernel assumptions the well-posedness and limit theory
//! rest on: an ε-uniform bound on `‖K_ε‖` as a measure on (0, T), and
//! coercivity of the convolution quadratic form
//!
//! ```text
//! ∫₀ᵗ (K_ε ∗ y) y ds ≥ C_K ∫₀ᵗ (K_ε ∗ y)² ds.
//! ```
//!
//! Coercivity is established by two closed-form routes: a Fourier bound on
//! `Re m(ω)` for Mittag-Leffler kernels with `b ≤ a`, and the resolvent of
//! the first kind `r = A δ₀ + f` for completely monotone kernels. Both are
//! cross-checked against a direct discretization of the quadratic form on
//! random signals.

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma, rgamma};
use crate::kernels::{Coupling, KernelSpec};
use crate::prodint::LagWeights;
use crate::quad::integrate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Log-spaced points of the coarse ω search.
pub const OMEGA_GRID: usize = 4096;
pub const OMEGA_RANGE: (f64, f64) = (1e-6, 1e6);

/// `C̃_{a,b}` for `0 < b ≤ a ≤ 1`, including the 2π of the Fourier
/// convention (`inf Re m(ω)`), so `C̃_{a,a} = 2π`. Divide by 2π for the
/// constant in the quadratic-form inequality.
pub fn fourier_constant(a: f64, b: f64, tau_theta: f64, eps: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0 && b > 0.0 && b <= a) {
        return domain(format!(
            "Fourier constant needs 0 < b <= a <= 1, got a = {a}, b = {b}"
        ));
    }
    if !(tau_theta > 0.0 && eps > 0.0) {
        return domain("tau_theta and eps must be positive");
    }
    if a == b {
        return Ok(2.0 * PI);
    }
    Ok(2.0 * PI * (tau_theta / eps).powf(b - a) * unit_infimum(a, b))
}

/// `inf_{ω>0} Re((iω)^b + (iω)^{b-a})` for `b < a`, attained at
/// `ω*^a = (a-b) cos((b-a)π/2) / (b cos(bπ/2))`.
fn unit_infimum(a: f64, b: f64) -> f64 {
    let cba = ((b - a) * PI / 2.0).cos();
    let cb = (b * PI / 2.0).cos();
    cba * (a / b) * ((a - b) * cba / (b * cb)).powf((b - a) / a)
}

/// `Re m(ω)` for the kernel `c · ε^{-b} t^{b-1} E_{a,b}(-(t/ε)^a)`.
fn re_m(a: f64, b: f64, eps: f64, c: f64, omega: f64) -> f64 {
    let x = eps * omega;
    2.0 * PI / c * ((b * PI / 2.0).cos() * x.powf(b) + ((b - a) * PI / 2.0).cos() * x.powf(b - a))
}

/// Numerical `inf_{ω>0} Re m(ω)` over `omega_range`, returning
/// `(ω*, value)`. If the minimum sits on the lower end the range is pushed
/// down until the value settles; `Re m` tends to its infimum only as ω → 0
/// when `a = b`.
pub fn re_m_infimum(spec: &KernelSpec, omega_range: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b, eps, c) = spec.ml_shape().ok_or_else(|| {
        Error::Unsupported(format!("Fourier criterion needs an ML-type kernel, got {}", spec.label()))
    })?;
    if b > a {
        return Err(Error::Unsupported(format!(
            "Fourier criterion not applicable for b = {b} > a = {a}"
        )));
    }
    let (lo, hi) = omega_range;
    if !(lo > 0.0 && hi > lo) {
        return domain(format!("bad omega range ({lo}, {hi})"));
    }
    let f = |w: f64| re_m(a, b, eps, c, w);
    let (mut lo, mut hi) = (lo.ln(), hi.ln());
    loop {
        let (w, v, at_lower) = grid_then_golden(&f, lo, hi);
        if !at_lower {
            return Ok((w, v));
        }
        // extend downward by six decades while the value still moves
        let next_lo = lo - 6.0 * std::f64::consts::LN_10;
        let (w2, v2, _) = grid_then_golden(&f, next_lo, lo);
        if (v - v2).abs() <= 1e-14 * v.abs() || next_lo < -690.0 {
            return Ok(if v2 < v { (w2, v2) } else { (w, v) });
        }
        hi = lo;
        lo = next_lo;
    }
}

/// Minimizes `f(e^s)` over `s ∈ [lo, hi]`; returns `(ω, value, hit_lower_end)`.
fn grid_then_golden<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64, bool) {
    let n = OMEGA_GRID;
    let s_of = |i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..n {
        let v = f(s_of(i).exp());
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    if best == 0 {
        return (lo.exp(), best_v, true);
    }
    let (mut x0, mut x1) = (s_of(best - 1), s_of((best + 1).min(n - 1)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = x1 - g * (x1 - x0);
    let mut d = x0 + g * (x1 - x0);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    for _ in 0..200 {
        if (x1 - x0).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = f(c.exp());
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = f(d.exp());
        }
    }
    let s = 0.5 * (x0 + x1);
    let v = f(s.exp()).min(best_v);
    (s.exp(), v, false)
}

/// Resolvent of the first kind `r = A δ₀ + tail_scale · g_{tail_exponent}`,
/// so that `K ∗ r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolvent {
    pub point_mass: f64,
    pub tail_scale: f64,
    pub tail_exponent: f64,
    /// The kernel is constant, so the resolvent is a pure point mass and
    /// the resolvent coercivity bound does not apply.
    pub constant_kernel: bool,
}

impl Resolvent {
    /// `f(T)`, the infimum of the completely monotone tail on (0, T).
    pub fn tail_at(&self, t: f64) -> f64 {
        if self.tail_scale == 0.0 {
            return 0.0;
        }
        self.tail_scale * t.powf(self.tail_exponent - 1.0) * rgamma(self.tail_exponent)
    }
}

/// Closed-form resolvent for point masses, power kernels `s g_α`, and
/// Mittag-Leffler kernels with `b = 1` (including the exponential kernel).
pub fn resolvent_of(spec: &KernelSpec) -> Result<Resolvent> {
    match *spec {
        KernelSpec::Zero => Err(Error::Unsupported("the zero kernel has no resolvent".into())),
        // L[ε δ₀] = ε, so r = (1/ε) · 1
        KernelSpec::Dirac { eps } => Ok(power_resolvent(0.0, eps)),
        KernelSpec::Abel {
            alpha,
            eps,
            tau_theta,
        } => Ok(power_resolvent(alpha, eps * tau_theta.powf(-alpha))),
        KernelSpec::LimitAbel { alpha, tau_theta } => {
            Ok(power_resolvent(alpha, tau_theta.powf(-alpha)))
        }
        _ => {
            let (a, b, eps, c) = spec.ml_shape().expect("ML-shaped");
            if b != 1.0 {
                return Err(Error::Unsupported(format!(
                    "no closed-form resolvent for ML kernel with b = {b} != 1"
                )));
            }
            // L[K] = c (εz)^{a-1} / ((εz)^a + 1), so L[r] = (ε + ε^{1-a} z^{-a}) / c
            Ok(Resolvent {
                point_mass: eps / c,
                tail_scale: eps.powf(1.0 - a) / c,
                tail_exponent: a,
                constant_kernel: false,
            })
        }
    }
}

fn power_resolvent(alpha: f64, s: f64) -> Resolvent {
    if alpha == 1.0 {
        // s · 1 has resolvent (1/s) δ₀
        return Resolvent {
            point_mass: 1.0 / s,
            tail_scale: 0.0,
            tail_exponent: 1.0,
            constant_kernel: true,
        };
    }
    Resolvent {
        point_mass: 0.0,
        tail_scale: 1.0 / s,
        tail_exponent: 1.0 - alpha,
        constant_kernel: false,
    }
}

/// `max |(K ∗ r)(t) - 1|` over `n_points` equispaced t in (0, T].
///
/// Power kernels use `g_α ∗ g_β = g_{α+β}`; Mittag-Leffler kernels
/// integrate `K(t - s) g_β(s)` adaptively with both endpoint singularities
/// removed by substitution.
pub fn verify_resolvent(spec: &KernelSpec, res: &Resolvent, t_final: f64, n_points: usize) -> Result<f64> {
    if n_points == 0 || !(t_final > 0.0) {
        return domain("verify_resolvent needs T > 0 and at least one point");
    }
    let mut worst = 0.0f64;
    for i in 1..=n_points {
        let t = t_final * i as f64 / n_points as f64;
        let v = resolvent_conv(spec, res, t)?;
        worst = worst.max((v - 1.0).abs());
    }
    Ok(worst)
}

fn resolvent_conv(spec: &KernelSpec, res: &Resolvent, t: f64) -> Result<f64> {
    let mass_part = match spec {
        KernelSpec::Dirac { eps } => return Ok(eps * res.tail_at(t)),
        _ if res.point_mass != 0.0 => res.point_mass * spec.eval(t)?,
        _ => 0.0,
    };
    if res.tail_scale == 0.0 {
        return Ok(mass_part);
    }
    let beta = res.tail_exponent;
    let tail = match *spec {
        KernelSpec::Abel { alpha, eps, tau_theta } => {
            eps * tau_theta.powf(-alpha) * t.powf(alpha + beta - 1.0) * rgamma(alpha + beta)
        }
        KernelSpec::LimitAbel { alpha, tau_theta } => {
            tau_theta.powf(-alpha) * t.powf(alpha + beta - 1.0) * rgamma(alpha + beta)
        }
        _ => {
            let (_, b, _, _) = spec.ml_shape().expect("ML-shaped");
            conv_with_power(spec, b, beta, t)?
        }
    };
    Ok(mass_part + res.tail_scale * tail)
}

/// `∫₀ᵗ K(t-s) g_β(s) ds` for a kernel behaving like `t^{b-1}` at 0.
fn conv_with_power(spec: &KernelSpec, b: f64, beta: f64, t: f64) -> Result<f64> {
    let h = 0.5 * t;
    let gb1 = rgamma(beta + 1.0);
    // s = u^{1/β} on [0, t/2]: g_β(s) ds = du / Γ(β+1)
    let left = integrate(
        |u: f64| Ok(spec.eval(t - u.powf(1.0 / beta))? * gb1),
        0.0,
        h.powf(beta),
        1e-13,
        1e-13,
    )?;
    // t - s = v^{1/b} on [t/2, t]: K(v^{1/b}) ds = c ε^{-b} E(...) dv / b
    let right = integrate(
        |v: f64| {
            if v == 0.0 && b < 1.0 {
                return Ok(0.0);
            }
            let r = v.powf(1.0 / b);
            let s = t - r;
            let jac = r.powf(1.0 - b) / b;
            Ok(spec.eval(r)? * jac * s.powf(beta - 1.0) * rgamma(beta))
        },
        0.0,
        h.powf(b),
        1e-13,
        1e-13,
    )?;
    Ok(left.value + right.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fourier,
    Resolvent,
    QuadraticForm,
}

/// Reference constant for the quadratic-form inequality and where it came
/// from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstant {
    pub method: Method,
    /// Constant the observed ratio is compared against.
    pub value: f64,
    /// Guaranteed lower bound of the underlying argument: `C̃/(2π)` for
    /// Fourier, `f(T)/2` (plus nothing from A) for resolvents.
    pub proven: f64,
}

/// Reference constant for a kernel on (0, T).
///
/// Fourier: `C̃_{a,b}/(2π)`. Resolvent: the tabulated `f(T)`, with the
/// bound `f(T)/2` actually proven by the resolvent argument reported in
/// `proven`. Point masses: exactly `1/ε`.
pub fn reference_constant(spec: &KernelSpec, t_final: f64) -> Result<ReferenceConstant> {
    if let KernelSpec::Dirac { eps } = *spec {
        return Ok(ReferenceConstant {
            method: Method::Resolvent,
            value: 1.0 / eps,
            proven: 1.0 / eps,
        });
    }
    if let Some((a, b, _, c)) = spec.ml_shape() {
        if b <= a {
            let v = if a == b { 1.0 } else { unit_infimum(a, b) } / c;
            return Ok(ReferenceConstant {
                method: Method::Fourier,
                value: v,
                proven: v,
            });
        }
    }
    let r = resolvent_of(spec)?;
    if r.constant_kernel {
        return Ok(ReferenceConstant {
            method: Method::Resolvent,
            value: 0.0,
            proven: 0.0,
        });
    }
    let f_t = r.tail_at(t_final);
    Ok(ReferenceConstant {
        method: Method::Resolvent,
        value: f_t,
        proven: 0.5 * f_t,
    })
}

/// A test signal: continuous-time, sampled at grid nodes.
#[derive(Debug, Clone)]
enum Signal {
    Trig { t_final: f64, cos: Vec<f64>, sin: Vec<f64> },
    Steps { jumps: Vec<f64>, levels: Vec<f64> },
}

impl Signal {
    fn at(&self, t: f64) -> f64 {
        match self {
            Signal::Trig { t_final, cos, sin } => {
                let w = 2.0 * PI / t_final;
                let mut v = 0.0;
                for k in 0..cos.len() {
                    let arg = w * (k + 1) as f64 * t;
                    v += cos[k] * arg.cos() + sin[k] * arg.sin();
                }
                v
            }
            Signal::Steps { jumps, levels } => {
                let i = jumps.iter().take_while(|&&j| j <= t).count();
                levels[i]
            }
        }
    }
}

pub const TRIG_MODES: usize = 16;

fn draw_signals(n: usize, t_final: f64, seed: u64) -> Vec<Signal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            // every fifth signal is rough: 16 smooth + 4 steps out of 20
            if i % 5 == 4 {
                let n_jumps = rng.random_range(1..=4);
                let mut jumps: Vec<f64> =
                    (0..n_jumps).map(|_| rng.random_range(0.05..0.95) * t_final).collect();
                jumps.sort_by(f64::total_cmp);
                let levels = (0..=n_jumps).map(|_| rng.sample(StandardNormal)).collect();
                Signal::Steps { jumps, levels }
            } else {
                let cos = (0..TRIG_MODES).map(|_| rng.sample(StandardNormal)).collect();
                let sin = (0..TRIG_MODES).map(|_| rng.sample(StandardNormal)).collect();
                Signal::Trig { t_final, cos, sin }
            }
        })
        .collect()
}

/// Fractions of T at which the inequality is checked.
const CHECKPOINTS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// `min_t LHS(t)/RHS(t)` over the checkpoints for one sampled signal.
fn ratio_on_grid(w: &LagWeights, y: &[f64], n: usize) -> Result<f64> {
    let v = w.convolve(y);
    let dt = w.dt;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut best = f64::INFINITY;
    let mut next = 0;
    for m in 1..=n {
        lhs += 0.5 * dt * (v[m - 1] * y[m - 1] + v[m] * y[m]);
        rhs += 0.5 * dt * (v[m - 1] * v[m - 1] + v[m] * v[m]);
        if next < CHECKPOINTS.len() && m == (CHECKPOINTS[next] * n as f64).round() as usize {
            next += 1;
            if rhs <= 1e-300 {
                return Err(Error::DegenerateSignal("K * y vanishes on the sampled signal".into()));
            }
            best = best.min(lhs / rhs);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFormReport {
    /// Richardson-extrapolated (order 2) minimum over signals.
    pub min_ratio: f64,
    pub min_ratio_coarse: f64,
    pub min_ratio_fine: f64,
    pub reference: ReferenceConstant,
    pub n_samples: usize,
    pub dt: f64,
}

/// Discretized quadratic-form test of the coercivity inequality.
///
/// Each signal is sampled at step `dt` and `dt/2`; the convolution uses
/// product integration against the piecewise linear interpolant and the
/// outer integrals the trapezoid rule. The per-signal ratios are
/// extrapolated with `r + (r - r_coarse)/3` before taking the minimum.
pub fn quadratic_form_test(
    spec: &KernelSpec,
    t_final: f64,
    n_samples: usize,
    dt: f64,
    seed: u64,
) -> Result<QuadFormReport> {
    if n_samples == 0 || !(dt > 0.0) || !(t_final > dt) {
        return domain("quadratic_form_test needs n_samples >= 1 and 0 < dt < T");
    }
    if let KernelSpec::Zero = spec {
        return Err(Error::DegenerateSignal("the zero kernel makes both sides vanish".into()));
    }
    let reference = reference_constant(spec, t_final)?;
    let n = (t_final / dt).round() as usize;
    let dt = t_final / n as f64;
    let coarse = LagWeights::new(spec, 0, dt, n)?;
    let fine = LagWeights::new(spec, 0, dt / 2.0, 2 * n)?;
    let signals = draw_signals(n_samples, t_final, seed);
    let mut min_c = f64::INFINITY;
    let mut min_f = f64::INFINITY;
    let mut min_x = f64::INFINITY;
    for s in &signals {
        let yc: Vec<f64> = (0..=n).map(|i| s.at(i as f64 * dt)).collect();
        let yf: Vec<f64> = (0..=2 * n).map(|i| s.at(i as f64 * dt / 2.0)).collect();
        let rc = ratio_on_grid(&coarse, &yc, n)?;
        let rf = ratio_on_grid(&fine, &yf, 2 * n)?;
        min_c = min_c.min(rc);
        min_f = min_f.min(rf);
        min_x = min_x.min(rf + (rf - rc) / 3.0);
    }
    Ok(QuadFormReport {
        min_ratio: min_x,
        min_ratio_coarse: min_c,
        min_ratio_fine: min_f,
        reference,
        n_samples,
        dt,
    })
}

/// Relative defect of the constant-kernel identity
/// `∫₀ᵗ (c ∗ y) y = (c ∗ y)(t)² / (2c)`, worst over the checkpoints and
/// relative to the largest value of the right-hand side seen so far.
///
/// For piecewise linear `y` the integrand is a cubic on each cell, so
/// Simpson's rule makes both sides exact and the defect is rounding only.
pub fn constant_kernel_identity(c: f64, t_final: f64, dt: f64, seed: u64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("constant kernel needs c > 0, got {c}"));
    }
    let n = (t_final / dt).round() as usize;
    let dt = t_final / n as f64;
    let mut worst = 0.0f64;
    for s in draw_signals(4, t_final, seed) {
        let y: Vec<f64> = (0..=n).map(|i| s.at(i as f64 * dt)).collect();
        let (mut big_y, mut lhs, mut scale) = (0.0, 0.0, 0.0f64);
        for m in 1..=n {
            let (y0, y1) = (y[m - 1], y[m]);
            let ym = 0.5 * (y0 + y1);
            let yh = big_y + 0.25 * dt * (y0 + ym);
            let y_end = big_y + 0.5 * dt * (y0 + y1);
            lhs += c * dt / 6.0 * (big_y * y0 + 4.0 * yh * ym + y_end * y1);
            big_y = y_end;
            scale = scale.max(0.5 * c * big_y * big_y);
            if CHECKPOINTS.iter().any(|f| (f * n as f64).round() as usize == m) {
                let v = c * big_y;
                let rhs = v * v / (2.0 * c);
                worst = worst.max((lhs - rhs).abs() / scale.max(1e-300));
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub kernel: KernelSpec,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// `(ε, ‖K_ε‖_M(0,T))` over the grid.
    pub a1_table: Vec<(f64, f64)>,
    pub a1_bound: f64,
    pub a1_uniform: bool,
    /// Smallest coercivity constant over the grid.
    #[serde(rename = "c_frakK")]
    pub c_frak_k: f64,
    pub method: Method,
    pub details: BTreeMap<String, f64>,
}

/// Tabulates the measure norm over `eps_grid` and the coercivity constant
/// at each ε. Mittag-Leffler kernels with `a > b` at fixed τ_θ are flagged
/// as non-uniform: their norm grows like `(τ_θ/ε)^{a-b}`.
pub fn a1_report(spec: &KernelSpec, eps_grid: &[f64], t_final: f64) -> Result<CoercivityReport> {
    if eps_grid.is_empty() {
        return domain("a1_report needs a nonempty eps grid");
    }
    let mut table = Vec::with_capacity(eps_grid.len());
    let mut c_min = f64::INFINITY;
    let mut method = Method::QuadraticForm;
    let mut details = BTreeMap::new();
    for &e in eps_grid {
        let k = spec.with_eps(e)?;
        let norm = k.norms(t_final)?.l1_or_tv;
        table.push((e, norm));
        let c = match reference_constant(&k, t_final) {
            Ok(r) => {
                method = r.method;
                details.insert(format!("proven_c(eps={e})"), r.proven);
                r.value
            }
            Err(Error::Unsupported(_)) => {
                let q = quadratic_form_test(&k, t_final, 20, t_final / 256.0, 0)?;
                method = Method::QuadraticForm;
                q.min_ratio
            }
            Err(err) => return Err(err),
        };
        details.insert(format!("c(eps={e})"), c);
        c_min = c_min.min(c);
    }
    let mut a1_uniform = true;
    if let KernelSpec::MittagLeffler {
        a,
        b,
        coupling: Coupling::FixedTau(tau),
        ..
    } = *spec
    {
        a1_uniform = a <= b;
        if b > a {
            // ε → 0 limit of the norm: (T/τ_θ)^{b-a} / Γ(b+1-a)
            details.insert(
                "limit_norm".into(),
                (t_final / tau).powf(b - a) / gamma(b + 1.0 - a)?,
            );
        }
    }
    let a1_bound = table.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(CoercivityReport {
        kernel: *spec,
        t_final,
        a1_table: table,
        a1_bound,
        a1_uniform,
        c_frak_k: c_min,
        method,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_orders_give_two_pi() {
        for &a in &[0.1, 0.5, 0.6, 1.0] {
            assert_eq!(fourier_constant(a, a, 3.0, 0.01).unwrap(), 2.0 * PI);
        }
        assert!(fourier_constant(0.5, 0.7, 1.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_matches_direct_minimization() {
        // independent route: dense scan of the unit-scaled symbol
        for &(a, b) in &[(1.0, 0.3), (0.9, 0.5)] {
            let h = |w: f64| (b * PI / 2.0).cos() * w.powf(b) + ((b - a) * PI / 2.0).cos() * w.powf(b - a);
            let mut m = f64::INFINITY;
            for i in 0..200_000 {
                let w = 10f64.powf(-3.0 + 6.0 * i as f64 / 200_000.0);
                m = m.min(h(w));
            }
            let c = fourier_constant(a, b, 1.0, 1.0).unwrap() / (2.0 * PI);
            assert!((c - m).abs() < 1e-6 * m, "(a, b) = ({a}, {b})");
        }
    }

    #[test]
    fn abel_resolvent_is_exact() {
        let k = KernelSpec::abel(0.5, 0.1, 2.0).unwrap();
        let r = resolvent_of(&k).unwrap();
        assert_eq!(r.point_mass, 0.0);
        assert!(verify_resolvent(&k, &r, 1.0, 50).unwrap() < 1e-12);
    }

    #[test]
    fn exponential_resolvent() {
        let k = KernelSpec::exponential(0.2).unwrap();
        let r = resolvent_of(&k).unwrap();
        assert!((r.point_mass - 0.2).abs() < 1e-15);
        assert!((r.tail_at(0.7) - 1.0).abs() < 1e-15);
        assert!(verify_resolvent(&k, &r, 1.0, 20).unwrap() < 1e-12);
    }

    #[test]
    fn point_mass_resolvent() {
        let k = KernelSpec::dirac(0.25).unwrap();
        let r = resolvent_of(&k).unwrap();
        assert_eq!(r.point_mass, 0.0);
        assert!(verify_resolvent(&k, &r, 2.0, 10).unwrap() < 1e-15);
    }

    #[test]
    fn constant_abel_kernel_flagged() {
        let k = KernelSpec::abel(1.0, 0.5, 1.0).unwrap();
        let r = resolvent_of(&k).unwrap();
        assert!(r.constant_kernel);
        assert!(resolvent_of(&KernelSpec::Zero).is_err());
    }

    #[test]
    fn constant_kernel_equality() {
        assert!(constant_kernel_identity(0.7, 1.0, 1e-3, 3).unwrap() < 1e-10);
        assert!(constant_kernel_identity(2.5, 1.0, 1e-3, 4).unwrap() < 1e-10);
    }

    #[test]
    fn dirac_ratio_is_inverse_mass() {
        let k = KernelSpec::dirac(0.25).unwrap();
        let q = quadratic_form_test(&k, 1.0, 5, 1.0 / 64.0, 1).unwrap();
        assert!((q.min_ratio_coarse - 4.0).abs() < 1e-12);
    }
}
