//! Memory kernel families and their closed-form integrals.
//!
//! Every family is reduced to one of three shapes:
//!
//! * a point mass `ε δ₀` ([`KernelSpec::Dirac`]);
//! * a power `s · g_α` (Abel, LimitAbel);
//! * a rescaled Mittag-Leffler kernel
//!   `K_ε(t) = c · ε^{-b} t^{b-1} E_{a,b}(-(t/ε)^a)`, where the coupling
//!   factor `c` is `(τ_θ/ε)^{a-b}` or `ρ^{a-b}` (the exponential kernel is
//!   `a = b = 1`).
//!
//! Repeated running integrals `K ∗ 1^{∗n}` stay in the same shape, so they are
//! available in closed form for every family. The solver and the coercivity
//! checks only ever touch the kernel through them.

use crate::error::{domain, Error, Result};
use crate::gamma::rgamma;
use crate::mlf::ml;
use crate::quad::integrate_breaks;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Upper end of the admissible range of the small parameter.
pub const EPS_BAR: f64 = 1.0;

/// Absolute tolerance of the norm quadratures.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Zero,
    Dirac,
    Abel,
    Exponential,
    MittagLeffler,
    LimitAbel,
}

/// How the relaxation time enters a Mittag-Leffler kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `(τ_θ/ε)^{a-b}` with τ_θ held fixed as ε varies.
    FixedTau(f64),
    /// `ρ^{a-b}` with `ρ = τ_θ/ε` held fixed.
    FixedRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelConfig", into = "KernelConfig")]
pub enum KernelSpec {
    Zero,
    /// Point mass `eps · δ₀`.
    Dirac { eps: f64 },
    /// `eps · τ_θ^{-α} g_α`.
    Abel { alpha: f64, eps: f64, tau_theta: f64 },
    /// `(1/eps) e^{-t/eps}`.
    Exponential { eps: f64 },
    MittagLeffler {
        a: f64,
        b: f64,
        eps: f64,
        coupling: Coupling,
    },
    /// `τ_θ^{-α} g_α`, the ε-independent limit of `a < b` kernels.
    LimitAbel { alpha: f64, tau_theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Law {
    #[serde(rename = "GFE")]
    Gfe,
    #[serde(rename = "GFE_I")]
    GfeI,
    #[serde(rename = "GFE_II")]
    GfeII,
    #[serde(rename = "GFE_III")]
    GfeIII,
}

/// A fractional heat-flux law and its order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GfeLaw {
    pub law: Law,
    pub alpha: f64,
}

impl GfeLaw {
    pub fn new(law: Law, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("law order alpha = {alpha} outside (0, 1]"));
        }
        if law == Law::GfeI && alpha <= 0.5 {
            return domain(format!("GFE I needs alpha > 1/2, got {alpha}"));
        }
        Ok(GfeLaw { law, alpha })
    }

    /// Mittag-Leffler parameters (a, b).
    pub fn ab(&self) -> (f64, f64) {
        let al = self.alpha;
        match self.law {
            Law::GfeI => (al, 2.0 * al - 1.0),
            Law::GfeII => (al, 1.0),
            Law::GfeIII => (1.0, al),
            Law::Gfe => (al, al),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNorms {
    /// ‖K‖ on (0, T) as a measure (L¹ norm for functions, mass for δ₀).
    pub l1_or_tv: f64,
    /// ‖K ∗ 1‖_{L¹(0,T)}.
    pub conv1_l1: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

/// `(K_ε - K_0) ∗ 1` on a uniform grid and its L¹(0, T) norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffConv {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub l1: f64,
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= EPS_BAR {
        Ok(())
    } else {
        domain(format!("eps = {eps} outside (0, {EPS_BAR}]"))
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        domain(format!("{name} = {v} outside (0, 1]"))
    }
}

impl KernelSpec {
    pub fn dirac(eps: f64) -> Result<Self> {
        Self::Dirac { eps }.validated()
    }

    pub fn abel(alpha: f64, eps: f64, tau_theta: f64) -> Result<Self> {
        Self::Abel {
            alpha,
            eps,
            tau_theta,
        }
        .validated()
    }

    pub fn exponential(eps: f64) -> Result<Self> {
        Self::Exponential { eps }.validated()
    }

    pub fn ml_fixed_tau(a: f64, b: f64, eps: f64, tau_theta: f64) -> Result<Self> {
        Self::MittagLeffler {
            a,
            b,
            eps,
            coupling: Coupling::FixedTau(tau_theta),
        }
        .validated()
    }

    pub fn ml_fixed_ratio(a: f64, b: f64, eps: f64, rho: f64) -> Result<Self> {
        Self::MittagLeffler {
            a,
            b,
            eps,
            coupling: Coupling::FixedRatio(rho),
        }
        .validated()
    }

    /// `τ_θ^{-α} g_α`; exponent 0 is the unit point mass.
    pub fn limit_abel(alpha: f64, tau_theta: f64) -> Result<Self> {
        if alpha == 0.0 {
            return Ok(Self::Dirac { eps: 1.0 });
        }
        Self::LimitAbel { alpha, tau_theta }.validated()
    }

    /// Kernel of a flux law with τ_θ fixed.
    pub fn from_gfe(law: GfeLaw, eps: f64, tau_theta: f64) -> Result<Self> {
        let (a, b) = law.ab();
        Self::ml_fixed_tau(a, b, eps, tau_theta)
    }

    /// Kernel of a flux law with `τ_θ/ε = ρ` fixed.
    pub fn from_gfe_fixed_ratio(law: GfeLaw, eps: f64, rho: f64) -> Result<Self> {
        let (a, b) = law.ab();
        Self::ml_fixed_ratio(a, b, eps, rho)
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Zero => Ok(()),
            Self::Dirac { eps } => check_eps(eps),
            Self::Abel {
                alpha,
                eps,
                tau_theta,
            } => {
                check_unit("alpha", alpha)?;
                check_eps(eps)?;
                check_pos("tau_theta", tau_theta)
            }
            Self::Exponential { eps } => check_eps(eps),
            Self::MittagLeffler {
                a,
                b,
                eps,
                coupling,
            } => {
                check_unit("a", a)?;
                check_unit("b", b)?;
                check_eps(eps)?;
                match coupling {
                    Coupling::FixedTau(t) => check_pos("tau_theta", t),
                    Coupling::FixedRatio(r) => check_pos("rho", r),
                }
            }
            Self::LimitAbel { alpha, tau_theta } => {
                check_unit("alpha", alpha)?;
                check_pos("tau_theta", tau_theta)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Zero => Family::Zero,
            Self::Dirac { .. } => Family::Dirac,
            Self::Abel { .. } => Family::Abel,
            Self::Exponential { .. } => Family::Exponential,
            Self::MittagLeffler { .. } => Family::MittagLeffler,
            Self::LimitAbel { .. } => Family::LimitAbel,
        }
    }

    pub fn eps(&self) -> Option<f64> {
        match *self {
            Self::Dirac { eps }
            | Self::Abel { eps, .. }
            | Self::Exponential { eps }
            | Self::MittagLeffler { eps, .. } => Some(eps),
            Self::Zero | Self::LimitAbel { .. } => None,
        }
    }

    /// The same family at another ε (τ_θ or ρ unchanged).
    pub fn with_eps(&self, new_eps: f64) -> Result<Self> {
        let mut s = *self;
        match &mut s {
            Self::Dirac { eps }
            | Self::Abel { eps, .. }
            | Self::Exponential { eps }
            | Self::MittagLeffler { eps, .. } => *eps = new_eps,
            Self::Zero | Self::LimitAbel { .. } => {
                return Err(Error::Unsupported(format!(
                    "{} kernel does not depend on eps",
                    self.label()
                )))
            }
        }
        s.validated()
    }

    /// `(a, b, eps, c)` for kernels of Mittag-Leffler shape, with `c` the
    /// coupling factor. The exponential kernel is `(1, 1, eps, 1)`.
    pub fn ml_shape(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            Self::Exponential { eps } => Some((1.0, 1.0, eps, 1.0)),
            Self::MittagLeffler {
                a,
                b,
                eps,
                coupling,
            } => {
                let c = match coupling {
                    Coupling::FixedTau(tau) => (tau / eps).powf(a - b),
                    Coupling::FixedRatio(rho) => rho.powf(a - b),
                };
                Some((a, b, eps, c))
            }
            _ => None,
        }
    }

    /// Laplace transform `K̂(s)` for `Re s > 0`.
    pub fn laplace(&self, s: Complex64) -> Complex64 {
        if let Some((alpha, scale)) = self.power_shape() {
            return scale * s.powf(-alpha);
        }
        match (*self, self.ml_shape()) {
            (Self::Zero, _) => Complex64::new(0.0, 0.0),
            (Self::Dirac { eps }, _) => Complex64::new(eps, 0.0),
            // c ε^{-b} s^{a-b} / (s^a + ε^{-a}), rescaled to stay finite as ε → 0
            (_, Some((a, b, eps, c))) => {
                c * eps.powf(a - b) * s.powf(a - b) / ((eps * s).powf(a) + 1.0)
            }
            _ => unreachable!("every family has a shape"),
        }
    }

    /// `(α, s)` for kernels of the form `s · g_α`.
    pub(crate) fn power_shape(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Abel {
                alpha,
                eps,
                tau_theta,
            } => Some((alpha, eps * tau_theta.powf(-alpha))),
            Self::LimitAbel { alpha, tau_theta } => Some((alpha, tau_theta.powf(-alpha))),
            _ => None,
        }
    }

    /// True when the kernel is a nonnegative function or measure.
    pub fn is_nonnegative(&self) -> bool {
        match self.ml_shape() {
            Some((a, b, _, _)) => b >= a,
            None => true,
        }
    }

    /// Point value K(t) for t > 0.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if let Self::Dirac { .. } = self {
            return Err(Error::Unsupported(
                "point evaluation of a point mass".into(),
            ));
        }
        if !(t >= 0.0) {
            return domain(format!("kernel evaluated at negative time {t}"));
        }
        if let Self::Zero = self {
            return Ok(0.0);
        }
        if let Some((alpha, s)) = self.power_shape() {
            if alpha == 1.0 {
                return Ok(s);
            }
            if t == 0.0 {
                return Err(Error::Singularity(format!("g_{alpha} at t = 0")));
            }
            return Ok(s * t.powf(alpha - 1.0) * rgamma(alpha));
        }
        let (a, b, eps, c) = self.ml_shape().expect("remaining families are ML-shaped");
        if t == 0.0 {
            if b == 1.0 {
                return Ok(c / eps);
            }
            return Err(Error::Singularity(format!("t^{} at t = 0", b - 1.0)));
        }
        if a == 1.0 && b == 1.0 {
            return Ok(c / eps * (-t / eps).exp());
        }
        let x = t / eps;
        Ok(c / eps * x.powf(b - 1.0) * ml(a, b, x.powf(a))?)
    }

    /// `(K ∗ 1^{∗n})(t)` for n ≥ 1; `n = 1` is [`Self::conv_one`].
    pub fn antiderivative(&self, n: u32, t: f64) -> Result<f64> {
        if n == 0 {
            return self.eval(t);
        }
        if !(t >= 0.0) {
            return domain(format!("running integral at negative time {t}"));
        }
        let nf = n as f64;
        match *self {
            Self::Zero => Ok(0.0),
            Self::Dirac { eps } => {
                if t == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(eps * t.powf(nf - 1.0) * rgamma(nf))
                }
            }
            _ => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                if let Some((alpha, s)) = self.power_shape() {
                    return Ok(s * t.powf(alpha + nf - 1.0) * rgamma(alpha + nf));
                }
                let (a, b, eps, c) = self.ml_shape().expect("ML-shaped");
                let x = t / eps;
                if a == 1.0 && b == 1.0 && n == 1 {
                    return Ok(-c * (-x).exp_m1());
                }
                Ok(c * eps.powf(nf - 1.0) * x.powf(b + nf - 1.0) * ml(a, b + nf, x.powf(a))?)
            }
        }
    }

    /// `∫₀ᵗ K`, exact. A point mass contributes only for t > 0.
    pub fn conv_one(&self, t: f64) -> Result<f64> {
        self.antiderivative(1, t)
    }

    /// Right limit `(K ∗ 1)(0⁺)`: the mass for δ₀, zero otherwise.
    pub fn conv_one_at_zero_plus(&self) -> f64 {
        match *self {
            Self::Dirac { eps } => eps,
            _ => 0.0,
        }
    }

    /// Measure norm on (0, T) and L¹ norm of the running integral.
    pub fn norms(&self, t_final: f64) -> Result<KernelNorms> {
        check_pos("T", t_final)?;
        let l1_or_tv = self.l1_or_tv(t_final)?;
        let conv1_l1 = match self {
            Self::Zero => 0.0,
            _ => {
                let brk = self.breakpoints(t_final);
                integrate_breaks(
                    |t| Ok(self.conv_one(t)?.abs()),
                    &brk,
                    NORM_TOL,
                    1e-12,
                )?
                .value
            }
        };
        Ok(KernelNorms {
            l1_or_tv,
            conv1_l1,
            t_final,
        })
    }

    fn l1_or_tv(&self, t_final: f64) -> Result<f64> {
        match *self {
            Self::Zero => Ok(0.0),
            Self::Dirac { eps } => Ok(eps),
            _ if self.is_nonnegative() => self.conv_one(t_final),
            _ => {
                // sign-changing ML kernel (b < a); t = s^{1/b} absorbs t^{b-1}
                let (a, b, eps, c) = self.ml_shape().expect("ML-shaped");
                let brk: Vec<f64> = self
                    .breakpoints(t_final)
                    .into_iter()
                    .map(|t| t.powf(b))
                    .collect();
                let r = integrate_breaks(
                    |s: f64| {
                        let t = s.powf(1.0 / b);
                        Ok(ml(a, b, (t / eps).powf(a))?.abs())
                    },
                    &brk,
                    NORM_TOL * b * eps.powf(b) / c,
                    1e-12,
                )?;
                Ok(c * eps.powf(-b) / b * r.value)
            }
        }
    }

    /// Initial partition for quadratures: 0, geometric multiples of ε, T.
    fn breakpoints(&self, t_final: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        if let Some(eps) = self.eps() {
            let mut t = eps / 64.0;
            while t < t_final {
                pts.push(t);
                t *= 4.0;
            }
        }
        pts.push(t_final);
        pts
    }

    /// The ε → 0 limit kernel.
    pub fn limit_kernel(&self) -> Result<KernelSpec> {
        match *self {
            Self::Zero | Self::LimitAbel { .. } => Ok(*self),
            Self::Dirac { .. } | Self::Abel { .. } => Ok(Self::Zero),
            Self::Exponential { .. } => Ok(Self::Dirac { eps: 1.0 }),
            Self::MittagLeffler { a, b, coupling, .. } => {
                if a == b {
                    return Ok(Self::Dirac { eps: 1.0 });
                }
                match coupling {
                    Coupling::FixedTau(tau) if a < b => Self::limit_abel(b - a, tau),
                    Coupling::FixedRatio(_) if a > b => Ok(Self::Zero),
                    Coupling::FixedTau(_) => Err(Error::Unsupported(format!(
                        "ML kernel with a = {a} > b = {b} has no limit at fixed tau_theta (norm blows up)"
                    ))),
                    Coupling::FixedRatio(_) => Err(Error::Unsupported(format!(
                        "ML kernel with a = {a} < b = {b} has no limit at fixed ratio"
                    ))),
                }
            }
        }
    }

    /// Predicted exponent of ‖u^ε - u^0‖_E in ε.
    pub fn predicted_rate(&self) -> Result<f64> {
        let limit = self.limit_kernel()?;
        match *self {
            Self::Zero | Self::LimitAbel { .. } => Err(Error::Unsupported(
                "kernel does not depend on eps".into(),
            )),
            Self::Dirac { .. } | Self::Abel { .. } => Ok(1.0),
            _ => {
                let (a, b, _, _) = self.ml_shape().expect("ML-shaped");
                if a <= b {
                    Ok(a / 2.0)
                } else {
                    debug_assert_eq!(limit, Self::Zero);
                    Ok((a - b) / 2.0)
                }
            }
        }
    }

    /// `(K_ε - K_0)(t)` where both are functions; used by the TV bound.
    fn diff_density(&self, limit: &KernelSpec, t: f64) -> Result<f64> {
        let k0 = match limit {
            Self::Zero | Self::Dirac { .. } => 0.0,
            l => l.eval(t)?,
        };
        Ok(self.eval(t)? - k0)
    }

    /// `(K_ε - K_0) ∗ 1` on `n_grid` uniform points of [0, T] and its L¹ norm.
    pub fn diff_conv_one(&self, t_final: f64, n_grid: usize) -> Result<DiffConv> {
        check_pos("T", t_final)?;
        if n_grid < 2 {
            return domain("diff_conv_one needs at least two grid points");
        }
        let limit = self.limit_kernel()?;
        let t: Vec<f64> = (0..n_grid)
            .map(|i| t_final * i as f64 / (n_grid - 1) as f64)
            .collect();
        if limit == *self {
            return Ok(DiffConv {
                values: vec![0.0; n_grid],
                t,
                l1: 0.0,
            });
        }
        if limit == Self::Zero {
            let values = t.iter().map(|&s| self.conv_one(s)).collect::<Result<Vec<_>>>()?;
            return Ok(DiffConv {
                values,
                t,
                l1: self.antiderivative(2, t_final)?,
            });
        }
        // a ≤ b at fixed τ_θ: -τ^{a-b} t^{b-a} E_{a,1+b-a}(-(t/ε)^a), one sign
        let (a, b, eps, _) = self.ml_shape().expect("ML-shaped");
        let tau_pow = match *self {
            Self::MittagLeffler {
                coupling: Coupling::FixedTau(tau),
                ..
            } => tau.powf(a - b),
            _ => 1.0,
        };
        let values = t
            .iter()
            .map(|&s| {
                if s == 0.0 {
                    // 0 for a < b; the point mass of the a = b limit is excluded
                    Ok(if a == b { -tau_pow } else { 0.0 })
                } else {
                    Ok(-tau_pow * s.powf(b - a) * ml(a, 1.0 + b - a, (s / eps).powf(a))?)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let l1 = tau_pow
            * t_final.powf(1.0 + b - a)
            * ml(a, 2.0 + b - a, (t_final / eps).powf(a))?;
        Ok(DiffConv { t, values, l1 })
    }

    /// ‖K_ε - K_0‖ as a measure on (0, T).
    pub fn tv_distance_to_limit(&self, t_final: f64) -> Result<f64> {
        let limit = self.limit_kernel()?;
        if limit == *self {
            return Ok(0.0);
        }
        match limit {
            Self::Zero => self.l1_or_tv(t_final),
            // K_ε is absolutely continuous, so the unit mass adds in full
            Self::Dirac { eps } => Ok(self.l1_or_tv(t_final)? + eps),
            _ => {
                let (_, b, _, _) = self.ml_shape().expect("ML-shaped");
                let (alpha, _) = limit.power_shape().expect("power-shaped limit");
                // t = s^{1/γ} with γ the smaller exponent regularizes both terms
                let g = alpha.min(b);
                let brk: Vec<f64> = self
                    .breakpoints(t_final)
                    .into_iter()
                    .map(|t| t.powf(g))
                    .collect();
                let r = integrate_breaks(
                    |s: f64| {
                        if s == 0.0 {
                            return Ok(0.0);
                        }
                        let t = s.powf(1.0 / g);
                        let jac = t.powf(1.0 - g) / g;
                        Ok(self.diff_density(&limit, t)?.abs() * jac)
                    },
                    &brk,
                    NORM_TOL,
                    1e-10,
                )?;
                Ok(r.value)
            }
        }
    }

    /// Short identifier used in file names, e.g. `ml_0.5_0.75`.
    pub fn label(&self) -> String {
        match *self {
            Self::Zero => "zero".into(),
            Self::Dirac { .. } => "dirac".into(),
            Self::Abel { alpha, .. } => format!("abel_{alpha}"),
            Self::Exponential { .. } => "exponential".into(),
            Self::MittagLeffler { a, b, .. } => format!("ml_{a}_{b}"),
            Self::LimitAbel { alpha, .. } => format!("limit_abel_{alpha}"),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Zero => write!(f, "zero"),
            Self::Dirac { eps } => write!(f, "dirac:eps={eps}"),
            Self::Abel {
                alpha,
                eps,
                tau_theta,
            } => write!(f, "abel:alpha={alpha},eps={eps},tau_theta={tau_theta}"),
            Self::Exponential { eps } => write!(f, "exp:eps={eps}"),
            Self::MittagLeffler {
                a,
                b,
                eps,
                coupling,
            } => match coupling {
                Coupling::FixedTau(t) => write!(f, "ml:a={a},b={b},eps={eps},tau_theta={t}"),
                Coupling::FixedRatio(r) => write!(f, "ml:a={a},b={b},eps={eps},rho={r}"),
            },
            Self::LimitAbel { alpha, tau_theta } => {
                write!(f, "limit-abel:alpha={alpha},tau_theta={tau_theta}")
            }
        }
    }
}

/// Parses the compact form used on the command line:
/// `zero`, `dirac:eps=E`, `abel:alpha=A,eps=E[,tau_theta=T]`, `exp:eps=E`,
/// `ml:a=A,b=B,eps=E,(tau_theta=T|rho=R)`, `limit-abel:alpha=A[,tau_theta=T]`,
/// and the flux laws `gfe|gfe1|gfe2|gfe3:alpha=A,eps=E,(tau_theta=T|rho=R)`.
/// `tau_theta` defaults to 1 where optional.
impl std::str::FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in '{part}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let mut take = |k: &str| kv.remove(k);
        let need = |v: Option<f64>, k: &str| {
            v.ok_or_else(|| Error::Config(format!("kernel '{name}' needs {k}")))
        };
        let spec = match name.trim() {
            "zero" => Self::Zero,
            "dirac" => Self::dirac(need(take("eps"), "eps")?)?,
            "abel" => Self::abel(
                need(take("alpha"), "alpha")?,
                need(take("eps"), "eps")?,
                take("tau_theta").unwrap_or(1.0),
            )?,
            "exp" | "exponential" => Self::exponential(need(take("eps"), "eps")?)?,
            "limit-abel" | "limit_abel" => {
                Self::limit_abel(need(take("alpha"), "alpha")?, take("tau_theta").unwrap_or(1.0))?
            }
            "ml" | "gfe" | "gfe1" | "gfe2" | "gfe3" => {
                let (a, b) = if name == "ml" {
                    (need(take("a"), "a")?, need(take("b"), "b")?)
                } else {
                    let law = match name {
                        "gfe" => Law::Gfe,
                        "gfe1" => Law::GfeI,
                        "gfe2" => Law::GfeII,
                        _ => Law::GfeIII,
                    };
                    GfeLaw::new(law, need(take("alpha"), "alpha")?)?.ab()
                };
                let eps = need(take("eps"), "eps")?;
                match (take("rho"), take("tau_theta")) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config("give either rho or tau_theta, not both".into()))
                    }
                    (Some(rho), None) => Self::ml_fixed_ratio(a, b, eps, rho)?,
                    (None, tau) => Self::ml_fixed_tau(a, b, eps, tau.unwrap_or(1.0))?,
                }
            }
            other => return Err(Error::Config(format!("unknown kernel family '{other}'"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Config(format!("unexpected parameter '{k}' for '{name}'")));
        }
        Ok(spec)
    }
}

/// Flat serialized form: a family tag plus exactly that family's fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fixed_ratio: bool,
}

impl TryFrom<KernelConfig> for KernelSpec {
    type Error = Error;

    fn try_from(c: KernelConfig) -> Result<Self> {
        let fields = [
            ("a", c.a.is_some()),
            ("b", c.b.is_some()),
            ("alpha", c.alpha.is_some()),
            ("eps", c.eps.is_some()),
            ("tau_theta", c.tau_theta.is_some()),
            ("rho", c.rho.is_some()),
            ("fixed_ratio", c.fixed_ratio),
        ];
        let allowed: &[&str] = match c.family {
            Family::Zero => &[],
            Family::Dirac | Family::Exponential => &["eps"],
            Family::Abel => &["alpha", "eps", "tau_theta"],
            Family::LimitAbel => &["alpha", "tau_theta"],
            Family::MittagLeffler if c.fixed_ratio => &["a", "b", "eps", "rho", "fixed_ratio"],
            Family::MittagLeffler => &["a", "b", "eps", "tau_theta"],
        };
        for (name, set) in fields {
            if set != allowed.contains(&name) {
                let what = if set { "unexpected" } else { "missing" };
                return Err(Error::Config(format!(
                    "{what} field '{name}' for family {:?}",
                    c.family
                )));
            }
        }
        let v = |o: Option<f64>| o.expect("presence checked above");
        let spec = match c.family {
            Family::Zero => Self::Zero,
            Family::Dirac => Self::Dirac { eps: v(c.eps) },
            Family::Exponential => Self::Exponential { eps: v(c.eps) },
            Family::Abel => Self::Abel {
                alpha: v(c.alpha),
                eps: v(c.eps),
                tau_theta: v(c.tau_theta),
            },
            Family::LimitAbel => Self::LimitAbel {
                alpha: v(c.alpha),
                tau_theta: v(c.tau_theta),
            },
            Family::MittagLeffler => Self::MittagLeffler {
                a: v(c.a),
                b: v(c.b),
                eps: v(c.eps),
                coupling: if c.fixed_ratio {
                    Coupling::FixedRatio(v(c.rho))
                } else {
                    Coupling::FixedTau(v(c.tau_theta))
                },
            },
        };
        spec.validated()
    }
}

impl From<KernelSpec> for KernelConfig {
    fn from(s: KernelSpec) -> Self {
        let mut c = KernelConfig {
            family: s.family(),
            a: None,
            b: None,
            alpha: None,
            eps: None,
            tau_theta: None,
            rho: None,
            fixed_ratio: false,
        };
        match s {
            KernelSpec::Zero => {}
            KernelSpec::Dirac { eps } | KernelSpec::Exponential { eps } => c.eps = Some(eps),
            KernelSpec::Abel {
                alpha,
                eps,
                tau_theta,
            } => {
                c.alpha = Some(alpha);
                c.eps = Some(eps);
                c.tau_theta = Some(tau_theta);
            }
            KernelSpec::LimitAbel { alpha, tau_theta } => {
                c.alpha = Some(alpha);
                c.tau_theta = Some(tau_theta);
            }
            KernelSpec::MittagLeffler {
                a,
                b,
                eps,
                coupling,
            } => {
                c.a = Some(a);
                c.b = Some(b);
                c.eps = Some(eps);
                match coupling {
                    Coupling::FixedTau(t) => c.tau_theta = Some(t),
                    Coupling::FixedRatio(r) => {
                        c.rho = Some(r);
                        c.fixed_ratio = true;
                    }
                }
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn laplace_matches_quadrature() {
        // ∫ K(t) e^{-st} dt for real s, with t = u^{1/b} taming the endpoint
        let kernels = [
            KernelSpec::ml_fixed_tau(0.5, 0.75, 0.1, 1.0).unwrap(),
            KernelSpec::ml_fixed_ratio(0.8, 0.4, 0.05, 2.0).unwrap(),
            KernelSpec::exponential(0.2).unwrap(),
            KernelSpec::abel(0.5, 0.1, 1.5).unwrap(),
        ];
        for k in kernels {
            let g = match (k.ml_shape(), k.power_shape()) {
                (Some((_, b, _, _)), _) => b,
                (_, Some((al, _))) => al,
                _ => unreachable!(),
            };
            for s in [0.5, 3.0, 40.0] {
                let brk = [0.0, 1e-4, 1e-2, 0.1, 1.0, 5.0, 20.0, 60.0];
                let brk: Vec<f64> = brk.iter().map(|t: &f64| (t / s * 3.0).powf(g)).collect();
                let q = integrate_breaks(
                    |u: f64| {
                        if u == 0.0 {
                            return Ok(0.0);
                        }
                        let t = u.powf(1.0 / g);
                        Ok(k.eval(t)? * (-s * t).exp() * t.powf(1.0 - g) / g)
                    },
                    &brk,
                    1e-13,
                    1e-12,
                )
                .unwrap()
                .value;
                let l = k.laplace(Complex64::new(s, 0.0));
                assert!(l.im.abs() < 1e-15);
                assert!((l.re - q).abs() < 1e-9 * q.abs(), "{k} s={s}: {} vs {q}", l.re);
            }
        }
        let d = KernelSpec::dirac(0.3).unwrap();
        assert_eq!(d.laplace(Complex64::new(2.0, 1.0)), Complex64::new(0.3, 0.0));
    }

    #[test]
    fn gfe_table() {
        let k = KernelSpec::from_gfe(GfeLaw::new(Law::Gfe, 0.6).unwrap(), 0.1, 1.0).unwrap();
        assert_eq!(k.ml_shape().map(|s| (s.0, s.1)), Some((0.6, 0.6)));
        let k3 = KernelSpec::from_gfe(GfeLaw::new(Law::GfeIII, 0.4).unwrap(), 0.1, 1.0).unwrap();
        assert_eq!(k3.ml_shape().map(|s| (s.0, s.1)), Some((1.0, 0.4)));
        assert!(GfeLaw::new(Law::GfeI, 0.4).is_err());
        let k1 = GfeLaw::new(Law::GfeI, 0.75).unwrap();
        assert_eq!(k1.ab(), (0.75, 0.5));
        assert_eq!(GfeLaw::new(Law::GfeII, 0.3).unwrap().ab(), (0.3, 1.0));
    }

    #[test]
    fn point_values() {
        let e = KernelSpec::exponential(0.5).unwrap();
        assert!((e.eval(0.5).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let a = KernelSpec::abel(1.0, 0.3, 1.0).unwrap();
        assert!((a.eval(7.0).unwrap() - 0.3).abs() < 1e-15);
        assert!(KernelSpec::dirac(0.1).unwrap().eval(1.0).is_err());
        let s = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        assert!(matches!(s.eval(0.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn ml_one_one_is_exponential() {
        for &eps in &[0.01, 0.3, 1.0] {
            let m = KernelSpec::ml_fixed_tau(1.0, 1.0, eps, 2.0).unwrap();
            let e = KernelSpec::exponential(eps).unwrap();
            for i in 0..50 {
                let t = 0.05 * i as f64;
                assert!((m.eval(t).unwrap() - e.eval(t).unwrap()).abs() < 1e-12);
                assert!((m.conv_one(t).unwrap() - e.conv_one(t).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conv_one_values() {
        let d = KernelSpec::dirac(0.2).unwrap();
        assert_eq!(d.conv_one(1.0).unwrap(), 0.2);
        assert_eq!(d.conv_one(0.0).unwrap(), 0.0);
        assert_eq!(KernelSpec::Zero.conv_one(3.0).unwrap(), 0.0);
        let m = KernelSpec::ml_fixed_tau(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((m.conv_one(2.0).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
        let a = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        assert!((a.conv_one(1.0).unwrap() - 0.2 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn limits() {
        let a = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        assert_eq!(a.limit_kernel().unwrap(), KernelSpec::Zero);
        let m = KernelSpec::ml_fixed_tau(0.5, 0.75, 0.01, 2.0).unwrap();
        match m.limit_kernel().unwrap() {
            KernelSpec::LimitAbel { alpha, tau_theta } => {
                assert!((alpha - 0.25).abs() < 1e-15);
                assert!((tau_theta.powf(-alpha) - 2f64.powf(-0.25)).abs() < 1e-15);
            }
            other => panic!("unexpected limit {other:?}"),
        }
        let r = KernelSpec::ml_fixed_ratio(0.8, 0.4, 0.01, 1.0).unwrap();
        assert_eq!(r.limit_kernel().unwrap(), KernelSpec::Zero);
        let g = KernelSpec::ml_fixed_tau(0.6, 0.6, 0.01, 1.0).unwrap();
        assert_eq!(g.limit_kernel().unwrap(), KernelSpec::Dirac { eps: 1.0 });
        assert_eq!(KernelSpec::limit_abel(0.0, 3.0).unwrap(), KernelSpec::Dirac { eps: 1.0 });
        let div = KernelSpec::ml_fixed_tau(0.75, 0.5, 0.01, 1.0).unwrap();
        assert!(div.limit_kernel().is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(KernelSpec::abel(0.5, 0.1, 1.0).unwrap().predicted_rate().unwrap(), 1.0);
        let m = KernelSpec::ml_fixed_tau(0.5, 0.75, 0.1, 1.0).unwrap();
        assert!((m.predicted_rate().unwrap() - 0.25).abs() < 1e-15);
        let r = KernelSpec::ml_fixed_ratio(0.8, 0.4, 0.1, 1.0).unwrap();
        assert!((r.predicted_rate().unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn norms_closed_forms() {
        let a = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        let n = a.norms(1.0).unwrap();
        assert!((n.l1_or_tv - 0.2 / PI.sqrt()).abs() < 1e-14);
        let z = KernelSpec::Zero.norms(1.0).unwrap();
        assert_eq!((z.l1_or_tv, z.conv1_l1), (0.0, 0.0));
        let d = KernelSpec::dirac(0.3).unwrap().norms(2.0).unwrap();
        assert!((d.l1_or_tv - 0.3).abs() < 1e-15 && (d.conv1_l1 - 0.6).abs() < 1e-9);
    }

    #[test]
    fn parse_and_serde_round_trip() {
        let cases = [
            "zero",
            "dirac:eps=0.1",
            "abel:alpha=0.5,eps=0.1,tau_theta=1",
            "exp:eps=0.2",
            "ml:a=0.8,b=0.4,eps=0.01,rho=1",
            "ml:a=0.5,b=0.75,eps=0.01,tau_theta=2",
            "limit-abel:alpha=0.25,tau_theta=2",
        ];
        for c in cases {
            let k: KernelSpec = c.parse().unwrap();
            let back: KernelSpec = k.to_string().parse().unwrap();
            assert_eq!(k, back);
            let js = serde_json::to_string(&k).unwrap();
            let from_js: KernelSpec = serde_json::from_str(&js).unwrap();
            assert_eq!(k, from_js);
        }
        let g: KernelSpec = "gfe2:alpha=0.5,eps=0.1".parse().unwrap();
        assert_eq!(g.ml_shape().map(|s| (s.0, s.1)), Some((0.5, 1.0)));
        assert!("abel:alpha=0.5".parse::<KernelSpec>().is_err());
        assert!("ml:a=0.5,b=0.5,eps=0.1,rho=1,tau_theta=1".parse::<KernelSpec>().is_err());
    }

    #[test]
    fn config_rejects_foreign_fields() {
        let bad = r#"{"family":"abel","alpha":0.5,"eps":0.1,"tau_theta":1,"rho":1}"#;
        assert!(serde_json::from_str::<KernelSpec>(bad).is_err());
        let missing = r#"{"family":"mittag_leffler","a":0.5,"b":0.5,"eps":0.1}"#;
        assert!(serde_json::from_str::<KernelSpec>(missing).is_err());
        let ok = r#"{"family":"mittag_leffler","a":0.8,"b":0.4,"eps":0.1,"rho":1,"fixed_ratio":true}"#;
        let k: KernelSpec = serde_json::from_str(ok).unwrap();
        assert!(matches!(k, KernelSpec::MittagLeffler { coupling: Coupling::FixedRatio(_), .. }));
    }
}
