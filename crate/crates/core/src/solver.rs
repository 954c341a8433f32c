//! Quasilinear solve by Picard iteration on the coefficient field.
//!
//! The map `φ ↦ u` solves the linear problem with `m(φ) = 1 + 2kφ`,
//! expanded as `m(φ) u_tt + 2kφ_t u_t`. Iteration starts from the `k = 0`
//! solution, is guarded by the ball condition `4|k| sup|φ| ≤ 1` (which keeps
//! `m` in `[1/2, 3/2]`), and stops on the energy-norm distance between
//! consecutive iterates.

use crate::error::{domain, Error, Result};
use crate::kernels::KernelSpec;
use crate::quad::integrate;
use crate::volterra::{
    assemble, energy_norm, march, n_steps, CoefficientField, Scheme, SpectralBasis, Trajectory,
};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Initial data and forcing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum DataPreset {
    Zero,
    /// `u₀ = amplitude · v_mode`, `u₁ = velocity · v_mode`, no forcing.
    SingleMode {
        mode: usize,
        amplitude: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// Gaussian modal envelope `ξ₀,i = amplitude · exp(-((i-1)/width)²)`,
    /// `u₁ = 0`, no forcing. The super-algebraic decay keeps every Sobolev
    /// norm of the data finite and moderate.
    SmallGaussModes {
        amplitude: f64,
        #[serde(default = "default_gauss_width")]
        width: f64,
    },
    /// Explicit modal coefficients, no forcing.
    Modal { u0: Vec<f64>, u1: Vec<f64> },
    /// `u* = amplitude · sin(πx/L) cos t` with the forcing it induces.
    Manufactured { amplitude: f64 },
}

impl std::str::FromStr for DataPreset {
    type Err = Error;

    /// `zero`, `single-mode:mode=2,amplitude=0.1[,velocity=0]`,
    /// `small-gauss-modes:amplitude=0.1[,width=2]`,
    /// `manufactured:amplitude=0.05`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut fields = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
            fields.insert(k.trim().to_string(), v);
        }
        let mut take = |k: &str, default: Option<f64>| {
            fields
                .remove(k)
                .or(default)
                .ok_or_else(|| Error::Config(format!("preset '{name}' needs '{k}'")))
        };
        let preset = match name.trim() {
            "zero" => DataPreset::Zero,
            "single-mode" => {
                let mode = take("mode", None)?;
                if mode < 1.0 || mode.fract() != 0.0 {
                    return Err(Error::Config(format!("mode must be a positive integer, got {mode}")));
                }
                DataPreset::SingleMode {
                    mode: mode as usize,
                    amplitude: take("amplitude", None)?,
                    velocity: take("velocity", Some(0.0))?,
                }
            }
            "small-gauss-modes" => DataPreset::SmallGaussModes {
                amplitude: take("amplitude", None)?,
                width: take("width", Some(GAUSS_WIDTH))?,
            },
            "manufactured" => DataPreset::Manufactured {
                amplitude: take("amplitude", None)?,
            },
            other => return Err(Error::Config(format!("unknown data preset '{other}'"))),
        };
        if let Some(k) = fields.keys().next() {
            return Err(Error::Config(format!("unknown field '{k}' for preset '{name}'")));
        }
        Ok(preset)
    }
}

/// Default width (in modes) of the Gaussian modal envelope.
pub const GAUSS_WIDTH: f64 = 2.0;

fn default_gauss_width() -> f64 {
    GAUSS_WIDTH
}

fn default_length() -> f64 {
    1.0
}
fn default_relaxation() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PDEConfig {
    pub c: f64,
    pub k: f64,
    pub kernel: KernelSpec,
    pub data: DataPreset,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub n_modes: usize,
    #[serde(default = "default_length", rename = "L")]
    pub length: f64,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
    /// Picard relaxation factor; 1 is the plain iteration.
    #[serde(default = "default_relaxation")]
    pub relaxation: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

impl PDEConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return domain(format!("c must be positive, got {}", self.c));
        }
        if !(self.fp_tol > 0.0) {
            return domain(format!("fp_tol must be positive, got {}", self.fp_tol));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return domain(format!("relaxation must lie in (0, 1], got {}", self.relaxation));
        }
        if self.fp_max_iters == 0 {
            return domain("fp_max_iters must be at least 1");
        }
        n_steps(self.t_final, self.dt)?;
        self.kernel.validate()
    }
}

/// Modal initial data `(ξ₀, ξ₁)`.
pub fn initial_data(cfg: &PDEConfig, basis: &SpectralBasis) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = basis.n_modes;
    let zero = DVector::zeros(n);
    match &cfg.data {
        DataPreset::Zero => Ok((zero.clone(), zero)),
        DataPreset::SingleMode {
            mode,
            amplitude,
            velocity,
        } => {
            if *mode == 0 || *mode > n {
                return domain(format!("mode {mode} outside 1..={n}"));
            }
            let mut a = zero.clone();
            let mut b = zero;
            a[mode - 1] = *amplitude;
            b[mode - 1] = *velocity;
            Ok((a, b))
        }
        DataPreset::SmallGaussModes { amplitude, width } => {
            if !(*width > 0.0) {
                return domain(format!("width must be positive, got {width}"));
            }
            let a = DVector::from_fn(n, |i, _| amplitude * (-(i as f64 / width).powi(2)).exp());
            Ok((a, zero))
        }
        DataPreset::Modal { u0, u1 } => {
            if u0.len() > n || u1.len() > n {
                return domain(format!("modal data longer than the {n} available modes"));
            }
            if u0.iter().chain(u1).any(|v| !v.is_finite()) {
                return domain("modal data must be finite");
            }
            let mut a = zero.clone();
            let mut b = zero;
            a.rows_mut(0, u0.len()).copy_from_slice(u0);
            b.rows_mut(0, u1.len()).copy_from_slice(u1);
            Ok((a, b))
        }
        DataPreset::Manufactured { amplitude } => {
            let mut a = zero.clone();
            a[0] = *amplitude;
            Ok((a, zero))
        }
    }
}

/// `(K ∗ sin)(t) = ∫₀ᵗ (K∗1)(σ) cos(t - σ) dσ` (integration by parts moves
/// the possible singularity or point mass of K into the continuous K∗1).
pub fn kernel_conv_sin(kernel: &KernelSpec, t: f64) -> Result<f64> {
    if t == 0.0 || matches!(kernel, KernelSpec::Zero) {
        return Ok(0.0);
    }
    Ok(integrate(|s| Ok(kernel.conv_one(s)? * (t - s).cos()), 0.0, t, 1e-14, 1e-13)?.value)
}

/// Modal forcing `(f(t_m), v_i)` at the march nodes; empty for presets
/// without forcing.
///
/// For the manufactured solution `u* = A v₁ cos t`:
/// `f = A v₁ [(c²λ₁ - 1) cos t - λ₁ (K∗sin)(t)] - 2kA² v₁² cos 2t`.
pub fn forcing_table(cfg: &PDEConfig, basis: &SpectralBasis) -> Result<Vec<DVector<f64>>> {
    let DataPreset::Manufactured { amplitude } = cfg.data else {
        return Ok(Vec::new());
    };
    let steps = n_steps(cfg.t_final, cfg.dt)?;
    let dt = cfg.t_final / steps as f64;
    let n = basis.n_modes;
    let lam1 = basis.eigenvalues[0];
    let g = basis.gram();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    // (v₁², v_i) from the triple-product table
    let sq = basis.weighted_gram(&e1).row(0).transpose();
    (0..=steps)
        .map(|m| {
            let t = m as f64 * dt;
            let lin = amplitude
                * ((cfg.c * cfg.c * lam1 - 1.0) * t.cos() - lam1 * kernel_conv_sin(&cfg.kernel, t)?);
            let mut f = &sq * (-2.0 * cfg.k * amplitude * amplitude * (2.0 * t).cos());
            f[0] += g * lin;
            Ok(f)
        })
        .collect()
}

/// The exact manufactured trajectory on the march grid.
pub fn manufactured_exact(cfg: &PDEConfig, basis: &SpectralBasis) -> Result<Trajectory> {
    let DataPreset::Manufactured { amplitude } = cfg.data else {
        return domain("manufactured_exact needs the manufactured preset");
    };
    let steps = n_steps(cfg.t_final, cfg.dt)?;
    let dt = cfg.t_final / steps as f64;
    let n = basis.n_modes;
    let mode = |v: f64| {
        let mut x = DVector::zeros(n);
        x[0] = v;
        x
    };
    let t_grid: Vec<f64> = (0..=steps).map(|m| m as f64 * dt).collect();
    Ok(Trajectory {
        xi: t_grid.iter().map(|t| mode(amplitude * t.cos())).collect(),
        xi_t: t_grid.iter().map(|t| mode(-amplitude * t.sin())).collect(),
        mu: t_grid.iter().map(|t| mode(-amplitude * t.cos())).collect(),
        t_grid,
        diagnostics: crate::volterra::MarchDiagnostics {
            min_margin: 1.0,
            max_cond: 1.0,
        },
    })
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub traj: Trajectory,
    pub basis: SpectralBasis,
    pub iterations: usize,
    pub fp_residuals: Vec<f64>,
    /// `min (1 + 2ku)` over space and time nodes.
    pub ball_margin: f64,
    /// `4|k| sup|u| ≤ 1`.
    pub ball_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub iterations: usize,
    pub fp_residuals: Vec<f64>,
    pub ball_margin: f64,
    pub ball_ok: bool,
    pub energy_norm: f64,
    pub linf: f64,
    pub max_cond: f64,
}

impl SolveResult {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            iterations: self.iterations,
            fp_residuals: self.fp_residuals.clone(),
            ball_margin: self.ball_margin,
            ball_ok: self.ball_ok,
            energy_norm: energy_norm(&self.traj, &self.basis),
            linf: linf_estimate(&self.traj, &self.basis),
            max_cond: self.traj.diagnostics.max_cond,
        }
    }
}

/// `max` over time nodes and space of `|u(x, t)|`.
pub fn linf_estimate(traj: &Trajectory, basis: &SpectralBasis) -> f64 {
    traj.xi.iter().map(|x| basis.sup_abs(x)).fold(0.0, f64::max)
}

fn min_coefficient(traj: &Trajectory, basis: &SpectralBasis, k: f64) -> f64 {
    traj.xi
        .iter()
        .map(|x| {
            if k >= 0.0 {
                1.0 + 2.0 * k * basis.min_value(x)
            } else {
                1.0 - 2.0 * k * basis.min_value(&(-x))
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn check_ball(traj: &Trajectory, basis: &SpectralBasis, k: f64, iterate: usize) -> Result<()> {
    let value = 4.0 * k.abs() * linf_estimate(traj, basis);
    if value > 1.0 {
        return Err(Error::BallViolation {
            iterate,
            value,
            margin: min_coefficient(traj, basis, k),
        });
    }
    Ok(())
}

/// Solves the quasilinear problem.
pub fn solve(cfg: &PDEConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let basis = SpectralBasis::new(cfg.length, cfg.n_modes)?;
    let (xi0, xi1) = initial_data(cfg, &basis)?;
    let forcing = forcing_table(cfg, &basis)?;
    let steps = n_steps(cfg.t_final, cfg.dt)?;
    let dt = cfg.t_final / steps as f64;

    let lin = assemble(&basis, None, &cfg.kernel, forcing.clone(), 0.0, cfg.c)?.with_scheme(cfg.scheme);
    let mut phi = march(&lin, &xi0, &xi1, cfg.t_final, dt)?;
    let finish = |traj: Trajectory, iterations, fp_residuals| {
        let linf = linf_estimate(&traj, &basis);
        SolveResult {
            ball_margin: min_coefficient(&traj, &basis, cfg.k),
            ball_ok: 4.0 * cfg.k.abs() * linf <= 1.0,
            traj,
            basis: basis.clone(),
            iterations,
            fp_residuals,
        }
    };
    if cfg.k == 0.0 {
        return Ok(finish(phi, 1, Vec::new()));
    }

    let mut residuals = Vec::new();
    for it in 0..cfg.fp_max_iters {
        check_ball(&phi, &basis, cfg.k, it)?;
        let field = CoefficientField {
            dt,
            phi: phi.xi.clone(),
            phi_t: phi.xi_t.clone(),
        };
        let sys = assemble(&basis, Some(field), &cfg.kernel, forcing.clone(), cfg.k, cfg.c)?
            .with_scheme(cfg.scheme);
        let u = march(&sys, &xi0, &xi1, cfg.t_final, dt)?;
        let res = energy_norm(&u.diff(&phi)?, &basis);
        residuals.push(res);
        if res <= cfg.fp_tol {
            return Ok(finish(u, it + 1, residuals));
        }
        phi = if cfg.relaxation == 1.0 {
            u
        } else {
            relax(&phi, &u, cfg.relaxation)
        };
    }
    Err(Error::NonConvergence {
        iterations: cfg.fp_max_iters,
        residuals,
    })
}

fn relax(old: &Trajectory, new: &Trajectory, w: f64) -> Trajectory {
    let mix = |a: &[DVector<f64>], b: &[DVector<f64>]| -> Vec<DVector<f64>> {
        a.iter().zip(b).map(|(x, y)| x * (1.0 - w) + y * w).collect()
    };
    Trajectory {
        t_grid: new.t_grid.clone(),
        xi: mix(&old.xi, &new.xi),
        xi_t: mix(&old.xi_t, &new.xi_t),
        mu: mix(&old.mu, &new.mu),
        diagnostics: new.diagnostics,
    }
}

/// Data norms entering the smallness and regularity budgets. Sobolev norms
/// are the sine-basis graph norms `(L/2) Σ (1 + λ_i)^s ξ_i²`, equivalent
/// to the standard ones on functions satisfying the boundary conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub u0_h1_sq: f64,
    pub u1_l2_sq: f64,
    pub f_l1_l2_sq: f64,
    /// `‖u₀‖²_{H¹} + ‖u₁‖²_{L²} + ‖f‖²_{L¹(L²)}`.
    pub r0_sq: f64,
    pub u0_h3_sq: f64,
    pub u1_h2_sq: f64,
    pub f_h1_h1_sq: f64,
    /// `‖u₀‖²_{H³} + ‖u₁‖²_{H²} + ‖f‖²_{H¹(H¹)}`.
    pub r_sq: f64,
}

pub fn check_smallness(cfg: &PDEConfig) -> Result<SmallnessReport> {
    let basis = SpectralBasis::new(cfg.length, cfg.n_modes)?;
    let (u0, u1) = initial_data(cfg, &basis)?;
    let g = basis.gram();
    let hs = |x: &DVector<f64>, s: i32| -> f64 {
        g * x
            .iter()
            .zip(&basis.eigenvalues)
            .map(|(v, l)| (1.0 + l).powi(s) * v * v)
            .sum::<f64>()
    };
    let forcing = forcing_table(cfg, &basis)?;
    let (mut f_l1_l2, mut f_h1h1) = (0.0, 0.0);
    if !forcing.is_empty() {
        let steps = forcing.len() - 1;
        let dt = cfg.t_final / steps as f64;
        // table holds (f, v_i) = (L/2) f̂_i
        let coef: Vec<DVector<f64>> = forcing.iter().map(|f| f / g).collect();
        for m in 1..=steps {
            let (a, b) = (&coef[m - 1], &coef[m]);
            f_l1_l2 += 0.5 * dt * (hs(a, 0).sqrt() + hs(b, 0).sqrt());
            let ft = (b - a) / dt;
            f_h1h1 += 0.5 * dt * (hs(a, 1) + hs(b, 1)) + dt * hs(&ft, 1);
        }
    }
    let (u0_h1_sq, u1_l2_sq, f_l1_l2_sq) = (hs(&u0, 1), hs(&u1, 0), f_l1_l2 * f_l1_l2);
    let (u0_h3_sq, u1_h2_sq) = (hs(&u0, 3), hs(&u1, 2));
    Ok(SmallnessReport {
        u0_h1_sq,
        u1_l2_sq,
        f_l1_l2_sq,
        r0_sq: u0_h1_sq + u1_l2_sq + f_l1_l2_sq,
        u0_h3_sq,
        u1_h2_sq,
        f_h1_h1_sq: f_h1h1,
        r_sq: u0_h3_sq + u1_h2_sq + f_h1h1,
    })
}
