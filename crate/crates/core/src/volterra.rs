//! Semi-discrete linear problem in a Dirichlet sine basis and its time march.
//!
//! With `v_i(x) = sin(iπx/L)` and `u = Σ ξ_i v_i`, the linearized equation
//!
//! ```text
//! ((1 + 2kφ) u_t)_t - c² u_xx - K ∗ u_txx = f
//! ```
//!
//! becomes `M(t) ξ'' + c² D ξ + D (K ∗ ξ') + M_t(t) ξ' = f` with the Gram-weighted
//! matrices `M_ij = ((1+2kφ) v_i, v_j)`, `M_t,ij = (2kφ_t v_i, v_j)`,
//! `D = (L/2) diag(λ_i)`. Writing `μ = ξ''`, so that `ξ' = 1∗μ + ξ₁` and
//! `ξ = ξ₀ + tξ₁ + 1∗1∗μ`, gives a second-kind Volterra system in μ whose
//! kernel only involves `K ∗ 1`, which is continuous even for weakly
//! singular K. Two quadratures of the three convolutions are available (see
//! [`Scheme`]); both are second order on smooth solutions.

use crate::error::{domain, Error, Result};
use crate::kernels::KernelSpec;
use crate::prodint::LagWeights;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest admissible value of `1 + 2kφ`.
pub const M_FLOOR: f64 = 0.5;
/// Step matrices with a pivot ratio above this are rejected.
pub const MAX_COND: f64 = 1e12;

/// Time discretization of the convolutions in the μ-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Trapezoidal convolution quadrature (average-acceleration Newmark on
    /// the wave part). Unconditionally stable for positive-type kernels.
    #[default]
    TrapezoidalCq,
    /// Product integration with μ piecewise linear and exact kernel
    /// moments (linear-acceleration Newmark on the wave part). Stable only
    /// for `λ_max dt²` below about 12, and less with a weakly singular
    /// kernel.
    ProductIntegration,
}

#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub length: f64,
    pub n_modes: usize,
    pub eigenvalues: Vec<f64>,
    /// Uniform physical grid `x_g = gL/N`, g = 0..=N, N ≥ 4n.
    pub grid: Vec<f64>,
    /// `sin_table[(g, i)] = v_{i+1}(x_g)`.
    sin_table: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn new(length: f64, n_modes: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || n_modes == 0 {
            return domain(format!("basis needs L > 0 and n >= 1, got L = {length}, n = {n_modes}"));
        }
        let n_grid = (4 * n_modes).max(64);
        let grid: Vec<f64> = (0..=n_grid).map(|g| length * g as f64 / n_grid as f64).collect();
        let sin_table = DMatrix::from_fn(n_grid + 1, n_modes, |g, i| {
            crate::gamma::sin_pi((i + 1) as f64 * g as f64 / n_grid as f64)
        });
        let eigenvalues = (1..=n_modes).map(|i| (i as f64 * PI / length).powi(2)).collect();
        Ok(SpectralBasis {
            length,
            n_modes,
            eigenvalues,
            grid,
            sin_table,
        })
    }

    /// Gram factor: `(v_i, v_j) = (L/2) δ_ij`.
    pub fn gram(&self) -> f64 {
        0.5 * self.length
    }

    /// `D = (L/2) diag(λ_i)`.
    pub fn stiffness(&self) -> DVector<f64> {
        DVector::from_iterator(self.n_modes, self.eigenvalues.iter().map(|l| self.gram() * l))
    }

    /// Values on the physical grid.
    pub fn to_grid(&self, modal: &DVector<f64>) -> DVector<f64> {
        &self.sin_table * modal
    }

    /// Discrete sine transform back to modes; exact for the first N-1 modes.
    pub fn from_grid(&self, values: &DVector<f64>) -> DVector<f64> {
        let n_grid = self.grid.len() - 1;
        self.sin_table.transpose() * values * (2.0 / n_grid as f64)
    }

    /// `Σ ξ_i v_i(x)`.
    pub fn eval(&self, modal: &DVector<f64>, x: f64) -> f64 {
        modal
            .iter()
            .enumerate()
            .map(|(i, c)| c * crate::gamma::sin_pi((i + 1) as f64 * x / self.length))
            .sum()
    }

    /// Minimum over x of `sign · u(x)`: grid scan, then golden section in
    /// the bracketing cells.
    fn extremum(&self, modal: &DVector<f64>, sign: f64) -> f64 {
        let vals = self.to_grid(modal);
        let (g, v) = vals
            .iter()
            .enumerate()
            .map(|(g, v)| (g, sign * v))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grid is nonempty");
        let h = self.grid[1];
        let mut lo = (self.grid[g] - h).max(0.0);
        let mut hi = (self.grid[g] + h).min(self.length);
        let f = |x: f64| sign * self.eval(modal, x);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut c, mut d) = (hi - r * (hi - lo), lo + r * (hi - lo));
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..60 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - r * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + r * (hi - lo);
                fd = f(d);
            }
        }
        v.min(fc).min(fd)
    }

    /// `min_x u(x)`.
    pub fn min_value(&self, modal: &DVector<f64>) -> f64 {
        self.extremum(modal, 1.0)
    }

    /// `max_x |u(x)|`.
    pub fn sup_abs(&self, modal: &DVector<f64>) -> f64 {
        (-self.extremum(modal, -1.0)).max(-self.extremum(modal, 1.0)).max(0.0)
    }

    /// `∫ φ v_i v_j` exactly, from the triple products
    /// `∫ v_l v_i v_j = ¼[S(l+i-j) + S(l-i+j) - S(l+i+j) - S(l-i-j)]`,
    /// `S(m) = ∫₀ᴸ sin(mπx/L) dx`.
    pub fn weighted_gram(&self, phi: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n_modes;
        let np = phi.len() as i64;
        let two_l_over_pi = 2.0 * self.length / PI;
        let s = |m: i64| if m % 2 != 0 { two_l_over_pi / m as f64 } else { 0.0 };
        let off = 2 * n as i64;
        // F(m) = Σ_l φ_l S(l + m) for |m| ≤ 2n
        let f: Vec<f64> = (-off..=off)
            .map(|m| (1..=np).map(|l| phi[(l - 1) as usize] * s(l + m)).sum())
            .collect();
        let fm = |m: i64| f[(m + off) as usize];
        DMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i as i64 + 1, j as i64 + 1);
            0.25 * (fm(i - j) + fm(j - i) - fm(i + j) - fm(-i - j))
        })
    }
}

/// A time-dependent coefficient field `φ`, tabulated in modal form at the
/// march nodes together with its time derivative.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    /// Node spacing of the tabulation.
    pub dt: f64,
    pub phi: Vec<DVector<f64>>,
    pub phi_t: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct SemiDiscreteSystem {
    pub basis: SpectralBasis,
    pub c: f64,
    pub k: f64,
    pub kernel: KernelSpec,
    field: Option<CoefficientField>,
    /// Modal forcing `(f(t_m), v_i)` at the nodes; empty means zero.
    forcing: Vec<DVector<f64>>,
    /// `min_x (1 + 2kφ)` per node.
    pub margins: Vec<f64>,
    pub scheme: Scheme,
}

/// Builds the semi-discrete system and checks non-degeneracy at every node.
pub fn assemble(
    basis: &SpectralBasis,
    field: Option<CoefficientField>,
    kernel: &KernelSpec,
    forcing: Vec<DVector<f64>>,
    k: f64,
    c: f64,
) -> Result<SemiDiscreteSystem> {
    if !(c > 0.0) {
        return domain(format!("sound speed must be positive, got {c}"));
    }
    kernel.validate()?;
    let n = basis.n_modes;
    if forcing.iter().any(|f| f.len() != n) {
        return domain("forcing vectors must have one entry per mode");
    }
    let mut margins = Vec::new();
    if let Some(fld) = &field {
        if fld.phi.len() != fld.phi_t.len() {
            return domain("phi and phi_t must be tabulated on the same nodes");
        }
        for (m, p) in fld.phi.iter().enumerate() {
            let margin = if k >= 0.0 {
                1.0 + 2.0 * k * basis.min_value(p)
            } else {
                1.0 + 2.0 * k * (-basis.min_value(&(-p)))
            };
            if margin < M_FLOOR {
                return Err(Error::Degeneracy {
                    margin,
                    t: m as f64 * fld.dt,
                });
            }
            margins.push(margin);
        }
    }
    Ok(SemiDiscreteSystem {
        basis: basis.clone(),
        c,
        k,
        kernel: *kernel,
        field: if k == 0.0 { None } else { field },
        forcing,
        margins,
        scheme: Scheme::default(),
    })
}

impl SemiDiscreteSystem {
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// `M(t_m)`, the Gram matrix weighted by `1 + 2kφ(t_m)`.
    pub fn mass(&self, m: usize) -> DMatrix<f64> {
        let n = self.basis.n_modes;
        let mut mat = DMatrix::identity(n, n) * self.basis.gram();
        if let Some(f) = &self.field {
            mat += self.basis.weighted_gram(&f.phi[m]) * (2.0 * self.k);
        }
        mat
    }

    /// `M_t(t_m)`, the Gram matrix weighted by `2kφ_t(t_m)`; `None` if zero.
    pub fn mass_t(&self, m: usize) -> Option<DMatrix<f64>> {
        self.field
            .as_ref()
            .map(|f| self.basis.weighted_gram(&f.phi_t[m]) * (2.0 * self.k))
    }

    fn forcing_at(&self, m: usize) -> Option<&DVector<f64>> {
        self.forcing.get(m)
    }

    fn check_nodes(&self, n_nodes: usize) -> Result<()> {
        if let Some(f) = &self.field {
            if f.phi.len() != n_nodes {
                return domain(format!(
                    "coefficient field has {} nodes, march needs {n_nodes}",
                    f.phi.len()
                ));
            }
        }
        if !self.forcing.is_empty() && self.forcing.len() != n_nodes {
            return domain(format!(
                "forcing has {} nodes, march needs {n_nodes}",
                self.forcing.len()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchDiagnostics {
    pub min_margin: f64,
    pub max_cond: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t_grid: Vec<f64>,
    pub xi: Vec<DVector<f64>>,
    pub xi_t: Vec<DVector<f64>>,
    pub mu: Vec<DVector<f64>>,
    pub diagnostics: MarchDiagnostics,
}

impl Trajectory {
    pub fn dt(&self) -> f64 {
        self.t_grid[1] - self.t_grid[0]
    }

    /// Nodewise difference `self - other` on a shared grid.
    pub fn diff(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.t_grid.len() != other.t_grid.len() {
            return domain("trajectories live on different time grids");
        }
        let sub = |a: &[DVector<f64>], b: &[DVector<f64>]| -> Vec<DVector<f64>> {
            a.iter().zip(b).map(|(x, y)| x - y).collect()
        };
        Ok(Trajectory {
            t_grid: self.t_grid.clone(),
            xi: sub(&self.xi, &other.xi),
            xi_t: sub(&self.xi_t, &other.xi_t),
            mu: sub(&self.mu, &other.mu),
            diagnostics: self.diagnostics,
        })
    }

    /// Every `stride`-th node.
    pub fn subsample(&self, stride: usize) -> Trajectory {
        let pick = |v: &[DVector<f64>]| v.iter().step_by(stride).cloned().collect();
        Trajectory {
            t_grid: self.t_grid.iter().step_by(stride).copied().collect(),
            xi: pick(&self.xi),
            xi_t: pick(&self.xi_t),
            mu: pick(&self.mu),
            diagnostics: self.diagnostics,
        }
    }
}

/// Number of steps of size `dt` in `[0, T]`; `dt` must divide `T`.
pub fn n_steps(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final > 0.0 && dt > 0.0) {
        return domain(format!("need T > 0 and dt > 0, got T = {t_final}, dt = {dt}"));
    }
    let n = (t_final / dt).round();
    if n < 1.0 || (n * dt - t_final).abs() > 1e-9 * t_final {
        return domain(format!("dt = {dt} does not divide T = {t_final}"));
    }
    Ok(n as usize)
}

/// Marches `M μ + c² D (ξ₀ + tξ₁ + 1∗1∗μ) + D K∗(1∗μ + ξ₁) + M_t (1∗μ + ξ₁) = f`.
///
/// At each node the three convolutions use the weights of the system's
/// [`Scheme`] for the lag kernels `1`, `t` and `K ∗ 1`; the new μ solves
/// `[M + (c² w₂ + w_K) D + w₁ M_t] μ_m = rhs` by LU.
pub fn march(
    sys: &SemiDiscreteSystem,
    xi0: &DVector<f64>,
    xi1: &DVector<f64>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let n = sys.basis.n_modes;
    if xi0.len() != n || xi1.len() != n {
        return domain("initial data must have one entry per mode");
    }
    if xi0.iter().chain(xi1.iter()).any(|v| !v.is_finite()) {
        return domain("initial data must be finite");
    }
    let steps = n_steps(t_final, dt)?;
    let dt = t_final / steps as f64;
    sys.check_nodes(steps + 1)?;
    let unit = KernelSpec::Dirac { eps: 1.0 };
    let weights = |k: &KernelSpec, shift| match sys.scheme {
        Scheme::TrapezoidalCq => LagWeights::trapezoidal_cq(k, shift, dt, steps),
        Scheme::ProductIntegration => LagWeights::new(k, shift, dt, steps),
    };
    let w1 = weights(&unit, 1)?;
    let w2 = weights(&unit, 2)?;
    let wk = weights(&sys.kernel, 1)?;
    let d = sys.basis.stiffness();
    let c2 = sys.c * sys.c;
    let diag_only = sys.field.is_none();

    let t_grid: Vec<f64> = (0..=steps).map(|m| m as f64 * dt).collect();
    let mut mu: Vec<DVector<f64>> = Vec::with_capacity(steps + 1);
    let mut xi = Vec::with_capacity(steps + 1);
    let mut xi_t = Vec::with_capacity(steps + 1);
    let mut max_cond = 1.0f64;

    for m in 0..=steps {
        let t = t_grid[m];
        // history parts (j < m) of 1∗μ, 1∗1∗μ and (K∗1)∗μ at t_m
        let mut h1 = DVector::zeros(n);
        let mut h2 = DVector::zeros(n);
        let mut hk = DVector::zeros(n);
        for (j, mu_j) in mu.iter().enumerate() {
            let lag = m - j;
            h1.axpy(w1.weight(lag, m), mu_j, 1.0);
            h2.axpy(w2.weight(lag, m), mu_j, 1.0);
            hk.axpy(wk.weight(lag, m), mu_j, 1.0);
        }
        let (a1, a2, ak) = if m == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (w1.weight(0, m), w2.weight(0, m), wk.weight(0, m))
        };
        let k_conv_one = if m == 0 {
            sys.kernel.conv_one_at_zero_plus()
        } else {
            sys.kernel.conv_one(t)?
        };

        // D-part of the right-hand side, diagonal in modes
        let mut rhs = DVector::from_fn(n, |i, _| {
            -d[i] * (c2 * (xi0[i] + t * xi1[i] + h2[i]) + k_conv_one * xi1[i] + hk[i])
        });
        if let Some(f) = sys.forcing_at(m) {
            rhs += f;
        }
        let diag_shift = DVector::from_fn(n, |i, _| (c2 * a2 + ak) * d[i]);
        let mu_m = if diag_only {
            let g = sys.basis.gram();
            let piv = diag_shift.map(|s| g + s);
            let cond = piv.max() / piv.min();
            max_cond = max_cond.max(cond);
            if !(cond.is_finite() && cond < MAX_COND) {
                return Err(Error::SingularSolve { t, cond });
            }
            rhs.component_div(&piv)
        } else {
            let mut s = sys.mass(m);
            if let Some(mt) = sys.mass_t(m) {
                rhs -= &mt * (&h1 + xi1);
                s += mt * a1;
            }
            for i in 0..n {
                s[(i, i)] += diag_shift[i];
            }
            let lu = s.lu();
            let u = lu.u();
            let diag = u.diagonal().map(f64::abs);
            let cond = diag.max() / diag.min();
            max_cond = max_cond.max(cond);
            if !(cond.is_finite() && cond < MAX_COND) {
                return Err(Error::SingularSolve { t, cond });
            }
            lu.solve(&rhs).ok_or(Error::SingularSolve { t, cond })?
        };
        xi_t.push(xi1 + &h1 + &mu_m * a1);
        xi.push(xi0 + xi1 * t + &h2 + &mu_m * a2);
        mu.push(mu_m);
    }

    let min_margin = sys.margins.iter().copied().fold(1.0, f64::min);
    Ok(Trajectory {
        t_grid,
        xi,
        xi_t,
        mu,
        diagnostics: MarchDiagnostics {
            min_margin,
            max_cond,
        },
    })
}

/// `(max_t ‖u_t‖² + max_t ‖u‖²_{H¹})^{1/2}` over the nodes, by Parseval.
pub fn energy_norm(traj: &Trajectory, basis: &SpectralBasis) -> f64 {
    let g = basis.gram();
    let mut vel: f64 = 0.0;
    let mut pos: f64 = 0.0;
    for (x, v) in traj.xi.iter().zip(&traj.xi_t) {
        vel = vel.max(g * v.norm_squared());
        let h1: f64 = x
            .iter()
            .zip(&basis.eigenvalues)
            .map(|(xi, l)| (1.0 + l) * xi * xi)
            .sum();
        pos = pos.max(g * h1);
    }
    (vel + pos).sqrt()
}

/// Discrete wave energy `(L/2) Σ (ξ_t,i² + c² λ_i ξ_i²)` at node m.
pub fn wave_energy(traj: &Trajectory, basis: &SpectralBasis, c: f64, m: usize) -> f64 {
    let g = basis.gram();
    traj.xi[m]
        .iter()
        .zip(traj.xi_t[m].iter())
        .zip(&basis.eigenvalues)
        .map(|((x, v), l)| g * (v * v + c * c * l * x * x))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub dt: Vec<f64>,
    /// Energy-norm distance to the finest run, on the coarsest grid.
    pub errors: Vec<f64>,
    /// Observed orders between consecutive entries of `errors`.
    pub orders: Vec<f64>,
}

/// Self-convergence in the energy norm against the finest `dt`.
///
/// `build` returns the system for a given `dt` (the coefficient field and
/// forcing are tabulated on the corresponding grid).
pub fn convergence_study<F>(
    build: F,
    xi0: &DVector<f64>,
    xi1: &DVector<f64>,
    t_final: f64,
    dt_list: &[f64],
) -> Result<ConvergenceStudy>
where
    F: Fn(f64) -> Result<SemiDiscreteSystem>,
{
    if dt_list.len() < 3 {
        return domain("a convergence study needs at least three step sizes");
    }
    let coarse_steps = n_steps(t_final, dt_list[0])?;
    let mut runs = Vec::with_capacity(dt_list.len());
    for w in dt_list.windows(2) {
        if !(w[1] < w[0]) {
            return domain("dt_list must be decreasing");
        }
    }
    for &dt in dt_list {
        let steps = n_steps(t_final, dt)?;
        if steps % coarse_steps != 0 {
            return domain("dt_list must be nested");
        }
        let sys = build(dt)?;
        let traj = march(&sys, xi0, xi1, t_final, dt)?;
        runs.push((sys.basis.clone(), traj.subsample(steps / coarse_steps)));
    }
    let (basis, finest) = runs.last().expect("nonempty");
    let errors: Vec<f64> = runs[..runs.len() - 1]
        .iter()
        .map(|(_, tr)| tr.diff(finest).map(|d| energy_norm(&d, basis)))
        .collect::<Result<_>>()?;
    let orders = errors
        .windows(2)
        .zip(dt_list.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(ConvergenceStudy {
        dt: dt_list.to_vec(),
        errors,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;

    fn unit(n: usize, i: usize, v: f64) -> DVector<f64> {
        let mut x = DVector::zeros(n);
        x[i] = v;
        x
    }

    #[test]
    fn round_trip_band_limited() {
        let b = SpectralBasis::new(1.3, 16).unwrap();
        let x = DVector::from_fn(16, |i, _| ((i * 7 + 3) % 11) as f64 - 5.0);
        let back = b.from_grid(&b.to_grid(&x));
        assert!((back - x).amax() < 1e-12);
    }

    #[test]
    fn weighted_gram_against_quadrature() {
        let b = SpectralBasis::new(2.0, 6).unwrap();
        let phi = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.05, 0.0, 0.02]);
        let w = b.weighted_gram(&phi);
        let (gx, gw) = gauss_legendre(64);
        for i in 0..6 {
            for j in 0..6 {
                let mut q = 0.0;
                for (x, wt) in gx.iter().zip(&gw) {
                    let xx = 1.0 + x; // maps [-1,1] to [0,2]
                    let vi = (PI * (i + 1) as f64 * xx / 2.0).sin();
                    let vj = (PI * (j + 1) as f64 * xx / 2.0).sin();
                    q += wt * b.eval(&phi, xx) * vi * vj;
                }
                assert!((w[(i, j)] - q).abs() < 1e-12, "({i}, {j})");
            }
        }
    }

    #[test]
    fn mass_with_zero_k_is_gram() {
        let b = SpectralBasis::new(1.0, 4).unwrap();
        let s = assemble(&b, None, &KernelSpec::Zero, vec![], 0.0, 1.0).unwrap();
        assert_eq!(s.mass(0), DMatrix::identity(4, 4) * 0.5);
    }

    #[test]
    fn degenerate_field_rejected() {
        let b = SpectralBasis::new(1.0, 3).unwrap();
        let fld = CoefficientField {
            dt: 0.1,
            phi: vec![unit(3, 0, -2.0)],
            phi_t: vec![DVector::zeros(3)],
        };
        let r = assemble(&b, Some(fld), &KernelSpec::Zero, vec![], 0.2, 1.0);
        assert!(matches!(r, Err(Error::Degeneracy { .. })));
    }

    #[test]
    fn energy_norm_single_mode() {
        let b = SpectralBasis::new(1.0, 3).unwrap();
        let tr = Trajectory {
            t_grid: vec![0.0, 0.1],
            xi: vec![unit(3, 0, 1.0), unit(3, 0, 1.0)],
            xi_t: vec![DVector::zeros(3), DVector::zeros(3)],
            mu: vec![DVector::zeros(3), DVector::zeros(3)],
            diagnostics: MarchDiagnostics {
                min_margin: 1.0,
                max_cond: 1.0,
            },
        };
        let lam = PI * PI;
        assert!((energy_norm(&tr, &b) - ((1.0 + lam) / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sup_of_single_mode() {
        let b = SpectralBasis::new(1.0, 5).unwrap();
        assert!((b.sup_abs(&unit(5, 0, 0.3)) - 0.3).abs() < 1e-14);
        assert_eq!(b.sup_abs(&DVector::zeros(5)), 0.0);
    }

    #[test]
    fn harmonic_mode_second_order() {
        let b = SpectralBasis::new(1.0, 1).unwrap();
        let s = assemble(&b, None, &KernelSpec::Zero, vec![], 0.0, 1.0).unwrap();
        let w = PI;
        let err = |dt: f64| {
            let tr = march(&s, &unit(1, 0, 1.0), &unit(1, 0, 0.5), 2.0, dt).unwrap();
            tr.t_grid
                .iter()
                .zip(&tr.xi)
                .map(|(t, x)| (x[0] - ((w * t).cos() + 0.5 * (w * t).sin() / w)).abs())
                .fold(0.0, f64::max)
        };
        let r = err(0.01) / err(0.005);
        assert!((3.6..4.4).contains(&r), "ratio {r}");
    }

    #[test]
    fn reconstruction_is_exact() {
        let b = SpectralBasis::new(1.0, 2).unwrap();
        let k = KernelSpec::abel(0.5, 0.1, 1.0).unwrap();
        let s = assemble(&b, None, &k, vec![], 0.0, 1.0).unwrap();
        let tr = march(&s, &unit(2, 0, 1.0), &unit(2, 1, 0.3), 0.5, 0.01).unwrap();
        let dt = tr.dt();
        let mut acc = DVector::from_vec(vec![0.0, 0.3]);
        for m in 1..tr.mu.len() {
            acc += (&tr.mu[m - 1] + &tr.mu[m]) * (0.5 * dt);
            assert!((&acc - &tr.xi_t[m]).amax() < 1e-12);
        }
    }
}
