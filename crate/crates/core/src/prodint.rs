//! Product-integration weights for convolutions against continuous piecewise
//! linear data on a uniform grid.
//!
//! For a lag kernel `κ = K ∗ 1^{∗n}` and nodal data `y_j`,
//! `∫₀^{t_m} κ(t_m - s) y(s) ds = Σ_j w(m - j, m) y_j`, where the weights come
//! from the moments of κ against the two halves of a hat function:
//!
//! ```text
//! rise_l = ∫_{l dt}^{(l+1) dt} κ(σ) (σ - l dt)/dt dσ       = κ₁(q) - (κ₂(q) - κ₂(p))/dt
//! fall_l = ∫_{l dt}^{(l+1) dt} κ(σ) ((l+1) dt - σ)/dt dσ = (κ₂(q) - κ₂(p))/dt - κ₁(p)
//! ```
//!
//! with `κ₁ = K ∗ 1^{∗(n+1)}`, `κ₂ = K ∗ 1^{∗(n+2)}` from their closed forms.
//! A bare point mass (`n = 0`) only has the lag-0 weight `fall_0 = ε`.
//! Far from the origin the differences cancel, so cells at lag ≥
//! [`FAR_LAG`] use Gauss-Legendre on the (smooth) κ itself.
//!
//! [`LagWeights::trapezoidal_cq`] builds the alternative convolution
//! quadrature weights generated by `κ̂((2/dt)(1-ζ)/(1+ζ))`. They inherit the
//! A-stability of the trapezoidal rule, so stiff modes stay bounded for any
//! dt. The oldest node carries a starting correction that makes the rule
//! exact on constants, which keeps second order when `y(0) ≠ 0`.

use crate::error::Result;
use crate::kernels::KernelSpec;
use crate::quad::gauss_legendre;
use num_complex::Complex64;
use std::f64::consts::PI;

/// First lag at which cell moments switch to Gauss-Legendre.
pub const FAR_LAG: usize = 16;
const GL_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct LagWeights {
    pub dt: f64,
    kind: Kind,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Hat-function moments.
    Hat { rise: Vec<f64>, fall: Vec<f64> },
    /// Convolution weights `w[lag]` plus the correction `end[m]` added at
    /// the oldest node.
    Toeplitz { w: Vec<f64>, end: Vec<f64> },
}

/// Taylor coefficients of `((1+ζ)/(1-ζ))^β`, from `(1-ζ²) f' = 2β f`.
fn trapezoid_power_coeffs(beta: f64, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    if n > 0 {
        c[0] = 1.0;
    }
    if n > 1 {
        c[1] = 2.0 * beta;
    }
    for l in 1..n.saturating_sub(1) {
        c[l + 1] = (2.0 * beta * c[l] + (l as f64 - 1.0) * c[l - 1]) / (l as f64 + 1.0);
    }
    c
}

/// Radius of the Cauchy contour is set so that `ρ^L` equals this.
const CONTOUR_ALIAS: f64 = 1e-14;
/// Contour nodes per weight.
const CONTOUR_OVERSAMPLE: usize = 4;

/// Coefficients of `F((2/dt)(1-ζ)/(1+ζ))` by the trapezoidal rule on the
/// circle `|ζ| = ρ`.
pub(crate) fn contour_weights<F>(symbol: F, dt: f64, n: usize) -> Vec<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let l_nodes = CONTOUR_OVERSAMPLE * n.max(1);
    let rho = CONTOUR_ALIAS.powf(1.0 / l_nodes as f64);
    let table: Vec<Complex64> = (0..l_nodes)
        .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / l_nodes as f64))
        .collect();
    let values: Vec<Complex64> = table
        .iter()
        .map(|e| {
            let z = rho * e.conj();
            symbol((1.0 - z) / (1.0 + z) * (2.0 / dt))
        })
        .collect();
    (0..n)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in values.iter().enumerate() {
                acc += v * table[(l * k) % l_nodes];
            }
            acc.re * rho.powi(-(l as i32)) / l_nodes as f64
        })
        .collect()
}

impl LagWeights {
    /// Weights for the lag kernel `K ∗ 1^{∗shift}` over `n_cells` cells.
    pub fn new(kernel: &KernelSpec, shift: u32, dt: f64, n_cells: usize) -> Result<Self> {
        let mut rise = vec![0.0; n_cells];
        let mut fall = vec![0.0; n_cells];
        if let KernelSpec::Zero = kernel {
            return Ok(Self::hat(dt, rise, fall));
        }
        if let (KernelSpec::Dirac { eps }, 0) = (kernel, shift) {
            fall[0] = *eps;
            return Ok(Self::hat(dt, rise, fall));
        }
        let (gx, gw) = gauss_legendre(GL_POINTS);
        let near = n_cells.min(FAR_LAG);
        let k1: Vec<f64> = (0..=near)
            .map(|l| kernel.antiderivative(shift + 1, l as f64 * dt))
            .collect::<Result<_>>()?;
        let k2: Vec<f64> = (0..=near)
            .map(|l| kernel.antiderivative(shift + 2, l as f64 * dt))
            .collect::<Result<_>>()?;
        for l in 0..near {
            let d = (k2[l + 1] - k2[l]) / dt;
            rise[l] = k1[l + 1] - d;
            fall[l] = d - k1[l];
        }
        for l in near..n_cells {
            let p = l as f64 * dt;
            let (mut r, mut f) = (0.0, 0.0);
            for (x, w) in gx.iter().zip(&gw) {
                let u = 0.5 * (x + 1.0);
                let v = kernel.antiderivative(shift, p + u * dt)?;
                r += 0.5 * w * v * u;
                f += 0.5 * w * v * (1.0 - u);
            }
            rise[l] = r * dt;
            fall[l] = f * dt;
        }
        Ok(Self::hat(dt, rise, fall))
    }

    fn hat(dt: f64, rise: Vec<f64>, fall: Vec<f64>) -> Self {
        LagWeights {
            dt,
            kind: Kind::Hat { rise, fall },
        }
    }

    /// Trapezoidal convolution quadrature for the lag kernel
    /// `K ∗ 1^{∗shift}` (`shift ≥ 1`) over `n_cells` cells.
    ///
    /// Point-mass and power kernels have the closed-form weights
    /// `s (dt/2)^β [ζ^l] ((1+ζ)/(1-ζ))^β`; Mittag-Leffler kernels go through
    /// a Cauchy integral of their Laplace transform.
    pub fn trapezoidal_cq(kernel: &KernelSpec, shift: u32, dt: f64, n_cells: usize) -> Result<Self> {
        if shift == 0 {
            return crate::error::domain("convolution quadrature needs shift >= 1");
        }
        let n = n_cells + 1;
        let power = match *kernel {
            KernelSpec::Zero => Some((0.0, 0.0)),
            KernelSpec::Dirac { eps } => Some((0.0, eps)),
            _ => kernel.power_shape(),
        };
        let w = match power {
            Some((alpha, scale)) => {
                let beta = alpha + shift as f64;
                let f = scale * (0.5 * dt).powf(beta);
                trapezoid_power_coeffs(beta, n).into_iter().map(|c| f * c).collect()
            }
            None => {
                let sh = shift as i32;
                contour_weights(|s| kernel.laplace(s) * s.powi(-sh), dt, n)
            }
        };
        let mut end = Vec::with_capacity(n);
        let mut partial = 0.0;
        for (m, wl) in w.iter().enumerate() {
            partial += wl;
            end.push(kernel.antiderivative(shift + 1, m as f64 * dt)? - partial);
        }
        Ok(LagWeights {
            dt,
            kind: Kind::Toeplitz { w, end },
        })
    }

    pub fn n_cells(&self) -> usize {
        match &self.kind {
            Kind::Hat { rise, .. } => rise.len(),
            Kind::Toeplitz { w, .. } => w.len() - 1,
        }
    }

    /// Weight of the node at lag `lag` in the integral up to node `m`.
    #[inline]
    pub fn weight(&self, lag: usize, m: usize) -> f64 {
        debug_assert!(lag <= m && m <= self.n_cells());
        match &self.kind {
            Kind::Hat { rise, fall } => {
                let mut w = 0.0;
                if lag >= 1 {
                    w += rise[lag - 1];
                }
                if lag < m {
                    w += fall[lag];
                }
                w
            }
            Kind::Toeplitz { w, end } => {
                if lag == m {
                    w[lag] + end[m]
                } else {
                    w[lag]
                }
            }
        }
    }

    /// `∫₀^{t_m} κ(t_m - s) y(s) ds` for nodal data `y[0..=m]`.
    pub fn apply(&self, y: &[f64], m: usize) -> f64 {
        (0..=m).map(|j| self.weight(m - j, m) * y[j]).sum()
    }

    /// The whole discrete convolution `(κ ∗ y)(t_m)`, m = 0..len.
    pub fn convolve(&self, y: &[f64]) -> Vec<f64> {
        (0..y.len()).map(|m| self.apply(y, m)).collect()
    }
}
