//! Westervelt equation with fractional and nonlocal memory kernels:
//! Mittag-Leffler special functions, kernel families and their limits,
//! coercivity checks, a spectral Volterra time march, a Picard solver for
//! the quasilinear problem and ε-sweeps towards the singular limit.

pub mod coercivity;
pub mod error;
pub mod experiments;
pub mod gamma;
pub mod kernels;
pub mod mlf;
pub mod prodint;
pub mod quad;
pub mod solver;
pub mod volterra;

pub use error::{Error, Result};
