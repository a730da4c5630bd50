//! Bergman kernels of radial weights, projections, Hankel operators, the ∂̄-solution
//! operator and kernel-norm estimates.

mod dbar;
mod family;
mod kernel;
mod norms;
mod poly;
mod projection;
mod symbol;

pub use dbar::{dbar_solve, DbarSolution};
pub use family::{TestFamily, TestFunction};
pub use kernel::{KernelSeries, DEFAULT_DMAX, DEFAULT_KERNEL_TOL, MAX_MODULUS};
pub use norms::{
    atomic_function, kernel_deriv_norm, kernel_deriv_norm_proxy, kernel_norm,
    kernel_norm_quadrature, lp_norm, AtomicFunction, KernelNorm,
};
pub use poly::AnalyticPoly;
pub use projection::{
    hankel_apply, hankel_on_atom, project, project_values, HankelField, HankelPoly, Projection,
};
pub use symbol::{PolarTable, Smoothness, SymbolField};
