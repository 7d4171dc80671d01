//! Fourier-Galerkin spectral solver for the spatially homogeneous Landau
//! equation `d_t f = Q(f, f)` on the periodized velocity box `[-L, L]^3`.
//!
//! The crate is organized bottom-up:
//!
//! * [`grid`]: discretization parameters and mode indexing
//! * [`field`]: spectral/physical fields, transforms, Galerkin truncation,
//!   cutoff multiplication and truncated convolution
//! * [`kernel`]: the Fourier symbol `beta(l, m)` and its separable tables
//! * [`collision`]: the periodic collision operator and the scheme RHS
//! * [`integrator`]: fixed-step RK4 and the simulation loop
//! * [`diagnostics`]: moments, entropies, Fisher information, error norms
//! * [`exact`]: closed-form reference states

pub mod collision;
pub mod diagnostics;
pub mod error;
pub mod exact;
mod fft;
pub mod field;
pub mod grid;
pub mod integrator;
pub mod kernel;
pub mod quadrature;

pub use collision::{q_periodic_direct, q_periodic_fast, q_scheme_rhs, CollisionOperator};
pub use error::{Result, SolverError};
pub use field::{
    apply_cutoff, psi_r, to_physical, to_spectral, truncated_convolution, PhysicalField,
    SpectralField,
};
pub use grid::{CutoffShape, GridSpec, Padding};
pub use kernel::{
    beta_coulomb, beta_quadrature, build_kernel_tables, BetaParams, KernelTables, RadialBeta,
};
