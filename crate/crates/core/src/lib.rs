//! Galerkin finite elements for the regularized credit-rating-migration
//! problem
//!
//! ```text
//! u_t - (σ²/2 u_x)_x + (r + σ²/2) u_x = 0,   σ = σ_H + (σ_L - σ_H) H_ε(u - γ e^{-δt})
//! u(x, 0) = min(1, e^x)
//! ```
//!
//! on a truncated log-moneyness window, advanced by backward Euler with the
//! volatility lagged one step. The free boundary `S_f(t)`, where the
//! solution meets the threshold `γ e^{-δt}`, is located either directly on
//! the finite element solution or through the discrete adjoint (Green)
//! vector of each step system.
//!
//! Modules:
//! - [`model`]: parameters, regularized Heaviside, volatility, initial data
//! - [`fem`]: mesh, basis, quadrature, band matrices, assembly
//! - [`stepper`]: Dirichlet data, backward Euler, the time loop, stability diagnostic
//! - [`boundary`]: crossing detection, Green vectors, damped Newton tracking
//! - [`verify`]: explicit finite-difference oracle, error norms, convergence studies
//! - [`cli`]: JSON configuration and the `solve` / `converge` / `boundary` commands

pub mod boundary;
pub mod cli;
pub mod error;
pub mod fem;
pub mod model;
pub mod stepper;
pub mod verify;

pub use error::{Error, Result};
pub use fem::{build_mesh, BandedMatrix, Mesh, SolutionField};
pub use model::ModelParams;
