//! Meshes, Lagrange bases, quadrature, band storage and Galerkin assembly.

pub mod assembly;
pub mod banded;
pub mod basis;
pub mod field;
pub mod mesh;
pub mod quadrature;

pub use assembly::{assemble_mass, assemble_operator, assemble_operator_with, AssemblyMode};
pub use banded::{residual_norm, solve_banded, BandedLu, BandedMatrix};
pub use basis::{reference_basis, MAX_ORDER};
pub use field::SolutionField;
pub use mesh::{build_mesh, Mesh};
pub use quadrature::{gauss_rule, QuadratureRule};
