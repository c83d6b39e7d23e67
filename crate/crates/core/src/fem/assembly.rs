//! Global mass matrix and the lagged-volatility operator `a_h`.
//!
//! For trial function `N_j` and test function `N_i` the operator entry is
//!
//! ```text
//! A[i][j] = ∫ σ²/2 N_j' N_i' dx + ∫ (r + s σ²/2) N_j' N_i dx + c ∫ N_j N_i dx
//! ```
//!
//! with `σ = σ(u_prev(x), t)` sampled at the quadrature points.

use rayon::prelude::*;

use super::banded::BandedMatrix;
use super::basis::BasisTable;
use super::field::SolutionField;
use super::mesh::Mesh;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Element count above which the operator is assembled element-parallel.
pub const PARALLEL_THRESHOLD: usize = 4096;

/// Elementwise evaluation strategy. Both paths scatter in element order and
/// produce bit-identical matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    #[default]
    Auto,
    Serial,
    Parallel,
}

fn check_mass_rule(mesh: &Mesh, rule: &QuadratureRule) -> Result<()> {
    if rule.exactness() < 2 * mesh.order() {
        return Err(Error::config(
            "quadrature",
            format!(
                "{}-point rule is exact to degree {}, mass integrand has degree {}",
                rule.len(),
                rule.exactness(),
                2 * mesh.order()
            ),
        ));
    }
    Ok(())
}

fn scatter(mesh: &Mesh, local: &[f64], out: &mut BandedMatrix) {
    let n_local = mesh.order() + 1;
    for (e, block) in local.chunks_exact(n_local * n_local).enumerate() {
        let base = e * mesh.order();
        for a in 0..n_local {
            for b in 0..n_local {
                out.add(base + a, base + b, block[a * n_local + b]);
            }
        }
    }
}

/// `M[i][j] = ∫ N_i N_j dx`.
pub fn assemble_mass(mesh: &Mesh, rule: &QuadratureRule) -> Result<BandedMatrix> {
    check_mass_rule(mesh, rule)?;
    let table = BasisTable::new(mesh.order(), &rule.points);
    let n_local = mesh.order() + 1;
    let mut local = vec![0.0; mesh.n_elements() * n_local * n_local];
    for (e, block) in local.chunks_exact_mut(n_local * n_local).enumerate() {
        let half = 0.5 * mesh.element_width(e);
        for (q, &w) in rule.weights.iter().enumerate() {
            let n = table.values(q);
            for a in 0..n_local {
                for b in 0..n_local {
                    block[a * n_local + b] += w * half * n[a] * n[b];
                }
            }
        }
    }
    let mut m = BandedMatrix::zeros(mesh.dof_count(), mesh.order(), mesh.order());
    scatter(mesh, &local, &mut m);
    Ok(m)
}

/// Everything the element kernel needs, resolved once per assembly.
struct OperatorKernel<'a> {
    mesh: &'a Mesh,
    coeffs: &'a [f64],
    table: BasisTable,
    rule: &'a QuadratureRule,
    params: &'a ModelParams,
    t: f64,
}

impl OperatorKernel<'_> {
    fn element(&self, e: usize, block: &mut [f64]) {
        let n_local = self.mesh.order() + 1;
        let width = self.mesh.element_width(e);
        let half = 0.5 * width;
        let jac = 2.0 / width;
        let dofs = &self.coeffs[self.mesh.element_dofs(e)];
        let reaction = self.params.reaction_coefficient;
        block.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in self.rule.weights.iter().enumerate() {
            let n = self.table.values(q);
            let dn = self.table.derivs(q);
            let u: f64 = dofs.iter().zip(n).map(|(c, v)| c * v).sum();
            let sigma = self.params.volatility(u, self.t);
            let diffusion = 0.5 * sigma * sigma;
            let convection = self.params.convection(sigma);
            let wq = w * half;
            for a in 0..n_local {
                let test = n[a];
                let test_dx = dn[a] * jac;
                for b in 0..n_local {
                    let trial_dx = dn[b] * jac;
                    block[a * n_local + b] += wq
                        * (diffusion * trial_dx * test_dx
                            + convection * trial_dx * test
                            + reaction * n[b] * test);
                }
            }
        }
    }
}

/// Operator matrix with the volatility frozen at `u_prev` and time `t`.
pub fn assemble_operator(
    mesh: &Mesh,
    u_prev: &SolutionField,
    t: f64,
    params: &ModelParams,
    rule: &QuadratureRule,
) -> Result<BandedMatrix> {
    assemble_operator_with(mesh, u_prev, t, params, rule, AssemblyMode::Auto)
}

pub fn assemble_operator_with(
    mesh: &Mesh,
    u_prev: &SolutionField,
    t: f64,
    params: &ModelParams,
    rule: &QuadratureRule,
    mode: AssemblyMode,
) -> Result<BandedMatrix> {
    if !u_prev.same_mesh(mesh) {
        return Err(Error::InconsistentInput(
            "u_prev lives on a different mesh".into(),
        ));
    }
    if rule.is_empty() {
        return Err(Error::config("quadrature", "empty rule"));
    }
    let kernel = OperatorKernel {
        mesh,
        coeffs: u_prev.coefficients(),
        table: BasisTable::new(mesh.order(), &rule.points),
        rule,
        params,
        t,
    };
    let n_local = mesh.order() + 1;
    let block_len = n_local * n_local;
    let mut local = vec![0.0; mesh.n_elements() * block_len];
    let parallel = match mode {
        AssemblyMode::Serial => false,
        AssemblyMode::Parallel => true,
        AssemblyMode::Auto => mesh.n_elements() >= PARALLEL_THRESHOLD,
    };
    if parallel {
        local
            .par_chunks_exact_mut(block_len)
            .enumerate()
            .for_each(|(e, block)| kernel.element(e, block));
    } else {
        for (e, block) in local.chunks_exact_mut(block_len).enumerate() {
            kernel.element(e, block);
        }
    }
    let mut a = BandedMatrix::zeros(mesh.dof_count(), mesh.order(), mesh.order());
    scatter(mesh, &local, &mut a);
    Ok(a)
}
