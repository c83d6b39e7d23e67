//! Mass and operator matrices on a small mesh, checked against the
//! continuous identities they must satisfy.

use std::sync::Arc;

use migfem::fem::{assemble_mass, assemble_operator};
use migfem::stepper::default_rule;
use migfem::{Mesh, ModelParams, SolutionField};

fn main() -> migfem::Result<()> {
    let params = ModelParams::default();
    let order = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let mesh = Arc::new(Mesh::uniform(params.x_min, params.x_max, 8, order)?);
    let rule = default_rule(&mesh);
    let mass = assemble_mass(&mesh, &rule)?;
    let u0 = SolutionField::interpolate(mesh.clone(), |x| params.payoff(x), 0.0)?;
    let op = assemble_operator(&mesh, &u0, 0.0, &params, &rule)?;

    let ones = vec![1.0; mesh.dof_count()];
    let total: f64 = mass.matvec(&ones).iter().sum();
    println!("order {order}, {} dofs, bandwidth ({}, {})", mesh.dof_count(), mass.lower_bandwidth(), mass.upper_bandwidth());
    println!("1ᵀ M 1 = {total:.12} (window length {})", params.x_max - params.x_min);
    // constants have no gradient, so A 1 vanishes row by row
    let a_one = op.matvec(&ones);
    println!("max |A 1| = {:.3e}", a_one.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    println!("max |M - Mᵀ| = {:.3e}", mass.add_scaled(-1.0, &mass.transpose())?.max_abs());
    Ok(())
}
