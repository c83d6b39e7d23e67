//! Solves to maturity and prints the price profile with step diagnostics.
//!
//! `cargo run --release --example solve -- [n_elements] [n_steps] [order]`

use std::sync::Arc;

use migfem::stepper::{run_solver, BoundaryCondition, TimeGrid};
use migfem::{Mesh, ModelParams};

fn main() -> migfem::Result<()> {
    let arg = |i: usize, d: usize| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (ne, nt, order) = (arg(1, 256), arg(2, 256), arg(3, 1));
    let params = ModelParams::default();
    let mesh = Arc::new(Mesh::uniform(params.x_min, params.x_max, ne, order)?);
    let grid = TimeGrid::new(params.maturity, nt)?;
    let history = run_solver(&params, mesh, grid, &BoundaryCondition::frozen_payoff(&params))?;

    let summary = history.summary();
    println!("{summary:#?}");
    println!("norm growth {:.6}", history.norm_growth());
    let last = history.last();
    for x in [-2.0, -1.0, -0.5, -0.25, 0.0, 0.5, 1.0] {
        println!("u({x:>5}, T) = {:.6}", last.value(x)?);
    }
    Ok(())
}
