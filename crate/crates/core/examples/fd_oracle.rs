//! Explicit finite differences against the finite element solution, with
//! each convection and diffusion variant of the difference scheme.

use std::sync::Arc;

use migfem::stepper::{solve_to_maturity, BoundaryCondition, TimeGrid};
use migfem::verify::{
    cfl_min_steps, cfl_min_steps_for, error_norms, error_rule, explicit_fd_solve_with, FdConvection, FdDiffusion, FdOptions,
};
use migfem::{Mesh, ModelParams};

fn main() -> migfem::Result<()> {
    let params = ModelParams::default();
    let bc = BoundaryCondition::frozen_payoff(&params);
    let mesh = Arc::new(Mesh::uniform(params.x_min, params.x_max, 512, 1)?);
    let fem = solve_to_maturity(&params, mesh.clone(), TimeGrid::new(params.maturity, 512)?, &bc)?;

    let nx = 1025;
    let nt = cfl_min_steps(&params, nx);
    println!("nx = {nx}, smallest stable nt = {nt} (upwind {})", cfl_min_steps_for(&params, nx, FdConvection::Upwind));
    for convection in [FdConvection::Central, FdConvection::Upwind] {
        let nt = cfl_min_steps_for(&params, nx, convection);
        for diffusion in [FdDiffusion::Divergence, FdDiffusion::NonConservative] {
            let options = FdOptions { convection, diffusion, stride: nt };
            let fd = explicit_fd_solve_with(&params, nx, nt, &bc, options)?;
            let r = error_norms(&fem, &fd.final_profile(), &error_rule(&mesh))?;
            println!("{convection:?}/{diffusion:?}: L∞ {:.3e}, L2 {:.3e}", r.linf, r.l2);
        }
    }
    match explicit_fd_solve_with(&params, nx, nt / 2, &bc, FdOptions::default()) {
        Err(e) => println!("half the steps: {e}"),
        Ok(_) => println!("half the steps unexpectedly ran"),
    }
    Ok(())
}
