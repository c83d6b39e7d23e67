//! Norm growth and the running-sum stability diagnostic for a range of
//! regularization widths.

use std::sync::Arc;

use migfem::stepper::{run_solver, stability_diagnostic, BoundaryCondition, TimeGrid};
use migfem::{Mesh, ModelParams};

fn main() -> migfem::Result<()> {
    println!("{:>8} {:>10} {:>12} {:>10} {:>10}", "eps", "growth", "min sum", "violations", "integrated");
    for eps in [0.01, 0.05, 0.2, 1.0] {
        let params = ModelParams { epsilon: eps, ..ModelParams::default() };
        let mesh = Arc::new(Mesh::uniform(params.x_min, params.x_max, 256, 1)?);
        let history = run_solver(
            &params,
            mesh,
            TimeGrid::new(params.maturity, 128)?,
            &BoundaryCondition::frozen_payoff(&params),
        )?;
        let report = stability_diagnostic(&history, &params);
        println!(
            "{eps:>8} {:>10.6} {:>12.4} {:>10} {:>10}",
            history.norm_growth(),
            report.min_running_sum,
            report.violations,
            report.holds_integrated
        );
    }
    Ok(())
}
