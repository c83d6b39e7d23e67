//! Tracks the migration boundary with both root routes and prints a few
//! levels next to their discrepancy.

use std::sync::Arc;

use migfem::boundary::{track_boundary, RootMethod, TrackOptions};
use migfem::stepper::{run_solver, BoundaryCondition, TimeGrid};
use migfem::{Mesh, ModelParams};

fn main() -> migfem::Result<()> {
    let params = ModelParams::default();
    let mesh = Arc::new(Mesh::uniform(params.x_min, params.x_max, 512, 1)?);
    let history = run_solver(
        &params,
        mesh,
        TimeGrid::new(params.maturity, 128)?,
        &BoundaryCondition::frozen_payoff(&params),
    )?;
    let path = track_boundary(&history, &params, TrackOptions::default());

    println!("{:>8} {:>14} {:>14}", "t", "direct", "green");
    let green: Vec<_> = path.by_method(RootMethod::Green).collect();
    for (d, g) in path.by_method(RootMethod::Direct).zip(&green).step_by(16) {
        println!("{:>8.4} {:>14.10} {:>14.10}", d.t, d.s_f, g.s_f);
    }
    println!("ln(γ/K) = {:.10}", (params.gamma / params.face_value).ln());
    println!("max discrepancy {:.3e}", path.max_discrepancy());
    println!("green converged {:.1}%, undamped steps {:.1}%",
        100.0 * path.converged_fraction(RootMethod::Green),
        100.0 * path.full_step_rate());
    path.write_csv(std::io::stdout().lock())?;
    Ok(())
}
