//! Acceptance gate. Each criterion prints one line; the process exits with a
//! failure status if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use migfem::boundary::{green_vector, track_boundary, RootMethod, TrackMethod, TrackOptions};
use migfem::cli::RunConfig;
use migfem::fem::{assemble_mass, assemble_operator, gauss_rule, reference_basis, MAX_ORDER};
use migfem::stepper::{run_solver, solve_to_maturity, stability_diagnostic, TimeGrid};
use migfem::verify::{
    cross_check, spatial_convergence_study, temporal_convergence_study, Norm,
};
use migfem::{Mesh, ModelParams, SolutionField};

type Verdict = (bool, String);

fn fmt_orders(orders: &[Option<f64>]) -> String {
    orders
        .iter()
        .map(|o| o.map_or("-".to_string(), |v| format!("{v:.3}")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn spatial_orders() -> (Verdict, Verdict) {
    let params = ModelParams::default();
    let start = Instant::now();
    let table = spatial_convergence_study(&params, &[1], &[64, 128, 256, 512, 1024], 4096)
        .expect("spatial study runs");
    let seconds = start.elapsed().as_secs_f64();
    let linf = table.pairwise(1, Norm::Linf);
    let finest: Vec<f64> = linf.iter().rev().take(2).map(|o| o.unwrap_or(f64::NAN)).collect();
    let pass_linf = finest.iter().all(|&o| o >= 1.8) && seconds <= 120.0;
    let fitted_l2 = table.fitted_for(1).and_then(|f| f.l2).unwrap_or(f64::NAN);
    let l2_pairs = table.pairwise(1, Norm::L2);
    let pass_l2 = fitted_l2 >= 1.0;
    (
        (
            pass_linf,
            format!(
                "spatial L∞ order, r=1, Ne 64..1024, Nt=4096: pairwise [{}], finest two must be ≥ 1.8; {seconds:.1} s (≤ 120 s)",
                fmt_orders(&linf)
            ),
        ),
        (
            pass_l2,
            format!(
                "spatial L2 order: least-squares slope {fitted_l2:.3} (floor 1.0), pairwise [{}]",
                fmt_orders(&l2_pairs)
            ),
        ),
    )
}

fn temporal_order() -> Verdict {
    let params = ModelParams::default();
    let start = Instant::now();
    let table = temporal_convergence_study(&params, &[64, 128, 256, 512, 1024], 2048, 1)
        .expect("temporal study runs");
    let seconds = start.elapsed().as_secs_f64();
    let pairs = table.pairwise(1, Norm::L2);
    let fitted = table.fitted_for(1).and_then(|f| f.l2).unwrap_or(f64::NAN);
    let errors: Vec<f64> = table.rows.iter().filter_map(|r| r.report.map(|r| r.l2)).collect();
    let monotone = errors.len() == 5 && errors.windows(2).all(|w| w[1] < w[0]);
    let pass = pairs.iter().all(|o| o.is_some_and(|v| v >= 0.9)) && fitted >= 0.9 && monotone && seconds <= 180.0;
    (
        pass,
        format!(
            "temporal L2 order, Ne=2048, Nt 64..1024: pairwise [{}], slope {fitted:.3} (floor 0.9), monotone {monotone}; {seconds:.1} s (≤ 180 s)",
            fmt_orders(&pairs)
        ),
    )
}

fn default_history() -> (RunConfig, migfem::stepper::SolutionHistory) {
    let config = RunConfig::default();
    let mesh = Arc::new(config.mesh().unwrap());
    let history = run_solver(
        &config.model,
        mesh,
        config.time_grid().unwrap(),
        &config.boundary_condition(),
    )
    .expect("default run succeeds");
    (config, history)
}

fn stability(history: &migfem::stepper::SolutionHistory, params: &ModelParams) -> Verdict {
    let growth = history.norm_growth();
    let report = stability_diagnostic(history, params);
    let pass = growth <= 1.1 && report.holds_pointwise;
    (
        pass,
        format!(
            "stability: max‖uⁿ‖/‖u⁰‖ = {growth:.6} (≤ 1.1); pointwise running sum min {:.3} with {} negative (level, point) pairs (need none); window-integrated sum non-negative: {}",
            report.min_running_sum, report.violations, report.holds_integrated
        ),
    )
}

fn free_boundary(history: &migfem::stepper::SolutionHistory, params: &ModelParams) -> Verdict {
    let path = track_boundary(
        history,
        params,
        TrackOptions {
            method: TrackMethod::Both,
            ..TrackOptions::default()
        },
    );
    let discrepancy = path.max_discrepancy();
    let fraction = path
        .converged_fraction(RootMethod::Direct)
        .min(path.converged_fraction(RootMethod::Green));
    let h = history.mesh().h();
    let s0 = path
        .by_method(RootMethod::Green)
        .find(|e| e.step == 0)
        .map(|e| e.s_f)
        .unwrap_or(f64::NAN);
    let s0_err = (s0 - 0.8f64.ln()).abs();
    let pass = discrepancy <= 1e-8 && fraction >= 0.95 && s0_err <= 2.0 * h * h;
    (
        pass,
        format!(
            "free boundary: max |direct - green| = {discrepancy:.2e} (≤ 1e-8), converged {:.1}% (≥ 95%), |S_f(0) - ln 0.8| = {s0_err:.2e} (≤ 2h² = {:.2e})",
            100.0 * fraction,
            2.0 * h * h
        ),
    )
}

fn cross_method() -> Verdict {
    let params = ModelParams::default();
    let bc = migfem::stepper::BoundaryCondition::frozen_payoff(&params);
    let start = Instant::now();
    let check = cross_check(&params, 1024, 1024, 2049, &bc).expect("cross check runs");
    let seconds = start.elapsed().as_secs_f64();
    let pass = check.report.linf <= 2e-3 && seconds <= 120.0;
    (
        pass,
        format!(
            "FEM (Ne=1024, Nt=1024) vs explicit FD (nx=2049, nt={}): L∞ {:.3e} (≤ 2e-3); {seconds:.1} s (≤ 120 s)",
            (params.maturity / check.fd.dt).round(),
            check.report.linf
        ),
    )
}

fn regularization() -> Verdict {
    let base = ModelParams::default();
    let bc = migfem::stepper::BoundaryCondition::frozen_payoff(&base);
    let mesh = Arc::new(Mesh::uniform(base.x_min, base.x_max, 2048, 1).unwrap());
    let grid = TimeGrid::new(base.maturity, 1024).unwrap();
    let solve = |eps: f64| {
        let p = ModelParams {
            epsilon: eps,
            ..base.clone()
        };
        solve_to_maturity(&p, mesh.clone(), grid, &bc).expect("run succeeds")
    };
    let gaps: Vec<f64> = [4e-2, 2e-2, 1e-2]
        .iter()
        .map(|&eps| {
            let a = solve(eps);
            let b = solve(eps / 2.0);
            a.coefficients()
                .iter()
                .zip(b.coefficients())
                .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
        })
        .collect();
    let pass = gaps.windows(2).all(|w| w[1] <= w[0]);
    (
        pass,
        format!(
            "regularization: ‖u_ε - u_ε/2‖∞ for ε = 4e-2, 2e-2, 1e-2: {:.3e}, {:.3e}, {:.3e} (nonincreasing)",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

/// Closed-form element matrices on `[a, a + h]` for constant σ.
fn symbolic_blocks(order: usize, h: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    match order {
        1 => (
            vec![vec![h / 3.0, h / 6.0], vec![h / 6.0, h / 3.0]],
            vec![vec![1.0 / h, -1.0 / h], vec![-1.0 / h, 1.0 / h]],
            // ∫ N_i N_j'
            vec![vec![-0.5, 0.5], vec![-0.5, 0.5]],
        ),
        2 => (
            vec![
                vec![4.0 * h / 30.0, 2.0 * h / 30.0, -h / 30.0],
                vec![2.0 * h / 30.0, 16.0 * h / 30.0, 2.0 * h / 30.0],
                vec![-h / 30.0, 2.0 * h / 30.0, 4.0 * h / 30.0],
            ],
            vec![
                vec![7.0 / (3.0 * h), -8.0 / (3.0 * h), 1.0 / (3.0 * h)],
                vec![-8.0 / (3.0 * h), 16.0 / (3.0 * h), -8.0 / (3.0 * h)],
                vec![1.0 / (3.0 * h), -8.0 / (3.0 * h), 7.0 / (3.0 * h)],
            ],
            vec![
                vec![-0.5, 2.0 / 3.0, -1.0 / 6.0],
                vec![-2.0 / 3.0, 0.0, 2.0 / 3.0],
                vec![1.0 / 6.0, -2.0 / 3.0, 0.5],
            ],
        ),
        _ => unreachable!(),
    }
}

fn unit_oracles(history: &migfem::stepper::SolutionHistory) -> Verdict {
    let mut worst_matrix = 0.0_f64;
    let sigma: f64 = 0.25;
    let params = ModelParams {
        sigma_low_grade: sigma,
        sigma_high_grade: sigma,
        x_min: 0.3,
        x_max: 0.3 + 0.7,
        ..ModelParams::default()
    };
    for order in 1..=2 {
        let h = 0.7;
        let mesh = Arc::new(Mesh::uniform(0.3, 0.3 + h, 1, order).unwrap());
        let rule = gauss_rule(order + 1).unwrap();
        let u = SolutionField::interpolate(mesh.clone(), |x| x, 0.0).unwrap();
        let m = assemble_mass(&mesh, &rule).unwrap();
        let a = assemble_operator(&mesh, &u, 0.0, &params, &rule).unwrap();
        let (mass, stiff, conv) = symbolic_blocks(order, h);
        let d = 0.5 * sigma * sigma;
        let c = params.rate + 0.5 * sigma * sigma;
        for i in 0..=order {
            for j in 0..=order {
                worst_matrix = worst_matrix.max((m.get(i, j) - mass[i][j]).abs());
                let expected = d * stiff[i][j] + c * conv[i][j];
                worst_matrix = worst_matrix.max((a.get(i, j) - expected).abs());
            }
        }
    }

    let mut quadrature_ok = true;
    for n in 1..=10 {
        let rule = gauss_rule(n).unwrap();
        for k in 0..=(2 * n) {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let got = rule.integrate(|x| x.powi(k as i32));
            let err = (got - exact).abs();
            if k < 2 * n {
                quadrature_ok &= err < 1e-13;
            } else {
                quadrature_ok &= err > 1e-6;
            }
        }
    }

    let mut worst_unity = 0.0_f64;
    for order in 1..=MAX_ORDER {
        for k in 0..=200 {
            let xi = -1.0 + 2.0 * k as f64 / 200.0;
            let (values, derivs) = reference_basis(order, xi).unwrap();
            worst_unity = worst_unity.max((values.iter().sum::<f64>() - 1.0).abs());
            worst_unity = worst_unity.max(derivs.iter().sum::<f64>().abs());
        }
    }

    let mut worst_green = 0.0_f64;
    for n in [1, history.len() / 2, history.len() - 1] {
        let system = history.step_system(n).unwrap();
        let field = &history.fields()[n];
        let bu = system.matrix.matvec(field.coefficients());
        for s in [-0.9, -0.2231, 0.0, 0.137, 2.5] {
            let g = green_vector(&system.matrix, field, s).unwrap();
            worst_green = worst_green.max((g.apply(&bu) - field.value(s).unwrap()).abs());
        }
    }

    let pass = worst_matrix <= 1e-12 && quadrature_ok && worst_green <= 1e-10 && worst_unity <= 1e-13;
    (
        pass,
        format!(
            "unit oracles: element matrices {worst_matrix:.1e} (≤ 1e-12), Gauss exactness 2n-1 for n ≤ 10: {quadrature_ok}, gᵀ(Bu) - u_h(s) {worst_green:.1e} (≤ 1e-10), partition of unity {worst_unity:.1e} (≤ 1e-13)"
        ),
    )
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    }
}

fn main() -> ExitCode {
    let total = Instant::now();
    let (spatial_linf, spatial_l2) = match panic::catch_unwind(spatial_orders) {
        Ok(pair) => pair,
        Err(_) => (
            (false, "spatial study panicked".to_string()),
            (false, "spatial study panicked".to_string()),
        ),
    };
    let (config, history) = default_history();
    let results = [
        spatial_linf,
        spatial_l2,
        guarded(temporal_order),
        guarded(|| stability(&history, &config.model)),
        guarded(|| free_boundary(&history, &config.model)),
        guarded(cross_method),
        guarded(regularization),
        guarded(|| unit_oracles(&history)),
    ];
    let mut failed = 0;
    for (i, (pass, detail)) in results.iter().enumerate() {
        println!("[{}] criterion {}: {detail}", if *pass { "PASS" } else { "FAIL" }, i + 1);
        if !pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
