use serde::Serialize;

use super::{default_rule, SolutionHistory};
use crate::model::ModelParams;

/// Per-level summary of `σ² - ∂(σ²)/∂x` and its running sum over levels.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StabilityStep {
    pub step: usize,
    pub time: f64,
    /// Smallest summand over the quadrature points at this level.
    pub min_summand: f64,
    /// Smallest running sum over the quadrature points.
    pub min_running_sum: f64,
    /// Location of `min_running_sum`.
    pub argmin_x: f64,
    /// `∫ (σ² - ∂σ²/∂x) dx` over the window at this level.
    pub integrated_summand: f64,
    /// Running sum of `integrated_summand`.
    pub integrated_running_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub steps: Vec<StabilityStep>,
    /// True if every pointwise running sum stayed non-negative at every level.
    pub holds_pointwise: bool,
    /// True if the window-integrated running sum stayed non-negative.
    pub holds_integrated: bool,
    /// Number of (level, point) pairs with a negative running sum.
    pub violations: usize,
    pub min_running_sum: f64,
    pub quadrature_points: Vec<f64>,
    pub final_running_sums: Vec<f64>,
}

/// Evaluates `Σ_{k<=n} [σ(u^k)² - ∂σ(u^k)²/∂x]` at the quadrature points,
/// with `∂σ²/∂x = 2σ (σ_L - σ_H) H_ε'(u - γe^{-δt}) u_x`.
pub fn stability_diagnostic(history: &SolutionHistory, params: &ModelParams) -> StabilityReport {
    let mesh = history.mesh();
    let rule = default_rule(mesh);
    let mut points = Vec::with_capacity(mesh.n_elements() * rule.len());
    let mut weights = Vec::with_capacity(points.capacity());
    let mut owners = Vec::with_capacity(points.capacity());
    for e in 0..mesh.n_elements() {
        let half = 0.5 * mesh.element_width(e);
        for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
            points.push(mesh.to_physical(e, xi));
            weights.push(w * half);
            owners.push(e);
        }
    }
    let mut running = vec![0.0; points.len()];
    let mut integrated_running = 0.0;
    let mut violations = 0;
    let mut steps = Vec::with_capacity(history.len().saturating_sub(1));
    for (n, field) in history.fields().iter().enumerate().skip(1) {
        let t = field.time();
        let mut min_summand = f64::INFINITY;
        let mut integrated = 0.0;
        for p in 0..points.len() {
            let (u, du) = field.eval_in_element(owners[p], points[p]);
            let sigma = params.volatility(u, t);
            let dsigma2 = 2.0 * sigma * params.volatility_slope(u, t) * du;
            let summand = sigma * sigma - dsigma2;
            min_summand = min_summand.min(summand);
            integrated += weights[p] * summand;
            running[p] += summand;
        }
        integrated_running += integrated;
        let (argmin, &min_running) = running
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("mesh has quadrature points");
        violations += running.iter().filter(|&&s| s < 0.0).count();
        steps.push(StabilityStep {
            step: n,
            time: t,
            min_summand,
            min_running_sum: min_running,
            argmin_x: points[argmin],
            integrated_summand: integrated,
            integrated_running_sum: integrated_running,
        });
    }
    let min_running_sum = steps
        .iter()
        .map(|s| s.min_running_sum)
        .fold(f64::INFINITY, f64::min);
    StabilityReport {
        holds_pointwise: violations == 0,
        holds_integrated: steps.iter().all(|s| s.integrated_running_sum >= 0.0),
        violations,
        min_running_sum,
        steps,
        quadrature_points: points,
        final_running_sums: running,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::Mesh;
    use crate::stepper::{run_solver, BoundaryCondition, TimeGrid};

    #[test]
    fn constant_volatility_sums_linearly() {
        let params = ModelParams {
            sigma_low_grade: 0.2,
            sigma_high_grade: 0.2,
            ..ModelParams::default()
        };
        let mesh = Arc::new(Mesh::uniform(-4.0, 4.0, 32, 1).unwrap());
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let h = run_solver(&params, mesh, grid, &BoundaryCondition::frozen_payoff(&params)).unwrap();
        let report = stability_diagnostic(&h, &params);
        assert!(report.holds_pointwise && report.holds_integrated);
        for (k, step) in report.steps.iter().enumerate() {
            let expected = (k + 1) as f64 * 0.04;
            assert!((step.min_running_sum - expected).abs() < 1e-14);
            assert!((step.min_summand - 0.04).abs() < 1e-15);
        }
        for s in &report.final_running_sums {
            assert!((s - 0.4).abs() < 1e-14);
        }
    }
}
