//! Backward Euler in time with the volatility lagged one step.
//!
//! Each step solves `(M + Δt A(u^{n-1})) u^n = M u^{n-1}` with Dirichlet
//! rows at both ends of the window.

mod stability;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{
    assemble_mass, assemble_operator, gauss_rule, residual_norm, BandedMatrix, Mesh,
    QuadratureRule, SolutionField,
};
use crate::model::ModelParams;

pub use stability::{stability_diagnostic, StabilityReport, StabilityStep};

/// Uniform time levels `t_n = n Δt`, `Δt = T / N_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    maturity: f64,
    n_steps: usize,
}

impl TimeGrid {
    /// `n_steps` may be zero only for a zero horizon.
    pub fn new(maturity: f64, n_steps: usize) -> Result<Self> {
        if !(maturity.is_finite() && maturity >= 0.0) {
            return Err(Error::invalid("maturity", "must be finite and non-negative"));
        }
        if maturity > 0.0 && n_steps == 0 {
            return Err(Error::invalid("n_steps", "need at least one step"));
        }
        Ok(TimeGrid {
            maturity,
            n_steps: if maturity == 0.0 { 0 } else { n_steps },
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    pub fn dt(&self) -> f64 {
        if self.n_steps == 0 {
            0.0
        } else {
            self.maturity / self.n_steps as f64
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.n_steps {
            self.maturity
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|n| self.time(n))
    }
}

type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Dirichlet data at `x_min` and `x_max`.
#[derive(Clone)]
pub struct BoundaryCondition {
    left: BoundaryFn,
    right: BoundaryFn,
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCondition")
            .field("left(0)", &(self.left)(0.0))
            .field("right(0)", &(self.right)(0.0))
            .finish()
    }
}

impl BoundaryCondition {
    pub fn new(
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BoundaryCondition {
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn constant(left: f64, right: f64) -> Self {
        BoundaryCondition::new(move |_| left, move |_| right)
    }

    /// Payoff values at the window ends, frozen in time.
    pub fn frozen_payoff(params: &ModelParams) -> Self {
        BoundaryCondition::constant(params.payoff(params.x_min), params.payoff(params.x_max))
    }

    pub fn left_value(&self, t: f64) -> f64 {
        (self.left)(t)
    }

    pub fn right_value(&self, t: f64) -> f64 {
        (self.right)(t)
    }
}

/// Replaces the first and last rows by identity rows and eliminates the
/// known boundary values from the interior rows.
pub fn apply_dirichlet(
    matrix: &BandedMatrix,
    rhs: &[f64],
    bc: &BoundaryCondition,
    t: f64,
) -> (BandedMatrix, Vec<f64>) {
    let n = matrix.dim();
    let mut m = matrix.clone();
    let mut b = rhs.to_vec();
    let last = n - 1;
    let (left, right) = (bc.left_value(t), bc.right_value(t));
    for i in 1..last {
        if m.in_band(i, 0) {
            b[i] -= m.get(i, 0) * left;
            m.set(i, 0, 0.0);
        }
        if m.in_band(i, last) {
            b[i] -= m.get(i, last) * right;
            m.set(i, last, 0.0);
        }
    }
    for row in [0, last] {
        for j in m.row_columns(row) {
            m.set(row, j, 0.0);
        }
        m.set(row, row, 1.0);
    }
    b[0] = left;
    b[last] = right;
    (m, b)
}

/// One backward Euler system `B u^n = rhs` after Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct StepSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

pub fn step_system(
    mass: &BandedMatrix,
    operator: &BandedMatrix,
    u_prev: &SolutionField,
    dt: f64,
    bc: &BoundaryCondition,
    t_next: f64,
) -> Result<StepSystem> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    if mass.dim() != u_prev.coefficients().len() || operator.dim() != mass.dim() {
        return Err(Error::InconsistentInput(
            "matrices and field have different dimensions".into(),
        ));
    }
    let lhs = mass.add_scaled(dt, operator)?;
    let rhs = mass.matvec(u_prev.coefficients());
    let (matrix, rhs) = apply_dirichlet(&lhs, &rhs, bc, t_next);
    Ok(StepSystem { matrix, rhs })
}

/// Advances `u_prev` by one implicit step. The operator must already carry
/// the volatility frozen at `u_prev`.
pub fn backward_euler_step(
    mass: &BandedMatrix,
    operator: &BandedMatrix,
    u_prev: &SolutionField,
    dt: f64,
    bc: &BoundaryCondition,
    t_next: f64,
) -> Result<SolutionField> {
    let system = step_system(mass, operator, u_prev, dt, bc, t_next)?;
    let u = system.matrix.factor()?.solve(&system.rhs);
    SolutionField::new(u_prev.mesh().clone(), u, t_next)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    /// Max-norm residual of the linear solve.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub l2_norm: f64,
}

/// All time levels of one run, including the interpolated initial data.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    mesh: Arc<Mesh>,
    params: ModelParams,
    grid: TimeGrid,
    bc: BoundaryCondition,
    fields: Vec<SolutionField>,
    diagnostics: Vec<StepDiagnostics>,
}

impl SolutionHistory {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn boundary_condition(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn fields(&self) -> &[SolutionField] {
        &self.fields
    }

    pub fn initial(&self) -> &SolutionField {
        &self.fields[0]
    }

    pub fn last(&self) -> &SolutionField {
        self.fields.last().expect("history holds the initial field")
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Per-level diagnostics; entry 0 describes the initial data.
    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    /// `max_n ||u^n|| / ||u^0||` in L2.
    pub fn norm_growth(&self) -> f64 {
        let initial = self.diagnostics[0].l2_norm;
        let max = self
            .diagnostics
            .iter()
            .map(|d| d.l2_norm)
            .fold(0.0, f64::max);
        max / initial
    }

    /// Rebuilds the Dirichlet-eliminated system that produced level `n >= 1`.
    pub fn step_system(&self, n: usize) -> Result<StepSystem> {
        if n == 0 || n >= self.fields.len() {
            return Err(Error::InconsistentInput(format!(
                "no step system for level {n}"
            )));
        }
        let rule = default_rule(&self.mesh);
        let mass = assemble_mass(&self.mesh, &rule)?;
        let prev = &self.fields[n - 1];
        let operator = assemble_operator(&self.mesh, prev, self.grid.time(n - 1), &self.params, &rule)?;
        step_system(&mass, &operator, prev, self.grid.dt(), &self.bc, self.grid.time(n))
    }

    /// Surface data, one `t,x,u` row per node and level, 17 significant digits.
    pub fn write_surface_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "x", "u"])?;
        for field in &self.fields {
            let t = format!("{:.16e}", field.time());
            for (x, u) in self.mesh.node_coords().iter().zip(field.coefficients()) {
                w.write_record([t.as_str(), &format!("{x:.16e}"), &format!("{u:.16e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> HistorySummary {
        HistorySummary {
            n_elements: self.mesh.n_elements(),
            order: self.mesh.order(),
            dof_count: self.mesh.dof_count(),
            n_steps: self.grid.n_steps(),
            dt: self.grid.dt(),
            norm_growth: self.norm_growth(),
            steps: self.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistorySummary {
    pub n_elements: usize,
    pub order: usize,
    pub dof_count: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub norm_growth: f64,
    pub steps: Vec<StepDiagnostics>,
}

/// `r + 1` Gauss points per element.
pub fn default_rule(mesh: &Mesh) -> QuadratureRule {
    gauss_rule(mesh.order() + 1).expect("element order is at most 4")
}

fn sigma_range(field: &SolutionField, params: &ModelParams, t: f64, rule: &QuadratureRule) -> (f64, f64) {
    let mesh = field.mesh();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in 0..mesh.n_elements() {
        for &xi in &rule.points {
            let (u, _) = field.eval_in_element(e, mesh.to_physical(e, xi));
            let s = params.volatility(u, t);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    (lo, hi)
}

/// Runs the full time loop from the interpolated payoff.
pub fn run_solver(
    params: &ModelParams,
    mesh: Arc<Mesh>,
    grid: TimeGrid,
    bc: &BoundaryCondition,
) -> Result<SolutionHistory> {
    let initial = SolutionField::interpolate(mesh.clone(), |x| params.payoff(x), 0.0)?;
    run_solver_from(params, initial, grid, bc)
}

/// Time loop from arbitrary initial coefficients.
pub fn run_solver_from(
    params: &ModelParams,
    initial: SolutionField,
    grid: TimeGrid,
    bc: &BoundaryCondition,
) -> Result<SolutionHistory> {
    let mesh = initial.mesh().clone();
    let (fields, diagnostics) = march(params, initial, grid, bc, true)?;
    Ok(SolutionHistory {
        mesh,
        params: params.clone(),
        grid,
        bc: bc.clone(),
        fields,
        diagnostics,
    })
}

/// Runs the time loop from the interpolated payoff and keeps only `u^{N_t}`.
pub fn solve_to_maturity(
    params: &ModelParams,
    mesh: Arc<Mesh>,
    grid: TimeGrid,
    bc: &BoundaryCondition,
) -> Result<SolutionField> {
    let initial = SolutionField::interpolate(mesh, |x| params.payoff(x), 0.0)?;
    let (mut fields, _) = march(params, initial, grid, bc, false)?;
    Ok(fields.pop().expect("march returns the last level"))
}

fn march(
    params: &ModelParams,
    initial: SolutionField,
    grid: TimeGrid,
    bc: &BoundaryCondition,
    keep_all: bool,
) -> Result<(Vec<SolutionField>, Vec<StepDiagnostics>)> {
    params.validate()?;
    let mesh = initial.mesh().clone();
    if (mesh.x_min() - params.x_min).abs() > 1e-12 || (mesh.x_max() - params.x_max).abs() > 1e-12 {
        return Err(Error::InconsistentInput(format!(
            "mesh spans [{}, {}] but the model window is [{}, {}]",
            mesh.x_min(),
            mesh.x_max(),
            params.x_min,
            params.x_max
        )));
    }
    let rule = default_rule(&mesh);
    let mass = assemble_mass(&mesh, &rule)?;
    let dt = grid.dt();

    let (lo, hi) = sigma_range(&initial, params, 0.0, &rule);
    let mut diagnostics = Vec::with_capacity(grid.n_steps() + 1);
    diagnostics.push(StepDiagnostics {
        step: 0,
        time: 0.0,
        residual: 0.0,
        sigma_min: lo,
        sigma_max: hi,
        l2_norm: initial.l2_norm(),
    });
    let mut fields = Vec::with_capacity(if keep_all { grid.n_steps() + 1 } else { 1 });
    fields.push(initial);

    for n in 1..=grid.n_steps() {
        let prev = fields.last().expect("at least one level");
        let t_prev = grid.time(n - 1);
        let t_next = grid.time(n);
        let step = || -> Result<(SolutionField, StepDiagnostics)> {
            let operator = assemble_operator(&mesh, prev, t_prev, params, &rule)?;
            let system = step_system(&mass, &operator, prev, dt, bc, t_next)?;
            let u = system.matrix.factor()?.solve(&system.rhs);
            let residual = residual_norm(&system.matrix, &u, &system.rhs);
            let field = SolutionField::new(mesh.clone(), u, t_next)?;
            let (sigma_min, sigma_max) = sigma_range(prev, params, t_prev, &rule);
            let diag = StepDiagnostics {
                step: n,
                time: t_next,
                residual,
                sigma_min,
                sigma_max,
                l2_norm: field.l2_norm(),
            };
            Ok((field, diag))
        };
        let (field, diag) = step().map_err(|e| e.at_step(n))?;
        if !keep_all {
            fields.clear();
        }
        fields.push(field);
        diagnostics.push(diag);
    }
    Ok((fields, diagnostics))
}
