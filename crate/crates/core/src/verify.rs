//! Explicit finite-difference reference, error norms and convergence studies.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{gauss_rule, Mesh, QuadratureRule, SolutionField, MAX_ORDER};
use crate::model::ModelParams;
use crate::stepper::{solve_to_maturity, BoundaryCondition, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FdConvection {
    #[default]
    Central,
    /// First-order upwind, for robustness experiments.
    Upwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FdDiffusion {
    /// `(σ²/2 u_x)_x` with σ² averaged to the half points; the same
    /// continuous operator the Galerkin form discretizes.
    #[default]
    Divergence,
    /// `σ²/2 u_xx` with σ frozen at the node.
    NonConservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FdOptions {
    pub convection: FdConvection,
    pub diffusion: FdDiffusion,
    /// Keep every `stride`-th level; the first and last are always kept.
    pub stride: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            convection: FdConvection::Central,
            diffusion: FdDiffusion::Divergence,
            stride: 1,
        }
    }
}

/// Solution of the explicit scheme on a uniform space-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FdGrid {
    pub dx: f64,
    pub dt: f64,
    pub x: Vec<f64>,
    /// Times of the stored levels.
    pub t: Vec<f64>,
    /// `u[k][j]` at time `t[k]` and node `x[j]`.
    pub u: Vec<Vec<f64>>,
}

impl FdGrid {
    pub fn last_level(&self) -> &[f64] {
        self.u.last().expect("grid holds the initial level")
    }

    /// Cubic interpolant of a stored level.
    pub fn profile(&self, level: usize) -> FdProfile {
        FdProfile {
            x0: self.x[0],
            dx: self.dx,
            values: self.u[level].clone(),
        }
    }

    pub fn final_profile(&self) -> FdProfile {
        self.profile(self.u.len() - 1)
    }
}

/// Smallest step count satisfying `Δt ≤ Δx² / σ_L²`.
pub fn cfl_min_steps(params: &ModelParams, nx: usize) -> usize {
    cfl_min_steps_for(params, nx, FdConvection::Central)
}

/// Largest stable step: `Δx² / σ_L²` for central convection,
/// `Δx² / (σ_L² + |a| Δx)` with upwinding, whose numerical diffusion
/// tightens the bound.
fn max_stable_dt(params: &ModelParams, dx: f64, convection: FdConvection) -> f64 {
    let sigma = params.sigma_low_grade.max(params.sigma_high_grade);
    let extra = match convection {
        FdConvection::Central => 0.0,
        FdConvection::Upwind => {
            let a = |s: f64| params.convection(s).abs();
            a(params.sigma_low_grade).max(a(params.sigma_high_grade)) * dx
        }
    };
    dx * dx / (sigma * sigma + extra)
}

/// Smallest stable step count for the given convection scheme.
pub fn cfl_min_steps_for(params: &ModelParams, nx: usize, convection: FdConvection) -> usize {
    let dx = (params.x_max - params.x_min) / (nx - 1) as f64;
    let ratio = params.maturity / max_stable_dt(params, dx, convection);
    // guard against ratio landing a hair above an integer
    let n = (ratio * (1.0 - 1e-12)).ceil() as usize;
    n.max(1)
}

pub fn explicit_fd_solve(
    params: &ModelParams,
    nx: usize,
    nt: usize,
    bc: &BoundaryCondition,
) -> Result<FdGrid> {
    explicit_fd_solve_with(params, nx, nt, bc, FdOptions::default())
}

/// Forward Euler with central differences from the payoff; σ is taken
/// from the previous level like the implicit solver.
pub fn explicit_fd_solve_with(
    params: &ModelParams,
    nx: usize,
    nt: usize,
    bc: &BoundaryCondition,
    options: FdOptions,
) -> Result<FdGrid> {
    if nx < 4 {
        return Err(Error::invalid("nx", format!("need at least 4 grid points, got {nx}")));
    }
    let dx = (params.x_max - params.x_min) / (nx - 1) as f64;
    let initial = (0..nx).map(|j| params.payoff(params.x_min + j as f64 * dx)).collect();
    explicit_fd_solve_from(params, initial, nt, bc, options)
}

/// Explicit scheme from arbitrary initial grid values on the model window.
pub fn explicit_fd_solve_from(
    params: &ModelParams,
    initial: Vec<f64>,
    nt: usize,
    bc: &BoundaryCondition,
    options: FdOptions,
) -> Result<FdGrid> {
    params.validate()?;
    let nx = initial.len();
    if nx < 4 {
        return Err(Error::invalid("nx", format!("need at least 4 grid points, got {nx}")));
    }
    if options.stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let grid = TimeGrid::new(params.maturity, nt)?;
    let nt = grid.n_steps();
    let dx = (params.x_max - params.x_min) / (nx - 1) as f64;
    let dt = grid.dt();
    let dt_max = max_stable_dt(params, dx, options.convection);
    if dt > dt_max * (1.0 + 1e-12) {
        let needed = cfl_min_steps_for(params, nx, options.convection);
        return Err(Error::invalid(
            "nt",
            format!("CFL violated: dt = {dt:e} exceeds the stable step {dt_max:e}; need nt >= {needed}"),
        ));
    }

    let x: Vec<f64> = (0..nx)
        .map(|j| {
            if j == nx - 1 {
                params.x_max
            } else {
                params.x_min + j as f64 * dx
            }
        })
        .collect();
    let mut u = initial;
    let mut next = vec![0.0; nx];
    let mut diff = vec![0.0; nx];
    let mut conv = vec![0.0; nx];
    let mut times = vec![0.0];
    let mut levels = vec![u.clone()];
    let inv_dx2 = 1.0 / (dx * dx);
    let inv_2dx = 0.5 / dx;
    let reaction = params.reaction_coefficient;

    for n in 1..=nt {
        let t_prev = grid.time(n - 1);
        for j in 0..nx {
            let sigma = params.volatility(u[j], t_prev);
            diff[j] = 0.5 * sigma * sigma;
            conv[j] = params.convection(sigma);
        }
        for j in 1..nx - 1 {
            let diffusion = match options.diffusion {
                FdDiffusion::Divergence => {
                    let right = 0.5 * (diff[j] + diff[j + 1]);
                    let left = 0.5 * (diff[j - 1] + diff[j]);
                    (right * (u[j + 1] - u[j]) - left * (u[j] - u[j - 1])) * inv_dx2
                }
                FdDiffusion::NonConservative => diff[j] * (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2,
            };
            let slope = match options.convection {
                FdConvection::Central => (u[j + 1] - u[j - 1]) * inv_2dx,
                FdConvection::Upwind if conv[j] >= 0.0 => (u[j] - u[j - 1]) / dx,
                FdConvection::Upwind => (u[j + 1] - u[j]) / dx,
            };
            next[j] = u[j] + dt * (diffusion - conv[j] * slope - reaction * u[j]);
        }
        let t_next = grid.time(n);
        next[0] = bc.left_value(t_next);
        next[nx - 1] = bc.right_value(t_next);
        std::mem::swap(&mut u, &mut next);
        if let Some(j) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Step {
                step: n,
                source: Box::new(Error::InconsistentInput(format!("non-finite value at node {j}"))),
            });
        }
        if n % options.stride == 0 || n == nt {
            times.push(t_next);
            levels.push(u.clone());
        }
    }
    Ok(FdGrid {
        dx,
        dt,
        x,
        t: times,
        u: levels,
    })
}

/// Anything that can serve as the exact solution in an error integral.
pub trait Evaluable {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn domain(&self) -> (f64, f64);
    /// Points where the reference may lose smoothness; quadrature is split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Evaluable for SolutionField {
    fn value(&self, x: f64) -> f64 {
        let e = self.mesh().locate(x).expect("point inside the reference mesh");
        self.eval_in_element(e, x).0
    }

    fn derivative(&self, x: f64) -> f64 {
        let e = self.mesh().locate(x).expect("point inside the reference mesh");
        self.eval_in_element(e, x).1
    }

    fn domain(&self) -> (f64, f64) {
        (self.mesh().x_min(), self.mesh().x_max())
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.mesh().breakpoints().to_vec()
    }
}

/// Four-point cubic Lagrange interpolation of grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct FdProfile {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}

impl FdProfile {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InconsistentInput("cubic interpolation needs 4 values".into()));
        }
        Ok(FdProfile { x0, dx, values })
    }

    fn stencil(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let s = (x - self.x0) / self.dx;
        let j = (s.floor().max(0.0) as usize).min(n - 2);
        let start = j.saturating_sub(1).min(n - 4);
        (start, s - start as f64)
    }

    fn lagrange(&self, x: f64) -> (f64, f64) {
        let (start, s) = self.stencil(x);
        let v = &self.values[start..start + 4];
        let mut value = 0.0;
        let mut slope = 0.0;
        for a in 0..4 {
            let mut prod = 1.0;
            let mut dprod = 0.0;
            let mut denom = 1.0;
            for b in (0..4).filter(|&b| b != a) {
                let factor = s - b as f64;
                dprod = dprod * factor + prod;
                prod *= factor;
                denom *= a as f64 - b as f64;
            }
            value += v[a] * prod / denom;
            slope += v[a] * dprod / denom;
        }
        (value, slope / self.dx)
    }
}

impl Evaluable for FdProfile {
    fn value(&self, x: f64) -> f64 {
        self.lagrange(x).0
    }

    fn derivative(&self, x: f64) -> f64 {
        self.lagrange(x).1
    }

    fn domain(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.values.len() - 1) as f64)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (0..self.values.len()).map(|j| self.x0 + j as f64 * self.dx).collect()
    }
}

/// Closed-form reference given as a function and its derivative.
pub struct Analytic<F, G> {
    pub f: F,
    pub df: G,
    pub domain: (f64, f64),
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Evaluable for Analytic<F, G> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub l2: f64,
    /// Full H1 norm `sqrt(‖e‖² + ‖e'‖²)`.
    pub h1: f64,
    pub h1_semi: f64,
    pub linf: f64,
    pub h: f64,
    pub dt: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L2,
    H1,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L2, Norm::H1, Norm::Linf];
}

impl ErrorReport {
    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::L2 => self.l2,
            Norm::H1 => self.h1,
            Norm::Linf => self.linf,
        }
    }
}

/// `r + 3` Gauss points, two degrees above what the basis needs.
pub fn error_rule(mesh: &Mesh) -> QuadratureRule {
    gauss_rule(mesh.order() + 3).expect("order + 3 <= 10")
}

/// Norms of `field - reference`, integrated element by element with the
/// reference's breakpoints inserted. `h` is the field's mesh size, `dt` and
/// `wall_time` are left for the caller.
pub fn error_norms(
    field: &SolutionField,
    reference: &dyn Evaluable,
    rule: &QuadratureRule,
) -> Result<ErrorReport> {
    let mesh = field.mesh();
    let (a, b) = reference.domain();
    let tol = 1e-12 * (1.0 + mesh.x_max().abs().max(mesh.x_min().abs()));
    if (a - mesh.x_min()).abs() > tol || (b - mesh.x_max()).abs() > tol {
        return Err(Error::InconsistentInput(format!(
            "field spans [{}, {}] but the reference spans [{a}, {b}]",
            mesh.x_min(),
            mesh.x_max()
        )));
    }
    if rule.is_empty() {
        return Err(Error::config("quadrature", "empty rule"));
    }
    let mut cuts = reference.breakpoints();
    cuts.sort_by(f64::total_cmp);
    let mut l2 = 0.0;
    let mut semi = 0.0;
    let mut linf = 0.0_f64;
    let mut cursor = 0;
    for e in 0..mesh.n_elements() {
        let (lo, hi) = mesh.element_span(e);
        let snap = 1e-12 * (hi - lo);
        let mut pieces = vec![lo];
        while cursor < cuts.len() && cuts[cursor] <= lo + snap {
            cursor += 1;
        }
        let mut k = cursor;
        while k < cuts.len() && cuts[k] < hi - snap {
            pieces.push(cuts[k]);
            k += 1;
        }
        pieces.push(hi);
        for w in pieces.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (&xi, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = mid + half * xi;
                let (u, du) = field.eval_in_element(e, x);
                let err = u - reference.value(x);
                let derr = du - reference.derivative(x);
                l2 += wq * half * err * err;
                semi += wq * half * derr * derr;
                linf = linf.max(err.abs());
            }
        }
    }
    for (&x, &u) in mesh.node_coords().iter().zip(field.coefficients()) {
        linf = linf.max((u - reference.value(x)).abs());
    }
    Ok(ErrorReport {
        l2: l2.sqrt(),
        h1: (l2 + semi).sqrt(),
        h1_semi: semi.sqrt(),
        linf,
        h: mesh.h(),
        dt: 0.0,
        wall_time: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    Spatial,
    Temporal,
}

/// Observed orders against the previous row of the same element order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ObservedOrders {
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub linf: Option<f64>,
}

impl ObservedOrders {
    pub fn get(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::L2 => self.l2,
            Norm::H1 => self.h1,
            Norm::Linf => self.linf,
        }
    }

    fn set(&mut self, norm: Norm, value: Option<f64>) {
        match norm {
            Norm::L2 => self.l2 = value,
            Norm::H1 => self.h1 = value,
            Norm::Linf => self.linf = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// `N_e` for spatial studies, `N_t` for temporal ones.
    pub resolution: usize,
    pub order: usize,
    pub report: Option<ErrorReport>,
    pub observed: ObservedOrders,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedOrders {
    pub order: usize,
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub linf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub kind: StudyKind,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `-log E` against `log resolution`.
    pub fitted: Vec<FittedOrders>,
}

fn log_ratio_order(coarse: (usize, f64), fine: (usize, f64)) -> Option<f64> {
    let (n0, e0) = coarse;
    let (n1, e1) = fine;
    let order = (e0 / e1).ln() / (n1 as f64 / n0 as f64).ln();
    (e0 > 0.0 && e1 > 0.0 && order.is_finite()).then_some(order)
}

/// Least-squares slope of `-ln E` against `ln N`.
pub fn fitted_order(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0 && e.is_finite())
        .map(|&(n, e)| ((n as f64).ln(), -e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

impl ConvergenceTable {
    /// Fills observed and fitted orders from rows grouped by element order.
    pub fn from_rows(kind: StudyKind, mut rows: Vec<ConvergenceRow>) -> Self {
        let mut orders: Vec<usize> = rows.iter().map(|r| r.order).collect();
        orders.dedup();
        orders.sort_unstable();
        orders.dedup();
        let mut fitted = Vec::new();
        for &order in &orders {
            let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].order == order).collect();
            for w in idx.windows(2) {
                let (prev, cur) = (&rows[w[0]], &rows[w[1]]);
                let mut observed = ObservedOrders::default();
                if let (Some(a), Some(b)) = (prev.report, cur.report) {
                    for norm in Norm::ALL {
                        observed.set(
                            norm,
                            log_ratio_order((prev.resolution, a.get(norm)), (cur.resolution, b.get(norm))),
                        );
                    }
                }
                rows[w[1]].observed = observed;
            }
            let series = |norm: Norm| -> Vec<(usize, f64)> {
                idx.iter()
                    .filter_map(|&i| rows[i].report.map(|r| (rows[i].resolution, r.get(norm))))
                    .collect()
            };
            fitted.push(FittedOrders {
                order,
                l2: fitted_order(&series(Norm::L2)),
                h1: fitted_order(&series(Norm::H1)),
                linf: fitted_order(&series(Norm::Linf)),
            });
        }
        ConvergenceTable { kind, rows, fitted }
    }

    pub fn rows_for(&self, order: usize) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.order == order)
    }

    pub fn fitted_for(&self, order: usize) -> Option<&FittedOrders> {
        self.fitted.iter().find(|f| f.order == order)
    }

    /// Pairwise observed orders of one element order, coarse to fine.
    pub fn pairwise(&self, order: usize, norm: Norm) -> Vec<Option<f64>> {
        self.rows_for(order).skip(1).map(|r| r.observed.get(norm)).collect()
    }

    /// Columns: resolution, r, l2, h1, linf, time, then the observed orders.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let resolution = match self.kind {
            StudyKind::Spatial => "n_elements",
            StudyKind::Temporal => "n_steps",
        };
        w.write_record([
            resolution, "r", "l2", "h1", "linf", "time", "order_l2", "order_h1", "order_linf", "failure",
        ])?;
        let num = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
        for row in &self.rows {
            let rep = row.report;
            w.write_record([
                row.resolution.to_string(),
                row.order.to_string(),
                num(rep.map(|r| r.l2)),
                num(rep.map(|r| r.h1)),
                num(rep.map(|r| r.linf)),
                num(rep.map(|r| r.wall_time)),
                num(row.observed.l2),
                num(row.observed.h1),
                num(row.observed.linf),
                row.failure.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Self-refined FEM reference for a spatial study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpatialReference {
    pub order: usize,
    /// Reference elements per element of the finest study mesh.
    pub refinement: usize,
    pub n_steps: usize,
}

impl SpatialReference {
    /// Order `max(orders) + 1` (capped), twice the finest mesh, four times the steps.
    pub fn standard(orders: &[usize], n_steps: usize) -> Self {
        let top = orders.iter().copied().max().unwrap_or(1);
        SpatialReference {
            order: (top + 1).min(MAX_ORDER),
            refinement: 2,
            n_steps: 4 * n_steps,
        }
    }
}

fn check_list(key: &'static str, values: &[usize]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(key, "list is empty"));
    }
    if values.contains(&0) {
        return Err(Error::config(key, "entries must be positive"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(key, "entries must increase"));
    }
    Ok(())
}

fn window_mesh(params: &ModelParams, n_elements: usize, order: usize) -> Result<Arc<Mesh>> {
    let mesh = Mesh::uniform(params.x_min, params.x_max, n_elements, order)?.align_breakpoint(0.0)?;
    Ok(Arc::new(mesh))
}

fn run_row(
    params: &ModelParams,
    bc: &BoundaryCondition,
    n_elements: usize,
    order: usize,
    n_steps: usize,
    reference: &SolutionField,
) -> Result<ErrorReport> {
    let start = Instant::now();
    let mesh = window_mesh(params, n_elements, order)?;
    let grid = TimeGrid::new(params.maturity, n_steps)?;
    let field = solve_to_maturity(params, mesh.clone(), grid, bc)?;
    let wall_time = start.elapsed().as_secs_f64();
    let mut report = error_norms(&field, reference, &error_rule(&mesh))?;
    report.dt = grid.dt();
    report.wall_time = wall_time;
    Ok(report)
}

fn collect_rows(
    jobs: Vec<(usize, usize, usize, usize)>,
    params: &ModelParams,
    bc: &BoundaryCondition,
    reference: &SolutionField,
    kind: StudyKind,
) -> ConvergenceTable {
    let rows = jobs
        .into_par_iter()
        .map(|(resolution, order, n_elements, n_steps)| {
            match run_row(params, bc, n_elements, order, n_steps, reference) {
                Ok(report) => ConvergenceRow {
                    resolution,
                    order,
                    report: Some(report),
                    observed: ObservedOrders::default(),
                    failure: None,
                },
                Err(e) => ConvergenceRow {
                    resolution,
                    order,
                    report: None,
                    observed: ObservedOrders::default(),
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    ConvergenceTable::from_rows(kind, rows)
}

/// Errors at `t = T` for every `(order, N_e)` pair with the standard
/// self-refined reference.
pub fn spatial_convergence_study(
    params: &ModelParams,
    orders: &[usize],
    element_counts: &[usize],
    nt_fixed: usize,
) -> Result<ConvergenceTable> {
    let reference = SpatialReference::standard(orders, nt_fixed);
    let bc = BoundaryCondition::frozen_payoff(params);
    spatial_convergence_study_with(params, orders, element_counts, nt_fixed, reference, &bc)
}

pub fn spatial_convergence_study_with(
    params: &ModelParams,
    orders: &[usize],
    element_counts: &[usize],
    nt_fixed: usize,
    reference: SpatialReference,
    bc: &BoundaryCondition,
) -> Result<ConvergenceTable> {
    check_list("convergence.spatial.orders", orders)?;
    check_list("convergence.spatial.n_elements", element_counts)?;
    params.validate()?;
    let finest = *element_counts.last().expect("checked non-empty");
    let ref_mesh = window_mesh(params, reference.refinement * finest, reference.order)?;
    let ref_grid = TimeGrid::new(params.maturity, reference.n_steps)?;
    let ref_field = solve_to_maturity(params, ref_mesh, ref_grid, bc)?;
    let jobs = orders
        .iter()
        .flat_map(|&r| element_counts.iter().map(move |&ne| (ne, r, ne, nt_fixed)))
        .collect();
    Ok(collect_rows(jobs, params, bc, &ref_field, StudyKind::Spatial))
}

/// Errors at `t = T` for each `N_t` against the same mesh at `8 max(N_t)` steps.
pub fn temporal_convergence_study(
    params: &ModelParams,
    nt_list: &[usize],
    ne_fixed: usize,
    order_fixed: usize,
) -> Result<ConvergenceTable> {
    let reference_steps = 8 * nt_list.iter().copied().max().unwrap_or(0);
    let bc = BoundaryCondition::frozen_payoff(params);
    temporal_convergence_study_with(params, nt_list, ne_fixed, order_fixed, reference_steps, &bc)
}

pub fn temporal_convergence_study_with(
    params: &ModelParams,
    nt_list: &[usize],
    ne_fixed: usize,
    order_fixed: usize,
    reference_steps: usize,
    bc: &BoundaryCondition,
) -> Result<ConvergenceTable> {
    check_list("convergence.temporal.n_steps", nt_list)?;
    params.validate()?;
    let mesh = window_mesh(params, ne_fixed, order_fixed)?;
    let ref_grid = TimeGrid::new(params.maturity, reference_steps)?;
    let ref_field = solve_to_maturity(params, mesh, ref_grid, bc)?;
    let jobs = nt_list
        .iter()
        .map(|&nt| (nt, order_fixed, ne_fixed, nt))
        .collect();
    Ok(collect_rows(jobs, params, bc, &ref_field, StudyKind::Temporal))
}

/// FEM and explicit FD solutions at `t = T` and their error report.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub fem: SolutionField,
    pub fd: FdGrid,
    pub report: ErrorReport,
}

/// Compares a linear-element run against the explicit scheme at the
/// smallest CFL-admissible step count.
pub fn cross_check(
    params: &ModelParams,
    n_elements: usize,
    n_steps: usize,
    nx: usize,
    bc: &BoundaryCondition,
) -> Result<CrossCheck> {
    let nt = cfl_min_steps(params, nx);
    let options = FdOptions {
        stride: nt,
        ..FdOptions::default()
    };
    let fd = explicit_fd_solve_with(params, nx, nt, bc, options)?;
    let mesh = window_mesh(params, n_elements, 1)?;
    let grid = TimeGrid::new(params.maturity, n_steps)?;
    let fem = solve_to_maturity(params, mesh.clone(), grid, bc)?;
    let mut report = error_norms(&fem, &fd.final_profile(), &error_rule(&mesh))?;
    report.dt = grid.dt();
    Ok(CrossCheck { fem, fd, report })
}
