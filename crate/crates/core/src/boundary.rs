//! Locating the migration boundary `S_f(t)` where `u_h(S_f, t) = γ e^{-δt}`.
//!
//! Two routes are provided. The direct route scans the nodal values of a
//! level for a sign change and refines with safeguarded Newton. The Green
//! route never touches `u^n`: for each trial point `s` it solves the
//! transposed step system `Bᵀ g = e(s)` against the consistent delta load
//! `e_i(s) = N_i(s)` and evaluates `F(s) = gᵀ rhs - γ e^{-δt}`. Because
//! `B u^n = rhs`, `gᵀ rhs = e(s)ᵀ u^n = u_h^n(s)`, so both routes target the
//! same discrete root.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::basis::eval_basis;
use crate::fem::{BandedLu, BandedMatrix, Mesh, SolutionField};
use crate::model::ModelParams;
use crate::stepper::SolutionHistory;

/// Absolute residual at which a root is accepted.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Smallest damping factor tried before falling back to bisection.
pub const MIN_DAMPING: f64 = 1.0 / 1024.0;
const MAX_BISECTIONS: usize = 200;

pub fn evaluate_solution(field: &SolutionField, x: f64) -> Result<f64> {
    field.value(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub s_f: f64,
    pub iterations: usize,
    pub residual: f64,
    /// More than one sign change of `u_h - threshold` was found.
    pub multiple: bool,
}

/// Leftmost root of `u_h(x) - γe^{-δt}`, or `None` if the nodal values never
/// change sign.
pub fn detect_crossing(field: &SolutionField, t: f64, params: &ModelParams) -> Option<Crossing> {
    let level = params.threshold().value(t);
    let mesh = field.mesh();
    let nodes = mesh.node_coords();
    let g: Vec<f64> = field.coefficients().iter().map(|u| u - level).collect();

    let mut brackets = (0..g.len() - 1).filter(|&i| g[i] == 0.0 || g[i] * g[i + 1] < 0.0);
    let first = brackets.next().or_else(|| (g[g.len() - 1] == 0.0).then_some(g.len() - 1))?;
    let multiple = brackets.next().is_some();

    if g[first] == 0.0 {
        return Some(Crossing {
            s_f: nodes[first],
            iterations: 0,
            residual: 0.0,
            multiple,
        });
    }
    let element = first / mesh.order();
    let f = |x: f64| {
        let (u, du) = field.eval_in_element(element, x);
        (u - level, du)
    };
    let (s_f, iterations, residual) = safeguarded_newton(f, nodes[first], nodes[first + 1]);
    Some(Crossing {
        s_f,
        iterations,
        residual,
        multiple,
    })
}

/// Newton inside a sign-change bracket, bisecting whenever a step leaves
/// the bracket or fails to halve the residual.
fn safeguarded_newton(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> (f64, usize, f64) {
    let (mut f_lo, _) = f(lo);
    let mut x = 0.5 * (lo + hi);
    let (mut fx, mut dfx) = f(x);
    let mut iterations = 0;
    while fx.abs() > ROOT_TOLERANCE && iterations < MAX_BISECTIONS {
        iterations += 1;
        if f_lo * fx < 0.0 {
            hi = x;
        } else {
            lo = x;
            f_lo = fx;
        }
        let newton = x - fx / dfx;
        let candidate = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if candidate == x || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        x = candidate;
        (fx, dfx) = f(x);
    }
    (x, iterations, fx.abs())
}

/// Discrete influence vector of one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenVector {
    pub coefficients: Vec<f64>,
    pub source_point: f64,
}

impl GreenVector {
    /// `gᵀ rhs`.
    pub fn apply(&self, rhs: &[f64]) -> f64 {
        self.coefficients.iter().zip(rhs).map(|(g, b)| g * b).sum()
    }
}

/// Consistent point load `e_i(s) = N_i(s)` and its derivative `N_i'(s)`.
pub fn delta_load(mesh: &Mesh, s: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let e = mesh.locate(s).ok_or(Error::Domain {
        what: "s",
        value: s,
        lower: mesh.x_min(),
        upper: mesh.x_max(),
    })?;
    let order = mesh.order();
    let mut values = [0.0; 5];
    let mut derivs = [0.0; 5];
    eval_basis(order, mesh.to_parent(e, s), &mut values[..=order], &mut derivs[..=order]);
    let jac = 2.0 / mesh.element_width(e);
    let mut load = vec![0.0; mesh.dof_count()];
    let mut slope = vec![0.0; mesh.dof_count()];
    for (a, dof) in mesh.element_dofs(e).enumerate() {
        load[dof] = values[a];
        slope[dof] = derivs[a] * jac;
    }
    Ok((load, slope))
}

/// Factorized transposed step system, reused across evaluation points.
pub struct GreenSolver<'a> {
    mesh: &'a Mesh,
    adjoint: BandedLu,
}

impl<'a> GreenSolver<'a> {
    pub fn new(mesh: &'a Mesh, step_matrix: &BandedMatrix) -> Result<Self> {
        if step_matrix.dim() != mesh.dof_count() {
            return Err(Error::InconsistentInput(format!(
                "step matrix has dimension {}, mesh has {} degrees of freedom",
                step_matrix.dim(),
                mesh.dof_count()
            )));
        }
        Ok(GreenSolver {
            mesh,
            adjoint: step_matrix.transpose().factor()?,
        })
    }

    pub fn green_vector(&self, s: f64) -> Result<GreenVector> {
        let (load, _) = delta_load(self.mesh, s)?;
        Ok(GreenVector {
            coefficients: self.adjoint.solve(&load),
            source_point: s,
        })
    }

    /// `(gᵀ rhs, g'ᵀ rhs)` where `Bᵀ g' = e'(s)`.
    pub fn functional(&self, s: f64, rhs: &[f64]) -> Result<(f64, f64)> {
        let (load, slope) = delta_load(self.mesh, s)?;
        let g = self.adjoint.solve(&load);
        let dg = self.adjoint.solve(&slope);
        let dot = |v: &[f64]| v.iter().zip(rhs).map(|(a, b)| a * b).sum::<f64>();
        Ok((dot(&g), dot(&dg)))
    }
}

/// Solves `Bᵀ g = e(s)` for the step matrix `B` (Dirichlet rows applied).
pub fn green_vector(step_matrix: &BandedMatrix, field: &SolutionField, s: f64) -> Result<GreenVector> {
    GreenSolver::new(field.mesh(), step_matrix)?.green_vector(s)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GreenRootDiagnostics {
    /// Newton iterations taken (0 if the start point already satisfied the tolerance).
    pub iterations: usize,
    /// Newton steps accepted with the full step `λ = 1`.
    pub full_steps: usize,
    /// Newton steps accepted with `λ < 1`.
    pub damped_steps: usize,
    pub bisections: usize,
    pub residual: f64,
}

/// Damped Newton on `F(s) = gᵀ(s) rhs - γe^{-δt}`, halving `λ` until `|F|`
/// decreases; below `λ = 2⁻¹⁰` a bracket is located on the mesh nodes and
/// bisected.
pub fn boundary_root_green(
    mesh: &Mesh,
    step_matrix: &BandedMatrix,
    rhs: &[f64],
    t: f64,
    params: &ModelParams,
    x0: f64,
) -> Result<(f64, GreenRootDiagnostics)> {
    if !(x0 >= mesh.x_min() && x0 <= mesh.x_max()) {
        return Err(Error::Domain {
            what: "x0",
            value: x0,
            lower: mesh.x_min(),
            upper: mesh.x_max(),
        });
    }
    let solver = GreenSolver::new(mesh, step_matrix)?;
    let level = params.threshold().value(t);
    let eval = |s: f64| -> Result<(f64, f64)> {
        let (v, dv) = solver.functional(s, rhs)?;
        Ok((v - level, dv))
    };
    let mut diag = GreenRootDiagnostics::default();
    let mut x = x0;
    let (mut fx, mut dfx) = eval(x)?;
    while fx.abs() > ROOT_TOLERANCE {
        if diag.iterations == MAX_NEWTON_ITERATIONS {
            return Err(Error::RootFailure {
                iterations: diag.iterations,
                last_x: x,
                residual: fx.abs(),
            });
        }
        diag.iterations += 1;
        let mut accepted = None;
        if dfx != 0.0 && dfx.is_finite() {
            let step = fx / dfx;
            let mut lambda = 1.0;
            while lambda >= MIN_DAMPING {
                let trial = x - lambda * step;
                if trial >= mesh.x_min() && trial <= mesh.x_max() {
                    let (ft, dft) = eval(trial)?;
                    if ft.abs() < fx.abs() {
                        accepted = Some((trial, ft, dft, lambda));
                        break;
                    }
                }
                lambda *= 0.5;
            }
        }
        match accepted {
            Some((trial, ft, dft, lambda)) => {
                if lambda == 1.0 {
                    diag.full_steps += 1;
                } else {
                    diag.damped_steps += 1;
                }
                x = trial;
                fx = ft;
                dfx = dft;
            }
            None => {
                let (root, residual, bisections) = bisect_from(mesh, x, &eval)?;
                diag.bisections += bisections;
                diag.residual = residual;
                return Ok((root, diag));
            }
        }
    }
    diag.residual = fx.abs();
    Ok((x, diag))
}

/// Nearest sign change of `F` among the mesh nodes around `x`, then bisection.
fn bisect_from(
    mesh: &Mesh,
    x: f64,
    eval: &impl Fn(f64) -> Result<(f64, f64)>,
) -> Result<(f64, f64, usize)> {
    let nodes = mesh.node_coords();
    let start = nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1);
    let f_at = |i: usize| eval(nodes[i]).map(|v| v.0);
    let mut bracket = None;
    let (mut left, mut right) = (start - 1, start);
    let (mut f_left, mut f_right) = (f_at(left)?, f_at(right)?);
    loop {
        if f_left * f_right <= 0.0 {
            bracket = Some((nodes[left], nodes[right], f_left));
            break;
        }
        let can_left = left > 0;
        let can_right = right + 1 < nodes.len();
        if !can_left && !can_right {
            break;
        }
        if can_left {
            let f_next = f_at(left - 1)?;
            if f_next * f_left <= 0.0 {
                bracket = Some((nodes[left - 1], nodes[left], f_next));
                break;
            }
            left -= 1;
            f_left = f_next;
        }
        if can_right {
            let f_next = f_at(right + 1)?;
            if f_right * f_next <= 0.0 {
                bracket = Some((nodes[right], nodes[right + 1], f_right));
                break;
            }
            right += 1;
            f_right = f_next;
        }
    }
    let Some((mut lo, mut hi, mut f_lo)) = bracket else {
        return Err(Error::RootFailure {
            iterations: 0,
            last_x: x,
            residual: eval(x)?.0.abs(),
        });
    };
    if f_lo == 0.0 {
        return Ok((lo, 0.0, 0));
    }
    for k in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let (fm, _) = eval(mid)?;
        if fm.abs() <= ROOT_TOLERANCE || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            return Ok((mid, fm.abs(), k));
        }
        if f_lo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    let mid = 0.5 * (lo + hi);
    Err(Error::RootFailure {
        iterations: MAX_BISECTIONS,
        last_x: mid,
        residual: eval(mid)?.0.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TrackMethod {
    Direct,
    Green,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootMethod {
    Direct,
    Green,
}

impl RootMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootMethod::Direct => "direct",
            RootMethod::Green => "green",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrackOptions {
    pub method: TrackMethod,
    /// Start each Green search from the previous level's root. Without warm
    /// starts every level starts from `ln(γ/K)` and levels run in parallel.
    pub warm_start: bool,
    /// Overrides the start point of the first Green search.
    pub initial_guess: Option<f64>,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            method: TrackMethod::Both,
            warm_start: true,
            initial_guess: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryEntry {
    pub step: usize,
    pub t: f64,
    pub s_f: f64,
    pub method: RootMethod,
    pub iterations: usize,
    pub residual: f64,
    pub multiple: bool,
    pub full_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub step: usize,
    pub t: f64,
    pub direct: f64,
    pub green: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackFailure {
    pub step: usize,
    pub method: RootMethod,
    pub reason: String,
}

/// Migration boundary over all time levels of a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FreeBoundaryPath {
    pub entries: Vec<BoundaryEntry>,
    pub discrepancies: Vec<Discrepancy>,
    /// Levels where a method found no root.
    pub failures: Vec<TrackFailure>,
    pub levels: usize,
}

impl FreeBoundaryPath {
    pub fn by_method(&self, method: RootMethod) -> impl Iterator<Item = &BoundaryEntry> {
        self.entries.iter().filter(move |e| e.method == method)
    }

    /// Fraction of levels with a converged root for `method`.
    pub fn converged_fraction(&self, method: RootMethod) -> f64 {
        if self.levels == 0 {
            return 0.0;
        }
        let converged = self
            .by_method(method)
            .filter(|e| e.residual <= ROOT_TOLERANCE)
            .count();
        converged as f64 / self.levels as f64
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies
            .iter()
            .map(|d| d.difference)
            .fold(0.0, f64::max)
    }

    /// Fraction of Green Newton steps accepted with `λ = 1`.
    pub fn full_step_rate(&self) -> f64 {
        let (full, total) = self
            .by_method(RootMethod::Green)
            .fold((0, 0), |(f, t), e| (f + e.full_steps, t + e.iterations));
        if total == 0 {
            1.0
        } else {
            full as f64 / total as f64
        }
    }

    /// Largest jump of the path between consecutive levels of one method.
    pub fn max_jump(&self, method: RootMethod) -> f64 {
        let path: Vec<&BoundaryEntry> = self.by_method(method).collect();
        path.windows(2)
            .map(|w| (w[1].s_f - w[0].s_f).abs())
            .fold(0.0, f64::max)
    }

    /// Columns `t, s_f, method, iterations, residual`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "s_f", "method", "iterations", "residual"])?;
        for e in &self.entries {
            w.write_record([
                format!("{:.16e}", e.t),
                format!("{:.16e}", e.s_f),
                e.method.as_str().to_string(),
                e.iterations.to_string(),
                format!("{:.16e}", e.residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct LevelResult {
    direct: Option<std::result::Result<BoundaryEntry, TrackFailure>>,
    green: Option<std::result::Result<BoundaryEntry, TrackFailure>>,
}

fn track_level(
    history: &SolutionHistory,
    params: &ModelParams,
    n: usize,
    method: TrackMethod,
    x0: f64,
) -> LevelResult {
    let field = &history.fields()[n];
    let t = field.time();
    let direct = matches!(method, TrackMethod::Direct | TrackMethod::Both).then(|| {
        detect_crossing(field, t, params)
            .map(|c| BoundaryEntry {
                step: n,
                t,
                s_f: c.s_f,
                method: RootMethod::Direct,
                iterations: c.iterations,
                residual: c.residual,
                multiple: c.multiple,
                full_steps: 0,
            })
            .ok_or_else(|| TrackFailure {
                step: n,
                method: RootMethod::Direct,
                reason: "no sign change".into(),
            })
    });
    let green = matches!(method, TrackMethod::Green | TrackMethod::Both).then(|| {
        let mesh = history.mesh();
        let result = if n == 0 {
            let identity = BandedMatrix::identity(mesh.dof_count(), mesh.order(), mesh.order());
            boundary_root_green(mesh, &identity, field.coefficients(), t, params, x0)
        } else {
            history.step_system(n).and_then(|system| {
                boundary_root_green(mesh, &system.matrix, &system.rhs, t, params, x0)
            })
        };
        result
            .map(|(s_f, d)| BoundaryEntry {
                step: n,
                t,
                s_f,
                method: RootMethod::Green,
                iterations: d.iterations,
                residual: d.residual,
                multiple: false,
                full_steps: d.full_steps,
            })
            .map_err(|e| TrackFailure {
                step: n,
                method: RootMethod::Green,
                reason: e.to_string(),
            })
    });
    LevelResult { direct, green }
}

/// One root per time level; with [`TrackMethod::Both`] the two routes are
/// recorded side by side together with their discrepancy.
pub fn track_boundary(
    history: &SolutionHistory,
    params: &ModelParams,
    options: TrackOptions,
) -> FreeBoundaryPath {
    let mesh = history.mesh();
    let clamp = |x: f64| x.clamp(mesh.x_min(), mesh.x_max());
    let cold = clamp(options.initial_guess.unwrap_or((params.gamma / params.face_value).ln()));
    let levels = history.len();
    let results: Vec<LevelResult> = if options.warm_start {
        let mut out = Vec::with_capacity(levels);
        let mut x0 = cold;
        for n in 0..levels {
            let r = track_level(history, params, n, options.method, x0);
            if let Some(Ok(e)) = &r.green {
                x0 = e.s_f;
            } else if let Some(Ok(e)) = &r.direct {
                x0 = e.s_f;
            }
            out.push(r);
        }
        out
    } else {
        (0..levels)
            .into_par_iter()
            .map(|n| track_level(history, params, n, options.method, cold))
            .collect()
    };

    let mut path = FreeBoundaryPath {
        levels,
        ..FreeBoundaryPath::default()
    };
    for r in results {
        let mut pair = (None, None);
        for (slot, result) in [(0, r.direct), (1, r.green)] {
            match result {
                Some(Ok(entry)) => {
                    if slot == 0 {
                        pair.0 = Some((entry.step, entry.t, entry.s_f));
                    } else {
                        pair.1 = Some(entry.s_f);
                    }
                    path.entries.push(entry);
                }
                Some(Err(failure)) => path.failures.push(failure),
                None => {}
            }
        }
        if let (Some((step, t, direct)), Some(green)) = pair {
            path.discrepancies.push(Discrepancy {
                step,
                t,
                direct,
                green,
                difference: (direct - green).abs(),
            });
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn linear_field(values: Vec<f64>) -> SolutionField {
        let n = values.len() - 1;
        let mesh = Arc::new(Mesh::uniform(0.0, 1.0, n, 1).unwrap());
        SolutionField::new(mesh, values, 0.0).unwrap()
    }

    #[test]
    fn evaluation_at_nodes_and_on_linears() {
        let mesh = Arc::new(Mesh::uniform(-1.0, 1.0, 5, 1).unwrap());
        let f = SolutionField::interpolate(mesh.clone(), |x| x, 0.0).unwrap();
        assert!((evaluate_solution(&f, 0.3).unwrap() - 0.3).abs() < 1e-15);
        for (x, u) in mesh.node_coords().iter().zip(f.coefficients()) {
            assert_eq!(evaluate_solution(&f, *x).unwrap(), *u);
        }
        let quad = Arc::new(Mesh::uniform(0.0, 2.0, 4, 2).unwrap());
        let q = SolutionField::interpolate(quad, |x| x * x, 0.0).unwrap();
        let mid = 0.75;
        assert!((evaluate_solution(&q, mid).unwrap() - mid * mid).abs() < 1e-14);
    }

    #[test]
    fn crossing_of_the_payoff() {
        let params = ModelParams::default();
        let mesh = Arc::new(Mesh::uniform(-4.0, 4.0, 1024, 1).unwrap());
        let f = SolutionField::interpolate(mesh.clone(), |x| params.payoff(x), 0.0).unwrap();
        let c = detect_crossing(&f, 0.0, &params).unwrap();
        let h = mesh.h();
        assert!((c.s_f - 0.8_f64.ln()).abs() < h * h);
        assert!(c.residual <= ROOT_TOLERANCE);
        assert!(!c.multiple);
    }

    #[test]
    fn constant_field_above_threshold_has_no_crossing() {
        let params = ModelParams {
            delta: 0.0,
            ..ModelParams::default()
        };
        let f = linear_field(vec![1.0; 6]);
        assert!(detect_crossing(&f, 0.5, &params).is_none());
    }

    #[test]
    fn single_straddling_element() {
        let params = ModelParams {
            delta: 0.0,
            ..ModelParams::default()
        };
        let f = linear_field(vec![0.1, 0.3, 0.5, 0.9, 1.0]);
        let c = detect_crossing(&f, 0.0, &params).unwrap();
        // closed-form root of the linear piece through (0.5, 0.5) and (0.75, 0.9)
        let expected = 0.5 + 0.25 * (0.8 - 0.5) / (0.9 - 0.5);
        assert!((c.s_f - expected).abs() < 1e-12);
        assert!(c.residual <= 1e-12);
    }

    #[test]
    fn multiple_crossings_flagged_and_leftmost_returned() {
        let params = ModelParams {
            delta: 0.0,
            ..ModelParams::default()
        };
        let f = linear_field(vec![0.5, 1.0, 0.5, 1.0]);
        let c = detect_crossing(&f, 0.0, &params).unwrap();
        assert!(c.multiple);
        assert!(c.s_f < 1.0 / 3.0);
    }

    #[test]
    fn green_vector_of_identity_is_unit_direction() {
        let mesh = Arc::new(Mesh::uniform(0.0, 1.0, 4, 1).unwrap());
        let f = SolutionField::interpolate(mesh, |x| x, 0.0).unwrap();
        let identity = BandedMatrix::identity(5, 1, 1);
        let g = green_vector(&identity, &f, 0.5).unwrap();
        assert_eq!(g.coefficients, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn green_vector_of_symmetric_matrix_is_inverse_column() {
        let mesh = Arc::new(Mesh::uniform(0.0, 1.0, 3, 1).unwrap());
        let f = SolutionField::interpolate(mesh, |x| x, 0.0).unwrap();
        let b = BandedMatrix::from_dense(
            &[
                vec![4.0, 1.0, 0.0, 0.0],
                vec![1.0, 4.0, 1.0, 0.0],
                vec![0.0, 1.0, 4.0, 1.0],
                vec![0.0, 0.0, 1.0, 4.0],
            ],
            1,
            1,
        )
        .unwrap();
        let g = green_vector(&b, &f, 1.0 / 3.0).unwrap();
        let mut unit = vec![0.0; 4];
        unit[1] = 1.0;
        let column = b.factor().unwrap().solve(&unit);
        for (a, c) in g.coefficients.iter().zip(column) {
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn green_root_from_converged_start_takes_no_iterations() {
        let params = ModelParams {
            delta: 0.0,
            ..ModelParams::default()
        };
        let f = linear_field(vec![0.0, 0.4, 0.8, 1.2, 1.6]);
        let identity = BandedMatrix::identity(5, 1, 1);
        let (root, d) =
            boundary_root_green(f.mesh(), &identity, f.coefficients(), 0.0, &params, 0.5).unwrap();
        assert_eq!(root, 0.5);
        assert_eq!(d.iterations, 0);
        assert!(boundary_root_green(f.mesh(), &identity, f.coefficients(), 0.0, &params, 2.0)
            .is_err());
    }

    #[test]
    fn green_root_without_a_root_fails() {
        let params = ModelParams::default();
        let f = linear_field(vec![1.0; 5]);
        let identity = BandedMatrix::identity(5, 1, 1);
        assert!(matches!(
            boundary_root_green(f.mesh(), &identity, f.coefficients(), 0.0, &params, 0.5),
            Err(Error::RootFailure { .. })
        ));
    }
}
