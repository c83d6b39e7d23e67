//! JSON run configuration and the `solve`, `converge` and `boundary` commands.
//!
//! A configuration file is optional; every key has a default and can be
//! overridden from the command line as `section.key=value`, where `value` is
//! parsed as JSON and falls back to a plain string.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::boundary::{track_boundary, RootMethod, TrackMethod, TrackOptions};
use crate::error::{Error, Result};
use crate::fem::{assemble_mass, assemble_operator, BandedMatrix, Mesh, SolutionField, MAX_ORDER};
use crate::model::ModelParams;
use crate::stepper::{
    default_rule, run_solver, stability_diagnostic, BoundaryCondition, SolutionHistory, TimeGrid,
};
use crate::verify::{spatial_convergence_study, temporal_convergence_study, ConvergenceTable};

/// Fraction of time levels that must yield a converged boundary root.
pub const BOUNDARY_SUCCESS_FRACTION: f64 = 0.95;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_PARTIAL_BOUNDARY: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub n_elements: usize,
    pub order: usize,
    /// Explicit element breakpoints; they replace `n_elements` when given.
    pub breakpoints: Option<Vec<f64>>,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            n_elements: 512,
            order: 1,
            breakpoints: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub n_steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { n_steps: 512 }
    }
}

/// Constant Dirichlet values; unset ends keep the payoff value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcConfig {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DumpField {
    /// `t, x, u` for every node and level.
    Surface,
    /// Per-step residuals, σ range and L2 norm.
    Diagnostics,
    /// The running stability sums.
    Stability,
    /// Mass matrix and initial operator as `i, j, value` triplets.
    Matrices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    pub fields: Vec<DumpField>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
            fields: vec![DumpField::Surface, DumpField::Diagnostics, DumpField::Stability],
        }
    }
}

impl OutputConfig {
    fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    fn dumps(&self, field: DumpField) -> bool {
        self.fields.contains(&field)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpatialConfig {
    pub orders: Vec<usize>,
    pub n_elements: Vec<usize>,
    pub n_steps: usize,
}

impl Default for SpatialConfig {
    fn default() -> Self {
        SpatialConfig {
            orders: vec![1],
            n_elements: vec![64, 128, 256, 512, 1024],
            n_steps: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemporalConfig {
    pub n_steps: Vec<usize>,
    pub n_elements: usize,
    pub order: usize,
}

impl Default for TemporalConfig {
    fn default() -> Self {
        TemporalConfig {
            n_steps: vec![64, 128, 256, 512, 1024],
            n_elements: 2048,
            order: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub spatial: Option<SpatialConfig>,
    pub temporal: Option<TemporalConfig>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            spatial: Some(SpatialConfig::default()),
            temporal: Some(TemporalConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub method: TrackMethod,
    /// Start of the first Green search; `ln(γ/K)` when unset.
    pub initial_guess: Option<f64>,
    pub warm_start: bool,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig {
            method: TrackMethod::Both,
            initial_guess: None,
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub mesh: MeshConfig,
    pub time: TimeConfig,
    pub bc: BcConfig,
    pub outputs: OutputConfig,
    pub convergence: ConvergenceConfig,
    pub boundary: BoundaryConfig,
}

fn keyed(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("{prefix}.{name}"), reason),
        Error::Domain { what, value, lower, upper } => Error::config(
            format!("{prefix}.{what}"),
            format!("{value} is outside [{lower}, {upper}]"),
        ),
        Error::InconsistentInput(reason) => Error::config(prefix, reason),
        other => other,
    }
}

impl RunConfig {
    /// Checks every section before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| keyed("model", e))?;
        if !(1..=MAX_ORDER).contains(&self.mesh.order) {
            return Err(Error::config(
                "mesh.order",
                format!("{} is not supported; the supported range is 1..={MAX_ORDER}", self.mesh.order),
            ));
        }
        self.mesh().map_err(|e| keyed("mesh", e))?;
        TimeGrid::new(self.model.maturity, self.time.n_steps).map_err(|e| keyed("time", e))?;
        if self.outputs.formats.is_empty() {
            return Err(Error::config("outputs.formats", "no output format selected"));
        }
        for (key, value) in [("bc.left", self.bc.left), ("bc.right", self.bc.right)] {
            if value.is_some_and(|v| !v.is_finite()) {
                return Err(Error::config(key, "must be finite"));
            }
        }
        if let Some(x0) = self.boundary.initial_guess {
            if !(x0 >= self.model.x_min && x0 <= self.model.x_max) {
                return Err(Error::config(
                    "boundary.initial_guess",
                    format!("{x0} lies outside the window [{}, {}]", self.model.x_min, self.model.x_max),
                ));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<Mesh> {
        let m = &self.model;
        match &self.mesh.breakpoints {
            Some(breaks) => {
                let tol = 1e-12 * (1.0 + m.x_min.abs().max(m.x_max.abs()));
                let (first, last) = (breaks.first().copied(), breaks.last().copied());
                if first.is_none_or(|a| (a - m.x_min).abs() > tol)
                    || last.is_none_or(|b| (b - m.x_max).abs() > tol)
                {
                    return Err(Error::invalid(
                        "breakpoints",
                        format!("must start at x_min = {} and end at x_max = {}", m.x_min, m.x_max),
                    ));
                }
                Mesh::from_breakpoints(breaks.clone(), self.mesh.order)
            }
            // a node on the payoff kink keeps interpolation of the initial data optimal
            None => Mesh::uniform(m.x_min, m.x_max, self.mesh.n_elements, self.mesh.order)?.align_breakpoint(0.0),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.model.maturity, self.time.n_steps)
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        let m = &self.model;
        BoundaryCondition::constant(
            self.bc.left.unwrap_or_else(|| m.payoff(m.x_min)),
            self.bc.right.unwrap_or_else(|| m.payoff(m.x_max)),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Every dotted key of the configuration with its default value, in
/// declaration order.
pub fn config_keys() -> Vec<(String, String)> {
    let value = serde_json::to_value(RunConfig::default()).expect("config serializes");
    let mut keys = Vec::new();
    flatten("", &value, &mut keys);
    keys
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.to_string())),
    }
}

/// Help text listing every configuration key.
pub fn config_help() -> String {
    let keys = config_keys();
    let width = keys.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut text = String::from("Configuration keys (override with --set key=value):\n");
    for (k, v) in keys {
        text.push_str(&format!("  {k:<width$}  default {v}\n"));
    }
    text
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

fn apply_override(root: &mut Value, known: &[(String, String)], assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(assignment, "override must have the form key=value"))?;
    let key = key.trim();
    if !known.iter().any(|(k, _)| k == key) {
        return Err(Error::config(key, "unknown configuration key"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut slot = root;
    for part in key.split('.') {
        if slot.is_null() {
            *slot = json!({});
        }
        slot = slot
            .as_object_mut()
            .ok_or_else(|| Error::config(key, "parent is not a section"))?
            .entry(part)
            .or_insert(Value::Null);
    }
    *slot = value;
    Ok(())
}

fn deserialize(value: Value, origin: &str) -> Result<RunConfig> {
    serde_json::from_value(value).map_err(|e| Error::config(origin, e.to_string()))
}

/// Defaults, then the file (if any), then the overrides in order; the result
/// is validated.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut value = serde_json::to_value(RunConfig::default())?;
    let origin = path.map(|p| p.display().to_string()).unwrap_or_else(|| "--set".into());
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|e| Error::config(&origin, e.to_string()))?;
        let file: Value =
            serde_json::from_str(&text).map_err(|e| Error::config(&origin, format!("malformed JSON: {e}")))?;
        if !file.is_object() {
            return Err(Error::config(&origin, "top level must be an object"));
        }
        // unknown keys in the file are rejected by the typed pass
        deserialize(file.clone(), &origin)?;
        merge(&mut value, file);
    }
    let known = config_keys();
    for o in overrides {
        apply_override(&mut value, &known, o)?;
    }
    let config = deserialize(value, &origin)?;
    config.validate()?;
    Ok(config)
}

/// Exit code for an error escaping a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Configuration { .. } | Error::InvalidParameter { .. } | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

/// Files written by one command and the exit code it asks for.
#[derive(Debug, Clone, Default)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        std::io::Write::write_all(&mut w, b"\n")?;
        Ok(())
    }

    fn status(&mut self, command: &str, status: &str, error: Option<String>) -> Result<()> {
        self.json("status.json", &json!({ "command": command, "status": status, "error": error }))
    }
}

fn write_triplets(outputs: &mut Outputs, name: &str, m: &BandedMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(outputs.create(name)?);
    w.write_record(["i", "j", "value"])?;
    for (i, j, v) in m.triplets() {
        w.write_record([i.to_string(), j.to_string(), format!("{v:.16e}")])?;
    }
    w.flush()?;
    Ok(())
}

fn run(config: &RunConfig) -> Result<SolutionHistory> {
    let mesh = Arc::new(config.mesh()?);
    run_solver(&config.model, mesh, config.time_grid()?, &config.boundary_condition())
}

/// Runs the solver and writes the surface, per-step diagnostics and the
/// stability report.
pub fn command_solve(config: &RunConfig) -> Result<CommandOutcome> {
    config.validate()?;
    let out = &config.outputs;
    let mut outputs = Outputs::new(&out.directory)?;
    if out.dumps(DumpField::Matrices) {
        let mesh = Arc::new(config.mesh()?);
        let rule = default_rule(&mesh);
        let u0 = SolutionField::interpolate(mesh.clone(), |x| config.model.payoff(x), 0.0)?;
        write_triplets(&mut outputs, "mass.csv", &assemble_mass(&mesh, &rule)?)?;
        let a0 = assemble_operator(&mesh, &u0, 0.0, &config.model, &rule)?;
        write_triplets(&mut outputs, "operator_0.csv", &a0)?;
    }
    let history = match run(config) {
        Ok(h) => h,
        Err(e) => {
            outputs.status("solve", "failed", Some(e.to_string()))?;
            return Err(e);
        }
    };
    if out.dumps(DumpField::Surface) && out.wants(Format::Csv) {
        history.write_surface_csv(outputs.create("surface.csv")?)?;
    }
    if out.dumps(DumpField::Diagnostics) {
        if out.wants(Format::Json) {
            outputs.json("diagnostics.json", &history.summary())?;
        }
        if out.wants(Format::Csv) {
            let mut w = csv::Writer::from_writer(outputs.create("diagnostics.csv")?);
            w.write_record(["step", "t", "residual", "sigma_min", "sigma_max", "l2_norm"])?;
            for d in history.diagnostics() {
                w.write_record([
                    d.step.to_string(),
                    format!("{:.16e}", d.time),
                    format!("{:.16e}", d.residual),
                    format!("{:.16e}", d.sigma_min),
                    format!("{:.16e}", d.sigma_max),
                    format!("{:.16e}", d.l2_norm),
                ])?;
            }
            w.flush()?;
        }
    }
    if out.dumps(DumpField::Stability) {
        let report = stability_diagnostic(&history, &config.model);
        if out.wants(Format::Json) {
            outputs.json(
                "stability.json",
                &json!({
                    "holds_pointwise": report.holds_pointwise,
                    "holds_integrated": report.holds_integrated,
                    "violations": report.violations,
                    "min_running_sum": report.min_running_sum,
                    "norm_growth": history.norm_growth(),
                    "steps": report.steps,
                }),
            )?;
        }
        if out.wants(Format::Csv) {
            let mut w = csv::Writer::from_writer(outputs.create("stability.csv")?);
            w.write_record([
                "step",
                "t",
                "min_summand",
                "min_running_sum",
                "argmin_x",
                "integrated_summand",
                "integrated_running_sum",
            ])?;
            for s in &report.steps {
                w.write_record([
                    s.step.to_string(),
                    format!("{:.16e}", s.time),
                    format!("{:.16e}", s.min_summand),
                    format!("{:.16e}", s.min_running_sum),
                    format!("{:.16e}", s.argmin_x),
                    format!("{:.16e}", s.integrated_summand),
                    format!("{:.16e}", s.integrated_running_sum),
                ])?;
            }
            w.flush()?;
        }
    }
    outputs.status("solve", "ok", None)?;
    Ok(CommandOutcome {
        files: outputs.files,
        exit_code: EXIT_OK,
        messages: vec![format!(
            "{} levels on {} degrees of freedom, norm growth {:.6}",
            history.len(),
            history.mesh().dof_count(),
            history.norm_growth()
        )],
    })
}

fn write_table(outputs: &mut Outputs, config: &RunConfig, name: &str, table: &ConvergenceTable) -> Result<()> {
    if config.outputs.wants(Format::Csv) {
        table.write_csv(outputs.create(&format!("{name}.csv"))?)?;
    }
    if config.outputs.wants(Format::Json) {
        outputs.json(&format!("{name}.json"), table)?;
    }
    Ok(())
}

/// Spatial and temporal convergence tables. Failed rows are recorded in the
/// tables and the command carries on.
pub fn command_converge(config: &RunConfig) -> Result<CommandOutcome> {
    config.validate()?;
    let conv = &config.convergence;
    if conv.spatial.is_none() && conv.temporal.is_none() {
        return Err(Error::config("convergence", "no study configured"));
    }
    if let Some(s) = &conv.spatial {
        if s.orders.is_empty() || s.n_elements.is_empty() {
            return Err(Error::config("convergence.spatial", "orders and n_elements must be non-empty"));
        }
        if let Some(&r) = s.orders.iter().find(|&&r| !(1..=MAX_ORDER).contains(&r)) {
            return Err(Error::config(
                "convergence.spatial.orders",
                format!("{r} is not supported; the supported range is 1..={MAX_ORDER}"),
            ));
        }
    }
    if let Some(t) = &conv.temporal {
        if t.n_steps.is_empty() {
            return Err(Error::config("convergence.temporal.n_steps", "list is empty"));
        }
        if !(1..=MAX_ORDER).contains(&t.order) {
            return Err(Error::config(
                "convergence.temporal.order",
                format!("{} is not supported; the supported range is 1..={MAX_ORDER}", t.order),
            ));
        }
    }
    let mut outputs = Outputs::new(&config.outputs.directory)?;
    let mut messages = Vec::new();
    let mut failed_rows = 0;
    if let Some(s) = &conv.spatial {
        let table = spatial_convergence_study(&config.model, &s.orders, &s.n_elements, s.n_steps)?;
        failed_rows += table.rows.iter().filter(|r| r.failure.is_some()).count();
        for f in &table.fitted {
            messages.push(format!("spatial r={}: fitted L2 {:?}, Linf {:?}", f.order, f.l2, f.linf));
        }
        write_table(&mut outputs, config, "spatial", &table)?;
    }
    if let Some(t) = &conv.temporal {
        let table = temporal_convergence_study(&config.model, &t.n_steps, t.n_elements, t.order)?;
        failed_rows += table.rows.iter().filter(|r| r.failure.is_some()).count();
        for f in &table.fitted {
            messages.push(format!("temporal: fitted L2 {:?}", f.l2));
        }
        write_table(&mut outputs, config, "temporal", &table)?;
    }
    let status = if failed_rows == 0 { "ok" } else { "partial" };
    outputs.status("converge", status, (failed_rows > 0).then(|| format!("{failed_rows} rows failed")))?;
    Ok(CommandOutcome {
        files: outputs.files,
        exit_code: if failed_rows == 0 { EXIT_OK } else { EXIT_SOLVER },
        messages,
    })
}

/// Solver run followed by boundary tracking; exits with
/// [`EXIT_PARTIAL_BOUNDARY`] when fewer than 95% of the levels converge.
pub fn command_boundary(config: &RunConfig) -> Result<CommandOutcome> {
    config.validate()?;
    let mut outputs = Outputs::new(&config.outputs.directory)?;
    let history = match run(config) {
        Ok(h) => h,
        Err(e) => {
            outputs.status("boundary", "failed", Some(e.to_string()))?;
            return Err(e);
        }
    };
    let options = TrackOptions {
        method: config.boundary.method,
        warm_start: config.boundary.warm_start,
        initial_guess: config.boundary.initial_guess,
    };
    let path = track_boundary(&history, &config.model, options);
    let methods: Vec<RootMethod> = match options.method {
        TrackMethod::Direct => vec![RootMethod::Direct],
        TrackMethod::Green => vec![RootMethod::Green],
        TrackMethod::Both => vec![RootMethod::Direct, RootMethod::Green],
    };
    let fraction = methods
        .iter()
        .map(|&m| path.converged_fraction(m))
        .fold(1.0, f64::min);
    if config.outputs.wants(Format::Csv) {
        path.write_csv(outputs.create("boundary.csv")?)?;
    }
    let summary = json!({
        "levels": path.levels,
        "converged_fraction": fraction,
        "max_discrepancy": path.max_discrepancy(),
        "full_step_rate": path.full_step_rate(),
        "failures": path.failures,
        "discrepancies": path.discrepancies,
    });
    if config.outputs.wants(Format::Json) {
        outputs.json("boundary_summary.json", &summary)?;
    }
    let ok = fraction >= BOUNDARY_SUCCESS_FRACTION;
    outputs.status("boundary", if ok { "ok" } else { "partial" }, None)?;
    Ok(CommandOutcome {
        files: outputs.files,
        exit_code: if ok { EXIT_OK } else { EXIT_PARTIAL_BOUNDARY },
        messages: vec![format!(
            "{:.1}% of {} levels converged, max discrepancy {:e}",
            100.0 * fraction,
            path.levels,
            path.max_discrepancy()
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_the_defaults() {
        let c = parse_config(None, &[]).unwrap();
        assert_eq!(c.model, ModelParams::default());
        assert_eq!(c.model.rate, 0.5);
        assert_eq!(c.model.delta, 0.005);
        assert_eq!(c.model.sigma_low_grade, 0.3);
        assert_eq!(c.model.sigma_high_grade, 0.2);
        assert_eq!(c.model.gamma, 0.8);
        assert_eq!(c.model.maturity, 1.0);
    }

    #[test]
    fn overrides_are_typed_and_checked() {
        let c = parse_config(None, &["mesh.order=2".into(), "outputs.formats=[\"json\"]".into()]).unwrap();
        assert_eq!(c.mesh.order, 2);
        assert_eq!(c.outputs.formats, vec![Format::Json]);
        let err = parse_config(None, &["model.sigma_high_grade=0.4".into()]).unwrap_err();
        assert!(matches!(&err, Error::Configuration { key, .. } if key == "model.sigma_high_grade"), "{err}");
        let err = parse_config(None, &["mesh.order=5".into()]).unwrap_err();
        assert!(err.to_string().contains("1..=4"), "{err}");
        let err = parse_config(None, &["mesh.colour=5".into()]).unwrap_err();
        assert!(matches!(&err, Error::Configuration { key, .. } if key == "mesh.colour"));
        assert!(parse_config(None, &["mesh.order".into()]).is_err());
    }

    #[test]
    fn uniform_meshes_carry_a_node_on_the_kink() {
        let c = parse_config(None, &["mesh.n_elements=7".into()]).unwrap();
        let mesh = c.mesh().unwrap();
        assert_eq!(mesh.n_elements(), 7);
        assert!(mesh.breakpoints().contains(&0.0));
        let c = parse_config(None, &["mesh.n_elements=8".into()]).unwrap();
        assert_eq!(c.mesh().unwrap(), Mesh::uniform(-4.0, 4.0, 8, 1).unwrap());
    }

    #[test]
    fn optional_keys_can_be_set() {
        let c = parse_config(None, &["bc.left=0.1".into(), "boundary.initial_guess=-0.3".into()]).unwrap();
        assert_eq!(c.bc.left, Some(0.1));
        assert_eq!(c.boundary.initial_guess, Some(-0.3));
        let err = parse_config(None, &["boundary.initial_guess=9".into()]).unwrap_err();
        assert!(matches!(&err, Error::Configuration { key, .. } if key == "boundary.initial_guess"));
    }

    #[test]
    fn help_lists_every_key() {
        let help = config_help();
        for (key, default) in config_keys() {
            assert!(help.contains(&key) && help.contains(&default), "{key}");
        }
        assert!(help.contains("model.sigma_low_grade"));
        assert!(help.contains("convergence.temporal.n_elements"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("a", "b")), EXIT_CONFIG);
        assert_eq!(
            exit_code(&Error::SingularSystem { row: 0, pivot: 0.0, scale: 1.0 }),
            EXIT_SOLVER
        );
    }
}
