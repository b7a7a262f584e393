//! Orchestration for the `uvplan` binary: load a room, plan, route, verify
//! and write the artifacts; or sweep a set of rooms for comparison tables.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use uvplan::discretize::{build_guard_cover, build_guard_grid, build_target_grid, filter_unseen_targets, TargetSet};
use uvplan::floorplan::{load_occupancy_grid, parse_metadata, vectorize, SimplificationConfig};
use uvplan::geometry::{erode, GuardRegion};
use uvplan::irradiance::{DoseRequirement, GridCell, LightConfig};
use uvplan::plan::{
    plan_branch_and_bound, plan_lower_bound, plan_naive, plan_pessimistic, Algorithm, BnbConfig, WaypointSolution,
};
use uvplan::route::{assemble_plan, plan_route, DisinfectionPlan, DEFAULT_SPEED};
use uvplan::verify::{accumulate_dose, check_wall_sufficiency, report_for, DoseField, VerificationReport, WallCheck};
use uvplan::{FloorPlan, Point2};

/// Default ε sweep for the suite.
pub const DEFAULT_EPSILONS: [f64; 4] = [1.0, 0.5, 0.3, 0.2];
pub const DEFAULT_ROBOT_RADIUS: f64 = 0.3;
const WALL_CHECK_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Input,
    Floorplan,
    Discretize,
    Plan,
    Route,
    Verify,
    Output,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Input => "input",
            Stage::Floorplan => "floorplan",
            Stage::Discretize => "discretize",
            Stage::Plan => "plan",
            Stage::Route => "route",
            Stage::Verify => "verify",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: uvplan::Error,
    },
    #[error("{stage}: {path}: {source}")]
    Io {
        stage: Stage,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Stage { stage, .. } | CliError::Io { stage, .. } => Some(*stage),
            CliError::Config(_) => None,
        }
    }

    /// Whether the instance itself admits no plan, as opposed to bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            CliError::Stage {
                source: uvplan::Error::Degenerate(_) | uvplan::Error::Infeasible(_) | uvplan::Error::Uncoverable(_),
                ..
            }
        )
    }
}

fn at(stage: Stage) -> impl Fn(uvplan::Error) -> CliError {
    move |source| CliError::Stage { stage, source }
}

fn io_at(stage: Stage, path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { stage, path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Input {
    /// Map-server sidecar yaml, or a pgm/ppm with a sibling yaml.
    Map(PathBuf),
    /// JSON `{outer, holes}` in meters.
    Polygon(PathBuf),
    /// Built-in room by name.
    Room(String),
    /// Plan given directly, labeled.
    Plan(String, #[serde(skip)] FloorPlan),
}

impl Input {
    pub fn label(&self) -> String {
        match self {
            Input::Map(p) | Input::Polygon(p) => {
                p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
            }
            Input::Room(n) | Input::Plan(n, _) => n.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmChoice {
    Naive,
    Pessimistic,
    BranchAndBound,
    LowerBound,
    All,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Naive => vec![Algorithm::Naive],
            AlgorithmChoice::Pessimistic => vec![Algorithm::Pessimistic],
            AlgorithmChoice::BranchAndBound => vec![Algorithm::BranchAndBound],
            AlgorithmChoice::LowerBound => vec![Algorithm::LowerBound],
            AlgorithmChoice::All => {
                vec![Algorithm::Naive, Algorithm::Pessimistic, Algorithm::BranchAndBound, Algorithm::LowerBound]
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub input: Input,
    pub algorithm: AlgorithmChoice,
    pub epsilon: f64,
    pub requirement: f64,
    pub light: LightConfig,
    pub robot_radius: f64,
    pub speed: f64,
    pub simplification: SimplificationConfig,
    pub out: Option<PathBuf>,
    /// Fine verification spacing; a quarter of `epsilon` when unset.
    pub verify_epsilon: Option<f64>,
    pub dose_field: bool,
    /// Start the tour at the stop nearest this point.
    pub entry: Option<Point2>,
    pub closed_tour: bool,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(input: Input) -> Self {
        RunConfig {
            input,
            algorithm: AlgorithmChoice::Pessimistic,
            epsilon: 0.5,
            requirement: DoseRequirement::default().r,
            light: LightConfig::default(),
            robot_radius: DEFAULT_ROBOT_RADIUS,
            speed: DEFAULT_SPEED,
            simplification: SimplificationConfig::default(),
            out: None,
            verify_epsilon: None,
            dose_field: false,
            entry: None,
            closed_tour: false,
            seed: 0,
        }
    }

    pub fn verify_spacing(&self) -> f64 {
        self.verify_epsilon.unwrap_or(self.epsilon / 4.0)
    }

    pub fn bnb(&self) -> BnbConfig {
        BnbConfig::for_epsilon(self.epsilon)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.light.validate().map_err(at(Stage::Input))?;
        DoseRequirement::new(self.requirement).map_err(at(Stage::Input))?;
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(CliError::Config(format!("epsilon {} must be positive", self.epsilon)));
        }
        if !(self.robot_radius >= 0.0) {
            return Err(CliError::Config(format!("robot radius {} is negative", self.robot_radius)));
        }
        if !(self.speed > 0.0) {
            return Err(CliError::Config(format!("speed {} must be positive", self.speed)));
        }
        if let Some(v) = self.verify_epsilon {
            if !(v > 0.0) {
                return Err(CliError::Config(format!("verification spacing {v} must be positive")));
            }
            if v > self.epsilon / 4.0 + 1e-12 {
                log::warn!("verification spacing {v} is coarser than a quarter of the planning grid");
            }
        }
        if !(self.simplification.tolerance >= 0.0) {
            return Err(CliError::Config("simplification tolerance is negative".into()));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(io_at(Stage::Input, path))
}

fn yaml_image_key(text: &str) -> Option<String> {
    text.lines().find_map(|l| {
        let l = l.split('#').next()?.trim();
        let (k, v) = l.split_once(':')?;
        (k.trim() == "image").then(|| v.trim().trim_matches(|c| c == '"' || c == '\'').to_string())
    })
}

fn sidecar_of(raster: &Path) -> Option<PathBuf> {
    ["yaml", "yml"].iter().map(|e| raster.with_extension(e)).find(|p| p.exists())
}

/// Floor plan for an input, vectorizing rasters with `simplification`.
pub fn load_plan(input: &Input, simplification: &SimplificationConfig) -> Result<FloorPlan, CliError> {
    match input {
        Input::Plan(_, p) => Ok(p.clone()),
        Input::Room(name) => {
            uvplan::corpus::room(name).ok_or_else(|| CliError::Config(format!("unknown built-in room '{name}'")))
        }
        Input::Polygon(path) => {
            let text = String::from_utf8(read(path)?)
                .map_err(|e| CliError::Config(format!("{}: not UTF-8: {e}", path.display())))?;
            FloorPlan::from_json(&text).map_err(at(Stage::Input))
        }
        Input::Map(path) => {
            let is_yaml = matches!(path.extension().and_then(|e| e.to_str()), Some("yaml" | "yml"));
            let (yaml_path, raster_path) = if is_yaml {
                let text = String::from_utf8_lossy(&read(path)?).into_owned();
                let image = yaml_image_key(&text).ok_or_else(|| CliError::Stage {
                    stage: Stage::Input,
                    source: uvplan::Error::Metadata(format!("{}: missing image key", path.display())),
                })?;
                let dir = path.parent().unwrap_or(Path::new("."));
                (path.clone(), dir.join(image))
            } else {
                let y = sidecar_of(path).ok_or_else(|| CliError::Stage {
                    stage: Stage::Input,
                    source: uvplan::Error::Metadata(format!("no yaml sidecar next to {}", path.display())),
                })?;
                (y, path.clone())
            };
            let meta_text = String::from_utf8_lossy(&read(&yaml_path)?).into_owned();
            let meta = parse_metadata(&meta_text).map_err(at(Stage::Input))?;
            let grid = load_occupancy_grid(&read(&raster_path)?, &meta).map_err(at(Stage::Input))?;
            vectorize(&grid, simplification).map_err(at(Stage::Floorplan))
        }
    }
}

/// Grids shared by every algorithm in a run.
pub struct Discretization {
    pub region: GuardRegion,
    pub guards: Vec<GridCell>,
    pub cover: Vec<GridCell>,
    pub targets: TargetSet,
}

pub fn discretize(plan: &FloorPlan, cfg: &RunConfig) -> Result<Discretization, CliError> {
    let region = erode(plan, cfg.robot_radius);
    let guards = build_guard_grid(&region, cfg.epsilon);
    if guards.is_empty() {
        return Err(CliError::Stage {
            stage: Stage::Discretize,
            source: uvplan::Error::Degenerate(format!(
                "no guard position at ε = {} keeps {} m from the walls",
                cfg.epsilon, cfg.robot_radius
            )),
        });
    }
    let cover = build_guard_cover(&region, cfg.epsilon);
    let targets = build_target_grid(plan, cfg.epsilon);
    if targets.is_empty() {
        return Err(CliError::Stage {
            stage: Stage::Discretize,
            source: uvplan::Error::Degenerate("no target cell meets the plan".into()),
        });
    }
    Ok(Discretization { region, guards, cover, targets })
}

/// One algorithm's result. Lower-bound runs carry no executable plan.
#[derive(Clone, Debug)]
pub struct AlgorithmRun {
    pub solution: WaypointSolution,
    pub plan: Option<DisinfectionPlan>,
    pub verification: Option<VerificationReport>,
    pub field: Option<DoseField>,
}

impl AlgorithmRun {
    pub fn algorithm(&self) -> Algorithm {
        self.solution.algorithm
    }

    pub fn guarantee_ok(&self) -> bool {
        self.verification.as_ref().map_or(true, |v| v.guarantee_ok())
    }
}

fn solve(
    plan: &FloorPlan,
    d: &Discretization,
    cfg: &RunConfig,
    alg: Algorithm,
    pess: Option<&WaypointSolution>,
) -> Result<WaypointSolution, CliError> {
    let req = DoseRequirement::new(cfg.requirement).map_err(at(Stage::Plan))?;
    let light = &cfg.light;
    match alg {
        Algorithm::Naive => plan_naive(plan, light, &req, &d.targets, &d.region, &d.guards),
        Algorithm::Pessimistic => plan_pessimistic(plan, &d.guards, &d.targets, light, &req),
        Algorithm::BranchAndBound => plan_branch_and_bound(plan, &d.guards, &d.targets, light, &req, &cfg.bnb()),
        Algorithm::LowerBound => {
            let kept = match pess {
                Some(p) => p.targets.clone(),
                None => filter_unseen_targets(plan, &d.guards, &d.targets, light).map_err(at(Stage::Plan))?,
            };
            plan_lower_bound(plan, &d.region, &d.cover, &kept, light, &req)
        }
        other => Err(uvplan::Error::InvalidParameter(format!("{} is not a pipeline algorithm", other.name()))),
    }
    .map_err(at(Stage::Plan))
}

fn finish(plan: &FloorPlan, cfg: &RunConfig, solution: WaypointSolution) -> Result<AlgorithmRun, CliError> {
    if solution.algorithm == Algorithm::LowerBound {
        return Ok(AlgorithmRun { solution, plan: None, verification: None, field: None });
    }
    let route = plan_route(plan, &solution, cfg.entry, cfg.speed, cfg.closed_tour).map_err(at(Stage::Route))?;
    let req = DoseRequirement::new(cfg.requirement).map_err(at(Stage::Verify))?;
    let field = accumulate_dose(plan, &solution.waypoints(), &cfg.light, cfg.verify_spacing());
    let report = report_for(plan, &solution, &cfg.light, &req, &field);
    let dp = assemble_plan(plan, &solution, &route, cfg.speed, &report).map_err(at(Stage::Route))?;
    Ok(AlgorithmRun { solution, plan: Some(dp), verification: Some(report), field: cfg.dose_field.then_some(field) })
}

/// Run the given algorithms on one plan, each to its own result.
pub fn run_algorithms(
    plan: &FloorPlan,
    d: &Discretization,
    cfg: &RunConfig,
    algorithms: &[Algorithm],
) -> Vec<(Algorithm, Result<AlgorithmRun, CliError>)> {
    let mut pess: Option<WaypointSolution> = None;
    let mut out = Vec::new();
    // The pessimistic target filter is reused by the lower bound.
    let mut order: Vec<Algorithm> = algorithms.to_vec();
    order.sort_by_key(|a| (*a == Algorithm::LowerBound) as u8);
    for alg in order {
        let res = solve(plan, d, cfg, alg, pess.as_ref()).and_then(|s| {
            if alg == Algorithm::Pessimistic {
                pess = Some(s.clone());
            }
            finish(plan, cfg, s)
        });
        out.push((alg, res));
    }
    out.sort_by_key(|(a, _)| algorithms.iter().position(|b| b == a));
    out
}

#[derive(Clone, Debug, Serialize)]
struct DiscretizationSummary {
    guards: usize,
    guard_cover_cells: usize,
    targets: usize,
    dropped_targets: usize,
    dropped_fraction: f64,
}

#[derive(Serialize)]
struct Parameters<'a> {
    input: &'a Input,
    room: String,
    epsilon: f64,
    requirement: f64,
    light: &'a LightConfig,
    robot_radius: f64,
    speed: f64,
    simplification: &'a SimplificationConfig,
    verify_epsilon: f64,
    branch_and_bound: BnbConfig,
    closed_tour: bool,
    entry: Option<Point2>,
    seed: u64,
}

#[derive(Serialize)]
struct SolutionSummary<'a> {
    algorithm: Algorithm,
    bound_kind: uvplan::irradiance::BoundKind,
    total_dwell_s: f64,
    active_waypoints: usize,
    coverage_targets: usize,
    total_targets: usize,
    claimed_coverage_percent: f64,
    branch_and_bound: &'a Option<uvplan::plan::BnbReport>,
}

#[derive(Serialize)]
struct Report<'a> {
    parameters: Parameters<'a>,
    plan_vertices: usize,
    plan_area_m2: f64,
    discretization: DiscretizationSummary,
    solution: SolutionSummary<'a>,
    plan: &'a Option<DisinfectionPlan>,
    verification: &'a Option<VerificationReport>,
    wall_sufficiency: &'a WallCheck,
}

/// Everything one pipeline run produced.
pub struct PipelineOutput {
    pub plan: FloorPlan,
    pub runs: Vec<AlgorithmRun>,
    pub wall_check: WallCheck,
}

impl PipelineOutput {
    pub fn guarantee_ok(&self) -> bool {
        self.runs.iter().all(AlgorithmRun::guarantee_ok)
    }

    pub fn run(&self, alg: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm() == alg)
    }
}

/// Load, discretize, plan with the configured algorithm(s), route, verify
/// and, with an output directory, write `waypoints.csv`, `report.json`,
/// `table.txt` and optionally `dose_field.csv`. With `all`, each algorithm
/// writes into its own subdirectory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput, CliError> {
    cfg.validate()?;
    let plan = load_plan(&cfg.input, &cfg.simplification)?;
    let d = discretize(&plan, cfg)?;
    let algorithms = cfg.algorithm.algorithms();
    let wall_check = check_wall_sufficiency(WALL_CHECK_SAMPLES, &cfg.light, cfg.seed).map_err(at(Stage::Verify))?;
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for (alg, res) in run_algorithms(&plan, &d, cfg, &algorithms) {
        let run = res?;
        rows.push(row_of(&cfg.input.label(), cfg.epsilon, cfg.light.shadow_radius > 0.0, alg, Ok(&run)));
        runs.push(run);
    }
    if let Some(out) = &cfg.out {
        fs::create_dir_all(out).map_err(io_at(Stage::Output, out))?;
        let split = runs.len() > 1;
        for run in &runs {
            let dir = if split { out.join(run.algorithm().name()) } else { out.clone() };
            write_run(&dir, &plan, &d, cfg, run, &wall_check)?;
        }
        write_atomic(&out.join("table.txt"), ExperimentTable { rows, shadow_deltas: Vec::new() }.render().as_bytes())?;
    }
    Ok(PipelineOutput { plan, runs, wall_check })
}

fn write_run(
    dir: &Path,
    plan: &FloorPlan,
    d: &Discretization,
    cfg: &RunConfig,
    run: &AlgorithmRun,
    wall: &WallCheck,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_at(Stage::Output, dir))?;
    let s = &run.solution;
    let report = Report {
        parameters: Parameters {
            input: &cfg.input,
            room: cfg.input.label(),
            epsilon: cfg.epsilon,
            requirement: cfg.requirement,
            light: &cfg.light,
            robot_radius: cfg.robot_radius,
            speed: cfg.speed,
            simplification: &cfg.simplification,
            verify_epsilon: cfg.verify_spacing(),
            branch_and_bound: cfg.bnb(),
            closed_tour: cfg.closed_tour,
            entry: cfg.entry,
            seed: cfg.seed,
        },
        plan_vertices: plan.vertex_count(),
        plan_area_m2: plan.area(),
        discretization: DiscretizationSummary {
            guards: d.guards.len(),
            guard_cover_cells: d.cover.len(),
            targets: s.targets.len(),
            dropped_targets: s.targets.dropped.len(),
            dropped_fraction: s.targets.dropped_fraction,
        },
        solution: SolutionSummary {
            algorithm: s.algorithm,
            bound_kind: s.bound_kind,
            total_dwell_s: s.total_dwell,
            active_waypoints: s.active.len(),
            coverage_targets: s.coverage_targets,
            total_targets: s.total_targets,
            claimed_coverage_percent: s.coverage_percent,
            branch_and_bound: &s.bnb,
        },
        plan: &run.plan,
        verification: &run.verification,
        wall_sufficiency: wall,
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Stage {
        stage: Stage::Output,
        source: uvplan::Error::Json(e),
    })?;
    json.push('\n');
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    if let Some(p) = &run.plan {
        export_waypoints(p, &dir.join("waypoints.csv"))?;
    }
    if let Some(f) = &run.field {
        let mut buf = Vec::new();
        f.write_csv(&mut buf).expect("write to memory");
        write_atomic(&dir.join("dose_field.csv"), &buf)?;
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_at(Stage::Output, &tmp))?;
    f.write_all(bytes).map_err(io_at(Stage::Output, &tmp))?;
    f.sync_all().map_err(io_at(Stage::Output, &tmp))?;
    fs::rename(&tmp, path).map_err(io_at(Stage::Output, path))
}

/// Waypoints CSV text: `order,x_m,y_m,dwell_s`, one row per stop in route
/// order, six decimals.
pub fn waypoints_csv(plan: &DisinfectionPlan) -> String {
    let mut s = String::from("order,x_m,y_m,dwell_s\n");
    for (i, st) in plan.stops.iter().enumerate() {
        writeln!(s, "{},{:.6},{:.6},{:.6}", i + 1, st.x, st.y, st.dwell).unwrap();
    }
    s
}

pub fn export_waypoints(plan: &DisinfectionPlan, path: &Path) -> Result<(), CliError> {
    write_atomic(path, waypoints_csv(plan).as_bytes())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub room: String,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub shadow: bool,
    /// Total dwell in seconds.
    pub time_s: Option<f64>,
    /// Verified percent of the room reaching the requirement; for the lower
    /// bound, its coverage ceiling.
    pub disinfected_percent: Option<f64>,
    /// Percent the algorithm itself accounts for.
    pub claimed_percent: Option<f64>,
    pub waypoints: Option<usize>,
    /// Outcome of the certified-region check, when the algorithm has one.
    pub guarantee: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowDelta {
    pub room: String,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub time_with_shadow_s: f64,
    pub time_without_shadow_s: f64,
    /// Extra time the shadow costs, percent of the shadow-free time.
    pub delta_percent: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
    pub shadow_deltas: Vec<ShadowDelta>,
}

fn row_of(
    room: &str,
    eps: f64,
    shadow: bool,
    alg: Algorithm,
    res: Result<&AlgorithmRun, &CliError>,
) -> ExperimentRow {
    let mut row = ExperimentRow {
        room: room.to_string(),
        algorithm: alg,
        epsilon: eps,
        shadow,
        time_s: None,
        disinfected_percent: None,
        claimed_percent: None,
        waypoints: None,
        guarantee: None,
        error: None,
    };
    match res {
        Ok(run) => {
            let s = &run.solution;
            row.time_s = Some(s.total_dwell);
            row.claimed_percent = Some(s.coverage_percent);
            row.waypoints = Some(s.active.len());
            row.disinfected_percent = Some(run.verification.as_ref().map_or(s.coverage_percent, |v| v.coverage_percent));
            row.guarantee = run.verification.as_ref().and_then(|v| v.guarantee.as_ref()).map(|g| g.passed);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

impl ExperimentTable {
    pub fn row(&self, room: &str, alg: Algorithm, eps: f64, shadow: bool) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.room == room && r.algorithm == alg && r.shadow == shadow && (r.epsilon - eps).abs() < 1e-12)
    }

    fn compute_deltas(&mut self) {
        let mut out = Vec::new();
        for on in self.rows.iter().filter(|r| r.shadow) {
            let Some(off) = self.row(&on.room, on.algorithm, on.epsilon, false) else {
                continue;
            };
            if let (Some(a), Some(b)) = (on.time_s, off.time_s) {
                out.push(ShadowDelta {
                    room: on.room.clone(),
                    algorithm: on.algorithm,
                    epsilon: on.epsilon,
                    time_with_shadow_s: a,
                    time_without_shadow_s: b,
                    delta_percent: 100.0 * (a - b) / b,
                });
            }
        }
        self.shadow_deltas = out;
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let fmt_opt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.p$}"));
        let header = ["room", "algorithm", "epsilon", "shadow", "time_s", "disinfected_%", "claimed_%", "stops", "guarantee", "note"];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            cells.push(vec![
                r.room.clone(),
                r.algorithm.name().to_string(),
                format!("{:.2}", r.epsilon),
                if r.shadow { "on" } else { "off" }.to_string(),
                fmt_opt(r.time_s, 0),
                fmt_opt(r.disinfected_percent, 2),
                fmt_opt(r.claimed_percent, 2),
                r.waypoints.map_or_else(|| "-".into(), |n| n.to_string()),
                match r.guarantee {
                    Some(true) => "pass".into(),
                    Some(false) => "FAIL".into(),
                    None => "-".into(),
                },
                r.error.clone().unwrap_or_default(),
            ]);
        }
        let mut s = render_columns(&cells);
        if !self.shadow_deltas.is_empty() {
            s.push('\n');
            let mut d: Vec<Vec<String>> =
                vec![["room", "algorithm", "epsilon", "shadow_s", "no_shadow_s", "delta_%"].iter().map(|s| s.to_string()).collect()];
            for x in &self.shadow_deltas {
                d.push(vec![
                    x.room.clone(),
                    x.algorithm.name().to_string(),
                    format!("{:.2}", x.epsilon),
                    format!("{:.0}", x.time_with_shadow_s),
                    format!("{:.0}", x.time_without_shadow_s),
                    format!("{:+.2}", x.delta_percent),
                ]);
            }
            s.push_str(&render_columns(&d));
        }
        s
    }
}

fn render_columns(cells: &[Vec<String>]) -> String {
    let n = cells[0].len();
    let widths: Vec<usize> = (0..n).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for r in cells {
        let line: Vec<String> = r.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

/// Suite sweep: every room × ε × shadow on/off × algorithm, with `base`
/// supplying all other parameters. Shadow-off runs use radius zero; failed
/// cells are recorded in their rows and the sweep continues.
pub fn run_experiment_suite(
    rooms: &[Input],
    epsilons: &[f64],
    algorithms: &[Algorithm],
    base: &RunConfig,
) -> Result<ExperimentTable, CliError> {
    base.validate()?;
    let shadow_on = if base.light.shadow_radius > 0.0 { base.light.shadow_radius } else { LightConfig::default().shadow_radius };
    let mut plans = Vec::new();
    for r in rooms {
        plans.push((r.label(), load_plan(r, &base.simplification)));
    }
    let cells: Vec<(usize, f64, bool)> = (0..plans.len())
        .flat_map(|i| epsilons.iter().flat_map(move |&e| [true, false].into_iter().map(move |s| (i, e, s))))
        .collect();
    let rows: Vec<Vec<ExperimentRow>> = cells
        .par_iter()
        .map(|&(i, eps, shadow)| {
            let (label, plan) = &plans[i];
            let mut cfg = base.clone();
            cfg.epsilon = eps;
            cfg.verify_epsilon = None;
            cfg.light.shadow_radius = if shadow { shadow_on } else { 0.0 };
            cfg.out = None;
            let failed = |e: &CliError| algorithms.iter().map(|&a| row_of(label, eps, shadow, a, Err(e))).collect();
            let plan = match plan {
                Ok(p) => p,
                Err(e) => return failed(e),
            };
            let d = match discretize(plan, &cfg) {
                Ok(d) => d,
                Err(e) => return failed(&e),
            };
            run_algorithms(plan, &d, &cfg, algorithms)
                .into_iter()
                .map(|(a, r)| {
                    if let Err(e) = &r {
                        log::warn!("{label} ε={eps} shadow={shadow} {}: {e}", a.name());
                    }
                    row_of(label, eps, shadow, a, r.as_ref())
                })
                .collect()
        })
        .collect();
    let mut table = ExperimentTable { rows: rows.into_iter().flatten().collect(), shadow_deltas: Vec::new() };
    table.compute_deltas();
    if let Some(out) = &base.out {
        fs::create_dir_all(out).map_err(io_at(Stage::Output, out))?;
        write_atomic(&out.join("table.txt"), table.render().as_bytes())?;
        let mut json = serde_json::to_string_pretty(&SuiteReport { parameters: base, epsilons, table: &table })
            .map_err(|e| CliError::Stage { stage: Stage::Output, source: uvplan::Error::Json(e) })?;
        json.push('\n');
        write_atomic(&out.join("report.json"), json.as_bytes())?;
    }
    Ok(table)
}

#[derive(Serialize)]
struct SuiteReport<'a> {
    parameters: &'a RunConfig,
    epsilons: &'a [f64],
    table: &'a ExperimentTable,
}

/// Built-in rooms as suite inputs.
pub fn corpus_inputs() -> Vec<Input> {
    uvplan::corpus::rooms().into_iter().map(|(n, _)| Input::Room(n.to_string())).collect()
}
