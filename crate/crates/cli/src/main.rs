use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use uvplan::floorplan::{SimplificationConfig, SimplificationMethod};
use uvplan::irradiance::{IncidenceMode, LightConfig};
use uvplan::Point2;
use uvplan_cli::{
    corpus_inputs, run_experiment_suite, run_pipeline, AlgorithmChoice, CliError, Input, RunConfig, DEFAULT_ROBOT_RADIUS,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Naive,
    Pessimistic,
    BranchAndBound,
    LowerBound,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IncidenceArg {
    WallExtended,
    FloorNormal,
    None,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SimplifyArg {
    Rectilinear,
    DouglasPeucker,
}

/// Plan stops, dwell times and a route that disinfect a room with a mobile
/// UVC lamp.
#[derive(Debug, Parser)]
#[command(name = "uvplan", version)]
struct Args {
    /// Occupancy map: map-server yaml, or pgm/ppm with a sibling yaml.
    #[arg(long, conflicts_with_all = ["polygon", "room"])]
    map: Option<PathBuf>,
    /// Floor plan JSON `{"outer": [[x, y], ...], "holes": [[[x, y], ...], ...]}` in meters.
    #[arg(long, conflicts_with = "room")]
    polygon: Option<PathBuf>,
    /// Built-in room (hri-lab, l-room, office, t-corridor). Repeatable with --suite.
    #[arg(long)]
    room: Vec<String>,
    /// Defaults to pessimistic for a single plan and all with --suite.
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    /// Grid spacing in meters; a comma list with --suite.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// Required dose in µW·s/cm².
    #[arg(long, default_value_t = 120600.0)]
    dose: f64,
    /// Lamp calibration constant P in µW·m²/cm².
    #[arg(long, default_value_t = 10.0)]
    power: f64,
    /// Half the floor-to-ceiling distance in meters.
    #[arg(long, default_value_t = 1.35)]
    half_height: f64,
    #[arg(long, default_value_t = 0.3)]
    shadow_radius: f64,
    /// Ignore the robot's shadow (radius 0).
    #[arg(long)]
    no_shadow: bool,
    #[arg(long, value_enum, default_value = "wall-extended")]
    incidence_mode: IncidenceArg,
    #[arg(long, default_value_t = DEFAULT_ROBOT_RADIUS)]
    robot_radius: f64,
    /// Travel speed in m/s.
    #[arg(long, default_value_t = 0.3)]
    speed: f64,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verification grid spacing; a quarter of epsilon by default.
    #[arg(long)]
    verify_epsilon: Option<f64>,
    /// Also write dose_field.csv.
    #[arg(long)]
    dose_field: bool,
    /// Run the room × epsilon × shadow sweep instead of a single plan.
    #[arg(long)]
    suite: bool,
    #[arg(long, value_enum, default_value = "rectilinear")]
    simplify: SimplifyArg,
    /// Simplification tolerance in meters.
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
    /// Morphological closing radius in cells.
    #[arg(long, default_value_t = 2)]
    closing_radius: usize,
    /// Start the tour nearest to this point, given as `x,y`.
    #[arg(long, value_parser = parse_point)]
    entry: Option<Point2>,
    /// Return to the first stop at the end.
    #[arg(long)]
    closed_tour: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn config(a: &Args, input: Input) -> RunConfig {
    let mut cfg = RunConfig::new(input);
    cfg.algorithm = match a.algorithm.unwrap_or(AlgorithmArg::Pessimistic) {
        AlgorithmArg::Naive => AlgorithmChoice::Naive,
        AlgorithmArg::Pessimistic => AlgorithmChoice::Pessimistic,
        AlgorithmArg::BranchAndBound => AlgorithmChoice::BranchAndBound,
        AlgorithmArg::LowerBound => AlgorithmChoice::LowerBound,
        AlgorithmArg::All => AlgorithmChoice::All,
    };
    cfg.requirement = a.dose;
    cfg.light = LightConfig {
        power: a.power,
        half_height: a.half_height,
        shadow_radius: if a.no_shadow { 0.0 } else { a.shadow_radius },
        incidence: match a.incidence_mode {
            IncidenceArg::WallExtended => IncidenceMode::WallExtended,
            IncidenceArg::FloorNormal => IncidenceMode::FloorNormal,
            IncidenceArg::None => IncidenceMode::None,
        },
    };
    cfg.robot_radius = a.robot_radius;
    cfg.speed = a.speed;
    cfg.simplification = SimplificationConfig {
        tolerance: a.tolerance,
        closing_radius: a.closing_radius,
        method: match a.simplify {
            SimplifyArg::Rectilinear => SimplificationMethod::Rectilinear,
            SimplifyArg::DouglasPeucker => SimplificationMethod::DouglasPeucker,
        },
    };
    cfg.out = a.out.clone();
    cfg.verify_epsilon = a.verify_epsilon;
    cfg.dose_field = a.dose_field;
    cfg.entry = a.entry;
    cfg.closed_tour = a.closed_tour;
    cfg.seed = a.seed;
    cfg
}

fn run(a: Args) -> Result<ExitCode, CliError> {
    let mut inputs: Vec<Input> = Vec::new();
    if let Some(m) = &a.map {
        inputs.push(Input::Map(m.clone()));
    }
    if let Some(p) = &a.polygon {
        inputs.push(Input::Polygon(p.clone()));
    }
    inputs.extend(a.room.iter().cloned().map(Input::Room));
    if a.suite {
        if inputs.is_empty() {
            inputs = corpus_inputs();
        }
        let eps = if a.epsilon.is_empty() { uvplan_cli::DEFAULT_EPSILONS.to_vec() } else { a.epsilon.clone() };
        let mut base = config(&a, inputs[0].clone());
        if a.algorithm.is_none() {
            base.algorithm = AlgorithmChoice::All;
        }
        let algorithms = base.algorithm.algorithms();
        base.epsilon = eps[0];
        let table = run_experiment_suite(&inputs, &eps, &algorithms, &base)?;
        print!("{}", table.render());
        let failed = table.rows.iter().any(|r| r.guarantee == Some(false));
        return Ok(if failed { ExitCode::from(3) } else { ExitCode::SUCCESS });
    }
    if inputs.len() != 1 {
        return Err(CliError::Config("give exactly one of --map, --polygon or --room (or use --suite)".into()));
    }
    if a.epsilon.len() > 1 {
        return Err(CliError::Config("several epsilon values need --suite".into()));
    }
    let mut cfg = config(&a, inputs.remove(0));
    if let Some(&e) = a.epsilon.first() {
        cfg.epsilon = e;
    }
    let out = run_pipeline(&cfg)?;
    for r in &out.runs {
        let s = &r.solution;
        match (&r.plan, &r.verification) {
            (Some(p), Some(v)) => println!(
                "{}: {} stops, dwell {:.1} s, travel {:.1} s, verified coverage {:.2}% (kept {:.2}%){}",
                s.algorithm.name(),
                p.stops.len(),
                p.total_dwell,
                p.travel_time,
                v.coverage_percent,
                v.kept_coverage_percent,
                match &v.guarantee {
                    Some(g) if g.passed => ", guarantee holds".to_string(),
                    Some(g) => format!(", GUARANTEE FAILED at {} points", g.failures),
                    None => String::new(),
                }
            ),
            _ => println!(
                "{}: at least {:.1} s of dwell; at most {:.2}% of the room coverable",
                s.algorithm.name(),
                s.total_dwell,
                s.coverage_percent
            ),
        }
    }
    if !out.wall_check.passed {
        log::warn!("wall sufficiency check failed on {} samples", out.wall_check.violations.len());
    }
    Ok(if out.guarantee_ok() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_degenerate() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn parse_point(s: &str) -> Result<Point2, String> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"))).collect::<Result<_, _>>()?;
    match v[..] {
        [x, y] => Ok(Point2::new(x, y)),
        _ => Err("expected x,y".into()),
    }
}
