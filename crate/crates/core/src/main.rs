use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skyharvest::channel::coverage_radius;
use skyharvest::clustering::{clustering_sweep, plan_clusterheads, Clustering};
use skyharvest::harness::{emit_csv, format_sig6, run_experiment, ExperimentConfig, ExperimentKind, Table};
use skyharvest::routing::{
    brute_force_mtsp, ga_mtsp, ga_mtsp_fair, nearest_neighbor_route, tspn_adjust, validate_plan, GAConfig,
    RoutePlan, RouteProblem,
};
use skyharvest::scenario::{generate_scenario, load_environment_registry, read_json, write_json};
use skyharvest::{EnvironmentProfile, Error, Point3, RadioConfig, Result, Scenario, ScenarioSpec};

#[derive(Parser)]
#[command(name = "skyharvest", version, about = "UAV data-collection planning for sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario JSON.
    Scenario(ScenarioArgs),
    /// Place cluster heads for a scenario, optionally sweeping the sensor range.
    Cluster(ClusterArgs),
    /// Plan UAV tours over a clustering.
    Route(RouteArgs),
    /// Print coverage radius against altitude as CSV.
    Channel(ChannelArgs),
    /// Run a seeded experiment and write its CSV tables.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    sensors: usize,
    #[arg(long, default_value_t = 10_000.0)]
    width: f64,
    #[arg(long, default_value_t = 10_000.0)]
    height: f64,
    /// Dock as `x,y`; defaults to the area center.
    #[arg(long, value_parser = parse_xy)]
    dock: Option<(f64, f64)>,
    #[arg(long, default_value_t = 200)]
    max_chs: usize,
    #[arg(long, default_value_t = 3)]
    max_uavs: usize,
    #[arg(long, default_value_t = 200.0)]
    altitude: f64,
    #[arg(long, default_value_t = 10.0)]
    speed: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Sensor communication range, meters.
    #[arg(long, default_value_t = 1700.0)]
    d_th: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Clustering JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated ranges to sweep, meters.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Sweep CSV output (d_th_m, run, k_prime).
    #[arg(long)]
    sweep_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Exact,
    Nn,
    Ga,
}

#[derive(Args)]
struct EnvArgs {
    /// Environment preset name, or a profile name from `--registry`.
    #[arg(long, default_value = "urban")]
    env: String,
    /// JSON array of environment profiles.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Radio settings JSON; defaults apply otherwise.
    #[arg(long)]
    radio: Option<PathBuf>,
    /// Override the UAV receiver sensitivity, dBm.
    #[arg(long, allow_hyphen_values = true)]
    p_th: Option<f64>,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long)]
    clustering: PathBuf,
    /// Scenario supplying the dock, altitude and speed defaults.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Dock as `x,y`; overrides the scenario dock.
    #[arg(long, value_parser = parse_xy)]
    dock: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1)]
    uavs: usize,
    #[arg(long, value_enum, default_value_t = Solver::Ga)]
    solver: Solver,
    #[arg(long)]
    altitude: Option<f64>,
    #[arg(long)]
    speed: Option<f64>,
    /// Hover radius in meters, or `auto` for the channel coverage radius.
    #[arg(long)]
    tspn_radius: Option<String>,
    /// Route-length standard-deviation bound, meters (GA only).
    #[arg(long)]
    delta_th: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// GA settings JSON.
    #[arg(long)]
    ga: Option<PathBuf>,
    #[command(flatten)]
    env: EnvArgs,
    /// RoutePlan JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-leg CSV output.
    #[arg(long)]
    legs: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// Comma-separated altitudes, meters.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["z_min", "z_max", "z_step"])]
    z: Vec<f64>,
    #[arg(long, default_value_t = 50.0)]
    z_min: f64,
    #[arg(long, default_value_t = 5000.0)]
    z_max: f64,
    #[arg(long, default_value_t = 50.0)]
    z_step: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    name: String,
    /// Experiment config JSON; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also dump per-iteration k-means centroids.
    #[arg(long)]
    trace: bool,
}

fn parse_xy(s: &str) -> std::result::Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or("expected `x,y`")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(x)?, parse(y)?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Scenario(a) => scenario_cmd(a),
        Command::Cluster(a) => cluster_cmd(a),
        Command::Route(a) => route_cmd(a),
        Command::Channel(a) => channel_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) | Error::NoCoverage { .. } | Error::BudgetExceeded { .. } => 2,
        _ => 1,
    }
}

fn scenario_cmd(a: ScenarioArgs) -> Result<ExitCode> {
    let scenario = generate_scenario(&ScenarioSpec {
        seed: a.seed,
        n_sensors: a.sensors,
        area_width: a.width,
        area_height: a.height,
        dock: a.dock.map(|(x, y)| Point3::ground(x, y)),
        max_chs: a.max_chs,
        max_uavs: a.max_uavs,
        uav_altitude: a.altitude,
        uav_speed: a.speed,
    })?;
    write_json(&a.out, &scenario)?;
    Ok(ExitCode::SUCCESS)
}

fn cluster_cmd(a: ClusterArgs) -> Result<ExitCode> {
    let scenario = Scenario::from_json_file(&a.scenario)?;
    if a.sweep.is_empty() && a.sweep_out.is_some() {
        return Err(Error::InvalidInput("--sweep-out needs --sweep".into()));
    }
    if !a.sweep.is_empty() {
        let records = clustering_sweep(&scenario, &a.sweep, a.runs, a.seed)?;
        let mut table = Table::new(&["d_th_m", "run", "k_prime"]);
        for r in &records {
            table.push(vec![r.d_th.into(), r.run.into(), r.k_prime.into()]);
        }
        match &a.sweep_out {
            Some(path) => table.write_csv(path)?,
            None => print_csv(&table)?,
        }
        if a.out.is_none() {
            return Ok(ExitCode::SUCCESS);
        }
    }
    let clustering = plan_clusterheads(&scenario, a.d_th, a.seed)?;
    match &a.out {
        Some(path) => write_json(path, &clustering)?,
        None => println!("{}", to_json(&clustering)?),
    }
    eprintln!("k_prime = {}, d_max = {:.1} m", clustering.k_prime, clustering.d_max);
    Ok(ExitCode::SUCCESS)
}

fn load_env(a: &EnvArgs) -> Result<(EnvironmentProfile, RadioConfig)> {
    let env = match &a.registry {
        Some(path) => load_environment_registry(path)?
            .into_iter()
            .find(|e| e.name == a.env)
            .ok_or_else(|| Error::InvalidInput(format!("{}: no profile named `{}`", path.display(), a.env)))?,
        None => EnvironmentProfile::preset(&a.env)
            .ok_or_else(|| Error::InvalidInput(format!("unknown environment `{}`", a.env)))?,
    };
    let mut radio = match &a.radio {
        Some(path) => read_json::<RadioConfig>(path)?,
        None => RadioConfig::default(),
    };
    if let Some(p_th) = a.p_th {
        radio.p_th = p_th;
    }
    radio.validate()?;
    Ok((env, radio))
}

fn route_cmd(a: RouteArgs) -> Result<ExitCode> {
    let clustering: Clustering = read_json(&a.clustering)?;
    let scenario = a.scenario.as_deref().map(Scenario::from_json_file).transpose()?;
    let dock = match (a.dock, &scenario) {
        (Some((x, y)), _) => Point3::ground(x, y),
        (None, Some(s)) => s.dock,
        (None, None) => return Err(Error::InvalidInput("give --dock or --scenario".into())),
    };
    let altitude = a.altitude.or(scenario.as_ref().map(|s| s.uav_altitude)).unwrap_or(200.0);
    let speed = a.speed.or(scenario.as_ref().map(|s| s.uav_speed)).unwrap_or(10.0);
    let (env, radio) = load_env(&a.env)?;
    let ga = match &a.ga {
        Some(path) => read_json::<GAConfig>(path)?,
        None => GAConfig::default(),
    };
    let problem = RouteProblem::new(clustering.ch_positions.clone(), dock, a.uavs, altitude, speed);

    let plan = match (a.solver, a.delta_th) {
        (Solver::Ga, Some(d)) => ga_mtsp_fair(&problem, &ga, a.seed, d)?,
        (Solver::Ga, None) => ga_mtsp(&problem, &ga, a.seed)?,
        (_, Some(_)) => return Err(Error::InvalidInput("--delta-th is only supported by the GA solver".into())),
        (Solver::Exact, None) => brute_force_mtsp(&problem)?,
        (Solver::Nn, None) => nearest_neighbor_route(&problem)?,
    };
    let radius = match a.tspn_radius.as_deref() {
        None => 0.0,
        Some("auto") => coverage_radius(&env, &radio, altitude)?.radius,
        Some(v) => v
            .parse::<f64>()
            .map_err(|e| Error::InvalidInput(format!("--tspn-radius `{v}`: {e}")))?,
    };
    let plan = tspn_adjust(&plan, &problem.chs, radius)?;

    let report = validate_plan(&plan, &clustering, &env, &radio, radius);
    for f in report.failures() {
        eprintln!("warning: {} check failed: {}", f.name, f.detail);
    }
    match &a.out {
        Some(path) => write_json(path, &plan)?,
        None => println!("{}", to_json(&plan)?),
    }
    if let Some(path) = &a.legs {
        legs_table(&plan).write_csv(path)?;
    }
    eprintln!(
        "total length {} m, std {} m, mission time {} s",
        format_sig6(plan.total_length),
        format_sig6(plan.std_dev),
        format_sig6(plan.mission_time)
    );
    Ok(ExitCode::SUCCESS)
}

fn legs_table(plan: &RoutePlan) -> Table {
    let mut t = Table::new(&["uav", "leg", "x0", "y0", "z0", "x1", "y1", "z1", "length_m"]);
    for (u, w) in plan.waypoints.iter().enumerate() {
        for (leg, pair) in w.windows(2).enumerate() {
            let (p, q) = (pair[0], pair[1]);
            t.push(vec![
                u.into(),
                leg.into(),
                p.x.into(),
                p.y.into(),
                p.z.into(),
                q.x.into(),
                q.y.into(),
                q.z.into(),
                skyharvest::geometry::distance(&p, &q).into(),
            ]);
        }
    }
    t
}

fn channel_cmd(a: ChannelArgs) -> Result<ExitCode> {
    let (env, radio) = load_env(&a.env)?;
    let zs = if a.z.is_empty() {
        if !(a.z_step > 0.0 && a.z_min > 0.0 && a.z_max >= a.z_min) {
            return Err(Error::InvalidInput("need 0 < z_min <= z_max and z_step > 0".into()));
        }
        let n = ((a.z_max - a.z_min) / a.z_step + 1e-9).floor() as usize;
        (0..=n).map(|i| a.z_min + i as f64 * a.z_step).collect()
    } else {
        a.z
    };
    let mut t = Table::new(&["z_m", "theta_star_rad", "radius_m"]);
    for z in zs {
        match coverage_radius(&env, &radio, z) {
            Ok(c) => t.push(vec![z.into(), c.theta_star.into(), c.radius.into()]),
            Err(Error::NoCoverage { .. }) => t.push(vec![z.into(), "".into(), "".into()]),
            Err(e) => return Err(e),
        }
    }
    match &a.out {
        Some(path) => t.write_csv(path)?,
        None => print_csv(&t)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment_cmd(a: ExperimentArgs) -> Result<ExitCode> {
    let kind: ExperimentKind = a.name.parse()?;
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    config.name = kind;
    if let Some(seed) = a.seed {
        config.base_seed = seed;
    }
    config.trace |= a.trace;
    let result = run_experiment(&config)?;
    fs::create_dir_all(&a.out).map_err(|source| Error::Io {
        path: a.out.clone(),
        source,
    })?;
    let written = emit_csv(&result, &a.out.join(format!("{kind}.csv")))?;
    for p in &written {
        println!("{}", p.display());
    }
    if result.all_failed() {
        eprintln!("error: every sub-run of `{kind}` failed");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn print_csv(table: &Table) -> Result<()> {
    table.to_writer(io::stdout().lock()).map_err(|source| Error::Csv {
        path: PathBuf::from("<stdout>"),
        source,
    })
}
