//! Scenario runners. Each loads and validates its payloads, dispatches to the
//! core crate and returns a report with one check per verified invariant.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hsnake_core::io::{
    self, HeadPayload, LieElementPayload, MatrixPayload, PlanPayload, RotationBlocksPayload,
    SnakeConfigPayload,
};
use hsnake_core::linalg::{self, Mat, Vector};
use hsnake_core::lorentz::{self, LieElement, LorentzMatrix, Membership};
use hsnake_core::planner::{self, ConfigPath, LiftOptions, SampledHead, SteerOptions};
use hsnake_core::{random, snake, Error};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::report::{RunReport, Scenario, Verification};

/// Endpoint residual allowed for planned group paths.
pub const ENDPOINT_TOL: f64 = 1e-7;
/// Largest `𝔰`-norm of a sampled control.
pub const HORIZONTAL_TOL: f64 = 1e-6;
/// Gap between the sampled length and the ledger.
pub const LEDGER_TOL: f64 = 1e-6;
/// Node-wise angular distance between the steered and the target config.
pub const STEER_TOL: f64 = 1e-7;
/// `fit_horizontal` residual of configuration velocities.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Head tracking error of lifted paths.
pub const TRACK_TOL: f64 = 1e-4;
/// Allowed deviation of the probe convergence slope from −1.
pub const PROBE_SLOPE_TOL: f64 = 0.2;
/// Arc-length samples per snake polyline in CSV exports.
const POLYLINE_SAMPLES: usize = 32;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Reconstruction { .. }
            | Error::RootSolver { .. }
            | Error::SingularityApproach { .. }
            | Error::TimeReversal(_)
            | Error::NotBoost(_)
            | Error::NotRotation(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub tol: f64,
    pub step: f64,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

pub fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> Outcome<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: serde::Serialize>(value: &T) -> Outcome<String> {
    io::to_json(value).map_err(Failure::from)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Outcome<()>) -> Outcome<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn load_lorentz(path: &Path, tol: f64) -> Outcome<LorentzMatrix> {
    let payload: MatrixPayload = read_json(path)?;
    Ok(payload.to_lorentz(tol)?)
}

fn scenario(kind: &str, inputs: Value, opts: Options) -> Scenario {
    Scenario {
        kind: kind.to_string(),
        inputs,
        options: json!({ "tol": opts.tol, "step": opts.step }),
    }
}

fn report(scenario: Scenario, outputs: Vec<PathBuf>, verification: Verification, result: Value) -> RunReport {
    RunReport {
        scenario,
        outputs,
        verification,
        result,
        timing_ms: None,
    }
}

pub fn decompose(matrix: &Path, opts: Options, _out: Option<&Path>) -> Outcome<RunReport> {
    let a = load_lorentz(matrix, opts.tol)?;
    let membership = a.classify(opts.tol);
    let d = lorentz::boost_decompose(&a, opts.tol)?;
    let mut v = Verification::new();
    v.at_most("lorentz_residual", a.residual(), opts.tol);
    v.at_most("boost_reconstruction", d.residual, opts.tol);
    v.at_most(
        "rotation_orthogonality",
        linalg::orthogonality_residual(&d.q),
        opts.tol,
    );
    let kak = if membership >= Membership::So {
        let k = lorentz::kak_decompose(&a, opts.tol)?;
        v.at_most("kak_reconstruction", k.residual, opts.tol);
        json!({
            "q_left": rows(&k.q_left),
            "alpha": k.alpha,
            "q_right": rows(&k.q_right),
            "residual": k.residual,
        })
    } else {
        Value::Null
    };
    let result = json!({
        "membership": membership,
        "epsilon": d.epsilon,
        "q": rows(&d.q),
        "t": MatrixPayload::from_matrix(d.t.matrix()),
        "boost": { "velocity": vec(&d.boost.v), "c": d.boost.c, "alpha": d.boost.alpha },
        "residual": d.residual,
        "kak": kak,
    });
    Ok(report(
        scenario("decompose", json!({ "matrix": matrix }), opts),
        Vec::new(),
        v,
        result,
    ))
}

pub fn factorize(matrix: &Path, opts: Options, _out: Option<&Path>) -> Outcome<RunReport> {
    let a = load_lorentz(matrix, opts.tol)?;
    let f = lorentz::factorize(&a, opts.tol)?;
    let mut v = Verification::new();
    v.at_most("reconstruction", f.residual, opts.tol);
    v.at_most("block_cubic", f.blocks.cubic_residual(), opts.tol);
    v.at_most("block_commutation", f.blocks.commutation_residual(), opts.tol);
    v.at_most(
        "block_orthonormality",
        f.blocks.orthonormality_residual(),
        opts.tol,
    );
    let generator = f.generator();
    let result = json!({
        "blocks": RotationBlocksPayload::from_blocks(&f.blocks),
        "u": vec(&f.u),
        "generator": LieElementPayload::from_element(&generator),
        "block_l1_norm": lorentz::block_l1_norm(&generator)?,
        "residual": f.residual,
    });
    Ok(report(
        scenario("factorize", json!({ "matrix": matrix }), opts),
        Vec::new(),
        v,
        result,
    ))
}

pub fn plan_group(matrix: &Path, opts: Options, out: Option<&Path>) -> Outcome<RunReport> {
    let a = load_lorentz(matrix, opts.tol)?;
    let path = planner::plan_group_path(&a, opts.tol)?.with_step(opts.step)?;
    let endpoint = (path.endpoint().matrix() - a.matrix()).norm();
    let check = path.check();
    let mut v = Verification::new();
    v.at_most("endpoint_residual", endpoint, ENDPOINT_TOL);
    v.at_most("max_vertical_control", check.max_vertical, HORIZONTAL_TOL);
    v.at_most("ledger_gap", check.ledger_gap, LEDGER_TOL);
    let plan = PlanPayload::from_group_path(&path);
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        outputs.push(write_output(dir, "plan.json", to_json(&plan)?.as_bytes())?);
        let times = path.times();
        let controls: Vec<Vector> = times.iter().map(|t| path.control(*t).u).collect();
        let csv = csv_bytes(|b| {
            io::trajectory_csv(b, "u", &times, &controls).map_err(|e| Failure::Io(e.to_string()))
        })?;
        outputs.push(write_output(dir, "controls.csv", &csv)?);
    }
    let result = json!({
        "legs": path.legs().len(),
        "duration": path.duration(),
        "ledger": path.ledger(),
        "check": check,
        "endpoint_residual": endpoint,
    });
    Ok(report(
        scenario("plan-group", json!({ "matrix": matrix }), opts),
        outputs,
        v,
        result,
    ))
}

fn config_outputs(path: &ConfigPath, out: Option<&Path>) -> Outcome<Vec<PathBuf>> {
    let Some(dir) = out else {
        return Ok(Vec::new());
    };
    let mut outputs = Vec::new();
    let plan = PlanPayload::from_config_path(path);
    outputs.push(write_output(dir, "plan.json", to_json(&plan)?.as_bytes())?);
    let final_config = SnakeConfigPayload::from_config(path.final_config());
    outputs.push(write_output(
        dir,
        "final_config.json",
        to_json(&final_config)?.as_bytes(),
    )?);
    let head = csv_bytes(|b| {
        io::trajectory_csv(b, "x", &path.times, &path.head_trace).map_err(|e| Failure::Io(e.to_string()))
    })?;
    outputs.push(write_output(dir, "head_trace.csv", &head)?);
    let snakes = csv_bytes(|b| Ok(io::config_path_csv(b, path, POLYLINE_SAMPLES)?))?;
    outputs.push(write_output(dir, "snakes.csv", &snakes)?);
    Ok(outputs)
}

fn path_summary(path: &ConfigPath) -> Value {
    json!({
        "samples": path.times.len(),
        "duration": path.times.last().copied().unwrap_or(0.0),
        "length": PlanPayload::from_config_path(path).length,
        "max_residual": path.max_residual(),
        "max_tracking_error": path.max_tracking_error(),
        "final_head": vec(&snake::endpoint(path.final_config())),
    })
}

pub fn steer(matrix: &Path, config: &Path, opts: Options, out: Option<&Path>) -> Outcome<RunReport> {
    let a = load_lorentz(matrix, opts.tol)?;
    let u0 = read_json::<SnakeConfigPayload>(config)?.to_config()?;
    let path = planner::steer_config(
        &u0,
        &a,
        SteerOptions {
            tol: opts.tol,
            step: opts.step,
        },
    )?;
    let target = planner::act(&a, &u0)?;
    let distance = path.final_config().distance(&target)?;
    let mut v = Verification::new();
    v.at_most("final_config_distance", distance, STEER_TOL);
    v.at_most("max_horizontal_residual", path.max_residual(), RESIDUAL_TOL);
    let outputs = config_outputs(&path, out)?;
    Ok(report(
        scenario("steer", json!({ "matrix": matrix, "config": config }), opts),
        outputs,
        v,
        path_summary(&path),
    ))
}

pub fn lift_head(config: &Path, head: &Path, opts: Options, out: Option<&Path>) -> Outcome<RunReport> {
    let u0 = read_json::<SnakeConfigPayload>(config)?.to_config()?;
    let curve = read_json::<HeadPayload>(head)?.to_head()?;
    let lift = LiftOptions {
        step: opts.step,
        ..LiftOptions::default()
    };
    let path = planner::horizontal_lift(&u0, &curve, lift)?;
    let mut v = Verification::new();
    v.at_most("max_tracking_error", path.max_tracking_error(), TRACK_TOL);
    v.at_most("max_horizontal_residual", path.max_residual(), RESIDUAL_TOL);
    let outputs = config_outputs(&path, out)?;
    Ok(report(
        scenario("lift-head", json!({ "config": config, "head": head }), opts),
        outputs,
        v,
        path_summary(&path),
    ))
}

pub struct ProbeArgs {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
    pub t: f64,
    pub cycles: Vec<usize>,
}

pub fn probe_bracket(args: &ProbeArgs, opts: Options, out: Option<&Path>) -> Outcome<RunReport> {
    if args.cycles.is_empty() {
        return Err(Failure::Validation("at least one cycle count is required".into()));
    }
    if args.i >= args.dim || args.j >= args.dim {
        return Err(Error::IndexOutOfRange {
            index: args.i.max(args.j),
            dim: args.dim,
        }
        .into());
    }
    if args.i == args.j {
        return Err(Failure::Validation("probe indices must differ".into()));
    }
    let target = LieElement::rotation_generator(args.i, args.j, args.dim)
        .scale(args.t)
        .exp();
    let mut errors = Vec::with_capacity(args.cycles.len());
    for m in &args.cycles {
        let path = planner::commutator_probe(args.i, args.j, args.t, *m, args.dim)?;
        errors.push((path.endpoint().matrix() - target.matrix()).norm());
    }
    let mut v = Verification::new();
    let slope = if args.cycles.len() >= 2 && errors.iter().all(|e| *e > 0.0) {
        let xs: Vec<f64> = args.cycles.iter().map(|m| (*m as f64).ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let k = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = cov / var;
        v.at_most("slope_deviation", (slope + 1.0).abs(), PROBE_SLOPE_TOL);
        Some(slope)
    } else {
        None
    };
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        let header = vec!["m".to_string(), "error".to_string()];
        let table: Vec<Vec<f64>> = args
            .cycles
            .iter()
            .zip(&errors)
            .map(|(m, e)| vec![*m as f64, *e])
            .collect();
        let csv = csv_bytes(|b| io::write_csv(b, &header, &table).map_err(|e| Failure::Io(e.to_string())))?;
        outputs.push(write_output(dir, "probe.csv", &csv)?);
    }
    let result = json!({
        "target": MatrixPayload::from_matrix(target.matrix()),
        "cycles": args.cycles,
        "errors": errors,
        "slope": slope,
    });
    Ok(report(
        scenario(
            "probe-bracket",
            json!({ "dim": args.dim, "i": args.i, "j": args.j, "t": args.t }),
            opts,
        ),
        outputs,
        v,
        result,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenerateKind {
    RandomSo0,
    RandomConfig,
    CircleHeadCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Random,
    Straight,
}

pub struct GenerateArgs {
    pub kind: GenerateKind,
    pub seed: u64,
    pub dim: usize,
    pub preset: Preset,
    pub segments: usize,
    pub samples: usize,
    pub radius: f64,
}

/// Rapidity bound of generated group elements.
const GENERATE_RAPIDITY: f64 = 2.0;

pub fn generate(args: &GenerateArgs) -> Outcome<String> {
    if args.dim < 2 {
        return Err(Failure::Validation(format!(
            "dimension must be at least 2, got {}",
            args.dim
        )));
    }
    let mut rng = random::rng(args.seed);
    let config = |rng: &mut random::TestRng| -> Outcome<_> {
        Ok(match args.preset {
            Preset::Random => random::random_config(rng, args.dim, args.segments)?,
            Preset::Straight => {
                let partition = (0..=args.segments.max(1)).map(|k| k as f64).collect();
                random::straight_config(args.dim, partition)?
            }
        })
    };
    match args.kind {
        GenerateKind::RandomSo0 => {
            let a = random::random_so0(&mut rng, args.dim, GENERATE_RAPIDITY);
            to_json(&MatrixPayload::from_matrix(a.matrix()))
        }
        GenerateKind::RandomConfig => to_json(&SnakeConfigPayload::from_config(&config(&mut rng)?)),
        GenerateKind::CircleHeadCurve => {
            let u = config(&mut rng)?;
            let circle = random::random_circle_head(&mut rng, &u, args.radius, 1.0);
            let head = SampledHead::from_curve(&circle, args.samples)?;
            to_json(&HeadPayload::from_head(&head))
        }
    }
}
