//! `hsnake`: batch front-end for the decompositions and planners.
//!
//! Exit codes: 0 when every verification check passes, 2 for invalid input,
//! 3 for numerical failures (including failed checks), 4 for I/O errors.

mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hsnake_core::lorentz::FACTOR_TOL;
use hsnake_core::planner::DEFAULT_STEP;

use report::RunReport;
use run::{Failure, GenerateArgs, GenerateKind, Options, Outcome, Preset, ProbeArgs};

#[derive(Parser, Debug)]
#[command(
    name = "hsnake",
    version,
    about = "Lorentz decompositions and horizontal snake planners"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Numerical tolerance for membership, factorization and reconstruction checks.
    #[arg(long, global = true, default_value_t = FACTOR_TOL)]
    tol: f64,
    /// Sampling step of planned paths and integration step of lifts.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Directory for the report and trajectory files; the report goes to stdout otherwise.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for independent scenarios (several --matrix inputs).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Include wall-clock timing in reports (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Boost and KAK decompositions of a Lorentz matrix.
    Decompose {
        #[arg(long, required = true)]
        matrix: Vec<PathBuf>,
    },
    /// Product-of-exponentials factorization of an SO0 matrix.
    Factorize {
        #[arg(long, required = true)]
        matrix: Vec<PathBuf>,
    },
    /// Horizontal group path from the identity to an SO0 matrix.
    PlanGroup {
        #[arg(long, required = true)]
        matrix: Vec<PathBuf>,
    },
    /// Horizontal configuration path from a config to its image under a matrix.
    Steer {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Minimal-energy lift of a sampled head curve.
    LiftHead {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        head: PathBuf,
    },
    /// Convergence of commutator cycles of boosts to a rotation.
    ProbeBracket {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Zero-based first index.
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Zero-based second index.
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32, 64])]
        cycles: Vec<usize>,
    },
    /// Seeded random payloads.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Configuration preset; `straight` yields the singular all-aligned snake.
        #[arg(long, value_enum, default_value_t = Preset::Random)]
        preset: Preset,
        #[arg(long, default_value_t = 3)]
        segments: usize,
        /// Sample count of generated head curves.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Head circle radius relative to the snake length.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
    },
}

fn timed(timing: bool, f: impl FnOnce() -> Outcome<RunReport>) -> Outcome<RunReport> {
    let start = Instant::now();
    let mut report = f()?;
    if timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Runs `f` on every input with up to `jobs` threads; results keep input order.
fn fan_out<F>(inputs: &[PathBuf], jobs: usize, out: Option<&Path>, f: F) -> Vec<Outcome<RunReport>>
where
    F: Fn(&Path, Option<&Path>) -> Outcome<RunReport> + Sync,
{
    let dirs: Vec<Option<PathBuf>> = inputs
        .iter()
        .enumerate()
        .map(|(k, _)| match (out, inputs.len()) {
            (None, _) => None,
            (Some(d), 1) => Some(d.to_path_buf()),
            (Some(d), _) => Some(d.join(k.to_string())),
        })
        .collect();
    let slots: Vec<Mutex<Option<Outcome<RunReport>>>> = inputs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, inputs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= inputs.len() {
                    break;
                }
                let result = f(&inputs[k], dirs[k].as_deref());
                *slots[k].lock().expect("slot lock") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| {
            s.into_inner()
                .expect("slot lock")
                .expect("every input is processed")
        })
        .collect()
}

fn emit(reports: &[RunReport], single: bool, out: Option<&Path>) -> Outcome<()> {
    let text = if single {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    }
    .map_err(|e| Failure::Io(e.to_string()))?;
    match out {
        Some(dir) => {
            run::write_output(dir, "report.json", format!("{text}\n").as_bytes())?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Outcome<bool> {
    let c = &cli.common;
    if !(c.tol > 0.0) {
        return Err(Failure::Validation(format!(
            "--tol must be positive, got {}",
            c.tol
        )));
    }
    let out = c.out_dir.as_deref();
    let timing = c.timing;
    let step = c.step.unwrap_or(match cli.command {
        Command::LiftHead { .. } => 1e-3,
        _ => DEFAULT_STEP,
    });
    if !(step > 0.0) {
        return Err(Failure::Validation(format!(
            "--step must be positive, got {step}"
        )));
    }
    let opts = Options { tol: c.tol, step };
    let results: Vec<Outcome<RunReport>> = match &cli.command {
        Command::Decompose { matrix } => fan_out(matrix, c.jobs, out, |m, o| {
            timed(timing, || run::decompose(m, opts, o))
        }),
        Command::Factorize { matrix } => fan_out(matrix, c.jobs, out, |m, o| {
            timed(timing, || run::factorize(m, opts, o))
        }),
        Command::PlanGroup { matrix } => fan_out(matrix, c.jobs, out, |m, o| {
            timed(timing, || run::plan_group(m, opts, o))
        }),
        Command::Steer { matrix, config } => {
            vec![timed(timing, || run::steer(matrix, config, opts, out))]
        }
        Command::LiftHead { config, head } => {
            vec![timed(timing, || run::lift_head(config, head, opts, out))]
        }
        Command::ProbeBracket { dim, i, j, t, cycles } => {
            let args = ProbeArgs {
                dim: *dim,
                i: *i,
                j: *j,
                t: *t,
                cycles: cycles.clone(),
            };
            vec![timed(timing, || run::probe_bracket(&args, opts, out))]
        }
        Command::Generate {
            kind,
            seed,
            dim,
            preset,
            segments,
            samples,
            radius,
        } => {
            let text = run::generate(&GenerateArgs {
                kind: *kind,
                seed: *seed,
                dim: *dim,
                preset: *preset,
                segments: *segments,
                samples: *samples,
                radius: *radius,
            })?;
            match out {
                Some(dir) => {
                    let name = format!("{}.json", kind_name(*kind));
                    run::write_output(dir, &name, format!("{text}\n").as_bytes())?;
                }
                None => println!("{text}"),
            }
            return Ok(true);
        }
    };
    let single = results.len() == 1;
    let mut reports = Vec::with_capacity(results.len());
    let mut first_failure = None;
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                eprintln!("hsnake: {e}");
                first_failure.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_failure {
        if !reports.is_empty() {
            emit(&reports, false, out)?;
        }
        return Err(e);
    }
    emit(&reports, single, out)?;
    Ok(reports.iter().all(|r| r.verification.pass))
}

fn kind_name(kind: GenerateKind) -> &'static str {
    match kind {
        GenerateKind::RandomSo0 => "random-so0",
        GenerateKind::RandomConfig => "random-config",
        GenerateKind::CircleHeadCurve => "circle-head-curve",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hsnake: verification failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("hsnake: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
