//! `nusampler` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::collision::CollisionMode;
use crate::error::PlanError;
use crate::nonuniform_planner::{plan, prepare, NonUniformConfig};
use crate::planner_core::PlanResult;
use crate::report::{partition_dump_json, summarize, write_csv, MetricsRow};
use crate::scene::{load_scene, Scene};
use crate::svg::render_svg;
use crate::uniform_baseline::{plan_uniform, UniformConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_PATH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nusampler", version, about = "Critical-region RRT* vs uniform RRT* benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan on a scene with one or both planners and report metrics.
    Plan(PlanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PlannerChoice {
    Nonuniform,
    Uniform,
    Both,
}

/// Inclusive seed range written `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SeedRange(u64, u64);

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let a: u64 = a.trim().parse().map_err(|e| format!("bad seed {a:?}: {e}"))?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad seed {b:?}: {e}"))?;
        if a > b {
            return Err(format!("empty seed range {s}"));
        }
        Ok(SeedRange(a, b))
    }
}

#[derive(clap::Args, Debug)]
struct PlanArgs {
    /// Scene JSON file.
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum, default_value = "nonuniform")]
    planner: PlannerChoice,
    /// Grid cell size in meters; must divide the workspace side.
    #[arg(long, default_value_t = 2.0)]
    cell_size: f64,
    #[arg(long, conflicts_with = "seeds", default_value_t = 0)]
    seed: u64,
    /// Inclusive seed range, e.g. `1..30`.
    #[arg(long)]
    seeds: Option<SeedRange>,
    /// Uniform planner iteration budget.
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Uniform planner maximum connection distance in meters.
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    #[arg(long, default_value_t = 0.05)]
    goal_bias: f64,
    #[arg(long, default_value_t = 0.5)]
    goal_tol: f64,
    /// Shrinking-ball rewiring radius for the uniform planner.
    #[arg(long)]
    shrinking_ball: bool,
    /// Treat closed obstacle cells (edges and corners) as blocking.
    #[arg(long)]
    conservative_collision: bool,
    /// SVG of the first seed's result.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Metrics CSV; stdout when absent.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Partition and critical regions as JSON.
    #[arg(long)]
    dump_partition: Option<PathBuf>,
    /// Print per-planner summary statistics.
    #[arg(long)]
    summary: bool,
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn run_cli<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Plan(args) => match run_plan(&args) {
            Ok(code) => code,
            Err(message) => {
                eprintln!("error: {message}");
                EXIT_ERROR
            }
        },
    }
}

fn svg_path(base: &FsPath, planner: &str, both: bool) -> PathBuf {
    if !both {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{planner}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{planner}"),
    };
    base.with_file_name(name)
}

fn write_file(path: &FsPath, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run_plan(args: &PlanArgs) -> Result<i32, String> {
    let scene: Scene<f64> = load_scene(&args.scene).map_err(|e| e.to_string())?;
    if !(0.0..1.0).contains(&args.goal_bias) {
        return Err(format!("--goal-bias must lie in [0, 1), got {}", args.goal_bias));
    }
    if !(args.step > 0.0) {
        return Err(format!("--step must be positive, got {}", args.step));
    }
    let (grid, partition, graph) = prepare(&scene, args.cell_size).map_err(|e| e.to_string())?;
    if let Some(path) = &args.dump_partition {
        write_file(path, &partition_dump_json(&partition, &graph))?;
    }

    let collision = if args.conservative_collision { CollisionMode::Closed } else { CollisionMode::Open };
    let seeds: Vec<u64> = match args.seeds {
        Some(SeedRange(a, b)) => (a..=b).collect(),
        None => vec![args.seed],
    };
    let planners: &[&str] = match args.planner {
        PlannerChoice::Nonuniform => &["nonuniform"],
        PlannerChoice::Uniform => &["uniform"],
        PlannerChoice::Both => &["nonuniform", "uniform"],
    };

    let mut rows = Vec::new();
    let mut any_failed = false;
    for &planner in planners {
        let mut first: Option<Result<PlanResult<f64>, PlanError>> = None;
        for &seed in &seeds {
            let outcome = match planner {
                "nonuniform" => plan(&scene, &NonUniformConfig { cell_size: args.cell_size, seed, collision }),
                _ => {
                    let mut config = UniformConfig::new(seed);
                    config.max_iters = args.max_iters;
                    config.step = args.step;
                    config.goal_bias = args.goal_bias;
                    config.goal_tol = args.goal_tol;
                    config.shrinking_ball = args.shrinking_ball;
                    config.collision = collision;
                    plan_uniform(&scene, &grid, &config)
                }
            };
            if let Err(e) = &outcome {
                any_failed = true;
                eprintln!("{planner} seed {seed}: {e}");
            }
            rows.push(MetricsRow::from_outcome(planner, seed, args.cell_size, outcome.as_ref()));
            first.get_or_insert(outcome);
        }
        if let Some(base) = &args.svg {
            let result = first.and_then(Result::ok);
            let svg = if planner == "nonuniform" {
                render_svg(&scene, Some(&partition), Some(&graph), result.as_ref())
            } else {
                render_svg(&scene, None, None, result.as_ref())
            };
            write_file(&svg_path(base, planner, planners.len() > 1), &svg)?;
        }
    }

    match &args.metrics {
        Some(path) => {
            let file = File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            write_csv(BufWriter::new(file), &rows).map_err(|e| e.to_string())?;
        }
        None => write_csv(io::stdout().lock(), &rows).map_err(|e| e.to_string())?,
    }
    if args.summary {
        let summary = summarize(&rows).map_err(|e| e.to_string())?;
        if args.metrics.is_some() {
            print!("{summary}");
        } else {
            eprint!("{summary}");
        }
        let _ = io::stdout().flush();
    }
    Ok(if any_failed { EXIT_NO_PATH } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!("1..30".parse::<SeedRange>(), Ok(SeedRange(1, 30)));
        assert_eq!("4..=4".parse::<SeedRange>(), Ok(SeedRange(4, 4)));
        assert!("5..1".parse::<SeedRange>().is_err());
        assert!("7".parse::<SeedRange>().is_err());
    }

    #[test]
    fn svg_names_for_both_planners() {
        let base = FsPath::new("/tmp/out.svg");
        assert_eq!(svg_path(base, "uniform", false), PathBuf::from("/tmp/out.svg"));
        assert_eq!(svg_path(base, "uniform", true), PathBuf::from("/tmp/out.uniform.svg"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_cli(["nusampler", "plan"]), EXIT_USAGE);
        assert_eq!(
            run_cli(["nusampler", "plan", "--scene", "x.json", "--seed", "1", "--seeds", "1..2"]),
            EXIT_USAGE
        );
    }
}
