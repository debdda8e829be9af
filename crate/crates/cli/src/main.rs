//! `bmo`: run butterfly mating optimization scenarios from the command line.
//!
//! Every failure prints one JSON object on stderr,
//! `{"error": <kind>, "message": <text>, "exit_code": <n>}`, and exits with
//! one of the codes below.
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 2    | usage: unknown flag, missing argument, bad env value |
//! | 3    | config: malformed or invalid scenario config         |
//! | 4    | output: cannot create or write an output file        |
//! | 5    | input: unreadable config, image or other input file  |
//! | 6    | runtime: the simulation itself failed                |

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bmo_core::config::{ScenarioConfig, SCHEMA_FIELDS};
use bmo_core::engine::{Movement, Placement};
use bmo_core::landscape::load_image_field;
use bmo_core::landscape::oracle::grid_local_max_oracle;
use bmo_core::sim::{run_batch, run_experiment, Arena, BatchSummary, RunResult, Scenario};
use bmo_core::trace::write_trace_file;
use bmo_core::{registry, BmoParams, Error};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

const USAGE: u8 = 2;
const CONFIG: u8 = 3;
const OUTPUT: u8 = 4;
const INPUT: u8 = 5;
const RUNTIME: u8 = 6;

#[derive(Parser, Debug)]
#[command(
    name = "bmo",
    version,
    about = "Butterfly mating optimization scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario: writes a trace CSV and a summary JSON.
    Run(RunArgs),
    /// Run one replicate per seed: writes an aggregate summary JSON.
    Batch(RunArgs),
    /// Run BMO on a PGM image and write the final agent coordinates.
    Image(ImageArgs),
    /// Print the grid-oracle peak list of a scenario's landscape.
    Oracle(OracleArgs),
    /// Check a config without running it.
    #[command(after_help = schema_help())]
    Validate(Source),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario config file (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in scenario name (see `list-scenarios`).
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
}

#[derive(Args, Debug)]
struct Common {
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Suppress progress output on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Seed override; for `batch` it replaces the config's seed list.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ImageArgs {
    /// Grayscale PGM (P2 or P5).
    image: PathBuf,
    /// Sharpening exponent applied after normalization.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 20)]
    agents: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Step size in pixels.
    #[arg(long, default_value_t = 2.0)]
    step: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    /// Grid cells per axis (at least 100).
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    /// Iteration at which to evaluate a dynamic landscape.
    #[arg(long, default_value_t = 0)]
    time: usize,
    /// Write `peaks.csv` here instead of printing to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn schema_help() -> String {
    let mut s = String::from("Config fields:\n");
    for (field, what) in SCHEMA_FIELDS {
        s.push_str(&format!("  {field:<16} {what}\n"));
    }
    s
}

#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            kind,
            message: message.into(),
        }
    }

    fn report(&self) {
        let body = serde_json::json!({
            "error": self.kind,
            "message": self.message,
            "exit_code": self.code,
        });
        eprintln!("{body}");
    }
}

/// Wraps a library error with the exit code of the stage it came from.
/// Unreadable files are input errors wherever they occur.
fn at(code: u8) -> impl Fn(Error) -> Failure {
    move |e| {
        let code = match e {
            Error::Io { .. } | Error::Pgm { .. } if code != OUTPUT => INPUT,
            _ => code,
        };
        Failure::new(code, e.kind(), e.to_string())
    }
}

fn output_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::new(OUTPUT, "io", format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

fn load(source: &Source) -> Result<(ScenarioConfig, PathBuf), Failure> {
    match (&source.config, &source.scenario) {
        (Some(path), _) => ScenarioConfig::load(path).map_err(at(CONFIG)),
        (None, Some(name)) => Ok((
            registry::load(name).map_err(at(CONFIG))?,
            registry::scenarios_dir(),
        )),
        (None, None) => Err(Failure::new(
            USAGE,
            "usage",
            "pass --config PATH or --scenario NAME",
        )),
    }
}

fn prepare_out(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(output_err(dir))
}

fn write_json(path: &Path, value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    fs::write(path, text + "\n").map_err(output_err(path))
}

#[derive(Serialize)]
struct RunSummary<'a> {
    config: &'a ScenarioConfig,
    result: &'a RunResult,
}

#[derive(Serialize)]
struct BatchReport<'a> {
    config: &'a ScenarioConfig,
    batch: &'a BatchSummary,
}

fn run(args: &RunArgs) -> Outcome {
    let (mut config, base) = load(&args.source)?;
    if let Some(seed) = args.seed {
        config.params.rng_seed = seed;
    }
    let scenario = config.resolve(&base).map_err(at(CONFIG))?;
    let result = run_experiment(&scenario).map_err(at(RUNTIME))?;

    let out = &args.common.out;
    prepare_out(out)?;
    let trace = out.join(&config.output.trace);
    write_trace_file(&trace, &result.trace, scenario.landscape.domain().dim())
        .map_err(at(OUTPUT))?;
    let summary = out.join(&config.output.summary);
    write_json(
        &summary,
        &RunSummary {
            config: &config,
            result: &result,
        },
    )?;

    if !args.common.quiet {
        println!(
            "{}: seed {}, {}/{} peaks captured, all captured at {}",
            config.name,
            config.params.rng_seed,
            result.captured_count(),
            result.captures.len(),
            result
                .all_captured_iteration
                .map_or("never".into(), |t| t.to_string()),
        );
        println!("wrote {} and {}", trace.display(), summary.display());
    }
    Ok(())
}

fn batch(args: &RunArgs) -> Outcome {
    let (mut config, base) = load(&args.source)?;
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    if config.seeds.is_empty() {
        return Err(Failure::new(
            CONFIG,
            "invalid_scenario",
            "config lists no seeds; pass --seed N",
        ));
    }
    let scenario = config.resolve(&base).map_err(at(CONFIG))?;
    let summary = run_batch(&scenario, &config.seeds).map_err(at(RUNTIME))?;

    let out = &args.common.out;
    prepare_out(out)?;
    let path = out.join(&config.output.summary);
    write_json(
        &path,
        &BatchReport {
            config: &config,
            batch: &summary,
        },
    )?;
    if !args.common.quiet {
        println!(
            "{}: {} seeds, success {:.2}, median all-captured iteration {}, mean final peak distance {:.4}",
            config.name,
            config.seeds.len(),
            summary.success_fraction,
            summary.median_all_captured_iteration.map_or("n/a".into(), |m| m.to_string()),
            summary.mean_final_peak_distance,
        );
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn image(args: &ImageArgs) -> Outcome {
    let landscape = load_image_field(&args.image, args.gamma).map_err(at(CONFIG))?;
    let (bx, by) = landscape
        .domain()
        .bounds_2d()
        .expect("image domains are planar");
    let scenario = Scenario {
        name: args.image.display().to_string(),
        params: BmoParams {
            n_agents: args.agents,
            max_iters: args.iters,
            step_size: args.step,
            rng_seed: args.seed,
            movement: Movement::FixedStep,
            ..BmoParams::default()
        },
        placement: Placement::UniformRandom,
        arena: Arena {
            outer_radius: bx[1].max(by[1]) / 2.0 + 1.0,
            capture_radius: 10.0,
        },
        dwell: 3,
        landscape,
    };
    let result = run_experiment(&scenario).map_err(at(RUNTIME))?;

    let out = &args.common.out;
    prepare_out(out)?;
    let path = out.join("agents.csv");
    let mut text = String::from("agent_id,x,y,fitness\n");
    for (id, p) in result.final_positions.iter().enumerate() {
        let f = scenario
            .landscape
            .evaluate(p, args.iters)
            .map_err(at(RUNTIME))?;
        text.push_str(&format!("{id},{:.16e},{:.16e},{:.16e}\n", p.x(), p.y(), f));
    }
    fs::write(&path, text).map_err(output_err(&path))?;
    if !args.common.quiet {
        let n = result.final_positions.len() as f64;
        let cx = result.final_positions.iter().map(|p| p.x()).sum::<f64>() / n;
        let cy = result.final_positions.iter().map(|p| p.y()).sum::<f64>() / n;
        println!(
            "agents centered at column {cx:.1}, row {cy:.1}; wrote {}",
            path.display()
        );
    }
    Ok(())
}

fn oracle(args: &OracleArgs) -> Outcome {
    let (config, base) = load(&args.source)?;
    let scenario = config.resolve(&base).map_err(at(CONFIG))?;
    let land = &scenario.landscape;
    let peaks = grid_local_max_oracle(land, args.resolution, args.time).map_err(at(CONFIG))?;
    let mut text = String::from("rank,x,y,fitness\n");
    for (rank, p) in peaks.iter().enumerate() {
        let f = land.evaluate(p, args.time).map_err(at(RUNTIME))?;
        text.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            rank + 1,
            p.x(),
            p.y(),
            f
        ));
    }
    match &args.out {
        Some(dir) => {
            prepare_out(dir)?;
            let path = dir.join("peaks.csv");
            fs::write(&path, text).map_err(output_err(&path))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(OUTPUT, "io", format!("stdout: {e}"))),
    }
}

fn validate(source: &Source) -> Outcome {
    let (config, base) = load(source)?;
    config.validate(&base).map_err(at(CONFIG))?;
    println!("{}", config.to_json());
    Ok(())
}

fn list_scenarios() -> Outcome {
    for (name, description) in registry::list() {
        println!("{name:<20} {description}");
    }
    Ok(())
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Run(a) => run(a),
        Command::Batch(a) => batch(a),
        Command::Image(a) => image(a),
        Command::Oracle(a) => oracle(a),
        Command::Validate(s) => validate(s),
        Command::ListScenarios => list_scenarios(),
    }
}

/// Runs `command` on a pool capped at `BMO_MAX_THREADS` threads when set.
#[cfg(feature = "parallel")]
fn with_thread_cap(command: &Command) -> Outcome {
    match max_threads()? {
        None => dispatch(command),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::new(RUNTIME, "thread_pool", e.to_string()))?
            .install(|| dispatch(command)),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_thread_cap(command: &Command) -> Outcome {
    max_threads()?;
    dispatch(command)
}

fn max_threads() -> Result<Option<usize>, Failure> {
    match std::env::var("BMO_MAX_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::new(
                USAGE,
                "usage",
                format!("BMO_MAX_THREADS must be a positive integer, got {v:?}"),
            )),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            Failure::new(USAGE, "usage", message.trim_end()).report();
            return ExitCode::from(USAGE);
        }
    };
    match with_thread_cap(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code)
        }
    }
}
