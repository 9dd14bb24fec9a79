//! Command-line front end: analytic feasibility checks, single-scenario
//! simulation, parameter sweeps, transition planning, and timeline
//! rendering.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use timeshare_core::model::{ExecMode, VideoFormat};
use timeshare_core::perf::min_downsample;
use timeshare_core::render::{render_timeline, RenderStyle};
use timeshare_core::scenario::{fixture, load_scenario, random_scenario, RandomSpec, Scenario};
use timeshare_core::sweep::{analyze_scenario, run_sweep, simulate_scenario, SweepSpec};

const EXIT_LOAD: u8 = 2;
const EXIT_EXEC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "timeshare",
    version,
    about = "Round-robin time-sharing planner and simulator for streaming vision pipelines on a partially reconfigurable fabric"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic round-robin feasibility for one scenario
    Check(CheckArgs),
    /// Run the discrete-event simulation of one scenario
    Simulate(SimulateArgs),
    /// Evaluate a grid of (pipelines, reconfigured partitions, g, s, resolution) cells
    Sweep(SweepArgs),
    /// Show the stage-to-partition transition plans for one round
    Plan(PlanArgs),
    /// Render a simulated timeline as a text Gantt chart or structured records
    Render(RenderArgs),
}

#[derive(Args)]
struct ScenarioSource {
    /// Scenario file path, or a bundled name (fig3, fig4, fig8a, fig8b, fig9a, fig9b)
    #[arg(long)]
    scenario: Option<String>,
    /// Generate a random scenario from this seed instead of loading one
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's bundle factor g
    #[arg(long)]
    g: Option<u32>,
    /// Override the scenario's downsample divisor s
    #[arg(long)]
    s: Option<u32>,
    /// Override the scenario's execution mode
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Basic,
    Staggered,
}

impl From<Mode> for ExecMode {
    fn from(mode: Mode) -> ExecMode {
        match mode {
            Mode::Basic => ExecMode::Basic,
            Mode::Staggered => ExecMode::Staggered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Ndjson,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: ScenarioSource,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Processing rounds to simulate
    #[arg(long, default_value_t = 8)]
    rounds: u32,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    /// Pipeline counts to sweep
    #[arg(long = "pipelines", value_delimiter = ',', default_value = "2")]
    pipeline_counts: Vec<u32>,
    /// Reconfigured partitions per switch to sweep
    #[arg(long = "rps", value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    reconfig_counts: Vec<u32>,
    /// Bundle factors to sweep
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    g: Vec<u32>,
    /// Downsample divisors to sweep
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    s: Vec<u32>,
    /// Resolutions to sweep (720p and/or 1080p)
    #[arg(long = "res", value_delimiter = ',', default_value = "720p")]
    resolutions: Vec<String>,
    #[arg(long, value_enum, default_value = "basic")]
    mode: Mode,
    #[arg(long, default_value_t = 6)]
    rounds: u32,
    /// Concurrent sweep workers
    #[arg(long, default_value_t = 0, help = "Concurrent workers (0 = one per CPU)")]
    jobs: usize,
    /// Cap on the number of grid cells
    #[arg(long, default_value_t = 4096)]
    cap: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    source: ScenarioSource,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    source: ScenarioSource,
    #[arg(long, default_value_t = 8)]
    rounds: u32,
    /// Rendering style
    #[arg(long, value_enum, default_value = "text-gantt")]
    style: Style,
    /// Gantt width in columns
    #[arg(long, default_value_t = 120)]
    width: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    TextGantt,
    Structured,
}

#[derive(Debug)]
enum CliError {
    Load(String),
    Exec(String),
}

fn resolve_scenario(source: &ScenarioSource) -> Result<Scenario, CliError> {
    let mut scenario = match (&source.scenario, source.seed) {
        (Some(_), Some(_)) => {
            return Err(CliError::Load(
                "--scenario and --seed are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Load(
                "one of --scenario or --seed is required".into(),
            ))
        }
        (Some(name), None) => match fixture(name) {
            Some(s) => s,
            None => load_scenario(&PathBuf::from(name))
                .map_err(|e| CliError::Load(e.to_string()))?,
        },
        (None, Some(seed)) => {
            let spec = RandomSpec {
                mode: source.mode.map(Into::into).unwrap_or(ExecMode::Staggered),
                ..RandomSpec::default()
            };
            random_scenario(seed, &spec)
        }
    };
    if let Some(g) = source.g {
        scenario.schedule.g = g;
    }
    if let Some(s) = source.s {
        scenario.schedule.s = s;
    }
    if let Some(mode) = source.mode {
        scenario.mode = mode.into();
    }
    scenario
        .validate()
        .map_err(|e| CliError::Load(e.to_string()))?;
    Ok(scenario)
}

fn parse_resolution(label: &str) -> Result<VideoFormat, CliError> {
    match label {
        "720p" | "720p60" => Ok(VideoFormat::p720_60()),
        "1080p" | "1080p60" => Ok(VideoFormat::p1080_60()),
        other => Err(CliError::Load(format!(
            "unknown resolution {other}; expected 720p or 1080p"
        ))),
    }
}

fn run_check(args: &CheckArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.source)?;
    let (report, plans) = analyze_scenario(&scenario).map_err(CliError::Exec)?;
    match args.format {
        OutputFormat::Ndjson => {
            println!(
                "{}",
                timeshare_core::to_json(&report).map_err(CliError::Exec)?
            );
        }
        _ => {
            println!(
                "round quantum {} (g={}, s={})",
                report.round_quantum, report.params.g, report.params.s
            );
            println!(
                "{:<16} {:>12} {:>12} {:>12} {:>12}",
                "pipeline", "t_config", "t_fill", "t_frame", "slice(g)"
            );
            for slice in &report.slices {
                println!(
                    "{:<16} {:>12} {:>12} {:>12} {:>12}",
                    slice.pipeline,
                    format!("{}", slice.t_config),
                    format!("{}", slice.t_fill),
                    format!("{}", slice.t_frame),
                    format!(
                        "{}",
                        timeshare_core::perf::slice_amortized(slice, report.params.g)
                    )
                );
            }
            println!(
                "switch costs {}, total {}, slack {}",
                report.switch_total, report.total, report.slack
            );
            if report.feasible {
                println!(
                    "FEASIBLE: each pipeline sustains {:.2} fps",
                    report.effective_fps
                );
            } else {
                println!("INFEASIBLE at s={}", report.params.s);
                let modules = scenario.module_map();
                let pipelines = scenario.pipeline_refs();
                let sets = timeshare_core::sweep::steady_reconfig_sets(&scenario, &plans);
                let inputs: Vec<timeshare_core::perf::FeasibilityInput<'_>> = pipelines
                    .iter()
                    .zip(sets)
                    .map(|(pipeline, reconfigured)| timeshare_core::perf::FeasibilityInput {
                        pipeline,
                        reconfigured,
                    })
                    .collect();
                if let Ok(s) = min_downsample(
                    &inputs,
                    &modules,
                    &scenario.format,
                    &scenario.platform,
                    report.params.g,
                ) {
                    println!(
                        "smallest feasible downsample at g={}: s={} ({:.2} fps)",
                        report.params.g,
                        s,
                        scenario.format.fps / s as f64
                    );
                }
            }
        }
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.source)?;
    let (report, plans) = analyze_scenario(&scenario).map_err(CliError::Exec)?;
    let timeline =
        simulate_scenario(&scenario, plans, args.rounds).map_err(CliError::Exec)?;
    match args.format {
        OutputFormat::Ndjson => print!("{}", timeline.to_ndjson()),
        OutputFormat::Csv => {
            println!("pipeline,frames_processed,on_time_frames,achieved_fps,mean_latency_ms");
            for (id, stats) in &timeline.per_pipeline {
                println!(
                    "{},{},{},{:.4},{:.4}",
                    id,
                    stats.frames_processed,
                    stats.on_time_frames,
                    stats.achieved_fps,
                    stats.mean_latency.as_millis()
                );
            }
        }
        OutputFormat::Table => {
            println!(
                "simulated {} rounds of {} ({} mode, g={}, s={})",
                timeline.rounds,
                timeline.round_quantum,
                match scenario.mode {
                    ExecMode::Basic => "basic",
                    ExecMode::Staggered => "staggered",
                },
                scenario.schedule.g,
                scenario.schedule.s
            );
            println!(
                "analytic verdict: {}",
                if report.feasible { "feasible" } else { "infeasible" }
            );
            for (id, stats) in &timeline.per_pipeline {
                println!(
                    "  {id}: {:.2} fps ({} frames, {} on time), mean latency {}",
                    stats.achieved_fps,
                    stats.frames_processed,
                    stats.on_time_frames,
                    stats.mean_latency
                );
            }
            println!(
                "  glitches: {}, peak DRAM streams: {}, peak DRAM bandwidth: {}",
                timeline.glitches.len(),
                timeline.peak_dram_streams,
                timeline.peak_dram_bandwidth
            );
            for glitch in &timeline.glitches {
                println!(
                    "  round {} overran its deadline by {}",
                    glitch.round, glitch.overrun
                );
            }
            if !timeline.buffer_high_water.is_empty() {
                println!("  decoupling FIFO high-water marks:");
                for (key, bytes) in &timeline.buffer_high_water {
                    println!("    {key}: {bytes}");
                }
            }
        }
    }
    Ok(())
}

fn run_sweep_cmd(args: &SweepArgs) -> Result<(), CliError> {
    let resolutions = args
        .resolutions
        .iter()
        .map(|r| parse_resolution(r))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        pipeline_counts: args.pipeline_counts.clone(),
        reconfig_counts: args.reconfig_counts.clone(),
        g_values: args.g.clone(),
        s_values: args.s.clone(),
        resolutions,
        mode: args.mode.into(),
        rounds: args.rounds,
        cap: args.cap,
    };
    let jobs = if args.jobs == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        args.jobs
    };
    let result = run_sweep(&spec, jobs).map_err(|e| CliError::Exec(e.to_string()))?;
    match args.format {
        OutputFormat::Table => print!("{}", result.to_table()),
        OutputFormat::Csv => print!("{}", result.to_csv()),
        OutputFormat::Ndjson => print!("{}", result.to_ndjson()),
    }
    let mismatches = result.disagreements();
    if !mismatches.is_empty() {
        eprintln!(
            "DEFECT: analytic and simulated verdicts disagree in {} cell(s)",
            mismatches.len()
        );
        for row in mismatches {
            eprintln!(
                "  res={} pipelines={} rps={} g={} s={}: feasible={} glitches={}",
                row.resolution, row.pipelines, row.reconfigs, row.g, row.s, row.feasible,
                row.glitches
            );
        }
        return Err(CliError::Exec("sweep verdict mismatch".into()));
    }
    Ok(())
}

fn run_plan(args: &PlanArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.source)?;
    let (_, plans) = analyze_scenario(&scenario).map_err(CliError::Exec)?;
    match args.format {
        OutputFormat::Ndjson => {
            for plan in &plans {
                println!(
                    "{}",
                    timeshare_core::to_json(plan).map_err(CliError::Exec)?
                );
            }
        }
        _ => {
            let n = scenario.pipelines.len();
            for (i, plan) in plans.iter().enumerate() {
                let label = if i < n {
                    format!("round 1, slot {i}")
                } else {
                    "steady-state wrap-around".to_string()
                };
                println!("transition into {} ({label}):", plan.pipeline);
                if plan.reconfigure.is_empty() {
                    println!("  no reconfiguration; crossbar reroute only");
                } else {
                    for (rp, module) in &plan.reconfigure {
                        println!("  reconfigure {rp} <- {module}");
                    }
                }
                let mut assignment: Vec<_> = plan.assignment.iter().collect();
                assignment.sort();
                let pairs: Vec<String> = assignment
                    .iter()
                    .map(|(stage, rp)| format!("{stage}->{rp}"))
                    .collect();
                println!("  assignment: {}", pairs.join(", "));
                println!(
                    "  {} routes, reconfiguration {}, route setup {}",
                    plan.routes.len(),
                    plan.reconfig_time_total,
                    plan.route_config_time
                );
            }
        }
    }
    Ok(())
}

fn run_render(args: &RenderArgs) -> Result<(), CliError> {
    let scenario = resolve_scenario(&args.source)?;
    let (_, plans) = analyze_scenario(&scenario).map_err(CliError::Exec)?;
    let timeline =
        simulate_scenario(&scenario, plans, args.rounds).map_err(CliError::Exec)?;
    let style = match args.style {
        Style::TextGantt => RenderStyle::TextGantt,
        Style::Structured => RenderStyle::Structured,
    };
    print!("{}", render_timeline(&timeline, style, args.width));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => run_check(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Plan(args) => run_plan(args),
        Command::Render(args) => run_render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Load(message)) => {
            eprintln!("load error: {message}");
            ExitCode::from(EXIT_LOAD)
        }
        Err(CliError::Exec(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_EXEC)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use timeshare_core::scenario::FIXTURE_NAMES;

    #[test]
    fn fixture_names_resolve() {
        for name in FIXTURE_NAMES {
            let source = ScenarioSource {
                scenario: Some(name.to_string()),
                seed: None,
                g: None,
                s: None,
                mode: None,
            };
            resolve_scenario(&source).unwrap();
        }
    }

    #[test]
    fn scenario_and_seed_conflict() {
        let source = ScenarioSource {
            scenario: Some("fig3".into()),
            seed: Some(1),
            g: None,
            s: None,
            mode: None,
        };
        assert!(matches!(resolve_scenario(&source), Err(CliError::Load(_))));
    }
}
