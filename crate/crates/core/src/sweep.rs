//! Parameter sweep over (pipeline count, reconfigured partitions per
//! switch, bundle factor, downsample divisor, resolution), combining the
//! analytic feasibility verdict with a confirming simulation per cell.

use crate::assign::{plan_round, FabricState, TransitionPlan};
use crate::model::{ExecMode, RpSpec, ScheduleParams, VideoFormat};
use crate::perf::{check_feasibility, FeasibilityInput, FeasibilityReport};
use crate::scenario::{interleaved_scenario, Scenario};
use crate::sim::{simulate, SimConfig, SimDuration};
use crate::timeline::Timeline;
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep would produce {cells} cells, above the cap of {cap}")]
    TooManyCells { cells: usize, cap: usize },
    #[error("sweep axes must not be empty")]
    EmptyAxis,
}

/// Axes of the sweep grid. Each cell builds the standard interleaved
/// scenario for its parameters and runs both the analytic check and the
/// simulator.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub pipeline_counts: Vec<u32>,
    /// Partitions reconfigured per pipeline switch.
    pub reconfig_counts: Vec<u32>,
    pub g_values: Vec<u32>,
    pub s_values: Vec<u32>,
    pub resolutions: Vec<VideoFormat>,
    pub mode: ExecMode,
    pub rounds: u32,
    /// Upper bound on the cross-product size.
    pub cap: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            pipeline_counts: vec![2],
            reconfig_counts: vec![1, 2, 3, 4, 5, 6],
            g_values: vec![1, 2, 3],
            s_values: vec![1, 2, 3],
            resolutions: vec![VideoFormat::p720_60()],
            mode: ExecMode::Basic,
            rounds: 6,
            cap: 4096,
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub resolution: String,
    pub pipelines: u32,
    pub reconfigs: u32,
    pub g: u32,
    pub s: u32,
    pub feasible: bool,
    pub fps: f64,
    pub slack_ms: f64,
    pub glitches: usize,
    /// Analytic verdict and simulation agree. In basic mode these match
    /// exactly; in staggered mode the analytic upper bound may be
    /// pessimistic, so only "feasible but glitched" counts as
    /// disagreement.
    pub agree: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Partitions each pipeline reconfigures per steady-state round: the
/// first round's plans are replayed over the fabric once, then a second
/// round is walked deriving each transition's reloads. From the second
/// round on the fabric overlay is stationary, so these sets are exactly
/// what every later round executes.
pub fn steady_reconfig_sets<'a>(
    scenario: &'a Scenario,
    plans: &[TransitionPlan],
) -> Vec<Vec<&'a RpSpec>> {
    let n = scenario.pipelines.len();
    let mut fabric = FabricState::from_platform(&scenario.platform);
    for plan in &plans[..n] {
        fabric.apply(plan);
    }
    let mut sets = Vec::with_capacity(n);
    for (i, pipeline) in scenario.pipelines.iter().enumerate() {
        let plan = if i == 0 { &plans[n] } else { &plans[i] };
        let mut reloaded = Vec::new();
        for stage in &pipeline.stages {
            let rp_id = &plan.assignment[&stage.id];
            if fabric.loaded(rp_id) != Some(stage.module.as_str()) {
                fabric.load(rp_id, &stage.module);
                reloaded.push(scenario.platform.rp(rp_id).expect("plan validated"));
            }
        }
        sets.push(reloaded);
    }
    sets
}

/// Plans the round-robin cycle and runs the analytic feasibility check
/// over the exact steady-state reconfiguration sets.
pub fn analyze_scenario(
    scenario: &Scenario,
) -> Result<(FeasibilityReport, Vec<TransitionPlan>), String> {
    let modules = scenario.module_map();
    let pipelines = scenario.pipeline_refs();
    let initial = FabricState::from_platform(&scenario.platform);
    let plans = plan_round(&initial, &pipelines, &modules, &scenario.platform)
        .map_err(|e| e.to_string())?;

    let sets = steady_reconfig_sets(scenario, &plans);
    let inputs: Vec<FeasibilityInput<'_>> = pipelines
        .iter()
        .zip(sets)
        .map(|(pipeline, reconfigured)| FeasibilityInput {
            pipeline,
            reconfigured,
        })
        .collect();
    let report = check_feasibility(
        &inputs,
        &modules,
        &scenario.format,
        &scenario.platform,
        scenario.schedule,
    )
    .map_err(|e| e.to_string())?;
    Ok((report, plans))
}

/// Simulates a scenario under the given plans.
pub fn simulate_scenario(
    scenario: &Scenario,
    plans: Vec<TransitionPlan>,
    rounds: u32,
) -> Result<Timeline, String> {
    let modules = scenario.module_map();
    let pipelines = scenario.pipeline_refs();
    let config = SimConfig {
        mode: scenario.mode,
        params: scenario.schedule,
        duration: SimDuration::Rounds(rounds),
        plans,
        fifo_capacity_frames: 1.0,
    };
    simulate(
        &scenario.platform,
        &scenario.format,
        &modules,
        &pipelines,
        &config,
    )
    .map_err(|e| e.to_string())
}

/// Evaluates one scenario: analytic check over the steady-state plans,
/// then a confirming simulation.
pub fn evaluate_scenario(
    scenario: &Scenario,
    rounds: u32,
) -> Result<(FeasibilityReport, Timeline, Vec<TransitionPlan>), String> {
    let (report, plans) = analyze_scenario(scenario)?;
    let timeline = simulate_scenario(scenario, plans.clone(), rounds)?;
    Ok((report, timeline, plans))
}

fn evaluate_cell(spec: &SweepSpec, resolution: VideoFormat, n: u32, k: u32, g: u32, s: u32) -> SweepRow {
    let scenario = interleaved_scenario(resolution, n, k, ScheduleParams::new(g, s), spec.mode);
    let mut row = SweepRow {
        resolution: resolution.label(),
        pipelines: n,
        reconfigs: k,
        g,
        s,
        feasible: false,
        fps: 0.0,
        slack_ms: 0.0,
        glitches: 0,
        agree: true,
        error: None,
    };
    match evaluate_scenario(&scenario, spec.rounds) {
        Ok((report, timeline, _)) => {
            row.feasible = report.feasible;
            row.slack_ms = report.slack.as_millis();
            row.glitches = timeline.glitches.len();
            row.fps = timeline
                .per_pipeline
                .values()
                .map(|p| p.achieved_fps)
                .fold(f64::INFINITY, f64::min);
            if !row.fps.is_finite() {
                row.fps = 0.0;
            }
            let sim_clean = timeline.glitches.is_empty();
            row.agree = match spec.mode {
                ExecMode::Basic => report.feasible == sim_clean,
                ExecMode::Staggered => !(report.feasible && !sim_clean),
            };
        }
        Err(e) => {
            row.error = Some(e);
            row.agree = true;
        }
    }
    row
}

/// Runs the sweep, with cells evaluated concurrently on up to `jobs`
/// workers. Results are assembled in grid order regardless of worker
/// interleaving.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult, SweepError> {
    if spec.pipeline_counts.is_empty()
        || spec.reconfig_counts.is_empty()
        || spec.g_values.is_empty()
        || spec.s_values.is_empty()
        || spec.resolutions.is_empty()
    {
        return Err(SweepError::EmptyAxis);
    }
    let mut cells = Vec::new();
    for resolution in &spec.resolutions {
        for &n in &spec.pipeline_counts {
            for &k in &spec.reconfig_counts {
                for &g in &spec.g_values {
                    for &s in &spec.s_values {
                        cells.push((*resolution, n, k, g, s));
                    }
                }
            }
        }
    }
    if cells.len() > spec.cap {
        return Err(SweepError::TooManyCells {
            cells: cells.len(),
            cap: spec.cap,
        });
    }

    let jobs = jobs.max(1).min(cells.len().max(1));
    let mut rows: Vec<Option<SweepRow>> = vec![None; cells.len()];
    if jobs <= 1 {
        for (slot, &(resolution, n, k, g, s)) in rows.iter_mut().zip(&cells) {
            *slot = Some(evaluate_cell(spec, resolution, n, k, g, s));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results = std::sync::Mutex::new(&mut rows);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= cells.len() {
                        break;
                    }
                    let (resolution, n, k, g, s) = cells[i];
                    let row = evaluate_cell(spec, resolution, n, k, g, s);
                    results.lock().unwrap()[i] = Some(row);
                });
            }
        });
    }
    Ok(SweepResult {
        rows: rows.into_iter().map(|r| r.expect("all cells evaluated")).collect(),
    })
}

impl SweepResult {
    /// Cells where the analytic verdict contradicts the simulation.
    pub fn disagreements(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| !r.agree).collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>5} {:>4} {:>3} {:>3}  {:<10} {:>7} {:>10} {:>8}  {}",
            "res", "pipes", "rps", "g", "s", "feasible", "fps", "slack_ms", "glitches", "agree"
        );
        for r in &self.rows {
            if let Some(err) = &r.error {
                let _ = writeln!(
                    out,
                    "{:<8} {:>5} {:>4} {:>3} {:>3}  error: {err}",
                    r.resolution, r.pipelines, r.reconfigs, r.g, r.s
                );
                continue;
            }
            let _ = writeln!(
                out,
                "{:<8} {:>5} {:>4} {:>3} {:>3}  {:<10} {:>7.2} {:>10.3} {:>8}  {}",
                r.resolution,
                r.pipelines,
                r.reconfigs,
                r.g,
                r.s,
                if r.feasible { "yes" } else { "no" },
                r.fps,
                r.slack_ms,
                r.glitches,
                if r.agree { "ok" } else { "MISMATCH" }
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("resolution,pipelines,reconfigs,g,s,feasible,fps,slack_ms,glitches,agree,error\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.4},{:.6},{},{},{}",
                r.resolution,
                r.pipelines,
                r.reconfigs,
                r.g,
                r.s,
                r.feasible,
                r.fps,
                r.slack_ms,
                r.glitches,
                r.agree,
                r.error.as_deref().unwrap_or("")
            );
        }
        out
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("row serializes"));
            out.push('\n');
        }
        out
    }
}
