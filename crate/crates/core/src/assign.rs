//! Stage-to-partition assignment and crossbar route planning across a
//! round-robin pipeline sequence. Transitions retain and reuse already
//! configured stages so that switching pipelines reconfigures as few
//! partitions as possible; topology changes are absorbed by rerouting
//! the streaming interconnect instead.

use crate::model::{ModuleSpec, PlatformSpec, VideoFormat};
use crate::pipeline::{EdgeSpec, PipelineError, PipelineSpec, CAMERA, DISPLAY};
use crate::units::Seconds;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("pipeline {pipeline} has {stages} stages but the fabric only has {rps} partitions")]
    InsufficientRps {
        pipeline: String,
        stages: usize,
        rps: usize,
    },
    #[error("module {module} fits in no partition")]
    ModuleFitsNoRp { module: String },
    #[error("assignment search limited to {max_rps} partitions and {max_stages} stages, got {rps}/{stages}")]
    InstanceTooLarge {
        rps: usize,
        stages: usize,
        max_rps: usize,
        max_stages: usize,
    },
    #[error("pipeline {pipeline}: no capacity-feasible stage-to-partition assignment exists")]
    NoFeasibleAssignment { pipeline: String },
}

/// Runtime content of one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpRuntime {
    pub id: String,
    pub loaded: Option<String>,
    /// Logical timestamp of the last timeslice that used this partition;
    /// 0 when never used. Drives least-recently-used eviction ties.
    pub last_used: u64,
}

/// The mutable fabric: per-partition resident modules and the currently
/// configured interconnect routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FabricState {
    pub rps: Vec<RpRuntime>,
    pub routes: Vec<Route>,
    clock: u64,
}

impl FabricState {
    /// Initial state from the platform's partition list (honoring any
    /// pre-loaded modules declared there).
    pub fn from_platform(platform: &PlatformSpec) -> Self {
        FabricState {
            rps: platform
                .partitions
                .iter()
                .map(|rp| RpRuntime {
                    id: rp.id.clone(),
                    loaded: rp.loaded.clone(),
                    last_used: 0,
                })
                .collect(),
            routes: Vec::new(),
            clock: 0,
        }
    }

    pub fn loaded(&self, rp_id: &str) -> Option<&str> {
        self.rps
            .iter()
            .find(|r| r.id == rp_id)
            .and_then(|r| r.loaded.as_deref())
    }

    /// Applies a transition: loads the reconfigured modules, marks the
    /// assigned partitions used, and installs the new routes.
    pub fn apply(&mut self, plan: &TransitionPlan) {
        for (rp_id, module) in &plan.reconfigure {
            self.load(rp_id, module);
        }
        self.touch_all(plan.assignment.values().map(String::as_str));
        self.routes = plan.routes.clone();
    }

    /// Loads `module` into the named partition.
    pub fn load(&mut self, rp_id: &str, module: &str) {
        if let Some(rp) = self.rps.iter_mut().find(|r| r.id == rp_id) {
            rp.loaded = Some(module.to_string());
        }
    }

    /// Marks the given partitions as used by the current timeslice.
    pub fn touch_all<'a>(&mut self, rp_ids: impl Iterator<Item = &'a str>) {
        self.clock += 1;
        for rp_id in rp_ids {
            if let Some(rp) = self.rps.iter_mut().find(|r| r.id == rp_id) {
                rp.last_used = self.clock;
            }
        }
    }
}

/// How a streaming connection is physically realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteKind {
    /// Single-cycle buffered crossbar path.
    DirectCrossbar,
    /// Circular-buffer FIFO in DRAM via a decoupling DMA engine.
    ThruDram,
}

/// A crossbar endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Camera,
    Display,
    RpOut { rp: String, port: u32 },
    RpIn { rp: String, port: u32 },
}

/// One configured streaming connection. `edge` names the logical
/// pipeline edge the route realizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub source: Endpoint,
    pub sink: Endpoint,
    pub kind: RouteKind,
    pub edge: EdgeSpec,
}

/// The plan for switching the fabric to one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionPlan {
    pub pipeline: String,
    /// stage id -> partition id, every stage on its own partition.
    pub assignment: BTreeMap<String, String>,
    /// Partitions whose resident module differs from the assigned one,
    /// with the module to load; sorted by partition id.
    pub reconfigure: Vec<(String, String)>,
    pub routes: Vec<Route>,
    pub reconfig_time_total: Seconds,
    /// Crossbar register-write cost to install `routes`.
    pub route_config_time: Seconds,
}

/// A single rule violation found by [`validate_topology`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyViolation {
    #[error("two streaming sources drive the same destination {sink:?}")]
    SinkConflict { sink: Endpoint },
    #[error("route references unknown partition {rp}")]
    UnknownRp { rp: String },
    #[error(
        "{requested} decoupling thru-DRAM connections requested but only {usable} DMA engines remain after the camera/display double-buffers"
    )]
    DmaBudgetExceeded { requested: usize, usable: usize },
    #[error("{streams} concurrent DRAM streaming connections exceed the sustainable ceiling of {max}")]
    StreamCeilingExceeded { streams: usize, max: u32 },
    #[error("aggregate DRAM stream demand {demand} exceeds the bandwidth {capacity}")]
    BandwidthExceeded {
        demand: crate::units::BytesPerSec,
        capacity: crate::units::BytesPerSec,
    },
}

/// Checks crossbar and DRAM constraints on a configured route set: one
/// driver per destination, the decoupling-DMA budget (two engines are
/// reserved for the camera and display double-buffers), the concurrent
/// DRAM stream ceiling, and aggregate bandwidth.
pub fn validate_topology(
    routes: &[Route],
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Vec<TopologyViolation> {
    let mut violations = Vec::new();
    let mut sinks: BTreeMap<&Endpoint, usize> = BTreeMap::new();
    for route in routes {
        *sinks.entry(&route.sink).or_default() += 1;
        for ep in [&route.source, &route.sink] {
            if let Endpoint::RpIn { rp, .. } | Endpoint::RpOut { rp, .. } = ep {
                if platform.rp(rp).is_none() {
                    violations.push(TopologyViolation::UnknownRp { rp: rp.clone() });
                }
            }
        }
    }
    for (sink, count) in sinks {
        if count > 1 {
            violations.push(TopologyViolation::SinkConflict { sink: sink.clone() });
        }
    }

    let decoupling = routes
        .iter()
        .filter(|r| r.kind == RouteKind::ThruDram)
        .count();
    let usable = platform.dma_engines.saturating_sub(2) as usize;
    if decoupling > usable {
        violations.push(TopologyViolation::DmaBudgetExceeded {
            requested: decoupling,
            usable,
        });
    }

    // Camera and display double-buffers are always streaming.
    let streams = decoupling + 2;
    if streams > platform.max_dram_streams as usize {
        violations.push(TopologyViolation::StreamCeilingExceeded {
            streams,
            max: platform.max_dram_streams,
        });
    }
    let demand = platform.per_stream_bandwidth(format) * streams as f64;
    if demand > platform.dram_bandwidth {
        violations.push(TopologyViolation::BandwidthExceeded {
            demand,
            capacity: platform.dram_bandwidth,
        });
    }
    violations
}

/// Builds the crossbar routes realizing a pipeline's DAG under a given
/// stage-to-partition assignment. Port indices are allocated in
/// deterministic edge order.
pub fn routes_for(
    pipeline: &PipelineSpec,
    assignment: &BTreeMap<String, String>,
) -> Vec<Route> {
    let mut in_port: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    let mut out_port: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    for stage in &pipeline.stages {
        let mut ins: Vec<&EdgeSpec> =
            pipeline.edges.iter().filter(|e| e.to == stage.id).collect();
        ins.sort_by(|a, b| a.from.cmp(&b.from));
        for (i, e) in ins.iter().enumerate() {
            in_port.insert((e.from.as_str(), e.to.as_str()), i as u32);
        }
        let mut outs: Vec<&EdgeSpec> =
            pipeline.edges.iter().filter(|e| e.from == stage.id).collect();
        outs.sort_by(|a, b| a.to.cmp(&b.to));
        for (i, e) in outs.iter().enumerate() {
            out_port.insert((e.from.as_str(), e.to.as_str()), i as u32);
        }
    }
    pipeline
        .edges
        .iter()
        .map(|e| {
            let key = (e.from.as_str(), e.to.as_str());
            let source = if e.from == CAMERA {
                Endpoint::Camera
            } else {
                Endpoint::RpOut {
                    rp: assignment[&e.from].clone(),
                    port: out_port[&key],
                }
            };
            let sink = if e.to == DISPLAY {
                Endpoint::Display
            } else {
                Endpoint::RpIn {
                    rp: assignment[&e.to].clone(),
                    port: in_port[&key],
                }
            };
            Route {
                source,
                sink,
                kind: RouteKind::DirectCrossbar,
                edge: e.clone(),
            }
        })
        .collect()
}

struct Candidate {
    rp_idx: usize,
    reuse: bool,
    time: Seconds,
}

struct SearchProblem<'a> {
    stage_modules: Vec<&'a str>,
    candidates: Vec<Vec<Candidate>>,
}

fn build_search_problem<'a>(
    state: &'a FabricState,
    next: &'a PipelineSpec,
    modules: &BTreeMap<&str, &'a ModuleSpec>,
    platform: &'a PlatformSpec,
) -> Result<SearchProblem<'a>, PlanError> {
    next.validate(modules)?;
    if next.stages.len() > platform.partitions.len() {
        return Err(PlanError::InsufficientRps {
            pipeline: next.id.clone(),
            stages: next.stages.len(),
            rps: platform.partitions.len(),
        });
    }
    let order = next.topo_order()?;
    let mut stage_modules = Vec::with_capacity(order.len());
    let mut candidates = Vec::with_capacity(order.len());
    for stage_id in &order {
        let module_id = next.stage(stage_id).expect("validated").module.as_str();
        let module = modules[module_id];
        let mut cands: Vec<Candidate> = platform
            .partitions
            .iter()
            .enumerate()
            .filter(|(_, rp)| module.instantiable_in(rp))
            .map(|(idx, rp)| Candidate {
                rp_idx: idx,
                reuse: state.rps[idx].loaded.as_deref() == Some(module_id),
                time: crate::perf::reconfig_time(rp, platform),
            })
            .collect();
        if cands.is_empty() {
            return Err(PlanError::ModuleFitsNoRp {
                module: module_id.to_string(),
            });
        }
        // Reusable partitions first, then the least recently used (empty
        // partitions sort before any resident module), then by id.
        cands.sort_by(|a, b| {
            b.reuse
                .cmp(&a.reuse)
                .then(state.rps[a.rp_idx].last_used.cmp(&state.rps[b.rp_idx].last_used))
                .then(state.rps[a.rp_idx].id.cmp(&state.rps[b.rp_idx].id))
        });
        stage_modules.push(module_id);
        candidates.push(cands);
    }
    Ok(SearchProblem {
        stage_modules,
        candidates,
    })
}

struct BestAssignment {
    count: u32,
    time: Seconds,
    rp_for_stage: Vec<usize>,
}

fn search_assignment(problem: &SearchProblem<'_>) -> Option<BestAssignment> {
    fn dfs(
        problem: &SearchProblem<'_>,
        depth: usize,
        used: u64,
        count: u32,
        time: Seconds,
        current: &mut Vec<usize>,
        best: &mut Option<BestAssignment>,
    ) {
        if let Some(b) = best {
            // Costs only grow with depth; anything not strictly better
            // lexicographically cannot improve on the incumbent.
            if count > b.count || (count == b.count && time >= b.time) {
                return;
            }
        }
        if depth == problem.candidates.len() {
            *best = Some(BestAssignment {
                count,
                time,
                rp_for_stage: current.clone(),
            });
            return;
        }
        for cand in &problem.candidates[depth] {
            let bit = 1u64 << cand.rp_idx;
            if used & bit != 0 {
                continue;
            }
            let (dc, dt) = if cand.reuse {
                (0, Seconds::ZERO)
            } else {
                (1, cand.time)
            };
            current.push(cand.rp_idx);
            dfs(problem, depth + 1, used | bit, count + dc, time + dt, current, best);
            current.pop();
        }
    }

    let mut best = None;
    let mut current = Vec::with_capacity(problem.candidates.len());
    dfs(problem, 0, 0, 0, Seconds::ZERO, &mut current, &mut best);
    best
}

fn plan_from_assignment(
    state: &FabricState,
    next: &PipelineSpec,
    platform: &PlatformSpec,
    order: &[String],
    stage_modules: &[&str],
    rp_for_stage: &[usize],
) -> TransitionPlan {
    let mut assignment = BTreeMap::new();
    let mut reconfigure = Vec::new();
    let mut total = Seconds::ZERO;
    for ((stage_id, module_id), &rp_idx) in order.iter().zip(stage_modules).zip(rp_for_stage) {
        let rp = &platform.partitions[rp_idx];
        assignment.insert(stage_id.clone(), rp.id.clone());
        if state.rps[rp_idx].loaded.as_deref() != Some(*module_id) {
            reconfigure.push((rp.id.clone(), module_id.to_string()));
            total += crate::perf::reconfig_time(rp, platform);
        }
    }
    reconfigure.sort();
    let routes = routes_for(next, &assignment);
    let route_config_time = platform.route_config_per_link * routes.len() as f64;
    TransitionPlan {
        pipeline: next.id.clone(),
        assignment,
        reconfigure,
        routes,
        reconfig_time_total: total,
        route_config_time,
    }
}

/// Plans the switch from the current fabric state to `next`, minimizing
/// the number of reconfigured partitions, then total reconfiguration
/// time, preferring to evict least-recently-used residents on ties.
/// Resident modules are reused wherever the crossbar can realize the
/// topology, regardless of which partition they sit in.
pub fn plan_transition(
    state: &FabricState,
    next: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    platform: &PlatformSpec,
) -> Result<TransitionPlan, PlanError> {
    let problem = build_search_problem(state, next, modules, platform)?;
    let best = search_assignment(&problem).ok_or_else(|| PlanError::NoFeasibleAssignment {
        pipeline: next.id.clone(),
    })?;
    let order = next.topo_order()?;
    Ok(plan_from_assignment(
        state,
        next,
        platform,
        &order,
        &problem.stage_modules,
        &best.rp_for_stage,
    ))
}

/// Exact minimum number of reconfigurations over all valid assignments,
/// by exhaustive enumeration. Test oracle; limited to small instances.
pub fn brute_force_min_reconfigs(
    state: &FabricState,
    next: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    platform: &PlatformSpec,
) -> Result<u32, PlanError> {
    const MAX: usize = 8;
    if platform.partitions.len() > MAX || next.stages.len() > MAX {
        return Err(PlanError::InstanceTooLarge {
            rps: platform.partitions.len(),
            stages: next.stages.len(),
            max_rps: MAX,
            max_stages: MAX,
        });
    }
    next.validate(modules)?;
    if next.stages.len() > platform.partitions.len() {
        return Err(PlanError::InsufficientRps {
            pipeline: next.id.clone(),
            stages: next.stages.len(),
            rps: platform.partitions.len(),
        });
    }

    fn enumerate(
        stage_modules: &[&str],
        state: &FabricState,
        platform: &PlatformSpec,
        modules: &BTreeMap<&str, &ModuleSpec>,
        depth: usize,
        used: u64,
        count: u32,
        best: &mut Option<u32>,
    ) {
        if depth == stage_modules.len() {
            *best = Some(best.map_or(count, |b: u32| b.min(count)));
            return;
        }
        let module = modules[stage_modules[depth]];
        for (idx, rp) in platform.partitions.iter().enumerate() {
            let bit = 1u64 << idx;
            if used & bit != 0 || !module.instantiable_in(rp) {
                continue;
            }
            let dc = if state.rps[idx].loaded.as_deref() == Some(stage_modules[depth]) {
                0
            } else {
                1
            };
            enumerate(
                stage_modules,
                state,
                platform,
                modules,
                depth + 1,
                used | bit,
                count + dc,
                best,
            );
        }
    }

    let order = next.topo_order()?;
    let stage_modules: Vec<&str> = order
        .iter()
        .map(|s| next.stage(s).expect("validated").module.as_str())
        .collect();
    let mut best = None;
    enumerate(&stage_modules, state, platform, modules, 0, 0, 0, &mut best);
    best.ok_or_else(|| PlanError::NoFeasibleAssignment {
        pipeline: next.id.clone(),
    })
}

const CYCLIC_MAX_RPS: usize = 6;
const CYCLIC_MAX_PIPELINES: usize = 4;
const CYCLIC_NODE_BUDGET: u64 = 20_000_000;
const CYCLIC_TUPLE_CAP: u64 = 2_000_000;

/// Plans one full round-robin cycle. Returns `sequence.len() + 1` plans:
/// one per pipeline entered during the first round (starting from
/// `initial`), plus the wrap-around transition back into the first
/// pipeline used from the second round on.
///
/// For at most [`CYCLIC_MAX_RPS`] partitions and [`CYCLIC_MAX_PIPELINES`]
/// pipelines the steady-state cyclic reconfiguration cost is globally
/// minimal (branch-and-bound over joint assignments). Instances whose
/// joint assignment space exceeds the search budget, and larger
/// instances generally, are planned greedily transition by transition,
/// which may be suboptimal.
pub fn plan_round(
    initial: &FabricState,
    sequence: &[&PipelineSpec],
    modules: &BTreeMap<&str, &ModuleSpec>,
    platform: &PlatformSpec,
) -> Result<Vec<TransitionPlan>, PlanError> {
    if sequence.is_empty() {
        return Ok(Vec::new());
    }
    if sequence.len() <= CYCLIC_MAX_PIPELINES && platform.partitions.len() <= CYCLIC_MAX_RPS {
        if let Some(plans) = plan_round_cyclic(initial, sequence, modules, platform)? {
            return Ok(plans);
        }
    }
    plan_round_greedy(initial, sequence, modules, platform)
}

/// Chains [`plan_transition`] through the sequence plus the wrap-around
/// step: each transition is individually optimal, the cycle as a whole
/// may not be.
pub fn plan_round_greedy(
    initial: &FabricState,
    sequence: &[&PipelineSpec],
    modules: &BTreeMap<&str, &ModuleSpec>,
    platform: &PlatformSpec,
) -> Result<Vec<TransitionPlan>, PlanError> {
    let mut state = initial.clone();
    let mut plans = Vec::with_capacity(sequence.len() + 1);
    for pipeline in sequence {
        let plan = plan_transition(&state, pipeline, modules, platform)?;
        state.apply(&plan);
        plans.push(plan);
    }
    let wrap = plan_transition(&state, sequence[0], modules, platform)?;
    plans.push(wrap);
    Ok(plans)
}

/// Joint assignment search over the cyclic sequence. Returns `None` when
/// the node budget is exhausted.
fn plan_round_cyclic(
    initial: &FabricState,
    sequence: &[&PipelineSpec],
    modules: &BTreeMap<&str, &ModuleSpec>,
    platform: &PlatformSpec,
) -> Result<Option<Vec<TransitionPlan>>, PlanError> {
    let n = sequence.len();
    let mut problems = Vec::with_capacity(n);
    for pipeline in sequence {
        problems.push(build_search_problem(initial, pipeline, modules, platform)?);
    }

    // All valid injective assignments per pipeline, in deterministic order.
    let mut all_assignments: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    let mut tuple_count: u64 = 1;
    for problem in &problems {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(problem.candidates.len());
        enumerate_assignments(problem, 0, 0, &mut current, &mut out);
        tuple_count = tuple_count.saturating_mul(out.len() as u64);
        all_assignments.push(out);
    }
    if tuple_count > CYCLIC_TUPLE_CAP {
        return Ok(None);
    }

    // Provable floor on steady-state loads: around each switch the
    // previous and next pipelines' module sets must both have been
    // resident, so at least their union's overflow over the partition
    // count is reloaded.
    let rp_count = platform.partitions.len();
    let min_time = platform.smallest_reconfig_time().unwrap_or(Seconds::ZERO);
    let mut bound_count = 0u32;
    let mut bound_time = Seconds::ZERO;
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let union: std::collections::BTreeSet<&str> = problems[i]
            .stage_modules
            .iter()
            .chain(problems[prev].stage_modules.iter())
            .copied()
            .collect();
        let missing = union.len().saturating_sub(rp_count) as u32;
        bound_count += missing;
        bound_time += min_time * missing as f64;
    }

    let searcher = CyclicSearch {
        initial,
        problems: &problems,
        all_assignments: &all_assignments,
        platform,
        n,
        bound_count,
        bound_time,
    };
    let Some(choice) = searcher.run() else {
        return Ok(None);
    };

    // Materialize the first-round plans plus the steady-state wrap plan.
    let mut plans = Vec::with_capacity(n + 1);
    let mut state = initial.clone();
    for (i, pipeline) in sequence.iter().enumerate() {
        let order = pipeline.topo_order()?;
        let plan = plan_from_assignment(
            &state,
            pipeline,
            platform,
            &order,
            &problems[i].stage_modules,
            &all_assignments[i][choice[i]],
        );
        state.apply(&plan);
        plans.push(plan);
    }
    let order = sequence[0].topo_order()?;
    let wrap = plan_from_assignment(
        &state,
        sequence[0],
        platform,
        &order,
        &problems[0].stage_modules,
        &all_assignments[0][choice[0]],
    );
    plans.push(wrap);
    Ok(Some(plans))
}

fn enumerate_assignments(
    problem: &SearchProblem<'_>,
    depth: usize,
    used: u64,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if depth == problem.candidates.len() {
        out.push(current.clone());
        return;
    }
    // Candidate order already encodes the reuse/LRU/id preference.
    for cand in &problem.candidates[depth] {
        let bit = 1u64 << cand.rp_idx;
        if used & bit != 0 {
            continue;
        }
        current.push(cand.rp_idx);
        enumerate_assignments(problem, depth + 1, used | bit, current, out);
        current.pop();
    }
}

struct CyclicSearch<'a> {
    initial: &'a FabricState,
    problems: &'a [SearchProblem<'a>],
    all_assignments: &'a [Vec<Vec<usize>>],
    platform: &'a PlatformSpec,
    n: usize,
    bound_count: u32,
    bound_time: Seconds,
}

#[derive(PartialEq)]
enum SearchOutcome {
    Exhausted,
    BudgetExceeded,
    ProvablyOptimal,
}

#[derive(Clone, Copy, PartialEq)]
struct CyclicCost {
    steady_count: u32,
    steady_time: Seconds,
    initial_count: u32,
    initial_time: Seconds,
}

impl CyclicCost {
    fn better_than(&self, other: &CyclicCost) -> bool {
        let key = |c: &CyclicCost| {
            (
                c.steady_count,
                c.steady_time.0,
                c.initial_count,
                c.initial_time.0,
            )
        };
        let (ac, at, aic, ait) = key(self);
        let (bc, bt, bic, bit) = key(other);
        (ac, at, aic, ait) < (bc, bt, bic, bit)
    }
}

impl<'a> CyclicSearch<'a> {
    fn run(&self) -> Option<Vec<usize>> {
        let mut best: Option<(CyclicCost, Vec<usize>)> = None;
        let mut choice = vec![0usize; self.n];
        let mut nodes: u64 = 0;
        match self.dfs(0, &mut choice, &mut best, &mut nodes) {
            SearchOutcome::BudgetExceeded => None,
            _ => best.map(|(_, c)| c),
        }
    }

    /// Steady-state writer of partition `rp` right before pipeline `i`
    /// runs, scanning one full cycle of recency. `None` when no chosen
    /// assignment touches the partition or the writer is not yet chosen
    /// (depth-limited). The bool is `true` when the answer is definite.
    fn writer_before(
        &self,
        choice: &[usize],
        chosen_depth: usize,
        i: usize,
        rp: usize,
    ) -> (Option<&'a str>, bool) {
        // Recency: i-1, i-2, ..., 0, n-1, n-2, ..., i (previous round).
        for back in 1..=self.n {
            let j = (i + self.n - back) % self.n;
            if j >= chosen_depth {
                return (None, false);
            }
            let assignment = &self.all_assignments[j][choice[j]];
            for (stage_idx, &stage_rp) in assignment.iter().enumerate() {
                if stage_rp == rp {
                    return (Some(self.problems[j].stage_modules[stage_idx]), true);
                }
            }
        }
        (None, true)
    }

    /// Cost of the steady-state transition into pipeline `i` given
    /// currently chosen assignments; optimistic for undetermined writers.
    fn steady_cost_into(
        &self,
        choice: &[usize],
        chosen_depth: usize,
        i: usize,
    ) -> (u32, Seconds, bool) {
        let assignment = &self.all_assignments[i][choice[i]];
        let mut count = 0;
        let mut time = Seconds::ZERO;
        let mut definite = true;
        for (stage_idx, &rp) in assignment.iter().enumerate() {
            let module = self.problems[i].stage_modules[stage_idx];
            let (writer, known) = self.writer_before(choice, chosen_depth, i, rp);
            if !known {
                definite = false;
                continue;
            }
            let resident = writer.or_else(|| self.initial.rps[rp].loaded.as_deref());
            if resident != Some(module) {
                count += 1;
                time += crate::perf::reconfig_time(&self.platform.partitions[rp], self.platform);
            }
        }
        (count, time, definite)
    }

    fn first_round_cost(&self, choice: &[usize]) -> (u32, Seconds) {
        let mut rp_content: Vec<Option<&str>> = self
            .initial
            .rps
            .iter()
            .map(|r| r.loaded.as_deref())
            .collect();
        let mut count = 0;
        let mut time = Seconds::ZERO;
        for i in 0..self.n {
            let assignment = &self.all_assignments[i][choice[i]];
            for (stage_idx, &rp) in assignment.iter().enumerate() {
                let module = self.problems[i].stage_modules[stage_idx];
                if rp_content[rp] != Some(module) {
                    count += 1;
                    time +=
                        crate::perf::reconfig_time(&self.platform.partitions[rp], self.platform);
                    rp_content[rp] = Some(module);
                }
            }
        }
        (count, time)
    }

    fn dfs(
        &self,
        depth: usize,
        choice: &mut Vec<usize>,
        best: &mut Option<(CyclicCost, Vec<usize>)>,
        nodes: &mut u64,
    ) -> SearchOutcome {
        *nodes += 1;
        if *nodes > CYCLIC_NODE_BUDGET {
            return SearchOutcome::BudgetExceeded;
        }
        if depth == self.n {
            let mut count = 0;
            let mut time = Seconds::ZERO;
            for i in 0..choice.len() {
                let (c, t, definite) = self.steady_cost_into(choice, self.n, i);
                debug_assert!(definite);
                count += c;
                time += t;
            }
            let (ic, it) = self.first_round_cost(choice);
            let cost = CyclicCost {
                steady_count: count,
                steady_time: time,
                initial_count: ic,
                initial_time: it,
            };
            match best {
                Some((b, _)) if !cost.better_than(b) => {}
                _ => *best = Some((cost, choice.clone())),
            }
            // An incumbent matching the union lower bound cannot be
            // beaten on the steady-state objective.
            if let Some((b, _)) = best {
                if b.steady_count <= self.bound_count
                    && b.steady_time.0 <= self.bound_time.0 + 1e-15
                {
                    return SearchOutcome::ProvablyOptimal;
                }
            }
            return SearchOutcome::Exhausted;
        }
        for idx in 0..self.all_assignments[depth].len() {
            choice[depth] = idx;
            // Admissible partial bound: transitions with all their
            // predecessors chosen are costed; unknown writers count zero.
            if let Some((b, _)) = best {
                let mut count = 0;
                let mut time = Seconds::ZERO;
                for i in 0..=depth {
                    let (c, t, _) = self.steady_cost_into(choice, depth + 1, i);
                    count += c;
                    time += t;
                }
                if count > b.steady_count
                    || (count == b.steady_count && time.0 > b.steady_time.0)
                {
                    continue;
                }
            }
            match self.dfs(depth + 1, choice, best, nodes) {
                SearchOutcome::Exhausted => {}
                stop => return stop,
            }
        }
        SearchOutcome::Exhausted
    }
}
