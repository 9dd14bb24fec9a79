//! Deterministic discrete-event simulation of time-shared execution:
//! serialized partition reconfigurations, basic or staggered stage
//! starts with thru-DRAM decoupling, bundled and downsampled rounds,
//! double-buffered I/O, and glitch detection.
//!
//! Streaming is modeled as fluid flow at the pipeline's solo pixel rate;
//! events are at frame and stage granularity, not per pixel.

use crate::assign::{validate_topology, FabricState, RouteKind, TopologyViolation, TransitionPlan};
use crate::model::{ExecMode, ModelError, ModuleSpec, PlatformSpec, ScheduleParams, VideoFormat};
use crate::perf::{fill_time, reconfig_time, round_quantum};
use crate::pipeline::{PipelineError, PipelineSpec, DISPLAY};
use crate::timeline::{Event, EventKind, Glitch, PipelineStats, Timeline};
use crate::units::{Bytes, BytesPerSec, Seconds};
use std::collections::BTreeMap;
use thiserror::Error;

/// Deadline and event-coincidence tolerance: well below any modeled
/// quantity, well above accumulated float noise.
const TICK: Seconds = Seconds(1e-9);

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("expected {expected} transition plans (one per pipeline plus wrap-around), got {got}")]
    PlanCountMismatch { expected: usize, got: usize },
    #[error("plan {index} targets pipeline {planned} but position {index} runs {running}")]
    PlanTargetMismatch {
        index: usize,
        planned: String,
        running: String,
    },
    #[error("pipeline {pipeline}: stage {stage} has no assigned partition in its plan")]
    StageUnassigned { pipeline: String, stage: String },
    #[error("plan references unknown partition {rp}")]
    UnknownRp { rp: String },
    #[error("invalid streaming topology: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Topology { violations: Vec<TopologyViolation> },
    #[error(
        "decoupling FIFO {key} overflows: needs {needed} but capacity is {capacity}"
    )]
    FifoOverflow {
        key: String,
        needed: Bytes,
        capacity: Bytes,
    },
    #[error("pipeline {pipeline} has no round {round} in the timeline")]
    MissingRound { pipeline: String, round: u32 },
    #[error("no decoupling buffer recorded for route {key}")]
    UnknownRoute { key: String },
}

/// How long to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimDuration {
    /// Number of processing rounds.
    Rounds(u32),
    /// Wall-clock span, rounded up to whole rounds.
    Span(Seconds),
}

/// Simulation inputs beyond the scenario itself.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub mode: ExecMode,
    pub params: ScheduleParams,
    pub duration: SimDuration,
    /// Output of [`crate::assign::plan_round`]: one plan per pipeline for
    /// the first round plus the wrap-around transition.
    pub plans: Vec<TransitionPlan>,
    /// Decoupling FIFO capacity in frames; the worst case a staggered
    /// start can need is one full frame.
    pub fifo_capacity_frames: f64,
}

impl SimConfig {
    pub fn new(mode: ExecMode, params: ScheduleParams, rounds: u32, plans: Vec<TransitionPlan>) -> Self {
        SimConfig {
            mode,
            params,
            duration: SimDuration::Rounds(rounds),
            plans,
            fifo_capacity_frames: 1.0,
        }
    }
}

/// Key under which a decoupling FIFO's high-water mark is recorded.
pub fn route_key(pipeline: &str, from: &str, to: &str) -> String {
    format!("{pipeline}:{from}->{to}")
}

struct PipelineShape {
    topo: Vec<String>,
    /// Predecessor stage ids per stage (camera excluded).
    preds: BTreeMap<String, Vec<String>>,
    fills: BTreeMap<String, Seconds>,
    sink: String,
    source_stages: Vec<String>,
}

fn shape_of(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Result<PipelineShape, SimError> {
    pipeline.validate(modules)?;
    let topo = pipeline.topo_order()?;
    let mut preds = BTreeMap::new();
    let mut fills = BTreeMap::new();
    let mut source_stages = Vec::new();
    for stage_id in &topo {
        let ups: Vec<String> = pipeline
            .upstream_of(stage_id)
            .into_iter()
            .map(str::to_string)
            .collect();
        if ups.is_empty() {
            source_stages.push(stage_id.clone());
        }
        preds.insert(stage_id.clone(), ups);
        let module = modules[pipeline.stage(stage_id).expect("validated").module.as_str()];
        fills.insert(
            stage_id.clone(),
            fill_time(module, format, platform.fabric_clock),
        );
    }
    let sink = pipeline
        .edges
        .iter()
        .find(|e| e.to == DISPLAY)
        .expect("validated pipeline has a display edge")
        .from
        .clone();
    Ok(PipelineShape {
        topo,
        preds,
        fills,
        sink,
        source_stages,
    })
}

/// Bandwidth bookkeeping: piecewise-constant contributions to the DRAM.
struct DramLedger {
    /// (start, end, rate) byte-rate segments.
    segments: Vec<(Seconds, Seconds, BytesPerSec)>,
    /// Activity spans of decoupling FIFO connections.
    fifo_spans: Vec<(Seconds, Seconds)>,
}

impl DramLedger {
    fn new() -> Self {
        DramLedger {
            segments: Vec::new(),
            fifo_spans: Vec::new(),
        }
    }

    fn add(&mut self, start: Seconds, end: Seconds, rate: BytesPerSec) {
        if end > start && rate.0 > 0.0 {
            self.segments.push((start, end, rate));
        }
    }

    fn peak_bandwidth(&self) -> BytesPerSec {
        let mut edges: Vec<(Seconds, f64)> = Vec::with_capacity(self.segments.len() * 2);
        for (start, end, rate) in &self.segments {
            edges.push((*start, rate.0));
            edges.push((*end, -rate.0));
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut level = 0.0;
        let mut peak = 0.0f64;
        for (_, delta) in edges {
            level += delta;
            peak = peak.max(level);
        }
        BytesPerSec(peak)
    }

    fn peak_streams(&self) -> u32 {
        let mut edges: Vec<(Seconds, i32)> = Vec::with_capacity(self.fifo_spans.len() * 2);
        for (start, end) in &self.fifo_spans {
            edges.push((*start, 1));
            edges.push((*end, -1));
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut level: i32 = 0;
        let mut peak: i32 = 0;
        for (_, delta) in edges {
            level += delta;
            peak = peak.max(level);
        }
        // Camera and display double-buffer connections are always live.
        peak as u32 + 2
    }
}

/// Runs the scenario and returns its complete timeline.
///
/// Semantics: reconfigurations are strictly serialized through the one
/// configuration port. In basic mode a pipeline starts only after all
/// its reconfigurations end; in staggered mode each stage starts at the
/// later of its own reconfiguration end and its upstream stage's first
/// output, with early output absorbed by a thru-DRAM circular buffer.
/// Each pipeline processes `g` buffered frames per timeslice; camera
/// frames are double-buffered, so each round processes the (downsampled)
/// frames captured during the previous round. The first pipeline's
/// initial configuration happens during the warm-up round while the
/// first frames are captured.
pub fn simulate(
    platform: &PlatformSpec,
    format: &VideoFormat,
    modules: &BTreeMap<&str, &ModuleSpec>,
    pipelines: &[&PipelineSpec],
    config: &SimConfig,
) -> Result<Timeline, SimError> {
    format.validate()?;
    platform.validate(format)?;
    config.params.validate()?;
    let n = pipelines.len();
    if n > 0 && config.plans.len() != n + 1 {
        return Err(SimError::PlanCountMismatch {
            expected: n + 1,
            got: config.plans.len(),
        });
    }
    for (index, plan) in config.plans.iter().enumerate() {
        let running = pipelines[index % n].id.as_str();
        if plan.pipeline != running {
            return Err(SimError::PlanTargetMismatch {
                index,
                planned: plan.pipeline.clone(),
                running: running.to_string(),
            });
        }
        for rp in plan.assignment.values() {
            if platform.rp(rp).is_none() {
                return Err(SimError::UnknownRp { rp: rp.clone() });
            }
        }
    }

    let g = config.params.g;
    let s = config.params.s;
    let quantum = round_quantum(format, config.params);
    let rounds = match config.duration {
        SimDuration::Rounds(r) => r.max(1),
        SimDuration::Span(span) => ((span / quantum).ceil() as u32).max(1),
    };
    let frame_period = format.frame_period();
    let solo_rate = platform.solo_pixel_rate(format);
    let t_frame = format.active_stream_time(solo_rate);
    let bundle_time = t_frame * g as f64;
    let stream_rate = BytesPerSec(solo_rate.0 * format.bytes_per_pixel as f64);
    let io_rate = BytesPerSec(format.frame_bytes().0 * format.fps);
    let fifo_capacity = format.frame_bytes() * config.fifo_capacity_frames;

    let mut shapes = Vec::with_capacity(n);
    for pipeline in pipelines {
        shapes.push(shape_of(pipeline, modules, format, platform)?);
        for stage in &pipelines[shapes.len() - 1].stages {
            let plan = &config.plans[shapes.len() - 1];
            if !plan.assignment.contains_key(&stage.id) {
                return Err(SimError::StageUnassigned {
                    pipeline: pipeline.id.clone(),
                    stage: stage.id.clone(),
                });
            }
        }
    }

    let mut events: Vec<Event> = Vec::new();
    let mut glitches: Vec<Glitch> = Vec::new();
    let mut ledger = DramLedger::new();
    let mut high_water: BTreeMap<String, Bytes> = BTreeMap::new();
    let mut stats: BTreeMap<String, PipelineStats> = pipelines
        .iter()
        .map(|p| (p.id.clone(), PipelineStats::default()))
        .collect();
    let mut latency_sums: BTreeMap<String, Seconds> = BTreeMap::new();

    // Camera capture. Frame k's last pixel lands at (k+1) frame periods;
    // every frame is captured, every s-th is passed on to processing.
    let capture_count = rounds as u64 * (g as u64) * (s as u64);
    for k in 0..capture_count {
        events.push(Event {
            time: frame_period * (k + 1) as f64,
            kind: EventKind::CameraFrameCaptured { frame: k },
        });
    }

    let mut fabric = FabricState::from_platform(platform);

    // Warm-up: the first pipeline's partitions are configured while the
    // first round of frames is captured, so round 1 can start processing
    // at its quantum boundary.
    let mut warmup_end = Seconds::ZERO;
    if n > 0 {
        let plan = &config.plans[0];
        let shape = &shapes[0];
        let mut cursor = Seconds::ZERO;
        for stage_id in &shape.topo {
            let rp_id = &plan.assignment[stage_id];
            let module = &pipelines[0].stage(stage_id).expect("validated").module;
            if fabric.loaded(rp_id) != Some(module.as_str()) {
                let rp = platform.rp(rp_id).expect("validated");
                events.push(Event {
                    time: cursor,
                    kind: EventKind::ReconfigStart {
                        rp: rp_id.clone(),
                        module: module.clone(),
                        pipeline: pipelines[0].id.clone(),
                        round: 0,
                    },
                });
                cursor += reconfig_time(rp, platform);
                events.push(Event {
                    time: cursor,
                    kind: EventKind::ReconfigEnd {
                        rp: rp_id.clone(),
                        module: module.clone(),
                        pipeline: pipelines[0].id.clone(),
                        round: 0,
                    },
                });
                fabric.load(rp_id, module);
            }
        }
        warmup_end = cursor;
    }

    let mut work_end = warmup_end;
    for round in 1..=rounds {
        let round_start = (quantum * round as f64).max(work_end);
        let deadline = quantum * (round + 1) as f64;
        let mut cursor = round_start;
        let mut round_frames: Vec<(String, u64, Seconds)> = Vec::new();

        for (i, pipeline) in pipelines.iter().enumerate() {
            let plan = if round == 1 {
                &config.plans[i]
            } else if i == 0 {
                &config.plans[n]
            } else {
                &config.plans[i]
            };
            let shape = &shapes[i];

            // Switch software cost: module/DMA setup plus crossbar
            // reroute; elapses before the timeslice proper begins.
            cursor += platform.switch_overhead + plan.route_config_time;
            let slice_start = cursor;
            events.push(Event {
                time: slice_start,
                kind: EventKind::PipelineSwitch {
                    pipeline: pipeline.id.clone(),
                    round,
                },
            });

            // Serialized reconfiguration in first-to-last stage order,
            // derived from the live fabric so retained modules are never
            // reloaded.
            let mut ready: BTreeMap<&str, Seconds> = BTreeMap::new();
            let mut config_cursor = slice_start;
            for stage_id in &shape.topo {
                let rp_id = &plan.assignment[stage_id];
                let module = &pipeline.stage(stage_id).expect("validated").module;
                if fabric.loaded(rp_id) != Some(module.as_str()) {
                    let rp = platform.rp(rp_id).ok_or_else(|| SimError::UnknownRp {
                        rp: rp_id.clone(),
                    })?;
                    events.push(Event {
                        time: config_cursor,
                        kind: EventKind::ReconfigStart {
                            rp: rp_id.clone(),
                            module: module.clone(),
                            pipeline: pipeline.id.clone(),
                            round,
                        },
                    });
                    config_cursor += reconfig_time(rp, platform);
                    events.push(Event {
                        time: config_cursor,
                        kind: EventKind::ReconfigEnd {
                            rp: rp_id.clone(),
                            module: module.clone(),
                            pipeline: pipeline.id.clone(),
                            round,
                        },
                    });
                    fabric.load(rp_id, module);
                    ready.insert(stage_id.as_str(), config_cursor);
                }
            }
            let config_end = config_cursor;

            // Fluid stage schedule.
            let mut start_of: BTreeMap<&str, Seconds> = BTreeMap::new();
            let mut first_out: BTreeMap<&str, Seconds> = BTreeMap::new();
            let mut decoupled: Vec<(&str, &str)> = Vec::new();
            for stage_id in &shape.topo {
                let preds = &shape.preds[stage_id];
                let input_avail = if preds.is_empty() {
                    // Source stages read the camera double-buffer, which
                    // already holds the whole bundle.
                    slice_start
                } else {
                    preds
                        .iter()
                        .map(|u| first_out[u.as_str()])
                        .fold(Seconds::ZERO, Seconds::max)
                };
                let stage_ready = match config.mode {
                    ExecMode::Basic => config_end,
                    ExecMode::Staggered => {
                        ready.get(stage_id.as_str()).copied().unwrap_or(slice_start)
                    }
                };
                let start = stage_ready.max(input_avail);
                if config.mode == ExecMode::Staggered {
                    for u in preds {
                        if stage_ready > first_out[u.as_str()] + TICK {
                            decoupled.push((u.as_str(), stage_id.as_str()));
                            let held = (start - first_out[u.as_str()]).min(bundle_time);
                            let needed = stream_rate * held;
                            let key = route_key(&pipeline.id, u, stage_id);
                            if needed > fifo_capacity {
                                return Err(SimError::FifoOverflow {
                                    key,
                                    needed,
                                    capacity: fifo_capacity,
                                });
                            }
                            let entry = high_water.entry(key).or_insert(Bytes::ZERO);
                            *entry = entry.max(needed);
                            let upstream_out = first_out[u.as_str()];
                            ledger.add(upstream_out, upstream_out + bundle_time, stream_rate);
                            ledger.add(start, start + bundle_time, stream_rate);
                            ledger
                                .fifo_spans
                                .push((upstream_out, start + bundle_time));
                        }
                    }
                }
                let rp_id = plan.assignment[stage_id].clone();
                let out = start + shape.fills[stage_id];
                events.push(Event {
                    time: start,
                    kind: EventKind::StageStarted {
                        pipeline: pipeline.id.clone(),
                        stage: stage_id.clone(),
                        rp: rp_id.clone(),
                        round,
                    },
                });
                events.push(Event {
                    time: out,
                    kind: EventKind::StageFirstPixelOut {
                        pipeline: pipeline.id.clone(),
                        stage: stage_id.clone(),
                        rp: rp_id.clone(),
                        round,
                    },
                });
                for j in 0..g {
                    let frame = (round as u64 - 1) * g as u64 * s as u64 + j as u64 * s as u64;
                    events.push(Event {
                        time: out + t_frame * (j + 1) as f64,
                        kind: EventKind::StageFrameDone {
                            pipeline: pipeline.id.clone(),
                            stage: stage_id.clone(),
                            rp: rp_id.clone(),
                            frame,
                            round,
                        },
                    });
                }
                start_of.insert(stage_id.as_str(), start);
                first_out.insert(stage_id.as_str(), out);
            }

            // Staggered decoupling must fit the DMA and stream budgets.
            if config.mode == ExecMode::Staggered {
                let routes: Vec<_> = plan
                    .routes
                    .iter()
                    .map(|r| {
                        let mut route = r.clone();
                        if decoupled
                            .iter()
                            .any(|(u, v)| *u == route.edge.from && *v == route.edge.to)
                        {
                            route.kind = RouteKind::ThruDram;
                        }
                        route
                    })
                    .collect();
                let violations = validate_topology(&routes, format, platform);
                if !violations.is_empty() {
                    return Err(SimError::Topology { violations });
                }
            }

            // Camera-buffer reads and display-buffer writes during the
            // bundle streaming window.
            for src in &shape.source_stages {
                let start = start_of[src.as_str()];
                ledger.add(start, start + bundle_time, stream_rate);
            }
            let sink_out = first_out[shape.sink.as_str()];
            ledger.add(sink_out, sink_out + bundle_time, stream_rate);

            for j in 0..g {
                let frame = (round as u64 - 1) * g as u64 * s as u64 + j as u64 * s as u64;
                let done = sink_out + t_frame * (j + 1) as f64;
                events.push(Event {
                    time: done,
                    kind: EventKind::PipelineFrameDone {
                        pipeline: pipeline.id.clone(),
                        frame,
                        round,
                    },
                });
                round_frames.push((pipeline.id.clone(), frame, done));
            }
            let done = sink_out + bundle_time;
            let stat = stats.get_mut(&pipeline.id).expect("stats preallocated");
            stat.frames_processed += g as u64;
            stat.slice_durations.push(done - slice_start);

            fabric.touch_all(plan.assignment.values().map(String::as_str));
            cursor = done;
        }

        work_end = cursor;
        events.push(Event {
            time: work_end,
            kind: EventKind::RoundEnd { round },
        });
        if work_end > deadline + TICK {
            events.push(Event {
                time: work_end,
                kind: EventKind::DeadlineMiss {
                    round,
                    overrun: work_end - deadline,
                },
            });
            glitches.push(Glitch {
                round,
                finished_at: work_end,
                overrun: work_end - deadline,
            });
        } else {
            for (pipeline, frame, done) in &round_frames {
                let stat = stats.get_mut(pipeline).expect("stats preallocated");
                stat.on_time_frames += 1;
                let captured = frame_period * (frame + 1) as f64;
                *latency_sums.entry(pipeline.clone()).or_insert(Seconds::ZERO) +=
                    *done - captured;
            }
        }
    }

    // Camera write and display read run for the whole horizon.
    let horizon = work_end.max(quantum * (rounds as f64 + 1.0));
    ledger.add(Seconds::ZERO, horizon, io_rate);
    ledger.add(Seconds::ZERO, horizon, io_rate);

    let span = quantum * rounds as f64;
    for (id, stat) in stats.iter_mut() {
        stat.achieved_fps = stat.on_time_frames as f64 / span.0;
        if stat.on_time_frames > 0 {
            stat.mean_latency =
                latency_sums.get(id).copied().unwrap_or(Seconds::ZERO) / stat.on_time_frames as f64;
        }
    }

    events.sort_by(Event::sort_cmp);
    Ok(Timeline {
        events,
        per_pipeline: stats,
        glitches,
        peak_dram_streams: ledger.peak_streams(),
        peak_dram_bandwidth: ledger.peak_bandwidth(),
        buffer_high_water: high_water,
        round_quantum: quantum,
        rounds,
    })
}

/// Duration from the pipeline's switch to its last frame completion in
/// the given round, measured from the event record.
pub fn measured_slice(timeline: &Timeline, pipeline: &str, round: u32) -> Result<Seconds, SimError> {
    let mut switch = None;
    let mut last_done = None;
    for event in &timeline.events {
        match &event.kind {
            EventKind::PipelineSwitch { pipeline: p, round: r }
                if p == pipeline && *r == round =>
            {
                switch = Some(event.time);
            }
            EventKind::PipelineFrameDone { pipeline: p, round: r, .. }
                if p == pipeline && *r == round =>
            {
                last_done = Some(event.time);
            }
            _ => {}
        }
    }
    match (switch, last_done) {
        (Some(t0), Some(t1)) => Ok(t1 - t0),
        _ => Err(SimError::MissingRound {
            pipeline: pipeline.to_string(),
            round,
        }),
    }
}

/// Highest occupancy observed on a decoupling FIFO, by route key
/// (see [`route_key`]).
pub fn buffer_high_water(timeline: &Timeline, key: &str) -> Result<Bytes, SimError> {
    timeline
        .buffer_high_water
        .get(key)
        .copied()
        .ok_or_else(|| SimError::UnknownRoute {
            key: key.to_string(),
        })
}
