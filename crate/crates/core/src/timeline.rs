//! Simulation output: ordered events, per-pipeline statistics, glitch
//! records, and DRAM usage peaks, with a line-delimited export format.

use crate::units::{Bytes, BytesPerSec, Seconds};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// What happened at one instant of the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// The camera finished capturing frame `frame` into its double-buffer.
    CameraFrameCaptured { frame: u64 },
    ReconfigStart {
        rp: String,
        module: String,
        pipeline: String,
        round: u32,
    },
    ReconfigEnd {
        rp: String,
        module: String,
        pipeline: String,
        round: u32,
    },
    /// First input pixel consumed by the stage in this timeslice.
    StageStarted {
        pipeline: String,
        stage: String,
        rp: String,
        round: u32,
    },
    StageFirstPixelOut {
        pipeline: String,
        stage: String,
        rp: String,
        round: u32,
    },
    /// Last pixel of `frame` left the stage.
    StageFrameDone {
        pipeline: String,
        stage: String,
        rp: String,
        frame: u64,
        round: u32,
    },
    /// The pipeline's output of `frame` is complete in the display
    /// double-buffer.
    PipelineFrameDone {
        pipeline: String,
        frame: u64,
        round: u32,
    },
    /// The fabric handoff to this pipeline completed; its timeslice
    /// proper begins (switch software cost has already elapsed).
    PipelineSwitch { pipeline: String, round: u32 },
    RoundEnd { round: u32 },
    /// The round's work finished after its quantum deadline.
    DeadlineMiss { round: u32, overrun: Seconds },
}

impl EventKind {
    // At coincident timestamps, completions order before the starts they
    // enable (a serialized reconfiguration chain ends one load exactly
    // where the next begins).
    fn rank(&self) -> u8 {
        match self {
            EventKind::CameraFrameCaptured { .. } => 0,
            EventKind::ReconfigEnd { .. } => 1,
            EventKind::PipelineSwitch { .. } => 2,
            EventKind::ReconfigStart { .. } => 3,
            EventKind::StageStarted { .. } => 4,
            EventKind::StageFirstPixelOut { .. } => 5,
            EventKind::StageFrameDone { .. } => 6,
            EventKind::PipelineFrameDone { .. } => 7,
            EventKind::DeadlineMiss { .. } => 8,
            EventKind::RoundEnd { .. } => 9,
        }
    }

    fn tie_key(&self) -> (String, String, u64) {
        match self {
            EventKind::CameraFrameCaptured { frame } => (String::new(), String::new(), *frame),
            EventKind::ReconfigStart { pipeline, rp, .. }
            | EventKind::ReconfigEnd { pipeline, rp, .. } => (pipeline.clone(), rp.clone(), 0),
            EventKind::StageStarted {
                pipeline, stage, ..
            }
            | EventKind::StageFirstPixelOut {
                pipeline, stage, ..
            } => (pipeline.clone(), stage.clone(), 0),
            EventKind::StageFrameDone {
                pipeline,
                stage,
                frame,
                ..
            } => (pipeline.clone(), stage.clone(), *frame),
            EventKind::PipelineFrameDone {
                pipeline, frame, ..
            } => (pipeline.clone(), String::new(), *frame),
            EventKind::PipelineSwitch { pipeline, .. } => {
                (pipeline.clone(), String::new(), 0)
            }
            EventKind::RoundEnd { round } | EventKind::DeadlineMiss { round, .. } => {
                (String::new(), String::new(), *round as u64)
            }
        }
    }
}

/// A timestamped simulation event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: Seconds,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    /// Deterministic total order: time, then kind, then subject ids.
    pub fn sort_cmp(&self, other: &Event) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.rank().cmp(&other.kind.rank()))
            .then_with(|| self.kind.tie_key().cmp(&other.kind.tie_key()))
    }
}

/// Per-pipeline aggregate results.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineStats {
    pub frames_processed: u64,
    /// Frames whose round met its deadline.
    pub on_time_frames: u64,
    pub achieved_fps: f64,
    /// Switch-to-last-frame-done duration of each processing round.
    pub slice_durations: Vec<Seconds>,
    /// Mean capture-to-display-eligible latency, including the input
    /// double-buffering delay of the bundled-frame schedule.
    pub mean_latency: Seconds,
}

/// A round that finished past its quantum deadline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glitch {
    pub round: u32,
    pub finished_at: Seconds,
    pub overrun: Seconds,
}

/// Complete, deterministic record of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub events: Vec<Event>,
    pub per_pipeline: BTreeMap<String, PipelineStats>,
    pub glitches: Vec<Glitch>,
    pub peak_dram_streams: u32,
    pub peak_dram_bandwidth: BytesPerSec,
    /// Highest observed occupancy of each decoupling FIFO, keyed as
    /// `"{pipeline}:{from}->{to}"`.
    pub buffer_high_water: BTreeMap<String, Bytes>,
    pub round_quantum: Seconds,
    pub rounds: u32,
}

#[derive(Debug, Error)]
pub enum TimelineCodecError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("missing trailing summary record")]
    MissingSummary,
}

#[derive(Serialize, Deserialize)]
struct SummaryRecord {
    summary: SummaryBody,
}

#[derive(Serialize, Deserialize)]
struct SummaryBody {
    per_pipeline: BTreeMap<String, PipelineStats>,
    glitches: Vec<Glitch>,
    peak_dram_streams: u32,
    peak_dram_bandwidth: BytesPerSec,
    buffer_high_water: BTreeMap<String, Bytes>,
    round_quantum: Seconds,
    rounds: u32,
}

impl Timeline {
    /// One JSON record per event, then one aggregate summary record.
    /// The schema is stable; [`Timeline::from_ndjson`] is its inverse.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("event serializes"));
            out.push('\n');
        }
        let summary = SummaryRecord {
            summary: SummaryBody {
                per_pipeline: self.per_pipeline.clone(),
                glitches: self.glitches.clone(),
                peak_dram_streams: self.peak_dram_streams,
                peak_dram_bandwidth: self.peak_dram_bandwidth,
                buffer_high_water: self.buffer_high_water.clone(),
                round_quantum: self.round_quantum,
                rounds: self.rounds,
            },
        };
        out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn from_ndjson(input: &str) -> Result<Timeline, TimelineCodecError> {
        let mut events = Vec::new();
        let mut summary: Option<SummaryBody> = None;
        for (i, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            if line.contains("\"summary\"") {
                if let Ok(record) = serde_json::from_str::<SummaryRecord>(line) {
                    summary = Some(record.summary);
                    continue;
                }
            }
            let event: Event = serde_json::from_str(line)
                .map_err(|source| TimelineCodecError::Parse { line: i + 1, source })?;
            events.push(event);
        }
        let s = summary.ok_or(TimelineCodecError::MissingSummary)?;
        Ok(Timeline {
            events,
            per_pipeline: s.per_pipeline,
            glitches: s.glitches,
            peak_dram_streams: s.peak_dram_streams,
            peak_dram_bandwidth: s.peak_dram_bandwidth,
            buffer_high_water: s.buffer_high_water,
            round_quantum: s.round_quantum,
            rounds: s.rounds,
        })
    }
}
