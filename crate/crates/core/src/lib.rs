//! Schedule planner and discrete-event simulator for round-robin
//! time-sharing of streaming vision pipelines on a dynamically partially
//! reconfigurable fabric.
//!
//! The crate models a fabric of reconfigurable partitions fed by a
//! camera and draining to a display. Multiple pipelines time-share the
//! fabric at frame granularity: each round, every pipeline gets a
//! timeslice in which its partitions are reconfigured (serially, through
//! the single configuration port) and a bundle of buffered frames is
//! streamed through it. The analytical model ([`perf`]) decides
//! feasibility; the planner ([`assign`]) minimizes reconfigurations by
//! retaining resident stages and rerouting the streaming crossbar; the
//! simulator ([`sim`]) replays a schedule event by event and reports
//! achieved frame rates, buffer occupancies, and quantum overruns.

pub mod assign;
pub mod model;
pub mod perf;
pub mod pipeline;
pub mod render;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod timeline;
pub mod units;

pub use model::{
    ExecMode, ModelError, ModuleSpec, PlatformSpec, ResourceVector, RpSpec, ScheduleParams,
    VideoFormat,
};
pub use pipeline::{EdgeSpec, PipelineError, PipelineSpec, StageSpec};
pub use units::{Bytes, BytesPerSec, Hertz, Seconds};

/// JSON encoding for report and plan values exposed on the CLI.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}
