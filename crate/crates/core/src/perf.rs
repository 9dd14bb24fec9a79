//! Closed-form performance model for round-robin time-sharing: stage and
//! pipeline fill times, partition reconfiguration times, timeslice
//! budgets under basic and staggered execution, round quanta with frame
//! bundling and downsampling, and schedule feasibility.

use crate::model::{ModuleSpec, PlatformSpec, RpSpec, ScheduleParams, VideoFormat};
use crate::pipeline::{PipelineError, PipelineSpec};
use crate::units::{Hertz, Seconds};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Scheduling quantum of one full round-robin cycle: `g * s` camera frame
/// periods.
pub fn round_quantum(format: &VideoFormat, params: ScheduleParams) -> Seconds {
    format.frame_period() * (params.g as f64 * params.s as f64)
}

/// Delay between the first pixel of a frame entering a stage and the
/// first pixel exiting it, due to line buffering.
pub fn fill_time(module: &ModuleSpec, format: &VideoFormat, clock: Hertz) -> Seconds {
    (module.buffer_lines as f64 * format.width as f64) / clock
}

/// Reconfiguration time of a partition: linear in its bitstream size at
/// the configuration port throughput.
pub fn reconfig_time(rp: &RpSpec, platform: &PlatformSpec) -> Seconds {
    rp.bitstream_bytes / platform.pcap_throughput
}

/// Fill delay of a whole pipeline: the maximum over camera-to-display
/// paths of the stage fill times along the path (parallel branches fill
/// concurrently).
pub fn pipeline_fill_time(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    format: &VideoFormat,
    clock: Hertz,
) -> Result<Seconds, PipelineError> {
    let order = pipeline.topo_order()?;
    let mut done_at: BTreeMap<&str, Seconds> = BTreeMap::new();
    let mut max_total = Seconds::ZERO;
    for stage_id in &order {
        let stage = pipeline.stage(stage_id).expect("stage in topo order");
        let module = modules
            .get(stage.module.as_str())
            .ok_or_else(|| PipelineError::UnknownModule {
                pipeline: pipeline.id.clone(),
                stage: stage_id.clone(),
                module: stage.module.clone(),
            })?;
        let arrive = pipeline
            .upstream_of(stage_id)
            .iter()
            .map(|u| done_at[u])
            .fold(Seconds::ZERO, Seconds::max);
        let done = arrive + fill_time(module, format, clock);
        max_total = max_total.max(done);
        done_at.insert(stage.id.as_str(), done);
    }
    Ok(max_total)
}

/// Per-stage timing components used by the timeslice bound formulas, in
/// reconfiguration order (first stage reconfigured first).
#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: String,
    /// Reconfiguration time of the partition loaded for this stage in
    /// this transition; zero when the stage is retained.
    pub config: Seconds,
    pub fill: Seconds,
    /// Time for this stage to stream one frame solo against DRAM.
    pub frame: Seconds,
}

/// Timeslice estimate for one pipeline: components plus the basic-mode
/// budget and the three staggered-start bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceEstimate {
    pub pipeline: String,
    /// Total reconfiguration time for this transition; partitions
    /// reconfigure one after the other through the single configuration
    /// port, so individual times add.
    pub t_config: Seconds,
    pub t_fill: Seconds,
    pub t_frame: Seconds,
    /// Basic execution: configure everything, then fill, then stream.
    pub basic_slice: Seconds,
    /// Staggered-start upper bound; identical in form to `basic_slice`.
    pub staggered_upper: Seconds,
    /// Lower bound using only the last stage's fill and frame time.
    pub staggered_lower_simple: Seconds,
    /// Per-stage lower bound: the max over stages of that stage's
    /// serialized-configuration prefix plus its own fill and frame time.
    pub staggered_lower_tight: Seconds,
}

impl SliceEstimate {
    /// Builds an estimate from per-stage components listed in
    /// reconfiguration order. `t_fill` is the pipeline fill (max over
    /// paths), which can be below the sum of stage fills on forked
    /// topologies.
    pub fn from_stage_timings(
        pipeline: &str,
        timings: &[StageTiming],
        pipeline_fill: Seconds,
    ) -> SliceEstimate {
        let t_config: Seconds = timings.iter().map(|t| t.config).sum();
        let t_frame = timings.last().map(|t| t.frame).unwrap_or(Seconds::ZERO);
        let basic = t_config + pipeline_fill + t_frame;
        let last = timings.last();
        let lower_simple = t_config
            + last.map(|t| t.fill).unwrap_or(Seconds::ZERO)
            + last.map(|t| t.frame).unwrap_or(Seconds::ZERO);
        let mut prefix = Seconds::ZERO;
        let mut lower_tight = Seconds::ZERO;
        for t in timings {
            prefix += t.config;
            lower_tight = lower_tight.max(prefix + t.fill + t.frame);
        }
        SliceEstimate {
            pipeline: pipeline.to_string(),
            t_config,
            t_fill: pipeline_fill,
            t_frame,
            basic_slice: basic,
            staggered_upper: basic,
            staggered_lower_simple: lower_simple,
            staggered_lower_tight: lower_tight,
        }
    }
}

/// Timeslice with `g` frames bundled per round: configuration and fill
/// are paid once, streaming `g` times.
pub fn slice_amortized(slice: &SliceEstimate, g: u32) -> Seconds {
    slice.t_config + slice.t_fill + slice.t_frame * g as f64
}

/// Staggered lower bound generalized to a `g`-frame bundle.
pub fn staggered_lower_tight_amortized(timings: &[StageTiming], g: u32) -> Seconds {
    let mut prefix = Seconds::ZERO;
    let mut bound = Seconds::ZERO;
    for t in timings {
        prefix += t.config;
        bound = bound.max(prefix + t.fill + t.frame * g as f64);
    }
    bound
}

fn stage_timings_inner(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    config_for: impl Fn(&str) -> Seconds,
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Result<Vec<StageTiming>, PipelineError> {
    let t_frame = platform.solo_frame_time(format);
    let order = pipeline.topo_order()?;
    order
        .iter()
        .map(|stage_id| {
            let stage = pipeline.stage(stage_id).expect("stage in topo order");
            let module = modules
                .get(stage.module.as_str())
                .ok_or_else(|| PipelineError::UnknownModule {
                    pipeline: pipeline.id.clone(),
                    stage: stage_id.clone(),
                    module: stage.module.clone(),
                })?;
            Ok(StageTiming {
                stage: stage_id.clone(),
                config: config_for(stage_id),
                fill: fill_time(module, format, platform.fabric_clock),
                frame: t_frame,
            })
        })
        .collect()
}

/// Per-stage timings with reconfiguration attributed to specific stages
/// (stage id -> partition loaded for it). Stages absent from the map are
/// retained and pay no configuration time.
pub fn stage_timings(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    reconfigured: &BTreeMap<String, &RpSpec>,
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Result<Vec<StageTiming>, PipelineError> {
    stage_timings_inner(
        pipeline,
        modules,
        |stage| {
            reconfigured
                .get(stage)
                .map(|rp| reconfig_time(rp, platform))
                .unwrap_or(Seconds::ZERO)
        },
        format,
        platform,
    )
}

/// Basic-mode timeslice: all reconfigurations complete first (their times
/// add over the serial configuration port), then the pipeline fills and
/// streams one frame solo against DRAM.
///
/// The staggered bound fields assume nothing about which stages the
/// reconfigurations map to, so the tight lower bound degenerates to the
/// simple one.
pub fn slice_basic(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    reconfigured_rps: &[&RpSpec],
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Result<SliceEstimate, PipelineError> {
    let t_config: Seconds = reconfigured_rps
        .iter()
        .map(|rp| reconfig_time(rp, platform))
        .sum();
    let timings = stage_timings_inner(pipeline, modules, |_| Seconds::ZERO, format, platform)?;
    let t_fill = pipeline_fill_time(pipeline, modules, format, platform.fabric_clock)?;
    let mut est = SliceEstimate::from_stage_timings(&pipeline.id, &timings, t_fill);
    est.t_config = t_config;
    est.basic_slice = t_config + est.t_fill + est.t_frame;
    est.staggered_upper = est.basic_slice;
    est.staggered_lower_simple = t_config + est.staggered_lower_simple;
    est.staggered_lower_tight = est.staggered_lower_simple;
    Ok(est)
}

/// Staggered-start timeslice bounds with reconfigurations attributed to
/// stages and serialized in first-to-last stage order.
pub fn slice_staggered_bounds(
    pipeline: &PipelineSpec,
    modules: &BTreeMap<&str, &ModuleSpec>,
    reconfigured: &BTreeMap<String, &RpSpec>,
    format: &VideoFormat,
    platform: &PlatformSpec,
) -> Result<SliceEstimate, PipelineError> {
    let timings = stage_timings(pipeline, modules, reconfigured, format, platform)?;
    let t_fill = pipeline_fill_time(pipeline, modules, format, platform.fabric_clock)?;
    Ok(SliceEstimate::from_stage_timings(
        &pipeline.id,
        &timings,
        t_fill,
    ))
}

/// One pipeline's inputs to a feasibility check: the pipeline and the
/// partitions reconfigured on each switch to it.
pub struct FeasibilityInput<'a> {
    pub pipeline: &'a PipelineSpec,
    pub reconfigured: Vec<&'a RpSpec>,
}

/// Outcome of the round-robin schedulability test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub params: ScheduleParams,
    pub round_quantum: Seconds,
    pub slices: Vec<SliceEstimate>,
    /// Per-switch software costs (interconnect, module and DMA setup)
    /// summed over all pipelines; included in `total`.
    pub switch_total: Seconds,
    /// Sum of amortized slices plus switch costs.
    pub total: Seconds,
    pub feasible: bool,
    /// `round_quantum - total`; negative when infeasible.
    pub slack: Seconds,
    /// Frame rate each pipeline sustains: `fps / s` when feasible, else 0.
    pub effective_fps: f64,
}

/// Per-switch software cost for a pipeline: the platform's fixed switch
/// overhead plus the crossbar configuration time for its links.
pub fn switch_cost(pipeline: &PipelineSpec, platform: &PlatformSpec) -> Seconds {
    platform.switch_overhead + platform.route_config_per_link * pipeline.link_count() as f64
}

/// Round-robin feasibility: the sum over pipelines of switch cost plus
/// the amortized timeslice must fit within the round quantum
/// `g * s * T_frame`. Infeasibility is a value, not an error.
pub fn check_feasibility(
    inputs: &[FeasibilityInput<'_>],
    modules: &BTreeMap<&str, &ModuleSpec>,
    format: &VideoFormat,
    platform: &PlatformSpec,
    params: ScheduleParams,
) -> Result<FeasibilityReport, PipelineError> {
    let quantum = round_quantum(format, params);
    let mut slices = Vec::with_capacity(inputs.len());
    let mut total = Seconds::ZERO;
    let mut switch_total = Seconds::ZERO;
    for input in inputs {
        let est = slice_basic(input.pipeline, modules, &input.reconfigured, format, platform)?;
        let sw = switch_cost(input.pipeline, platform);
        switch_total += sw;
        total += sw + slice_amortized(&est, params.g);
        slices.push(est);
    }
    let feasible = total <= quantum;
    Ok(FeasibilityReport {
        params,
        round_quantum: quantum,
        slices,
        switch_total,
        total,
        feasible,
        slack: quantum - total,
        effective_fps: if feasible {
            format.fps / params.s as f64
        } else {
            0.0
        },
    })
}

/// Smallest downsample divisor `s >= 1` making the schedule feasible at
/// the given bundle factor. Slices do not depend on `s` while the
/// quantum grows linearly with it, so the result is always finite.
pub fn min_downsample(
    inputs: &[FeasibilityInput<'_>],
    modules: &BTreeMap<&str, &ModuleSpec>,
    format: &VideoFormat,
    platform: &PlatformSpec,
    g: u32,
) -> Result<u32, PipelineError> {
    let mut s = 1;
    loop {
        let report = check_feasibility(
            inputs,
            modules,
            format,
            platform,
            ScheduleParams::new(g, s),
        )?;
        if report.feasible {
            return Ok(s);
        }
        s += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ResourceVector;
    use crate::units::Bytes;

    fn close(a: Seconds, b_ms: f64, rel: f64) -> bool {
        (a.as_millis() - b_ms).abs() <= rel * b_ms.abs().max(1e-12)
    }

    fn module(id: &str, lines: u32) -> ModuleSpec {
        ModuleSpec {
            id: id.to_string(),
            buffer_lines: lines,
            demand: ResourceVector::default(),
            in_ports: 3,
            out_ports: 3,
        }
    }

    fn rp(id: &str, kb: f64) -> RpSpec {
        RpSpec {
            id: id.to_string(),
            bitstream_bytes: Bytes::from_kb(kb),
            capacity: ResourceVector::new(12_000, 36.0, 30),
            loaded: None,
        }
    }

    fn map(lib: &[ModuleSpec]) -> BTreeMap<&str, &ModuleSpec> {
        lib.iter().map(|m| (m.id.as_str(), m)).collect()
    }

    #[test]
    fn fill_time_reference_point() {
        // 10 buffered lines of a 1920-wide frame at the 148.5 MHz video
        // clock take just under 0.13 ms to stream in.
        let m = module("m", 10);
        let t = fill_time(&m, &VideoFormat::p1080_60(), Hertz::from_mhz(148.5));
        assert!(close(t, 0.12929, 0.001));
        assert!((t.as_millis() - 0.13).abs() / 0.13 < 0.10);

        // Zero buffered lines, zero fill delay.
        assert_eq!(
            fill_time(&module("z", 0), &VideoFormat::p1080_60(), Hertz::from_mhz(148.5)),
            Seconds::ZERO
        );

        // Same buffering at the 200 MHz fabric clock.
        let t = fill_time(&m, &VideoFormat::p1080_60(), Hertz::from_mhz(200.0));
        assert!(close(t, 0.096, 1e-9));
    }

    #[test]
    fn pipeline_fill_is_max_over_paths() {
        let lib = vec![module("ten", 10), module("twenty", 20), module("five", 5)];
        let fmt = VideoFormat::p1080_60();
        let clock = Hertz::from_mhz(200.0);

        // Linear 3-stage: fills add up.
        let p = PipelineSpec::linear("lin", &["ten", "ten", "ten"]);
        let t = pipeline_fill_time(&p, &map(&lib), &fmt, clock).unwrap();
        assert!(close(t, 0.288, 1e-9));

        // Single zero-line stage.
        let lib0 = vec![module("z", 0)];
        let p0 = PipelineSpec::linear("z", &["z"]);
        assert_eq!(
            pipeline_fill_time(&p0, &map(&lib0), &fmt, clock).unwrap(),
            Seconds::ZERO
        );

        // Fork/join: the 20-line branch dominates the 5-line branches.
        let fork = PipelineSpec {
            id: "fork".into(),
            stages: vec![
                crate::pipeline::StageSpec {
                    id: "src".into(),
                    module: "five".into(),
                },
                crate::pipeline::StageSpec {
                    id: "a".into(),
                    module: "twenty".into(),
                },
                crate::pipeline::StageSpec {
                    id: "b".into(),
                    module: "five".into(),
                },
                crate::pipeline::StageSpec {
                    id: "c".into(),
                    module: "five".into(),
                },
                crate::pipeline::StageSpec {
                    id: "sink".into(),
                    module: "five".into(),
                },
            ],
            edges: vec![
                crate::pipeline::EdgeSpec::new(crate::pipeline::CAMERA, "src"),
                crate::pipeline::EdgeSpec::new("src", "a"),
                crate::pipeline::EdgeSpec::new("src", "b"),
                crate::pipeline::EdgeSpec::new("src", "c"),
                crate::pipeline::EdgeSpec::new("a", "sink"),
                crate::pipeline::EdgeSpec::new("b", "sink"),
                crate::pipeline::EdgeSpec::new("c", "sink"),
                crate::pipeline::EdgeSpec::new("sink", crate::pipeline::DISPLAY),
            ],
        };
        let t = pipeline_fill_time(&fork, &map(&lib), &fmt, clock).unwrap();
        // 5 + 20 + 5 lines on the longest path
        assert!(close(t, 30.0 * 1920.0 / 200e6 * 1e3, 1e-9));
    }

    #[test]
    fn reconfig_time_linear_in_bitstream() {
        let platform = PlatformSpec::default();
        let small = rp("s", 300.0);
        let large = rp("l", 1100.0);
        let ts = reconfig_time(&small, &platform);
        let tl = reconfig_time(&large, &platform);
        assert!(close(ts, 2.3, 0.05));
        assert!(close(tl, 8.6, 0.05));
        // linear in the bitstream size
        assert!((tl / ts - 1100.0 / 300.0).abs() < 1e-12);
    }

    #[test]
    fn round_quantum_values() {
        let fmt = VideoFormat::p720_60();
        assert!(close(round_quantum(&fmt, ScheduleParams::new(1, 1)), 16.6667, 1e-4));
        assert!(close(round_quantum(&fmt, ScheduleParams::new(2, 1)), 33.3333, 1e-4));
        assert!(close(round_quantum(&fmt, ScheduleParams::new(3, 2)), 100.0, 1e-9));
    }

    #[test]
    fn basic_slice_720p_three_stages() {
        let lib = vec![module("ten", 10)];
        let platform = PlatformSpec::default();
        let fmt = VideoFormat::p720_60();
        let p = PipelineSpec::linear("p", &["ten", "ten", "ten"]);
        let small = rp("s", 300.0);

        let est = slice_basic(&p, &map(&lib), &[&small], &fmt, &platform).unwrap();
        assert!(close(est.t_config, 2.34375, 1e-9));
        assert!(close(est.t_fill, 0.192, 1e-9));
        assert!(close(est.t_frame, 4.608, 1e-9));
        assert!(close(est.basic_slice, 7.14375, 1e-9));
        // Two such pipelines fit within one 60 fps frame period.
        assert!(est.basic_slice * 2.0 <= fmt.frame_period());

        // No reconfiguration: fill + frame only.
        let est0 = slice_basic(&p, &map(&lib), &[], &fmt, &platform).unwrap();
        assert_eq!(est0.t_config, Seconds::ZERO);
        assert!(close(est0.basic_slice, 4.8, 1e-9));
    }

    #[test]
    fn two_1080p_pipelines_exceed_the_frame_period() {
        let lib = vec![module("ten", 10)];
        let platform = PlatformSpec::default();
        let fmt = VideoFormat::p1080_60();
        let p = PipelineSpec::linear("p", &["ten", "ten", "ten"]);
        let est = slice_basic(&p, &map(&lib), &[], &fmt, &platform).unwrap();
        assert!(close(est.basic_slice, 10.656, 1e-9));
        assert!(est.basic_slice * 2.0 > fmt.frame_period());
    }

    #[test]
    fn staggered_bounds_equal_stages() {
        // Three equal stages: per-stage config 2.3 ms, fill 0.1 ms, frame
        // 4.6 ms. The last stage dominates the tight bound.
        let timings: Vec<StageTiming> = (0..3)
            .map(|i| StageTiming {
                stage: format!("s{i}"),
                config: Seconds::from_millis(2.3),
                fill: Seconds::from_millis(0.1),
                frame: Seconds::from_millis(4.6),
            })
            .collect();
        let est = SliceEstimate::from_stage_timings("p", &timings, Seconds::from_millis(0.3));
        assert!(close(est.staggered_lower_tight, 11.6, 1e-9));
        assert!(close(est.staggered_lower_simple, 11.6, 1e-9));
        assert!(close(est.staggered_upper, 6.9 + 0.3 + 4.6, 1e-9));
        assert_eq!(est.staggered_upper, est.basic_slice);
    }

    #[test]
    fn staggered_bounds_single_stage_coincide() {
        let timings = vec![StageTiming {
            stage: "only".into(),
            config: Seconds::from_millis(2.3),
            fill: Seconds::from_millis(0.1),
            frame: Seconds::from_millis(4.6),
        }];
        let est = SliceEstimate::from_stage_timings("p", &timings, Seconds::from_millis(0.1));
        assert_eq!(est.staggered_upper, est.staggered_lower_tight);
        assert_eq!(est.staggered_upper, est.staggered_lower_simple);
        assert!(close(est.staggered_upper, 7.0, 1e-9));
    }

    #[test]
    fn staggered_tight_bound_tracks_dominant_stage() {
        // A huge first stage dominates even though later stages are
        // trivial.
        let timings = vec![
            StageTiming {
                stage: "big".into(),
                config: Seconds::from_millis(1.0),
                fill: Seconds::ZERO,
                frame: Seconds::from_millis(40.0),
            },
            StageTiming {
                stage: "t1".into(),
                config: Seconds::from_millis(1.0),
                fill: Seconds::ZERO,
                frame: Seconds::from_millis(1.0),
            },
            StageTiming {
                stage: "t2".into(),
                config: Seconds::ZERO,
                fill: Seconds::ZERO,
                frame: Seconds::from_millis(1.0),
            },
        ];
        let est = SliceEstimate::from_stage_timings("p", &timings, Seconds::ZERO);
        assert!(close(est.staggered_lower_tight, 41.0, 1e-9));
    }

    #[test]
    fn amortized_slice() {
        let timings: Vec<StageTiming> = (0..3)
            .map(|i| StageTiming {
                stage: format!("s{i}"),
                config: if i == 0 {
                    Seconds::from_millis(2.3)
                } else {
                    Seconds::ZERO
                },
                fill: Seconds::from_micros(66.7),
                frame: Seconds::from_millis(4.61),
            })
            .collect();
        let est = SliceEstimate::from_stage_timings("p", &timings, Seconds::from_millis(0.2));
        assert_eq!(slice_amortized(&est, 1), est.basic_slice);
        assert!(close(slice_amortized(&est, 2), 11.72, 0.001));

        // Degenerate zero frame time: bundling has no effect.
        let zt = vec![StageTiming {
            stage: "z".into(),
            config: Seconds::from_millis(1.0),
            fill: Seconds::ZERO,
            frame: Seconds::ZERO,
        }];
        let est = SliceEstimate::from_stage_timings("p", &zt, Seconds::ZERO);
        assert_eq!(slice_amortized(&est, 1), slice_amortized(&est, 7));
    }

    #[test]
    fn feasibility_and_min_downsample() {
        let lib = vec![module("ten", 10)];
        let platform = PlatformSpec::default();
        let modules = map(&lib);
        let small = [rp("a", 300.0), rp("b", 300.0)];

        let p720 = VideoFormat::p720_60();
        let p1 = PipelineSpec::linear("p1", &["ten", "ten", "ten"]);
        let p2 = PipelineSpec::linear("p2", &["ten", "ten", "ten"]);

        // Two 720p pipelines with one reconfiguration each: feasible at
        // full rate.
        let one_each = vec![
            FeasibilityInput {
                pipeline: &p1,
                reconfigured: vec![&small[0]],
            },
            FeasibilityInput {
                pipeline: &p2,
                reconfigured: vec![&small[1]],
            },
        ];
        let r = check_feasibility(&one_each, &modules, &p720, &platform, ScheduleParams::new(1, 1))
            .unwrap();
        assert!(r.feasible);
        assert_eq!(r.effective_fps, 60.0);
        assert!(r.slack > Seconds::ZERO);

        // With two reconfigurations each: infeasible at s=1, feasible at
        // s=2 (30 fps).
        let two_each = vec![
            FeasibilityInput {
                pipeline: &p1,
                reconfigured: vec![&small[0], &small[1]],
            },
            FeasibilityInput {
                pipeline: &p2,
                reconfigured: vec![&small[0], &small[1]],
            },
        ];
        let r1 = check_feasibility(&two_each, &modules, &p720, &platform, ScheduleParams::new(1, 1))
            .unwrap();
        assert!(!r1.feasible);
        assert_eq!(r1.effective_fps, 0.0);
        assert!(r1.slack < Seconds::ZERO);
        let r2 = check_feasibility(&two_each, &modules, &p720, &platform, ScheduleParams::new(1, 2))
            .unwrap();
        assert!(r2.feasible);
        assert_eq!(r2.effective_fps, 30.0);

        // Two 1080p pipelines: infeasible at s=1 regardless of g, since
        // the summed frame times alone exceed the camera frame period.
        let p1080 = VideoFormat::p1080_60();
        for g in 1..=3 {
            let r = check_feasibility(
                &one_each,
                &modules,
                &p1080,
                &platform,
                ScheduleParams::new(g, 1),
            )
            .unwrap();
            assert!(!r.feasible, "g={g} should not help at s=1");
        }

        // Three 1080p pipelines need s=3 (20 fps).
        let p3 = PipelineSpec::linear("p3", &["ten", "ten", "ten"]);
        let three = vec![
            FeasibilityInput {
                pipeline: &p1,
                reconfigured: vec![&small[0]],
            },
            FeasibilityInput {
                pipeline: &p2,
                reconfigured: vec![&small[1]],
            },
            FeasibilityInput {
                pipeline: &p3,
                reconfigured: vec![&small[0]],
            },
        ];
        assert_eq!(
            min_downsample(&three, &modules, &p1080, &platform, 1).unwrap(),
            3
        );

        // Two 720p pipelines with one reconfiguration: s=1 suffices.
        assert_eq!(
            min_downsample(&one_each, &modules, &p720, &platform, 1).unwrap(),
            1
        );

        // No pipelines: trivially feasible at s=1.
        assert_eq!(min_downsample(&[], &modules, &p720, &platform, 1).unwrap(), 1);
    }
}
