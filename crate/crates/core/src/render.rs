//! Textual timeline rendering: a fixed-width Gantt view with one lane
//! per partition and per pipeline, or machine-readable line-delimited
//! records.

use crate::timeline::{EventKind, Timeline};
use crate::units::Seconds;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    TextGantt,
    Structured,
}

/// Renders a timeline. The text Gantt shows reconfiguration (`R`) and
/// streaming (`#`) per partition, timeslices (`=`) per pipeline, round
/// boundaries (`|`) and deadline misses (`!`); the structured style is
/// the stable line-delimited record format, round-trippable back into a
/// [`Timeline`].
pub fn render_timeline(timeline: &Timeline, style: RenderStyle, width: usize) -> String {
    match style {
        RenderStyle::Structured => timeline.to_ndjson(),
        RenderStyle::TextGantt => gantt(timeline, width.max(20)),
    }
}

fn gantt(timeline: &Timeline, width: usize) -> String {
    let t_end = timeline
        .events
        .iter()
        .map(|e| e.time)
        .fold(Seconds::ZERO, Seconds::max)
        .max(timeline.round_quantum * (timeline.rounds as f64 + 1.0));
    let col_of = |t: Seconds| -> usize {
        if t_end.0 <= 0.0 {
            0
        } else {
            (((t.0 / t_end.0) * (width as f64 - 1.0)).round() as usize).min(width - 1)
        }
    };

    // Interval collection per lane.
    let mut rp_lanes: BTreeMap<String, Vec<char>> = BTreeMap::new();
    let mut pipe_lanes: BTreeMap<String, Vec<char>> = BTreeMap::new();
    let mut open_reconfig: BTreeMap<String, Seconds> = BTreeMap::new();
    let mut stage_open: BTreeMap<(String, u32), Seconds> = BTreeMap::new();
    let mut stage_close: BTreeMap<(String, u32), Seconds> = BTreeMap::new();
    let mut slice_open: BTreeMap<(String, u32), Seconds> = BTreeMap::new();
    let mut slice_close: BTreeMap<(String, u32), Seconds> = BTreeMap::new();

    let lane = |map: &mut BTreeMap<String, Vec<char>>, key: &str| {
        map.entry(key.to_string()).or_insert_with(|| vec!['.'; width]);
    };

    for event in &timeline.events {
        match &event.kind {
            EventKind::ReconfigStart { rp, .. } => {
                lane(&mut rp_lanes, rp);
                open_reconfig.insert(rp.clone(), event.time);
            }
            EventKind::ReconfigEnd { rp, .. } => {
                lane(&mut rp_lanes, rp);
                if let Some(start) = open_reconfig.remove(rp) {
                    paint(rp_lanes.get_mut(rp).unwrap(), col_of(start), col_of(event.time), 'R');
                }
            }
            EventKind::StageStarted { rp, round, .. } => {
                lane(&mut rp_lanes, rp);
                stage_open
                    .entry((rp.clone(), *round))
                    .or_insert(event.time);
            }
            EventKind::StageFrameDone { rp, round, .. } => {
                lane(&mut rp_lanes, rp);
                let close = stage_close.entry((rp.clone(), *round)).or_insert(event.time);
                *close = close.max(event.time);
            }
            EventKind::PipelineSwitch { pipeline, round } => {
                lane(&mut pipe_lanes, pipeline);
                slice_open.insert((pipeline.clone(), *round), event.time);
            }
            EventKind::PipelineFrameDone { pipeline, round, .. } => {
                lane(&mut pipe_lanes, pipeline);
                let close = slice_close
                    .entry((pipeline.clone(), *round))
                    .or_insert(event.time);
                *close = close.max(event.time);
            }
            _ => {}
        }
    }
    for ((rp, round), start) in &stage_open {
        if let Some(end) = stage_close.get(&(rp.clone(), *round)) {
            paint(rp_lanes.get_mut(rp).unwrap(), col_of(*start), col_of(*end), '#');
        }
    }
    for ((pipeline, round), start) in &slice_open {
        if let Some(end) = slice_close.get(&(pipeline.clone(), *round)) {
            paint(
                pipe_lanes.get_mut(pipeline).unwrap(),
                col_of(*start),
                col_of(*end),
                '=',
            );
        }
    }

    // Axis with round boundaries and deadline misses.
    let mut axis = vec![' '; width];
    let mut round = 0u64;
    loop {
        let t = timeline.round_quantum * round as f64;
        if t > t_end {
            break;
        }
        axis[col_of(t)] = '|';
        round += 1;
    }
    for glitch in &timeline.glitches {
        axis[col_of(glitch.finished_at)] = '!';
    }

    let label_width = rp_lanes
        .keys()
        .chain(pipe_lanes.keys())
        .map(|k| k.len() + 4)
        .max()
        .unwrap_or(8)
        .max(8);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "timeline: {} rounds, quantum {}, 1 column = {}",
        timeline.rounds,
        timeline.round_quantum,
        Seconds(t_end.0 / width as f64)
    );
    let _ = writeln!(out, "{:label_width$}{}", "round", axis.iter().collect::<String>());
    for (rp, lane) in &rp_lanes {
        let _ = writeln!(out, "{:label_width$}{}", format!("rp {rp}"), lane.iter().collect::<String>());
    }
    for (pipeline, lane) in &pipe_lanes {
        let _ = writeln!(
            out,
            "{:label_width$}{}",
            format!("p  {pipeline}"),
            lane.iter().collect::<String>()
        );
    }
    if rp_lanes.is_empty() && pipe_lanes.is_empty() {
        let _ = writeln!(out, "{:label_width$}(idle)", "");
    }
    let _ = writeln!(
        out,
        "legend: R reconfig, # streaming, = timeslice, | round boundary, ! deadline miss"
    );
    for (pipeline, stats) in &timeline.per_pipeline {
        let _ = writeln!(
            out,
            "  {pipeline}: {} frames ({} on time), {:.2} fps, mean latency {}",
            stats.frames_processed,
            stats.on_time_frames,
            stats.achieved_fps,
            stats.mean_latency
        );
    }
    let _ = writeln!(
        out,
        "  glitches: {}, peak DRAM streams: {}, peak DRAM bandwidth: {}",
        timeline.glitches.len(),
        timeline.peak_dram_streams,
        timeline.peak_dram_bandwidth
    );
    out
}

fn paint(lane: &mut [char], from: usize, to: usize, ch: char) {
    for cell in lane.iter_mut().take(to.max(from) + 1).skip(from) {
        if *cell == '.' {
            *cell = ch;
        }
    }
}
