//! Streaming pipeline descriptions: a DAG of stages over a module
//! library, with one camera source edge and one display sink edge.

use crate::model::ModuleSpec;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Reserved endpoint name for the camera source in edge lists.
pub const CAMERA: &str = "camera";
/// Reserved endpoint name for the display sink in edge lists.
pub const DISPLAY: &str = "display";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("pipeline {pipeline}: duplicate stage id {stage}")]
    DuplicateStage { pipeline: String, stage: String },
    #[error("pipeline {pipeline}: stage {stage} references unknown module {module}")]
    UnknownModule {
        pipeline: String,
        stage: String,
        module: String,
    },
    #[error("pipeline {pipeline}: stage id {stage} collides with a reserved endpoint name")]
    ReservedStageName { pipeline: String, stage: String },
    #[error("pipeline {pipeline}: edge references unknown stage {name}")]
    UnknownStageInEdge { pipeline: String, name: String },
    #[error("pipeline {pipeline}: expected exactly one camera source edge, found {found}")]
    CameraEdgeCount { pipeline: String, found: usize },
    #[error("pipeline {pipeline}: expected exactly one display sink edge, found {found}")]
    DisplayEdgeCount { pipeline: String, found: usize },
    #[error("pipeline {pipeline}: duplicate edge {from} -> {to}")]
    DuplicateEdge {
        pipeline: String,
        from: String,
        to: String,
    },
    #[error("pipeline {pipeline}: cycle through stages {stages:?}")]
    Cycle {
        pipeline: String,
        stages: Vec<String>,
    },
    #[error(
        "pipeline {pipeline}: stage {stage} is dangling (not on any camera-to-display path)"
    )]
    DanglingStage { pipeline: String, stage: String },
    #[error(
        "pipeline {pipeline}: stage {stage} {direction} degree {degree} exceeds module {module}'s {ports} port(s)"
    )]
    PortOverflow {
        pipeline: String,
        stage: String,
        direction: &'static str,
        degree: usize,
        module: String,
        ports: u32,
    },
    #[error("pipeline {pipeline} has no stages")]
    Empty { pipeline: String },
}

/// One stage of a pipeline: an instance of a module from the library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub id: String,
    pub module: String,
}

/// A directed streaming connection between stages, or between a stage and
/// the reserved `camera` / `display` endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
}

impl EdgeSpec {
    pub fn new(from: &str, to: &str) -> Self {
        EdgeSpec {
            from: from.to_string(),
            to: to.to_string(),
        }
    }
}

/// A DAG of stages with a camera source and a display sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub id: String,
    pub stages: Vec<StageSpec>,
    pub edges: Vec<EdgeSpec>,
}

impl PipelineSpec {
    /// A chain `camera -> m[0] -> ... -> m[n-1] -> display` with stage ids
    /// `{id}_s{k}`.
    pub fn linear(id: &str, module_ids: &[&str]) -> Self {
        let stages: Vec<StageSpec> = module_ids
            .iter()
            .enumerate()
            .map(|(k, m)| StageSpec {
                id: format!("{id}_s{k}"),
                module: m.to_string(),
            })
            .collect();
        let mut edges = Vec::new();
        edges.push(EdgeSpec::new(CAMERA, &stages[0].id));
        for w in stages.windows(2) {
            edges.push(EdgeSpec::new(&w[0].id, &w[1].id));
        }
        edges.push(EdgeSpec::new(&stages[stages.len() - 1].id, DISPLAY));
        PipelineSpec {
            id: id.to_string(),
            stages,
            edges,
        }
    }

    pub fn stage(&self, id: &str) -> Option<&StageSpec> {
        self.stages.iter().find(|s| s.id == id)
    }

    /// Stage-to-stage edges only, excluding camera and display.
    pub fn stage_edges(&self) -> impl Iterator<Item = &EdgeSpec> {
        self.edges
            .iter()
            .filter(|e| e.from != CAMERA && e.to != DISPLAY)
    }

    /// Number of streaming links the interconnect must configure for this
    /// pipeline (all edges, including camera and display).
    pub fn link_count(&self) -> usize {
        self.edges.len()
    }

    /// Stage ids in deterministic topological order (ties broken by id).
    /// Requires a validated pipeline; returns an error on cycles.
    pub fn topo_order(&self) -> Result<Vec<String>, PipelineError> {
        let mut indegree: BTreeMap<&str, usize> =
            self.stages.iter().map(|s| (s.id.as_str(), 0)).collect();
        let mut succs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in self.stage_edges() {
            if let Some(d) = indegree.get_mut(e.to.as_str()) {
                *d += 1;
            }
            succs.entry(e.from.as_str()).or_default().push(e.to.as_str());
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(s, _)| *s)
            .collect();
        let mut order = Vec::with_capacity(self.stages.len());
        while let Some(&next) = ready.iter().next() {
            ready.remove(next);
            order.push(next.to_string());
            for succ in succs.get(next).into_iter().flatten() {
                let d = indegree.get_mut(succ).expect("edge endpoints validated");
                *d -= 1;
                if *d == 0 {
                    ready.insert(succ);
                }
            }
        }
        if order.len() != self.stages.len() {
            let leftover: Vec<String> = self
                .stages
                .iter()
                .filter(|s| !order.contains(&s.id))
                .map(|s| s.id.clone())
                .collect();
            return Err(PipelineError::Cycle {
                pipeline: self.id.clone(),
                stages: leftover,
            });
        }
        Ok(order)
    }

    /// Predecessor stage ids of `stage` (camera excluded).
    pub fn upstream_of(&self, stage: &str) -> Vec<&str> {
        let mut ups: Vec<&str> = self
            .stage_edges()
            .filter(|e| e.to == stage)
            .map(|e| e.from.as_str())
            .collect();
        ups.sort_unstable();
        ups
    }

    /// Validates the DAG structure against the module library.
    pub fn validate(&self, modules: &BTreeMap<&str, &ModuleSpec>) -> Result<(), PipelineError> {
        let pid = || self.id.clone();
        if self.stages.is_empty() {
            return Err(PipelineError::Empty { pipeline: pid() });
        }
        let mut ids = BTreeSet::new();
        for s in &self.stages {
            if s.id == CAMERA || s.id == DISPLAY {
                return Err(PipelineError::ReservedStageName {
                    pipeline: pid(),
                    stage: s.id.clone(),
                });
            }
            if !ids.insert(s.id.as_str()) {
                return Err(PipelineError::DuplicateStage {
                    pipeline: pid(),
                    stage: s.id.clone(),
                });
            }
            if !modules.contains_key(s.module.as_str()) {
                return Err(PipelineError::UnknownModule {
                    pipeline: pid(),
                    stage: s.id.clone(),
                    module: s.module.clone(),
                });
            }
        }

        let mut camera_edges = 0;
        let mut display_edges = 0;
        let mut seen_edges = BTreeSet::new();
        for e in &self.edges {
            for name in [&e.from, &e.to] {
                if name != CAMERA && name != DISPLAY && !ids.contains(name.as_str()) {
                    return Err(PipelineError::UnknownStageInEdge {
                        pipeline: pid(),
                        name: name.clone(),
                    });
                }
            }
            if e.from == CAMERA {
                camera_edges += 1;
            }
            if e.to == DISPLAY {
                display_edges += 1;
            }
            // camera can never be a sink, display never a source
            if e.to == CAMERA || e.from == DISPLAY {
                return Err(PipelineError::UnknownStageInEdge {
                    pipeline: pid(),
                    name: if e.to == CAMERA {
                        e.to.clone()
                    } else {
                        e.from.clone()
                    },
                });
            }
            if !seen_edges.insert((e.from.clone(), e.to.clone())) {
                return Err(PipelineError::DuplicateEdge {
                    pipeline: pid(),
                    from: e.from.clone(),
                    to: e.to.clone(),
                });
            }
        }
        if camera_edges != 1 {
            return Err(PipelineError::CameraEdgeCount {
                pipeline: pid(),
                found: camera_edges,
            });
        }
        if display_edges != 1 {
            return Err(PipelineError::DisplayEdgeCount {
                pipeline: pid(),
                found: display_edges,
            });
        }

        self.topo_order()?;

        // Every stage must lie on a camera-to-display path.
        let from_camera = self.reachable_from_camera();
        let to_display = self.reaching_display();
        for s in &self.stages {
            if !from_camera.contains(s.id.as_str()) || !to_display.contains(s.id.as_str()) {
                return Err(PipelineError::DanglingStage {
                    pipeline: pid(),
                    stage: s.id.clone(),
                });
            }
        }

        // Port budgets: degrees count the camera and display edges too.
        for s in &self.stages {
            let module = modules[s.module.as_str()];
            let indeg = self.edges.iter().filter(|e| e.to == s.id).count();
            let outdeg = self.edges.iter().filter(|e| e.from == s.id).count();
            if indeg > module.in_ports as usize {
                return Err(PipelineError::PortOverflow {
                    pipeline: pid(),
                    stage: s.id.clone(),
                    direction: "in",
                    degree: indeg,
                    module: module.id.clone(),
                    ports: module.in_ports,
                });
            }
            if outdeg > module.out_ports as usize {
                return Err(PipelineError::PortOverflow {
                    pipeline: pid(),
                    stage: s.id.clone(),
                    direction: "out",
                    degree: outdeg,
                    module: module.id.clone(),
                    ports: module.out_ports,
                });
            }
        }
        Ok(())
    }

    fn reachable_from_camera(&self) -> BTreeSet<&str> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut work: Vec<&str> = self
            .edges
            .iter()
            .filter(|e| e.from == CAMERA)
            .map(|e| e.to.as_str())
            .collect();
        while let Some(s) = work.pop() {
            if s == DISPLAY || !seen.insert(s) {
                continue;
            }
            work.extend(
                self.edges
                    .iter()
                    .filter(|e| e.from == s)
                    .map(|e| e.to.as_str()),
            );
        }
        seen
    }

    fn reaching_display(&self) -> BTreeSet<&str> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut work: Vec<&str> = self
            .edges
            .iter()
            .filter(|e| e.to == DISPLAY)
            .map(|e| e.from.as_str())
            .collect();
        while let Some(s) = work.pop() {
            if s == CAMERA || !seen.insert(s) {
                continue;
            }
            work.extend(
                self.edges
                    .iter()
                    .filter(|e| e.to == s)
                    .map(|e| e.from.as_str()),
            );
        }
        seen
    }
}
