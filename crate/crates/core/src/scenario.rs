//! Scenario files: a versioned JSON description of a platform, video
//! format, module library, pipelines, and schedule, plus the bundled
//! example scenarios and a seeded random generator.

use crate::model::{
    ExecMode, ModelError, ModuleSpec, PlatformSpec, ResourceVector, RpSpec, ScheduleParams,
    VideoFormat,
};
use crate::pipeline::{PipelineError, PipelineSpec};
use crate::units::Bytes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported scenario version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("duplicate module id {module}")]
    DuplicateModule { module: String },
    #[error("duplicate pipeline id {pipeline}")]
    DuplicatePipeline { pipeline: String },
    #[error("module {module} fits in no partition")]
    ModuleFitsNoRp { module: String },
    #[error("partition {rp} declares unknown resident module {module}")]
    UnknownLoadedModule { rp: String, module: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub platform: PlatformSpec,
    pub format: VideoFormat,
    pub modules: Vec<ModuleSpec>,
    pub pipelines: Vec<PipelineSpec>,
    #[serde(default)]
    pub schedule: ScheduleParams,
    #[serde(default)]
    pub mode: ExecMode,
}

impl Scenario {
    pub fn module_map(&self) -> BTreeMap<&str, &ModuleSpec> {
        self.modules.iter().map(|m| (m.id.as_str(), m)).collect()
    }

    pub fn pipeline_refs(&self) -> Vec<&PipelineSpec> {
        self.pipelines.iter().collect()
    }

    /// Cross-reference and invariant validation; errors name the
    /// offending ids.
    pub fn validate(&self) -> Result<(), LoadError> {
        if self.version != SCENARIO_VERSION {
            return Err(LoadError::Version {
                found: self.version,
                expected: SCENARIO_VERSION,
            });
        }
        self.format.validate()?;
        self.platform.validate(&self.format)?;
        self.schedule.validate()?;
        let mut ids = std::collections::BTreeSet::new();
        for module in &self.modules {
            module.validate()?;
            if !ids.insert(module.id.as_str()) {
                return Err(LoadError::DuplicateModule {
                    module: module.id.clone(),
                });
            }
        }
        let modules = self.module_map();
        for rp in &self.platform.partitions {
            if let Some(loaded) = &rp.loaded {
                let module = modules.get(loaded.as_str()).ok_or_else(|| {
                    LoadError::UnknownLoadedModule {
                        rp: rp.id.clone(),
                        module: loaded.clone(),
                    }
                })?;
                if !module.instantiable_in(rp) {
                    return Err(ModelError::LoadedModuleTooLarge {
                        rp: rp.id.clone(),
                        module: loaded.clone(),
                    }
                    .into());
                }
            }
        }
        let mut pids = std::collections::BTreeSet::new();
        for pipeline in &self.pipelines {
            if !pids.insert(pipeline.id.as_str()) {
                return Err(LoadError::DuplicatePipeline {
                    pipeline: pipeline.id.clone(),
                });
            }
            pipeline.validate(&modules)?;
            for stage in &pipeline.stages {
                let module = modules[stage.module.as_str()];
                if !self
                    .platform
                    .partitions
                    .iter()
                    .any(|rp| module.instantiable_in(rp))
                {
                    return Err(LoadError::ModuleFitsNoRp {
                        module: module.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(path_label: &str, text: &str) -> Result<Scenario, LoadError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| LoadError::Parse {
                path: path_label.to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&path.display().to_string(), &text)
}

/// Bundled scenario names, resolvable by [`fixture`].
pub const FIXTURE_NAMES: [&str; 6] = ["fig3", "fig4", "fig8a", "fig8b", "fig9a", "fig9b"];

/// Returns a bundled scenario by name.
pub fn fixture(name: &str) -> Option<Scenario> {
    let text = match name {
        "fig3" => include_str!("../fixtures/fig3.json"),
        "fig4" => include_str!("../fixtures/fig4.json"),
        "fig8a" => include_str!("../fixtures/fig8a.json"),
        "fig8b" => include_str!("../fixtures/fig8b.json"),
        "fig9a" => include_str!("../fixtures/fig9a.json"),
        "fig9b" => include_str!("../fixtures/fig9b.json"),
        _ => return None,
    };
    Some(Scenario::from_json(name, text).expect("bundled scenario is valid"))
}

/// The stock vision module library used by bundled and generated
/// scenarios.
pub fn vision_modules() -> Vec<ModuleSpec> {
    let m = |id: &str, lines: u32, lut: u32, bram: f64, dsp: u32| ModuleSpec {
        id: id.to_string(),
        buffer_lines: lines,
        demand: ResourceVector::new(lut, bram, dsp),
        in_ports: 1,
        out_ports: 1,
    };
    vec![
        m("gaussian_blur", 5, 2600, 5.0, 10),
        m("sobel_edge", 3, 2200, 3.0, 0),
        m("harris_corner", 5, 3400, 5.0, 12),
        m("color_track", 2, 1800, 2.0, 0),
        m("template_track", 8, 3800, 8.0, 6),
        m("blob_detect", 3, 2000, 3.0, 0),
        m("background_sub", 0, 900, 1.0, 0),
        m("median_filter", 3, 2400, 3.0, 0),
    ]
}

/// Builds the standard time-sharing evaluation scenario: `n` six-stage
/// linear pipelines over six small partitions, consecutive pipelines
/// differing in exactly `k` trailing stages so that every steady-state
/// switch reconfigures `k` partitions.
pub fn interleaved_scenario(
    format: VideoFormat,
    n: u32,
    k: u32,
    params: ScheduleParams,
    mode: ExecMode,
) -> Scenario {
    let stages_per_pipeline = 6u32;
    let k = k.min(stages_per_pipeline);
    let shared_count = stages_per_pipeline - k;
    let base = vision_modules();
    let mut modules: Vec<ModuleSpec> = base[..shared_count as usize].to_vec();
    for i in 0..n {
        for j in 0..k {
            let mut unique = base[5].clone(); // blob_detect template, 3 lines
            unique.id = format!("variant_p{i}_{j}");
            modules.push(unique);
        }
    }
    let pipelines: Vec<PipelineSpec> = (0..n)
        .map(|i| {
            let mut stage_modules: Vec<String> = base[..shared_count as usize]
                .iter()
                .map(|m| m.id.clone())
                .collect();
            for j in 0..k {
                stage_modules.push(format!("variant_p{i}_{j}"));
            }
            let refs: Vec<&str> = stage_modules.iter().map(String::as_str).collect();
            PipelineSpec::linear(&format!("pipe{i}"), &refs)
        })
        .collect();
    Scenario {
        version: SCENARIO_VERSION,
        platform: PlatformSpec::default(),
        format,
        modules,
        pipelines,
        schedule: params,
        mode,
    }
}

/// Knobs for [`random_scenario`].
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub max_pipelines: u32,
    pub max_stages: u32,
    pub mode: ExecMode,
    /// Extra DMA engines and stream slots so deep staggered pipelines
    /// remain plannable.
    pub relaxed_dram: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_pipelines: 2,
            max_stages: 6,
            mode: ExecMode::Staggered,
            relaxed_dram: true,
        }
    }
}

/// Deterministic seeded scenario generator used by property suites and
/// `--seed` on the command line.
pub fn random_scenario(seed: u64, spec: &RandomSpec) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let format = if rng.random_bool(0.5) {
        VideoFormat::p720_60()
    } else {
        VideoFormat::p1080_60()
    };
    let mut platform = PlatformSpec::default();
    if spec.relaxed_dram {
        platform.dma_engines = 9;
        platform.max_dram_streams = 9;
        platform.dram_bandwidth = crate::units::BytesPerSec::from_gb_per_sec(25.6);
    }
    let n_pipelines = rng.random_range(1..=spec.max_pipelines);
    let total_stages: u32 = (0..n_pipelines)
        .map(|_| rng.random_range(1..=spec.max_stages))
        .sum();
    // Enough distinct modules that sharing is possible but not certain.
    let n_modules = rng.random_range(total_stages.max(2)..=total_stages.max(2) * 2);
    let modules: Vec<ModuleSpec> = (0..n_modules)
        .map(|i| ModuleSpec {
            id: format!("m{i}"),
            buffer_lines: rng.random_range(0..=16),
            demand: ResourceVector::new(rng.random_range(500..4000), 2.0, 0),
            in_ports: 1,
            out_ports: 1,
        })
        .collect();
    platform.partitions = (0..rng.random_range(3..=6u32))
        .map(|i| RpSpec {
            id: format!("rp{i}"),
            bitstream_bytes: Bytes::from_kb(rng.random_range(100..=1100) as f64),
            capacity: ResourceVector::new(12_000, 36.0, 30),
            loaded: None,
        })
        .collect();

    let max_len = platform.partitions.len() as u32;
    let mut pipelines = Vec::new();
    for p in 0..n_pipelines {
        let len = rng.random_range(1..=spec.max_stages.min(max_len));
        let stage_modules: Vec<String> = (0..len)
            .map(|_| format!("m{}", rng.random_range(0..n_modules)))
            .collect();
        let refs: Vec<&str> = stage_modules.iter().map(String::as_str).collect();
        pipelines.push(PipelineSpec::linear(&format!("pipe{p}"), &refs));
    }
    let schedule = ScheduleParams::new(rng.random_range(1..=3), rng.random_range(1..=3));
    Scenario {
        version: SCENARIO_VERSION,
        platform,
        format,
        modules,
        pipelines,
        schedule,
        mode: spec.mode,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_load_and_validate() {
        for name in FIXTURE_NAMES {
            let scenario = fixture(name).unwrap_or_else(|| panic!("{name} missing"));
            scenario.validate().unwrap();
        }
        assert!(fixture("nonexistent").is_none());
    }

    #[test]
    fn fig8a_shape() {
        let s = fixture("fig8a").unwrap();
        assert_eq!(s.pipelines.len(), 2);
        assert_eq!(s.format, VideoFormat::p720_60());
        assert_eq!(s.platform.partitions.len(), 6);
        for rp in &s.platform.partitions {
            assert_eq!(rp.bitstream_bytes, Bytes::from_kb(300.0));
        }
    }

    #[test]
    fn empty_pipeline_list_is_valid() {
        let mut s = fixture("fig8a").unwrap();
        s.pipelines.clear();
        s.validate().unwrap();
    }

    #[test]
    fn unknown_module_reference_names_the_id() {
        let mut s = fixture("fig8a").unwrap();
        s.pipelines[0].stages[0].module = "ghost".into();
        match s.validate() {
            Err(LoadError::Pipeline(PipelineError::UnknownModule { module, .. })) => {
                assert_eq!(module, "ghost")
            }
            other => panic!("expected unknown module, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = "{\n  \"version\": 1,\n  broken\n}";
        match Scenario::from_json("inline", text) {
            Err(LoadError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = fixture("fig9b").unwrap();
        let again = Scenario::from_json("rt", &s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn preloaded_partition_must_hold_a_known_fitting_module() {
        let mut s = fixture("fig8a").unwrap();
        s.platform.partitions[0].loaded = Some("ghost".into());
        assert!(matches!(
            s.validate(),
            Err(LoadError::UnknownLoadedModule { .. })
        ));

        let mut s = fixture("fig8a").unwrap();
        s.platform.partitions[0].loaded = Some("gaussian_blur".into());
        s.platform.partitions[0].capacity = ResourceVector::new(100, 1.0, 0);
        assert!(matches!(
            s.validate(),
            Err(LoadError::Model(ModelError::LoadedModuleTooLarge { .. }))
        ));
    }

    #[test]
    fn random_scenarios_are_reproducible_and_valid() {
        for seed in 0..20 {
            let a = random_scenario(seed, &RandomSpec::default());
            let b = random_scenario(seed, &RandomSpec::default());
            assert_eq!(a, b);
            a.validate().unwrap();
        }
    }

    #[test]
    fn interleaved_scenarios_validate() {
        for n in [2, 3] {
            for k in [0, 1, 3, 6] {
                let s = interleaved_scenario(
                    VideoFormat::p720_60(),
                    n,
                    k,
                    ScheduleParams::default(),
                    ExecMode::Basic,
                );
                s.validate().unwrap();
                assert_eq!(s.pipelines.len(), n as usize);
                assert_eq!(s.pipelines[0].stages.len(), 6);
            }
        }
    }
}
