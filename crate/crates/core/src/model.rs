//! Domain types shared by the performance model, planner, and simulator:
//! video formats, the platform description, partition and module
//! descriptors, and schedule parameters.

use crate::units::{Bytes, BytesPerSec, Hertz, Seconds};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failure for a domain type. Each variant names the offending
/// field or id so scenario loading can report precise errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("video format field {field} must be positive")]
    NonPositiveFormatField { field: &'static str },
    #[error("platform field {field} must be positive")]
    NonPositivePlatformField { field: &'static str },
    #[error("partition {rp}: bitstream size must be positive")]
    EmptyBitstream { rp: String },
    #[error("duplicate partition id {rp}")]
    DuplicateRp { rp: String },
    #[error("partition {rp}: loaded module {module} exceeds capacity")]
    LoadedModuleTooLarge { rp: String, module: String },
    #[error("platform needs at least 2 DMA engines (camera/display double-buffers), got {got}")]
    TooFewDmaEngines { got: u32 },
    #[error(
        "{streams} streams at {per_stream} per stream exceed the DRAM bandwidth {bandwidth}"
    )]
    DramOversubscribed {
        streams: u32,
        per_stream: BytesPerSec,
        bandwidth: BytesPerSec,
    },
    #[error(
        "switch overhead {overhead} is not below the smallest partition reconfiguration time {reconfig}"
    )]
    SwitchOverheadTooLarge { overhead: Seconds, reconfig: Seconds },
    #[error("module {module}: in_ports and out_ports must be at least 1")]
    NoPorts { module: String },
    #[error("schedule parameter {field} must be at least 1")]
    BadScheduleParam { field: &'static str },
}

/// A fixed-rate video stream format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoFormat {
    pub width: u32,
    pub height: u32,
    /// Camera frame rate in frames per second.
    pub fps: f64,
    /// Bytes per pixel on the stream; 2 for YUYV422.
    #[serde(default = "default_bpp")]
    pub bytes_per_pixel: u32,
}

fn default_bpp() -> u32 {
    2
}

impl VideoFormat {
    /// 1280x720 at 60 fps, YUYV422.
    pub fn p720_60() -> Self {
        VideoFormat {
            width: 1280,
            height: 720,
            fps: 60.0,
            bytes_per_pixel: 2,
        }
    }

    /// 1920x1080 at 60 fps, YUYV422.
    pub fn p1080_60() -> Self {
        VideoFormat {
            width: 1920,
            height: 1080,
            fps: 60.0,
            bytes_per_pixel: 2,
        }
    }

    pub fn pixels(&self) -> f64 {
        self.width as f64 * self.height as f64
    }

    /// Size of one frame.
    pub fn frame_bytes(&self) -> Bytes {
        Bytes(self.pixels() * self.bytes_per_pixel as f64)
    }

    /// Time between consecutive camera frames, the reciprocal of the rate.
    pub fn frame_period(&self) -> Seconds {
        Seconds(1.0 / self.fps)
    }

    /// Time to stream one frame's active pixels at `clock`, one pixel per
    /// cycle on the 16-bit stream.
    pub fn active_stream_time(&self, clock: Hertz) -> Seconds {
        self.pixels() / clock
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, field: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::NonPositiveFormatField { field })
            }
        };
        check(self.width > 0, "width")?;
        check(self.height > 0, "height")?;
        check(self.fps > 0.0, "fps")?;
        check(self.bytes_per_pixel > 0, "bytes_per_pixel")
    }

    pub fn label(&self) -> String {
        format!("{}p{}", self.height, self.fps.round() as u32)
    }
}

/// Fabric resources of a partition or the demand of a module.
/// Comparison is componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceVector {
    pub lut: u32,
    /// 36 Kb block RAMs; half blocks occur in practice.
    pub bram36: f64,
    pub dsp: u32,
}

impl ResourceVector {
    pub fn new(lut: u32, bram36: f64, dsp: u32) -> Self {
        ResourceVector { lut, bram36, dsp }
    }

    /// Componentwise `self <= capacity`.
    pub fn fits_within(&self, capacity: &ResourceVector) -> bool {
        self.lut <= capacity.lut && self.bram36 <= capacity.bram36 && self.dsp <= capacity.dsp
    }
}

/// A reconfigurable partition: a floorplanned fabric region reloadable at
/// runtime with a precompiled module bitstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpSpec {
    pub id: String,
    pub bitstream_bytes: Bytes,
    pub capacity: ResourceVector,
    /// Module resident at scenario start, if any.
    #[serde(default)]
    pub loaded: Option<String>,
}

/// A vision processing stage variant loadable into a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub id: String,
    /// Frame lines buffered internally; drives the stage fill delay.
    pub buffer_lines: u32,
    #[serde(default)]
    pub demand: ResourceVector,
    #[serde(default = "default_port_count")]
    pub in_ports: u32,
    #[serde(default = "default_port_count")]
    pub out_ports: u32,
}

fn default_port_count() -> u32 {
    1
}

impl ModuleSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.in_ports < 1 || self.out_ports < 1 {
            return Err(ModelError::NoPorts {
                module: self.id.clone(),
            });
        }
        Ok(())
    }

    /// Whether this module can be instantiated in `rp`.
    pub fn instantiable_in(&self, rp: &RpSpec) -> bool {
        self.demand.fits_within(&rp.capacity)
    }
}

/// Round-robin schedule parameters: bundle factor `g` (consecutive frames
/// processed per timeslice) and downsample divisor `s` (every s-th camera
/// frame enters processing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub g: u32,
    pub s: u32,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams { g: 1, s: 1 }
    }
}

impl ScheduleParams {
    pub fn new(g: u32, s: u32) -> Self {
        ScheduleParams { g, s }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.g < 1 {
            return Err(ModelError::BadScheduleParam { field: "g" });
        }
        if self.s < 1 {
            return Err(ModelError::BadScheduleParam { field: "s" });
        }
        Ok(())
    }
}

/// Execution discipline of a timeslice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    /// A pipeline starts processing only after all its partitions are
    /// configured.
    #[default]
    Basic,
    /// Each stage starts as soon as it is configured and its upstream
    /// stage produces output; reconfiguration overlaps processing.
    Staggered,
}

/// The managed fabric: clocks, configuration port throughput, DRAM budget,
/// DMA engines, and the set of reconfigurable partitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSpec {
    pub fabric_clock: Hertz,
    pub pixel_clock: Hertz,
    /// Configuration port (PCAP) throughput; reconfiguration time of a
    /// partition is bitstream size over this rate.
    pub pcap_throughput: BytesPerSec,
    pub dram_bandwidth: BytesPerSec,
    /// Ceiling on concurrent thru-DRAM streaming connections the memory
    /// system sustains at full rate.
    pub max_dram_streams: u32,
    /// DMA engines; two are always reserved for the camera and display
    /// double-buffers.
    pub dma_engines: u32,
    pub partitions: Vec<RpSpec>,
    /// Per-switch software cost other than partition reconfiguration:
    /// module/DMA setup, startup, and completion polling.
    pub switch_overhead: Seconds,
    /// Crossbar register-write cost per streaming link when changing the
    /// interconnect topology.
    pub route_config_per_link: Seconds,
}

impl Default for PlatformSpec {
    fn default() -> Self {
        PlatformSpec {
            fabric_clock: Hertz::from_mhz(200.0),
            pixel_clock: Hertz::from_mhz(148.5),
            pcap_throughput: BytesPerSec::from_mb_per_sec(128.0),
            dram_bandwidth: BytesPerSec::from_gb_per_sec(12.8),
            max_dram_streams: 5,
            dma_engines: 5,
            partitions: default_small_partitions(),
            switch_overhead: Seconds::from_micros(100.0),
            route_config_per_link: Seconds(100e-9),
        }
    }
}

/// The six equally sized small partitions used for frame-scale
/// time-sharing (300 KB bitstreams each).
pub fn default_small_partitions() -> Vec<RpSpec> {
    (0..6)
        .map(|i| RpSpec {
            id: format!("rp{i}"),
            bitstream_bytes: Bytes::from_kb(300.0),
            capacity: ResourceVector::new(12_000, 36.0, 30),
            loaded: None,
        })
        .collect()
}

impl PlatformSpec {
    /// Read+write DRAM bandwidth demand of one thru-DRAM streaming
    /// connection carrying `format` at camera rate: every byte is written
    /// once and read once.
    pub fn per_stream_bandwidth(&self, format: &VideoFormat) -> BytesPerSec {
        BytesPerSec(2.0 * format.frame_bytes().0 * format.fps)
    }

    /// Fair-share bandwidth ceiling of a single DRAM streaming connection.
    pub fn per_stream_share(&self) -> BytesPerSec {
        self.dram_bandwidth / self.max_dram_streams as f64
    }

    /// Pixel rate of a pipeline streamed against DRAM during its
    /// timeslice: the fabric clock, capped by what the per-stream DRAM
    /// share sustains (each pixel written and read once per connection).
    pub fn solo_pixel_rate(&self, format: &VideoFormat) -> Hertz {
        let dram_cap = self
            .per_stream_share()
            .item_rate(2.0 * format.bytes_per_pixel as f64);
        self.fabric_clock.min(dram_cap)
    }

    /// Frame processing time of a pipeline running solo against DRAM.
    pub fn solo_frame_time(&self, format: &VideoFormat) -> Seconds {
        format.active_stream_time(self.solo_pixel_rate(format))
    }

    pub fn rp(&self, id: &str) -> Option<&RpSpec> {
        self.partitions.iter().find(|rp| rp.id == id)
    }

    pub fn smallest_reconfig_time(&self) -> Option<Seconds> {
        self.partitions
            .iter()
            .map(|rp| rp.bitstream_bytes / self.pcap_throughput)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn validate(&self, reference: &VideoFormat) -> Result<(), ModelError> {
        let check = |ok: bool, field: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::NonPositivePlatformField { field })
            }
        };
        check(self.fabric_clock.0 > 0.0, "fabric_clock")?;
        check(self.pixel_clock.0 > 0.0, "pixel_clock")?;
        check(self.pcap_throughput.0 > 0.0, "pcap_throughput")?;
        check(self.dram_bandwidth.0 > 0.0, "dram_bandwidth")?;
        check(self.max_dram_streams > 0, "max_dram_streams")?;
        check(self.route_config_per_link.0 >= 0.0, "route_config_per_link")?;
        if self.dma_engines < 2 {
            return Err(ModelError::TooFewDmaEngines {
                got: self.dma_engines,
            });
        }
        let per_stream = self.per_stream_bandwidth(reference);
        if per_stream * self.max_dram_streams as f64 > self.dram_bandwidth {
            return Err(ModelError::DramOversubscribed {
                streams: self.max_dram_streams,
                per_stream,
                bandwidth: self.dram_bandwidth,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for rp in &self.partitions {
            if rp.bitstream_bytes.0 <= 0.0 {
                return Err(ModelError::EmptyBitstream { rp: rp.id.clone() });
            }
            if !seen.insert(rp.id.clone()) {
                return Err(ModelError::DuplicateRp { rp: rp.id.clone() });
            }
        }
        // The pipeline-switch software cost must stay small against the
        // cheapest partition reconfiguration, otherwise the model's
        // reconfiguration-dominated switch assumption does not hold.
        if let Some(min_reconfig) = self.smallest_reconfig_time() {
            if self.switch_overhead >= min_reconfig {
                return Err(ModelError::SwitchOverheadTooLarge {
                    overhead: self.switch_overhead,
                    reconfig: min_reconfig,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn frame_bytes_full_hd() {
        // 1080p YUYV422 is about 4 MB per frame.
        let fb = VideoFormat::p1080_60().frame_bytes();
        assert_eq!(fb.0, 4_147_200.0);
        assert!(close(fb.0, 4.0e6, 0.05));
    }

    #[test]
    fn frame_period_is_reciprocal_rate() {
        let t = VideoFormat::p1080_60().frame_period();
        assert!(close(t.as_millis(), 16.7, 0.005));

        let one_fps = VideoFormat {
            fps: 1.0,
            ..VideoFormat::p1080_60()
        };
        assert_eq!(one_fps.frame_period(), Seconds(1.0));

        // Period depends only on the rate, not the resolution.
        assert_eq!(
            VideoFormat::p720_60().frame_period(),
            VideoFormat::p1080_60().frame_period()
        );
    }

    #[test]
    fn active_stream_time_one_pixel_per_cycle() {
        let clock = Hertz::from_mhz(200.0);
        let t = VideoFormat::p1080_60().active_stream_time(clock);
        assert!(close(t.as_millis(), 10.37, 0.001));
        let t = VideoFormat::p720_60().active_stream_time(clock);
        assert!(close(t.as_millis(), 4.61, 0.001));
    }

    #[test]
    fn zero_clock_rejected_by_validate() {
        let mut p = PlatformSpec::default();
        p.fabric_clock = Hertz(0.0);
        assert_eq!(
            p.validate(&VideoFormat::p1080_60()),
            Err(ModelError::NonPositivePlatformField {
                field: "fabric_clock"
            })
        );
    }

    #[test]
    fn per_stream_bandwidth_at_1080p60() {
        let p = PlatformSpec::default();
        let bw = p.per_stream_bandwidth(&VideoFormat::p1080_60());
        // read+write of a 4.15 MB frame 60 times a second, ~497 MB/s
        assert!(close(bw.0, 497.664e6, 1e-9));
        assert!(close(bw.0, 497e6, 0.01));
    }

    #[test]
    fn solo_rate_capped_by_dram_share() {
        let mut p = PlatformSpec::default();
        let fmt = VideoFormat::p1080_60();
        // Default: fabric clock binds.
        assert_eq!(p.solo_pixel_rate(&fmt), Hertz::from_mhz(200.0));
        // Starve the DRAM and the cap takes over.
        p.dram_bandwidth = BytesPerSec::from_mb_per_sec(400.0);
        p.max_dram_streams = 4;
        assert_eq!(p.solo_pixel_rate(&fmt), Hertz::from_mhz(25.0));
    }

    #[test]
    fn default_platform_validates() {
        let p = PlatformSpec::default();
        p.validate(&VideoFormat::p1080_60()).unwrap();
        assert_eq!(p.partitions.len(), 6);
        // Five 1080p60 streams fit under the 12.8 GB/s budget.
        let per = p.per_stream_bandwidth(&VideoFormat::p1080_60());
        assert!(per * 5.0 <= p.dram_bandwidth);
    }

    #[test]
    fn resource_vector_componentwise() {
        let demand = ResourceVector::new(2000, 3.5, 8);
        let cap = ResourceVector::new(12_000, 36.0, 30);
        assert!(demand.fits_within(&cap));
        let too_much_bram = ResourceVector::new(2000, 40.0, 8);
        assert!(!too_much_bram.fits_within(&cap));
    }

    #[test]
    fn schedule_params_positive() {
        assert!(ScheduleParams::new(0, 1).validate().is_err());
        assert!(ScheduleParams::new(1, 0).validate().is_err());
        assert!(ScheduleParams::new(3, 2).validate().is_ok());
    }
}
