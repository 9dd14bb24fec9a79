//! Unit-safe time, size, rate, and frequency arithmetic.
//!
//! Every physical quantity in the model is wrapped in a newtype so that
//! mixing units (adding bytes to seconds, dividing a frequency by a
//! duration, ...) is a compile error. Only the operations the model
//! actually needs are implemented.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

/// A duration or point in time, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seconds(pub f64);

impl Seconds {
    pub const ZERO: Seconds = Seconds(0.0);

    pub fn from_millis(ms: f64) -> Self {
        Seconds(ms * 1e-3)
    }

    pub fn from_micros(us: f64) -> Self {
        Seconds(us * 1e-6)
    }

    pub fn as_millis(self) -> f64 {
        self.0 * 1e3
    }

    pub fn as_micros(self) -> f64 {
        self.0 * 1e6
    }

    pub fn max(self, other: Seconds) -> Seconds {
        Seconds(self.0.max(other.0))
    }

    pub fn min(self, other: Seconds) -> Seconds {
        Seconds(self.0.min(other.0))
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Total ordering for deterministic sorting of event times.
    pub fn total_cmp(&self, other: &Seconds) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Seconds {
    type Output = Seconds;
    fn add(self, rhs: Seconds) -> Seconds {
        Seconds(self.0 + rhs.0)
    }
}

impl AddAssign for Seconds {
    fn add_assign(&mut self, rhs: Seconds) {
        self.0 += rhs.0;
    }
}

impl Sub for Seconds {
    type Output = Seconds;
    fn sub(self, rhs: Seconds) -> Seconds {
        Seconds(self.0 - rhs.0)
    }
}

impl Mul<f64> for Seconds {
    type Output = Seconds;
    fn mul(self, rhs: f64) -> Seconds {
        Seconds(self.0 * rhs)
    }
}

impl Mul<Seconds> for f64 {
    type Output = Seconds;
    fn mul(self, rhs: Seconds) -> Seconds {
        Seconds(self * rhs.0)
    }
}

impl Div<f64> for Seconds {
    type Output = Seconds;
    fn div(self, rhs: f64) -> Seconds {
        Seconds(self.0 / rhs)
    }
}

/// Ratio of two durations.
impl Div for Seconds {
    type Output = f64;
    fn div(self, rhs: Seconds) -> f64 {
        self.0 / rhs.0
    }
}

impl Sum for Seconds {
    fn sum<I: Iterator<Item = Seconds>>(iter: I) -> Seconds {
        Seconds(iter.map(|s| s.0).sum())
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0.abs();
        if v == 0.0 {
            write!(f, "0s")
        } else if v < 1e-6 {
            write!(f, "{:.1}ns", self.0 * 1e9)
        } else if v < 1e-3 {
            write!(f, "{:.2}us", self.0 * 1e6)
        } else if v < 1.0 {
            write!(f, "{:.3}ms", self.0 * 1e3)
        } else {
            write!(f, "{:.3}s", self.0)
        }
    }
}

/// A data size in bytes. Fractional values arise from fluid-flow buffer
/// occupancy accounting.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bytes(pub f64);

impl Bytes {
    pub const ZERO: Bytes = Bytes(0.0);

    pub fn from_kb(kb: f64) -> Self {
        Bytes(kb * 1e3)
    }

    pub fn from_mb(mb: f64) -> Self {
        Bytes(mb * 1e6)
    }

    pub fn as_mb(self) -> f64 {
        self.0 * 1e-6
    }

    pub fn max(self, other: Bytes) -> Bytes {
        Bytes(self.0.max(other.0))
    }

    pub fn min(self, other: Bytes) -> Bytes {
        Bytes(self.0.min(other.0))
    }
}

impl Add for Bytes {
    type Output = Bytes;
    fn add(self, rhs: Bytes) -> Bytes {
        Bytes(self.0 + rhs.0)
    }
}

impl Sub for Bytes {
    type Output = Bytes;
    fn sub(self, rhs: Bytes) -> Bytes {
        Bytes(self.0 - rhs.0)
    }
}

impl Mul<f64> for Bytes {
    type Output = Bytes;
    fn mul(self, rhs: f64) -> Bytes {
        Bytes(self.0 * rhs)
    }
}

impl Div for Bytes {
    type Output = f64;
    fn div(self, rhs: Bytes) -> f64 {
        self.0 / rhs.0
    }
}

/// size / rate = time
impl Div<BytesPerSec> for Bytes {
    type Output = Seconds;
    fn div(self, rhs: BytesPerSec) -> Seconds {
        Seconds(self.0 / rhs.0)
    }
}

impl Sum for Bytes {
    fn sum<I: Iterator<Item = Bytes>>(iter: I) -> Bytes {
        Bytes(iter.map(|b| b.0).sum())
    }
}

impl fmt::Display for Bytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0.abs();
        if v < 1e3 {
            write!(f, "{:.0}B", self.0)
        } else if v < 1e6 {
            write!(f, "{:.1}KB", self.0 * 1e-3)
        } else if v < 1e9 {
            write!(f, "{:.2}MB", self.0 * 1e-6)
        } else {
            write!(f, "{:.2}GB", self.0 * 1e-9)
        }
    }
}

/// A frequency: clock cycles, pixels, or frames per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hertz(pub f64);

impl Hertz {
    pub fn from_mhz(mhz: f64) -> Self {
        Hertz(mhz * 1e6)
    }

    pub fn min(self, other: Hertz) -> Hertz {
        Hertz(self.0.min(other.0))
    }

    /// Time for `count` events at this rate.
    pub fn time_for(self, count: f64) -> Seconds {
        Seconds(count / self.0)
    }
}

/// count / frequency = time
impl Div<Hertz> for f64 {
    type Output = Seconds;
    fn div(self, rhs: Hertz) -> Seconds {
        Seconds(self / rhs.0)
    }
}

impl fmt::Display for Hertz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0.abs();
        if v < 1e3 {
            write!(f, "{:.1}Hz", self.0)
        } else if v < 1e6 {
            write!(f, "{:.1}kHz", self.0 * 1e-3)
        } else if v < 1e9 {
            write!(f, "{:.1}MHz", self.0 * 1e-6)
        } else {
            write!(f, "{:.2}GHz", self.0 * 1e-9)
        }
    }
}

/// A data rate in bytes per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BytesPerSec(pub f64);

impl BytesPerSec {
    pub const ZERO: BytesPerSec = BytesPerSec(0.0);

    pub fn from_mb_per_sec(mb: f64) -> Self {
        BytesPerSec(mb * 1e6)
    }

    pub fn from_gb_per_sec(gb: f64) -> Self {
        BytesPerSec(gb * 1e9)
    }

    pub fn max(self, other: BytesPerSec) -> BytesPerSec {
        BytesPerSec(self.0.max(other.0))
    }

    /// Item rate sustained by this byte rate at `bytes_per_item`.
    pub fn item_rate(self, bytes_per_item: f64) -> Hertz {
        Hertz(self.0 / bytes_per_item)
    }
}

impl Add for BytesPerSec {
    type Output = BytesPerSec;
    fn add(self, rhs: BytesPerSec) -> BytesPerSec {
        BytesPerSec(self.0 + rhs.0)
    }
}

impl Sub for BytesPerSec {
    type Output = BytesPerSec;
    fn sub(self, rhs: BytesPerSec) -> BytesPerSec {
        BytesPerSec(self.0 - rhs.0)
    }
}

impl Mul<f64> for BytesPerSec {
    type Output = BytesPerSec;
    fn mul(self, rhs: f64) -> BytesPerSec {
        BytesPerSec(self.0 * rhs)
    }
}

impl Div<f64> for BytesPerSec {
    type Output = BytesPerSec;
    fn div(self, rhs: f64) -> BytesPerSec {
        BytesPerSec(self.0 / rhs)
    }
}

impl Div for BytesPerSec {
    type Output = f64;
    fn div(self, rhs: BytesPerSec) -> f64 {
        self.0 / rhs.0
    }
}

/// rate * time = size
impl Mul<Seconds> for BytesPerSec {
    type Output = Bytes;
    fn mul(self, rhs: Seconds) -> Bytes {
        Bytes(self.0 * rhs.0)
    }
}

impl fmt::Display for BytesPerSec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0.abs();
        if v < 1e6 {
            write!(f, "{:.1}KB/s", self.0 * 1e-3)
        } else if v < 1e9 {
            write!(f, "{:.1}MB/s", self.0 * 1e-6)
        } else {
            write!(f, "{:.2}GB/s", self.0 * 1e-9)
        }
    }
}
