use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// Strictly increasing set of analysis scales, in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    scales: Vec<f64>,
    spacing: Spacing,
}

const SPACING_TOL: f64 = 1e-9;

impl ScaleGrid {
    /// `count` scales from `a_min` to `a_max` inclusive.
    pub fn new(a_min: f64, a_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(a_min.is_finite() && a_min > 0.0) {
            return Err(Error::Parameter(format!("a_min must be positive, got {a_min}")));
        }
        if !(a_max.is_finite() && a_max > a_min) {
            return Err(Error::Parameter(format!("a_max must exceed a_min, got {a_max} ≤ {a_min}")));
        }
        if count < 2 {
            return Err(Error::Parameter(format!("a scale grid needs at least 2 scales, got {count}")));
        }
        let last = (count - 1) as f64;
        let mut scales: Vec<f64> = (0..count)
            .map(|i| {
                let f = i as f64 / last;
                match spacing {
                    Spacing::Log => a_min * math::exp(f * math::ln(a_max / a_min)),
                    Spacing::Linear => a_min + f * (a_max - a_min),
                }
            })
            .collect();
        scales[0] = a_min;
        scales[count - 1] = a_max;
        Ok(Self { scales, spacing })
    }

    /// `2·dt .. max(N·dt/4, 4·dt)`, 64 log-spaced scales.
    pub fn default_for(n: usize, dt: f64) -> Result<Self> {
        let a_max = (n as f64 * dt / 4.0).max(4.0 * dt);
        Self::new(2.0 * dt, a_max, 64, Spacing::Log)
    }

    /// Rebuilds a grid from explicit scales, detecting log or linear spacing.
    pub fn from_scales(scales: Vec<f64>) -> Result<Self> {
        if scales.len() < 2 {
            return Err(Error::Parameter("a scale grid needs at least 2 scales".into()));
        }
        if !(scales[0].is_finite() && scales[0] > 0.0) || scales.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Parameter("scales must be positive and strictly increasing".into()));
        }
        let ratio = scales[1] / scales[0];
        let step = scales[1] - scales[0];
        let a_max = scales[scales.len() - 1];
        let spacing = if scales.windows(2).all(|w| (w[1] / w[0] - ratio).abs() <= SPACING_TOL * ratio) {
            Spacing::Log
        } else if scales.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= SPACING_TOL * a_max) {
            Spacing::Linear
        } else {
            return Err(Error::UnsupportedGrid("scales are neither log nor linear spaced".into()));
        };
        Ok(Self { scales, spacing })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.scales.len()
    }

    pub fn a_min(&self) -> f64 {
        self.scales[0]
    }

    pub fn a_max(&self) -> f64 {
        self.scales[self.scales.len() - 1]
    }

    /// Octaves between neighbouring scales; `None` for a linear grid.
    pub fn dj(&self) -> Option<f64> {
        match self.spacing {
            Spacing::Log => Some(math::log2(self.a_max() / self.a_min()) / (self.count() - 1) as f64),
            Spacing::Linear => None,
        }
    }

    /// Same scales up to a relative `1e−12`.
    pub fn matches(&self, other: &ScaleGrid) -> bool {
        self.count() == other.count()
            && self.scales.iter().zip(&other.scales).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()))
    }
}

impl fmt::Display for ScaleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.spacing {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        };
        write!(f, "{}:{}:{}:{}", self.a_min(), self.a_max(), self.count(), tag)
    }
}

/// Parses `<a_min>:<a_max>:<count>:<log|linear>`.
impl FromStr for ScaleGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected amin:amax:count:log|linear, got '{s}'")));
        }
        let num = |p: &str| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad scale '{p}'")));
        let count: usize = parts[2].parse().map_err(|_| Error::Parse(format!("bad scale count '{}'", parts[2])))?;
        let spacing = match parts[3] {
            "log" => Spacing::Log,
            "linear" => Spacing::Linear,
            other => return Err(Error::Parse(format!("unknown spacing '{other}'"))),
        };
        Self::new(num(parts[0])?, num(parts[1])?, count, spacing)
    }
}
