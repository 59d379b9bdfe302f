//! Tunable parameters and their `key = value` file format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Line fitted through a candidate chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineFit {
    /// Least squares of y on x.
    #[default]
    Ordinary,
    /// Total least squares (perpendicular residuals).
    Total,
}

impl std::fmt::Display for LineFit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LineFit::Ordinary => "ordinary",
            LineFit::Total => "total",
        })
    }
}

impl std::str::FromStr for LineFit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(LineFit::Ordinary),
            "total" => Ok(LineFit::Total),
            _ => Err(Error::domain(format!("unknown line fit `{s}` (expected ordinary or total)"))),
        }
    }
}

/// Thresholds and search-schedule settings for chain recognition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimrParams {
    /// Upper bound on a chain's RMS distance from its least-squares line (characters).
    pub max_point_dispersal: f64,
    /// Upper bound on |chain angle - diagonal angle| (degrees).
    pub max_angle_deviation: f64,
    /// Maximum point ambiguity level.
    pub max_pal: usize,
    /// Fixed chain size `k`.
    pub chain_size: usize,
    /// Initial search rectangle width as a fraction of the space width.
    pub initial_rect_frac: f64,
    /// Cap on the initial rectangle width in characters; `0` disables it.
    pub initial_rect_max: f64,
    /// Both rectangle sides are multiplied by this after a failed cycle.
    pub growth_factor: f64,
    /// Gap intersections farther from the first-pass map than this many
    /// times their larger side are not searched.
    pub gap_proximity: f64,
    /// Minimum gap length, in multiples of `chain_size` mean token lengths.
    pub gap_min_factor: f64,
    pub line_fit: LineFit,
}

impl Default for SimrParams {
    fn default() -> Self {
        SimrParams {
            max_point_dispersal: 9.32,
            max_angle_deviation: 4.87,
            max_pal: 0,
            chain_size: 6,
            initial_rect_frac: 1.0 / 200.0,
            initial_rect_max: 400.0,
            growth_factor: 1.3,
            gap_proximity: 2.0,
            gap_min_factor: 1.0,
            line_fit: LineFit::Ordinary,
        }
    }
}

impl SimrParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64, name: &str| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be a finite value >= 0, got {v}")))
            }
        };
        nonneg(self.max_point_dispersal, "max_point_dispersal")?;
        nonneg(self.max_angle_deviation, "max_angle_deviation")?;
        nonneg(self.initial_rect_max, "initial_rect_max")?;
        nonneg(self.gap_proximity, "gap_proximity")?;
        nonneg(self.gap_min_factor, "gap_min_factor")?;
        if self.chain_size < 2 {
            return Err(Error::domain("chain_size must be at least 2"));
        }
        if !(self.initial_rect_frac > 0.0 && self.initial_rect_frac <= 1.0) {
            return Err(Error::domain("initial_rect_frac must be in (0, 1]"));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::domain("growth_factor must be > 1"));
        }
        Ok(())
    }
}

/// Every tunable of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub simr: SimrParams,
    pub lcsr_threshold: f64,
    /// Minimum length-model confidence for replacing a block during sentence alignment.
    pub min_confidence: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            simr: SimrParams::default(),
            lcsr_threshold: 0.634,
            min_confidence: 1.0,
        }
    }
}

const KEYS: &[&str] = &[
    "max_point_dispersal",
    "max_angle_deviation",
    "max_pal",
    "chain_size",
    "initial_rect_frac",
    "initial_rect_max",
    "growth_factor",
    "gap_proximity",
    "gap_min_factor",
    "line_fit",
    "lcsr_threshold",
    "min_confidence",
];

impl Params {
    pub fn validate(&self) -> Result<()> {
        self.simr.validate()?;
        if !(self.lcsr_threshold > 0.0 && self.lcsr_threshold <= 1.0) {
            return Err(Error::domain("lcsr_threshold must be in (0, 1]"));
        }
        if !(self.min_confidence >= 0.0) {
            return Err(Error::domain("min_confidence must be >= 0"));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering, one key per line in a fixed order.
    pub fn to_file_string(&self) -> String {
        let s = &self.simr;
        let mut out = String::new();
        for key in KEYS {
            let value = match *key {
                "max_point_dispersal" => s.max_point_dispersal.to_string(),
                "max_angle_deviation" => s.max_angle_deviation.to_string(),
                "max_pal" => s.max_pal.to_string(),
                "chain_size" => s.chain_size.to_string(),
                "initial_rect_frac" => s.initial_rect_frac.to_string(),
                "initial_rect_max" => s.initial_rect_max.to_string(),
                "growth_factor" => s.growth_factor.to_string(),
                "gap_proximity" => s.gap_proximity.to_string(),
                "gap_min_factor" => s.gap_min_factor.to_string(),
                "line_fit" => s.line_fit.to_string(),
                "lcsr_threshold" => self.lcsr_threshold.to_string(),
                "min_confidence" => self.min_confidence.to_string(),
                _ => unreachable!(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Parses `key = value` lines on top of the defaults. Unknown keys are
    /// rejected; `#` starts a comment line.
    pub fn parse(src: &str, origin: &str) -> Result<Self> {
        let mut p = Params::default();
        for (n, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: origin.to_string(),
                line: n + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || value.parse::<f64>().map_err(|e| err(format!("{key}: {e}")));
            let int = || value.parse::<usize>().map_err(|e| err(format!("{key}: {e}")));
            match key {
                "max_point_dispersal" => p.simr.max_point_dispersal = real()?,
                "max_angle_deviation" => p.simr.max_angle_deviation = real()?,
                "max_pal" => p.simr.max_pal = int()?,
                "chain_size" => p.simr.chain_size = int()?,
                "initial_rect_frac" => p.simr.initial_rect_frac = real()?,
                "initial_rect_max" => p.simr.initial_rect_max = real()?,
                "growth_factor" => p.simr.growth_factor = real()?,
                "gap_proximity" => p.simr.gap_proximity = real()?,
                "gap_min_factor" => p.simr.gap_min_factor = real()?,
                "line_fit" => p.simr.line_fit = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "lcsr_threshold" => p.lcsr_threshold = real()?,
                "min_confidence" => p.min_confidence = real()?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Params::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}
