//! Error metrics against reference correspondences and alignments.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::BitextMap;
use crate::gsa::Alignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Horizontal,
    Vertical,
    /// Perpendicular to the main diagonal.
    Perpendicular,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Horizontal, Metric::Vertical, Metric::Perpendicular];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Horizontal => "horizontal",
            Metric::Vertical => "vertical",
            Metric::Perpendicular => "perpendicular",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub metric: Metric,
    pub rms: f64,
    pub median_abs: f64,
    /// 99th percentile, nearest rank.
    pub p99: f64,
}

/// Absolute error of the map at every reference point.
pub fn point_errors(map: &BitextMap, refs: &[(f64, f64)], metric: Metric) -> Result<Vec<f64>> {
    let space = map.space();
    refs.iter()
        .map(|&(x, y)| {
            Ok(match metric {
                Metric::Horizontal => (map.inverse(y)? - x).abs(),
                Metric::Vertical => (map.evaluate(x)? - y).abs(),
                Metric::Perpendicular => (map.evaluate(x)? - y).abs() * space.width / space.diagonal_len(),
            })
        })
        .collect()
}

/// RMS, median and 99th percentile of absolute errors.
pub fn summarize(errors: &[f64], metric: Metric) -> Result<ErrorStats> {
    if errors.is_empty() {
        return Err(Error::domain("no reference points to evaluate against"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median_abs = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
    Ok(ErrorStats {
        metric,
        rms: (sorted.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt(),
        median_abs,
        p99: sorted[rank - 1],
    })
}

pub fn map_error(map: &BitextMap, refs: &[(f64, f64)], metric: Metric) -> Result<ErrorStats> {
    if refs.is_empty() {
        return Err(Error::domain("no reference points to evaluate against"));
    }
    summarize(&point_errors(map, refs, metric)?, metric)
}

/// Reference blocks with no identical block in `test`.
pub fn alignment_errors(test: &Alignment, reference: &Alignment) -> Result<usize> {
    if test.x_count() != reference.x_count() || test.y_count() != reference.y_count() {
        return Err(Error::input(format!(
            "alignments cover {}x{} and {}x{} sentences",
            test.x_count(),
            test.y_count(),
            reference.x_count(),
            reference.y_count()
        )));
    }
    let have: HashSet<_> = test.blocks().iter().collect();
    Ok(reference.blocks().iter().filter(|b| !have.contains(b)).count())
}
