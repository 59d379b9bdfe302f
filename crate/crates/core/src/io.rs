//! Plain-text file formats. All offsets count characters (Unicode scalar
//! values), not bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{Anchor, BitextMap, BitextSpace, Mer};
use crate::gsa::{AlignedBlock, Alignment};

fn parse_err(origin: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines that are not `#` comments, numbered from 1.
fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn real(origin: &str, line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| parse_err(origin, line, format!("`{s}`: {e}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(origin, line, format!("`{s}` is not finite")))
    }
}

const MAP_MAGIC: &str = "#bimap v1";

/// Header line, then one `x<TAB>y` line per anchor; MER corners end in
/// `<TAB>M`.
pub fn format_map(map: &BitextMap) -> String {
    let s = map.space();
    let mut out = format!("{MAP_MAGIC} width={} height={}\n", s.width, s.height);
    for a in map.anchors() {
        let _ = write!(out, "{}\t{}", a.x, a.y);
        if a.mer {
            out.push_str("\tM");
        }
        out.push('\n');
    }
    out
}

pub fn parse_map(src: &str, origin: &str) -> Result<BitextMap> {
    let header = src.lines().next().unwrap_or_default().trim();
    let rest = header
        .strip_prefix(MAP_MAGIC)
        .ok_or_else(|| parse_err(origin, 1, format!("expected `{MAP_MAGIC} width=W height=H`")))?;
    let (mut w, mut h) = (None, None);
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("width", v)) => w = Some(real(origin, 1, v)?),
            Some(("height", v)) => h = Some(real(origin, 1, v)?),
            _ => return Err(parse_err(origin, 1, format!("unexpected header field `{field}`"))),
        }
    }
    let (w, h) = match (w, h) {
        (Some(w), Some(h)) => (w, h),
        _ => return Err(parse_err(origin, 1, "header lacks width or height")),
    };
    let space = BitextSpace::new(w, h)?;
    let mut anchors = Vec::new();
    for (n, line) in content_lines(src) {
        let mut f = line.split('\t');
        let x = real(origin, n, f.next().unwrap_or_default())?;
        let y = real(origin, n, f.next().ok_or_else(|| parse_err(origin, n, "expected x<TAB>y"))?)?;
        let mer = match f.next() {
            None => false,
            Some("M") => true,
            Some(other) => return Err(parse_err(origin, n, format!("unexpected field `{other}`"))),
        };
        anchors.push(Anchor { x, y, mer });
    }
    let corners: Vec<&Anchor> = anchors.iter().filter(|a| a.mer).collect();
    if corners.len() % 2 != 0 {
        return Err(parse_err(origin, 0, "MER corners must come in pairs"));
    }
    let mers = corners
        .chunks(2)
        .map(|c| Mer {
            lower_left: (c[0].x, c[0].y),
            upper_right: (c[1].x, c[1].y),
            enclosed: Vec::new(),
        })
        .collect();
    BitextMap::from_anchors(space, anchors, mers)
}

pub fn read_map(path: &Path) -> Result<BitextMap> {
    parse_map(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_map(path: &Path, map: &BitextMap) -> Result<()> {
    std::fs::write(path, format_map(map))?;
    Ok(())
}

/// `x<TAB>y` per line.
pub fn format_points(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for (x, y) in points {
        let _ = writeln!(out, "{x}\t{y}");
    }
    out
}

pub fn parse_points(src: &str, origin: &str) -> Result<Vec<(f64, f64)>> {
    content_lines(src)
        .map(|(n, line)| {
            let (x, y) = line
                .split_once(['\t', ' '])
                .ok_or_else(|| parse_err(origin, n, "expected x<TAB>y"))?;
            Ok((real(origin, n, x)?, real(origin, n, y)?))
        })
        .collect()
}

pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_points(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// One sentence-end offset per line.
pub fn format_boundaries(ends: &[usize]) -> String {
    let mut out = String::new();
    for e in ends {
        let _ = writeln!(out, "{e}");
    }
    out
}

pub fn parse_boundaries(src: &str, origin: &str) -> Result<Vec<usize>> {
    content_lines(src)
        .map(|(n, line)| {
            line.parse()
                .map_err(|e| parse_err(origin, n, format!("`{line}`: {e}")))
        })
        .collect()
}

pub fn read_boundaries(path: &Path) -> Result<Vec<usize>> {
    parse_boundaries(&std::fs::read_to_string(path)?, &path.display().to_string())
}

fn parse_range(origin: &str, n: usize, s: &str) -> Result<std::ops::Range<usize>> {
    if s == "-" {
        return Ok(0..0);
    }
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| parse_err(origin, n, format!("expected i..j or -, got `{s}`")))?;
    let a: usize = a.parse().map_err(|e| parse_err(origin, n, format!("`{a}`: {e}")))?;
    let b: usize = b.parse().map_err(|e| parse_err(origin, n, format!("`{b}`: {e}")))?;
    if b < a {
        return Err(parse_err(origin, n, format!("empty range `{s}`")));
    }
    Ok(a..b + 1)
}

/// Reads `i..j<TAB>k..l` blocks; an empty side (`-`) is placed where the
/// previous block ended.
pub fn parse_alignment(src: &str, origin: &str) -> Result<Alignment> {
    let (mut ex, mut ey) = (0, 0);
    let mut blocks = Vec::new();
    for (n, line) in content_lines(src) {
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(origin, n, "expected two ranges separated by a tab"))?;
        let mut x = parse_range(origin, n, a.trim())?;
        let mut y = parse_range(origin, n, b.trim())?;
        if x.is_empty() {
            x = ex..ex;
        }
        if y.is_empty() {
            y = ey..ey;
        }
        ex = x.end;
        ey = y.end;
        blocks.push(AlignedBlock::new(x, y));
    }
    Alignment::new(blocks, ex, ey)
}

pub fn read_alignment(path: &Path) -> Result<Alignment> {
    parse_alignment(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// `i<TAB>j` per cell.
pub fn format_relation(rel: &BTreeSet<(usize, usize)>) -> String {
    let mut out = String::new();
    for (i, j) in rel {
        let _ = writeln!(out, "{i}\t{j}");
    }
    out
}

/// One dev bitext: two texts and a reference correspondence file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub x_text: PathBuf,
    pub y_text: PathBuf,
    pub refs: PathBuf,
}

/// Tab-separated `x_text y_text refs` lines; relative paths are taken
/// from the manifest's directory.
pub fn parse_manifest(src: &str, origin: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    content_lines(src)
        .map(|(n, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(parse_err(origin, n, "expected x_text<TAB>y_text<TAB>refs"));
            }
            Ok(ManifestEntry {
                x_text: base.join(f[0]),
                y_text: base.join(f[1]),
                refs: base.join(f[2]),
            })
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&std::fs::read_to_string(path)?, &path.display().to_string(), base)
}
