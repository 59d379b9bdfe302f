//! Turning accepted chains into an injective bitext map, and the second
//! sweep that recovers non-monotonic segments and sandwiched chains.

use std::collections::HashSet;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::geometry::{Anchor, BitextMap, BitextSpace, Chain, Mer, Point};
use crate::matching::PointGenerator;
use crate::params::SimrParams;
use crate::search::{trace_area, SearchArea, Taken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

struct Block {
    ll: (f64, f64),
    ur: (f64, f64),
    points: Vec<Point>,
    fixed: bool,
}

impl Block {
    fn single(p: Point) -> Self {
        Block {
            ll: (p.x, p.y),
            ur: (p.x, p.y),
            points: vec![p],
            fixed: false,
        }
    }

    fn endpoint(x: f64, y: f64) -> Self {
        Block {
            ll: (x, y),
            ur: (x, y),
            points: Vec::new(),
            fixed: true,
        }
    }

    fn precedes(&self, other: &Block) -> bool {
        self.ur.0 < other.ll.0 && self.ur.1 < other.ll.1
    }

    fn absorb(&mut self, other: Block) {
        self.ll = (self.ll.0.min(other.ll.0), self.ll.1.min(other.ll.1));
        self.ur = (self.ur.0.max(other.ur.0), self.ur.1.max(other.ur.1));
        self.points.extend(other.points);
        self.fixed |= other.fixed;
    }
}

/// Builds the map anchors from points sorted by x. Runs that break
/// y-monotonicity are replaced by the lower-left and upper-right corners of
/// their minimum enclosing rectangle; overlapping rectangles are merged
/// until the anchors increase strictly in both coordinates.
///
/// Points on the border of the space cannot sit strictly between the origin
/// and the terminus and are dropped.
pub fn encapsulate_mers(points: &[Point], space: &BitextSpace) -> Result<BitextMap> {
    for p in points {
        if !space.contains(p.x, p.y) {
            return Err(Error::input(format!(
                "point ({}, {}) outside {}x{} bitext space",
                p.x, p.y, space.width, space.height
            )));
        }
    }
    let mut sorted: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.x > 0.0 && p.y > 0.0 && p.x < space.width && p.y < space.height)
        .collect();
    if sorted.len() < points.len() {
        debug!("dropped {} points on the border of the space", points.len() - sorted.len());
    }
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));

    let mut stack: Vec<Block> = vec![Block::endpoint(0.0, 0.0)];
    let incoming = sorted
        .into_iter()
        .map(Block::single)
        .chain(std::iter::once(Block::endpoint(space.width, space.height)));
    for mut block in incoming {
        while let Some(top) = stack.last() {
            if top.precedes(&block) {
                break;
            }
            let mut top = stack.pop().expect("non-empty");
            top.absorb(block);
            block = top;
        }
        stack.push(block);
    }

    let mut anchors = Vec::with_capacity(stack.len() + 2);
    let mut mers = Vec::new();
    for b in stack {
        if b.ll == b.ur {
            anchors.push(Anchor::new(b.ll.0, b.ll.1));
            continue;
        }
        if b.fixed {
            // an endpoint got swallowed: keep it exact and let its corner
            // coincide with the origin or terminus
            warn!("non-monotonic points merged with an endpoint of the space");
        }
        anchors.push(Anchor {
            x: b.ll.0,
            y: b.ll.1,
            mer: true,
        });
        anchors.push(Anchor {
            x: b.ur.0,
            y: b.ur.1,
            mer: true,
        });
        mers.push(Mer {
            lower_left: b.ll,
            upper_right: b.ur,
            enclosed: b.points,
        });
    }
    BitextMap::from_anchors(*space, anchors, mers)
}

/// Concatenates chain points, drops later duplicates of an x or y
/// coordinate and interpolates an injective map through what remains.
pub fn build_map(chains: &[Chain], space: &BitextSpace) -> Result<BitextMap> {
    let mut seen_x = HashSet::new();
    let mut seen_y = HashSet::new();
    let mut points = Vec::new();
    let mut dropped = 0;
    for chain in chains {
        for p in &chain.points {
            if seen_x.contains(&p.x.to_bits()) || seen_y.contains(&p.y.to_bits()) {
                dropped += 1;
                continue;
            }
            seen_x.insert(p.x.to_bits());
            seen_y.insert(p.y.to_bits());
            points.push(*p);
        }
    }
    if dropped > 0 {
        warn!("{dropped} points duplicate an earlier chain's coordinates and were dropped");
    }
    encapsulate_mers(&points, space)
}

/// An inter-anchor jump longer than the report threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub axis: Axis,
    pub start: f64,
    pub end: f64,
}

/// Every inter-anchor jump exceeding `threshold` characters on either axis.
pub fn gap_report(map: &BitextMap, threshold: f64) -> Vec<Gap> {
    let mut out = Vec::new();
    for w in map.anchors().windows(2) {
        if w[1].x - w[0].x > threshold {
            out.push(Gap {
                axis: Axis::X,
                start: w[0].x,
                end: w[1].x,
            });
        }
        if w[1].y - w[0].y > threshold {
            out.push(Gap {
                axis: Axis::Y,
                start: w[0].y,
                end: w[1].y,
            });
        }
    }
    out
}

/// Segments running from the lower-left to the upper-right corner of a MER.
fn inside_mer(map: &BitextMap) -> Vec<bool> {
    let corners: HashSet<(u64, u64, u64, u64)> = map
        .mers()
        .iter()
        .map(|m| {
            (
                m.lower_left.0.to_bits(),
                m.lower_left.1.to_bits(),
                m.upper_right.0.to_bits(),
                m.upper_right.1.to_bits(),
            )
        })
        .collect();
    map.anchors()
        .windows(2)
        .map(|w| corners.contains(&(w[0].x.to_bits(), w[0].y.to_bits(), w[1].x.to_bits(), w[1].y.to_bits())))
        .collect()
}

/// A search region formed by a horizontal gap of one map segment and a
/// vertical gap of another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapIntersection {
    pub area: SearchArea,
    /// Segment whose x range forms the region's x range.
    pub x_segment: usize,
    /// Segment whose y range forms the region's y range.
    pub y_segment: usize,
}

/// Intersections of x-gaps and y-gaps of the first-pass map that lie near
/// the map without touching it. Both gaps are at least the minimum size, so
/// each region can hold a chain.
pub fn find_gap_intersections(
    map: &BitextMap,
    min_gap_x: f64,
    min_gap_y: f64,
    proximity: f64,
) -> Vec<GapIntersection> {
    let a = map.anchors();
    let internal = inside_mer(map);
    let segs = a.len() - 1;
    let x_gaps: Vec<usize> = (0..segs)
        .filter(|&s| !internal[s] && a[s + 1].x - a[s].x >= min_gap_x)
        .collect();
    let y_gaps: Vec<usize> = (0..segs)
        .filter(|&s| !internal[s] && a[s + 1].y - a[s].y >= min_gap_y)
        .collect();
    let mut out = Vec::new();
    for &i in &x_gaps {
        for &j in &y_gaps {
            if i == j {
                continue;
            }
            // The region lies below-right of the map when j < i and above-left
            // when j > i; measure how far it is from the trace both ways.
            let dist = if j < i {
                (a[i].y - a[j + 1].y).min(a[i].x - a[j + 1].x)
            } else {
                (a[j].y - a[i + 1].y).min(a[j].x - a[i + 1].x)
            };
            let side = (a[i + 1].x - a[i].x).max(a[j + 1].y - a[j].y);
            if dist > 0.0 && dist <= proximity * side {
                out.push(GapIntersection {
                    area: SearchArea::region(a[i].x, a[j].y, a[i + 1].x, a[j + 1].y),
                    x_segment: i,
                    y_segment: j,
                });
            }
        }
    }
    out
}

/// Regions between consecutive anchors that are big enough for a chain.
pub fn sandwiched_regions(map: &BitextMap, min_gap_x: f64, min_gap_y: f64) -> Vec<SearchArea> {
    let a = map.anchors();
    let internal = inside_mer(map);
    (0..a.len() - 1)
        .filter(|&s| !internal[s] && a[s + 1].x - a[s].x >= min_gap_x && a[s + 1].y - a[s].y >= min_gap_y)
        .map(|s| SearchArea::region(a[s].x, a[s].y, a[s + 1].x, a[s + 1].y))
        .collect()
}

/// Minimum gap lengths `(x, y)` for the second pass: room for `k` tokens.
pub fn min_gaps(gen: &PointGenerator<'_>, params: &SimrParams) -> (f64, f64) {
    let k = params.chain_size as f64 * params.gap_min_factor;
    (
        k * gen.x_text().mean_token_len().max(1.0),
        k * gen.y_text().mean_token_len().max(1.0),
    )
}

#[derive(Debug, Clone)]
pub struct SecondPass {
    pub map: BitextMap,
    /// Chains accepted during the second sweep.
    pub chains: Vec<Chain>,
    /// Number of regions searched.
    pub regions: usize,
    /// Points generated during the second sweep.
    pub generated: usize,
}

/// Re-searches gap intersections near the first-pass map and the spaces
/// between accepted chains, judging chain angles against each region's own
/// diagonal, then rebuilds the map from all accepted chains.
pub fn second_pass(
    first: &[Chain],
    gen: &PointGenerator<'_>,
    params: &SimrParams,
    space: &BitextSpace,
) -> Result<SecondPass> {
    let first_map = build_map(first, space)?;
    let (gx, gy) = min_gaps(gen, params);
    let mut regions: Vec<SearchArea> = find_gap_intersections(&first_map, gx, gy, params.gap_proximity)
        .into_iter()
        .map(|g| g.area)
        .collect();
    regions.extend(sandwiched_regions(&first_map, gx, gy));

    let before = gen.generated();
    let mut taken = Taken::from_chains(first);
    let mut found = Vec::new();
    for area in &regions {
        found.extend(trace_area(gen, params, area, &mut taken));
    }
    let generated = gen.generated() - before;
    debug!(
        "second pass: {} regions, {} new chains, {} points generated",
        regions.len(),
        found.len(),
        generated
    );
    let map = if found.is_empty() {
        first_map
    } else {
        let all: Vec<Chain> = first.iter().cloned().chain(found.iter().cloned()).collect();
        build_map(&all, space)?
    };
    Ok(SecondPass {
        map,
        chains: found,
        regions: regions.len(),
        generated,
    })
}
