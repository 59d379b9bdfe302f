//! Sentence alignment from correspondence points and sentence boundaries,
//! with length-based re-alignment of blocks that are not one-to-one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Sentence-end offsets on both axes. Cell `(i, j)` is x-sentence `i` by
/// y-sentence `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceGrid {
    x: Vec<usize>,
    y: Vec<usize>,
}

fn check_bounds(b: &[usize], len: usize, axis: &str) -> Result<()> {
    if b.is_empty() {
        return Err(Error::input(format!("no sentence boundaries on the {axis} axis")));
    }
    if b[0] == 0 || b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input(format!("{axis} boundaries must be positive and strictly increasing")));
    }
    if *b.last().unwrap() != len {
        return Err(Error::input(format!(
            "last {axis} boundary {} does not equal the text length {len}",
            b.last().unwrap()
        )));
    }
    Ok(())
}

impl SentenceGrid {
    /// `x_ends`/`y_ends` are sentence-end offsets; each axis must end at its
    /// text length.
    pub fn new(x_ends: Vec<usize>, y_ends: Vec<usize>, width: usize, height: usize) -> Result<Self> {
        check_bounds(&x_ends, width, "x")?;
        check_bounds(&y_ends, height, "y")?;
        Ok(SentenceGrid { x: x_ends, y: y_ends })
    }

    pub fn x_ends(&self) -> &[usize] {
        &self.x
    }

    pub fn y_ends(&self) -> &[usize] {
        &self.y
    }

    pub fn x_count(&self) -> usize {
        self.x.len()
    }

    pub fn y_count(&self) -> usize {
        self.y.len()
    }

    pub fn x_lens(&self) -> Vec<usize> {
        lens(&self.x)
    }

    pub fn y_lens(&self) -> Vec<usize> {
        lens(&self.y)
    }

    /// The cell holding `(x, y)`; a coordinate equal to a boundary belongs
    /// to the following sentence, except at the end of the text.
    pub fn cell(&self, x: f64, y: f64) -> Result<(usize, usize)> {
        let w = *self.x.last().unwrap() as f64;
        let h = *self.y.last().unwrap() as f64;
        if !(x >= 0.0 && x <= w && y >= 0.0 && y <= h) {
            return Err(Error::input(format!("point ({x}, {y}) lies outside the {w}x{h} grid")));
        }
        let find = |ends: &[usize], v: f64| ends.partition_point(|&e| e as f64 <= v).min(ends.len() - 1);
        Ok((find(&self.x, x), find(&self.y, y)))
    }
}

fn lens(ends: &[usize]) -> Vec<usize> {
    let mut prev = 0;
    ends.iter()
        .map(|&e| {
            let l = e - prev;
            prev = e;
            l
        })
        .collect()
}

/// A pair of contiguous sentence ranges; either may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignedBlock {
    pub x: Range<usize>,
    pub y: Range<usize>,
}

impl AlignedBlock {
    pub fn new(x: Range<usize>, y: Range<usize>) -> Self {
        AlignedBlock { x, y }
    }

    pub fn is_one_to_one(&self) -> bool {
        self.x.len() == 1 && self.y.len() == 1
    }

    /// `(x sentences, y sentences)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }
}

fn fmt_range(r: &Range<usize>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_empty() {
        f.write_str("-")
    } else {
        write!(f, "{}..{}", r.start, r.end - 1)
    }
}

impl fmt::Display for AlignedBlock {
    /// `i..j<TAB>k..l` with inclusive indices, `-` for an empty side.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_range(&self.x, f)?;
        f.write_str("\t")?;
        fmt_range(&self.y, f)
    }
}

/// Ordered blocks covering every sentence on both axes exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    blocks: Vec<AlignedBlock>,
}

impl Alignment {
    /// Checks that the blocks tile `0..nx` and `0..ny` in order.
    pub fn new(blocks: Vec<AlignedBlock>, nx: usize, ny: usize) -> Result<Self> {
        let (mut ex, mut ey) = (0, 0);
        for b in &blocks {
            if b.x.start != ex || b.y.start != ey || b.x.end < b.x.start || b.y.end < b.y.start {
                return Err(Error::input(format!(
                    "block {b} does not continue the alignment at ({ex}, {ey})"
                )));
            }
            if b.x.is_empty() && b.y.is_empty() {
                return Err(Error::input("an aligned block must cover at least one sentence"));
            }
            ex = b.x.end;
            ey = b.y.end;
        }
        if ex != nx || ey != ny {
            return Err(Error::input(format!(
                "alignment covers {ex}x{ey} sentences, expected {nx}x{ny}"
            )));
        }
        Ok(Alignment { blocks })
    }

    pub fn blocks(&self) -> &[AlignedBlock] {
        &self.blocks
    }

    pub fn x_count(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.x.end)
    }

    pub fn y_count(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.y.end)
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Cells `(x sentence, y sentence)` holding at least one point.
pub fn points_to_cells(points: &[Point], grid: &SentenceGrid) -> Result<BTreeSet<(usize, usize)>> {
    points.iter().map(|p| grid.cell(p.x, p.y)).collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A block together with whether any point supports it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateBlock {
    pub block: AlignedBlock,
    pub supported: bool,
}

/// Transitive closure of the relation, widened to contiguous rectangles
/// that do not overlap on either axis, with the uncovered stretches between
/// them emitted as unsupported blocks.
pub fn close_and_fill(relation: &BTreeSet<(usize, usize)>, nx: usize, ny: usize) -> Result<Vec<CandidateBlock>> {
    if let Some(&(i, j)) = relation.iter().find(|&&(i, j)| i >= nx || j >= ny) {
        return Err(Error::input(format!("cell ({i}, {j}) outside a {nx}x{ny} grid")));
    }
    let cells: Vec<(usize, usize)> = relation.iter().copied().collect();
    let mut dsu = Dsu((0..cells.len()).collect());
    let mut by_x: HashMap<usize, usize> = HashMap::new();
    let mut by_y: HashMap<usize, usize> = HashMap::new();
    for (n, &(i, j)) in cells.iter().enumerate() {
        if let Some(&m) = by_x.get(&i) {
            dsu.union(n, m);
        } else {
            by_x.insert(i, n);
        }
        if let Some(&m) = by_y.get(&j) {
            dsu.union(n, m);
        } else {
            by_y.insert(j, n);
        }
    }
    // bounding rectangle per component, as inclusive (x0, y0, x1, y1)
    let mut rects: HashMap<usize, (usize, usize, usize, usize)> = HashMap::new();
    for (n, &(i, j)) in cells.iter().enumerate() {
        let r = dsu.find(n);
        let e = rects.entry(r).or_insert((i, j, i, j));
        *e = (e.0.min(i), e.1.min(j), e.2.max(i), e.3.max(j));
    }
    let mut rects: Vec<_> = rects.into_values().collect();
    rects.sort_unstable();

    let mut stack: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(rects.len());
    for mut r in rects {
        while let Some(&top) = stack.last() {
            if top.2 < r.0 && top.3 < r.1 {
                break;
            }
            stack.pop();
            r = (top.0.min(r.0), top.1.min(r.1), top.2.max(r.2), top.3.max(r.3));
        }
        stack.push(r);
    }

    let mut out = Vec::with_capacity(2 * stack.len() + 1);
    let (mut ex, mut ey) = (0, 0);
    let gap = |out: &mut Vec<CandidateBlock>, ex: usize, ey: usize, x: usize, y: usize| {
        if x > ex || y > ey {
            out.push(CandidateBlock {
                block: AlignedBlock::new(ex..x, ey..y),
                supported: false,
            });
        }
    };
    for (x0, y0, x1, y1) in stack {
        gap(&mut out, ex, ey, x0, y0);
        out.push(CandidateBlock {
            block: AlignedBlock::new(x0..x1 + 1, y0..y1 + 1),
            supported: true,
        });
        ex = x1 + 1;
        ey = y1 + 1;
    }
    gap(&mut out, ex, ey, nx, ny);
    Ok(out)
}

/// Length-ratio model for sentence beads.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthModel {
    /// Expected y characters per x character.
    pub c: f64,
    /// Variance of that ratio per character.
    pub s2: f64,
    /// `(x sentences, y sentences, prior probability)` per bead type.
    pub beads: Vec<(usize, usize, f64)>,
}

impl Default for LengthModel {
    fn default() -> Self {
        LengthModel {
            c: 1.0,
            s2: 6.8,
            beads: vec![
                (1, 1, 0.89),
                (1, 0, 0.0099),
                (0, 1, 0.0099),
                (2, 1, 0.089),
                (1, 2, 0.089),
                (2, 2, 0.011),
            ],
        }
    }
}

impl LengthModel {
    /// Negative log probability of a bead with `l1` x characters and `l2`
    /// y characters.
    pub fn bead_cost(&self, l1: usize, l2: usize, prior: f64) -> f64 {
        let (l1, l2) = (l1 as f64, l2 as f64);
        let mean = (l1 + l2 / self.c) / 2.0;
        let delta = if mean > 0.0 {
            (l1 * self.c - l2) / (mean * self.s2).sqrt()
        } else {
            0.0
        };
        let tail = erfc(delta.abs() / std::f64::consts::SQRT_2).max(f64::MIN_POSITIVE);
        -prior.ln() - tail.ln()
    }
}

/// Best segmentation as `(x sentences, y sentences)` per bead, and its
/// confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthAlignment {
    pub beads: Vec<(usize, usize)>,
    pub cost: f64,
    /// (second-best cost - best cost) / number of beads; infinite when the
    /// segmentation is forced.
    pub confidence: f64,
}

/// Dynamic-programming length-based alignment keeping the two cheapest
/// paths into every cell.
pub fn length_align(x_lens: &[usize], y_lens: &[usize], model: &LengthModel) -> LengthAlignment {
    let (n, m) = (x_lens.len(), y_lens.len());
    let w = m + 1;
    let mut best = vec![[f64::INFINITY; 2]; (n + 1) * w];
    let mut back = vec![(0usize, 0usize); (n + 1) * w];
    let mut count = vec![0usize; (n + 1) * w];
    best[0][0] = 0.0;
    let prefix = |lens: &[usize]| {
        let mut p = vec![0usize; lens.len() + 1];
        for (i, l) in lens.iter().enumerate() {
            p[i + 1] = p[i] + l;
        }
        p
    };
    let (px, py) = (prefix(x_lens), prefix(y_lens));
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut two = [f64::INFINITY; 2];
            let mut arg = (0, 0);
            for &(a, b, prior) in &model.beads {
                if a > i || b > j {
                    continue;
                }
                let prev = best[(i - a) * w + (j - b)];
                if prev[0].is_infinite() {
                    continue;
                }
                let c = model.bead_cost(px[i] - px[i - a], py[j] - py[j - b], prior);
                for (rank, p) in prev.iter().enumerate() {
                    let v = p + c;
                    if v < two[0] {
                        two[1] = two[0];
                        two[0] = v;
                        if rank == 0 {
                            arg = (a, b);
                        }
                    } else if v < two[1] {
                        two[1] = v;
                    }
                }
            }
            best[i * w + j] = two;
            back[i * w + j] = arg;
            count[i * w + j] = count[(i - arg.0) * w + (j - arg.1)] + 1;
        }
    }
    let mut beads = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let b = back[i * w + j];
        beads.push(b);
        i -= b.0;
        j -= b.1;
    }
    beads.reverse();
    let end = best[n * w + m];
    let confidence = if end[1].is_infinite() {
        f64::INFINITY
    } else if beads.is_empty() {
        0.0
    } else {
        (end[1] - end[0]) / count[n * w + m] as f64
    };
    LengthAlignment {
        beads,
        cost: end[0],
        confidence,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsaOptions {
    pub min_confidence: f64,
    /// Re-align an unsupported block together with an adjacent supported
    /// block that is not one-to-one before falling back to each on its own.
    pub merge_empty: bool,
    pub model: LengthModel,
}

impl GsaOptions {
    pub fn new(min_confidence: f64) -> Self {
        GsaOptions {
            min_confidence,
            merge_empty: true,
            model: LengthModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsaOutput {
    pub alignment: Alignment,
    /// Cells holding at least one point.
    pub relation: BTreeSet<(usize, usize)>,
    /// Largest `(x, y)` block handed to the length model.
    pub largest_realigned: (usize, usize),
    /// Blocks replaced by a length-based re-alignment.
    pub replaced: usize,
}

struct Realigner<'a> {
    xl: Vec<usize>,
    yl: Vec<usize>,
    opts: &'a GsaOptions,
    largest: (usize, usize),
    replaced: usize,
}

impl Realigner<'_> {
    /// The length-based split of `block` if it is confident enough.
    fn try_split(&mut self, block: &AlignedBlock) -> Option<Vec<AlignedBlock>> {
        let shape = block.shape();
        if shape.0 * shape.1 > self.largest.0 * self.largest.1 {
            self.largest = shape;
        }
        let la = length_align(&self.xl[block.x.clone()], &self.yl[block.y.clone()], &self.opts.model);
        if la.confidence < self.opts.min_confidence {
            return None;
        }
        let (mut x, mut y) = (block.x.start, block.y.start);
        let parts = la
            .beads
            .iter()
            .map(|&(a, b)| {
                let part = AlignedBlock::new(x..x + a, y..y + b);
                x += a;
                y += b;
                part
            })
            .collect::<Vec<_>>();
        if parts.len() > 1 || parts[0] != *block {
            self.replaced += 1;
        }
        Some(parts)
    }

    fn single(&mut self, block: &AlignedBlock, out: &mut Vec<AlignedBlock>) {
        if block.is_one_to_one() {
            out.push(block.clone());
        } else if let Some(parts) = self.try_split(block) {
            out.extend(parts);
        } else {
            out.push(block.clone());
        }
    }
}

/// Points to cells, closure and gap filling, then confidence-gated
/// length-based re-alignment of every block that is not one-to-one.
pub fn gsa_align(points: &[Point], grid: &SentenceGrid, opts: &GsaOptions) -> Result<GsaOutput> {
    let relation = points_to_cells(points, grid)?;
    let candidates = close_and_fill(&relation, grid.x_count(), grid.y_count())?;
    let mut re = Realigner {
        xl: grid.x_lens(),
        yl: grid.y_lens(),
        opts,
        largest: (0, 0),
        replaced: 0,
    };
    let mut blocks = Vec::with_capacity(candidates.len());
    let mut i = 0;
    while i < candidates.len() {
        let c = &candidates[i];
        if opts.merge_empty && c.supported && !c.block.is_one_to_one() {
            let before = i > 0 && !candidates[i - 1].supported && blocks.last() == Some(&candidates[i - 1].block);
            let after = i + 1 < candidates.len() && !candidates[i + 1].supported;
            if before || after {
                let lo = if before { i - 1 } else { i };
                let hi = if after { i + 1 } else { i };
                let merged = AlignedBlock::new(
                    candidates[lo].block.x.start..candidates[hi].block.x.end,
                    candidates[lo].block.y.start..candidates[hi].block.y.end,
                );
                if let Some(parts) = re.try_split(&merged) {
                    if before {
                        blocks.pop();
                    }
                    blocks.extend(parts);
                    i = hi + 1;
                    continue;
                }
            }
        }
        re.single(&c.block, &mut blocks);
        i += 1;
    }
    let alignment = Alignment::new(blocks, grid.x_count(), grid.y_count())?;
    Ok(GsaOutput {
        alignment,
        relation,
        largest_realigned: re.largest,
        replaced: re.replaced,
    })
}
