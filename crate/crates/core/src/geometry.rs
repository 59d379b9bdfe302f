//! Bitext-space primitives: tokens with character positions, correspondence
//! points, chains and the injective piecewise-linear bitext map.

use crate::error::{Error, Result};

/// A word token with its character extent in the original text.
///
/// Offsets count Unicode scalar values, not bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Case-folded surface form.
    pub surface: String,
    pub start: usize,
    pub len: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, start: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::input("token length must be at least 1"));
        }
        Ok(Token {
            surface: surface.into(),
            start,
            len,
        })
    }

    /// Position of a token is the mean position of its characters.
    pub fn mean_pos(&self) -> f64 {
        self.start as f64 + (self.len as f64 - 1.0) / 2.0
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Free-function form of [`Token::mean_pos`].
pub fn mean_position(token: &Token) -> f64 {
    token.mean_pos()
}

/// The tokens of one axis of a bitext, in text order.
#[derive(Debug, Clone, Default)]
pub struct TokenizedText {
    tokens: Vec<Token>,
    positions: Vec<f64>,
    char_len: usize,
}

impl TokenizedText {
    /// Builds a tokenized text, checking that tokens are ordered,
    /// non-overlapping and inside `char_len`.
    pub fn new(tokens: Vec<Token>, char_len: usize) -> Result<Self> {
        for pair in tokens.windows(2) {
            if pair[1].start < pair[0].end() {
                return Err(Error::input(format!(
                    "tokens overlap or are out of order at offset {}",
                    pair[1].start
                )));
            }
        }
        if let Some(last) = tokens.last() {
            if last.end() > char_len {
                return Err(Error::input("token extends past end of text"));
            }
        }
        let positions = tokens.iter().map(Token::mean_pos).collect();
        Ok(TokenizedText {
            tokens,
            positions,
            char_len,
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Mean positions, parallel to [`tokens`](Self::tokens).
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Index range of tokens whose mean position lies in `[lo, hi]`.
    pub fn range_between(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.positions.partition_point(|&p| p < lo);
        let end = self.positions.partition_point(|&p| p <= hi);
        start..end.max(start)
    }

    pub fn mean_token_len(&self) -> f64 {
        if self.tokens.is_empty() {
            return 0.0;
        }
        self.tokens.iter().map(|t| t.len as f64).sum::<f64>() / self.tokens.len() as f64
    }
}

/// The rectangle spanned by the two texts of a bitext, measured in characters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitextSpace {
    pub width: f64,
    pub height: f64,
}

impl BitextSpace {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return Err(Error::domain(format!(
                "bitext space must have positive size, got {width}x{height}"
            )));
        }
        Ok(BitextSpace { width, height })
    }

    pub fn for_texts(x: &TokenizedText, y: &TokenizedText) -> Result<Self> {
        BitextSpace::new(x.char_len() as f64, y.char_len() as f64)
    }

    /// Slope of the main diagonal.
    pub fn slope(&self) -> f64 {
        self.height / self.width
    }

    pub fn diagonal_len(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    /// Signed perpendicular distance of `(x, y)` from the main diagonal,
    /// positive above it.
    pub fn displacement(&self, x: f64, y: f64) -> f64 {
        (y * self.width - x * self.height) / self.diagonal_len()
    }
}

/// A candidate point of correspondence between token `xi` of the x text and
/// token `yi` of the y text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub xi: usize,
    pub yi: usize,
}

impl Point {
    pub fn new(x: f64, y: f64, xi: usize, yi: usize) -> Self {
        Point { x, y, xi, yi }
    }
}

pub fn perp_displacement(p: &Point, space: &BitextSpace) -> f64 {
    space.displacement(p.x, p.y)
}

/// A fixed-size group of points together with its least-squares statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub points: Vec<Point>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS perpendicular distance of the points from the least-squares line.
    pub rms_dispersal: f64,
    pub angle_deg: f64,
    /// Start index of the displacement-sorted window this chain came from.
    pub window: usize,
}

impl Chain {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// `(max x, max y)` over the chain's points.
    pub fn top_right(&self) -> (f64, f64) {
        self.points
            .iter()
            .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(mx, my), p| {
                (mx.max(p.x), my.max(p.y))
            })
    }

    pub fn is_injective(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.points[i], &self.points[j]);
                if a.x == b.x || a.y == b.y {
                    return false;
                }
            }
        }
        true
    }
}

/// Axis-aligned search region anchored at its lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl SearchRect {
    /// A rectangle at `anchor` whose diagonal is parallel to a diagonal of
    /// slope `slope`.
    pub fn at(anchor: (f64, f64), width: f64, slope: f64) -> Self {
        SearchRect {
            x0: anchor.0,
            y0: anchor.1,
            width,
            height: width * slope,
        }
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.width
    }

    pub fn y1(&self) -> f64 {
        self.y0 + self.height
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1() && y >= self.y0 && y <= self.y1()
    }

    pub fn contains_rect(&self, other: &SearchRect) -> bool {
        other.x0 >= self.x0 && other.y0 >= self.y0 && other.x1() <= self.x1() && other.y1() <= self.y1()
    }
}

/// A vertex of the piecewise-linear map. `mer` marks corners of a minimum
/// enclosing rectangle that replaced non-monotonic points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub x: f64,
    pub y: f64,
    pub mer: bool,
}

impl Anchor {
    pub fn new(x: f64, y: f64) -> Self {
        Anchor { x, y, mer: false }
    }
}

/// Minimum enclosing rectangle of a non-monotonic run of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Mer {
    pub lower_left: (f64, f64),
    pub upper_right: (f64, f64),
    pub enclosed: Vec<Point>,
}

/// Injective piecewise-linear map from `[0, width]` onto `[0, height]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitextMap {
    space: BitextSpace,
    anchors: Vec<Anchor>,
    mers: Vec<Mer>,
}

impl BitextMap {
    /// The origin-to-terminus diagonal.
    pub fn diagonal(space: BitextSpace) -> Self {
        BitextMap {
            space,
            anchors: vec![Anchor::new(0.0, 0.0), Anchor::new(space.width, space.height)],
            mers: Vec::new(),
        }
    }

    /// Validates that anchors start at the origin, end at the terminus and
    /// increase strictly in both coordinates.
    pub fn from_anchors(space: BitextSpace, anchors: Vec<Anchor>, mers: Vec<Mer>) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::input("a map needs at least two anchors"));
        }
        let first = anchors[0];
        let last = anchors[anchors.len() - 1];
        if first.x != 0.0 || first.y != 0.0 {
            return Err(Error::input("first anchor must be the origin"));
        }
        if last.x != space.width || last.y != space.height {
            return Err(Error::input("last anchor must be the terminus"));
        }
        for (i, w) in anchors.windows(2).enumerate() {
            if !(w[0].x < w[1].x && w[0].y < w[1].y) {
                return Err(Error::input(format!(
                    "anchors {} and {} are not strictly increasing: ({}, {}) -> ({}, {})",
                    i,
                    i + 1,
                    w[0].x,
                    w[0].y,
                    w[1].x,
                    w[1].y
                )));
            }
        }
        Ok(BitextMap { space, anchors, mers })
    }

    pub fn space(&self) -> BitextSpace {
        self.space
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn mers(&self) -> &[Mer] {
        &self.mers
    }

    /// Anchors other than origin, terminus and MER corners.
    pub fn interior_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.anchors.len();
        self.anchors[1..n - 1]
            .iter()
            .filter(|a| !a.mer)
            .map(|a| (a.x, a.y))
    }

    /// Maps an x position to y by interpolating between bracketing anchors.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.space.width).contains(&x) {
            return Err(Error::domain(format!(
                "x = {x} outside [0, {}]",
                self.space.width
            )));
        }
        Ok(interpolate(&self.anchors, x, |a| (a.x, a.y)))
    }

    /// Inverse of [`evaluate`](Self::evaluate).
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..=self.space.height).contains(&y) {
            return Err(Error::domain(format!(
                "y = {y} outside [0, {}]",
                self.space.height
            )));
        }
        Ok(interpolate(&self.anchors, y, |a| (a.y, a.x)))
    }
}

pub fn evaluate_map(map: &BitextMap, x: f64) -> Result<f64> {
    map.evaluate(x)
}

fn interpolate(anchors: &[Anchor], t: f64, coords: impl Fn(&Anchor) -> (f64, f64)) -> f64 {
    let i = anchors.partition_point(|a| coords(a).0 < t);
    if i == 0 {
        return coords(&anchors[0]).1;
    }
    let (t1, v1) = coords(&anchors[i.min(anchors.len() - 1)]);
    if t1 == t {
        return v1;
    }
    let (t0, v0) = coords(&anchors[i - 1]);
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}
