//! Chain recognition and the greedy expanding-rectangle search.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{BitextSpace, Chain, Point, SearchRect};
use crate::matching::PointGenerator;
use crate::params::{LineFit, SimrParams};

/// Ambiguity level of `p` among `points`: points sharing its column plus
/// points sharing its row, minus two.
pub fn ambiguity_level(p: &Point, points: &[Point]) -> usize {
    let col = points.iter().filter(|q| q.xi == p.xi).count();
    let row = points.iter().filter(|q| q.yi == p.yi).count();
    (col + row).saturating_sub(2)
}

/// Ambiguity levels for every point, computed in one pass.
pub fn ambiguity_levels(points: &[Point]) -> Vec<usize> {
    let mut cols: HashMap<usize, usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    for p in points {
        *cols.entry(p.xi).or_default() += 1;
        *rows.entry(p.yi).or_default() += 1;
    }
    points.iter().map(|p| cols[&p.xi] + rows[&p.yi] - 2).collect()
}

/// Drops points whose ambiguity level within `points` exceeds `max_pal`.
pub fn filter_ambiguous(points: &[Point], max_pal: usize) -> Vec<Point> {
    ambiguity_levels(points)
        .into_iter()
        .zip(points)
        .filter(|(level, _)| *level <= max_pal)
        .map(|(_, p)| *p)
        .collect()
}

/// Points ordered by signed displacement from the diagonal of `space`;
/// ties fall back to x, then y.
pub fn sort_by_displacement(points: &[Point], space: &BitextSpace) -> Vec<Point> {
    let mut keyed: Vec<(f64, Point)> = points
        .iter()
        .map(|p| (space.displacement(p.x, p.y), *p))
        .collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.x.total_cmp(&b.1.x))
            .then(a.1.y.total_cmp(&b.1.y))
    });
    keyed.into_iter().map(|(_, p)| p).collect()
}

/// The `n - k + 1` contiguous length-`k` windows of the displacement order.
pub fn enumerate_windows(points: &[Point], k: usize, space: &BitextSpace) -> Vec<Vec<Point>> {
    if k == 0 || points.len() < k {
        return Vec::new();
    }
    let sorted = sort_by_displacement(points, space);
    sorted.windows(k).map(<[Point]>::to_vec).collect()
}

/// Ordinary least-squares fit of y on x and the RMS perpendicular distance
/// of the points from that line.
pub fn chain_stats(points: &[Point]) -> Result<Chain> {
    fit_chain(points, LineFit::Ordinary)
}

/// Like [`chain_stats`] with a choice of line fit.
pub fn fit_chain(points: &[Point], fit: LineFit) -> Result<Chain> {
    if points.len() < 2 {
        return Err(Error::domain("a chain needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("degenerate chain: all points share one x coordinate"));
    }
    let slope = match fit {
        LineFit::Ordinary => sxy / sxx,
        // major axis of the scatter
        LineFit::Total if sxy == 0.0 => {
            if sxx >= syy {
                0.0
            } else {
                return Err(Error::domain("degenerate chain: vertical principal axis"));
            }
        }
        LineFit::Total => {
            let d = syy - sxx;
            (d + (d * d + 4.0 * sxy * sxy).sqrt()) / (2.0 * sxy)
        }
    };
    let intercept = my - slope * mx;
    let sq: f64 = points
        .iter()
        .map(|p| {
            let r = p.y - (slope * p.x + intercept);
            r * r / (1.0 + slope * slope)
        })
        .sum();
    Ok(Chain {
        points: points.to_vec(),
        slope,
        intercept,
        rms_dispersal: (sq / n).sqrt(),
        angle_deg: slope.atan().to_degrees(),
        window: 0,
    })
}

fn angle_deviation(chain: &Chain, diagonal_slope: f64) -> f64 {
    (chain.angle_deg - diagonal_slope.atan().to_degrees()).abs()
}

/// Linearity, constant-slope and injectivity filters.
pub fn accept_chain(chain: &Chain, params: &SimrParams, diagonal_slope: f64) -> bool {
    chain.rms_dispersal <= params.max_point_dispersal
        && angle_deviation(chain, diagonal_slope) <= params.max_angle_deviation
        && chain.is_injective()
}

/// Candidate chains for every window; windows with no x spread are skipped.
pub fn candidate_chains(points: &[Point], k: usize, space: &BitextSpace, fit: LineFit) -> Vec<Chain> {
    enumerate_windows(points, k, space)
        .into_iter()
        .enumerate()
        .filter_map(|(i, w)| {
            fit_chain(&w, fit).ok().map(|mut c| {
                c.window = i;
                c
            })
        })
        .collect()
}

/// The accepted candidate with the least dispersal. Ties go to the smaller
/// angle deviation, then the earlier window.
pub fn best_chain(candidates: &[Chain], params: &SimrParams, diagonal_slope: f64) -> Option<Chain> {
    candidates
        .iter()
        .filter(|c| accept_chain(c, params, diagonal_slope))
        .min_by(|a, b| {
            a.rms_dispersal
                .total_cmp(&b.rms_dispersal)
                .then(angle_deviation(a, diagonal_slope).total_cmp(&angle_deviation(b, diagonal_slope)))
                .then(a.window.cmp(&b.window))
        })
        .cloned()
}

/// Region of the bitext space that a search may explore. Its diagonal is the
/// reference for displacement sorting and the angle filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchArea {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    /// Whether points on the far (right/top) edges count as inside.
    pub closed: bool,
}

impl SearchArea {
    pub fn whole(space: &BitextSpace) -> Self {
        SearchArea {
            x0: 0.0,
            y0: 0.0,
            x1: space.width,
            y1: space.height,
            closed: true,
        }
    }

    /// An open region, as used between or around first-pass anchors.
    pub fn region(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        SearchArea {
            x0,
            y0,
            x1,
            y1,
            closed: false,
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn slope(&self) -> f64 {
        self.height() / self.width()
    }

    fn local_space(&self) -> BitextSpace {
        BitextSpace {
            width: self.width(),
            height: self.height(),
        }
    }
}

/// Token indices already claimed by accepted chains.
#[derive(Debug, Clone, Default)]
pub struct Taken {
    pub xs: HashSet<usize>,
    pub ys: HashSet<usize>,
}

impl Taken {
    pub fn from_chains<'c>(chains: impl IntoIterator<Item = &'c Chain>) -> Self {
        let mut t = Taken::default();
        for c in chains {
            t.claim(c);
        }
        t
    }

    pub fn claim(&mut self, chain: &Chain) {
        for p in &chain.points {
            self.xs.insert(p.xi);
            self.ys.insert(p.yi);
        }
    }

    fn allows(&self, p: &Point) -> bool {
        !self.xs.contains(&p.xi) && !self.ys.contains(&p.yi)
    }
}

/// Grows a rectangle from `anchor` until a chain is accepted or the
/// rectangle covers the rest of `area`.
pub fn find_next_chain(
    gen: &PointGenerator<'_>,
    params: &SimrParams,
    area: &SearchArea,
    anchor: (f64, f64),
    taken: &Taken,
) -> Option<Chain> {
    let slope = area.slope();
    let local = area.local_space();
    let k = params.chain_size;
    let mut width = params.initial_rect_frac * area.width();
    if params.initial_rect_max > 0.0 {
        width = width.min(params.initial_rect_max);
    }
    width = width.max(f64::MIN_POSITIVE);
    let (ax, ay) = anchor;
    loop {
        let reach_x = ax + width;
        let reach_y = ay + width * slope;
        let rect = SearchRect {
            x0: ax,
            y0: ay,
            width: reach_x.min(area.x1) - ax,
            height: reach_y.min(area.y1) - ay,
        };
        if rect.width >= 0.0 && rect.height >= 0.0 {
            let points: Vec<Point> = gen
                .points_where(&rect, |x, y| {
                    x > ax && y > ay && (area.closed || (x < area.x1 && y < area.y1))
                })
                .into_iter()
                .filter(|p| taken.allows(p))
                .collect();
            let points = filter_ambiguous(&points, params.max_pal);
            if points.len() >= k {
                let shifted: Vec<Point> = points
                    .iter()
                    .map(|p| Point::new(p.x - area.x0, p.y - area.y0, p.xi, p.yi))
                    .collect();
                let candidates = candidate_chains(&shifted, k, &local, params.line_fit);
                if let Some(mut best) = best_chain(&candidates, params, slope) {
                    for p in &mut best.points {
                        p.x += area.x0;
                        p.y += area.y0;
                    }
                    best.intercept += area.y0 - best.slope * area.x0;
                    return Some(best);
                }
            }
        }
        if reach_x >= area.x1 && reach_y >= area.y1 {
            return None;
        }
        width *= params.growth_factor;
    }
}

/// Chains found by the greedy search, one after another, starting at `start`.
pub fn trace_area(
    gen: &PointGenerator<'_>,
    params: &SimrParams,
    area: &SearchArea,
    taken: &mut Taken,
) -> Vec<Chain> {
    let mut anchor = (area.x0, area.y0);
    let mut chains = Vec::new();
    while let Some(chain) = find_next_chain(gen, params, area, anchor, taken) {
        anchor = chain.top_right();
        taken.claim(&chain);
        chains.push(chain);
    }
    chains
}

/// The first pass: a greedy trace from the origin of the whole space.
pub fn trace_first_pass(gen: &PointGenerator<'_>, params: &SimrParams, space: &BitextSpace) -> Vec<Chain> {
    let mut taken = Taken::default();
    trace_area(gen, params, &SearchArea::whole(space), &mut taken)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Token, TokenizedText};
    use crate::matching::MatchConfig;

    fn pt(x: f64, y: f64, xi: usize, yi: usize) -> Point {
        Point::new(x, y, xi, yi)
    }

    #[test]
    fn ambiguity_examples() {
        let alone = [pt(1.0, 1.0, 0, 0), pt(2.0, 2.0, 1, 1)];
        assert_eq!(ambiguity_level(&alone[0], &alone), 0);

        let column = [pt(5.0, 1.0, 3, 0), pt(5.0, 2.0, 3, 1), pt(5.0, 3.0, 3, 2)];
        assert_eq!(ambiguity_levels(&column), vec![2, 2, 2]);

        let grid = [
            pt(1.0, 1.0, 0, 0),
            pt(1.0, 2.0, 0, 1),
            pt(2.0, 1.0, 1, 0),
            pt(2.0, 2.0, 1, 1),
        ];
        for p in &grid {
            // brute-force count: X = 2, Y = 2
            let x = grid.iter().filter(|q| q.xi == p.xi).count();
            let y = grid.iter().filter(|q| q.yi == p.yi).count();
            assert_eq!(ambiguity_level(p, &grid), x + y - 2);
            assert_eq!(ambiguity_level(p, &grid), 2);
        }
    }

    #[test]
    fn filter_examples() {
        let column = [pt(5.0, 1.0, 3, 0), pt(5.0, 2.0, 3, 1), pt(5.0, 3.0, 3, 2)];
        assert!(filter_ambiguous(&column, 0).is_empty());
        assert_eq!(filter_ambiguous(&column, 10), column.to_vec());
        // a smaller rectangle sees only one of the column points
        let inside: Vec<Point> = column.iter().copied().filter(|p| p.y < 1.5).collect();
        assert_eq!(filter_ambiguous(&inside, 0), inside);
    }

    #[test]
    fn window_counts() {
        let space = BitextSpace::new(100.0, 100.0).unwrap();
        let pts: Vec<Point> = (0..13).map(|i| pt(i as f64 * 7.0, i as f64 * 5.0 + 3.0, i, i)).collect();
        assert_eq!(enumerate_windows(&pts, 6, &space).len(), 8);
        assert_eq!(enumerate_windows(&pts[..6], 6, &space).len(), 1);
        assert!(enumerate_windows(&pts[..5], 6, &space).is_empty());
    }

    #[test]
    fn chain_stats_examples() {
        let diag: Vec<Point> = (0..6).map(|i| pt(i as f64 * 2.0, i as f64, i, i)).collect();
        let c = chain_stats(&diag).unwrap();
        assert!(c.rms_dispersal.abs() < 1e-12);
        assert!((c.angle_deg - 0.5f64.atan().to_degrees()).abs() < 1e-9);

        let bent = [(0., 0.), (1., 1.), (2., 2.), (3., 3.), (4., 4.), (5., 10.)];
        let pts: Vec<Point> = bent.iter().enumerate().map(|(i, &(x, y))| pt(x, y, i, i)).collect();
        let c = chain_stats(&pts).unwrap();
        // closed form: mean x 2.5, mean y 10/3, sxx 17.5, sxy 30
        assert!((c.slope - 12.0 / 7.0).abs() < 1e-12);
        assert!((c.intercept - (10.0 / 3.0 - 30.0 / 7.0)).abs() < 1e-12);
        assert!(c.rms_dispersal > 0.0);

        let two = [pt(0.0, 0.0, 0, 0), pt(3.0, 9.0, 1, 1)];
        assert_eq!(chain_stats(&two).unwrap().rms_dispersal, 0.0);

        let vertical = [pt(2.0, 0.0, 0, 0), pt(2.0, 5.0, 0, 1)];
        assert!(chain_stats(&vertical).is_err());
    }

    #[test]
    fn total_fit_example() {
        let pts = vec![pt(0.0, 0.0, 0, 0), pt(1.0, 2.0, 1, 1), pt(2.0, 1.0, 2, 2), pt(3.0, 3.0, 3, 3)];
        let o = fit_chain(&pts, LineFit::Ordinary).unwrap();
        let t = fit_chain(&pts, LineFit::Total).unwrap();
        assert!((o.slope - 0.8).abs() < 1e-12);
        assert!((t.slope - 1.0).abs() < 1e-12);
        assert!(t.intercept.abs() < 1e-12);
        assert!((t.rms_dispersal - 0.5).abs() < 1e-12);
        let tall = vec![pt(0.0, 0.0, 0, 0), pt(2.0, 0.0, 1, 1), pt(1.0, 2.0, 2, 2), pt(1.0, -2.0, 3, 3)];
        assert!(fit_chain(&tall, LineFit::Total).is_err());
    }

    #[test]
    fn accept_examples() {
        let params = SimrParams {
            max_point_dispersal: 2.0,
            max_angle_deviation: 5.0,
            ..SimrParams::default()
        };
        let diag: Vec<Point> = (0..6).map(|i| pt(i as f64, i as f64, i, i)).collect();
        assert!(accept_chain(&chain_stats(&diag).unwrap(), &params, 1.0));

        let mut dup = diag.clone();
        dup[3] = pt(2.0, 3.5, 9, 9);
        let c = chain_stats(&dup).unwrap();
        assert!(!c.is_injective());
        assert!(!accept_chain(&c, &SimrParams { max_point_dispersal: 100.0, max_angle_deviation: 90.0, ..params }, 1.0));

        // 45 degrees against a diagonal of slope 0.5 (26.57 degrees)
        assert!(!accept_chain(&chain_stats(&diag).unwrap(), &params, 0.5));
    }

    #[test]
    fn best_chain_examples() {
        let params = SimrParams::default();
        let make = |disp: f64, window: usize| Chain {
            points: vec![pt(0.0, 0.0, 0, 0), pt(1.0, 1.0, 1, 1)],
            slope: 1.0,
            intercept: 0.0,
            rms_dispersal: disp,
            angle_deg: 45.0,
            window,
        };
        let one = [make(0.3, 0)];
        assert_eq!(best_chain(&one, &params, 1.0).unwrap().window, 0);
        let two = [make(0.5, 0), make(0.1, 1)];
        assert_eq!(best_chain(&two, &params, 1.0).unwrap().rms_dispersal, 0.1);
        let tie = [make(0.2, 3), make(0.2, 1)];
        assert_eq!(best_chain(&tie, &params, 1.0).unwrap().window, 1);
        assert!(best_chain(&[make(100.0, 0)], &params, 1.0).is_none());
    }

    /// 13 points around the diagonal; six of them (displacement ranks 5..10)
    /// lie close to one line parallel to the diagonal.
    fn figure_four() -> (BitextSpace, Vec<Point>) {
        let space = BitextSpace::new(200.0, 200.0).unwrap();
        let s2 = 2f64.sqrt();
        let on_line = |t: f64, d: f64| (t - d / s2 * 1.0, t + d / s2);
        let mut pts = Vec::new();
        // scattered points with distinct displacements
        let scatter = [(20.0, -40.0), (35.0, -25.0), (50.0, -14.0), (65.0, -6.0)];
        for &(t, d) in &scatter {
            let (x, y) = on_line(t, d);
            pts.push((x, y));
        }
        // the true chain: displacement within [2.0, 2.6]
        let chain = [(30.0, 2.0), (45.0, 2.1), (60.0, 2.2), (75.0, 2.3), (90.0, 2.5), (105.0, 2.6)];
        for &(t, d) in &chain {
            pts.push(on_line(t, d));
        }
        let more = [(40.0, 9.0), (70.0, 17.0), (55.0, 30.0)];
        for &(t, d) in &more {
            pts.push(on_line(t, d));
        }
        let points = pts
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| pt(x, y, i, i))
            .collect();
        (space, points)
    }

    #[test]
    fn figure_four_best_window_is_fifth() {
        let (space, points) = figure_four();
        let params = SimrParams {
            max_point_dispersal: 5.0,
            max_angle_deviation: 20.0,
            chain_size: 6,
            ..SimrParams::default()
        };
        let candidates = candidate_chains(&points, 6, &space, LineFit::Ordinary);
        assert_eq!(candidates.len(), 8);
        let best = best_chain(&candidates, &params, space.slope()).unwrap();
        assert_eq!(best.window + 1, 5);

        // oracle: dispersal of every window by direct perpendicular-distance
        // computation against an independently fitted line
        let sorted = sort_by_displacement(&points, &space);
        let disp = |w: &[Point]| {
            let n = w.len() as f64;
            let mx = w.iter().map(|p| p.x).sum::<f64>() / n;
            let my = w.iter().map(|p| p.y).sum::<f64>() / n;
            let b = w.iter().map(|p| (p.x - mx) * (p.y - my)).sum::<f64>()
                / w.iter().map(|p| (p.x - mx).powi(2)).sum::<f64>();
            let a = my - b * mx;
            (w.iter().map(|p| (p.y - a - b * p.x).powi(2) / (1.0 + b * b)).sum::<f64>() / n).sqrt()
        };
        let oracle_best = sorted
            .windows(6)
            .enumerate()
            .min_by(|a, b| disp(a.1).total_cmp(&disp(b.1)))
            .unwrap()
            .0;
        assert_eq!(oracle_best, 4);
    }

    fn text(words: &[(&str, usize)], len: usize) -> TokenizedText {
        TokenizedText::new(
            words
                .iter()
                .map(|&(w, s)| Token::new(w, s, w.chars().count()).unwrap())
                .collect(),
            len,
        )
        .unwrap()
    }

    fn word(i: usize) -> String {
        // distinct three-letter words share at most two letters: LCSR <= 2/3
        let c = ['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z'];
        format!("{}{}{}", c[i % 14], c[(i / 14) % 14], c[(i / 196) % 14])
    }

    #[test]
    fn anchor_at_terminus_finds_nothing() {
        let x = text(&[("alpha", 0)], 10);
        let y = text(&[("alpha", 0)], 10);
        let cfg = MatchConfig::cognates(0.7);
        let gen = PointGenerator::new(&x, &y, &cfg);
        let space = BitextSpace::new(10.0, 10.0).unwrap();
        let area = SearchArea::whole(&space);
        let r = find_next_chain(&gen, &SimrParams::default(), &area, (10.0, 10.0), &Taken::default());
        assert!(r.is_none());
    }

    #[test]
    fn planted_chain_found_after_expansion() {
        // 40 non-matching filler words on each side, then 8 shared words
        // starting at character 2000 on both axes
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..8 {
            let w = word(i + 500);
            xs.push((w.clone(), 2000 + i * 10));
            ys.push((w, 2000 + i * 10));
        }
        let xw: Vec<(&str, usize)> = xs.iter().map(|(w, s)| (w.as_str(), *s)).collect();
        let yw: Vec<(&str, usize)> = ys.iter().map(|(w, s)| (w.as_str(), *s)).collect();
        let x = text(&xw, 4000);
        let y = text(&yw, 4000);
        let cfg = MatchConfig::cognates(0.7);
        let gen = PointGenerator::new(&x, &y, &cfg);
        let space = BitextSpace::for_texts(&x, &y).unwrap();
        let params = SimrParams { chain_size: 8, ..SimrParams::default() };
        let chain = find_next_chain(&gen, &params, &SearchArea::whole(&space), (0.0, 0.0), &Taken::default()).unwrap();
        assert!(gen.calls() > 1, "needed at least one expansion");
        assert_eq!(chain.size(), 8);
        assert!(chain.points.iter().all(|p| p.x == p.y && p.x >= 2000.0));
    }

    #[test]
    fn self_bitext_trace_covers_all_tokens() {
        let words: Vec<(String, usize)> = (0..64).map(|i| (word(i), i * 8)).collect();
        let w: Vec<(&str, usize)> = words.iter().map(|(a, b)| (a.as_str(), *b)).collect();
        let x = text(&w, 64 * 8);
        let cfg = MatchConfig::cognates(0.7);
        let gen = PointGenerator::new(&x, &x, &cfg);
        let space = BitextSpace::for_texts(&x, &x).unwrap();
        let chains = trace_first_pass(&gen, &SimrParams { chain_size: 8, ..SimrParams::default() }, &space);
        let found: usize = chains.iter().map(Chain::size).sum();
        assert_eq!(found, 64);
        for c in &chains {
            assert!(c.points.iter().all(|p| p.x == p.y));
        }
        // anchors strictly increase
        for w in chains.windows(2) {
            let (a, b) = (w[0].top_right(), w[1].top_right());
            assert!(b.0 > a.0 && b.1 > a.1);
        }
    }

    #[test]
    fn no_matches_gives_empty_trace() {
        let x = text(&[("aaaa", 0), ("bbbb", 5)], 10);
        let y = text(&[("cccc", 0), ("dddd", 5)], 10);
        let cfg = MatchConfig::cognates(0.7);
        let gen = PointGenerator::new(&x, &y, &cfg);
        let space = BitextSpace::for_texts(&x, &y).unwrap();
        assert!(trace_first_pass(&gen, &SimrParams::default(), &space).is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn points() -> impl Strategy<Value = Vec<Point>> {
            prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 2..12).prop_map(|v| {
                v.into_iter().enumerate().map(|(i, (x, y))| pt(x, y, i, i)).collect()
            })
        }

        proptest! {
            #[test]
            fn window_count(pts in points(), k in 1usize..8) {
                let space = BitextSpace::new(100.0, 80.0).unwrap();
                let expected = if pts.len() >= k { pts.len() - k + 1 } else { 0 };
                prop_assert_eq!(enumerate_windows(&pts, k, &space).len(), expected);
            }

            #[test]
            fn acceptance_monotone_in_thresholds(pts in points(), d in 0.0f64..20.0, a in 0.0f64..40.0, dd in 0.0f64..10.0, da in 0.0f64..10.0) {
                if let Ok(c) = chain_stats(&pts) {
                    let lo = SimrParams { max_point_dispersal: d, max_angle_deviation: a, ..SimrParams::default() };
                    let hi = SimrParams { max_point_dispersal: d + dd, max_angle_deviation: a + da, ..lo };
                    if accept_chain(&c, &lo, 0.8) {
                        prop_assert!(accept_chain(&c, &hi, 0.8));
                    }
                }
            }

            #[test]
            fn total_fit_never_more_dispersed(pts in points()) {
                if let (Ok(o), Ok(t)) = (fit_chain(&pts, LineFit::Ordinary), fit_chain(&pts, LineFit::Total)) {
                    prop_assert!(t.rms_dispersal <= o.rms_dispersal + 1e-9 * (1.0 + o.rms_dispersal));
                }
            }

            #[test]
            fn filter_keeps_only_low_ambiguity(raw in prop::collection::vec((0usize..5, 0usize..5), 0..20), pal in 0usize..4) {
                let mut seen = std::collections::HashSet::new();
                let pts: Vec<Point> = raw.into_iter().filter(|c| seen.insert(*c))
                    .map(|(i, j)| pt(i as f64, j as f64, i, j)).collect();
                let kept = filter_ambiguous(&pts, pal);
                for p in &pts {
                    prop_assert_eq!(kept.contains(p), ambiguity_level(p, &pts) <= pal);
                }
            }
        }
    }
}
