//! Seeded synthetic bitexts with a planted map and alignment.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{BitextMap, BitextSpace, Point};
use crate::gsa::{AlignedBlock, Alignment, SentenceGrid};
use crate::mapping::{encapsulate_mers, Axis};

/// Text missing from `axis`; `length` characters appear on the other axis
/// only, starting near x offset `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omission {
    pub axis: Axis,
    pub at: usize,
    pub length: usize,
}

/// Two adjacent runs of about `length` x characters each, starting near x
/// offset `at`, whose order is swapped in the y text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Switch {
    pub at: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    /// Approximate length of the x text in characters.
    pub x_chars: usize,
    pub vocab_size: usize,
    /// Fraction of word types whose y form resembles the x form.
    pub cognate_density: f64,
    /// Per y word: replaced by a cognate of a nearby, unrelated x word.
    pub stray_rate: f64,
    pub deletion_rate: f64,
    pub insertion_rate: f64,
    pub swap_rate: f64,
    /// Number of frequent word types with identical forms on both sides.
    pub frequent_types: usize,
    /// Per word and side: chance of inserting a frequent word.
    pub frequent_rate: f64,
    /// Words per sentence, inclusive.
    pub sentence_words: (usize, usize),
    /// Probabilities of 1-1, 2-1, 1-2, 2-2, 1-0, 0-1 beads.
    pub bead_mix: [f64; 6],
    pub omissions: Vec<Omission>,
    pub switches: Vec<Switch>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            x_chars: 50_000,
            vocab_size: 4000,
            cognate_density: 0.25,
            stray_rate: 0.0,
            deletion_rate: 0.05,
            insertion_rate: 0.05,
            swap_rate: 0.1,
            frequent_types: 0,
            frequent_rate: 0.0,
            sentence_words: (6, 24),
            bead_mix: [0.80, 0.06, 0.06, 0.03, 0.025, 0.025],
            omissions: Vec::new(),
            switches: Vec::new(),
        }
    }
}

impl SynthSpec {
    /// No word-level noise and no strays; every word has a counterpart.
    pub fn clean(seed: u64, x_chars: usize) -> Self {
        SynthSpec {
            seed,
            x_chars,
            deletion_rate: 0.0,
            insertion_rate: 0.0,
            swap_rate: 0.0,
            ..SynthSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64, name: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::input(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        unit(self.cognate_density, "cognate_density")?;
        unit(self.stray_rate, "stray_rate")?;
        unit(self.deletion_rate, "deletion_rate")?;
        unit(self.insertion_rate, "insertion_rate")?;
        unit(self.swap_rate, "swap_rate")?;
        unit(self.frequent_rate, "frequent_rate")?;
        if self.x_chars == 0 || self.vocab_size < 2 {
            return Err(Error::input("need a positive length and at least two word types"));
        }
        let (lo, hi) = self.sentence_words;
        if lo < 2 || hi < lo {
            return Err(Error::input("sentence_words must satisfy 2 <= min <= max"));
        }
        if self.bead_mix.iter().any(|&p| p < 0.0) || self.bead_mix[0] <= 0.0 {
            return Err(Error::input("bead mix needs non-negative weights and some 1-1 beads"));
        }
        // x character spans used by each planted event
        let mut spans: Vec<(usize, usize)> = Vec::new();
        for o in &self.omissions {
            let len = if o.axis == Axis::Y { o.length } else { 0 };
            spans.push((o.at, o.at + len));
        }
        for s in &self.switches {
            if s.length == 0 {
                return Err(Error::input("switched segments need a positive length"));
            }
            spans.push((s.at, s.at + 2 * s.length));
        }
        for &(a, b) in &spans {
            if a == 0 || b >= self.x_chars {
                return Err(Error::input(format!(
                    "span {a}..{b} is not inside the text (0..{})",
                    self.x_chars
                )));
            }
        }
        spans.sort_unstable();
        // leave room for a few sentences between events
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 + 500 {
                return Err(Error::input(format!("spans starting at {} and {} overlap", w[0].0, w[1].0)));
            }
        }
        Ok(())
    }
}

/// A planted correspondence between two word tokens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tpc {
    pub x: f64,
    pub y: f64,
    pub xi: usize,
    pub yi: usize,
    /// Whether the two forms are similar enough to be found by matching.
    pub cognate: bool,
}

#[derive(Debug, Clone)]
pub struct SyntheticBitext {
    pub x_text: String,
    pub y_text: String,
    pub x_ends: Vec<usize>,
    pub y_ends: Vec<usize>,
    pub tpcs: Vec<Tpc>,
    pub alignment: Alignment,
    /// Mean token length over both texts.
    pub mean_token_len: f64,
}

impl SyntheticBitext {
    pub fn space(&self) -> BitextSpace {
        BitextSpace::new(self.x_text.chars().count() as f64, self.y_text.chars().count() as f64)
            .expect("generated texts are non-empty")
    }

    pub fn grid(&self) -> SentenceGrid {
        let s = self.space();
        SentenceGrid::new(self.x_ends.clone(), self.y_ends.clone(), s.width as usize, s.height as usize)
            .expect("generated boundaries are consistent")
    }

    pub fn reference_points(&self) -> Vec<(f64, f64)> {
        self.tpcs.iter().map(|t| (t.x, t.y)).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.tpcs.iter().map(|t| Point::new(t.x, t.y, t.xi, t.yi)).collect()
    }

    pub fn cognate_points(&self) -> Vec<Point> {
        self.tpcs
            .iter()
            .filter(|t| t.cognate)
            .map(|t| Point::new(t.x, t.y, t.xi, t.yi))
            .collect()
    }

    /// Injective map through every planted correspondence.
    pub fn planted_map(&self) -> Result<BitextMap> {
        encapsulate_mers(&self.points(), &self.space())
    }
}

const X_CONS: &[u8] = b"bcdfgklmnprst";
const Y_CONS: &[u8] = b"hjqvwxz";
const VOWELS: &[u8] = b"aeiou";

struct WordType {
    x: String,
    y: String,
    cognate: bool,
}

fn pseudo_word(rng: &mut ChaCha8Rng, cons: &[u8]) -> String {
    let syllables = rng.random_range(2..=4);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(*cons.choose(rng).unwrap() as char);
        w.push(*VOWELS.choose(rng).unwrap() as char);
    }
    if rng.random_bool(0.3) {
        w.push(*cons.choose(rng).unwrap() as char);
    }
    w
}

/// A small orthographic change: one vowel substituted or one appended.
fn perturb(rng: &mut ChaCha8Rng, w: &str) -> String {
    let mut chars: Vec<char> = w.chars().collect();
    let vowels: Vec<usize> = (0..chars.len()).filter(|&i| VOWELS.contains(&(chars[i] as u8))).collect();
    if rng.random_bool(0.5) && !vowels.is_empty() {
        let i = *vowels.choose(rng).unwrap();
        let others: Vec<u8> = VOWELS.iter().copied().filter(|&v| v as char != chars[i]).collect();
        chars[i] = *others.choose(rng).unwrap() as char;
    } else {
        chars.push(*VOWELS.choose(rng).unwrap() as char);
    }
    chars.into_iter().collect()
}

fn vocabulary(rng: &mut ChaCha8Rng, size: usize, density: f64) -> Vec<WordType> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let x = pseudo_word(rng, X_CONS);
        if !seen.insert(x.clone()) {
            continue;
        }
        let cognate = rng.random_bool(density);
        let y = if cognate { perturb(rng, &x) } else { pseudo_word(rng, Y_CONS) };
        out.push(WordType { x, y, cognate });
    }
    out
}

#[derive(Debug, Clone)]
struct Word {
    form: String,
    /// Shared by an x word and its y counterpart.
    link: Option<usize>,
    cognate: bool,
    /// Global x word index this y word derives from.
    source: usize,
}

#[derive(Debug, Clone, Default)]
struct Bead {
    x: Vec<Vec<Word>>,
    y: Vec<Vec<Word>>,
}

struct Generator<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    vocab: Vec<WordType>,
    frequent: Vec<String>,
    next_link: usize,
    x_words: usize,
    x_chars: usize,
}

impl Generator<'_> {
    fn sentence_len(&mut self) -> usize {
        let (lo, hi) = self.spec.sentence_words;
        self.rng.random_range(lo..=hi)
    }

    fn frequent_word(&mut self, out: &mut Vec<Word>, source: usize) {
        if !self.frequent.is_empty() && self.rng.random_bool(self.spec.frequent_rate) {
            let form = self.frequent.choose(&mut self.rng).unwrap().clone();
            out.push(Word {
                form,
                link: None,
                cognate: false,
                source,
            });
        }
    }

    /// `n` x words, counted towards the x length.
    fn x_sentence(&mut self, n: usize) -> Vec<(Word, usize)> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let t = self.rng.random_range(0..self.vocab.len());
            let w = Word {
                form: self.vocab[t].x.clone(),
                link: None,
                cognate: self.vocab[t].cognate,
                source: self.x_words,
            };
            self.x_words += 1;
            self.x_chars += w.form.len() + 1;
            out.push((w, t));
        }
        self.x_chars += 1;
        out
    }

    fn wrap_x(&mut self, words: Vec<Word>) -> Vec<Word> {
        let mut out = Vec::with_capacity(words.len() + 2);
        for w in words {
            let src = w.source;
            out.push(w);
            self.frequent_word(&mut out, src);
        }
        out
    }

    /// Translates x sentences into one y word sequence with word-level noise.
    fn translate(&mut self, xs: &mut [Vec<(Word, usize)>]) -> Vec<Word> {
        let mut ys = Vec::new();
        let mut last_source = 0;
        for sent in xs.iter_mut() {
            for (w, t) in sent.iter_mut() {
                last_source = w.source;
                if self.rng.random_bool(self.spec.deletion_rate) {
                    continue;
                }
                let link = self.next_link;
                self.next_link += 1;
                w.link = Some(link);
                ys.push(Word {
                    form: self.vocab[*t].y.clone(),
                    link: Some(link),
                    cognate: self.vocab[*t].cognate,
                    source: w.source,
                });
                if self.rng.random_bool(self.spec.insertion_rate) {
                    let r = self.rng.random_range(0..self.vocab.len());
                    ys.push(Word {
                        form: self.vocab[r].y.clone(),
                        link: None,
                        cognate: false,
                        source: w.source,
                    });
                }
            }
        }
        if ys.is_empty() {
            // keep every y sentence non-empty
            let r = self.rng.random_range(0..self.vocab.len());
            ys.push(Word {
                form: self.vocab[r].y.clone(),
                link: None,
                cognate: false,
                source: last_source,
            });
        }
        let mut i = 0;
        while i + 1 < ys.len() {
            if self.rng.random_bool(self.spec.swap_rate) {
                ys.swap(i, i + 1);
                i += 2;
            } else {
                i += 1;
            }
        }
        ys
    }

    fn finish_y(&mut self, words: Vec<Word>) -> Vec<Word> {
        let mut out = Vec::with_capacity(words.len() + 2);
        for w in words {
            let src = w.source;
            out.push(w);
            self.frequent_word(&mut out, src);
        }
        out
    }

    /// Splits `words` at `at` (clamped so both halves are non-empty).
    fn split(words: Vec<Word>, at: usize) -> (Vec<Word>, Vec<Word>) {
        let at = at.clamp(1, words.len() - 1);
        let mut a = words;
        let b = a.split_off(at);
        (a, b)
    }

    fn bead(&mut self, shape: (usize, usize)) -> Bead {
        let mut xs: Vec<Vec<(Word, usize)>> = Vec::new();
        for _ in 0..shape.0 {
            let n = self.sentence_len();
            xs.push(self.x_sentence(n));
        }
        let mut bead = Bead::default();
        match shape {
            (_, 0) => {}
            (0, _) => {
                for _ in 0..shape.1 {
                    let n = self.sentence_len();
                    let src = self.x_words;
                    let words = (0..n)
                        .map(|_| {
                            let r = self.rng.random_range(0..self.vocab.len());
                            Word {
                                form: self.vocab[r].y.clone(),
                                link: None,
                                cognate: false,
                                source: src,
                            }
                        })
                        .collect();
                    bead.y.push(words);
                }
            }
            (_, 1) => bead.y.push(self.translate(&mut xs)),
            (1, 2) => {
                let ys = self.translate(&mut xs);
                let n = ys.len();
                let at = self.rng.random_range(n / 3..=(2 * n / 3).max(n / 3));
                if n >= 2 {
                    let (a, b) = Self::split(ys, at);
                    bead.y.push(a);
                    bead.y.push(b);
                } else {
                    bead.y.push(ys);
                    bead.y.push(self.translate(&mut []));
                }
            }
            _ => {
                // 2-2: cut the y side well away from the x sentence break
                let x_first = xs[0].len();
                let ys = self.translate(&mut xs);
                let n = ys.len();
                let pos = ys
                    .iter()
                    .position(|w| w.source >= xs[1][0].0.source)
                    .unwrap_or(x_first.min(n));
                let shift = (pos.min(n - pos) / 2).max(2);
                let at = if self.rng.random_bool(0.5) {
                    pos.saturating_sub(shift)
                } else {
                    pos + shift
                };
                if n >= 2 {
                    let (a, b) = Self::split(ys, at);
                    bead.y.push(a);
                    bead.y.push(b);
                } else {
                    bead.y.push(ys);
                    bead.y.push(self.translate(&mut []));
                }
            }
        }
        bead.x = xs
            .into_iter()
            .map(|s| {
                let words = s.into_iter().map(|(w, _)| w).collect();
                self.wrap_x(words)
            })
            .collect();
        bead.y = std::mem::take(&mut bead.y)
            .into_iter()
            .map(|s| self.finish_y(s))
            .collect();
        bead
    }

    fn draw_shape(&mut self, prev: Option<(usize, usize)>) -> (usize, usize) {
        const SHAPES: [(usize, usize); 6] = [(1, 1), (2, 1), (1, 2), (2, 2), (1, 0), (0, 1)];
        let total: f64 = self.spec.bead_mix.iter().sum();
        loop {
            let mut r = self.rng.random::<f64>() * total;
            let mut pick = SHAPES[0];
            for (s, &p) in SHAPES.iter().zip(&self.spec.bead_mix) {
                if r < p {
                    pick = *s;
                    break;
                }
                r -= p;
            }
            let clash = matches!((prev, pick), (Some((1, 0)), (0, 1)) | (Some((0, 1)), (1, 0)));
            if !clash {
                return pick;
            }
        }
    }
}

/// Builds a bitext according to `spec`. The same spec always yields the
/// same bitext.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SyntheticBitext> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab = vocabulary(&mut rng, spec.vocab_size, spec.cognate_density);
    let mut frequent = Vec::new();
    let forms: HashSet<&str> = vocab.iter().map(|t| t.x.as_str()).collect();
    while frequent.len() < spec.frequent_types {
        let w: String = (0..2)
            .map(|i| {
                let set = if i == 0 { X_CONS } else { VOWELS };
                *set.choose(&mut rng).unwrap() as char
            })
            .collect();
        if !forms.contains(w.as_str()) && !frequent.contains(&w) {
            frequent.push(w);
        }
    }
    let mut g = Generator {
        spec,
        rng,
        vocab,
        frequent,
        next_link: 0,
        x_words: 0,
        x_chars: 0,
    };

    enum Event {
        Omit(Omission),
        Switch(Switch),
    }
    let mut events: Vec<(usize, Event)> = spec
        .omissions
        .iter()
        .map(|o| (o.at, Event::Omit(*o)))
        .chain(spec.switches.iter().map(|s| (s.at, Event::Switch(*s))))
        .collect();
    events.sort_by_key(|e| e.0);
    let mut events = events.into_iter().peekable();

    let mut beads: Vec<Bead> = Vec::new();
    let mut switch_starts: Vec<(usize, usize)> = Vec::new();
    let mut prev = None;
    while g.x_chars < spec.x_chars {
        if let Some((_, ev)) = events.next_if(|(at, _)| g.x_chars >= *at) {
            match ev {
                Event::Omit(o) => {
                    let shape = if o.axis == Axis::X { (0, 1) } else { (1, 0) };
                    let mut done = 0;
                    while done < o.length {
                        let b = g.bead(shape);
                        let side = if o.axis == Axis::X { &b.y } else { &b.x };
                        done += side.iter().flatten().map(|w| w.form.len() + 1).sum::<usize>() + side.len();
                        beads.push(b);
                    }
                    // separate the run from the next bead
                    let b = g.bead((1, 1));
                    beads.push(b);
                    prev = Some((1, 1));
                }
                Event::Switch(s) => switch_starts.push((beads.len(), s.length)),
            }
            continue;
        }
        let shape = g.draw_shape(prev);
        let b = g.bead(shape);
        beads.push(b);
        prev = Some(shape);
    }

    // bead groups that form one planted block, and the y order of beads
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut y_order: Vec<usize> = (0..beads.len()).collect();
    let x_len = |b: &Bead| b.x.iter().flatten().map(|w| w.form.len() + 1).sum::<usize>() + b.x.len();
    let mut next = 0;
    for &(start, length) in &switch_starts {
        let run = |from: usize| {
            let mut i = from;
            let mut chars = 0;
            while i < beads.len() && (chars < length || i == from) {
                chars += x_len(&beads[i]);
                i += 1;
            }
            i
        };
        let mid = run(start);
        let end = run(mid);
        if mid == end || end > beads.len() || start < next {
            return Err(Error::input("switched segment runs past the end of the text"));
        }
        for i in next..start {
            groups.push((i, i + 1));
        }
        groups.push((start, end));
        let swapped: Vec<usize> = (mid..end).chain(start..mid).collect();
        y_order.splice(start..end, swapped);
        next = end;
    }
    for i in next..beads.len() {
        groups.push((i, i + 1));
    }

    // stray replacements on the y side
    let all_x: Vec<String> = beads.iter().flat_map(|b| b.x.iter().flatten()).map(|w| w.form.clone()).collect();
    if spec.stray_rate > 0.0 {
        for b in &mut beads {
            for w in b.y.iter_mut().flatten() {
                if g.rng.random_bool(spec.stray_rate) {
                    let lo = w.source.saturating_sub(40);
                    let hi = (w.source + 40).min(all_x.len() - 1);
                    let pick = g.rng.random_range(lo..=hi);
                    w.form = perturb(&mut g.rng, &all_x[pick]);
                    w.link = None;
                    w.cognate = false;
                }
            }
        }
    }

    // layout
    let mut x_text = String::new();
    let mut x_ends = Vec::new();
    let mut x_pos: Vec<Option<(f64, usize, bool)>> = vec![None; g.next_link];
    let mut token = 0;
    for b in &beads {
        for s in &b.x {
            for w in s {
                if let Some(l) = w.link {
                    x_pos[l] = Some((x_text.len() as f64 + (w.form.len() - 1) as f64 / 2.0, token, w.cognate));
                }
                x_text.push_str(&w.form);
                x_text.push(' ');
                token += 1;
            }
            x_text.push_str(". ");
            x_ends.push(x_text.len());
        }
    }
    let mut y_text = String::new();
    let mut y_ends = Vec::new();
    let mut tpcs = Vec::new();
    let mut y_tokens = 0;
    for &bi in &y_order {
        for s in &beads[bi].y {
            for w in s {
                if let Some((x, xi, cognate)) = w.link.and_then(|l| x_pos[l]) {
                    tpcs.push(Tpc {
                        x,
                        y: y_text.len() as f64 + (w.form.len() - 1) as f64 / 2.0,
                        xi,
                        yi: y_tokens,
                        cognate: cognate && w.cognate,
                    });
                }
                y_text.push_str(&w.form);
                y_text.push(' ');
                y_tokens += 1;
            }
            y_text.push_str(". ");
            y_ends.push(y_text.len());
        }
    }
    if x_ends.is_empty() || y_ends.is_empty() {
        return Err(Error::input("spec produced an empty text on one side"));
    }

    let mut blocks = Vec::with_capacity(groups.len());
    let (mut xs, mut ys) = (0, 0);
    for (a, b) in groups {
        let nx: usize = beads[a..b].iter().map(|bd| bd.x.len()).sum();
        let ny: usize = beads[a..b].iter().map(|bd| bd.y.len()).sum();
        blocks.push(AlignedBlock::new(xs..xs + nx, ys..ys + ny));
        xs += nx;
        ys += ny;
    }
    let alignment = Alignment::new(blocks, x_ends.len(), y_ends.len())?;
    let mean_token_len = {
        let (n, c) = beads
            .iter()
            .flat_map(|b| b.x.iter().chain(b.y.iter()).flatten())
            .fold((0usize, 0usize), |(n, c), w| (n + 1, c + w.form.len()));
        c as f64 / n.max(1) as f64
    };
    Ok(SyntheticBitext {
        x_text,
        y_text,
        x_ends,
        y_ends,
        tpcs,
        alignment,
        mean_token_len,
    })
}
