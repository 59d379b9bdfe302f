//! Tokenization and the token-pair matching predicates that populate the
//! bitext space with candidate points of correspondence.

use std::cell::{Cell, RefCell};
use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point, SearchRect, Token, TokenizedText};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenizeOptions {
    /// Treat digits as word characters (useful for technical texts).
    pub keep_digits: bool,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Splits `text` into maximal runs of letters, allowing apostrophes and
/// hyphens between two letters. Offsets are in characters.
pub fn tokenize(text: &str, opts: TokenizeOptions) -> TokenizedText {
    let word_char = |c: char| c.is_alphabetic() || (opts.keep_digits && c.is_numeric());
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !word_char(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() {
            if word_char(chars[i]) {
                i += 1;
            } else if is_joiner(chars[i]) && i + 1 < chars.len() && word_char(chars[i + 1]) {
                i += 2;
            } else {
                break;
            }
        }
        let surface: String = chars[start..i].iter().flat_map(|c| c.to_lowercase()).collect();
        tokens.push(Token {
            surface,
            start,
            len: i - start,
        });
    }
    TokenizedText::new(tokens, chars.len()).expect("tokenizer emits ordered tokens")
}

/// Length of a longest common (not necessarily contiguous) subsequence.
pub fn lcs_length(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lcs_chars(&a, &b)
}

pub(crate) fn lcs_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for &ca in a {
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Longest common subsequence ratio: LCS length over the longer length.
pub fn lcsr(a: &str, b: &str) -> Result<f64> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longer = a.len().max(b.len());
    if longer == 0 {
        return Err(Error::domain("LCSR of two empty strings is undefined"));
    }
    Ok(lcs_chars(&a, &b) as f64 / longer as f64)
}

/// Closed-class words that never take part in cognate matches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopList {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// One word per line; blank lines and lines starting with `#` are skipped.
    pub fn parse(src: &str) -> Self {
        StopList::new(
            src.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(StopList::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        // surfaces from the tokenizer are already folded
        self.words.contains(word) || self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Known translation pairs `(x-language form, y-language form)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranslationLexicon {
    entries: HashSet<(String, String)>,
}

impl TranslationLexicon {
    pub fn new<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        TranslationLexicon {
            entries: pairs
                .into_iter()
                .map(|(s, t)| (s.as_ref().to_lowercase(), t.as_ref().to_lowercase()))
                .collect(),
        }
    }

    /// `source<TAB>target` per line. Duplicate entries collapse.
    pub fn parse(src: &str, origin: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (s, t) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: n + 1,
                msg: "expected source<TAB>target".into(),
            })?;
            pairs.push((s.trim().to_string(), t.trim().to_string()));
        }
        Ok(TranslationLexicon::new(pairs))
    }

    pub fn load(path: &Path) -> Result<Self> {
        TranslationLexicon::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn contains(&self, x_form: &str, y_form: &str) -> bool {
        self.entries
            .contains(&(x_form.to_lowercase(), y_form.to_lowercase()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Configuration of the matching predicate.
#[derive(Debug, Clone)]
pub struct MatchConfig {
    /// A pair is a cognate when its LCSR strictly exceeds this.
    pub lcsr_threshold: f64,
    pub use_lexicon: bool,
    pub stop_x: StopList,
    pub stop_y: StopList,
    pub lexicon: Option<TranslationLexicon>,
}

impl MatchConfig {
    pub fn cognates(lcsr_threshold: f64) -> Self {
        MatchConfig {
            lcsr_threshold,
            use_lexicon: false,
            stop_x: StopList::default(),
            stop_y: StopList::default(),
            lexicon: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lcsr_threshold > 0.0 && self.lcsr_threshold <= 1.0) {
            return Err(Error::domain(format!(
                "LCSR threshold {} outside (0, 1]",
                self.lcsr_threshold
            )));
        }
        if self.use_lexicon && self.lexicon.is_none() {
            return Err(Error::input("lexicon matching enabled without a lexicon"));
        }
        Ok(())
    }

    fn lexicon_hit(&self, e: &str, f: &str) -> bool {
        self.use_lexicon && self.lexicon.as_ref().is_some_and(|l| l.contains(e, f))
    }
}

/// The matching predicate. Lexicon entries win over the stop-lists; cognate
/// matching skips stop-listed words on either side.
pub fn matches(e: &Token, f: &Token, cfg: &MatchConfig) -> bool {
    if cfg.lexicon_hit(&e.surface, &f.surface) {
        return true;
    }
    if cfg.stop_x.contains(&e.surface) || cfg.stop_y.contains(&f.surface) {
        return false;
    }
    match lcsr(&e.surface, &f.surface) {
        Ok(r) => r > cfg.lcsr_threshold,
        Err(_) => false,
    }
}

/// All points `(meanPos(e), meanPos(f))` inside `rect` whose tokens match.
pub fn generate_points(
    rect: &SearchRect,
    x: &TokenizedText,
    y: &TokenizedText,
    cfg: &MatchConfig,
) -> Vec<Point> {
    let xs = x.range_between(rect.x0, rect.x1());
    let ys = y.range_between(rect.y0, rect.y1());
    let mut out = Vec::new();
    for i in xs {
        for j in ys.clone() {
            if matches(&x.tokens()[i], &y.tokens()[j], cfg) {
                out.push(Point::new(x.positions()[i], y.positions()[j], i, j));
            }
        }
    }
    out
}

struct Prepared {
    chars: Vec<Vec<char>>,
    stop: Vec<bool>,
    type_of: Vec<u32>,
}

impl Prepared {
    fn new(text: &TokenizedText, stop: &StopList) -> Self {
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let mut type_of = Vec::with_capacity(text.len());
        for t in text.tokens() {
            let next = ids.len() as u32;
            type_of.push(*ids.entry(t.surface.as_str()).or_insert(next));
        }
        Prepared {
            chars: text.tokens().iter().map(|t| t.surface.chars().collect()).collect(),
            stop: text.tokens().iter().map(|t| stop.contains(&t.surface)).collect(),
            type_of,
        }
    }
}

/// Point generator bound to one bitext. Equivalent to [`generate_points`]
/// but caches predicate results per token-type pair and counts how many
/// points it has produced.
pub struct PointGenerator<'a> {
    x: &'a TokenizedText,
    y: &'a TokenizedText,
    cfg: &'a MatchConfig,
    px: Prepared,
    py: Prepared,
    memo: RefCell<HashMap<(u32, u32), bool>>,
    generated: Cell<usize>,
    calls: Cell<usize>,
}

impl<'a> PointGenerator<'a> {
    pub fn new(x: &'a TokenizedText, y: &'a TokenizedText, cfg: &'a MatchConfig) -> Self {
        PointGenerator {
            x,
            y,
            cfg,
            px: Prepared::new(x, &cfg.stop_x),
            py: Prepared::new(y, &cfg.stop_y),
            memo: RefCell::new(HashMap::new()),
            generated: Cell::new(0),
            calls: Cell::new(0),
        }
    }

    pub fn x_text(&self) -> &TokenizedText {
        self.x
    }

    pub fn y_text(&self) -> &TokenizedText {
        self.y
    }

    /// Total points emitted so far.
    pub fn generated(&self) -> usize {
        self.generated.get()
    }

    /// Number of generation calls so far.
    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    fn pair_matches(&self, i: usize, j: usize) -> bool {
        let key = (self.px.type_of[i], self.py.type_of[j]);
        if let Some(&hit) = self.memo.borrow().get(&key) {
            return hit;
        }
        let hit = self.evaluate(i, j);
        self.memo.borrow_mut().insert(key, hit);
        hit
    }

    fn evaluate(&self, i: usize, j: usize) -> bool {
        let (e, f) = (&self.x.tokens()[i], &self.y.tokens()[j]);
        if self.cfg.lexicon_hit(&e.surface, &f.surface) {
            return true;
        }
        if self.px.stop[i] || self.py.stop[j] {
            return false;
        }
        let (a, b) = (&self.px.chars[i], &self.py.chars[j]);
        let (short, long) = if a.len() < b.len() {
            (a.len(), b.len())
        } else {
            (b.len(), a.len())
        };
        if long == 0 || (short as f64 / long as f64) <= self.cfg.lcsr_threshold {
            return false;
        }
        lcs_chars(a, b) as f64 / long as f64 > self.cfg.lcsr_threshold
    }

    /// Matching points inside `rect` that also satisfy `keep`.
    pub fn points_where(&self, rect: &SearchRect, keep: impl Fn(f64, f64) -> bool) -> Vec<Point> {
        self.calls.set(self.calls.get() + 1);
        let xs = self.x.range_between(rect.x0, rect.x1());
        let ys = self.y.range_between(rect.y0, rect.y1());
        let (xp, yp) = (self.x.positions(), self.y.positions());
        let mut out = Vec::new();
        for i in xs {
            for j in ys.clone() {
                if keep(xp[i], yp[j]) && self.pair_matches(i, j) {
                    out.push(Point::new(xp[i], yp[j], i, j));
                }
            }
        }
        self.generated.set(self.generated.get() + out.len());
        out
    }

    pub fn points_in(&self, rect: &SearchRect) -> Vec<Point> {
        self.points_where(rect, |_, _| true)
    }
}
