//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use bimap_core::anneal::trace_shortfall;
use bimap_core::search::filter_ambiguous;
use bimap_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.1}s/{}s", e.as_secs_f64(), limit.as_secs()))
}

fn texts(s: &SyntheticBitext) -> (TokenizedText, TokenizedText) {
    (
        tokenize(&s.x_text, TokenizeOptions::default()),
        tokenize(&s.y_text, TokenizeOptions::default()),
    )
}

fn simr(s: &SyntheticBitext, p: &Params, second: bool) -> SimrOutput {
    let (x, y) = texts(s);
    run_simr(&x, &y, &MatchConfig::cognates(p.lcsr_threshold), &p.simr, second).expect("mapping run")
}

/// Every (map, refs) pair evaluated anywhere in the suite, for the metric
/// inequality.
#[derive(Default)]
struct Evaluated {
    pairs: Vec<(BitextMap, Vec<(f64, f64)>)>,
}

// 1. LCS against exhaustive subsequence enumeration

fn subsequences(s: &[char]) -> HashSet<Vec<char>> {
    (0u32..1 << s.len())
        .map(|mask| {
            s.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect()
        })
        .collect()
}

fn lcs_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let sb = subsequences(&b);
    subsequences(&a).into_iter().filter(|s| sb.contains(s)).map(|s| s.len()).max().unwrap_or(0)
}

fn c1_lcs() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<char> = "abcdé".chars().collect();
    let word = |rng: &mut ChaCha8Rng| -> String {
        let n = rng.random_range(0..=8);
        (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
    };
    let mut wrong = 0;
    for _ in 0..1000 {
        let (a, b) = (word(&mut rng), word(&mut rng));
        if lcs_length(&a, &b) != lcs_oracle(&a, &b) {
            wrong += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(10));
    outcome(wrong == 0 && fast, format!("{wrong} mismatches in 1000 pairs, {time}"))
}

// 2. Best k-subset by displacement range is a contiguous window

fn c2_windows() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for _ in 0..200 {
        let space = BitextSpace::new(rng.random_range(50.0..500.0), rng.random_range(50.0..500.0)).unwrap();
        let n = rng.random_range(6..=14);
        let k = rng.random_range(3..=6);
        let pts: Vec<Point> = (0..n)
            .map(|i| Point::new(rng.random_range(0.0..space.width), rng.random_range(0.0..space.height), i, i))
            .collect();
        let d: Vec<f64> = pts.iter().map(|p| space.displacement(p.x, p.y)).collect();
        let mut brute = f64::INFINITY;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize != k {
                continue;
            }
            let sel = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| d[i]);
            let (lo, hi) = sel.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            brute = brute.min(hi - lo);
        }
        let windowed = search::enumerate_windows(&pts, k, &space)
            .iter()
            .map(|w| {
                let dw: Vec<f64> = w.iter().map(|p| space.displacement(p.x, p.y)).collect();
                dw[k - 1] - dw[0]
            })
            .fold(f64::INFINITY, f64::min);
        if windowed != brute {
            bad += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(30));
    outcome(bad == 0 && fast, format!("{bad} of 200 point sets without an optimal window, {time}"))
}

// 3. Injectivity over fuzzed bitexts

fn fuzz_spec(rng: &mut ChaCha8Rng, seed: u64) -> SynthSpec {
    let x_chars = rng.random_range(4000..12_000);
    let mut spec = SynthSpec {
        seed,
        x_chars,
        cognate_density: rng.random_range(0.05..0.6),
        stray_rate: rng.random_range(0.0..0.3),
        deletion_rate: rng.random_range(0.0..0.15),
        insertion_rate: rng.random_range(0.0..0.15),
        swap_rate: rng.random_range(0.0..0.3),
        frequent_types: rng.random_range(0..6),
        frequent_rate: rng.random_range(0.0..0.1),
        ..SynthSpec::default()
    };
    if rng.random_bool(0.5) {
        let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
        spec.omissions.push(Omission {
            axis,
            at: x_chars / 4,
            length: rng.random_range(200..1200),
        });
    }
    if rng.random_bool(0.4) {
        spec.switches.push(Switch {
            at: x_chars * 3 / 5,
            length: rng.random_range(100..500),
        });
    }
    spec
}

fn c3_injectivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for i in 0..100 {
        let spec = fuzz_spec(&mut rng, 3000 + i);
        let s = generate_synthetic(&spec).expect("fuzzed spec");
        let mut p = Params::default();
        p.simr.chain_size = rng.random_range(4..=10);
        let out = simr(&s, &p, true);
        let a = out.map.anchors();
        let space = out.map.space();
        let increasing = a.windows(2).all(|w| w[1].x > w[0].x && w[1].y > w[0].y);
        let ends = (a[0].x, a[0].y) == (0.0, 0.0) && (a[a.len() - 1].x, a[a.len() - 1].y) == (space.width, space.height);
        let values = out.map.evaluate(0.0).ok() == Some(0.0) && out.map.evaluate(space.width).ok() == Some(space.height);
        if !(increasing && ends && values) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in 100 maps"))
}

// 4. Map recovery on noisy bitexts

fn c4_recovery(ev: &mut Evaluated) -> Outcome {
    let t = Instant::now();
    let p = Params::default();
    let mut worst_rms: f64 = 0.0;
    let mut worst_med: f64 = 0.0;
    let mut failing = Vec::new();
    for seed in 0..10 {
        let spec = SynthSpec {
            seed,
            x_chars: 50_000,
            cognate_density: 0.25,
            stray_rate: 0.1,
            ..SynthSpec::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        let out = simr(&s, &p, true);
        let refs = s.reference_points();
        let e = map_error(&out.map, &refs, Metric::Perpendicular).unwrap();
        let tok = s.mean_token_len;
        worst_rms = worst_rms.max(e.rms / tok);
        worst_med = worst_med.max(e.median_abs / tok);
        if e.rms > 2.0 * tok || e.median_abs > tok {
            failing.push(seed);
        }
        ev.pairs.push((out.map, refs));
    }
    let (fast, time) = within(t, Duration::from_secs(60));
    outcome(
        failing.is_empty() && fast,
        format!(
            "worst rms {worst_rms:.2} tokens (limit 2), worst median {worst_med:.2} tokens (limit 1), failing seeds {failing:?}, {time}"
        ),
    )
}

// 5. Omission robustness

fn c5_omission(ev: &mut Evaluated) -> Outcome {
    let p = Params::default();
    let mut ok = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        // the omitted text is missing from x, so the map jumps along y
        let spec = SynthSpec {
            seed,
            x_chars: 30_000,
            omissions: vec![Omission { axis: Axis::X, at: 15_000, length: 2000 }],
            ..SynthSpec::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        let out = simr(&s, &p, true);
        let shortfall = trace_shortfall(&out.first_pass, &out.space);
        let gaps = gap_report(&out.map, 1000.0);
        let reached = shortfall <= 0.02;
        let one_gap = gaps.len() == 1 && gaps[0].axis == Axis::Y;
        if reached && one_gap {
            ok += 1;
        } else {
            notes.push(format!("seed {seed}: shortfall {shortfall:.3}, gaps {:?}", gaps.iter().map(|g| g.axis).collect::<Vec<_>>()));
        }
        ev.pairs.push((out.map, s.reference_points()));
    }
    outcome(ok == 10, format!("{ok}/10 seeds {}", notes.join("; ")))
}

// 6. Non-monotonic segments recovered by the second pass

fn c6_switches(ev: &mut Evaluated) -> Outcome {
    let p = Params::default();
    let mut ok = 0;
    let mut ratios = Vec::new();
    let mut recovered_all = Vec::new();
    // the same ratio for the planted map itself, the best any injective map can do
    let mut best_ratios = Vec::new();
    for seed in 0..10u64 {
        let spec = SynthSpec {
            switches: vec![Switch { at: 8000, length: 600 }, Switch { at: 20_000, length: 600 }],
            ..SynthSpec::clean(seed, 30_000)
        };
        let s = generate_synthetic(&spec).unwrap();
        let planted = s.planted_map().unwrap();
        let out = simr(&s, &p, true);
        let inside = |x: f64, y: f64| {
            planted
                .mers()
                .iter()
                .any(|m| x > m.lower_left.0 && x < m.upper_right.0 && y > m.lower_left.1 && y < m.upper_right.1)
        };
        let recovered = out.second_pass.iter().flat_map(|c| &c.points).filter(|q| inside(q.x, q.y)).count();
        let refs = s.reference_points();
        let first = map_error(&out.first_map, &refs, Metric::Perpendicular).unwrap().rms;
        let last = map_error(&out.map, &refs, Metric::Perpendicular).unwrap().rms;
        let ratio = last / first;
        let best = map_error(&planted, &refs, Metric::Perpendicular).unwrap().rms / first;
        best_ratios.push(format!("{best:.2}"));
        if recovered > 0 && ratio <= 0.5 {
            ok += 1;
        }
        ratios.push(format!("{ratio:.2}"));
        recovered_all.push(recovered);
        ev.pairs.push((out.first_map, refs.clone()));
        ev.pairs.push((out.map, refs));
    }
    outcome(
        ok == 10,
        format!("{ok}/10 seeds; points recovered inside switched regions {recovered_all:?}; final/first rms {}; planted/first rms {}", ratios.join(" "), best_ratios.join(" ")),
    )
}

// 7. Ambiguity filter against frequent-token rows and columns

fn c7_maxpal() -> Outcome {
    let mut ok = 0;
    let mut gains = Vec::new();
    let p = Params::default();
    let cfg = MatchConfig::cognates(p.lcsr_threshold);
    for seed in 0..10u64 {
        // one type, dense enough to form rows and columns inside a single rectangle
        let spec = SynthSpec {
            seed,
            x_chars: 20_000,
            frequent_types: 1,
            frequent_rate: 0.2,
            ..SynthSpec::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        let (x, y) = texts(&s);
        let space = BitextSpace::for_texts(&x, &y).unwrap();
        let gen = PointGenerator::new(&x, &y, &cfg);
        let planted: HashSet<(usize, usize)> = s.tpcs.iter().map(|t| (t.xi, t.yi)).collect();
        let (mut all, mut all_planted, mut kept, mut kept_planted) = (0, 0, 0, 0);
        // search rectangles of the initial size, anchored along the planted correspondences
        let width = (space.width * p.simr.initial_rect_frac).min(p.simr.initial_rect_max);
        for t in s.tpcs.iter().step_by(25) {
            let rect = SearchRect::at((t.x, t.y), width, space.slope());
            let pts = gen.points_in(&rect);
            let filtered = filter_ambiguous(&pts, 2);
            all += pts.len();
            all_planted += pts.iter().filter(|q| planted.contains(&(q.xi, q.yi))).count();
            kept += filtered.len();
            kept_planted += filtered.iter().filter(|q| planted.contains(&(q.xi, q.yi))).count();
        }
        let before = all_planted as f64 / all.max(1) as f64;
        let after = kept_planted as f64 / kept.max(1) as f64;
        let gain = after / before;
        if gain >= 2.0 {
            ok += 1;
        }
        gains.push(format!("{before:.2}->{after:.2}"));
    }
    outcome(ok == 10, format!("{ok}/10 seeds with planted share improved 2x: {}", gains.join(" ")))
}

// 8. Complete planted correspondences give a perfect alignment

fn c8_gsa_perfect() -> Outcome {
    let p = Params::default();
    let opts = GsaOptions::new(p.min_confidence);
    let mut total_errors = 0;
    let mut shapes = HashSet::new();
    for seed in 0..50u64 {
        let s = generate_synthetic(&SynthSpec::clean(8000 + seed, 8000)).unwrap();
        for b in s.alignment.blocks() {
            shapes.insert(b.shape());
        }
        let out = gsa_align(&s.points(), &s.grid(), &opts).unwrap();
        total_errors += alignment_errors(&out.alignment, &s.alignment).unwrap();
    }
    let want = [(2, 1), (1, 2), (2, 2), (1, 0), (0, 1)];
    let covered = want.iter().all(|w| shapes.contains(w));
    outcome(
        total_errors == 0 && covered,
        format!("{total_errors} block errors over 50 alignments; all of 2-1 1-2 2-2 1-0 0-1 present: {covered}"),
    )
}

// 9. A stray point merging two one-to-one blocks is split again

fn c9_stray() -> Outcome {
    // sentences G H against e f; the stray point sits in cell (H, e)
    let grid = SentenceGrid::new(vec![120, 160], vec![118, 161], 160, 161).unwrap();
    let pts = [
        Point::new(30.0, 30.0, 0, 0),
        Point::new(140.0, 60.0, 1, 1),
        Point::new(150.0, 150.0, 2, 2),
    ];
    let p = Params::default();
    let out = gsa_align(&pts, &grid, &GsaOptions::new(p.min_confidence)).unwrap();
    let want = Alignment::new(
        vec![AlignedBlock::new(0..1, 0..1), AlignedBlock::new(1..2, 1..2)],
        2,
        2,
    )
    .unwrap();
    let errors = alignment_errors(&out.alignment, &want).unwrap();
    outcome(errors == 0, format!("got {:?}", out.alignment.to_string().trim().replace('\n', " | ")))
}

// 10. Chain-size stability

fn c10_chain_size() -> Outcome {
    let p = Params::default();
    let cfg = MatchConfig::cognates(p.lcsr_threshold);
    let bitexts: Vec<(TokenizedText, TokenizedText)> = (0..20u64)
        .map(|seed| {
            let spec = SynthSpec {
                seed,
                x_chars: 50_000,
                cognate_density: 0.25,
                stray_rate: 0.1,
                ..SynthSpec::default()
            };
            texts(&generate_synthetic(&spec).unwrap())
        })
        .collect();
    let lost = |k: usize| {
        let mut sp = p.simr;
        sp.chain_size = k;
        bitexts
            .iter()
            .filter(|(x, y)| {
                let out = run_simr(x, y, &cfg, &sp, false).unwrap();
                trace_shortfall(&out.first_pass, &out.space) > 0.1
            })
            .count()
    };
    let counts: Vec<(usize, usize)> = [4, 7, 8, 9].iter().map(|&k| (k, lost(k))).collect();
    let large_ok = counts.iter().filter(|(k, _)| *k >= 7).all(|(_, n)| *n == 0);
    let small_lost = counts[0].1 >= 1;
    outcome(
        large_ok && small_lost,
        format!(
            "lost runs out of 20 per chain size {}",
            counts.iter().map(|(k, n)| format!("k={k}:{n}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

// 11. Sentence alignment time is linear in the sentence count

fn sentences_spec(seed: u64, sentences: usize) -> SynthSpec {
    // about 15 words per sentence, plus room for the bead mix
    SynthSpec {
        cognate_density: 0.25,
        stray_rate: 0.1,
        ..SynthSpec::clean(seed, sentences * 115)
    }
}

fn simr_points(s: &SyntheticBitext, p: &Params) -> Vec<Point> {
    let out = simr(s, p, true);
    out.chains().flat_map(|c| c.points.clone()).collect()
}

fn c11_linear() -> Outcome {
    let t = Instant::now();
    let p = Params::default();
    let opts = GsaOptions::new(p.min_confidence);
    let small = generate_synthetic(&sentences_spec(11, 10_000)).unwrap();
    let large = generate_synthetic(&sentences_spec(12, 20_000)).unwrap();
    let (ps, pl) = (simr_points(&small, &p), simr_points(&large, &p));
    let time = |s: &SyntheticBitext, pts: &[Point]| {
        let grid = s.grid();
        let mut best = Duration::MAX;
        let mut out = None;
        for _ in 0..5 {
            let t = Instant::now();
            out = Some(gsa_align(pts, &grid, &opts).unwrap());
            best = best.min(t.elapsed());
        }
        (best, out.unwrap())
    };
    let (ts, os) = time(&small, &ps);
    let (tl, ol) = time(&large, &pl);
    let ns = small.x_ends.len() + small.y_ends.len();
    let nl = large.x_ends.len() + large.y_ends.len();
    let per_small = ts.as_secs_f64() / ns as f64;
    let per_large = tl.as_secs_f64() / nl as f64;
    let growth = per_large / per_small;
    let biggest = [os.largest_realigned, ol.largest_realigned];
    let small_blocks = biggest.iter().all(|&(a, b)| a <= 8 && b <= 8);
    let (fast, total) = within(t, Duration::from_secs(120));
    outcome(
        small_blocks && growth <= 1.3 && fast && small.x_ends.len() >= 10_000,
        format!(
            "{} and {} x sentences; largest re-aligned blocks {biggest:?}; align {:.1}ms vs {:.1}ms, per-sentence growth {growth:.2} (limit 1.3); {total}",
            small.x_ends.len(),
            large.x_ends.len(),
            ts.as_secs_f64() * 1e3,
            tl.as_secs_f64() * 1e3
        ),
    )
}

// 12. Perpendicular error never exceeds vertical error

fn c12_metrics(ev: &Evaluated) -> Outcome {
    let mut bad = 0;
    for (map, refs) in &ev.pairs {
        let perp = map_error(map, refs, Metric::Perpendicular).unwrap().rms;
        let vert = map_error(map, refs, Metric::Vertical).unwrap().rms;
        if perp > vert {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} violations over {} (map, refs) pairs", ev.pairs.len()))
}

fn main() {
    let mut ev = Evaluated::default();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, o: Outcome| {
        println!("{} {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "lcs oracle", c1_lcs());
    report(2, "window optimality", c2_windows());
    report(3, "map injectivity", c3_injectivity());
    report(4, "map recovery", c4_recovery(&mut ev));
    report(5, "omission robustness", c5_omission(&mut ev));
    report(6, "switched segments", c6_switches(&mut ev));
    report(7, "ambiguity filter", c7_maxpal());
    report(8, "perfect alignment", c8_gsa_perfect());
    report(9, "stray point split", c9_stray());
    report(10, "chain size stability", c10_chain_size());
    report(11, "alignment linear time", c11_linear());
    report(12, "metric inequality", c12_metrics(&ev));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
