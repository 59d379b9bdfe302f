use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bimap_core::anneal::{dev_objective, DevBitext};
use bimap_core::io;
use bimap_core::*;
use clap::{Args, Parser, Subcommand};
use log::info;

mod plot;

#[derive(Parser)]
#[command(name = "bimap", version, about = "Bitext mapping and sentence alignment")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Parameter file (`key = value` lines)
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Random seed for commands that use one
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Translation lexicon (`x_word<TAB>y_word` lines)
    #[arg(long, global = true, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    stoplist_x: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    stoplist_y: Option<PathBuf>,
    /// Skip the second-pass searches
    #[arg(long, global = true)]
    no_second_pass: bool,
    /// Also write the sentence correspondence relation when aligning
    #[arg(long, global = true, value_name = "FILE")]
    relation: Option<PathBuf>,
    /// Count digits as word characters
    #[arg(long, global = true)]
    keep_digits: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Map a bitext and report large gaps
    Map {
        x_text: PathBuf,
        y_text: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the accepted chain points
        #[arg(long, value_name = "FILE")]
        points_out: Option<PathBuf>,
        /// Report inter-anchor jumps longer than this many characters
        #[arg(long, default_value_t = 1000.0)]
        gap_threshold: f64,
    },
    /// Turn a map or a point file into a sentence alignment
    Align {
        #[arg(long, conflicts_with = "points", required_unless_present = "points")]
        map: Option<PathBuf>,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        x_bounds: PathBuf,
        #[arg(long)]
        y_bounds: PathBuf,
        /// Texts to check the boundaries against
        #[arg(long, requires = "y_text")]
        x_text: Option<PathBuf>,
        #[arg(long, requires = "x_text")]
        y_text: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare a map with reference points, or an alignment with a reference alignment
    Eval {
        #[arg(long, requires = "refs")]
        map: Option<PathBuf>,
        #[arg(long)]
        refs: Option<PathBuf>,
        #[arg(long, requires = "reference")]
        alignment: Option<PathBuf>,
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Tune the chain-recognition thresholds on development bitexts
    Optimize {
        /// Manifest of `x_text<TAB>y_text<TAB>refs` lines
        #[arg(long)]
        dev: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Number of temperatures
        #[arg(long, default_value_t = 100)]
        temps: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Generate a synthetic bitext with planted correspondences
    Synth {
        #[arg(short, long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 50_000)]
        chars: usize,
        #[arg(long, default_value_t = 0.25)]
        density: f64,
        #[arg(long, default_value_t = 0.0)]
        stray: f64,
        #[arg(long, default_value_t = 0)]
        frequent_types: usize,
        #[arg(long, default_value_t = 0.0)]
        frequent_rate: f64,
        /// No word-level deletions, insertions or swaps
        #[arg(long)]
        clean: bool,
        /// Omitted text as `AXIS:AT:LENGTH`, AXIS being the side it is missing from
        #[arg(long, value_parser = parse_omission)]
        omission: Vec<Omission>,
        /// Switched segment as `AT:LENGTH`
        #[arg(long = "switch", value_parser = parse_switch)]
        switches: Vec<Switch>,
    },
    /// Draw points, chains and a map as an SVG scatterplot
    Plot {
        #[arg(long)]
        points: Option<PathBuf>,
        /// Accepted chain points, drawn over the candidates
        #[arg(long)]
        chain_points: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, required_unless_present = "map")]
        width: Option<f64>,
        #[arg(long, required_unless_present = "map")]
        height: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn parse_omission(s: &str) -> std::result::Result<Omission, String> {
    let f: Vec<&str> = s.split(':').collect();
    let [axis, at, length] = f[..] else {
        return Err("expected AXIS:AT:LENGTH".into());
    };
    let axis = match axis {
        "x" => Axis::X,
        "y" => Axis::Y,
        _ => return Err(format!("axis must be x or y, got `{axis}`")),
    };
    Ok(Omission {
        axis,
        at: at.parse().map_err(|e| format!("{e}"))?,
        length: length.parse().map_err(|e| format!("{e}"))?,
    })
}

fn parse_switch(s: &str) -> std::result::Result<Switch, String> {
    let (at, length) = s.split_once(':').ok_or("expected AT:LENGTH")?;
    Ok(Switch {
        at: at.parse().map_err(|e| format!("{e}"))?,
        length: length.parse().map_err(|e| format!("{e}"))?,
    })
}

impl Global {
    fn params(&self) -> Result<Params> {
        match &self.params {
            Some(p) => Params::load(p),
            None => Ok(Params::default()),
        }
    }

    fn match_config(&self, p: &Params) -> Result<MatchConfig> {
        let mut cfg = MatchConfig::cognates(p.lcsr_threshold);
        if let Some(f) = &self.lexicon {
            cfg.lexicon = Some(TranslationLexicon::load(f)?);
            cfg.use_lexicon = true;
        }
        if let Some(f) = &self.stoplist_x {
            cfg.stop_x = StopList::load(f)?;
        }
        if let Some(f) = &self.stoplist_y {
            cfg.stop_y = StopList::load(f)?;
        }
        Ok(cfg)
    }

    fn tokenize(&self, path: &Path) -> Result<TokenizedText> {
        let text = fs::read_to_string(path)?;
        Ok(tokenize(&text, TokenizeOptions { keep_digits: self.keep_digits }))
    }
}

fn char_len(path: &Path) -> Result<usize> {
    Ok(fs::read_to_string(path)?.chars().count())
}

fn to_points(pairs: &[(f64, f64)]) -> Vec<Point> {
    pairs.iter().map(|&(x, y)| Point::new(x, y, 0, 0)).collect()
}

fn cmd_map(g: &Global, x: &Path, y: &Path, output: &Path, points_out: Option<&Path>, gap_threshold: f64) -> Result<ExitCode> {
    let p = g.params()?;
    let cfg = g.match_config(&p)?;
    let (xt, yt) = (g.tokenize(x)?, g.tokenize(y)?);
    let out = run_simr(&xt, &yt, &cfg, &p.simr, !g.no_second_pass)?;
    io::write_map(output, &out.map)?;
    if let Some(f) = points_out {
        let pts: Vec<(f64, f64)> = out.chains().flat_map(|c| c.points.iter().map(|q| (q.x, q.y))).collect();
        fs::write(f, io::format_points(&pts))?;
    }
    info!(
        "{} chains, {} anchors, {} points generated",
        out.chain_count(),
        out.map.anchors().len(),
        out.first_generated + out.second_generated
    );
    for gap in gap_report(&out.map, gap_threshold) {
        println!("gap\t{}\t{}\t{}", gap.axis, gap.start, gap.end);
    }
    if out.chain_count() == 0 {
        eprintln!("bimap: no chains found; the map is the main diagonal");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

struct AlignInputs<'a> {
    map: Option<&'a Path>,
    points: Option<&'a Path>,
    x_bounds: &'a Path,
    y_bounds: &'a Path,
    texts: Option<(&'a Path, &'a Path)>,
    output: &'a Path,
}

fn cmd_align(g: &Global, a: AlignInputs<'_>) -> Result<()> {
    let p = g.params()?;
    let xe = io::read_boundaries(a.x_bounds)?;
    let ye = io::read_boundaries(a.y_bounds)?;
    let (mut w, mut h) = (xe.last().copied().unwrap_or(0), ye.last().copied().unwrap_or(0));
    let pts = if let Some(m) = a.map {
        let map = io::read_map(m)?;
        let s = map.space();
        (w, h) = (s.width as usize, s.height as usize);
        if (w as f64, h as f64) != (s.width, s.height) {
            return Err(Error::Input(format!("{}: map dimensions are not whole characters", m.display())));
        }
        map.interior_points().collect()
    } else {
        io::read_points(a.points.expect("clap requires --map or --points"))?
    };
    if let Some((x, y)) = a.texts {
        (w, h) = (char_len(x)?, char_len(y)?);
    }
    let grid = SentenceGrid::new(xe, ye, w, h)?;
    let out = gsa_align(&to_points(&pts), &grid, &GsaOptions::new(p.min_confidence))?;
    fs::write(a.output, out.alignment.to_string())?;
    if let Some(r) = &g.relation {
        fs::write(r, io::format_relation(&out.relation))?;
    }
    info!(
        "{} blocks, {} re-aligned, largest re-aligned block {:?}",
        out.alignment.blocks().len(),
        out.replaced,
        out.largest_realigned
    );
    Ok(())
}

fn cmd_eval(map: Option<&Path>, refs: Option<&Path>, alignment: Option<&Path>, reference: Option<&Path>) -> Result<()> {
    if map.is_none() && alignment.is_none() {
        return Err(Error::Input("nothing to evaluate; give --map with --refs or --alignment with --reference".into()));
    }
    if let (Some(m), Some(r)) = (map, refs) {
        let map = io::read_map(m)?;
        let refs = io::read_points(r)?;
        println!("metric\trms\tmedian\tp99");
        for metric in Metric::ALL {
            let e = map_error(&map, &refs, metric)?;
            println!("{metric}\t{:.3}\t{:.3}\t{:.3}", e.rms, e.median_abs, e.p99);
        }
    }
    if let (Some(a), Some(r)) = (alignment, reference) {
        let test = io::read_alignment(a)?;
        let reference = io::read_alignment(r)?;
        let errors = alignment_errors(&test, &reference)?;
        println!("block errors\t{errors}\tof {}", reference.blocks().len());
    }
    Ok(())
}

fn cmd_optimize(g: &Global, dev: &Path, output: &Path, temps: usize, steps: usize) -> Result<()> {
    let initial = g.params()?;
    let opts = TokenizeOptions { keep_digits: g.keep_digits };
    let mut bitexts = Vec::new();
    for e in io::read_manifest(dev)? {
        bitexts.push(DevBitext {
            x: tokenize(&fs::read_to_string(&e.x_text)?, opts),
            y: tokenize(&fs::read_to_string(&e.y_text)?, opts),
            refs: io::read_points(&e.refs)?,
        });
    }
    if bitexts.is_empty() {
        return Err(Error::Input(format!("{}: no development bitexts", dev.display())));
    }
    let schedule = Schedule {
        temps,
        steps_per_temp: steps,
        ..Schedule::default()
    };
    let r = anneal(|p| dev_objective(&bitexts, p, Metric::Perpendicular), initial, &schedule, g.seed);
    println!(
        "best rms {:.3} after {} evaluations ({} accepted)",
        r.best_value, r.evaluations, r.accepted
    );
    let sizes: Vec<usize> = (5..=10).collect();
    for (k, lost) in anneal::chain_size_report(&bitexts, &r.best, &sizes)? {
        println!("chain size {k}: lost on {lost} of {}", bitexts.len());
    }
    r.best.save(output)
}

fn spec_record(s: &SynthSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "x_chars = {}", s.x_chars);
    let _ = writeln!(out, "vocab_size = {}", s.vocab_size);
    let _ = writeln!(out, "cognate_density = {}", s.cognate_density);
    let _ = writeln!(out, "stray_rate = {}", s.stray_rate);
    let _ = writeln!(out, "deletion_rate = {}", s.deletion_rate);
    let _ = writeln!(out, "insertion_rate = {}", s.insertion_rate);
    let _ = writeln!(out, "swap_rate = {}", s.swap_rate);
    let _ = writeln!(out, "frequent_types = {}", s.frequent_types);
    let _ = writeln!(out, "frequent_rate = {}", s.frequent_rate);
    let _ = writeln!(out, "sentence_words = {}..{}", s.sentence_words.0, s.sentence_words.1);
    for o in &s.omissions {
        let _ = writeln!(out, "omission = {}:{}:{}", o.axis, o.at, o.length);
    }
    for w in &s.switches {
        let _ = writeln!(out, "switch = {}:{}", w.at, w.length);
    }
    out
}

fn cmd_synth(spec: SynthSpec, dir: &Path) -> Result<()> {
    let s = generate_synthetic(&spec)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("x.txt"), &s.x_text)?;
    fs::write(dir.join("y.txt"), &s.y_text)?;
    fs::write(dir.join("x.bounds"), io::format_boundaries(&s.x_ends))?;
    fs::write(dir.join("y.bounds"), io::format_boundaries(&s.y_ends))?;
    fs::write(dir.join("refs.tsv"), io::format_points(&s.reference_points()))?;
    fs::write(dir.join("alignment.txt"), s.alignment.to_string())?;
    fs::write(dir.join("synth.txt"), spec_record(&spec))?;
    fs::write(dir.join("dev.tsv"), "x.txt\ty.txt\trefs.tsv\n")?;
    println!(
        "{} and {} characters, {} planted correspondences, {} blocks, mean token length {:.2}",
        s.x_text.chars().count(),
        s.y_text.chars().count(),
        s.tpcs.len(),
        s.alignment.blocks().len(),
        s.mean_token_len
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match cli.command {
        Command::Map {
            x_text,
            y_text,
            output,
            points_out,
            gap_threshold,
        } => return cmd_map(g, &x_text, &y_text, &output, points_out.as_deref(), gap_threshold),
        Command::Align {
            map,
            points,
            x_bounds,
            y_bounds,
            x_text,
            y_text,
            output,
        } => cmd_align(
            g,
            AlignInputs {
                map: map.as_deref(),
                points: points.as_deref(),
                x_bounds: &x_bounds,
                y_bounds: &y_bounds,
                texts: x_text.as_deref().zip(y_text.as_deref()),
                output: &output,
            },
        )?,
        Command::Eval {
            map,
            refs,
            alignment,
            reference,
        } => cmd_eval(map.as_deref(), refs.as_deref(), alignment.as_deref(), reference.as_deref())?,
        Command::Optimize {
            dev,
            output,
            temps,
            steps,
        } => cmd_optimize(g, &dev, &output, temps, steps)?,
        Command::Synth {
            out_dir,
            chars,
            density,
            stray,
            frequent_types,
            frequent_rate,
            clean,
            omission,
            switches,
        } => {
            let base = if clean {
                SynthSpec::clean(g.seed, chars)
            } else {
                SynthSpec {
                    seed: g.seed,
                    x_chars: chars,
                    ..SynthSpec::default()
                }
            };
            let spec = SynthSpec {
                cognate_density: density,
                stray_rate: stray,
                frequent_types,
                frequent_rate,
                omissions: omission,
                switches,
                ..base
            };
            cmd_synth(spec, &out_dir)?
        }
        Command::Plot {
            points,
            chain_points,
            map,
            width,
            height,
            output,
        } => {
            let map = map.as_deref().map(io::read_map).transpose()?;
            let space = match (width, height, &map) {
                (Some(w), Some(h), _) => BitextSpace::new(w, h)?,
                (_, _, Some(m)) => m.space(),
                _ => return Err(Error::Input("plot needs --width and --height or a map".into())),
            };
            let read = |f: Option<PathBuf>| f.as_deref().map(io::read_points).transpose().map(Option::unwrap_or_default);
            let svg = plot::render(&space, &read(points)?, &read(chain_points)?, map.as_ref());
            fs::write(&output, svg)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bimap: {e}");
            ExitCode::FAILURE
        }
    }
}
