//! Bitext mapping by greedy chain recognition over matched token points, and
//! sentence alignment derived from the resulting map.

pub mod anneal;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod gsa;
pub mod io;
pub mod mapping;
pub mod matching;
pub mod params;
pub mod pipeline;
pub mod search;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    mean_position, perp_displacement, Anchor, BitextMap, BitextSpace, Chain, Mer, Point, SearchRect, Token,
    TokenizedText,
};
pub use mapping::{build_map, encapsulate_mers, gap_report, second_pass, Axis, Gap};
pub use matching::{
    generate_points, lcs_length, lcsr, matches, tokenize, MatchConfig, PointGenerator, StopList, TokenizeOptions,
    TranslationLexicon,
};
pub use params::{LineFit, Params, SimrParams};
pub use search::{find_next_chain, trace_area, trace_first_pass, SearchArea};
pub use gsa::{gsa_align, length_align, AlignedBlock, Alignment, GsaOptions, LengthModel, SentenceGrid};
pub use eval::{alignment_errors, map_error, ErrorStats, Metric};
pub use synth::{generate_synthetic, Omission, Switch, SynthSpec, SyntheticBitext, Tpc};
pub use pipeline::{run_simr, SimrOutput};
pub use anneal::{anneal, AnnealResult, DevBitext, Schedule};
