//! Fixtures shared by the benchmarks.

use bimap_core::{generate_synthetic, tokenize, SynthSpec, SyntheticBitext, TokenizeOptions, TokenizedText};

/// A seeded synthetic bitext with light stray-point noise.
pub fn bitext(seed: u64, x_chars: usize) -> SyntheticBitext {
    generate_synthetic(&SynthSpec {
        seed,
        x_chars,
        stray_rate: 0.1,
        ..SynthSpec::default()
    })
    .expect("valid synthetic spec")
}

pub fn tokenized(s: &SyntheticBitext) -> (TokenizedText, TokenizedText) {
    (
        tokenize(&s.x_text, TokenizeOptions::default()),
        tokenize(&s.y_text, TokenizeOptions::default()),
    )
}
