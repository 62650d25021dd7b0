//! Word-pair corpora: file format, synthetic generation and
//! train/test splitting.

mod corpus;
mod split;
mod synth;

pub use corpus::{default_alphabet, Corpus, CorpusError, Example};
pub use split::{split_trials, trial_rng, SplitSpec, Trial};
pub use synth::{regular_past, synthesize_corpus, RegularClass, IRREGULAR_VERBS};
