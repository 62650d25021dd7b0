//! Shared fixtures for benchmarks.

use foidl_core::{synthesize_corpus, Example, Program};

/// Hand-written decision list for English past tense.
pub const EXPERT_PROGRAM: &str = "past(A,B) :- split(A,C,[e,e,p]), split(B,C,[e,p,t]), !.\n\
                                  past(A,B) :- split(A,C,[y]), split(B,C,[i,e,d]), !.\n\
                                  past(A,B) :- split(A,C,[e]), split(B,A,[d]), !.\n\
                                  past(A,B) :- split(B,A,[e,d]).\n";

pub const WORDS: [&str; 6] = ["act", "walk", "study", "sleep", "bake", "photograph"];

/// The expert decision list on top of the builtin `split` background.
pub fn expert_program() -> Program {
    let rules = Program::parse(EXPERT_PROGRAM).expect("expert program parses");
    foidl_core::builtin_split()
        .program()
        .extended(rules.clauses().iter().cloned())
}

/// A deterministic synthetic training set.
pub fn training_set(n: usize, irregular_fraction: f64) -> Vec<Example> {
    synthesize_corpus(n, irregular_fraction, 17)
        .expect("synthetic corpus")
        .into_examples()
}
