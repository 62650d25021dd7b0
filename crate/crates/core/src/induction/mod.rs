//! Learning clauses from examples: candidate literals, gain over implicit
//! negatives, and the covering loops.

mod candidates;
mod evaluator;
mod learner;
mod params;
mod scoring;
mod specialize;

use thiserror::Error;

pub use candidates::{generate_candidates, CandidateKind, CandidateLiteral, ClauseDraft};
pub use evaluator::{BaseAnswers, Evaluator, ExhaustedGoals, Outcome};
pub use learner::{
    learn, learn_foidl, learn_ifoil, ClauseStats, IterationAction, IterationRecord, LearnedProgram,
    MEMORIZED_MARKER,
};
pub use params::{LearnMode, LearnerParams};
pub use scoring::{gain, implicit_negative_mass, info, mass_from, StateScore};
pub use specialize::{
    select_literal, specialize_clause, specialize_clause_dl, specialize_clause_unordered,
    specialize_clause_with, weak_literal_step, CandidateScore, LiveQuery, Problem, QueryStatus,
    SpecializeOutcome, SpecializedClause, TrainingState,
};

use crate::background::BackgroundError;
use crate::logic::syntax::SyntaxError;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("training example {0} is not ground")]
    NonGround(String),
    #[error("conflicting training outputs: {0}")]
    Conflict(String),
    #[error(transparent)]
    Background(#[from] BackgroundError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Program(String),
    #[error("{0}")]
    Io(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}
