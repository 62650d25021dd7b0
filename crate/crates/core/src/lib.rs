//! First-order decision-list induction over intensional background
//! knowledge, with implicit negative examples drawn from output queries.
//!
//! The crate is layered bottom-up: [`logic`] (terms and unification),
//! [`solver`] (a depth-first interpreter with clause-terminal cut),
//! [`background`] (signatures, built-in predicates, theory constants),
//! [`induction`] (the learners), [`dataset`] and [`eval`].

pub mod background;
pub mod dataset;
pub mod eval;
pub mod induction;
pub mod logic;
pub mod solver;

pub use background::{
    builtin_components, builtin_split, extract_theory_constants, BackgroundError, BackgroundKB,
    Mode, PredicateSignature, TheoryConstantTable,
};
pub use dataset::{
    split_trials, synthesize_corpus, Corpus, CorpusError, Example, SplitSpec, Trial,
};
pub use eval::{complexity, evaluate, Complexity, CsvRow, EvalReport, Verdict, CSV_HEADER};
pub use induction::{
    learn, learn_foidl, learn_ifoil, LearnError, LearnMode, LearnedProgram, LearnerParams,
};
pub use logic::{Clause, Literal, Substitution, Sym, Term, Var};
pub use solver::{
    first_answer, output_query, solve, Answer, Program, ProgramError, Solution, SolveBudget,
};
