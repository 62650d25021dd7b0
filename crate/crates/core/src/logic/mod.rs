//! Terms, substitutions, clauses and their text syntax.

mod clause;
mod subst;
mod symbol;
pub mod syntax;
mod term;

pub use clause::{rename_apart, Clause, Literal, VarGen};
pub use subst::{apply, unifiable, unify, Substitution};
pub use symbol::{well_known, Sym};
pub(crate) use term::rebuild;
pub use term::{variable_fraction, Term, Var};
