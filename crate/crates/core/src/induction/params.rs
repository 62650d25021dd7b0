use std::fmt;
use std::str::FromStr;

use crate::solver::SolveBudget;

use super::LearnError;

/// How learned clauses combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearnMode {
    /// Ordered clauses ending in cut; new clauses are prepended.
    DecisionList,
    /// Cut-free clauses, appended; every answer must be correct.
    Unordered,
}

impl LearnMode {
    /// Command-line name: `foidl` or `ifoil`.
    pub fn name(self) -> &'static str {
        match self {
            LearnMode::DecisionList => "foidl",
            LearnMode::Unordered => "ifoil",
        }
    }
}

impl fmt::Display for LearnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "foidl" => Ok(LearnMode::DecisionList),
            "ifoil" => Ok(LearnMode::Unordered),
            other => Err(format!("unknown mode '{other}' (expected foidl or ifoil)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerParams {
    /// Estimated size of the term universe, the base of `u^v - p`.
    pub u: u64,
    pub min_clause_coverage: usize,
    /// Literals without gain that may be added in a row.
    pub weak_literal_limit: usize,
    pub min_clause_accuracy: f64,
    pub budget: SolveBudget,
    pub mode: LearnMode,
    /// Affixes must occur in this many distinct training words to become
    /// theory constants.
    pub theory_min_occurrences: usize,
    /// Clause bodies never grow past this length.
    pub max_body_literals: usize,
    /// Re-check progress, prepend soundness and training consistency
    /// after every iteration and fail on a violation.
    pub check_invariants: bool,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            u: 1000,
            min_clause_coverage: 2,
            weak_literal_limit: 1,
            min_clause_accuracy: 0.5,
            budget: SolveBudget::default(),
            mode: LearnMode::DecisionList,
            theory_min_occurrences: 2,
            max_body_literals: 10,
            check_invariants: cfg!(debug_assertions),
        }
    }
}

impl LearnerParams {
    pub fn with_mode(mut self, mode: LearnMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |msg: String| Err(LearnError::Params(msg));
        if self.u == 0 {
            return bad("u must be positive".into());
        }
        if self.min_clause_coverage == 0 {
            return bad("minimum clause coverage must be at least 1".into());
        }
        if !(self.min_clause_accuracy > 0.0 && self.min_clause_accuracy <= 1.0) {
            return bad(format!(
                "minimum clause accuracy {} is outside (0, 1]",
                self.min_clause_accuracy
            ));
        }
        if self.theory_min_occurrences == 0 {
            return bad("theory constant occurrence threshold must be at least 1".into());
        }
        if self.max_body_literals == 0 {
            return bad("maximum body length must be at least 1".into());
        }
        let b = self.budget;
        if b.max_answers == 0 || b.max_steps == 0 || b.max_depth == 0 {
            return bad("solve budgets must be positive".into());
        }
        Ok(())
    }
}
