//! The covering loops and the learned program they produce.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use crate::background::{
    extract_theory_constants, BackgroundKB, PredicateSignature, TheoryConstantTable,
};
use crate::dataset::Example;
use crate::logic::syntax::{self, Item};
use crate::logic::{Clause, Literal, Term};
use crate::solver::{answer_output, first_answer, output_goal, Program, SolveBudget};

use super::evaluator::ExhaustedGoals;
use super::params::{LearnMode, LearnerParams};
use super::specialize::{specialize_clause_with, Problem, SpecializeOutcome};
use super::LearnError;

/// Marker comment on memorized exception facts in program files.
pub const MEMORIZED_MARKER: &str = "memorized";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseStats {
    /// Examples removed from the to-cover set when the clause was added.
    pub covered: usize,
    pub specialization_steps: usize,
    /// Previously correct examples returned to the to-cover set.
    pub uncovered: usize,
    pub weak_literals: usize,
}

impl ClauseStats {
    pub fn was_uncovering_applied(&self) -> bool {
        self.uncovered > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IterationAction {
    /// A clause was added to the rules.
    Added { covered: usize, uncovered: usize },
    /// A clause was discarded and these many examples memorized.
    Memorized { count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    pub to_cover_before: usize,
    pub to_cover_after: usize,
    pub action: IterationAction,
}

/// Memorized exceptions (tried first) followed by the learned rules.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnedProgram {
    pub target: PredicateSignature,
    pub mode: LearnMode,
    pub exception_facts: Vec<Clause>,
    pub rules: Vec<Clause>,
    /// One entry per rule, empty for programs read from a file.
    pub stats: Vec<ClauseStats>,
    pub trace: Vec<IterationRecord>,
    /// Query evaluations during learning cut short by the solve budget.
    pub truncated_queries: usize,
}

impl LearnedProgram {
    pub fn new(target: PredicateSignature, mode: LearnMode) -> Self {
        LearnedProgram {
            target,
            mode,
            exception_facts: Vec::new(),
            rules: Vec::new(),
            stats: Vec::new(),
            trace: Vec::new(),
            truncated_queries: 0,
        }
    }

    /// All clauses in evaluation order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.exception_facts.iter().chain(&self.rules)
    }

    /// The background definitions followed by this program's clauses.
    pub fn to_program(&self, kb: &BackgroundKB) -> Program {
        kb.program().extended(self.clauses().cloned())
    }

    /// The first answer for `input`, or `None` if there is none within
    /// the budget.
    pub fn first_output(
        &self,
        program: &Program,
        input: &Term,
        budget: SolveBudget,
    ) -> Option<Term> {
        let ex = Example::new(input.clone(), Term::nil());
        first_answer(program, &output_goal(&self.target, &ex), budget)
            .answer
            .map(|a| answer_output(&a))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.target != PredicateSignature::past_tense() {
            out.push_str(&syntax::render_signature(&self.target));
            out.push('\n');
        }
        for f in &self.exception_facts {
            out.push_str(&syntax::render_clause(f));
            out.push_str(" % ");
            out.push_str(MEMORIZED_MARKER);
            out.push('\n');
        }
        for r in &self.rules {
            out.push_str(&syntax::render_clause(r));
            out.push('\n');
        }
        out
    }

    /// Reads a program file: clauses, `% memorized` on exception facts, and
    /// an optional target signature (default `past(word:+, word:-)`).
    pub fn parse(src: &str) -> Result<Self, LearnError> {
        let mut target = None;
        let mut facts = Vec::new();
        let mut rules = Vec::new();
        for item in syntax::parse_items(src)? {
            match item {
                Item::Signature { signature, line } => {
                    if target.replace(signature).is_some() {
                        return Err(LearnError::Program(format!(
                            "line {line}: more than one target signature"
                        )));
                    }
                }
                Item::Clause {
                    clause,
                    line,
                    comment,
                } => {
                    if comment.as_deref() == Some(MEMORIZED_MARKER) {
                        if !clause.body.is_empty() || !clause.head.is_ground() {
                            return Err(LearnError::Program(format!(
                                "line {line}: a memorized exception must be a ground fact"
                            )));
                        }
                        facts.push(clause);
                    } else {
                        rules.push(clause);
                    }
                }
            }
        }
        let target = target.unwrap_or_else(PredicateSignature::past_tense);
        let mode = if rules.iter().any(|r| r.ends_in_cut) || rules.is_empty() {
            LearnMode::DecisionList
        } else {
            LearnMode::Unordered
        };
        let mut program = LearnedProgram::new(target, mode);
        program.exception_facts = facts;
        program.rules = rules;
        Ok(program)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LearnError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| LearnError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LearnError> {
        let path = path.as_ref();
        fs::write(path, self.to_text())
            .map_err(|e| LearnError::Io(format!("{}: {e}", path.display())))
    }
}

/// Distinct examples plus what the loops need to know about them.
struct Prepared {
    examples: Vec<Example>,
    frequency: Vec<usize>,
    same_input_outputs: Vec<Vec<Term>>,
}

fn prepare(
    train: &[Example],
    kb: &BackgroundKB,
    target: &PredicateSignature,
    params: &LearnerParams,
) -> Result<Prepared, LearnError> {
    params.validate()?;
    if !target.is_functional_binary() {
        return Err(LearnError::Unsupported(format!(
            "target {target} is not functional: learning needs exactly one input and one output argument"
        )));
    }
    kb.check_target(target)?;
    let mut examples: Vec<Example> = Vec::new();
    let mut frequency = Vec::new();
    let mut index: HashMap<&Example, usize> = HashMap::new();
    let mut outputs: HashMap<&Term, &Term> = HashMap::new();
    for ex in train {
        if !ex.is_ground() {
            return Err(LearnError::NonGround(ex.to_string()));
        }
        if let Some(prev) = outputs.insert(&ex.input, &ex.output) {
            if prev != &ex.output {
                return Err(LearnError::Conflict(format!(
                    "{} maps to both {} and {}",
                    ex.input_text(),
                    prev.as_word().unwrap_or_else(|| prev.to_string()),
                    ex.output_text()
                )));
            }
        }
        match index.get(ex) {
            Some(&i) => frequency[i] += 1,
            None => {
                index.insert(ex, examples.len());
                examples.push(ex.clone());
                frequency.push(1);
            }
        }
    }
    let same_input_outputs = examples.iter().map(|e| vec![e.output.clone()]).collect();
    Ok(Prepared {
        examples,
        frequency,
        same_input_outputs,
    })
}

/// Most frequent example still to cover; ties go to the smallest input.
fn most_frequent(prep: &Prepared, to_cover: &BTreeSet<usize>) -> usize {
    *to_cover
        .iter()
        .min_by(|&&a, &&b| {
            prep.frequency[b].cmp(&prep.frequency[a]).then_with(|| {
                prep.examples[a]
                    .input_text()
                    .cmp(&prep.examples[b].input_text())
            })
        })
        .expect("called with a non-empty set")
}

fn memorized_fact(target: &PredicateSignature, ex: &Example) -> Clause {
    let in_pos = target.input_positions().next().unwrap_or(0);
    let args = (0..target.arity())
        .map(|i| {
            if i == in_pos {
                ex.input.clone()
            } else {
                ex.output.clone()
            }
        })
        .collect();
    Clause::new(Literal::new(target.name, args), Vec::new(), true)
}

struct Run<'a> {
    prep: Prepared,
    kb: &'a BackgroundKB,
    target: &'a PredicateSignature,
    params: LearnerParams,
    constants: TheoryConstantTable,
    program: LearnedProgram,
    to_cover: BTreeSet<usize>,
    memorized: Vec<bool>,
    exhausted: ExhaustedGoals,
}

impl<'a> Run<'a> {
    fn new(
        train: &[Example],
        kb: &'a BackgroundKB,
        target: &'a PredicateSignature,
        params: &LearnerParams,
        mode: LearnMode,
    ) -> Result<Self, LearnError> {
        let prep = prepare(train, kb, target, params)?;
        let n = prep.examples.len();
        let constants = extract_theory_constants(&prep.examples, params.theory_min_occurrences);
        Ok(Run {
            prep,
            kb,
            target,
            params: params.clone().with_mode(mode),
            constants,
            program: LearnedProgram::new(target.clone(), mode),
            to_cover: (0..n).collect(),
            memorized: vec![false; n],
            exhausted: ExhaustedGoals::new(),
        })
    }

    fn previously_correct(&self) -> Vec<bool> {
        (0..self.prep.examples.len())
            .map(|i| !self.to_cover.contains(&i) && !self.memorized[i])
            .collect()
    }

    fn memorize(&mut self, which: &[usize]) {
        for &i in which {
            self.program
                .exception_facts
                .push(memorized_fact(self.target, &self.prep.examples[i]));
            self.memorized[i] = true;
            self.to_cover.remove(&i);
        }
    }

    /// Memorizes `covered`, or the most frequent remaining example if the
    /// clause covered nothing.
    fn discard(&mut self, covered: &[usize]) -> usize {
        let which = if covered.is_empty() {
            vec![most_frequent(&self.prep, &self.to_cover)]
        } else {
            covered.to_vec()
        };
        self.memorize(&which);
        which.len()
    }

    fn correct_under(&self, program: &Program, i: usize) -> bool {
        let ex = &self.prep.examples[i];
        self.program
            .first_output(program, &ex.input, self.params.budget)
            .is_some_and(|o| o == ex.output)
    }

    /// Progress, plus (when enabled) that `must_stay_correct` still are.
    fn check(&self, before: usize, must_stay_correct: &[usize]) -> Result<(), LearnError> {
        if self.to_cover.len() >= before {
            return Err(LearnError::Invariant(format!(
                "examples to cover did not decrease ({before} -> {})",
                self.to_cover.len()
            )));
        }
        if self.params.check_invariants && !must_stay_correct.is_empty() {
            let program = self.program.to_program(self.kb);
            if let Some(&i) = must_stay_correct
                .iter()
                .find(|&&i| !self.correct_under(&program, i))
            {
                return Err(LearnError::Invariant(format!(
                    "adding a clause changed the answer for {}",
                    self.prep.examples[i]
                )));
            }
        }
        Ok(())
    }

    fn check_consistency(&self) -> Result<(), LearnError> {
        if !self.params.check_invariants {
            return Ok(());
        }
        let program = self.program.to_program(self.kb);
        if let Some(i) = (0..self.prep.examples.len()).find(|&i| !self.correct_under(&program, i)) {
            return Err(LearnError::Invariant(format!(
                "learned program answers {} incorrectly",
                self.prep.examples[i]
            )));
        }
        Ok(())
    }

    fn specialize(&self, previously_correct: &[bool]) -> SpecializeOutcome {
        let n = self.prep.examples.len();
        let to_cover: Vec<bool> = (0..n).map(|i| self.to_cover.contains(&i)).collect();
        let problem = Problem {
            examples: &self.prep.examples,
            same_input_outputs: &self.prep.same_input_outputs,
            to_cover: &to_cover,
            previously_correct,
            memorized: &self.memorized,
            kb: self.kb,
            target: self.target,
            constants: &self.constants,
            params: &self.params,
        };
        specialize_clause_with(&problem, self.params.mode, &self.exhausted)
    }

    fn record(&mut self, before: usize, action: IterationAction) {
        log::debug!("{action:?}: {before} -> {} to cover", self.to_cover.len());
        self.program.trace.push(IterationRecord {
            to_cover_before: before,
            to_cover_after: self.to_cover.len(),
            action,
        });
    }

    fn decision_list(mut self) -> Result<LearnedProgram, LearnError> {
        while !self.to_cover.is_empty() {
            let before = self.to_cover.len();
            let previously_correct = self.previously_correct();
            let outcome = self.specialize(&previously_correct);
            let r = outcome.result().clone();
            self.program.truncated_queries += r.truncated;
            let covered = r.covered.len();
            let broken = r.broken.len();
            let accuracy = if covered + broken == 0 {
                0.0
            } else {
                covered as f64 / (covered + broken) as f64
            };
            let keep = covered > 0
                && (broken == 0
                    || (accuracy >= self.params.min_clause_accuracy && covered > broken));
            let mut must_stay: Vec<usize> = (0..previously_correct.len())
                .filter(|&i| previously_correct[i] && !r.broken.contains(&i))
                .collect();
            if keep {
                log::debug!("keep {} (covers {covered}, uncovers {broken})", r.clause);
                self.program.rules.insert(0, r.clause.clone());
                self.program.stats.insert(
                    0,
                    ClauseStats {
                        covered,
                        specialization_steps: r.steps,
                        uncovered: broken,
                        weak_literals: r.weak_literals,
                    },
                );
                for i in &r.covered {
                    self.to_cover.remove(i);
                }
                self.to_cover.extend(r.broken.iter().copied());
                must_stay.extend(r.covered.iter().copied());
                self.record(
                    before,
                    IterationAction::Added {
                        covered,
                        uncovered: broken,
                    },
                );
            } else {
                log::debug!("discard {} (covers {covered}, breaks {broken})", r.clause);
                let count = self.discard(&r.covered);
                self.record(before, IterationAction::Memorized { count });
            }
            self.check(before, &must_stay)?;
        }
        self.check_consistency()?;
        Ok(self.program)
    }

    fn unordered(mut self) -> Result<LearnedProgram, LearnError> {
        while !self.to_cover.is_empty() {
            let before = self.to_cover.len();
            let previously_correct = self.previously_correct();
            let outcome = self.specialize(&previously_correct);
            let r = outcome.result().clone();
            self.program.truncated_queries += r.truncated;
            let mut must_stay: Vec<usize> = (0..previously_correct.len())
                .filter(|&i| previously_correct[i])
                .collect();
            if !outcome.is_stuck() && !r.covered.is_empty() {
                log::debug!("append {} (covers {})", r.clause, r.covered.len());
                self.program.rules.push(r.clause.clone());
                self.program.stats.push(ClauseStats {
                    covered: r.covered.len(),
                    specialization_steps: r.steps,
                    uncovered: 0,
                    weak_literals: r.weak_literals,
                });
                for i in &r.covered {
                    self.to_cover.remove(i);
                }
                must_stay.extend(r.covered.iter().copied());
                self.record(
                    before,
                    IterationAction::Added {
                        covered: r.covered.len(),
                        uncovered: 0,
                    },
                );
            } else {
                log::debug!("discard {} (covers {})", r.clause, r.covered.len());
                let count = self.discard(&r.covered);
                self.record(before, IterationAction::Memorized { count });
            }
            self.check(before, &must_stay)?;
        }
        self.check_consistency()?;
        Ok(self.program)
    }
}

/// Learns a decision list: clauses ending in cut, each new clause placed
/// in front of the earlier ones.
pub fn learn_foidl(
    train: &[Example],
    kb: &BackgroundKB,
    target: &PredicateSignature,
    params: &LearnerParams,
) -> Result<LearnedProgram, LearnError> {
    Run::new(train, kb, target, params, LearnMode::DecisionList)?.decision_list()
}

/// Learns cut-free clauses, each of which may only produce correct outputs
/// for the training inputs.
pub fn learn_ifoil(
    train: &[Example],
    kb: &BackgroundKB,
    target: &PredicateSignature,
    params: &LearnerParams,
) -> Result<LearnedProgram, LearnError> {
    Run::new(train, kb, target, params, LearnMode::Unordered)?.unordered()
}

/// Dispatches on `params.mode`.
pub fn learn(
    train: &[Example],
    kb: &BackgroundKB,
    target: &PredicateSignature,
    params: &LearnerParams,
) -> Result<LearnedProgram, LearnError> {
    match params.mode {
        LearnMode::DecisionList => learn_foidl(train, kb, target, params),
        LearnMode::Unordered => learn_ifoil(train, kb, target, params),
    }
}
