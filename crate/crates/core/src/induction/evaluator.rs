//! Answers of a clause under construction, and of each one-literal
//! extension of it, for a single output query.
//!
//! The body's answers are enumerated once per query; each candidate
//! literal is then solved against them in order, which yields the same
//! answer sequence as running the extended clause from scratch.

use std::sync::Mutex;

use rustc_hash::FxHashMap as HashMap;

use crate::background::PredicateSignature;
use crate::logic::{Literal, Substitution, Term, Var};
use crate::solver::{Answer, AnswerStream, Program, SolveBudget};

use super::candidates::{CandidateKind, CandidateLiteral};
use super::params::LearnMode;

/// Candidate literals introduce at most this many variables.
const NEW_VAR_SLACK: u32 = 64;

/// Outputs produced by a clause for one query: at most one in
/// decision-list mode (the first answer), all of them otherwise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub outputs: Vec<Term>,
    /// A budget tripped, so later answers may be missing.
    pub truncated: bool,
}

/// Answers to `input_var = input, body...` for one query.
pub struct BaseAnswers {
    answers: Vec<Answer>,
    floors: Vec<u32>,
    truncated: bool,
}

impl BaseAnswers {
    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

#[derive(Clone)]
struct SubResult {
    answers: Vec<Answer>,
    complete: bool,
    steps: u64,
}

pub struct Evaluator<'a> {
    kb: &'a Program,
    input_var: Var,
    output_var: Var,
    budget: SolveBudget,
    mode: LearnMode,
    exhausting: Table<'a>,
}

enum Table<'a> {
    Owned(ExhaustedGoals),
    Shared(&'a ExhaustedGoals),
}

/// Goals (up to variable renaming) whose solve tripped a budget when
/// given the whole step budget, with the steps it took. Such a goal trips
/// it again, so it is not solved twice. Entries depend only on the
/// program, the budget and the mode, so one table can serve every clause
/// of a learning run.
#[derive(Debug, Default)]
pub struct ExhaustedGoals {
    goals: Mutex<HashMap<(bool, Literal), u64>>,
}

impl ExhaustedGoals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.goals.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `goal` with its variables renumbered by first occurrence.
fn canonical(goal: &Literal) -> Literal {
    let mut seen: HashMap<Var, Var> = HashMap::default();
    goal.map_vars(&mut |v| {
        let n = seen.len() as u32;
        Term::Var(*seen.entry(v).or_insert(Var(n)))
    })
}

fn value(ans: &Answer, v: Var) -> Term {
    ans.get(v).cloned().unwrap_or(Term::Var(v))
}

impl<'a> Evaluator<'a> {
    /// Head variables are numbered by argument position, so the target's
    /// input and output arguments are variables `in_pos` and `out_pos`.
    pub fn new(
        kb: &'a Program,
        target: &PredicateSignature,
        budget: SolveBudget,
        mode: LearnMode,
    ) -> Self {
        let input_var = Var(target.input_positions().next().unwrap_or(0) as u32);
        let output_var = Var(target.output_positions().next().unwrap_or(1) as u32);
        Evaluator {
            kb,
            input_var,
            output_var,
            budget,
            mode,
            exhausting: Table::Owned(ExhaustedGoals::new()),
        }
    }

    /// Records budget-tripping goals in `table` instead of a private one.
    pub fn with_exhausted_goals(mut self, table: &'a ExhaustedGoals) -> Self {
        self.exhausting = Table::Shared(table);
        self
    }

    fn exhausted(&self) -> std::sync::MutexGuard<'_, HashMap<(bool, Literal), u64>> {
        let table = match &self.exhausting {
            Table::Owned(t) => t,
            Table::Shared(t) => t,
        };
        table.goals.lock().expect("cache lock")
    }

    fn first_only(&self) -> bool {
        self.mode == LearnMode::DecisionList
    }

    /// Enumerates the body's answers. With `limit_one`, stops after the first.
    pub fn base(&self, input: &Term, body: &[Literal], nvars: u32, limit_one: bool) -> BaseAnswers {
        let mut goals = Vec::with_capacity(body.len() + 1);
        goals.push(Literal::equality(Term::Var(self.input_var), input.clone()));
        goals.extend(body.iter().cloned());
        let floor = nvars + NEW_VAR_SLACK;
        let mut stream = AnswerStream::new(self.kb, &goals, self.budget).with_var_floor(floor);
        let answers: Vec<Answer> = if limit_one {
            stream.by_ref().take(1).collect()
        } else {
            stream.by_ref().collect()
        };
        let floors = answers
            .iter()
            .map(|a| {
                a.bindings()
                    .iter()
                    .filter_map(|(_, t)| t.max_var())
                    .max()
                    .map_or(floor, |m| (m + 1).max(floor))
            })
            .collect();
        BaseAnswers {
            answers,
            floors,
            truncated: stream.truncated(),
        }
    }

    /// Outputs of the clause itself.
    pub fn clause_outcome(&self, base: &BaseAnswers) -> Outcome {
        let take = if self.first_only() { 1 } else { usize::MAX };
        Outcome {
            outputs: base
                .answers
                .iter()
                .take(take)
                .map(|a| value(a, self.output_var))
                .collect(),
            truncated: base.truncated && (base.answers.is_empty() || !self.first_only()),
        }
    }

    /// Outputs of the clause extended by each candidate, in candidate order.
    pub fn candidate_outcomes(
        &self,
        base: &BaseAnswers,
        candidates: &[CandidateLiteral],
    ) -> Vec<Outcome> {
        self.candidate_outcomes_except(base, candidates, &[])
    }

    /// As [`Evaluator::candidate_outcomes`], but candidates flagged in
    /// `skip` are not solved and get an empty, truncated outcome.
    pub fn candidate_outcomes_except(
        &self,
        base: &BaseAnswers,
        candidates: &[CandidateLiteral],
        skip: &[bool],
    ) -> Vec<Outcome> {
        let mut memo: HashMap<(Literal, u32), SubResult> = HashMap::default();
        let mut out = vec![Outcome::default(); candidates.len()];
        let mut by_var: HashMap<Var, Vec<usize>> = HashMap::default();
        for (i, cand) in candidates.iter().enumerate() {
            if skip.get(i).copied().unwrap_or(false) {
                out[i] = Outcome {
                    outputs: Vec::new(),
                    truncated: true,
                };
                continue;
            }
            match cand.kind {
                CandidateKind::ConstantEquality => match &cand.literal.args[0] {
                    Term::Var(v) => by_var.entry(*v).or_default().push(i),
                    _ => out[i] = self.call_outcome(base, &cand.literal, &mut memo),
                },
                CandidateKind::BackgroundCall => {
                    out[i] = self.call_outcome(base, &cand.literal, &mut memo)
                }
            }
        }
        let mut vars: Vec<_> = by_var.into_iter().collect();
        vars.sort_by_key(|(v, _)| *v);
        for (v, idxs) in vars {
            self.equality_outcomes(base, v, &idxs, candidates, &mut out);
        }
        out
    }

    fn call_outcome(
        &self,
        base: &BaseAnswers,
        lit: &Literal,
        memo: &mut HashMap<(Literal, u32), SubResult>,
    ) -> Outcome {
        let mut outcome = Outcome {
            outputs: Vec::new(),
            truncated: base.truncated,
        };
        let mut steps_left = self.budget.max_steps;
        for (sigma, &floor) in base.answers.iter().zip(&base.floors) {
            let goal = Literal::new(lit.pred, lit.args.iter().map(|a| sigma.apply(a)).collect());
            let key = (goal, floor);
            let sub = match memo.get(&key) {
                Some(hit) => hit.clone(),
                None => {
                    if steps_left == 0 {
                        outcome.truncated = true;
                        break;
                    }
                    let res = self.solve_goal(&key.0, floor, steps_left);
                    steps_left = steps_left.saturating_sub(res.steps);
                    memo.insert(key, res.clone());
                    res
                }
            };
            if !sub.complete && (sub.answers.is_empty() || !self.first_only()) {
                outcome.truncated = true;
            }
            if sub.answers.is_empty() {
                continue;
            }
            let out_term = value(sigma, self.output_var);
            if self.first_only() {
                outcome.outputs.push(sub.answers[0].apply(&out_term));
                outcome.truncated = false;
                return outcome;
            }
            outcome
                .outputs
                .extend(sub.answers.iter().map(|theta| theta.apply(&out_term)));
            if outcome.outputs.len() >= self.budget.max_answers {
                // The extended clause's own answer budget is used up.
                outcome.outputs.truncate(self.budget.max_answers);
                outcome.truncated = true;
                break;
            }
        }
        outcome
    }

    /// Solves `goal` within `steps_left` steps. A goal known to trip the
    /// budget gets the result it would produce: in decision-list mode one
    /// with no answer, otherwise one whose answers are dropped, since a
    /// truncated outcome only records that it is incomplete.
    fn solve_goal(&self, goal: &Literal, floor: u32, steps_left: u64) -> SubResult {
        let full = steps_left == self.budget.max_steps;
        let key = (self.first_only(), canonical(goal));
        if let Some(&steps) = self.exhausted().get(&key) {
            return SubResult {
                answers: Vec::new(),
                complete: false,
                steps: steps.min(steps_left),
            };
        }
        let budget = SolveBudget {
            max_steps: steps_left,
            ..self.budget
        };
        let mut stream =
            AnswerStream::new(self.kb, std::slice::from_ref(goal), budget).with_var_floor(floor);
        let answers: Vec<Answer> = if self.first_only() {
            stream.by_ref().take(1).collect()
        } else {
            stream.by_ref().collect()
        };
        let res = SubResult {
            complete: !stream.truncated(),
            steps: stream.steps(),
            answers,
        };
        if full && !res.complete && (res.answers.is_empty() || !self.first_only()) {
            self.exhausted().insert(key, res.steps);
        }
        res
    }

    /// `v = c` for every constant candidate on `v`, sharing one pass over
    /// the base answers.
    fn equality_outcomes(
        &self,
        base: &BaseAnswers,
        v: Var,
        idxs: &[usize],
        candidates: &[CandidateLiteral],
        out: &mut [Outcome],
    ) {
        let values: Vec<Term> = base.answers.iter().map(|a| value(a, v)).collect();
        let mut ground: HashMap<&Term, Vec<usize>> = HashMap::default();
        let mut nonground: Vec<usize> = Vec::new();
        for (i, t) in values.iter().enumerate() {
            if t.is_ground() {
                let slot = ground.entry(t).or_default();
                if slot.is_empty() || !self.first_only() {
                    slot.push(i);
                }
            } else {
                nonground.push(i);
            }
        }
        for &ci in idxs {
            let c = &candidates[ci].literal.args[1];
            let exact = ground.get(c).map_or(&[][..], Vec::as_slice);
            let mut hits: Vec<(usize, Option<Substitution>)> = Vec::new();
            let bound = if self.first_only() {
                exact.first().copied().unwrap_or(usize::MAX)
            } else {
                usize::MAX
            };
            for &j in &nonground {
                if j >= bound {
                    break;
                }
                if let Some(s) = Substitution::new().unify(&values[j], c) {
                    hits.push((j, Some(s)));
                    if self.first_only() {
                        break;
                    }
                }
            }
            hits.extend(exact.iter().map(|&j| (j, None)));
            hits.sort_by_key(|(j, _)| *j);
            if self.first_only() {
                hits.truncate(1);
            }
            let outputs = hits
                .into_iter()
                .map(|(j, s)| {
                    let o = value(&base.answers[j], self.output_var);
                    match s {
                        Some(s) => s.apply(&o),
                        None => o,
                    }
                })
                .collect::<Vec<_>>();
            let truncated = base.truncated && (outputs.is_empty() || !self.first_only());
            out[ci] = Outcome { outputs, truncated };
        }
    }
}
