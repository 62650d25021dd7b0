//! Growing one clause literal by literal until it makes no more errors
//! on the output queries it is responsible for.

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::background::{BackgroundKB, PredicateSignature, TheoryConstantTable};
use crate::dataset::Example;
use crate::logic::{unifiable, Clause, Term};

use super::candidates::{generate_candidates, CandidateKind, CandidateLiteral, ClauseDraft};
use super::evaluator::{BaseAnswers, Evaluator, ExhaustedGoals, Outcome};
use super::params::{LearnMode, LearnerParams};
use super::scoring::{gain, mass_from, StateScore};

/// The training examples as seen by one specialization run.
pub struct Problem<'a> {
    /// Distinct training examples.
    pub examples: &'a [Example],
    /// For each example, the distinct outputs of examples with the same input.
    pub same_input_outputs: &'a [Vec<Term>],
    pub to_cover: &'a [bool],
    /// Answered correctly by the clauses learned so far.
    pub previously_correct: &'a [bool],
    /// Memorized; their queries are no longer considered.
    pub memorized: &'a [bool],
    pub kb: &'a BackgroundKB,
    pub target: &'a PredicateSignature,
    pub constants: &'a TheoryConstantTable,
    pub params: &'a LearnerParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryStatus {
    /// The answer is non-ground but unifies with the correct output.
    NongroundUnifiable,
    /// The answer is wrong for an example the learned clauses got right.
    ViolatesPrevious,
    /// Some answer is not the correct output (all-answers mode).
    Incorrect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiveQuery {
    pub example: usize,
    pub status: QueryStatus,
    pub outputs: Vec<Term>,
    pub mass: f64,
}

/// Positives still covered by the clause and queries that still show
/// negative coverage.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingState {
    pub retained: Vec<usize>,
    pub live: Vec<LiveQuery>,
}

impl TrainingState {
    pub fn score(&self) -> StateScore {
        StateScore {
            positives: self.retained.len(),
            neg_mass: self.live.iter().map(|q| q.mass).sum(),
        }
    }
}

/// Effect of one candidate literal on the training state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateScore {
    pub retained: usize,
    pub neg_mass: f64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecializedClause {
    pub clause: Clause,
    /// Examples to cover whose output the clause gets exactly right.
    pub covered: Vec<usize>,
    /// Previously correct examples the clause now answers wrongly.
    pub broken: Vec<usize>,
    pub steps: usize,
    pub weak_literals: usize,
    /// Query evaluations cut short by the solve budget.
    pub truncated: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecializeOutcome {
    /// No live queries remain.
    Complete(SpecializedClause),
    /// No literal helps any further.
    Stuck(SpecializedClause),
}

impl SpecializeOutcome {
    pub fn result(&self) -> &SpecializedClause {
        match self {
            SpecializeOutcome::Complete(c) | SpecializeOutcome::Stuck(c) => c,
        }
    }

    pub fn is_stuck(&self) -> bool {
        matches!(self, SpecializeOutcome::Stuck(_))
    }
}

#[derive(Clone, Copy)]
struct Role {
    in_p: bool,
    in_q: bool,
}

fn ground_correct(o: &Term, correct: &Term) -> bool {
    o.is_ground() && o == correct
}

fn answer_mass(o: &Term, outputs: &[Term], u: u64) -> f64 {
    let p = outputs.iter().filter(|t| unifiable(o, t)).count();
    mass_from(o, u, p)
}

/// What an outcome does to one example's membership in the state.
fn classify(
    problem: &Problem,
    mode: LearnMode,
    i: usize,
    role: Role,
    outcome: &Outcome,
) -> (bool, Option<LiveQuery>) {
    let correct = &problem.examples[i].output;
    let u = problem.params.u;
    match mode {
        LearnMode::DecisionList => {
            let Some(o) = outcome.outputs.first() else {
                return (false, None);
            };
            let unifies = unifiable(o, correct);
            let retained = role.in_p && unifies;
            let live = if !role.in_q || ground_correct(o, correct) {
                None
            } else if unifies {
                Some(QueryStatus::NongroundUnifiable)
            } else if problem.previously_correct[i] {
                Some(QueryStatus::ViolatesPrevious)
            } else {
                None
            };
            let live = live.map(|status| LiveQuery {
                example: i,
                status,
                outputs: vec![o.clone()],
                mass: answer_mass(o, &problem.same_input_outputs[i], u),
            });
            (retained, live)
        }
        LearnMode::Unordered => {
            let retained = role.in_p && outcome.outputs.iter().any(|o| unifiable(o, correct));
            let wrong = outcome.outputs.iter().any(|o| !ground_correct(o, correct));
            let live = (role.in_q && wrong).then(|| {
                // Repeated answers cover no further negatives.
                let mut seen = FxHashSet::default();
                let outputs: Vec<Term> = outcome
                    .outputs
                    .iter()
                    .filter(|o| seen.insert(*o))
                    .cloned()
                    .collect();
                let mass = outputs
                    .iter()
                    .map(|o| answer_mass(o, &problem.same_input_outputs[i], u))
                    .sum();
                LiveQuery {
                    example: i,
                    status: QueryStatus::Incorrect,
                    outputs,
                    mass,
                }
            });
            (retained, live)
        }
    }
}

/// Per candidate: whether the example stays a positive, its negative mass,
/// and whether evaluation was cut short.
type Tally = (bool, f64, bool);

fn tally(
    problem: &Problem,
    mode: LearnMode,
    i: usize,
    role: Role,
    outcomes: &[Outcome],
) -> Vec<Tally> {
    outcomes
        .iter()
        .map(|outcome| {
            let (r, live) = classify(problem, mode, i, role, outcome);
            (r, live.map_or(0.0, |q| q.mass), outcome.truncated)
        })
        .collect()
}

fn score_candidates(
    per_example: &[Vec<Tally>],
    n_cands: usize,
    before: StateScore,
) -> (Vec<CandidateScore>, usize) {
    let mut retained = vec![0usize; n_cands];
    let mut mass = vec![0f64; n_cands];
    let mut truncated = 0;
    for tallies in per_example {
        for (c, &(r, m, t)) in tallies.iter().enumerate() {
            truncated += t as usize;
            retained[c] += r as usize;
            mass[c] += m;
        }
    }
    let scores = retained
        .into_iter()
        .zip(mass)
        .map(|(r, m)| CandidateScore {
            retained: r,
            neg_mass: m,
            gain: gain(
                before,
                StateScore {
                    positives: r,
                    neg_mass: m,
                },
            ),
        })
        .collect();
    (scores, truncated)
}

/// Queries evaluated together between updates of the excluded set; fixed
/// so results do not depend on the number of threads.
const QUERY_CHUNK: usize = 8;

/// Tallies for every candidate over the active queries. A candidate whose
/// evaluation runs out of budget on any query is excluded: it is not
/// evaluated on later queries and keeps no positives.
fn candidate_tallies(
    problem: &Problem,
    mode: LearnMode,
    eval: &Evaluator,
    active: &[(usize, Role)],
    bases: &[BaseAnswers],
    cands: &[CandidateLiteral],
) -> Vec<Vec<Tally>> {
    let mut excluded = vec![false; cands.len()];
    let mut per_example: Vec<Vec<Tally>> = Vec::with_capacity(active.len());
    // The first query alone, so that candidates with unbounded search are
    // only paid for once.
    let mut start = 0;
    while start < active.len() {
        let end = if start == 0 {
            1
        } else {
            (start + QUERY_CHUNK).min(active.len())
        };
        let chunk: Vec<Vec<Tally>> = (start..end)
            .into_par_iter()
            .map(|k| {
                let (i, role) = active[k];
                tally(
                    problem,
                    mode,
                    i,
                    role,
                    &eval.candidate_outcomes_except(&bases[k], cands, &excluded),
                )
            })
            .collect();
        for tallies in &chunk {
            for (c, t) in tallies.iter().enumerate() {
                excluded[c] |= t.2;
            }
        }
        per_example.extend(chunk);
        start = end;
    }
    for tallies in &mut per_example {
        for (c, t) in tallies.iter_mut().enumerate() {
            if excluded[c] {
                *t = (false, 0.0, t.2);
            }
        }
    }
    per_example
}

const GAIN_EPS: f64 = 1e-9;

/// The gainful candidate to add, if any: highest gain among those keeping
/// at least `min_clause_coverage` positives; ties go to fewer new
/// variables, then equalities, then generation order.
pub fn select_literal(
    candidates: &[CandidateLiteral],
    scores: &[CandidateScore],
    params: &LearnerParams,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (cand, s)) in candidates.iter().zip(scores).enumerate() {
        if s.retained < params.min_clause_coverage || s.gain <= GAIN_EPS {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (bc, bs) = (&candidates[b], &scores[b]);
                if s.gain > bs.gain + GAIN_EPS * bs.gain.abs().max(1.0) {
                    true
                } else if s.gain + GAIN_EPS * bs.gain.abs().max(1.0) < bs.gain {
                    false
                } else if cand.new_vars.len() != bc.new_vars.len() {
                    cand.new_vars.len() < bc.new_vars.len()
                } else {
                    cand.kind == CandidateKind::ConstantEquality
                        && bc.kind == CandidateKind::BackgroundCall
                }
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Fallback when nothing has gain: the new-variable candidate keeping the
/// most positives (earliest on ties), unless `weak_literal_limit`
/// gainless literals were just added.
pub fn weak_literal_step(
    candidates: &[CandidateLiteral],
    scores: &[CandidateScore],
    consecutive_weak: usize,
    params: &LearnerParams,
) -> Option<usize> {
    if consecutive_weak >= params.weak_literal_limit {
        return None;
    }
    let mut best: Option<usize> = None;
    for (i, (cand, s)) in candidates.iter().zip(scores).enumerate() {
        if !cand.introduces_new_variables() || s.retained < params.min_clause_coverage {
            continue;
        }
        if best.is_none_or(|b| s.retained > scores[b].retained) {
            best = Some(i);
        }
    }
    best
}

/// Specializes one clause for the current examples to cover.
pub fn specialize_clause(problem: &Problem, mode: LearnMode) -> SpecializeOutcome {
    specialize_clause_with(problem, mode, &ExhaustedGoals::new())
}

/// As [`specialize_clause`], sharing a table of budget-tripping goals with
/// earlier runs in the same mode and over the same background.
pub fn specialize_clause_with(
    problem: &Problem,
    mode: LearnMode,
    exhausted: &ExhaustedGoals,
) -> SpecializeOutcome {
    let params = problem.params;
    let eval = Evaluator::new(problem.kb.program(), problem.target, params.budget, mode)
        .with_exhausted_goals(exhausted);
    let mut draft = ClauseDraft::new(problem.target);
    let mut active: Vec<(usize, Role)> = (0..problem.examples.len())
        .filter(|&i| !problem.memorized[i])
        .map(|i| {
            (
                i,
                Role {
                    in_p: problem.to_cover[i],
                    in_q: true,
                },
            )
        })
        .collect();
    let mut consecutive_weak = 0;
    let mut weak_literals = 0;
    let mut steps = 0;
    let mut truncated = 0;
    let stuck = loop {
        steps += 1;
        let nvars = draft.var_count();
        let bases: Vec<BaseAnswers> = active
            .par_iter()
            .map(|(i, _)| eval.base(&problem.examples[*i].input, &draft.body, nvars, false))
            .collect();
        // Current state under the clause as it stands.
        let mut state = TrainingState::default();
        let mut next_active = Vec::new();
        let mut next_bases = Vec::new();
        for ((i, role), base) in active.iter().zip(bases) {
            let outcome = eval.clause_outcome(&base);
            truncated += outcome.truncated as usize;
            let (retained, live) = classify(problem, mode, *i, *role, &outcome);
            if retained {
                state.retained.push(*i);
            }
            let in_q = live.is_some();
            if let Some(q) = live {
                state.live.push(q);
            }
            if retained || in_q {
                next_active.push((
                    *i,
                    Role {
                        in_p: retained,
                        in_q,
                    },
                ));
                next_bases.push(base);
            }
        }
        active = next_active;
        if state.live.is_empty() {
            break false;
        }
        if draft.body.len() >= params.max_body_literals {
            break true;
        }
        let before = state.score();
        let cands = generate_candidates(&draft, problem.kb.signatures(), problem.constants);
        let per_example = candidate_tallies(problem, mode, &eval, &active, &next_bases, &cands);
        let (scores, t) = score_candidates(&per_example, cands.len(), before);
        truncated += t;
        if let Some(best) = select_literal(&cands, &scores, params) {
            log::trace!(
                "add {} (gain {:.3})",
                cands[best].literal,
                scores[best].gain
            );
            draft.push(&cands[best], false);
            consecutive_weak = 0;
        } else if let Some(weak) = weak_literal_step(&cands, &scores, consecutive_weak, params) {
            log::trace!("add weak {}", cands[weak].literal);
            draft.push(&cands[weak], true);
            consecutive_weak += 1;
            weak_literals += 1;
        } else {
            break true;
        }
    };
    if stuck {
        draft.strip_trailing_weak();
    }
    let (covered, broken) = final_coverage(problem, mode, &eval, &draft);
    let result = SpecializedClause {
        clause: draft.to_clause(mode == LearnMode::DecisionList),
        covered,
        broken,
        steps,
        weak_literals,
        truncated,
    };
    if stuck {
        SpecializeOutcome::Stuck(result)
    } else {
        SpecializeOutcome::Complete(result)
    }
}

/// Covered and broken examples of the finished clause, over all examples.
fn final_coverage(
    problem: &Problem,
    mode: LearnMode,
    eval: &Evaluator,
    draft: &ClauseDraft,
) -> (Vec<usize>, Vec<usize>) {
    let relevant: Vec<usize> = (0..problem.examples.len())
        .filter(|&i| {
            !problem.memorized[i] && (problem.to_cover[i] || problem.previously_correct[i])
        })
        .collect();
    let first_only = mode == LearnMode::DecisionList;
    let outcomes: Vec<Outcome> = relevant
        .par_iter()
        .map(|&i| {
            let base = eval.base(
                &problem.examples[i].input,
                &draft.body,
                draft.var_count(),
                first_only,
            );
            eval.clause_outcome(&base)
        })
        .collect();
    let mut covered = Vec::new();
    let mut broken = Vec::new();
    for (&i, outcome) in relevant.iter().zip(&outcomes) {
        let correct = &problem.examples[i].output;
        let all_correct = outcome.outputs.iter().all(|o| ground_correct(o, correct));
        if outcome.outputs.is_empty() {
            continue;
        }
        if problem.to_cover[i] && all_correct {
            covered.push(i);
        } else if problem.previously_correct[i] && !all_correct {
            broken.push(i);
        }
    }
    (covered, broken)
}

pub fn specialize_clause_dl(problem: &Problem) -> SpecializeOutcome {
    specialize_clause(problem, LearnMode::DecisionList)
}

pub fn specialize_clause_unordered(problem: &Problem) -> SpecializeOutcome {
    specialize_clause(problem, LearnMode::Unordered)
}
