//! The clause under construction and the literals that may extend it.

use std::collections::HashSet;

use crate::background::{Mode, PredicateSignature, TheoryConstantTable};
use crate::logic::{Clause, Literal, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    BackgroundCall,
    ConstantEquality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateLiteral {
    pub literal: Literal,
    pub kind: CandidateKind,
    /// Variables that first appear in this literal.
    pub new_vars: Vec<(Var, String)>,
}

impl CandidateLiteral {
    pub fn introduces_new_variables(&self) -> bool {
        !self.new_vars.is_empty()
    }
}

/// A clause being specialized: the target head over variables `0..arity`
/// plus body literals, with the type of every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseDraft {
    pub head: Literal,
    pub body: Vec<Literal>,
    var_types: Vec<String>,
    /// Whether each body literal was added without gain.
    weak: Vec<bool>,
}

impl ClauseDraft {
    pub fn new(target: &PredicateSignature) -> Self {
        let args = (0..target.arity() as u32).map(Term::var).collect();
        ClauseDraft {
            head: Literal::new(target.name, args),
            body: Vec::new(),
            var_types: target.arg_types.clone(),
            weak: Vec::new(),
        }
    }

    pub fn var_count(&self) -> u32 {
        self.var_types.len() as u32
    }

    pub fn var_type(&self, v: Var) -> Option<&str> {
        self.var_types.get(v.0 as usize).map(String::as_str)
    }

    pub fn push(&mut self, cand: &CandidateLiteral, weak: bool) {
        for (v, ty) in &cand.new_vars {
            debug_assert_eq!(v.0 as usize, self.var_types.len());
            self.var_types.push(ty.clone());
        }
        self.body.push(cand.literal.clone());
        self.weak.push(weak);
    }

    /// Drops trailing literals that were added without gain.
    pub fn strip_trailing_weak(&mut self) {
        while self.weak.last() == Some(&true) {
            self.weak.pop();
            self.body.pop();
        }
        let used = self
            .to_clause(false)
            .max_var()
            .map_or(0, |m| m + 1)
            .max(self.head.args.len() as u32);
        self.var_types.truncate(used as usize);
    }

    pub fn weak_flags(&self) -> &[bool] {
        &self.weak
    }

    pub fn to_clause(&self, ends_in_cut: bool) -> Clause {
        Clause::new(self.head.clone(), self.body.clone(), ends_in_cut)
    }

    /// Variables bound to a constant by an equality already in the body.
    fn equated(&self) -> HashSet<Var> {
        self.body
            .iter()
            .filter(|l| l.is_equality() && l.args[1].is_ground())
            .filter_map(|l| match &l.args[0] {
                Term::Var(v) => Some(*v),
                _ => None,
            })
            .collect()
    }
}

/// Every literal that may be appended to `draft`, background calls first
/// (in signature order) and then constant equalities.
///
/// Input positions take an existing variable of the declared type; output
/// positions take a fresh variable or any existing variable. Equalities
/// `V = c` range over the theory constants of `V`'s type.
pub fn generate_candidates(
    draft: &ClauseDraft,
    signatures: &[PredicateSignature],
    constants: &TheoryConstantTable,
) -> Vec<CandidateLiteral> {
    let existing: Vec<Var> = (0..draft.var_count()).map(Var).collect();
    let present: HashSet<&Literal> = draft.body.iter().collect();
    let mut out = Vec::new();
    for sig in signatures {
        let input_choices: Vec<Vec<Var>> = sig
            .arg_types
            .iter()
            .zip(&sig.arg_modes)
            .filter(|(_, m)| **m == Mode::Input)
            .map(|(ty, _)| {
                existing
                    .iter()
                    .copied()
                    .filter(|v| draft.var_type(*v) == Some(ty.as_str()))
                    .collect()
            })
            .collect();
        let n_out = sig.arg_modes.iter().filter(|m| **m == Mode::Output).count();
        // Output slot choice: None = fresh, Some(v) = reuse.
        let output_choices: Vec<Option<Var>> = std::iter::once(None)
            .chain(existing.iter().copied().map(Some))
            .collect();
        for inputs in cartesian(&input_choices) {
            for outputs in cartesian(&vec![output_choices.clone(); n_out]) {
                let mut next = draft.var_count();
                let mut new_vars = Vec::new();
                let (mut ins, mut outs) = (inputs.iter(), outputs.iter());
                let args = sig
                    .arg_modes
                    .iter()
                    .zip(&sig.arg_types)
                    .map(|(mode, ty)| match mode {
                        Mode::Input => Term::Var(*ins.next().expect("one choice per input")),
                        Mode::Output => match outs.next().expect("one choice per output") {
                            Some(v) => Term::Var(*v),
                            None => {
                                let v = Var(next);
                                next += 1;
                                new_vars.push((v, ty.clone()));
                                Term::Var(v)
                            }
                        },
                    })
                    .collect();
                let literal = Literal::new(sig.name, args);
                if !present.contains(&literal) {
                    out.push(CandidateLiteral {
                        literal,
                        kind: CandidateKind::BackgroundCall,
                        new_vars,
                    });
                }
            }
        }
    }
    let equated = draft.equated();
    for v in existing {
        if equated.contains(&v) {
            continue;
        }
        let Some(ty) = draft.var_type(v) else {
            continue;
        };
        for c in constants.get(ty) {
            out.push(CandidateLiteral {
                literal: Literal::equality(Term::Var(v), c.clone()),
                kind: CandidateKind::ConstantEquality,
                new_vars: Vec::new(),
            });
        }
    }
    out
}

fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, options| {
        acc.into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect()
    })
}
