use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::symbol::{well_known, Sym};

/// A logic variable. Ids are local to the clause or query that owns them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// A first-order term.
///
/// Lists are sugar over a binary cons functor (`.`) terminated by the `[]`
/// constant; a partial list ends in a variable instead.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Atom(Sym),
    Compound(Sym, Arc<[Term]>),
}

/// Rebuilds `functor(args..)` if `step` changes any argument.
pub(crate) fn rebuild(
    functor: Sym,
    args: &Arc<[Term]>,
    mut step: impl FnMut(&Term) -> Option<Term>,
) -> Option<Term> {
    let mut changed: Option<Vec<Term>> = None;
    for (i, a) in args.iter().enumerate() {
        match (step(a), &mut changed) {
            (Some(t), Some(out)) => out.push(t),
            (Some(t), None) => {
                let mut out = Vec::with_capacity(args.len());
                out.extend(args[..i].iter().cloned());
                out.push(t);
                changed = Some(out);
            }
            (None, Some(out)) => out.push(a.clone()),
            (None, None) => {}
        }
    }
    changed.map(|out| Term::Compound(functor, out.into()))
}

impl Term {
    pub fn var(id: u32) -> Term {
        Term::Var(Var(id))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Sym::new(name))
    }

    /// Builds `functor(args..)`; an empty argument list yields the constant.
    pub fn compound(functor: Sym, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor)
        } else {
            Term::Compound(functor, args.into())
        }
    }

    pub fn nil() -> Term {
        Term::Atom(well_known::nil())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(well_known::cons(), Arc::from(vec![head, tail]))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        Term::partial_list(items, Term::nil())
    }

    pub fn partial_list(items: impl IntoIterator<Item = Term>, tail: Term) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    /// A word as a list of single-character constants: `act` -> `[a,c,t]`.
    pub fn word(text: &str) -> Term {
        let mut buf = [0u8; 4];
        Term::list(text.chars().map(|c| Term::atom(c.encode_utf8(&mut buf))))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(s) if *s == well_known::nil())
    }

    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(f, args) if *f == well_known::cons() && args.len() == 2 => {
                Some((&args[0], &args[1]))
            }
            _ => None,
        }
    }

    /// Splits a cons chain into its elements and the final tail.
    /// Returns `None` when the term is not a cons cell or `[]`.
    pub fn list_parts(&self) -> Option<(Vec<&Term>, &Term)> {
        if self.is_nil() {
            return Some((Vec::new(), self));
        }
        self.as_cons()?;
        let mut items = Vec::new();
        let mut cur = self;
        while let Some((head, tail)) = cur.as_cons() {
            items.push(head);
            cur = tail;
        }
        Some((items, cur))
    }

    /// Reads back a proper list of single-character constants as a string.
    pub fn as_word(&self) -> Option<String> {
        let (items, tail) = self.list_parts()?;
        if !tail.is_nil() {
            return None;
        }
        items
            .into_iter()
            .map(|t| match t {
                Term::Atom(s) => Some(s.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Distinct variables in left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    pub(crate) fn collect_vars(&self, seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if seen.insert(*v) {
                    out.push(*v);
                }
            }
            Term::Atom(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(seen, out)),
        }
    }

    pub fn occurs(&self, var: Var) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::Atom(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.0),
            Term::Atom(_) => None,
            Term::Compound(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// Rebuilds the term with every variable passed through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        self.map_vars_changed(f).unwrap_or_else(|| self.clone())
    }

    /// `None` when the term has no variables, so ground subterms are
    /// shared rather than copied.
    fn map_vars_changed(&self, f: &mut impl FnMut(Var) -> Term) -> Option<Term> {
        match self {
            Term::Var(v) => Some(f(*v)),
            Term::Atom(_) => None,
            Term::Compound(functor, args) => rebuild(*functor, args, |a| a.map_vars_changed(f)),
        }
    }

    pub fn offset_vars(&self, by: u32) -> Term {
        if by == 0 {
            return self.clone();
        }
        self.map_vars(&mut |v| Term::var(v.0 + by))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Atom(_) => 0,
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

/// Fraction of an answer argument that is still unconstrained.
///
/// A list or partial list is scored over its positions: one per element
/// plus one for a non-`[]` tail. An element or tail contributes its own
/// fraction, so a variable scores 1 and a ground item 0; a list whose
/// positions are all variables also scores 1. Other compounds score
/// variable leaves over all leaves, counting the functor as a ground leaf.
pub fn variable_fraction(term: &Term) -> f64 {
    if term.is_ground() {
        return 0.0;
    }
    if term.is_var() {
        return 1.0;
    }
    if let Some((items, tail)) = term.list_parts() {
        let mut positions = items.len();
        let mut score: f64 = items.iter().map(|t| variable_fraction(t)).sum();
        if !tail.is_nil() {
            positions += 1;
            score += variable_fraction(tail);
        }
        return score / positions as f64;
    }
    let (vars, leaves) = leaf_counts(term);
    vars as f64 / leaves as f64
}

fn leaf_counts(term: &Term) -> (usize, usize) {
    match term {
        Term::Var(_) => (1, 1),
        Term::Atom(_) => (0, 1),
        Term::Compound(_, args) => args.iter().fold((0, 1), |(v, l), a| {
            let (av, al) = leaf_counts(a);
            (v + av, l + al)
        }),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::syntax::write_term(f, self, &|v: Var| format!("_{}", v.0))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
