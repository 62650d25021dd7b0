use std::collections::HashMap;

use super::term::{Term, Var};

/// A set of variable bindings.
///
/// Bindings are stored triangularly (a bound term may mention other bound
/// variables); [`Substitution::apply`] dereferences fully, so applying a
/// substitution is idempotent. Unification keeps the store acyclic via the
/// occurs check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: HashMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: Var) -> Option<&Term> {
        self.bindings.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    /// Adds a binding without checks. Returns `None` if the binding would
    /// be cyclic or `var` is already bound.
    pub fn bind(mut self, var: Var, term: Term) -> Option<Self> {
        if self.bindings.contains_key(&var) || self.occurs(var, &term) {
            return None;
        }
        self.bindings.insert(var, term);
        Some(self)
    }

    fn walk<'a>(&'a self, mut term: &'a Term) -> &'a Term {
        while let Term::Var(v) = term {
            match self.bindings.get(v) {
                Some(next) => term = next,
                None => break,
            }
        }
        term
    }

    fn occurs(&self, var: Var, term: &Term) -> bool {
        match self.walk(term) {
            Term::Var(v) => *v == var,
            Term::Atom(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(var, a)),
        }
    }

    pub fn apply(&self, term: &Term) -> Term {
        if self.bindings.is_empty() {
            return term.clone();
        }
        match self.walk(term) {
            t @ (Term::Var(_) | Term::Atom(_)) => t.clone(),
            t @ Term::Compound(f, args) => {
                if t.is_ground() {
                    t.clone()
                } else {
                    Term::Compound(*f, args.iter().map(|a| self.apply(a)).collect())
                }
            }
        }
    }

    /// Most general unifier of `a` and `b` extending `self`, with occurs check.
    pub fn unify(&self, a: &Term, b: &Term) -> Option<Substitution> {
        let mut out = self.clone();
        if out.unify_in_place(a, b) {
            Some(out)
        } else {
            None
        }
    }

    fn unify_in_place(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.walk(&x).clone();
            let y = self.walk(&y).clone();
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) if v == w => {}
                (Term::Var(v), other) | (other, Term::Var(v)) => {
                    if self.occurs(*v, other) {
                        return false;
                    }
                    self.bindings.insert(*v, other.clone());
                }
                (Term::Atom(p), Term::Atom(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
                }
                _ => return false,
            }
        }
        true
    }
}

/// Most general unifier of `a` and `b` extending `s`, or `None`.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    s.unify(a, b)
}

pub fn apply(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}

/// True when the two terms have a common instance.
pub fn unifiable(a: &Term, b: &Term) -> bool {
    if a.is_ground() && b.is_ground() {
        return a == b;
    }
    Substitution::new().unify(a, b).is_some()
}
