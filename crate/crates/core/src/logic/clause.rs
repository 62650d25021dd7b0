use std::collections::{HashMap, HashSet};
use std::fmt;

use super::subst::Substitution;
use super::symbol::{well_known, Sym};
use super::term::{Term, Var};

/// A predicate applied to arguments. `=`/2 is the equality built-in.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(pred: impl Into<Sym>, args: Vec<Term>) -> Self {
        Literal {
            pred: pred.into(),
            args,
        }
    }

    pub fn equality(lhs: Term, rhs: Term) -> Self {
        Literal {
            pred: well_known::equals(),
            args: vec![lhs, rhs],
        }
    }

    pub fn is_equality(&self) -> bool {
        self.pred == well_known::equals() && self.args.len() == 2
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (Sym, usize) {
        (self.pred, self.args.len())
    }

    pub fn to_term(&self) -> Term {
        Term::compound(self.pred, self.args.clone())
    }

    pub fn from_term(term: &Term) -> Option<Literal> {
        match term {
            Term::Atom(p) => Some(Literal {
                pred: *p,
                args: Vec::new(),
            }),
            Term::Compound(p, args) => Some(Literal {
                pred: *p,
                args: args.to_vec(),
            }),
            Term::Var(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn apply(&self, s: &Substitution) -> Literal {
        Literal {
            pred: self.pred,
            args: self.args.iter().map(|a| s.apply(a)).collect(),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Literal {
        Literal {
            pred: self.pred,
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for a in &self.args {
            a.collect_vars(&mut seen, &mut out);
        }
        out
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::syntax::write_literal(f, self, &|v: Var| format!("_{}", v.0))
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A definite clause, optionally terminated by a cut.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub ends_in_cut: bool,
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>, ends_in_cut: bool) -> Self {
        Clause {
            head,
            body,
            ends_in_cut,
        }
    }

    pub fn fact(head: Literal) -> Self {
        Clause {
            head,
            body: Vec::new(),
            ends_in_cut: false,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// Distinct variables, head first, in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for lit in std::iter::once(&self.head).chain(&self.body) {
            for a in &lit.args {
                a.collect_vars(&mut seen, &mut out);
            }
        }
        out
    }

    pub fn max_var(&self) -> Option<u32> {
        std::iter::once(&self.head)
            .chain(&self.body)
            .flat_map(|l| l.args.iter())
            .filter_map(Term::max_var)
            .max()
    }

    /// Renumbers variables to `0..n` in order of first occurrence.
    pub fn normalized(&self) -> Clause {
        let map: HashMap<Var, u32> = self
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i as u32))
            .collect();
        self.map_vars(&mut |v| Term::var(map[&v]))
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Clause {
        Clause {
            head: self.head.map_vars(f),
            body: self.body.iter().map(|l| l.map_vars(f)).collect(),
            ends_in_cut: self.ends_in_cut,
        }
    }

    /// Structurally identical clause whose variables are all fresh.
    pub fn rename_apart(&self, fresh: &mut VarGen) -> Clause {
        let mut map: HashMap<Var, Var> = HashMap::new();
        self.map_vars(&mut |v| Term::Var(*map.entry(v).or_insert_with(|| fresh.fresh())))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::syntax::render_clause(self))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Source of fresh variable ids. Never reissues an id.
#[derive(Clone, Debug, Default)]
pub struct VarGen {
    next: u32,
}

impl VarGen {
    pub fn new() -> Self {
        Self::default()
    }

    /// A generator whose ids start above every id in use so far.
    pub fn starting_at(next: u32) -> Self {
        VarGen { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

/// Free function form of [`Clause::rename_apart`].
pub fn rename_apart(clause: &Clause, fresh: &mut VarGen) -> Clause {
    clause.rename_apart(fresh)
}
