//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use foidl_core::logic::syntax::render_term;
use foidl_core::{Substitution, Sym, Term, Var};
use rand::seq::SliceRandom;
use rand::Rng;

pub const CONSTANTS: [&str; 3] = ["a", "b", "c"];

/// A random term of depth at most `depth` over `a,b,c`, `g/1`, `f/2` and
/// variables `0..n_vars`.
pub fn random_term(rng: &mut impl Rng, depth: usize, n_vars: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        if n_vars > 0 && rng.gen_bool(0.4) {
            Term::var(rng.gen_range(0..n_vars))
        } else {
            Term::atom(CONSTANTS.choose(rng).expect("constants"))
        }
    } else if rng.gen_bool(0.3) {
        Term::compound(Sym::new("g"), vec![random_term(rng, depth - 1, n_vars)])
    } else {
        Term::compound(
            Sym::new("f"),
            vec![
                random_term(rng, depth - 1, n_vars),
                random_term(rng, depth - 1, n_vars),
            ],
        )
    }
}

/// `t` with random subterms replaced by variables or fresh random terms,
/// so that the pair is often (but not always) unifiable.
pub fn perturb(rng: &mut impl Rng, t: &Term, depth: usize, n_vars: u32) -> Term {
    if rng.gen_bool(0.2) {
        return random_term(rng, depth, n_vars);
    }
    match t {
        Term::Compound(f, args) => {
            let args = args
                .iter()
                .map(|a| perturb(rng, a, depth.saturating_sub(1), n_vars))
                .collect();
            Term::compound(*f, args)
        }
        other => other.clone(),
    }
}

pub fn subterms(t: &Term, out: &mut Vec<Term>) {
    if !out.contains(t) {
        out.push(t.clone());
    }
    if let Term::Compound(_, args) = t {
        for a in args.iter() {
            subterms(a, out);
        }
    }
}

/// Follows `bindings` to a fixpoint; `None` if they are cyclic.
fn resolve(t: &Term, bindings: &HashMap<Var, Term>, depth: usize) -> Option<Term> {
    if depth > 64 {
        return None;
    }
    match t {
        Term::Var(v) => match bindings.get(v) {
            Some(b) => resolve(b, bindings, depth + 1),
            None => Some(t.clone()),
        },
        Term::Atom(_) => Some(t.clone()),
        Term::Compound(f, args) => {
            let args: Option<Vec<Term>> = args
                .iter()
                .map(|a| resolve(a, bindings, depth + 1))
                .collect();
            Some(Term::compound(*f, args?))
        }
    }
}

/// Every unifier of `s` and `t` that binds each variable to one of their
/// subterms (or leaves it free), fully resolved. Unifiable pairs always
/// have a most general unifier of this shape, so an empty result means
/// the pair does not unify.
pub fn brute_force_unifiers(s: &Term, t: &Term) -> Vec<HashMap<Var, Term>> {
    let mut vars = s.vars();
    for v in t.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut pool = Vec::new();
    subterms(s, &mut pool);
    subterms(t, &mut pool);
    let mut found = Vec::new();
    let mut choice = vec![0usize; vars.len()];
    loop {
        let bindings: HashMap<Var, Term> = vars
            .iter()
            .zip(&choice)
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (*v, pool[c - 1].clone()))
            .filter(|(v, b)| b != &Term::Var(*v))
            .collect();
        if let (Some(rs), Some(rt)) = (resolve(s, &bindings, 0), resolve(t, &bindings, 0)) {
            if rs == rt {
                let resolved = vars
                    .iter()
                    .filter_map(|v| Some((*v, resolve(&Term::Var(*v), &bindings, 0)?)))
                    .collect();
                found.push(resolved);
            }
        }
        // Next combination, odometer style.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return found;
            }
            choice[i] += 1;
            if choice[i] <= pool.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Applies a resolved binding map.
pub fn instantiate(t: &Term, map: &HashMap<Var, Term>) -> Term {
    t.map_vars(&mut |v| map.get(&v).cloned().unwrap_or(Term::Var(v)))
}

/// True when `theta` is an instance of `sigma` on `vars`: applying
/// `sigma` first changes nothing.
pub fn more_general(sigma: &Substitution, theta: &HashMap<Var, Term>, vars: &[Var]) -> bool {
    vars.iter().all(|v| {
        let via = instantiate(&sigma.apply(&Term::Var(*v)), theta);
        via == instantiate(&Term::Var(*v), theta)
    })
}

/// Every split of `items` into a non-empty prefix and non-empty suffix,
/// shortest prefix first.
pub fn split_oracle<T: Clone>(items: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    (1..items.len())
        .map(|i| (items[..i].to_vec(), items[i..].to_vec()))
        .collect()
}

// ---------------------------------------------------------------------------
// Small programs with clause-terminal cut

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arg {
    Const(char),
    Var(u8),
}

#[derive(Clone, Debug)]
pub struct MiniClause {
    pub pred: &'static str,
    pub head: [Arg; 2],
    pub body: Vec<(&'static str, [Arg; 2])>,
    pub cut: bool,
}

fn render_arg(a: Arg) -> String {
    match a {
        Arg::Const(c) => c.to_string(),
        Arg::Var(v) => ["A", "B", "C", "D"][v as usize].to_string(),
    }
}

fn render_atom(pred: &str, args: [Arg; 2]) -> String {
    format!("{pred}({},{})", render_arg(args[0]), render_arg(args[1]))
}

impl MiniClause {
    pub fn render(&self) -> String {
        let mut goals: Vec<String> = self.body.iter().map(|(p, a)| render_atom(p, *a)).collect();
        if self.cut {
            goals.push("!".into());
        }
        if goals.is_empty() {
            format!("{}.", render_atom(self.pred, self.head))
        } else {
            format!(
                "{} :- {}.",
                render_atom(self.pred, self.head),
                goals.join(", ")
            )
        }
    }
}

/// A random three-level program: ground `e/2` facts, `r/2` clauses over
/// `e`, and `p/2` clauses over `r` and `e`. Every head variable occurs in
/// the body, so all answers are ground.
pub fn random_cut_program(rng: &mut impl Rng) -> Vec<MiniClause> {
    let consts = ['a', 'b', 'c'];
    let c = |rng: &mut dyn rand::RngCore| Arg::Const(*consts.choose(rng).expect("constants"));
    let (a, b, v) = (Arg::Var(0), Arg::Var(1), Arg::Var(2));
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(2..=6) {
        clauses.push(MiniClause {
            pred: "e",
            head: [c(rng), c(rng)],
            body: vec![],
            cut: false,
        });
    }
    for _ in 0..rng.gen_range(1..=3) {
        let cut = rng.gen_bool(0.5);
        let clause = match rng.gen_range(0..5) {
            0 => MiniClause {
                pred: "r",
                head: [c(rng), c(rng)],
                body: vec![],
                cut,
            },
            1 => MiniClause {
                pred: "r",
                head: [a, b],
                body: vec![("e", [a, b])],
                cut,
            },
            2 => MiniClause {
                pred: "r",
                head: [a, b],
                body: vec![("e", [b, a])],
                cut,
            },
            3 => MiniClause {
                pred: "r",
                head: [a, c(rng)],
                body: vec![("e", [a, v])],
                cut,
            },
            _ => MiniClause {
                pred: "r",
                head: [c(rng), b],
                body: vec![("e", [b, c(rng)])],
                cut,
            },
        };
        clauses.push(clause);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let cut = rng.gen_bool(0.5);
        let clause = match rng.gen_range(0..4) {
            0 => MiniClause {
                pred: "p",
                head: [a, b],
                body: vec![("r", [a, v]), ("r", [v, b])],
                cut,
            },
            1 => MiniClause {
                pred: "p",
                head: [a, b],
                body: vec![("r", [a, b])],
                cut,
            },
            2 => MiniClause {
                pred: "p",
                head: [a, b],
                body: vec![("e", [a, v]), ("r", [v, b])],
                cut,
            },
            _ => MiniClause {
                pred: "p",
                head: [c(rng), b],
                body: vec![("r", [c(rng), b])],
                cut,
            },
        };
        clauses.push(clause);
    }
    clauses
}

/// All answers to `pred(pattern)` in order, evaluating clauses one after
/// another and stopping at the first body solution of a clause with cut.
pub fn naive_answers(
    program: &[MiniClause],
    pred: &str,
    pattern: [Option<char>; 2],
) -> Vec<[char; 2]> {
    let mut out = Vec::new();
    for clause in program.iter().filter(|c| c.pred == pred) {
        let mut env: HashMap<u8, char> = HashMap::new();
        let mut ok = true;
        for (h, p) in clause.head.iter().zip(pattern) {
            match (h, p) {
                (Arg::Const(c), Some(q)) => ok &= *c == q,
                (Arg::Var(v), Some(q)) => match env.get(v) {
                    Some(bound) => ok &= *bound == q,
                    None => {
                        env.insert(*v, q);
                    }
                },
                _ => {}
            }
        }
        if !ok {
            continue;
        }
        let mut envs = vec![env];
        for (p, args) in &clause.body {
            let mut next = Vec::new();
            for env in envs {
                let pat = args.map(|a| match a {
                    Arg::Const(c) => Some(c),
                    Arg::Var(v) => env.get(&v).copied(),
                });
                for ans in naive_answers(program, p, pat) {
                    let mut e = env.clone();
                    let mut fits = true;
                    for (a, val) in args.iter().zip(ans) {
                        if let Arg::Var(v) = a {
                            match e.get(v) {
                                Some(bound) => fits &= *bound == val,
                                None => {
                                    e.insert(*v, val);
                                }
                            }
                        }
                    }
                    if fits {
                        next.push(e);
                    }
                }
            }
            envs = next;
        }
        let results: Vec<[char; 2]> = envs
            .iter()
            .map(|env| {
                clause.head.map(|h| match h {
                    Arg::Const(c) => c,
                    Arg::Var(v) => env[&v],
                })
            })
            .collect();
        if clause.cut && !results.is_empty() {
            out.push(results[0]);
            return out;
        }
        out.extend(results);
    }
    out
}

/// A ground two-argument answer as characters.
pub fn ground_pair(args: &[Term]) -> Option<[char; 2]> {
    let one = |t: &Term| {
        let s = render_term(t);
        let mut cs = s.chars();
        match (cs.next(), cs.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    };
    Some([one(&args[0])?, one(&args[1])?])
}
