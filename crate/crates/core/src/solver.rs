//! Depth-first interpreter for ordered definite-clause programs.
//!
//! Goals are selected leftmost-first and clauses tried in program order. A
//! clause may end in a cut: once its body succeeds, the remaining
//! alternatives of the call it resolved are discarded. `=`/2 is built in.
//! Every search is bounded by a [`SolveBudget`]; a tripped budget is
//! reported through [`Solution::complete`], never hidden.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::rc::Rc;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::background::PredicateSignature;
use crate::dataset::Example;
use crate::logic::syntax::{self, Item, SyntaxError};
use crate::logic::{rebuild, well_known, Clause, Literal, Sym, Term, Var};

#[derive(Debug, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: directives are not allowed in a program file")]
    Directive { line: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Limits on a single search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveBudget {
    pub max_answers: usize,
    pub max_steps: u64,
    pub max_depth: usize,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_answers: 1000,
            max_steps: 100_000,
            max_depth: 500,
        }
    }
}

impl SolveBudget {
    pub fn new(max_answers: usize, max_steps: u64, max_depth: usize) -> Option<Self> {
        (max_answers > 0 && max_steps > 0 && max_depth > 0).then_some(SolveBudget {
            max_answers,
            max_steps,
            max_depth,
        })
    }

    pub fn with_max_answers(self, max_answers: usize) -> Self {
        SolveBudget {
            max_answers: max_answers.max(1),
            ..self
        }
    }
}

#[derive(Clone, Debug)]
struct Compiled {
    head: Term,
    body: Vec<Term>,
    ends_in_cut: bool,
    nvars: u32,
}

/// An ordered clause list indexed by predicate. Immutable once built.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    compiled: Vec<Compiled>,
    index: HashMap<(Sym, usize), Arc<[usize]>>,
}

impl Program {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let clauses: Vec<Clause> = clauses.into_iter().map(|c| c.normalized()).collect();
        let mut index: HashMap<(Sym, usize), Vec<usize>> = HashMap::new();
        let compiled = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                index.entry(c.head.key()).or_default().push(i);
                Compiled {
                    head: c.head.to_term(),
                    body: c.body.iter().map(Literal::to_term).collect(),
                    ends_in_cut: c.ends_in_cut,
                    nvars: c.vars().len() as u32,
                }
            })
            .collect();
        let index = index.into_iter().map(|(k, v)| (k, Arc::from(v))).collect();
        Program {
            clauses,
            compiled,
            index,
        }
    }

    pub fn empty() -> Self {
        Program::default()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn defines(&self, pred: Sym, arity: usize) -> bool {
        self.index.contains_key(&(pred, arity))
    }

    /// A new program with `self`'s clauses followed by `more`.
    pub fn extended(&self, more: impl IntoIterator<Item = Clause>) -> Program {
        Program::new(self.clauses.iter().cloned().chain(more))
    }

    /// Parses the program file format: clauses only, `%` comments ignored.
    pub fn parse(src: &str) -> Result<Program, ProgramError> {
        let mut clauses = Vec::new();
        for item in syntax::parse_items(src)? {
            match item {
                Item::Clause { clause, .. } => clauses.push(clause),
                Item::Signature { line, .. } => return Err(ProgramError::Directive { line }),
            }
        }
        Ok(Program::new(clauses))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Program, ProgramError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ProgramError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Program::parse(&text)
    }

    /// One clause per line in canonical form; `parse` reads it back exactly.
    pub fn to_text(&self) -> String {
        self.clauses
            .iter()
            .map(|c| syntax::render_clause(c) + "\n")
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ProgramError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| ProgramError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Bindings for the variables of a query. Variables left unbound in an
/// answer are renumbered above every variable of the query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    bindings: Vec<(Var, Term)>,
}

impl Answer {
    pub fn bindings(&self) -> &[(Var, Term)] {
        &self.bindings
    }

    pub fn get(&self, var: Var) -> Option<&Term> {
        self.bindings
            .iter()
            .find(|(v, _)| *v == var)
            .map(|(_, t)| t)
    }

    pub fn is_ground(&self) -> bool {
        self.bindings.iter().all(|(_, t)| t.is_ground())
    }

    /// Substitutes this answer's bindings into `term`.
    pub fn apply(&self, term: &Term) -> Term {
        term.map_vars(&mut |v| self.get(v).cloned().unwrap_or(Term::Var(v)))
    }
}

/// Result of an exhaustive (budgeted) search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub answers: Vec<Answer>,
    /// False when a budget tripped before the search space was exhausted.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstAnswer {
    pub answer: Option<Answer>,
    /// True when no answer was found and a budget tripped.
    pub budget_exhausted: bool,
}

// ---------------------------------------------------------------------------
// Machine

#[derive(Default)]
struct Store {
    slots: Vec<Option<Term>>,
    trail: Vec<u32>,
}

impl Store {
    fn ensure(&mut self, n: u32) {
        if self.slots.len() < n as usize {
            self.slots.resize(n as usize, None);
        }
    }

    fn deref<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match &self.slots[v.0 as usize] {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, var: Var, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(v) => *v == var,
            Term::Atom(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(var, a)),
        }
    }

    fn bind(&mut self, v: Var, t: Term) {
        self.slots[v.0 as usize] = Some(t);
        self.trail.push(v.0);
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.slots[v as usize] = None;
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.deref(a).clone();
        let b = self.deref(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if self.occurs(*x, other) {
                    return false;
                }
                self.bind(*x, other.clone());
                true
            }
            (Term::Atom(p), Term::Atom(q)) => p == q,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    /// `t` with every bound variable replaced by its value and `unbound`
    /// applied to the rest.
    fn resolve_with(&self, t: &Term, unbound: &mut impl FnMut(Var) -> Term) -> Term {
        self.resolve_changed(t, unbound)
            .unwrap_or_else(|| t.clone())
    }

    fn resolve_changed(&self, t: &Term, unbound: &mut impl FnMut(Var) -> Term) -> Option<Term> {
        match t {
            Term::Var(v) => match &self.slots[v.0 as usize] {
                Some(next) => Some(self.resolve_with(next, unbound)),
                None => Some(unbound(*v)),
            },
            Term::Atom(_) => None,
            Term::Compound(f, args) => rebuild(*f, args, |a| self.resolve_changed(a, unbound)),
        }
    }
}

enum Goal {
    Call { goal: Term, depth: usize },
    Cut { height: usize },
}

struct GoalNode {
    goal: Goal,
    next: Option<Rc<GoalNode>>,
}

type Goals = Option<Rc<GoalNode>>;

struct ChoicePoint {
    goal: Term,
    depth: usize,
    cont: Goals,
    alts: Arc<[usize]>,
    next_alt: usize,
    trail_len: usize,
    next_var: u32,
    cut_height: usize,
}

#[derive(PartialEq, Eq)]
enum State {
    Run,
    Backtrack,
    Done,
}

/// Lazy, budgeted enumeration of the answers to a conjunction of goals.
pub struct AnswerStream<'p> {
    program: &'p Program,
    budget: SolveBudget,
    store: Store,
    goals: Goals,
    choices: Vec<ChoicePoint>,
    query_vars: Vec<Var>,
    var_floor: u32,
    next_var: u32,
    steps: u64,
    emitted: usize,
    state: State,
    truncated: bool,
}

fn key_of(goal: &Term) -> Option<(Sym, usize)> {
    match goal {
        Term::Atom(p) => Some((*p, 0)),
        Term::Compound(p, args) => Some((*p, args.len())),
        Term::Var(_) => None,
    }
}

impl<'p> AnswerStream<'p> {
    pub fn new(program: &'p Program, goals: &[Literal], budget: SolveBudget) -> Self {
        let mut query_vars = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for g in goals {
            for a in &g.args {
                a.collect_vars(&mut seen, &mut query_vars);
            }
        }
        let var_floor = query_vars.iter().map(|v| v.0 + 1).max().unwrap_or(0);
        // Query variables keep their ids; the machine allocates above them.
        let mut store = Store::default();
        store.ensure(var_floor);
        let mut chain: Goals = None;
        for g in goals.iter().rev() {
            chain = Some(Rc::new(GoalNode {
                goal: Goal::Call {
                    goal: g.to_term(),
                    depth: 0,
                },
                next: chain,
            }));
        }
        AnswerStream {
            program,
            budget,
            store,
            goals: chain,
            choices: Vec::new(),
            query_vars,
            var_floor,
            next_var: var_floor,
            steps: 0,
            emitted: 0,
            state: State::Run,
            truncated: false,
        }
    }

    /// Unbound variables in answers are numbered from at least `floor`.
    pub fn with_var_floor(mut self, floor: u32) -> Self {
        self.var_floor = self.var_floor.max(floor);
        self
    }

    /// True once the stream ended because a budget tripped.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn try_alternatives(
        &mut self,
        goal: Term,
        depth: usize,
        cont: Goals,
        alts: Arc<[usize]>,
        start: usize,
        cut_height: usize,
    ) -> bool {
        for i in start..alts.len() {
            if self.steps >= self.budget.max_steps {
                self.truncated = true;
                self.state = State::Done;
                return false;
            }
            self.steps += 1;
            let compiled = &self.program.compiled[alts[i]];
            let base = self.next_var;
            let mark = self.store.trail.len();
            self.store.ensure(base + compiled.nvars);
            let head = compiled.head.offset_vars(base);
            if self.store.unify(&goal, &head) {
                self.next_var = base + compiled.nvars;
                let mut next = cont.clone();
                if compiled.ends_in_cut {
                    next = Some(Rc::new(GoalNode {
                        goal: Goal::Cut { height: cut_height },
                        next,
                    }));
                }
                for b in compiled.body.iter().rev() {
                    next = Some(Rc::new(GoalNode {
                        goal: Goal::Call {
                            goal: b.offset_vars(base),
                            depth: depth + 1,
                        },
                        next,
                    }));
                }
                if i + 1 < alts.len() {
                    self.choices.push(ChoicePoint {
                        goal,
                        depth,
                        cont,
                        alts: alts.clone(),
                        next_alt: i + 1,
                        trail_len: mark,
                        next_var: base,
                        cut_height,
                    });
                }
                self.goals = next;
                return true;
            }
            self.store.undo(mark);
        }
        false
    }

    fn backtrack(&mut self) -> bool {
        while let Some(cp) = self.choices.pop() {
            self.store.undo(cp.trail_len);
            self.next_var = cp.next_var;
            if self.try_alternatives(
                cp.goal,
                cp.depth,
                cp.cont,
                cp.alts,
                cp.next_alt,
                cp.cut_height,
            ) {
                return true;
            }
            if self.state == State::Done {
                return false;
            }
        }
        false
    }

    fn emit(&mut self) -> Answer {
        let mut renumber: FxHashMap<Var, Var> = FxHashMap::default();
        let floor = self.var_floor;
        let mut fresh = |w: Var| {
            let next = Var(floor + renumber.len() as u32);
            Term::Var(*renumber.entry(w).or_insert(next))
        };
        let bindings = self
            .query_vars
            .iter()
            .map(|&v| (v, self.store.resolve_with(&Term::Var(v), &mut fresh)))
            .collect();
        Answer { bindings }
    }

    fn step(&mut self) -> Option<Answer> {
        loop {
            match self.state {
                State::Done => return None,
                State::Backtrack => {
                    if !self.backtrack() {
                        self.state = State::Done;
                        return None;
                    }
                    self.state = State::Run;
                }
                State::Run => {}
            }
            let Some(node) = self.goals.take() else {
                self.state = State::Backtrack;
                return Some(self.emit());
            };
            match &node.goal {
                Goal::Cut { height } => {
                    self.choices.truncate(*height);
                    self.goals = node.next.clone();
                }
                Goal::Call { goal, depth } => {
                    if *depth > self.budget.max_depth {
                        self.truncated = true;
                        self.state = State::Backtrack;
                        continue;
                    }
                    if let Term::Compound(f, args) = goal {
                        if *f == well_known::equals() && args.len() == 2 {
                            if self.steps >= self.budget.max_steps {
                                self.truncated = true;
                                self.state = State::Done;
                                return None;
                            }
                            self.steps += 1;
                            let mark = self.store.trail.len();
                            if self.store.unify(&args[0], &args[1]) {
                                self.goals = node.next.clone();
                            } else {
                                self.store.undo(mark);
                                self.state = State::Backtrack;
                            }
                            continue;
                        }
                    }
                    let alts = key_of(goal)
                        .and_then(|k| self.program.index.get(&k))
                        .cloned();
                    let Some(alts) = alts else {
                        self.state = State::Backtrack;
                        continue;
                    };
                    let height = self.choices.len();
                    if !self.try_alternatives(
                        goal.clone(),
                        *depth,
                        node.next.clone(),
                        alts,
                        0,
                        height,
                    ) && self.state != State::Done
                    {
                        self.state = State::Backtrack;
                    }
                }
            }
        }
    }
}

impl Iterator for AnswerStream<'_> {
    type Item = Answer;

    fn next(&mut self) -> Option<Answer> {
        if self.emitted >= self.budget.max_answers {
            if self.state != State::Done {
                // More answers may exist; the answer budget cut the search short.
                self.truncated |= !self.choices.is_empty();
                self.state = State::Done;
            }
            return None;
        }
        let answer = self.step()?;
        self.emitted += 1;
        Some(answer)
    }
}

/// All answers to `goals` in depth-first, clause-order sequence.
pub fn solve_goals(program: &Program, goals: &[Literal], budget: SolveBudget) -> Solution {
    let mut stream = AnswerStream::new(program, goals, budget);
    let answers: Vec<Answer> = stream.by_ref().collect();
    Solution {
        answers,
        complete: !stream.truncated(),
    }
}

pub fn solve(program: &Program, goal: &Literal, budget: SolveBudget) -> Solution {
    solve_goals(program, std::slice::from_ref(goal), budget)
}

/// The first answer only; in a decision list this is the program's output.
pub fn first_answer(program: &Program, goal: &Literal, budget: SolveBudget) -> FirstAnswer {
    let mut stream = AnswerStream::new(program, std::slice::from_ref(goal), budget);
    let answer = stream.next();
    let budget_exhausted = answer.is_none() && stream.truncated();
    FirstAnswer {
        answer,
        budget_exhausted,
    }
}

/// Variable standing for the output argument of an output query.
pub const OUTPUT_VAR: Var = Var(0);

/// The goal with the example's input in place and a fresh variable
/// ([`OUTPUT_VAR`]) in the output position, e.g. `past([a,c,t],X)`.
pub fn output_goal(target: &PredicateSignature, example: &Example) -> Literal {
    let input_pos = target.input_positions().next().unwrap_or(0);
    let args = (0..target.arity())
        .map(|i| {
            if i == input_pos {
                example.input.clone()
            } else {
                Term::Var(OUTPUT_VAR)
            }
        })
        .collect();
    Literal::new(target.name, args)
}

/// All answers to the output query for `example`.
pub fn output_query(
    program: &Program,
    example: &Example,
    target: &PredicateSignature,
    budget: SolveBudget,
) -> Solution {
    solve(program, &output_goal(target, example), budget)
}

/// The output argument bound by an answer to an output query.
pub fn answer_output(answer: &Answer) -> Term {
    answer
        .get(OUTPUT_VAR)
        .cloned()
        .unwrap_or(Term::Var(OUTPUT_VAR))
}
