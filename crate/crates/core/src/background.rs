//! Intensional background knowledge and the type/mode machinery that
//! restricts which literals the learner may consider.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::dataset::Example;
use crate::logic::syntax::{self, Item, SyntaxError};
use crate::logic::{Clause, Sym, Term};
use crate::solver::Program;

/// Argument mode: `+` must be bound on call, `-` is bound by the call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Input,
    Output,
}

impl Mode {
    pub fn symbol(self) -> char {
        match self {
            Mode::Input => '+',
            Mode::Output => '-',
        }
    }
}

/// Per-argument types and modes of a predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSignature {
    pub name: Sym,
    pub arg_types: Vec<String>,
    pub arg_modes: Vec<Mode>,
}

impl PredicateSignature {
    pub fn new(name: &str, arg_types: Vec<String>, arg_modes: Vec<Mode>) -> Self {
        assert_eq!(
            arg_types.len(),
            arg_modes.len(),
            "one mode per argument type"
        );
        PredicateSignature {
            name: Sym::new(name),
            arg_types,
            arg_modes,
        }
    }

    /// Parses `name(type:mode, ...)`, e.g. `past(word:+, word:-)`.
    pub fn parse_target(src: &str) -> Result<Self, SyntaxError> {
        let directive = format!(":- signature {}.", src.trim().trim_end_matches('.'));
        match syntax::parse_items(&directive)?.into_iter().next() {
            Some(Item::Signature { signature, .. }) => Ok(signature),
            _ => Err(SyntaxError {
                line: 1,
                message: "expected a signature".into(),
            }),
        }
    }

    /// `past(word:+, word:-)`, the default target for inflection learning.
    pub fn past_tense() -> Self {
        PredicateSignature::new(
            "past",
            vec!["word".into(), "word".into()],
            vec![Mode::Input, Mode::Output],
        )
    }

    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }

    pub fn input_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.arg_modes
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Mode::Input)
            .map(|(i, _)| i)
    }

    pub fn output_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.arg_modes
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Mode::Output)
            .map(|(i, _)| i)
    }

    /// One input and one output argument: the shape output-completeness
    /// learning over [`Example`]s supports.
    pub fn is_functional_binary(&self) -> bool {
        self.arity() == 2
            && self.input_positions().count() == 1
            && self.output_positions().count() == 1
    }
}

impl fmt::Display for PredicateSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self
            .arg_types
            .iter()
            .zip(&self.arg_modes)
            .map(|(t, m)| format!("{t}:{}", m.symbol()))
            .collect();
        write!(f, "{}({})", self.name, args.join(", "))
    }
}

/// Ground terms usable as the right-hand side of `V = c`, per type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TheoryConstantTable {
    by_type: BTreeMap<String, Vec<Term>>,
}

impl TheoryConstantTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a constant; returns false (and ignores it) if it is not ground.
    pub fn insert(&mut self, ty: &str, constant: Term) -> bool {
        if !constant.is_ground() {
            return false;
        }
        let list = self.by_type.entry(ty.to_string()).or_default();
        if !list.contains(&constant) {
            list.push(constant);
            list.sort_by_cached_key(|t| (list_len(t), t.to_string()));
        }
        true
    }

    pub fn get(&self, ty: &str) -> &[Term] {
        self.by_type.get(ty).map_or(&[], Vec::as_slice)
    }

    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.by_type.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_type.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn list_len(t: &Term) -> usize {
    t.list_parts().map_or(0, |(items, _)| items.len())
}

pub const PREFIX_TYPE: &str = "prefix";
pub const SUFFIX_TYPE: &str = "suffix";

/// Every proper non-empty prefix and suffix shared by at least
/// `min_occurrences` distinct words among the inputs and outputs of
/// `train`. Prefixes are filed under `prefix`, suffixes under `suffix`.
pub fn extract_theory_constants(train: &[Example], min_occurrences: usize) -> TheoryConstantTable {
    let min_occurrences = min_occurrences.max(1);
    let mut words: Vec<&Term> = Vec::new();
    let mut seen = HashSet::new();
    for ex in train {
        for w in [&ex.input, &ex.output] {
            if seen.insert(w) {
                words.push(w);
            }
        }
    }
    let mut prefixes: HashMap<Term, usize> = HashMap::new();
    let mut suffixes: HashMap<Term, usize> = HashMap::new();
    for w in words {
        let Some((items, tail)) = w.list_parts() else {
            continue;
        };
        if !tail.is_nil() {
            continue;
        }
        let items: Vec<Term> = items.into_iter().cloned().collect();
        let n = items.len();
        // Each affix is counted once per word even if it could occur twice.
        for k in 1..n {
            *prefixes
                .entry(Term::list(items[..k].iter().cloned()))
                .or_default() += 1;
            *suffixes
                .entry(Term::list(items[k..].iter().cloned()))
                .or_default() += 1;
        }
    }
    let mut table = TheoryConstantTable::new();
    let mut keep = |ty: &str, counts: HashMap<Term, usize>| {
        let mut chosen: Vec<Term> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_occurrences)
            .map(|(t, _)| t)
            .collect();
        chosen.sort_by_cached_key(|t| (list_len(t), t.to_string()));
        let list = table.by_type.entry(ty.to_string()).or_default();
        list.extend(chosen);
        if list.is_empty() {
            table.by_type.remove(ty);
        }
    };
    keep(PREFIX_TYPE, prefixes);
    keep(SUFFIX_TYPE, suffixes);
    table
}

#[derive(Debug, Error)]
pub enum BackgroundError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: no signature declared for {pred}/{arity}")]
    MissingSignature {
        pred: String,
        arity: usize,
        line: usize,
    },
    #[error("line {line}: duplicate signature for {pred}")]
    DuplicateSignature { pred: String, line: usize },
    #[error("line {line}: background clauses may not contain a cut")]
    Cut { line: usize },
    #[error("background knowledge defines or calls the target predicate {pred}")]
    MentionsTarget { pred: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Cut-free background definitions together with their signatures.
#[derive(Clone, Debug)]
pub struct BackgroundKB {
    program: Program,
    signatures: Vec<PredicateSignature>,
}

impl BackgroundKB {
    pub fn empty() -> Self {
        BackgroundKB {
            program: Program::empty(),
            signatures: Vec::new(),
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn signatures(&self) -> &[PredicateSignature] {
        &self.signatures
    }

    pub fn signature(&self, pred: Sym, arity: usize) -> Option<&PredicateSignature> {
        self.signatures
            .iter()
            .find(|s| s.name == pred && s.arity() == arity)
    }

    /// Parses background text: clauses plus `:- signature ...` directives.
    pub fn parse(src: &str) -> Result<Self, BackgroundError> {
        let mut signatures: Vec<PredicateSignature> = Vec::new();
        let mut clauses: Vec<(Clause, usize)> = Vec::new();
        for item in syntax::parse_items(src)? {
            match item {
                Item::Signature { signature, line } => {
                    if signatures
                        .iter()
                        .any(|s| s.name == signature.name && s.arity() == signature.arity())
                    {
                        return Err(BackgroundError::DuplicateSignature {
                            pred: signature.name.to_string(),
                            line,
                        });
                    }
                    signatures.push(signature);
                }
                Item::Clause { clause, line, .. } => {
                    if clause.ends_in_cut {
                        return Err(BackgroundError::Cut { line });
                    }
                    clauses.push((clause, line));
                }
            }
        }
        for (clause, line) in &clauses {
            let (pred, arity) = clause.head.key();
            if !signatures
                .iter()
                .any(|s| s.name == pred && s.arity() == arity)
            {
                return Err(BackgroundError::MissingSignature {
                    pred: pred.to_string(),
                    arity,
                    line: *line,
                });
            }
        }
        Ok(BackgroundKB {
            program: Program::new(clauses.into_iter().map(|(c, _)| c)),
            signatures,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackgroundError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| BackgroundError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Signatures first, then clauses, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.signatures {
            out.push_str(&syntax::render_signature(s));
            out.push('\n');
        }
        out.push_str(&self.program.to_text());
        out
    }

    /// Union of two fragments; `other`'s clauses follow `self`'s.
    pub fn merged(&self, other: &BackgroundKB) -> BackgroundKB {
        let mut signatures = self.signatures.clone();
        for s in &other.signatures {
            if !signatures.contains(s) {
                signatures.push(s.clone());
            }
        }
        BackgroundKB {
            program: self
                .program
                .extended(other.program.clauses().iter().cloned()),
            signatures,
        }
    }

    /// Rejects knowledge that defines or calls the target predicate.
    pub fn check_target(&self, target: &PredicateSignature) -> Result<(), BackgroundError> {
        let mentions = self.program.clauses().iter().any(|c| {
            std::iter::once(&c.head)
                .chain(&c.body)
                .any(|l| l.pred == target.name && l.arity() == target.arity())
        });
        if mentions || self.signature(target.name, target.arity()).is_some() {
            return Err(BackgroundError::MentionsTarget {
                pred: target.name.to_string(),
            });
        }
        Ok(())
    }
}

pub const SPLIT_SOURCE: &str = ":- signature split(word:+, prefix:-, suffix:-).\n\
split([A,B|C],[A],[B|C]).\n\
split([A|B],[A|C],D) :- split(B,C,D).\n";

pub const COMPONENTS_SOURCE: &str = ":- signature components(list:+, element:-, list:-).\n\
components([A|B],A,B).\n";

/// `split(A,B,C)`: `A` is `B` followed by `C`, both non-empty.
pub fn builtin_split() -> BackgroundKB {
    BackgroundKB::parse(SPLIT_SOURCE).expect("built-in split definition parses")
}

/// `components(A,B,C)`: `A` has head `B` and tail `C`.
pub fn builtin_components() -> BackgroundKB {
    BackgroundKB::parse(COMPONENTS_SOURCE).expect("built-in components definition parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse_literal;
    use crate::solver::{solve, SolveBudget};

    fn provable(kb: &BackgroundKB, goal: &str) -> bool {
        !solve(
            kb.program(),
            &parse_literal(goal).unwrap(),
            SolveBudget::default(),
        )
        .answers
        .is_empty()
    }

    #[test]
    fn split_definition() {
        let kb = builtin_split();
        assert!(provable(&kb, "split([a,c,t,e,d],[a,c,t],[e,d])"));
        assert!(provable(&kb, "split([a,b],[a],[b])"));
        assert!(!provable(&kb, "split([a,b],[a,b],[])"));
        assert!(!provable(&kb, "split([x],_,_)"));
        let sig = kb.signature(Sym::new("split"), 3).unwrap();
        assert_eq!(sig.arg_types, vec!["word", "prefix", "suffix"]);
        assert_eq!(sig.arg_modes, vec![Mode::Input, Mode::Output, Mode::Output]);
    }

    #[test]
    fn components_definition() {
        let kb = builtin_components();
        assert!(provable(&kb, "components([a,b],a,[b])"));
        assert!(provable(&kb, "components([a],a,[])"));
        assert!(!provable(&kb, "components([],_,_)"));
    }

    #[test]
    fn background_text_round_trip() {
        let kb = BackgroundKB::parse(SPLIT_SOURCE).unwrap();
        assert_eq!(kb.to_text(), SPLIT_SOURCE);
        assert_eq!(kb.program().clauses(), builtin_split().program().clauses());
        assert_eq!(kb.signatures(), builtin_split().signatures());
    }

    #[test]
    fn rejects_cut_and_undeclared() {
        let err =
            BackgroundKB::parse(":- signature p(t:+).\n:- signature q(t:+).\np(X) :- q(X), !.\n")
                .unwrap_err();
        assert!(matches!(err, BackgroundError::Cut { line: 3 }));
        let err = BackgroundKB::parse(":- signature p(t:+).\nq(a).\n").unwrap_err();
        match err {
            BackgroundError::MissingSignature { pred, line, .. } => {
                assert_eq!(pred, "q");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn target_check() {
        let target = PredicateSignature::past_tense();
        assert!(builtin_split().check_target(&target).is_ok());
        let bad = BackgroundKB::parse(":- signature past(word:+, word:-).\npast(X,X).\n").unwrap();
        assert!(bad.check_target(&target).is_err());
    }

    #[test]
    fn affixes_shared_by_two_words() {
        let train = [
            Example::from_words("act", "acted"),
            Example::from_words("walk", "walked"),
        ];
        let table = extract_theory_constants(&train, 2);
        assert!(table.get(SUFFIX_TYPE).contains(&Term::word("ed")));
        assert!(table.get(SUFFIX_TYPE).contains(&Term::word("d")));
        assert!(table.get(PREFIX_TYPE).contains(&Term::word("ac")));
        assert!(!table.get(SUFFIX_TYPE).contains(&Term::word("cted")));
    }

    #[test]
    fn no_shared_affixes() {
        let table = extract_theory_constants(&[Example::from_words("go", "went")], 2);
        assert!(table.is_empty());
    }

    #[test]
    fn min_one_keeps_every_affix() {
        let table = extract_theory_constants(&[Example::from_words("act", "acted")], 1);
        assert!(table.get(SUFFIX_TYPE).contains(&Term::word("t")));
        assert!(table.get(PREFIX_TYPE).contains(&Term::word("acte")));
        assert!(!table.get(PREFIX_TYPE).contains(&Term::word("acted")));
    }

    #[test]
    fn empty_training_set() {
        assert!(extract_theory_constants(&[], 2).is_empty());
    }

    #[test]
    fn target_signature_parsing() {
        let t = PredicateSignature::parse_target("past(word:+, word:-)").unwrap();
        assert_eq!(t, PredicateSignature::past_tense());
        assert!(t.is_functional_binary());
        let append = PredicateSignature::parse_target("append(list:-, list:-, list:+)").unwrap();
        assert!(!append.is_functional_binary());
        assert_eq!(t.to_string(), "past(word:+, word:-)");
    }
}
