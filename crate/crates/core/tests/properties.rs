//! Property tests for unification, the solver, background extraction and
//! scoring.

mod common;

use std::collections::HashMap;

use foidl_core::background::{PREFIX_TYPE, SUFFIX_TYPE};
use foidl_core::induction::{
    gain, mass_from, select_literal, CandidateKind, CandidateLiteral, CandidateScore, StateScore,
};
use foidl_core::logic::{variable_fraction, VarGen};
use foidl_core::solver::AnswerStream;
use foidl_core::{
    builtin_split, extract_theory_constants, first_answer, solve, Clause, Example, LearnerParams,
    Literal, Program, SolveBudget, Substitution, Sym, Term, Var,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0u32..3).prop_map(Term::var),
        prop::sample::select(CONSTANTS.to_vec()).prop_map(Term::atom),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner
                .clone()
                .prop_map(|t| Term::compound(Sym::new("g"), vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::compound(Sym::new("f"), vec![a, b])),
        ]
    })
}

fn ground_term() -> impl Strategy<Value = Term> {
    term().prop_map(|t| t.map_vars(&mut |_| Term::atom("a")))
}

fn word(max_len: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec!['a', 'b', 'c', 'd', 'e']),
        0..=max_len,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

fn union_vars(a: &Term, b: &Term) -> Vec<Var> {
    let mut vars = a.vars();
    vars.extend(b.vars().into_iter().filter(|v| !a.vars().contains(v)));
    vars
}

fn split_goal(w: &str, prefix: Term, suffix: Term) -> Literal {
    Literal::new("split", vec![Term::word(w), prefix, suffix])
}

fn answer_pairs(program: &Program, goal: &Literal, budget: SolveBudget) -> Vec<[char; 2]> {
    solve(program, goal, budget)
        .answers
        .iter()
        .map(|a| {
            ground_pair(&goal.args.iter().map(|t| a.apply(t)).collect::<Vec<_>>())
                .expect("ground answer")
        })
        .collect()
}

fn without_cuts(mini: &[MiniClause]) -> Vec<MiniClause> {
    mini.iter()
        .cloned()
        .map(|c| MiniClause { cut: false, ..c })
        .collect()
}

fn with_all_cuts(mini: &[MiniClause]) -> Vec<MiniClause> {
    mini.iter()
        .cloned()
        .map(|c| MiniClause { cut: true, ..c })
        .collect()
}

fn parse_mini(mini: &[MiniClause]) -> Program {
    let text: String = mini.iter().map(|c| c.render() + "\n").collect();
    Program::parse(&text).expect("generated program parses")
}

const P_QUERIES: [(&str, [Option<char>; 2]); 4] = [
    ("p(a,Y)", [Some('a'), None]),
    ("p(b,Y)", [Some('b'), None]),
    ("p(c,Y)", [Some('c'), None]),
    ("p(X,Y)", [None, None]),
];

fn is_subsequence<T: PartialEq>(short: &[T], long: &[T]) -> bool {
    let mut it = long.iter();
    short.iter().all(|x| it.any(|y| y == x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unify_is_sound_and_idempotent(s in term(), t in term()) {
        if let Some(sigma) = Substitution::new().unify(&s, &t) {
            let (a, b) = (sigma.apply(&s), sigma.apply(&t));
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(sigma.apply(&a), a);
        }
    }

    #[test]
    fn unify_is_symmetric_in_success(s in term(), t in term()) {
        prop_assert_eq!(Substitution::new().unify(&s, &t).is_some(), Substitution::new().unify(&t, &s).is_some());
    }

    #[test]
    fn unify_matches_brute_force(s in term(), t in term()) {
        let vars = union_vars(&s, &t);
        let found = brute_force_unifiers(&s, &t);
        match Substitution::new().unify(&s, &t) {
            None => prop_assert!(found.is_empty()),
            Some(sigma) => {
                prop_assert!(!found.is_empty());
                for theta in &found {
                    prop_assert!(more_general(&sigma, theta, &vars));
                }
            }
        }
    }

    #[test]
    fn a_term_unifies_with_its_instances(s in term(), values in prop::collection::vec(ground_term(), 3)) {
        let map: HashMap<Var, Term> = values.into_iter().enumerate().map(|(i, t)| (Var(i as u32), t)).collect();
        let instance = instantiate(&s, &map);
        let sigma = Substitution::new().unify(&s, &instance);
        prop_assert!(sigma.is_some());
        let sigma = sigma.unwrap();
        prop_assert_eq!(sigma.apply(&s), instance);
    }

    #[test]
    fn variable_fraction_bounds(t in term()) {
        let v = variable_fraction(&t);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v == 0.0, t.is_ground());
        prop_assert_eq!(v == 1.0, t.is_var());
    }

    #[test]
    fn variable_fraction_of_partial_words(w in word(8)) {
        let t = Term::partial_list(Term::word(&w).list_parts().unwrap().0.into_iter().cloned(), Term::var(0));
        prop_assert!((variable_fraction(&t) - 1.0 / (w.len() as f64 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn split_matches_oracle(w in word(12)) {
        let goal = split_goal(&w, Term::var(0), Term::var(1));
        let sol = solve(builtin_split().program(), &goal, SolveBudget::default());
        let chars: Vec<char> = w.chars().collect();
        let expected: Vec<(Term, Term)> = split_oracle(&chars)
            .into_iter()
            .map(|(p, s)| (Term::word(&p.iter().collect::<String>()), Term::word(&s.iter().collect::<String>())))
            .collect();
        let got: Vec<(Term, Term)> = sol.answers.iter().map(|a| (a.apply(&Term::var(0)), a.apply(&Term::var(1)))).collect();
        prop_assert!(sol.complete);
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn renaming_apart_preserves_provability(w in word(6), p in word(4), s in word(4), offset in 0u32..50) {
        let kb = builtin_split();
        let mut gen = VarGen::starting_at(offset);
        let renamed = Program::new(kb.program().clauses().iter().map(|c: &Clause| c.rename_apart(&mut gen)));
        let goal = split_goal(&w, Term::word(&p), Term::word(&s));
        let before = first_answer(kb.program(), &goal, SolveBudget::default()).answer.is_some();
        let after = first_answer(&renamed, &goal, SolveBudget::default()).answer.is_some();
        prop_assert_eq!(before, after);
        prop_assert_eq!(before, !p.is_empty() && !s.is_empty() && format!("{p}{s}") == w);
    }

    #[test]
    fn all_cut_programs_match_first_matching_clause(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mini = with_all_cuts(&random_cut_program(&mut rng));
        let program = parse_mini(&mini);
        for (src, pattern) in P_QUERIES {
            let goal = foidl_core::logic::syntax::parse_literal(src).unwrap();
            let first = first_answer(&program, &goal, SolveBudget::default())
                .answer
                .and_then(|a| ground_pair(&goal.args.iter().map(|t| a.apply(t)).collect::<Vec<_>>()));
            prop_assert_eq!(first, naive_answers(&mini, "p", pattern).first().copied());
        }
    }

    // Cuts only in the queried predicate, over cut-free definitions: the
    // shape of a decision list over background knowledge.
    #[test]
    fn removing_cuts_keeps_the_first_answer(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mini: Vec<MiniClause> = random_cut_program(&mut rng)
            .into_iter()
            .map(|c| MiniClause { cut: c.cut && c.pred == "p", ..c })
            .collect();
        let (with, without) = (parse_mini(&mini), parse_mini(&without_cuts(&mini)));
        for (src, _) in P_QUERIES {
            let goal = foidl_core::logic::syntax::parse_literal(src).unwrap();
            let cut = answer_pairs(&with, &goal, SolveBudget::default());
            let free = answer_pairs(&without, &goal, SolveBudget::default());
            prop_assert_eq!(cut.first(), free.first());
            prop_assert_eq!(&cut[..], &free[..cut.len()]);
        }
    }

    // With cuts in called predicates too, the cut answers still appear
    // among the cut-free ones, in order.
    #[test]
    fn cut_answers_are_a_subsequence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mini = random_cut_program(&mut rng);
        let (with, without) = (parse_mini(&mini), parse_mini(&without_cuts(&mini)));
        for (src, _) in P_QUERIES {
            let goal = foidl_core::logic::syntax::parse_literal(src).unwrap();
            let cut = answer_pairs(&with, &goal, SolveBudget::default());
            let free = answer_pairs(&without, &goal, SolveBudget::default());
            prop_assert!(is_subsequence(&cut, &free));
        }
    }

    #[test]
    fn bounded_answers_are_a_prefix(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = parse_mini(&without_cuts(&random_cut_program(&mut rng)));
        let goal = foidl_core::logic::syntax::parse_literal("p(X,Y)").unwrap();
        let full = answer_pairs(&program, &goal, SolveBudget::default());
        let one = answer_pairs(&program, &goal, SolveBudget::default().with_max_answers(1));
        let some = answer_pairs(&program, &goal, SolveBudget::default().with_max_answers(k));
        prop_assert_eq!(&one[..], &full[..one.len()]);
        prop_assert_eq!(&some[..], &full[..some.len()]);
        prop_assert_eq!(some.len(), full.len().min(k));
    }

    #[test]
    fn search_stops_within_the_step_budget(max_steps in 1u64..5000, max_depth in 1usize..600) {
        let program = Program::parse("loop(X) :- loop(f(X)).\nloop(a).\n").unwrap();
        let goal = Literal::new("loop", vec![Term::var(0)]);
        let budget = SolveBudget::new(1000, max_steps, max_depth).unwrap();
        let mut stream = AnswerStream::new(&program, std::slice::from_ref(&goal), budget);
        let answers = stream.by_ref().count();
        prop_assert!(stream.steps() <= max_steps);
        prop_assert!(stream.truncated());
        // Only `loop(a)` can answer, once the depth limit cuts the recursion.
        prop_assert!(answers <= 1);
    }

    #[test]
    fn theory_constants_occur_often_enough(
        pairs in prop::collection::vec((word(6), word(6)), 0..8),
        min in 1usize..4,
    ) {
        let train: Vec<Example> = pairs.iter().map(|(a, b)| Example::from_words(a, b)).collect();
        let mut words: Vec<&String> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        words.sort();
        words.dedup();
        let table = extract_theory_constants(&train, min);
        let looser = extract_theory_constants(&train, min + 1);
        for (ty, is_prefix) in [(PREFIX_TYPE, true), (SUFFIX_TYPE, false)] {
            for c in table.get(ty) {
                let affix: String = foidl_core::logic::syntax::render_term(c)
                    .trim_matches(|ch| ch == '[' || ch == ']')
                    .split(',')
                    .collect();
                let count = words
                    .iter()
                    .filter(|w| w.len() > affix.len() && if is_prefix { w.starts_with(&affix) } else { w.ends_with(&affix) })
                    .count();
                prop_assert!(count >= min, "{} occurs in {} words", affix, count);
            }
            for c in looser.get(ty) {
                prop_assert!(table.get(ty).contains(c));
            }
        }
        // More data never removes a constant.
        let mut more = train.clone();
        more.push(Example::from_words("bade", "baded"));
        let bigger = extract_theory_constants(&more, min);
        for ty in [PREFIX_TYPE, SUFFIX_TYPE] {
            for c in table.get(ty) {
                prop_assert!(bigger.get(ty).contains(c));
            }
        }
    }

    #[test]
    fn mass_never_grows_under_ground_refinement(
        prefix in word(6),
        tail in word(4),
        u in 2u64..5000,
        p in 0usize..3,
    ) {
        let items: Vec<Term> = Term::word(&prefix).list_parts().unwrap().0.into_iter().cloned().collect();
        let open = Term::partial_list(items.clone(), Term::var(0));
        let bare = Term::var(0);
        let closed = Term::partial_list(items, Term::word(&tail));
        prop_assert!(mass_from(&closed, u, p) <= mass_from(&open, u, p) + 1e-9);
        prop_assert!(mass_from(&open, u, p) <= mass_from(&bare, u, p) + 1e-9);
        prop_assert!(mass_from(&closed, u, p) <= 1.0);
    }

    #[test]
    fn gain_multiplier_is_bounded_by_retained_positives(
        pos in 1usize..100,
        kept in 0usize..100,
        mass_before in 0.0f64..1e4,
        mass_after in 0.0f64..1e4,
    ) {
        let kept = kept.min(pos);
        let before = StateScore { positives: pos, neg_mass: mass_before };
        let after = StateScore { positives: kept, neg_mass: mass_after.min(mass_before) };
        let g = gain(before, after);
        prop_assert!(g <= kept as f64 * before.info() + 1e-9);
        if kept == 0 {
            prop_assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn clean_literal_beats_one_with_residual_mass(
        pos in 4usize..60,
        kept in 2usize..60,
        mass in 1.0f64..500.0,
        residual in 0.01f64..1.0,
        clean_first in any::<bool>(),
    ) {
        let kept = kept.min(pos);
        let before = StateScore { positives: pos, neg_mass: mass };
        let clean = StateScore { positives: kept, neg_mass: 0.0 };
        let dirty = StateScore { positives: kept, neg_mass: mass * residual };
        let lit = |name: &str| CandidateLiteral {
            literal: Literal::new(name, vec![Term::var(0)]),
            kind: CandidateKind::BackgroundCall,
            new_vars: vec![],
        };
        let score = |s: StateScore| CandidateScore { retained: s.positives, neg_mass: s.neg_mass, gain: gain(before, s) };
        let (cands, scores, want) = if clean_first {
            (vec![lit("c"), lit("d")], vec![score(clean), score(dirty)], 0)
        } else {
            (vec![lit("d"), lit("c")], vec![score(dirty), score(clean)], 1)
        };
        prop_assert_eq!(select_literal(&cands, &scores, &LearnerParams::default()), Some(want));
    }
}
