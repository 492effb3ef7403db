mod common;

use std::collections::BTreeSet;

use caseforge::case::{case_to_json, load_case, DefeaterStatus, NodeKind};
use caseforge::checks::check_indefeasibility;
use caseforge::engine::{brute_force_stable_models, stratify, NodeStatus, SolveOptions, Solver};
use caseforge::logic::{
    is_variant, parse_program, unify, BodyElement, Literal, Program, Query, Rule, Substitution, Term,
};
use caseforge::translator::{statement_predicate, translate_case};
use common::{fixture, random_stratified_program, GenLimits, FIXTURES, ORACLE_LIMITS};
use proptest::prelude::*;

fn predicate_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,5}".prop_filter("keyword", |s| s != "not")
}

fn atom_name() -> impl Strategy<Value = String> {
    prop_oneof![
        predicate_name(),
        // Quoted atoms, including quotes and spaces.
        "[A-Za-z0-9 '<>&_.-]{1,8}",
    ]
}

fn var_name() -> impl Strategy<Value = String> {
    prop_oneof![Just("X".to_string()), Just("Y".to_string()), Just("Zed".to_string()), Just("_".to_string())]
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        atom_name().prop_map(Term::Atom),
        var_name().prop_map(Term::Var),
        (-50i64..50).prop_map(Term::Int),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (atom_name(), prop::collection::vec(inner.clone(), 1..3)).prop_map(|(f, a)| Term::Compound(f, a)),
            prop::collection::vec(inner, 0..3).prop_map(Term::List),
        ]
    })
}

fn literal() -> impl Strategy<Value = Literal> {
    (any::<bool>(), predicate_name(), prop::collection::vec(term(), 0..3))
        .prop_map(|(negated, predicate, args)| Literal { negated, predicate, args })
}

/// Safe by construction: a final positive literal binds every named variable.
fn safe_rule() -> impl Strategy<Value = Rule> {
    (
        prop::option::of(literal()),
        prop::collection::vec((any::<bool>(), literal()), 0..3),
    )
        .prop_map(|(head, body)| {
            // Anonymous variables cannot be bound in a head.
            let head = head.map(|h| h.map_vars(&mut |v| Term::var(if v == "_" { "X" } else { v })));
            let mut body: Vec<BodyElement> = body
                .into_iter()
                .map(|(naf, l)| if naf { BodyElement::Naf(l) } else { BodyElement::Call(l) })
                .collect();
            let mut vars = BTreeSet::new();
            for l in head.iter().chain(body.iter().map(BodyElement::literal)) {
                vars.extend(l.vars().into_iter().filter(|v| v != "_"));
            }
            if !vars.is_empty() {
                body.push(BodyElement::Call(Literal::new("dom", vars.into_iter().map(Term::Var).collect())));
            }
            match head {
                Some(h) => Rule::new(h, body),
                None if body.is_empty() => Rule::fact(Literal::new("p", vec![])),
                None => Rule::constraint(body),
            }
        })
}

fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::atom),
        (0i64..3).prop_map(Term::Int),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(|a| Term::compound("f", a)),
            prop::collection::vec(inner, 0..3).prop_map(Term::List),
        ]
    })
}

/// Terms over a small alphabet, so that unification often succeeds.
fn small_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b"]).prop_map(Term::atom),
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(|a| Term::compound("f", a)),
            prop::collection::vec(inner, 0..3).prop_map(Term::List),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn programs_survive_printing_and_parsing(rules in prop::collection::vec(safe_rule(), 0..6)) {
        let p = Program::new(rules);
        let text = p.to_string();
        prop_assert_eq!(parse_program(&text).unwrap(), p, "{}", text);
    }

    #[test]
    fn unifiers_unify(a in small_term(), b in small_term()) {
        if let Some(s) = unify(&a, &b, &Substitution::new()) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
            // Idempotent: applying twice changes nothing.
            prop_assert_eq!(s.apply(&s.apply(&a)), s.apply(&a));
            prop_assert!(unify(&b, &a, &Substitution::new()).is_some());
        } else {
            prop_assert!(unify(&b, &a, &Substitution::new()).is_none());
        }
    }

    #[test]
    fn common_ground_instances_imply_a_unifier(
        a in small_term(),
        b in small_term(),
        x in ground_term(),
        y in ground_term(),
        z in ground_term(),
    ) {
        let g = Substitution::from_pairs([("X", x), ("Y", y), ("Z", z)]).unwrap();
        if g.apply(&a) == g.apply(&b) {
            let s = unify(&a, &b, &Substitution::new());
            prop_assert!(s.is_some());
            // The ground instance is an instance of the most general one.
            let m = s.unwrap().apply(&a);
            prop_assert!(unify(&m, &g.apply(&a), &Substitution::new()).is_some());
        }
    }

    #[test]
    fn renaming_gives_a_variant(l in literal()) {
        let renamed = l.map_vars(&mut |v| Term::var(format!("{v}_r")));
        prop_assert!(is_variant(&l, &renamed));
    }

    #[test]
    fn descriptions_survive_json_and_export(desc in "\\PC{0,24}", i in 0usize..17) {
        let mut case = fixture("safedriver.case.json");
        let id = case.nodes.get_index(i).unwrap().0.clone();
        case.nodes[&id].description = desc;
        let back = load_case(case_to_json(&case).as_bytes()).unwrap();
        prop_assert_eq!(&back, &case);
        let bundle = translate_case(&case).unwrap();
        let text = bundle.core.to_string();
        prop_assert_eq!(parse_program(&text).unwrap(), bundle.core, "{}", text);
    }

    #[test]
    fn engine_matches_oracle(seed in any::<u64>()) {
        let (p, atoms) = random_stratified_program(seed, ORACLE_LIMITS);
        let models = brute_force_stable_models(&p, 12).unwrap();
        prop_assert_eq!(models.len(), 1);
        let mut s = Solver::new(&p, SolveOptions::default()).unwrap();
        for a in &atoms {
            let q = Query::single(a.clone());
            let answers = s.solve(&q).unwrap();
            let negation = s.prove_negation(&q).unwrap();
            // Exactly one of the two succeeds.
            prop_assert_ne!(answers.is_empty(), negation.is_none());
            prop_assert_eq!(!answers.is_empty(), models[0].contains(a), "{} in\n{}", a, p);
            if let Some(ans) = answers.first() {
                prop_assert!(ans.justification.replay(&p).is_ok());
                prop_assert!(ans.model.is_subset(&models[0]));
            }
            if let Some(n) = negation {
                prop_assert_eq!(n.justification.status, NodeStatus::NafHolds);
            }
        }
    }

    #[test]
    fn answers_are_deterministic(seed in any::<u64>()) {
        let limits = GenLimits { max_atoms: 6, max_rules: 10, max_body: 2, levels: 3 };
        let (p, atoms) = random_stratified_program(seed, limits);
        let run = || -> Vec<_> {
            let mut s = Solver::new(&p, SolveOptions::default()).unwrap();
            atoms.iter().map(|a| s.solve(&Query::single(a.clone())).unwrap()).collect()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn defeater_toggles_decide_indefeasibility(unresolved in any::<bool>()) {
        let mut case = fixture("safedriver.case.json");
        if unresolved {
            case.nodes["D1"].defeater_status = Some(DefeaterStatus::Unresolved);
        }
        let v = check_indefeasibility(&case).unwrap();
        prop_assert_eq!(v.passed(), !unresolved);
    }
}

#[test]
fn generated_programs_exercise_negation() {
    let mut with_naf = 0;
    let mut derived = 0;
    for seed in 0..500 {
        let (p, _) = random_stratified_program(seed, ORACLE_LIMITS);
        if p.rules.iter().any(|r| r.body.iter().any(BodyElement::is_naf)) {
            with_naf += 1;
        }
        derived += brute_force_stable_models(&p, 12).unwrap()[0].len();
    }
    assert!(with_naf > 200, "{with_naf} programs use negation");
    assert!(derived > 500, "{derived} atoms derived");
}

#[test]
fn translated_fixtures_are_stratified_and_traceable() {
    for (name, _) in FIXTURES {
        let case = fixture(name);
        let bundle = translate_case(&case).unwrap();
        assert!(stratify(&bundle.solving_program()).is_stratified(), "{name}");

        let statement_heads: Vec<String> = bundle
            .core
            .rules
            .iter()
            .filter_map(|r| r.head.as_ref())
            .filter(|h| ["claimStmt", "evidenceStmt", "side_ClaimStmt", "defeater"].contains(&h.predicate.as_str()))
            .filter(|h| h.args.get(1).is_some_and(|t| t.to_string() == "application(none)"))
            .map(|h| h.args[0].as_atom().unwrap().to_string())
            .collect();
        let theory_nodes = case.theory_nodes();
        for n in case.nodes.values() {
            if statement_predicate(n.kind).is_none() || theory_nodes.contains(n.id.as_str()) {
                continue;
            }
            let count = statement_heads.iter().filter(|h| **h == n.id).count();
            assert_eq!(count, 1, "{name}: {} heads for {}", count, n.id);
        }
        assert!(!statement_heads.iter().any(|h| case.nodes[h.as_str()].kind == NodeKind::Argument));
    }
}
