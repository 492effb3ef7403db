//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use caseforge::case::{load_case, validate_case, AssuranceCase};
use caseforge::checks::{parse_rule_set, SemanticRuleSet};
use caseforge::logic::{BodyElement, Literal, Program, Rule};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> AssuranceCase {
    let case = load_case(&std::fs::read(fixture_path(name)).unwrap()).unwrap();
    assert_eq!(validate_case(&case), vec![], "{name} must be valid");
    case
}

pub fn rules(name: &str) -> SemanticRuleSet {
    parse_rule_set(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

/// Case fixtures with the rules file each is checked against.
pub const FIXTURES: [(&str, Option<&str>); 6] = [
    ("arducopter.case.json", Some("arducopter.rules")),
    ("safedriver.case.json", None),
    ("safedriver_unresolved.case.json", None),
    ("train.case.json", Some("train.rules")),
    ("dal_same.case.json", Some("dal.rules")),
    ("dal_disjoint.case.json", Some("dal.rules")),
];

/// Shape of a random ground program.
#[derive(Clone, Copy, Debug)]
pub struct GenLimits {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_body: usize,
    pub levels: usize,
}

pub const ORACLE_LIMITS: GenLimits = GenLimits { max_atoms: 12, max_rules: 20, max_body: 3, levels: 4 };

/// A stratified ground program over atoms `a0..`. Every atom gets a level;
/// positive body atoms sit at or below the head's level and negated ones
/// strictly below, so no cycle passes through a negation.
pub fn random_stratified_program(seed: u64, limits: GenLimits) -> (Program, Vec<Literal>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=limits.max_atoms);
    let atoms: Vec<Literal> = (0..n).map(|i| Literal::new(format!("a{i}"), vec![])).collect();
    let level: Vec<usize> = (0..n).map(|_| rng.random_range(0..limits.levels)).collect();
    let rule_count = rng.random_range(1..=limits.max_rules);
    let mut rules = Vec::new();
    for _ in 0..rule_count {
        let h = rng.random_range(0..n);
        let mut body = Vec::new();
        for _ in 0..rng.random_range(0..=limits.max_body) {
            let b = rng.random_range(0..n);
            if level[b] < level[h] && rng.random_bool(0.4) {
                body.push(BodyElement::Naf(atoms[b].clone()));
            } else if level[b] <= level[h] {
                body.push(BodyElement::Call(atoms[b].clone()));
            }
        }
        rules.push(Rule::new(atoms[h].clone(), body));
    }
    (Program::new(rules), atoms)
}
