//! Goal-directed evaluation of stratified normal programs, justification
//! trees, and a brute-force stable model oracle.

mod solve;
mod stable;
mod stratify;
mod tree;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::logic::{Literal, LogicError, PredicateKey, Program, Query, Rule, Substitution};

pub use solve::Solver;
pub use stable::brute_force_stable_models;
pub use stratify::{stratify, Stratification};
pub use tree::{FailReason, Goal, JustificationTree, NodeStatus};

pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("program is not stratified: negative cycle through {}", format_cycle(.cycle))]
    NotStratified { cycle: Vec<PredicateKey> },
    #[error("default negation on non-ground literal {0}")]
    NonGroundNaf(Literal),
    #[error("depth limit {0} exceeded")]
    DepthLimit(usize),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("atom budget {budget} exceeded: {needed} needed")]
    AtomBudget { budget: usize, needed: usize },
}

fn format_cycle(cycle: &[PredicateKey]) -> String {
    cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_answers: usize,
    pub depth_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_answers: 10, depth_limit: DEFAULT_DEPTH_LIMIT }
    }
}

impl SolveOptions {
    pub fn unbounded() -> Self {
        SolveOptions { max_answers: usize::MAX, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    /// Restricted to the query's named variables.
    pub bindings: Substitution,
    /// Ground literals the proof relies on.
    pub model: BTreeSet<Literal>,
    pub justification: JustificationTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub constraint: Rule,
    pub witness: Substitution,
    pub justification: JustificationTree,
}

pub fn solve(p: &Program, q: &Query, opts: SolveOptions) -> Result<Vec<Answer>, EngineError> {
    Solver::new(p, opts)?.solve(q)
}

pub fn prove_negation(p: &Program, q: &Query, opts: SolveOptions) -> Result<Option<Answer>, EngineError> {
    Solver::new(p, opts)?.prove_negation(q)
}

pub fn check_constraints(
    p: &Program,
    constraints: &Program,
    opts: SolveOptions,
) -> Result<Vec<ConstraintViolation>, EngineError> {
    Solver::new(p, opts)?.check_constraints(constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_literal, parse_program, parse_query};

    fn program(text: &str) -> Program {
        parse_program(text).unwrap()
    }

    fn answers(p: &str, q: &str) -> Vec<Answer> {
        solve(&program(p), &parse_query(q).unwrap(), SolveOptions::unbounded()).unwrap()
    }

    #[test]
    fn fact_query_has_one_empty_answer() {
        let a = answers("p.", "?- p.");
        assert_eq!(a.len(), 1);
        assert!(a[0].bindings.is_empty());
        assert_eq!(a[0].justification.goal, Goal::Literal(parse_literal("p").unwrap()));
    }

    #[test]
    fn completeness_example_finds_security_assessment() {
        let p = "assessment(design_assessment). process_complete(design_assessment). \
                 assessment(security_assessment). \
                 incomplete(X) :- assessment(X), not process_complete(X).";
        let a = answers(p, "?- incomplete(X).");
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].bindings.to_string(), "{X = security_assessment}");
        assert!(a[0].model.contains(&parse_literal("assessment(security_assessment)").unwrap()));
        assert!(a[0].justification.replay(&program(p)).is_ok());
    }

    #[test]
    fn negation_of_fact_fails() {
        let r = prove_negation(&program("p."), &parse_query("p").unwrap(), SolveOptions::default());
        assert_eq!(r.unwrap(), None);
        assert!(answers("p.", "?- not p.").is_empty());
    }

    #[test]
    fn missing_property_is_blamed() {
        let p = program("meets_intent(arducopter_software). is_correct(arducopter_software).");
        let q = parse_query("meets_intent(arducopter_software), is_correct(arducopter_software), is_innocuous(arducopter_software)").unwrap();
        let a = prove_negation(&p, &q, SolveOptions::default()).unwrap().unwrap();
        assert_eq!(a.justification.blamed(), vec![parse_literal("is_innocuous(arducopter_software)").unwrap()]);
    }

    #[test]
    fn positive_loops_fail_without_hanging() {
        let a = answers("p :- q. q :- p. q :- r. r.", "?- p.");
        assert_eq!(a.len(), 1);
        assert!(answers("p :- q. q :- p.", "?- p.").is_empty());
    }

    #[test]
    fn loop_pruned_failure_is_not_cached_wrongly() {
        // q fails under ancestor p only because of the loop check; the later
        // top-level call of q must still be proved.
        let p = "s :- p, q. p :- q. q :- p. p. ";
        assert_eq!(answers(p, "?- s.").len(), 1);
        assert_eq!(answers(p, "?- q.").len(), 1);
    }

    #[test]
    fn non_stratified_program_is_rejected() {
        let err = solve(&program("p :- not p."), &parse_query("p").unwrap(), SolveOptions::default());
        assert!(matches!(err, Err(EngineError::NotStratified { .. })));
    }

    #[test]
    fn unbound_negation_is_an_error() {
        let p = program("q(a). r(X) :- q(X).");
        let err = solve(&p, &parse_query("not q(X), r(X)").unwrap(), SolveOptions::default());
        assert!(err.is_ok(), "selection waits for r(X) to bind X");
        let q = Query::new(vec![crate::logic::BodyElement::Naf(parse_literal("q(X)").unwrap())]);
        assert!(matches!(
            Solver::new(&p, SolveOptions::default()).unwrap().solve(&q),
            Err(EngineError::Logic(_)) | Err(EngineError::NonGroundNaf(_))
        ));
    }

    #[test]
    fn anonymous_variables_in_negation_are_existential() {
        assert!(answers("p(a, b).", "?- not p(a, _).").is_empty());
        assert_eq!(answers("p(a, b).", "?- not p(c, _).").len(), 1);
    }

    #[test]
    fn depth_limit_is_enforced() {
        let p = program("n(z). n(s(X)) :- n(X).");
        let q = parse_query("n(s(s(s(s(z)))))").unwrap();
        let opts = SolveOptions { depth_limit: 3, ..Default::default() };
        assert_eq!(solve(&p, &q, opts), Err(EngineError::DepthLimit(3)));
        assert_eq!(solve(&p, &q, SolveOptions::default()).unwrap().len(), 1);
    }

    #[test]
    fn deep_recursion_does_not_overflow() {
        let mut text = String::from("c0.\n");
        for i in 1..3000 {
            text.push_str(&format!("c{i} :- c{}.\n", i - 1));
        }
        let a = answers(&text, "?- c2999.");
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].justification.depth(), 3000);
    }

    #[test]
    fn answers_follow_rule_order_and_respect_max() {
        let p = program("q(b). q(a). q(c).");
        let q = parse_query("q(X)").unwrap();
        let a = solve(&p, &q, SolveOptions { max_answers: 2, ..Default::default() }).unwrap();
        let xs: Vec<String> = a.iter().map(|x| x.bindings.to_string()).collect();
        assert_eq!(xs, vec!["{X = b}", "{X = a}"]);
    }

    #[test]
    fn safe_and_hazardous_train_violates_constraint() {
        let p = program("safe(train). hazardous(train).");
        let c = program(":- safe(X), hazardous(X).");
        let v = check_constraints(&p, &c, SolveOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness.to_string(), "{X = train}");
        assert!(check_constraints(&p, &Program::default(), SolveOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn security_domain_constraint_violated() {
        let p = program("no_vulnerabilities(sw). residual_security_risks(sw).");
        let c = program(":- no_vulnerabilities(X), residual_security_risks(X).");
        assert_eq!(check_constraints(&p, &c, SolveOptions::default()).unwrap().len(), 1);
    }

    #[test]
    fn classical_negation_clash_is_a_violation() {
        let p = program("safe(train). -safe(train). safe(car).");
        let v = check_constraints(&p, &Program::default(), SolveOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness.to_string(), "{X1 = train}");
    }

    #[test]
    fn failure_tree_lists_first_failure_per_rule() {
        let p = program("p :- q, r. p :- s. q.");
        let a = prove_negation(&p, &parse_query("p").unwrap(), SolveOptions::default()).unwrap().unwrap();
        let root = &a.justification;
        assert_eq!(root.status, NodeStatus::NafHolds);
        let failed_p = &root.children[0];
        assert_eq!(failed_p.children.len(), 2);
        assert_eq!(a.justification.blamed(), vec![parse_literal("r").unwrap(), parse_literal("s").unwrap()]);
    }

    #[test]
    fn replay_rejects_a_tampered_proof() {
        let p = program("p :- q. q.");
        let a = answers("p :- q. q.", "?- p.");
        let mut t = a[0].justification.clone();
        assert!(t.replay(&p).is_ok());
        std::sync::Arc::make_mut(&mut t.children)[0].goal = Goal::Literal(parse_literal("z").unwrap());
        assert!(t.replay(&p).is_err());
    }
}
