//! The six semantic analyses: indefeasibility, theory application,
//! consistency, adequacy, completeness and theory harmony.

mod rules;

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use thiserror::Error;

use crate::case::AssuranceCase;
use crate::engine::{EngineError, JustificationTree, SolveOptions, Solver};
use crate::logic::{parse_program, BodyElement, Literal, Program, Query, Rule, Substitution, Term};
use crate::translator::{translate_case, ExportBundle, TranslateError};

pub use rules::{parse_rule_set, AdequacyRule, CompletenessRule, RuleSetError, Section, SemanticRuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckName {
    Indefeasibility,
    TheoryApplication,
    Consistency,
    Adequacy,
    Completeness,
    Harmony,
}

impl CheckName {
    /// Presentation order, used when no checks are selected.
    pub const ALL: [CheckName; 6] = [
        CheckName::Indefeasibility,
        CheckName::TheoryApplication,
        CheckName::Consistency,
        CheckName::Adequacy,
        CheckName::Completeness,
        CheckName::Harmony,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Indefeasibility => "indefeasibility",
            CheckName::TheoryApplication => "theory-application",
            CheckName::Consistency => "consistency",
            CheckName::Adequacy => "adequacy",
            CheckName::Completeness => "completeness",
            CheckName::Harmony => "harmony",
        }
    }

    /// Rule-set section the check reads, if it is rule-driven.
    pub fn section(self) -> Option<Section> {
        match self {
            CheckName::Indefeasibility | CheckName::TheoryApplication => None,
            CheckName::Consistency => Some(Section::Consistency),
            CheckName::Adequacy => Some(Section::Adequacy),
            CheckName::Completeness => Some(Section::Completeness),
            CheckName::Harmony => Some(Section::Harmony),
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CheckError::UnknownCheck(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// Outcome of one check, or of one rule of a rule-driven check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub check: CheckName,
    /// Adequacy and completeness rule name.
    pub rule: Option<String>,
    pub status: Status,
    pub witnesses: Vec<Substitution>,
    pub blamed: Vec<Literal>,
    /// Human-readable failure reasons.
    pub reasons: Vec<String>,
    pub justifications: Vec<JustificationTree>,
}

impl Verdict {
    fn new(check: CheckName, rule: Option<&str>) -> Self {
        Verdict {
            check,
            rule: rule.map(str::to_string),
            status: Status::Pass,
            witnesses: Vec::new(),
            blamed: Vec::new(),
            reasons: Vec::new(),
            justifications: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `check` or `check: rule`.
    pub fn title(&self) -> String {
        match &self.rule {
            Some(r) => format!("{}: {r}", self.check),
            None => self.check.to_string(),
        }
    }

    fn blame(&mut self, lits: impl IntoIterator<Item = Literal>) {
        for l in lits {
            if !self.blamed.contains(&l) {
                self.blamed.push(l);
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("check {0} needs a rules file")]
    MissingRules(CheckName),
    #[error("rules file has no {0} section entries")]
    EmptySection(Section),
    #[error("completeness rule {rule}: undeclared type {type_name}")]
    UndeclaredType { rule: String, type_name: String },
    #[error("theory application at {node}: binding domain {found:?} differs from theory variables {expected:?}")]
    BindingDomain { node: String, expected: Vec<String>, found: Vec<String> },
    #[error("theory {theory}: variable {variable} has no declared type")]
    UntypedVariable { theory: String, variable: String },
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Predicates of the translation itself; everything else is a property.
const STRUCTURAL_PREDICATES: [&str; 8] = [
    "claim",
    "claimStmt",
    "evidenceStmt",
    "side_ClaimStmt",
    "defeater",
    "theory",
    "unresolved_defeater",
    "defeated",
];

/// Runs checks over one translated case.
pub struct Checker<'c> {
    case: &'c AssuranceCase,
    bundle: ExportBundle,
    program: Program,
    opts: SolveOptions,
}

impl<'c> Checker<'c> {
    pub fn new(case: &'c AssuranceCase, opts: SolveOptions) -> Result<Self, CheckError> {
        let bundle = translate_case(case)?;
        let program = bundle.solving_program();
        Ok(Checker { case, bundle, program, opts: SolveOptions { max_answers: usize::MAX, ..opts } })
    }

    pub fn bundle(&self) -> &ExportBundle {
        &self.bundle
    }

    /// Core rules plus theory templates, as solved by every check.
    pub fn program(&self) -> &Program {
        &self.program
    }

    fn solver<'p>(&self, p: &'p Program) -> Result<Solver<'p>, CheckError> {
        Ok(Solver::new(p, self.opts)?)
    }

    pub fn indefeasibility(&self) -> Result<Verdict, CheckError> {
        let mut v = Verdict::new(CheckName::Indefeasibility, None);
        let mut s = self.solver(&self.program)?;
        let pos = s.solve(&self.bundle.positive_query)?;
        let neg = s.solve(&self.bundle.negative_query)?;
        match (pos.into_iter().next(), neg.into_iter().next()) {
            (Some(p), None) => v.justifications.push(p.justification),
            (_, n) => {
                v.status = Status::Fail;
                // The negative query holds exactly when the positive one fails.
                let tree = match n {
                    Some(n) => n.justification,
                    None => match s.prove_negation(&self.bundle.positive_query)? {
                        Some(a) => a.justification,
                        None => unreachable!("positive query both failed and succeeded"),
                    },
                };
                v.blame(tree.blamed());
                if v.blamed.is_empty() {
                    v.blame(self.bundle.positive_query.body.iter().map(|b| b.literal().clone()));
                }
                v.justifications.push(tree);
            }
        }
        Ok(v)
    }

    pub fn theory_application(&self) -> Result<Verdict, CheckError> {
        let mut v = Verdict::new(CheckName::TheoryApplication, None);
        let mut facts = Vec::new();
        let atom = |s: &str| Term::atom(s);
        for (a, ty) in &self.case.vocabulary.instances {
            facts.push(Rule::fact(Literal::new("instance_of", vec![atom(a), atom(ty)])));
        }
        for (k, (node, app)) in self.case.applications().enumerate() {
            let tag = atom(&format!("instance_{}", k + 1));
            let root = self.case.node(&app.theory_id).ok_or_else(|| {
                TranslateError::NotATheory { node: node.id.clone(), target: app.theory_id.clone() }
            })?;
            let expected: Vec<String> = self.case.theory_variables(&app.theory_id).into_iter().collect();
            let found: Vec<String> = app.binding.keys().cloned().collect();
            if expected != found {
                return Err(CheckError::BindingDomain { node: node.id.clone(), expected, found });
            }
            for (var, value) in &app.binding {
                let ty = root.variable_types.get(var).ok_or_else(|| CheckError::UntypedVariable {
                    theory: root.id.clone(),
                    variable: var.clone(),
                })?;
                facts.push(Rule::fact(Literal::new(
                    "binding",
                    vec![tag.clone(), atom(var), atom(value), atom(ty)],
                )));
            }
            for (app_node, theory_node) in &app.node_correspondence {
                facts.push(Rule::fact(Literal::new(
                    "correspondence",
                    vec![tag.clone(), atom(app_node), atom(theory_node)],
                )));
                for (pred, id) in [("app_property", app_node), ("theory_property", theory_node)] {
                    let n = self.case.node(id).ok_or_else(|| TranslateError::UnknownNode(id.clone()))?;
                    for (i, p) in n.ope.properties.iter().enumerate() {
                        facts.push(Rule::fact(Literal::new(
                            pred,
                            vec![atom(id), Term::Int(i as i64 + 1), atom(p)],
                        )));
                    }
                }
            }
        }
        let mut scratch = Program::new(facts);
        scratch.rules.extend(
            parse_program(
                "property_mismatch(I, A, T) :- correspondence(I, A, T), app_property(A, K, P), not theory_property(T, K, P).\n\
                 property_mismatch(I, A, T) :- correspondence(I, A, T), theory_property(T, K, P), not app_property(A, K, P).\n\
                 undeclared_instance(I, V, X, Ty) :- binding(I, V, X, Ty), not instance_of(X, Ty).\n",
            )
            .expect("fixed program")
            .rules,
        );

        let mut s = self.solver(&scratch)?;
        let props = |id: &str| self.case.node(id).map(|n| n.ope.properties.join(", ")).unwrap_or_default();
        for a in s.solve(&Query::single(parse_lit("property_mismatch(I, A, T)")))? {
            let (an, tn) = (binding_atom(&a.bindings, "A"), binding_atom(&a.bindings, "T"));
            v.reasons.push(format!("property mismatch: {an} [{}] vs {tn} [{}]", props(&an), props(&tn)));
            v.blame(a.justification.blamed());
            v.witnesses.push(a.bindings);
            v.justifications.push(a.justification);
        }
        for a in s.solve(&Query::single(parse_lit("undeclared_instance(I, V, X, Ty)")))? {
            v.reasons.push(format!(
                "undeclared instance: {} = {} is not a declared {}",
                binding_atom(&a.bindings, "V"),
                binding_atom(&a.bindings, "X"),
                binding_atom(&a.bindings, "Ty")
            ));
            v.blame(a.justification.blamed());
            v.witnesses.push(a.bindings);
            v.justifications.push(a.justification);
        }
        if !v.witnesses.is_empty() {
            v.status = Status::Fail;
        }
        Ok(v)
    }

    pub fn consistency(&self, rules: &SemanticRuleSet) -> Result<Verdict, CheckError> {
        self.constraint_check(CheckName::Consistency, &rules.consistency)
    }

    pub fn harmony(&self, rules: &SemanticRuleSet) -> Result<Verdict, CheckError> {
        self.constraint_check(CheckName::Harmony, &rules.harmony)
    }

    fn constraint_check(&self, check: CheckName, constraints: &Program) -> Result<Verdict, CheckError> {
        if constraints.rules.is_empty() {
            return Err(CheckError::EmptySection(check.section().expect("rule-driven")));
        }
        let mut v = Verdict::new(check, None);
        for c in self.solver(&self.program)?.check_constraints(constraints)? {
            v.status = Status::Fail;
            v.reasons.push(format!("violated: {}", c.constraint));
            v.blame(c.justification.proved_literals());
            v.witnesses.push(c.witness);
            v.justifications.push(c.justification);
        }
        Ok(v)
    }

    pub fn adequacy(&self, rules: &SemanticRuleSet) -> Result<Vec<Verdict>, CheckError> {
        let mut s = self.solver(&self.program)?;
        let candidates = self.candidate_objects();
        let mut out = Vec::new();
        for rule in &rules.adequacy {
            let mut v = Verdict::new(CheckName::Adequacy, Some(&rule.name));
            let q = Query::new(rule.body.clone());
            let answers = s.solve(&q)?;
            if !answers.is_empty() {
                for a in answers {
                    v.witnesses.push(a.bindings);
                    v.justifications.push(a.justification);
                }
                out.push(v);
                continue;
            }
            v.status = Status::Fail;
            for probe in nearest_misses(&mut s, &q, &candidates)? {
                if let Some(a) = s.prove_negation(&probe)? {
                    v.blame(a.justification.blamed());
                    v.justifications.push(a.justification);
                }
            }
            if v.blamed.is_empty() {
                v.blame(rule.body.iter().map(|b| b.literal().clone()));
            }
            v.reasons.push(format!("no object satisfies {q}"));
            out.push(v);
        }
        Ok(out)
    }

    /// First arguments of property literals, in order of appearance.
    pub fn candidate_objects(&self) -> Vec<Term> {
        let mut out = IndexSet::new();
        for r in &self.program.rules {
            for l in r.head.iter().chain(r.body.iter().map(BodyElement::literal)) {
                if STRUCTURAL_PREDICATES.contains(&l.predicate.as_str()) {
                    continue;
                }
                if let Some(t @ Term::Atom(_)) = l.args.first() {
                    out.insert(t.clone());
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn completeness(&self, rules: &SemanticRuleSet) -> Result<Vec<Verdict>, CheckError> {
        let vocab = &self.case.vocabulary;
        let mut out = Vec::new();
        for rule in &rules.completeness {
            if !vocab.object_types.contains(&rule.type_name) {
                return Err(CheckError::UndeclaredType {
                    rule: rule.name.clone(),
                    type_name: rule.type_name.clone(),
                });
            }
            let type_pred = format!("typefact_{}", rule.type_name);
            let incomplete = format!("incomplete_{}", rule.name);
            let mut scratch = self.program.clone();
            for i in vocab.instances_of(&rule.type_name) {
                scratch.rules.push(Rule::fact(Literal::new(type_pred.as_str(), vec![Term::atom(i)])));
            }
            let x = Term::var("X");
            scratch.rules.push(Rule::new(
                Literal::new(incomplete.as_str(), vec![x.clone()]),
                vec![
                    BodyElement::Call(Literal::new(type_pred.as_str(), vec![x.clone()])),
                    BodyElement::Naf(Literal::new(rule.property.as_str(), vec![x.clone()])),
                ],
            ));

            let mut v = Verdict::new(CheckName::Completeness, Some(&rule.name));
            let q = Query::single(Literal::new(incomplete.as_str(), vec![x]));
            for a in self.solver(&scratch)?.solve(&q)? {
                v.status = Status::Fail;
                let w = binding_atom(&a.bindings, "X");
                v.reasons.push(format!("{w} of type {} lacks {}", rule.type_name, rule.property));
                v.blame(a.justification.blamed());
                v.witnesses.push(a.bindings);
                v.justifications.push(a.justification);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Runs `names` in the given order. Rule-driven checks need `rules` and a
    /// nonempty section.
    pub fn run(&self, names: &[CheckName], rules: Option<&SemanticRuleSet>) -> Result<Vec<Verdict>, CheckError> {
        let mut out = Vec::new();
        for &name in names {
            let need = || rules.ok_or(CheckError::MissingRules(name));
            if let Some(section) = name.section() {
                if need()?.is_section_empty(section) {
                    return Err(CheckError::EmptySection(section));
                }
            }
            match name {
                CheckName::Indefeasibility => out.push(self.indefeasibility()?),
                CheckName::TheoryApplication => out.push(self.theory_application()?),
                CheckName::Consistency => out.push(self.consistency(need()?)?),
                CheckName::Adequacy => out.extend(self.adequacy(need()?)?),
                CheckName::Completeness => out.extend(self.completeness(need()?)?),
                CheckName::Harmony => out.push(self.harmony(need()?)?),
            }
        }
        Ok(out)
    }
}

/// Ground instances of `q` for the candidates satisfying the most body
/// elements on their own. Falls back to `q` itself when no element has an
/// object variable or no candidate satisfies anything.
fn nearest_misses(s: &mut Solver<'_>, q: &Query, candidates: &[Term]) -> Result<Vec<Query>, CheckError> {
    let object_var = q.body.iter().find_map(|b| match b.literal().args.first() {
        Some(Term::Var(v)) if !crate::logic::is_anonymous(v) => Some(v.clone()),
        _ => None,
    });
    let Some(var) = object_var else { return Ok(vec![q.clone()]) };

    let mut best = 0;
    let mut picks = Vec::new();
    for c in candidates {
        let sub = Substitution::from_pairs([(var.as_str(), c.clone())]).expect("one binding");
        let ground: Vec<BodyElement> = q
            .body
            .iter()
            .map(|b| match b {
                BodyElement::Call(l) => BodyElement::Call(sub.apply_literal(l)),
                BodyElement::Naf(l) => BodyElement::Naf(sub.apply_literal(l)),
            })
            .collect();
        let mut score = 0;
        for b in &ground {
            let single = Query::new(vec![b.clone()]);
            if single.check_safety().is_ok() && !s.solve(&single)?.is_empty() {
                score += 1;
            }
        }
        if score > best {
            best = score;
            picks.clear();
        }
        if score == best && score > 0 {
            picks.push(Query::new(ground));
        }
    }
    if picks.is_empty() {
        picks.push(q.clone());
    }
    Ok(picks)
}

fn parse_lit(s: &str) -> Literal {
    crate::logic::parse_literal(s).expect("fixed literal")
}

fn binding_atom(s: &Substitution, var: &str) -> String {
    s.get(var).map(|t| t.as_atom().map_or_else(|| t.to_string(), str::to_string)).unwrap_or_default()
}

pub fn check_indefeasibility(case: &AssuranceCase) -> Result<Verdict, CheckError> {
    Checker::new(case, SolveOptions::default())?.indefeasibility()
}

pub fn check_theory_application(case: &AssuranceCase) -> Result<Verdict, CheckError> {
    Checker::new(case, SolveOptions::default())?.theory_application()
}

pub fn check_consistency(case: &AssuranceCase, rules: &SemanticRuleSet) -> Result<Verdict, CheckError> {
    Checker::new(case, SolveOptions::default())?.consistency(rules)
}

pub fn check_adequacy(case: &AssuranceCase, rules: &SemanticRuleSet) -> Result<Vec<Verdict>, CheckError> {
    Checker::new(case, SolveOptions::default())?.adequacy(rules)
}

pub fn check_completeness(case: &AssuranceCase, rules: &SemanticRuleSet) -> Result<Vec<Verdict>, CheckError> {
    Checker::new(case, SolveOptions::default())?.completeness(rules)
}

pub fn check_theory_harmony(case: &AssuranceCase, rules: &SemanticRuleSet) -> Result<Verdict, CheckError> {
    Checker::new(case, SolveOptions::default())?.harmony(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::{load_case, validate_case, DefeaterStatus};
    use crate::engine::check_constraints;
    use crate::logic::parse_literal;

    fn fixture(name: &str) -> AssuranceCase {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        let case = load_case(&std::fs::read(path).unwrap()).unwrap();
        assert_eq!(validate_case(&case), vec![], "{name}");
        case
    }

    fn rules(name: &str) -> SemanticRuleSet {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        parse_rule_set(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn lit(s: &str) -> Literal {
        parse_literal(s).unwrap()
    }

    #[test]
    fn resolved_safe_driver_is_indefeasible() {
        let v = check_indefeasibility(&fixture("safedriver.case.json")).unwrap();
        assert!(v.passed());
        assert!(v.justifications[0].status.holds());
    }

    #[test]
    fn unresolved_defeater_is_blamed() {
        let v = check_indefeasibility(&fixture("safedriver_unresolved.case.json")).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert!(v.blamed.contains(&lit("unresolved_defeater('D1','C13')")), "{:?}", v.blamed);
    }

    #[test]
    fn bare_root_is_indefeasible() {
        let case = load_case(br#"{"root":"C1","nodes":[{"id":"C1","kind":"claim","objects":["a"],"properties":["ok"]}]}"#)
            .unwrap();
        assert!(check_indefeasibility(&case).unwrap().passed());
    }

    #[test]
    fn arducopter_theory_application_passes() {
        let v = check_theory_application(&fixture("arducopter.case.json")).unwrap();
        assert!(v.passed(), "{:?}", v.reasons);
    }

    #[test]
    fn property_mismatch_and_undeclared_instance_are_distinct() {
        let mut case = fixture("arducopter.case.json");
        case.nodes["C102"].ope.properties = vec!["statically_checked".into()];
        let v = check_theory_application(&case).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.reasons.len(), 1);
        assert!(v.reasons[0].starts_with("property mismatch: C102"), "{}", v.reasons[0]);

        let mut case = fixture("arducopter.case.json");
        let app = case.nodes["C102"].theory_ref.as_mut().unwrap();
        app.binding.insert("SW".into(), "mystery_software".into());
        let v = check_theory_application(&case).unwrap();
        assert_eq!(v.reasons, vec!["undeclared instance: SW = mystery_software is not a declared software"]);
        assert_eq!(v.blamed, vec![lit("instance_of(mystery_software,software)")]);
    }

    #[test]
    fn binding_domain_mismatch_is_an_error() {
        let mut case = fixture("arducopter.case.json");
        case.nodes["C102"].theory_ref.as_mut().unwrap().binding.insert("Extra".into(), "x".into());
        assert!(matches!(check_theory_application(&case), Err(CheckError::BindingDomain { .. })));
    }

    #[test]
    fn train_is_inconsistent_until_a_fact_goes() {
        let r = rules("train.rules");
        let case = fixture("train.case.json");
        let v = check_consistency(&case, &r).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witnesses.len(), 1);
        assert_eq!(v.witnesses[0].to_string(), "{X = train}");

        let mut fixed = case.clone();
        fixed.nodes["C2"].relationship.mode = crate::case::Relationship::Off;
        assert!(check_consistency(&fixed, &r).unwrap().passed());
    }

    #[test]
    fn consistency_agrees_with_check_constraints_on_the_bundle() {
        let r = rules("train.rules");
        let case = fixture("train.case.json");
        let v = check_consistency(&case, &r).unwrap();
        let bundle = translate_case(&case).unwrap();
        let direct = check_constraints(&bundle.solving_program(), &r.consistency, SolveOptions::unbounded()).unwrap();
        assert_eq!(v.witnesses, direct.into_iter().map(|c| c.witness).collect::<Vec<_>>());
    }

    #[test]
    fn empty_sections_are_rejected() {
        let case = fixture("train.case.json");
        let empty = SemanticRuleSet::default();
        assert_eq!(check_consistency(&case, &empty), Err(CheckError::EmptySection(Section::Consistency)));
        assert_eq!(check_theory_harmony(&case, &empty), Err(CheckError::EmptySection(Section::Harmony)));
    }

    #[test]
    fn arducopter_is_adequate() {
        let vs = check_adequacy(&fixture("arducopter.case.json"), &rules("arducopter.rules")).unwrap();
        assert_eq!(vs.len(), 2);
        assert!(vs.iter().all(Verdict::passed));
        assert_eq!(vs[0].witnesses[0].to_string(), "{X = arducopter_software}");
    }

    fn without(case: &AssuranceCase, ids: &[&str]) -> AssuranceCase {
        let mut c = case.clone();
        for id in ids {
            c.nodes.shift_remove(*id);
        }
        c.edges.retain(|e| !ids.contains(&e.parent.as_str()) && !ids.contains(&e.child.as_str()));
        c
    }

    #[test]
    fn missing_innocuity_is_blamed() {
        let case = without(&fixture("arducopter.case.json"), &["C33", "E33"]);
        let vs = check_adequacy(&case, &rules("arducopter.rules")).unwrap();
        assert_eq!(vs[0].status, Status::Fail);
        assert_eq!(vs[0].blamed, vec![lit("is_innocuous(arducopter_software)")]);
        assert!(vs[1].passed());
    }

    #[test]
    fn missing_coverage_property_is_named() {
        let mut case = fixture("arducopter.case.json");
        case.nodes["C100"].ope.properties.retain(|p| p != "requirementsbased_testcases_passed");
        let vs = check_adequacy(&case, &rules("arducopter.rules")).unwrap();
        assert_eq!(vs[1].blamed, vec![lit("requirementsbased_testcases_passed(arducopter_software)")]);
    }

    #[test]
    fn security_assessment_is_incomplete() {
        let r = rules("arducopter.rules");
        let mut case = fixture("arducopter.case.json");
        let vs = check_completeness(&case, &r).unwrap();
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].status, Status::Fail);
        assert_eq!(vs[0].witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(), vec!["{X = security_assessment}"]);
        assert_eq!(vs[0].blamed, vec![lit("process_complete(security_assessment)")]);

        case.nodes["C34"].ope.objects.push("security_assessment".into());
        assert!(check_completeness(&case, &r).unwrap()[0].passed());
    }

    #[test]
    fn completeness_over_empty_type_is_vacuous_and_unknown_type_errors() {
        let mut case = fixture("arducopter.case.json");
        case.vocabulary.instances.retain(|(_, t)| t != "assessment");
        assert!(check_completeness(&case, &rules("arducopter.rules")).unwrap()[0].passed());
        case.vocabulary.object_types.remove("assessment");
        assert!(matches!(
            check_completeness(&case, &rules("arducopter.rules")),
            Err(CheckError::UndeclaredType { .. })
        ));
    }

    #[test]
    fn dal_theories_clash_only_on_a_shared_object() {
        let r = rules("dal.rules");
        let v = check_theory_harmony(&fixture("dal_same.case.json"), &r).unwrap();
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.witnesses.len(), 1);
        assert!(check_theory_harmony(&fixture("dal_disjoint.case.json"), &r).unwrap().passed());
    }

    #[test]
    fn single_theory_is_harmonious() {
        let case = without(&fixture("dal_same.case.json"), &["C3", "T2"]);
        assert!(check_theory_harmony(&case, &rules("dal.rules")).unwrap().passed());
    }

    #[test]
    fn run_requires_rules_for_rule_driven_checks() {
        let case = fixture("arducopter.case.json");
        let c = Checker::new(&case, SolveOptions::default()).unwrap();
        assert_eq!(c.run(&[CheckName::Adequacy], None), Err(CheckError::MissingRules(CheckName::Adequacy)));
        let all = c.run(&CheckName::ALL, Some(&rules("arducopter.rules"))).unwrap();
        let failed: Vec<String> = all.iter().filter(|v| !v.passed()).map(Verdict::title).collect();
        assert_eq!(failed, vec!["completeness: assessments_complete"]);
    }

    #[test]
    fn resolving_the_defeater_flips_only_indefeasibility() {
        let r = rules("arducopter.rules");
        let mut case = fixture("arducopter.case.json");
        let run = |c: &AssuranceCase| -> Vec<bool> {
            Checker::new(c, SolveOptions::default()).unwrap().run(&CheckName::ALL, Some(&r)).unwrap().iter().map(Verdict::passed).collect()
        };
        let resolved = run(&case);
        case.nodes["D103"].defeater_status = Some(DefeaterStatus::Unresolved);
        let unresolved = run(&case);
        assert!(resolved[0] && !unresolved[0]);
        assert_eq!(resolved[1..], unresolved[1..]);
    }

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
        }
        assert_eq!("bogus".parse::<CheckName>(), Err(CheckError::UnknownCheck("bogus".into())));
    }
}
