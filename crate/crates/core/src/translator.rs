//! Translation of an assurance case into logic programs.
//!
//! Every claim-like node becomes a statement rule (`claimStmt`,
//! `evidenceStmt`, `side_ClaimStmt` or `defeater`) whose body lists the
//! statements of its children followed by the node's claim predicate
//! `claim(App, [O], [P], [E])`. Arguments are transparent.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexSet;
use thiserror::Error;

use crate::case::{
    AssuranceCase, Node, NodeKind, Relationship, TheoryApplication, APPLICATION_VARIABLE,
};
use crate::logic::{is_variable_name, BodyElement, Literal, Program, Query, Rule, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("positional relationship on {node} pairs {objects} objects with {properties} properties")]
    PositionalArity { node: String, objects: usize, properties: usize },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("theory_ref on {node} does not name a theory root: {target}")]
    NotATheory { node: String, target: String },
    #[error("unbound theory variable {0}")]
    UnboundVariable(String),
    #[error("binding maps {variable} to non-atom {value}")]
    NonAtomBinding { variable: String, value: String },
}

/// The five program files exported from one case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportBundle {
    pub core: Program,
    pub positive_query: Query,
    pub negative_query: Query,
    pub theories: Program,
    pub defeater_constraints: Program,
}

/// File suffixes of the bundle parts, in [`ExportBundle::files`] order.
pub const EXPORT_SUFFIXES: [&str; 5] =
    ["rules.lp", "query.lp", "nquery.lp", "theories.lp", "defeaters.lp"];

impl ExportBundle {
    /// Rendered file contents keyed by suffix.
    pub fn files(&self) -> [(&'static str, String); 5] {
        [
            (EXPORT_SUFFIXES[0], self.core.to_string()),
            (EXPORT_SUFFIXES[1], format!("{}\n", self.positive_query)),
            (EXPORT_SUFFIXES[2], format!("{}\n", self.negative_query)),
            (EXPORT_SUFFIXES[3], self.theories.to_string()),
            (EXPORT_SUFFIXES[4], self.defeater_constraints.to_string()),
        ]
    }

    /// Rules of all parts plus both queries, as one program.
    pub fn combined(&self) -> Program {
        let mut p = Program::concat([&self.core, &self.theories, &self.defeater_constraints]);
        p.queries.push(self.positive_query.clone());
        p.queries.push(self.negative_query.clone());
        p
    }

    /// The program checks are solved against: core rules plus theory templates.
    pub fn solving_program(&self) -> Program {
        Program::concat([&self.core, &self.theories])
    }
}

/// Output of [`instantiate_theory`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryInstance {
    pub tag: Term,
    /// Root claim predicate of the instance.
    pub head: Literal,
    pub rules: Vec<Rule>,
    /// `(application node, theory node)` pairs left for the checks.
    pub obligations: Vec<(String, String)>,
}

pub fn application_none() -> Term {
    Term::compound("application", vec![Term::atom("none")])
}

pub fn application_instance(k: usize) -> Term {
    Term::compound("application", vec![Term::atom(format!("instance_{k}"))])
}

fn application_variable() -> Term {
    Term::var(APPLICATION_VARIABLE)
}

fn call(l: Literal) -> BodyElement {
    BodyElement::Call(l)
}

fn defeated(id: &str) -> Literal {
    Literal::new("defeated", vec![Term::atom(id)])
}

/// `claim(App, [O], [P], [E])` and its property literals. Identifiers that
/// look like variables stay variables.
pub fn expand_claim_predicate(
    node: &Node,
    app: &Term,
) -> Result<(Literal, Vec<Literal>), TranslateError> {
    let scope = Scope { app: app.clone(), binding: None };
    scope.claim_predicate(node)
}

/// How identifiers and the application tag are rendered.
struct Scope<'a> {
    app: Term,
    binding: Option<&'a BTreeMap<String, String>>,
}

impl Scope<'_> {
    fn ident(&self, s: &str) -> Result<Term, TranslateError> {
        if !is_variable_name(s) {
            return Ok(Term::atom(s));
        }
        match self.binding {
            None => Ok(Term::var(s)),
            Some(b) => match b.get(s) {
                Some(v) if is_variable_name(v) || v.is_empty() => Err(
                    TranslateError::NonAtomBinding { variable: s.to_string(), value: v.clone() },
                ),
                Some(v) => Ok(Term::atom(v.as_str())),
                None => Err(TranslateError::UnboundVariable(s.to_string())),
            },
        }
    }

    fn idents(&self, xs: &[String]) -> Result<Vec<Term>, TranslateError> {
        xs.iter().map(|x| self.ident(x)).collect()
    }

    fn claim_predicate(&self, node: &Node) -> Result<(Literal, Vec<Literal>), TranslateError> {
        let objects = self.idents(&node.ope.objects)?;
        let envs = self.idents(&node.ope.environments)?;
        let props = &node.ope.properties;
        let head = Literal::new(
            "claim",
            vec![
                self.app.clone(),
                Term::List(objects.clone()),
                Term::List(props.iter().map(|p| Term::atom(p.as_str())).collect()),
                Term::List(envs.clone()),
            ],
        );
        let tail: &[Term] = if node.relationship.include_environment { &envs } else { &[] };
        let with_env = |mut args: Vec<Term>| {
            args.extend(tail.iter().cloned());
            args
        };
        let list = match node.relationship.mode {
            Relationship::Off => Vec::new(),
            Relationship::Joint => props
                .iter()
                .map(|p| Literal::new(p.as_str(), with_env(objects.clone())))
                .collect(),
            Relationship::Positional => {
                if objects.len() != props.len() {
                    return Err(TranslateError::PositionalArity {
                        node: node.id.clone(),
                        objects: objects.len(),
                        properties: props.len(),
                    });
                }
                props
                    .iter()
                    .zip(&objects)
                    .map(|(p, o)| Literal::new(p.as_str(), with_env(vec![o.clone()])))
                    .collect()
            }
            Relationship::Distributive => props
                .iter()
                .flat_map(|p| {
                    objects.iter().map(|o| Literal::new(p.as_str(), with_env(vec![o.clone()])))
                })
                .collect(),
        };
        Ok((head, list))
    }
}

/// Predicate name and arity of the statement a node kind exports, if any.
pub fn statement_predicate(kind: NodeKind) -> Option<(&'static str, usize)> {
    match kind {
        NodeKind::Claim | NodeKind::TheoryClaim => Some(("claimStmt", 4)),
        NodeKind::Evidence => Some(("evidenceStmt", 5)),
        NodeKind::SideClaim => Some(("side_ClaimStmt", 4)),
        NodeKind::Defeater => Some(("defeater", 5)),
        NodeKind::Argument => None,
    }
}

struct Translator<'a> {
    case: &'a AssuranceCase,
    scope: Scope<'a>,
    /// Theory templates: no ground facts, application tag left open.
    template: bool,
}

impl<'a> Translator<'a> {
    fn node(&self, id: &str) -> Result<&'a Node, TranslateError> {
        self.case.node(id).ok_or_else(|| TranslateError::UnknownNode(id.to_string()))
    }

    fn statement(&self, node: &Node) -> Result<Option<Literal>, TranslateError> {
        let Some((pred, _)) = statement_predicate(node.kind) else {
            return Ok(None);
        };
        let (head, _) = self.scope.claim_predicate(node)?;
        let id = Term::atom(node.id.as_str());
        let app = self.scope.app.clone();
        let text = |s: Option<&str>| Term::atom(s.unwrap_or_default());
        let args = match node.kind {
            NodeKind::Evidence => {
                let art = node.evidence_artifact.as_ref();
                vec![
                    id,
                    app,
                    head.as_term(),
                    text(art.map(|a| a.artefact.as_str())),
                    text(art.map(|a| a.uri.as_str())),
                ]
            }
            NodeKind::SideClaim => {
                vec![id, app, head.as_term(), text(node.justification_text.as_deref())]
            }
            NodeKind::Defeater => {
                let target = node.defeats.as_deref().unwrap_or_default();
                vec![
                    id,
                    app,
                    Term::compound("defeats", vec![Term::atom(target)]),
                    head.as_term(),
                    Term::atom(node.description.as_str()),
                ]
            }
            _ => vec![id, app, head.as_term(), Term::atom(node.description.as_str())],
        };
        Ok(Some(Literal::new(pred, args)))
    }

    /// Child statements in edge order, looking through arguments. A defeated
    /// argument contributes its guard.
    fn child_body(&self, id: &str) -> Result<Vec<BodyElement>, TranslateError> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        self.collect_children(id, &mut out, &mut seen)?;
        Ok(out)
    }

    fn collect_children(
        &self,
        id: &str,
        out: &mut Vec<BodyElement>,
        seen: &mut BTreeSet<String>,
    ) -> Result<(), TranslateError> {
        for child in self.case.structural_children(id) {
            if !seen.insert(child.to_string()) {
                continue;
            }
            let node = self.node(child)?;
            if node.kind == NodeKind::Argument {
                if self.case.is_defeat_target(child) {
                    out.push(BodyElement::Naf(defeated(child)));
                }
                self.collect_children(child, out, seen)?;
            } else if let Some(stmt) = self.statement(node)? {
                out.push(call(stmt));
            }
        }
        Ok(())
    }

    fn theory_literal(&self, node: &Node) -> Result<Option<Literal>, TranslateError> {
        let Some(app) = &node.theory_ref else {
            return Ok(None);
        };
        let inst = instantiate_at(node, app, self.case)?;
        Ok(Some(Literal::new(
            "theory",
            vec![Term::atom(app.theory_id.as_str()), inst.tag, inst.head.as_term()],
        )))
    }

    fn node_rules(&self, node: &Node) -> Result<Vec<Rule>, TranslateError> {
        let mut rules = Vec::new();
        let (head, props) = self.scope.claim_predicate(node)?;
        if let Some(stmt) = self.statement(node)? {
            let mut body = self.child_body(&node.id)?;
            if self.case.is_defeat_target(&node.id) {
                body.push(BodyElement::Naf(defeated(&node.id)));
            }
            body.push(call(head.clone()));
            if let Some(t) = self.theory_literal(node)? {
                body.push(call(t));
            }
            rules.push(Rule::new(stmt, body));
        }
        if self.template {
            return Ok(rules);
        }
        if node.kind != NodeKind::Argument {
            if props.is_empty() {
                rules.push(Rule::fact(head));
            } else {
                rules.push(Rule::new(head, props.iter().cloned().map(call).collect()));
                rules.extend(props.into_iter().map(Rule::fact));
            }
        }
        if node.is_unresolved_defeater() {
            if let Some(target) = &node.defeats {
                rules.push(Rule::fact(Literal::new(
                    "unresolved_defeater",
                    vec![Term::atom(node.id.as_str()), Term::atom(target.as_str())],
                )));
            }
        }
        Ok(rules)
    }

    /// `theory(TID, App, RootHead) :- <children>, RootHead.`
    fn theory_rule(&self, root: &Node) -> Result<Rule, TranslateError> {
        let (head, _) = self.scope.claim_predicate(root)?;
        let mut body = self.child_body(&root.id)?;
        body.push(call(head.clone()));
        Ok(Rule::new(
            Literal::new(
                "theory",
                vec![Term::atom(root.id.as_str()), self.scope.app.clone(), head.as_term()],
            ),
            body,
        ))
    }

    fn subtree_rules(&self, root: &str) -> Result<Vec<Rule>, TranslateError> {
        let mut rules = Vec::new();
        for id in self.case.subtree(root) {
            rules.extend(self.node_rules(self.node(id)?)?);
        }
        Ok(rules)
    }
}

/// Rules exported for one node under the base application tag.
pub fn translate_node(node: &Node, case: &AssuranceCase) -> Result<Vec<Rule>, TranslateError> {
    let t = Translator {
        case,
        scope: Scope { app: application_none(), binding: None },
        template: false,
    };
    t.node_rules(node)
}

fn defeated_rule() -> Rule {
    let (d, n) = (Term::var("D"), Term::var("N"));
    Rule::new(
        Literal::new("defeated", vec![n.clone()]),
        vec![call(Literal::new("unresolved_defeater", vec![d, n]))],
    )
}

/// The statement-bearing node a defeater constraint refers to: the target
/// itself, or the nearest structural ancestor of an argument.
fn constraint_subject<'a>(case: &'a AssuranceCase, target: &'a str) -> Option<&'a Node> {
    let mut id = target;
    let mut seen = BTreeSet::new();
    loop {
        let node = case.node(id)?;
        if statement_predicate(node.kind).is_some() {
            return Some(node);
        }
        if !seen.insert(id) {
            return None;
        }
        id = case
            .edges
            .iter()
            .find(|e| e.child == id && e.kind.is_structural())
            .map(|e| e.parent.as_str())?;
    }
}

pub fn translate_case(case: &AssuranceCase) -> Result<ExportBundle, TranslateError> {
    let root = case.root_node().ok_or_else(|| TranslateError::UnknownNode(case.root.clone()))?;
    let base = Translator {
        case,
        scope: Scope { app: application_none(), binding: None },
        template: false,
    };

    let mut core: IndexSet<Rule> = IndexSet::new();
    if case.nodes.values().any(|n| n.kind == NodeKind::Defeater) {
        core.insert(defeated_rule());
    }
    core.extend(base.subtree_rules(&case.root)?);
    for (node, app) in case.applications() {
        core.extend(instantiate_at(node, app, case)?.rules);
    }

    let template = Translator {
        case,
        scope: Scope { app: application_variable(), binding: None },
        template: true,
    };
    let mut theories: IndexSet<Rule> = IndexSet::new();
    for t in case.theory_roots() {
        theories.extend(template.subtree_rules(t)?);
        theories.insert(template.theory_rule(base.node(t)?)?);
    }

    let (root_head, _) = base.scope.claim_predicate(root)?;
    let positive = Literal::new(
        "claimStmt",
        vec![Term::atom(root.id.as_str()), application_none(), root_head.as_term(), Term::var("_")],
    );
    let positive_query = Query::single(positive.clone());
    let negative_query = Query::new(vec![BodyElement::Naf(positive)]);

    let mut defeater_constraints = Vec::new();
    for d in case.nodes.values().filter(|n| n.kind == NodeKind::Defeater) {
        let Some(target) = d.defeats.as_deref() else { continue };
        let Some(subject) = constraint_subject(case, target) else { continue };
        let (pred, arity) = statement_predicate(subject.kind).expect("statement node");
        let mut args = vec![Term::atom(subject.id.as_str())];
        args.extend((1..arity).map(|_| Term::var("_")));
        defeater_constraints.push(Rule::constraint(vec![
            call(Literal::new(pred, args)),
            call(Literal::new(
                "unresolved_defeater",
                vec![Term::atom(d.id.as_str()), Term::atom(target)],
            )),
        ]));
    }

    Ok(ExportBundle {
        core: Program::new(core.into_iter().collect()),
        positive_query,
        negative_query,
        theories: Program::new(theories.into_iter().collect()),
        defeater_constraints: Program::new(defeater_constraints),
    })
}

/// Instance tag of an application: `instance_k`, numbered in document order.
fn instance_number(case: &AssuranceCase, node_id: &str) -> usize {
    case.applications().position(|(n, _)| n.id == node_id).map_or(1, |i| i + 1)
}

fn instantiate_at(
    node: &Node,
    app: &TheoryApplication,
    case: &AssuranceCase,
) -> Result<TheoryInstance, TranslateError> {
    instantiate_tagged(&app.theory_id, app, case, application_instance(instance_number(case, &node.id)))
}

/// Ground rules of a theory subtree under an application's binding. The
/// instance tag is that of the first node carrying `app`.
pub fn instantiate_theory(
    theory_root: &str,
    app: &TheoryApplication,
    case: &AssuranceCase,
) -> Result<TheoryInstance, TranslateError> {
    let k = case.applications().position(|(_, a)| a == app).map_or(1, |i| i + 1);
    instantiate_tagged(theory_root, app, case, application_instance(k))
}

fn instantiate_tagged(
    theory_root: &str,
    app: &TheoryApplication,
    case: &AssuranceCase,
    tag: Term,
) -> Result<TheoryInstance, TranslateError> {
    let root = case.node(theory_root).ok_or_else(|| TranslateError::UnknownNode(theory_root.to_string()))?;
    if root.kind != NodeKind::TheoryClaim || !case.theory_roots().contains(&theory_root) {
        let holder = case
            .applications()
            .find(|(_, a)| *a == app)
            .map_or_else(String::new, |(n, _)| n.id.clone());
        return Err(TranslateError::NotATheory { node: holder, target: theory_root.to_string() });
    }
    for var in case.theory_variables(theory_root) {
        if !app.binding.contains_key(&var) {
            return Err(TranslateError::UnboundVariable(var));
        }
    }
    let t = Translator {
        case,
        scope: Scope { app: tag.clone(), binding: Some(&app.binding) },
        template: false,
    };
    let mut rules = t.subtree_rules(theory_root)?;
    rules.push(t.theory_rule(root)?);
    let (head, _) = t.scope.claim_predicate(root)?;
    Ok(TheoryInstance {
        tag,
        head,
        rules,
        obligations: app
            .node_correspondence
            .iter()
            .map(|(a, th)| (a.clone(), th.clone()))
            .collect(),
    })
}
