//! Structural validation of a linked case.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::model::{AssuranceCase, EdgeKind, NodeKind, Relationship};
use crate::logic::{is_plain_atom, is_variable_name};

/// Variable name reserved for the application tag in theory templates.
pub const APPLICATION_VARIABLE: &str = "App";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleViolated {
    MissingRoot,
    RootNotClaim,
    DanglingEdge,
    SupportCycle,
    Unreachable,
    DefeatsFromNonDefeater,
    DefeatsEdgeMismatch,
    DanglingReference,
    ArtefactOnlyOnEvidence,
    DefeaterFields,
    JustificationOnlyOnSideClaim,
    VariableOutsideTheory,
    InvalidIdentifier,
    PropertyNotAtom,
    PositionalArity,
    ArgumentWithOpe,
    UnknownInstanceType,
    TheoryRefTarget,
    TheoryRefOnNonClaim,
    BindingDomain,
    BindingValue,
    CorrespondenceNode,
    SharedTheoryNode,
    ReservedVariable,
}

impl RuleViolated {
    pub fn message(self) -> &'static str {
        match self {
            RuleViolated::MissingRoot => "root node does not exist",
            RuleViolated::RootNotClaim => "root is not a claim",
            RuleViolated::DanglingEdge => "edge endpoint does not exist",
            RuleViolated::SupportCycle => "cycle in support graph",
            RuleViolated::Unreachable => "node unreachable from root",
            RuleViolated::DefeatsFromNonDefeater => "defeats edge from non-defeater",
            RuleViolated::DefeatsEdgeMismatch => "defeats edge disagrees with defeater target",
            RuleViolated::DanglingReference => "reference to unknown node",
            RuleViolated::ArtefactOnlyOnEvidence => "artefact and uri present iff evidence",
            RuleViolated::DefeaterFields => "defeats and defeater_status present iff defeater",
            RuleViolated::JustificationOnlyOnSideClaim => "justification present iff side claim",
            RuleViolated::VariableOutsideTheory => "variable outside theory",
            RuleViolated::InvalidIdentifier => "identifier is neither an atom nor a variable",
            RuleViolated::PropertyNotAtom => "property must be an atom",
            RuleViolated::PositionalArity => {
                "positional relationship needs as many objects as properties"
            }
            RuleViolated::ArgumentWithOpe => "argument carries objects, properties or environments",
            RuleViolated::UnknownInstanceType => "instance of undeclared type",
            RuleViolated::TheoryRefTarget => "theory_ref does not name a theory root",
            RuleViolated::TheoryRefOnNonClaim => "theory_ref only allowed on claims",
            RuleViolated::BindingDomain => "binding domain differs from theory variables",
            RuleViolated::BindingValue => "binding value must be an atom",
            RuleViolated::CorrespondenceNode => "correspondence pairs an unexpected node",
            RuleViolated::SharedTheoryNode => "node belongs to both the case and a theory",
            RuleViolated::ReservedVariable => "variable name `App` is reserved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub node: Option<String>,
    pub rule: RuleViolated,
    pub severity: Severity,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => f.write_str("error")?,
        }
        if let Some(n) = &self.node {
            write!(f, " [{n}]")?;
        }
        write!(f, ": {}", self.rule.message())?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    fn error(&mut self, node: Option<&str>, rule: RuleViolated, detail: impl Into<String>) {
        self.0.push(Diagnostic {
            node: node.map(str::to_string),
            rule,
            severity: Severity::Error,
            detail: detail.into(),
        });
    }
}

/// Checks every case and node invariant; an empty result means the case is valid.
pub fn validate_case(case: &AssuranceCase) -> Vec<Diagnostic> {
    let mut d = Diagnostics(Vec::new());

    match case.root_node() {
        None => d.error(None, RuleViolated::MissingRoot, case.root.clone()),
        Some(r) if r.kind != NodeKind::Claim => {
            d.error(Some(&r.id), RuleViolated::RootNotClaim, r.kind.as_str())
        }
        Some(_) => {}
    }

    let mut edges_ok = true;
    for e in &case.edges {
        for end in [&e.parent, &e.child] {
            if !case.nodes.contains_key(end) {
                edges_ok = false;
                d.error(
                    Some(end),
                    RuleViolated::DanglingEdge,
                    format!("{} -> {}", e.parent, e.child),
                );
            }
        }
        if e.kind == EdgeKind::Defeats {
            match case.node(&e.parent) {
                Some(n) if n.kind != NodeKind::Defeater => {
                    d.error(Some(&e.parent), RuleViolated::DefeatsFromNonDefeater, &e.child)
                }
                Some(n) if n.defeats.as_deref() != Some(e.child.as_str()) => {
                    d.error(Some(&e.parent), RuleViolated::DefeatsEdgeMismatch, &e.child)
                }
                _ => {}
            }
        }
    }

    if edges_ok {
        check_cycles(case, &mut d);
        check_reachability(case, &mut d);
    }

    for n in case.nodes.values() {
        let id = Some(n.id.as_str());
        if n.evidence_artifact.is_some() != (n.kind == NodeKind::Evidence) {
            d.error(id, RuleViolated::ArtefactOnlyOnEvidence, n.kind.as_str());
        }
        let is_defeater = n.kind == NodeKind::Defeater;
        if (n.defeats.is_some() != is_defeater) || (n.defeater_status.is_some() != is_defeater) {
            d.error(id, RuleViolated::DefeaterFields, n.kind.as_str());
        }
        if let Some(t) = &n.defeats {
            if !case.nodes.contains_key(t) {
                d.error(id, RuleViolated::DanglingReference, t.clone());
            }
        }
        if n.justification_text.is_some() != (n.kind == NodeKind::SideClaim) {
            d.error(id, RuleViolated::JustificationOnlyOnSideClaim, n.kind.as_str());
        }
        if n.kind == NodeKind::Argument && !n.ope.is_empty() {
            d.error(id, RuleViolated::ArgumentWithOpe, "");
        }
        for ident in n.ope.objects.iter().chain(&n.ope.environments) {
            if is_variable_name(ident) {
                if n.kind != NodeKind::TheoryClaim {
                    d.error(id, RuleViolated::VariableOutsideTheory, ident.clone());
                } else if ident == APPLICATION_VARIABLE {
                    d.error(id, RuleViolated::ReservedVariable, ident.clone());
                }
            } else if !is_plain_atom(ident) {
                d.error(id, RuleViolated::InvalidIdentifier, format!("`{ident}`"));
            }
        }
        for p in &n.ope.properties {
            if !is_plain_atom(p) {
                d.error(id, RuleViolated::PropertyNotAtom, format!("`{p}`"));
            }
        }
        if n.relationship.mode == Relationship::Positional
            && n.ope.objects.len() != n.ope.properties.len()
        {
            d.error(
                id,
                RuleViolated::PositionalArity,
                format!("{} objects, {} properties", n.ope.objects.len(), n.ope.properties.len()),
            );
        }
    }

    for (atom, ty) in &case.vocabulary.instances {
        if !case.vocabulary.object_types.contains(ty) {
            d.error(None, RuleViolated::UnknownInstanceType, format!("{atom}: {ty}"));
        }
    }

    check_theories(case, &mut d);
    d.0
}

fn check_cycles(case: &AssuranceCase, d: &mut Diagnostics) {
    let mut g = DiGraph::<&str, ()>::new();
    let idx: indexmap::IndexMap<&str, _> =
        case.nodes.keys().map(|k| (k.as_str(), g.add_node(k.as_str()))).collect();
    for e in case.edges.iter().filter(|e| e.kind.is_support()) {
        g.add_edge(idx[e.parent.as_str()], idx[e.child.as_str()], ());
    }
    let mut sccs = tarjan_scc(&g);
    sccs.reverse();
    for scc in sccs {
        let self_loop = scc.len() == 1 && g.contains_edge(scc[0], scc[0]);
        if scc.len() > 1 || self_loop {
            let mut members: Vec<&str> = scc.iter().map(|&i| g[i]).collect();
            members.sort_by_key(|m| case.nodes.get_index_of(*m));
            d.error(Some(members[0]), RuleViolated::SupportCycle, members.join(" -> "));
        }
    }
}

fn check_reachability(case: &AssuranceCase, d: &mut Diagnostics) {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    if case.nodes.contains_key(&case.root) {
        queue.push_back(&case.root);
    }
    queue.extend(case.theory_roots());
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id) {
            continue;
        }
        for e in case.edges.iter().filter(|e| e.parent == id && e.kind.is_support()) {
            queue.push_back(&e.child);
        }
        for def in case.defeaters_of(id) {
            queue.push_back(&def.id);
        }
    }
    for id in case.nodes.keys() {
        if !seen.contains(id.as_str()) {
            d.error(Some(id), RuleViolated::Unreachable, "");
        }
    }
}

fn check_theories(case: &AssuranceCase, d: &mut Diagnostics) {
    let roots: BTreeSet<&str> = case.theory_roots().into_iter().collect();
    let theory_nodes = case.theory_nodes();
    if case.nodes.contains_key(&case.root) {
        for id in case.subtree(&case.root) {
            if theory_nodes.contains(id) {
                d.error(Some(id), RuleViolated::SharedTheoryNode, "");
            }
        }
    }

    for (node, app) in case.applications() {
        let id = Some(node.id.as_str());
        if node.kind != NodeKind::Claim {
            d.error(id, RuleViolated::TheoryRefOnNonClaim, node.kind.as_str());
        }
        if !roots.contains(app.theory_id.as_str()) {
            d.error(id, RuleViolated::TheoryRefTarget, app.theory_id.clone());
            continue;
        }
        let vars = case.theory_variables(&app.theory_id);
        let bound: BTreeSet<String> = app.binding.keys().cloned().collect();
        if vars != bound {
            let missing: Vec<_> = vars.difference(&bound).cloned().collect();
            let extra: Vec<_> = bound.difference(&vars).cloned().collect();
            d.error(
                id,
                RuleViolated::BindingDomain,
                format!("missing [{}], extra [{}]", missing.join(","), extra.join(",")),
            );
        }
        for (var, value) in &app.binding {
            if !is_plain_atom(value) {
                d.error(id, RuleViolated::BindingValue, format!("{var} = {value}"));
            }
        }
        let subtree: BTreeSet<&str> = case.subtree(&app.theory_id).into_iter().collect();
        for (applied, theory) in &app.node_correspondence {
            if !case.nodes.contains_key(applied)
                || theory_nodes.contains(applied.as_str())
                || !subtree.contains(theory.as_str())
            {
                d.error(id, RuleViolated::CorrespondenceNode, format!("{applied} ~ {theory}"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::model::*;
    use indexmap::IndexMap;

    fn claim(id: &str, objects: &[&str]) -> Node {
        Node::new(id, NodeKind::Claim, id).with_ope(OpeTriple::new(
            objects.iter().copied(),
            ["ok"],
            ["env"],
        ))
    }

    fn case(nodes: Vec<Node>, edges: Vec<Edge>) -> AssuranceCase {
        let root = nodes[0].id.clone();
        AssuranceCase {
            nodes: nodes.into_iter().map(|n| (n.id.clone(), n)).collect::<IndexMap<_, _>>(),
            edges,
            root,
            vocabulary: Vocabulary::default(),
        }
    }

    #[test]
    fn well_formed_case_is_clean() {
        let c = case(
            vec![claim("C1", &["sys"]), claim("C2", &["sys"])],
            vec![Edge::new("C1", "C2", EdgeKind::Supports)],
        );
        assert_eq!(validate_case(&c), vec![]);
    }

    #[test]
    fn support_cycle_reported_once() {
        let c = case(
            vec![claim("C1", &["sys"]), claim("A", &["sys"]), claim("B", &["sys"])],
            vec![
                Edge::new("C1", "A", EdgeKind::Supports),
                Edge::new("A", "B", EdgeKind::Supports),
                Edge::new("B", "A", EdgeKind::Supports),
            ],
        );
        let ds = validate_case(&c);
        assert_eq!(ds.len(), 1, "{ds:?}");
        assert_eq!(ds[0].rule, RuleViolated::SupportCycle);
        assert_eq!(ds[0].rule.message(), "cycle in support graph");
    }

    #[test]
    fn variable_outside_theory() {
        let c = case(vec![claim("C1", &["X"])], vec![]);
        let ds = validate_case(&c);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].rule.message(), "variable outside theory");
        assert_eq!(ds[0].node.as_deref(), Some("C1"));
    }

    #[test]
    fn unreachable_node() {
        let c = case(vec![claim("C1", &["a"]), claim("C2", &["a"])], vec![]);
        let ds = validate_case(&c);
        assert_eq!(ds.iter().map(|d| d.rule).collect::<Vec<_>>(), vec![RuleViolated::Unreachable]);
    }

    #[test]
    fn positional_arity() {
        let mut n = claim("C1", &["a", "b"]);
        n.relationship.mode = Relationship::Positional;
        let ds = validate_case(&case(vec![n], vec![]));
        assert_eq!(ds[0].rule, RuleViolated::PositionalArity);
    }
}
