use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Claim,
    Evidence,
    SideClaim,
    Argument,
    Defeater,
    TheoryClaim,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Claim => "claim",
            NodeKind::Evidence => "evidence",
            NodeKind::SideClaim => "side_claim",
            NodeKind::Argument => "argument",
            NodeKind::Defeater => "defeater",
            NodeKind::TheoryClaim => "theory_claim",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Supports,
    SideSupports,
    Defeats,
    AppliesTheory,
}

impl EdgeKind {
    /// Edges that carry support: everything except `defeats`.
    pub fn is_support(self) -> bool {
        !matches!(self, EdgeKind::Defeats)
    }

    /// Edges whose child contributes a statement to its parent's rule body.
    pub fn is_structural(self) -> bool {
        matches!(self, EdgeKind::Supports | EdgeKind::SideSupports)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relationship {
    #[default]
    Off,
    Joint,
    Positional,
    Distributive,
}

/// How a node's properties apply to its objects when expanding the claim
/// predicate into property literals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationshipMode {
    #[serde(default)]
    pub mode: Relationship,
    #[serde(default)]
    pub include_environment: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefeaterStatus {
    Unresolved,
    Resolved,
}

/// "Object O satisfies property P in environment E."
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpeTriple {
    pub objects: Vec<String>,
    pub properties: Vec<String>,
    pub environments: Vec<String>,
}

impl OpeTriple {
    pub fn new<S: Into<String>>(
        objects: impl IntoIterator<Item = S>,
        properties: impl IntoIterator<Item = S>,
        environments: impl IntoIterator<Item = S>,
    ) -> Self {
        OpeTriple {
            objects: objects.into_iter().map(Into::into).collect(),
            properties: properties.into_iter().map(Into::into).collect(),
            environments: environments.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.properties.is_empty() && self.environments.is_empty()
    }

    pub fn identifiers(&self) -> impl Iterator<Item = &String> {
        self.objects.iter().chain(&self.properties).chain(&self.environments)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvidenceArtifact {
    pub artefact: String,
    pub uri: String,
}

/// Instantiation of a theory subtree at a concrete claim.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryApplication {
    pub theory_id: String,
    #[serde(default)]
    pub binding: BTreeMap<String, String>,
    #[serde(default)]
    pub node_correspondence: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub description: String,
    pub ope: OpeTriple,
    pub relationship: RelationshipMode,
    pub evidence_artifact: Option<EvidenceArtifact>,
    pub justification_text: Option<String>,
    pub defeats: Option<String>,
    pub defeater_status: Option<DefeaterStatus>,
    pub theory_ref: Option<TheoryApplication>,
    /// Declared type of each variable, on theory roots.
    pub variable_types: BTreeMap<String, String>,
}

impl Node {
    /// A bare node of the given kind with no OPE triple.
    pub fn new(id: impl Into<String>, kind: NodeKind, description: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            kind,
            description: description.into(),
            ope: OpeTriple::default(),
            relationship: RelationshipMode::default(),
            evidence_artifact: None,
            justification_text: None,
            defeats: None,
            defeater_status: None,
            theory_ref: None,
            variable_types: BTreeMap::new(),
        }
    }

    pub fn with_ope(mut self, ope: OpeTriple) -> Self {
        self.ope = ope;
        self
    }

    pub fn is_unresolved_defeater(&self) -> bool {
        self.kind == NodeKind::Defeater && self.defeater_status == Some(DefeaterStatus::Unresolved)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub parent: String,
    pub child: String,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn new(parent: impl Into<String>, child: impl Into<String>, kind: EdgeKind) -> Self {
        Edge { parent: parent.into(), child: child.into(), kind }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub object_types: BTreeSet<String>,
    /// `(atom, type)` pairs.
    pub instances: BTreeSet<(String, String)>,
    pub global_properties: BTreeSet<String>,
    pub global_environments: BTreeSet<String>,
}

impl Vocabulary {
    pub fn is_empty(&self) -> bool {
        self.object_types.is_empty()
            && self.instances.is_empty()
            && self.global_properties.is_empty()
            && self.global_environments.is_empty()
    }

    pub fn instances_of<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.instances.iter().filter(move |(_, t)| t == ty).map(|(a, _)| a.as_str())
    }

    pub fn is_instance(&self, atom: &str, ty: &str) -> bool {
        self.instances.contains(&(atom.to_string(), ty.to_string()))
    }
}

/// A claims-arguments-evidence case: nodes in document order, edges in
/// declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssuranceCase {
    pub nodes: IndexMap<String, Node>,
    pub edges: Vec<Edge>,
    pub root: String,
    pub vocabulary: Vocabulary,
}

impl AssuranceCase {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn root_node(&self) -> Option<&Node> {
        self.nodes.get(&self.root)
    }

    /// Direct children through `supports` and `side-supports`, in edge order.
    pub fn structural_children(&self, id: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|e| e.parent == id && e.kind.is_structural())
            .map(|e| e.child.as_str())
            .collect()
    }

    /// Children whose statements appear in this node's rule body: arguments
    /// are transparent and replaced by their own children.
    pub fn statement_children(&self, id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        self.collect_statement_children(id, &mut out, &mut seen);
        out
    }

    fn collect_statement_children<'a>(
        &'a self,
        id: &str,
        out: &mut Vec<&'a str>,
        seen: &mut BTreeSet<&'a str>,
    ) {
        for child in self.structural_children(id) {
            match self.nodes.get(child).map(|n| n.kind) {
                Some(NodeKind::Argument) => {
                    if seen.insert(child) {
                        self.collect_statement_children(child, out, seen);
                    }
                }
                Some(_) if !out.contains(&child) => out.push(child),
                Some(_) => {}
                None => {}
            }
        }
    }

    /// Defeater nodes targeting `id`, in document order.
    pub fn defeaters_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Node> + 'a {
        self.nodes
            .values()
            .filter(move |n| n.kind == NodeKind::Defeater && n.defeats.as_deref() == Some(id))
    }

    pub fn is_defeat_target(&self, id: &str) -> bool {
        self.defeaters_of(id).next().is_some()
    }

    /// Theory definition roots: theory claims with no structural parent.
    pub fn theory_roots(&self) -> Vec<&str> {
        let has_parent: BTreeSet<&str> = self
            .edges
            .iter()
            .filter(|e| e.kind.is_structural())
            .map(|e| e.child.as_str())
            .collect();
        self.nodes
            .values()
            .filter(|n| n.kind == NodeKind::TheoryClaim && !has_parent.contains(n.id.as_str()))
            .map(|n| n.id.as_str())
            .collect()
    }

    /// Nodes of a subtree in depth-first preorder, following structural edges
    /// and defeaters of reached nodes.
    pub fn subtree(&self, root: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        if let Some((id, _)) = self.nodes.get_key_value(root) {
            self.preorder(id, &mut out, &mut seen);
        }
        out
    }

    fn preorder<'a>(&'a self, id: &'a str, out: &mut Vec<&'a str>, seen: &mut BTreeSet<&'a str>) {
        if !seen.insert(id) {
            return;
        }
        out.push(id);
        for child in self.structural_children(id) {
            if let Some((cid, _)) = self.nodes.get_key_value(child) {
                self.preorder(cid, out, seen);
            }
        }
        for d in self.defeaters_of(id) {
            self.preorder(&d.id, out, seen);
        }
    }

    /// All nodes belonging to some theory subtree.
    pub fn theory_nodes(&self) -> BTreeSet<&str> {
        self.theory_roots().into_iter().flat_map(|r| self.subtree(r)).collect()
    }

    /// Variables used in objects and environments of a theory subtree.
    pub fn theory_variables(&self, theory_root: &str) -> BTreeSet<String> {
        self.subtree(theory_root)
            .into_iter()
            .filter_map(|id| self.nodes.get(id))
            .flat_map(|n| n.ope.objects.iter().chain(&n.ope.environments))
            .filter(|s| crate::logic::is_variable_name(s))
            .cloned()
            .collect()
    }

    /// Nodes carrying a theory application, in document order.
    pub fn applications(&self) -> impl Iterator<Item = (&Node, &TheoryApplication)> {
        self.nodes.values().filter_map(|n| n.theory_ref.as_ref().map(|t| (n, t)))
    }
}
