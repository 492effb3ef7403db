//! JSON case document: reading, linking and writing.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::model::{
    AssuranceCase, DefeaterStatus, Edge, EvidenceArtifact, Node, NodeKind, OpeTriple,
    RelationshipMode, TheoryApplication, Vocabulary,
};
use super::CaseError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseDocument {
    nodes: Vec<NodeDocument>,
    #[serde(default)]
    edges: Vec<Edge>,
    root: String,
    #[serde(default)]
    vocabulary: VocabularyDocument,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDocument {
    id: String,
    kind: NodeKind,
    #[serde(default)]
    description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    properties: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    environments: Vec<String>,
    #[serde(default, skip_serializing_if = "is_default_relationship")]
    relationship: RelationshipMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    artefact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uri: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    justification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    defeats: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    defeater_status: Option<DefeaterStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theory_ref: Option<TheoryApplication>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    variable_types: BTreeMap<String, String>,
}

fn is_default_relationship(r: &RelationshipMode) -> bool {
    *r == RelationshipMode::default()
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabularyDocument {
    #[serde(default)]
    types: Vec<String>,
    #[serde(default)]
    instances: Vec<InstanceDocument>,
    #[serde(default)]
    properties: Vec<String>,
    #[serde(default)]
    environments: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocument {
    atom: String,
    #[serde(rename = "type")]
    ty: String,
}

/// Parses and links a case document.
pub fn load_case(document: &[u8]) -> Result<AssuranceCase, CaseError> {
    let doc: CaseDocument = serde_json::from_slice(document).map_err(|e| CaseError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut nodes = IndexMap::new();
    for nd in doc.nodes {
        let node = node_from_document(nd)?;
        if nodes.contains_key(&node.id) {
            return Err(CaseError::DuplicateId(node.id));
        }
        nodes.insert(node.id.clone(), node);
    }

    let dangling = |from: &str, to: &str| CaseError::DanglingReference {
        from: from.to_string(),
        to: to.to_string(),
    };
    if !nodes.contains_key(&doc.root) {
        return Err(dangling("root", &doc.root));
    }
    for e in &doc.edges {
        for end in [&e.parent, &e.child] {
            if !nodes.contains_key(end) {
                return Err(dangling(&format!("edge {} -> {}", e.parent, e.child), end));
            }
        }
    }
    for n in nodes.values() {
        if let Some(t) = &n.defeats {
            if !nodes.contains_key(t) {
                return Err(dangling(&n.id, t));
            }
        }
        if let Some(app) = &n.theory_ref {
            if !nodes.contains_key(&app.theory_id) {
                return Err(dangling(&n.id, &app.theory_id));
            }
            for (a, t) in &app.node_correspondence {
                for end in [a, t] {
                    if !nodes.contains_key(end) {
                        return Err(dangling(&n.id, end));
                    }
                }
            }
        }
    }

    let vocabulary = Vocabulary {
        object_types: doc.vocabulary.types.into_iter().collect(),
        instances: doc.vocabulary.instances.into_iter().map(|i| (i.atom, i.ty)).collect(),
        global_properties: doc.vocabulary.properties.into_iter().collect(),
        global_environments: doc.vocabulary.environments.into_iter().collect(),
    };

    Ok(AssuranceCase { nodes, edges: doc.edges, root: doc.root, vocabulary })
}

fn node_from_document(nd: NodeDocument) -> Result<Node, CaseError> {
    if nd.kind == NodeKind::Defeater && nd.defeats.is_none() {
        return Err(CaseError::DefeaterWithoutTarget(nd.id));
    }
    let evidence_artifact = match (nd.artefact, nd.uri) {
        (None, None) => None,
        (artefact, uri) => Some(EvidenceArtifact {
            artefact: artefact.unwrap_or_default(),
            uri: uri.unwrap_or_default(),
        }),
    };
    Ok(Node {
        id: nd.id,
        kind: nd.kind,
        description: nd.description,
        ope: OpeTriple {
            objects: nd.objects,
            properties: nd.properties,
            environments: nd.environments,
        },
        relationship: nd.relationship,
        evidence_artifact,
        justification_text: nd.justification,
        defeats: nd.defeats,
        defeater_status: nd.defeater_status,
        theory_ref: nd.theory_ref,
        variable_types: nd.variable_types,
    })
}

/// Serializes a case back into the document format.
pub fn case_to_json(case: &AssuranceCase) -> String {
    let doc = CaseDocument {
        nodes: case.nodes.values().map(node_to_document).collect(),
        edges: case.edges.clone(),
        root: case.root.clone(),
        vocabulary: VocabularyDocument {
            types: case.vocabulary.object_types.iter().cloned().collect(),
            instances: case
                .vocabulary
                .instances
                .iter()
                .map(|(atom, ty)| InstanceDocument { atom: atom.clone(), ty: ty.clone() })
                .collect(),
            properties: case.vocabulary.global_properties.iter().cloned().collect(),
            environments: case.vocabulary.global_environments.iter().cloned().collect(),
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("case document serializes");
    out.push('\n');
    out
}

fn node_to_document(n: &Node) -> NodeDocument {
    NodeDocument {
        id: n.id.clone(),
        kind: n.kind,
        description: n.description.clone(),
        objects: n.ope.objects.clone(),
        properties: n.ope.properties.clone(),
        environments: n.ope.environments.clone(),
        relationship: n.relationship,
        artefact: n.evidence_artifact.as_ref().map(|a| a.artefact.clone()),
        uri: n.evidence_artifact.as_ref().map(|a| a.uri.clone()),
        justification: n.justification_text.clone(),
        defeats: n.defeats.clone(),
        defeater_status: n.defeater_status,
        theory_ref: n.theory_ref.clone(),
        variable_types: n.variable_types.clone(),
    }
}
