use std::collections::BTreeSet;

use super::model::{AssuranceCase, Vocabulary};
use crate::logic::is_variable_name;

/// Declared vocabulary merged with the atoms the case actually uses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VocabularyView {
    pub vocabulary: Vocabulary,
    /// Object atoms used in OPE triples.
    pub objects: BTreeSet<String>,
    /// Atoms used in OPE triples but declared nowhere.
    pub undeclared: BTreeSet<String>,
}

/// Merges the declared vocabulary with every atom used by the case's nodes.
/// Variables in theory nodes are not vocabulary.
pub fn vocabulary_of(case: &AssuranceCase) -> VocabularyView {
    let declared = &case.vocabulary;
    let mut view = VocabularyView { vocabulary: declared.clone(), ..Default::default() };
    let instance_atoms: BTreeSet<&str> = declared.instances.iter().map(|(a, _)| a.as_str()).collect();

    for n in case.nodes.values() {
        for o in n.ope.objects.iter().filter(|o| !is_variable_name(o)) {
            view.objects.insert(o.clone());
            if !instance_atoms.contains(o.as_str()) {
                view.undeclared.insert(o.clone());
            }
        }
        for p in &n.ope.properties {
            if !declared.global_properties.contains(p) {
                view.undeclared.insert(p.clone());
            }
            view.vocabulary.global_properties.insert(p.clone());
        }
        for e in n.ope.environments.iter().filter(|e| !is_variable_name(e)) {
            if !declared.global_environments.contains(e) && !instance_atoms.contains(e.as_str()) {
                view.undeclared.insert(e.clone());
            }
            view.vocabulary.global_environments.insert(e.clone());
        }
    }
    view
}
