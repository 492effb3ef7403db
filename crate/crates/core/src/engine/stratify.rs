use std::collections::{BTreeMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::logic::{BodyElement, PredicateKey, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratification {
    Stratified(BTreeMap<PredicateKey, usize>),
    /// A dependency cycle through default negation, starting at the head of
    /// the negative edge.
    NotStratified { cycle: Vec<PredicateKey> },
}

impl Stratification {
    pub fn is_stratified(&self) -> bool {
        matches!(self, Stratification::Stratified(_))
    }
}

/// Predicate dependency graph: an edge from each rule head to every body
/// predicate, weighted by whether the call is negated.
pub fn stratify(p: &Program) -> Stratification {
    let mut graph: DiGraph<PredicateKey, bool> = DiGraph::new();
    let mut index: BTreeMap<PredicateKey, NodeIndex> = BTreeMap::new();
    let mut node = |g: &mut DiGraph<PredicateKey, bool>, k: PredicateKey| {
        *index.entry(k.clone()).or_insert_with(|| g.add_node(k))
    };
    let mut negative_edges = Vec::new();
    for r in &p.rules {
        let Some(h) = &r.head else { continue };
        let hi = node(&mut graph, h.key());
        for b in &r.body {
            let bi = node(&mut graph, b.literal().key());
            let neg = matches!(b, BodyElement::Naf(_));
            graph.add_edge(hi, bi, neg);
            if neg {
                negative_edges.push((hi, bi));
            }
        }
    }
    for r in &p.rules {
        if r.head.is_none() {
            for b in &r.body {
                node(&mut graph, b.literal().key());
            }
        }
    }

    let sccs = tarjan_scc(&graph);
    let mut comp = vec![0usize; graph.node_count()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            comp[n.index()] = c;
        }
    }

    for (h, b) in negative_edges {
        if comp[h.index()] == comp[b.index()] {
            let path = path_within(&graph, &comp, b, h);
            let mut cycle = vec![graph[h].clone()];
            cycle.extend(path.iter().take_while(|&&n| n != h).map(|&n| graph[n].clone()));
            return Stratification::NotStratified { cycle };
        }
    }

    // Components come sinks first, so every callee is assigned before its caller.
    let mut level = vec![0usize; sccs.len()];
    for (c, members) in sccs.iter().enumerate() {
        let mut l = 0;
        for &n in members {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                let t = comp[e.target().index()];
                if t != c {
                    l = l.max(level[t] + usize::from(*e.weight()));
                }
            }
        }
        level[c] = l;
    }
    Stratification::Stratified(
        graph.node_indices().map(|n| (graph[n].clone(), level[comp[n.index()]])).collect(),
    )
}

/// Shortest path from `from` to `to` staying inside their component.
fn path_within(
    g: &DiGraph<PredicateKey, bool>,
    comp: &[usize],
    from: NodeIndex,
    to: NodeIndex,
) -> Vec<NodeIndex> {
    let c = comp[from.index()];
    let mut prev: BTreeMap<NodeIndex, NodeIndex> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; g.node_count()];
    seen[from.index()] = true;
    while let Some(n) = queue.pop_front() {
        if n == to {
            break;
        }
        for m in g.neighbors(n) {
            if comp[m.index()] == c && !seen[m.index()] {
                seen[m.index()] = true;
                prev.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        match prev.get(&cur) {
            Some(&p) => {
                path.push(p);
                cur = p;
            }
            None => break,
        }
    }
    path.reverse();
    path
}
