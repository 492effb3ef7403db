use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::logic::{unify_literals, BodyElement, Literal, Program, Substitution, Term};

/// What a justification node is about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    Literal(Literal),
    Naf(Literal),
    /// A conjunctive query of more than one element.
    Query(Vec<BodyElement>),
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Literal(l) => write!(f, "{l}"),
            Goal::Naf(l) => write!(f, "not {l}"),
            Goal::Query(body) => {
                for (i, b) in body.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{b}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Proved,
    Failed,
    NafHolds,
    NafFails,
}

impl NodeStatus {
    /// True for nodes that hold: proved goals and successful negations.
    pub fn holds(self) -> bool {
        matches!(self, NodeStatus::Proved | NodeStatus::NafHolds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailReason {
    NoMatchingClause,
    /// The call was a variant of one of its ancestors.
    Loop,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailReason::NoMatchingClause => "no matching clause",
            FailReason::Loop => "loop",
        })
    }
}

/// Proof or failure explanation.
///
/// A proved literal's children are its rule body's subproofs in source
/// order. A failed literal's children hold, per applicable rule, the first
/// body element that failed. A negation node has one child: the failure
/// tree of its literal when it holds, the proof when it does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JustificationTree {
    pub goal: Goal,
    pub status: NodeStatus,
    /// Index of the program rule used at this node.
    pub rule_used: Option<usize>,
    pub reason: Option<FailReason>,
    /// Shared, so that cloning a tree is cheap.
    pub children: Arc<Vec<JustificationTree>>,
}

/// Runs `f` with enough stack for one more level of tree recursion.
pub(crate) fn guarded<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, f)
}

impl Drop for JustificationTree {
    // Iterative, so very deep proofs do not exhaust the stack.
    fn drop(&mut self) {
        let mut pending = Arc::try_unwrap(std::mem::take(&mut self.children)).unwrap_or_default();
        while let Some(mut n) = pending.pop() {
            if let Ok(children) = Arc::try_unwrap(std::mem::take(&mut n.children)) {
                pending.extend(children);
            }
        }
    }
}

impl JustificationTree {
    pub fn proved(lit: Literal, rule: Option<usize>, children: Vec<JustificationTree>) -> Self {
        JustificationTree {
            goal: Goal::Literal(lit),
            status: NodeStatus::Proved,
            rule_used: rule,
            reason: None,
            children: Arc::new(children),
        }
    }

    pub fn failed(lit: Literal, reason: Option<FailReason>, children: Vec<JustificationTree>) -> Self {
        JustificationTree {
            goal: Goal::Literal(lit),
            status: NodeStatus::Failed,
            rule_used: None,
            reason,
            children: Arc::new(children),
        }
    }

    pub fn negation(lit: Literal, holds: bool, child: JustificationTree) -> Self {
        JustificationTree {
            goal: Goal::Naf(lit),
            status: if holds { NodeStatus::NafHolds } else { NodeStatus::NafFails },
            rule_used: None,
            reason: None,
            children: Arc::new(vec![child]),
        }
    }

    pub fn node_count(&self) -> usize {
        guarded(|| 1 + self.children.iter().map(JustificationTree::node_count).sum::<usize>())
    }

    pub fn depth(&self) -> usize {
        guarded(|| 1 + self.children.iter().map(JustificationTree::depth).max().unwrap_or(0))
    }

    pub fn literal(&self) -> Option<&Literal> {
        match &self.goal {
            Goal::Literal(l) | Goal::Naf(l) => Some(l),
            Goal::Query(_) => None,
        }
    }

    /// Ground literals proved positively, not looking inside negations.
    pub fn proved_literals(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        self.collect_proved(&mut out);
        out
    }

    fn collect_proved(&self, out: &mut BTreeSet<Literal>) {
        guarded(|| self.collect_proved_here(out))
    }

    fn collect_proved_here(&self, out: &mut BTreeSet<Literal>) {
        match (&self.goal, self.status) {
            (Goal::Literal(l), NodeStatus::Proved) => {
                if l.is_ground() && !is_builtin_true(l) {
                    out.insert(l.clone());
                }
            }
            (Goal::Query(_), NodeStatus::Proved) => {}
            _ => return,
        }
        for c in self.children.iter() {
            c.collect_proved(out);
        }
    }

    /// Innermost literals responsible for a failure: failed leaves with no
    /// matching clause, and the facts proving a literal whose negation failed.
    pub fn blamed(&self) -> Vec<Literal> {
        let mut out = Vec::new();
        self.collect_blamed(false, &mut out);
        out
    }

    fn collect_blamed(&self, under_naf_fails: bool, out: &mut Vec<Literal>) {
        guarded(|| self.collect_blamed_here(under_naf_fails, out))
    }

    fn collect_blamed_here(&self, under_naf_fails: bool, out: &mut Vec<Literal>) {
        let push = |l: &Literal, out: &mut Vec<Literal>| {
            if !out.contains(l) {
                out.push(l.clone());
            }
        };
        match (&self.goal, self.status) {
            (Goal::Literal(l), NodeStatus::Failed) if self.children.is_empty() => {
                if self.reason == Some(FailReason::NoMatchingClause) {
                    push(l, out);
                }
            }
            (Goal::Literal(l), NodeStatus::Proved)
                if under_naf_fails && self.children.is_empty() && !is_builtin_true(l) =>
            {
                push(l, out)
            }
            _ => {}
        }
        let next = match self.status {
            NodeStatus::NafFails => true,
            NodeStatus::NafHolds => false,
            _ => under_naf_fails,
        };
        for c in self.children.iter() {
            c.collect_blamed(next, out);
        }
    }

    /// Re-checks a proof against `program` without search: each proved node
    /// must be an instance of its rule with the children as body. Negations
    /// that hold are accepted as stated.
    pub fn replay(&self, program: &Program) -> Result<(), String> {
        guarded(|| self.replay_here(program))
    }

    fn replay_here(&self, program: &Program) -> Result<(), String> {
        match (&self.goal, self.status) {
            (Goal::Naf(_), NodeStatus::NafHolds) => Ok(()),
            (Goal::Query(body), NodeStatus::Proved) => {
                self.check_body(body, &Substitution::new())?;
                self.children.iter().try_for_each(|c| c.replay(program))
            }
            (Goal::Literal(l), NodeStatus::Proved) => {
                if is_builtin_true(l) && self.rule_used.is_none() {
                    return Ok(());
                }
                let i = self.rule_used.ok_or_else(|| format!("{l}: no rule recorded"))?;
                let rule = program.rules.get(i).ok_or_else(|| format!("{l}: no rule {i}"))?;
                let (head, body) = rename_apart(rule);
                let head = head.ok_or_else(|| format!("{l}: rule {i} is a constraint"))?;
                let s = unify_literals(&head, l, &Substitution::new())
                    .ok_or_else(|| format!("{l}: head of rule {i} does not match"))?;
                self.check_body(&body, &s)?;
                self.children.iter().try_for_each(|c| c.replay(program))
            }
            _ => Err(format!("{}: node does not hold", self.goal)),
        }
    }

    fn check_body(&self, body: &[BodyElement], s: &Substitution) -> Result<(), String> {
        if body.len() != self.children.len() {
            return Err(format!("{}: body has {} elements, {} subproofs", self.goal, body.len(), self.children.len()));
        }
        let mut s = s.clone();
        for (b, c) in body.iter().zip(self.children.iter()) {
            let ok = match (b, &c.goal, c.status) {
                (BodyElement::Call(l), Goal::Literal(cl), NodeStatus::Proved) => {
                    unify_literals(l, cl, &s).map(|s2| s = s2).is_some()
                }
                (BodyElement::Naf(l), Goal::Naf(cl), NodeStatus::NafHolds) => {
                    unify_literals(l, cl, &s).map(|s2| s = s2).is_some()
                }
                _ => false,
            };
            if !ok {
                return Err(format!("{}: subproof {} does not match {b}", self.goal, c.goal));
            }
        }
        Ok(())
    }
}

pub(crate) fn is_builtin_true(l: &Literal) -> bool {
    !l.negated && l.predicate == "true" && l.args.is_empty()
}

fn rename_apart(rule: &crate::logic::Rule) -> (Option<Literal>, Vec<BodyElement>) {
    let mut anon = 0usize;
    let mut f = |v: &str| {
        if v == "_" {
            anon += 1;
            Term::var(format!("_%{anon}"))
        } else {
            Term::var(format!("{v}%"))
        }
    };
    let head = rule.head.as_ref().map(|h| h.map_vars(&mut f));
    let body = rule
        .body
        .iter()
        .map(|b| match b {
            BodyElement::Call(l) => BodyElement::Call(l.map_vars(&mut f)),
            BodyElement::Naf(l) => BodyElement::Naf(l.map_vars(&mut f)),
        })
        .collect();
    (head, body)
}
