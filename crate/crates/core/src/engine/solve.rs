use std::collections::{BTreeSet, HashMap, HashSet};

use super::tree::{is_builtin_true, FailReason, Goal, JustificationTree, NodeStatus};
use super::{stratify, Answer, ConstraintViolation, EngineError, SolveOptions, Stratification};
use crate::logic::{
    is_anonymous, is_variant, unify_literals, BodyElement, Literal, PredicateKey, Program, Query,
    Rule, Substitution, Term,
};

/// Red zone and growth step for the recursion stack.
const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 4 * 1024 * 1024;

#[derive(Clone)]
struct CallResult {
    answers: Vec<(Literal, JustificationTree)>,
    /// Present iff `answers` is empty.
    failure: Option<JustificationTree>,
}

/// Solutions of a conjunction plus the first failure met on the way.
struct ConjOut {
    solutions: Vec<(Substitution, Vec<JustificationTree>)>,
    failure: Option<JustificationTree>,
    limit: usize,
    /// Lowest ancestor position hit by the loop check.
    floor: Option<usize>,
}

impl ConjOut {
    fn new(limit: usize) -> Self {
        ConjOut { solutions: Vec::new(), failure: None, limit, floor: None }
    }

    fn full(&self) -> bool {
        self.solutions.len() >= self.limit
    }

    fn fail(&mut self, tree: JustificationTree) {
        if self.failure.is_none() {
            self.failure = Some(tree);
        }
    }

    fn lower_floor(&mut self, f: Option<usize>) {
        self.floor = match (self.floor, f) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Goal-directed evaluator over one stratified program.
///
/// Calls are resolved against rules in program order, body elements left
/// to right, except that a negated element waits until its named
/// variables are bound. A call that is a variant of one of its ancestors
/// fails. Ground calls stop at their first proof.
pub struct Solver<'p> {
    program: &'p Program,
    index: HashMap<PredicateKey, Vec<usize>>,
    opts: SolveOptions,
    fresh: usize,
    depth: usize,
    /// Ground calls whose outcome does not depend on pruned ancestors.
    cache: HashMap<Literal, CallResult>,
    naf_cache: HashMap<Literal, (bool, JustificationTree)>,
}

impl<'p> Solver<'p> {
    /// Checks safety and stratification before anything is solved.
    pub fn new(program: &'p Program, opts: SolveOptions) -> Result<Self, EngineError> {
        program.rules.iter().try_for_each(Rule::check_safety)?;
        if let Stratification::NotStratified { cycle } = stratify(program) {
            return Err(EngineError::NotStratified { cycle });
        }
        let mut index: HashMap<PredicateKey, Vec<usize>> = HashMap::new();
        for (i, r) in program.rules.iter().enumerate() {
            if let Some(h) = &r.head {
                index.entry(h.key()).or_default().push(i);
            }
        }
        Ok(Solver {
            program,
            index,
            opts,
            fresh: 0,
            depth: 0,
            cache: HashMap::new(),
            naf_cache: HashMap::new(),
        })
    }

    pub fn program(&self) -> &Program {
        self.program
    }

    /// Answers to `q`, in search order, at most `max_answers` of them.
    pub fn solve(&mut self, q: &Query) -> Result<Vec<Answer>, EngineError> {
        let max = self.opts.max_answers;
        self.solve_limited(q, max)
    }

    fn solve_limited(&mut self, q: &Query, max: usize) -> Result<Vec<Answer>, EngineError> {
        q.check_safety()?;
        let body = self.rename_query(q);
        let vars = q.answer_vars();
        let mut out = ConjOut::new(usize::MAX);
        self.run_conj(&body, &mut out)?;

        let mut answers = Vec::new();
        let mut seen = HashSet::new();
        for (s, trees) in out.solutions {
            if answers.len() >= max {
                break;
            }
            let bindings = s.restrict(vars.iter());
            if !seen.insert(bindings.clone()) {
                continue;
            }
            let justification = query_tree(&body, &s, trees);
            let model = justification.proved_literals();
            answers.push(Answer { bindings, model, justification });
        }
        Ok(answers)
    }

    /// Succeeds iff `q` has no answer; the answer then carries the failure
    /// tree. `None` means the positive query holds.
    pub fn prove_negation(&mut self, q: &Query) -> Result<Option<Answer>, EngineError> {
        q.check_safety()?;
        let body = self.rename_query(q);
        let mut out = ConjOut::new(1);
        self.run_conj(&body, &mut out)?;
        if !out.solutions.is_empty() {
            return Ok(None);
        }
        let failure = out.failure.unwrap_or_else(|| {
            JustificationTree::failed(Literal::new("true", vec![]), Some(FailReason::NoMatchingClause), vec![])
        });
        let justification = match body.as_slice() {
            [BodyElement::Call(l)] => JustificationTree::negation(l.clone(), true, failure),
            _ => JustificationTree {
                goal: Goal::Query(body.clone()),
                status: NodeStatus::Failed,
                rule_used: None,
                reason: None,
                children: std::sync::Arc::new(vec![failure]),
            },
        };
        Ok(Some(Answer { bindings: Substitution::new(), model: BTreeSet::new(), justification }))
    }

    /// Every substitution satisfying the body of each constraint, including
    /// the implied `:- p(X..), -p(X..)` ones.
    pub fn check_constraints(
        &mut self,
        constraints: &Program,
    ) -> Result<Vec<ConstraintViolation>, EngineError> {
        let mut all: Vec<Rule> = constraints.constraints().cloned().collect();
        let both = Program::concat([self.program, constraints]);
        for c in both.classical_negation_constraints() {
            if !all.contains(&c) {
                all.push(c);
            }
        }
        let mut out = Vec::new();
        for c in all {
            let q = Query::new(c.body.clone());
            for a in self.solve_limited(&q, usize::MAX)? {
                out.push(ConstraintViolation {
                    constraint: c.clone(),
                    witness: a.bindings,
                    justification: a.justification,
                });
            }
        }
        Ok(out)
    }

    fn run_conj(&mut self, body: &[BodyElement], out: &mut ConjOut) -> Result<(), EngineError> {
        let pending: Vec<(usize, BodyElement)> = body.iter().cloned().enumerate().collect();
        let mut stack = Vec::new();
        let mut done = Vec::new();
        self.conj(&pending, &Substitution::new(), &mut done, &mut stack, out)
    }

    fn rename_query(&mut self, q: &Query) -> Vec<BodyElement> {
        self.fresh += 1;
        let n = self.fresh;
        let mut anon = 0usize;
        let mut f = |v: &str| {
            if v == "_" {
                anon += 1;
                Term::var(format!("_#{n}_{anon}"))
            } else {
                Term::var(v)
            }
        };
        q.body.iter().map(|b| map_element(b, &mut f)).collect()
    }

    fn rename_rule(&mut self, r: &Rule) -> (Literal, Vec<BodyElement>) {
        self.fresh += 1;
        let n = self.fresh;
        let mut anon = 0usize;
        let mut f = |v: &str| {
            if v == "_" {
                anon += 1;
                Term::var(format!("_#{n}_{anon}"))
            } else {
                Term::var(format!("{v}#{n}"))
            }
        };
        let head = r.head.as_ref().expect("rule with head").map_vars(&mut f);
        let body = r.body.iter().map(|b| map_element(b, &mut f)).collect();
        (head, body)
    }

    fn conj(
        &mut self,
        pending: &[(usize, BodyElement)],
        s: &Substitution,
        done: &mut Vec<(usize, JustificationTree)>,
        stack: &mut Vec<Literal>,
        out: &mut ConjOut,
    ) -> Result<(), EngineError> {
        if out.full() {
            return Ok(());
        }
        if pending.is_empty() {
            let mut trees = done.clone();
            trees.sort_by_key(|(i, _)| *i);
            out.solutions.push((s.clone(), trees.into_iter().map(|(_, t)| t).collect()));
            return Ok(());
        }
        let selected = pending.iter().position(|(_, b)| match b {
            BodyElement::Call(_) => true,
            BodyElement::Naf(l) => naf_ready(&s.apply_literal(l)),
        });
        let Some(k) = selected else {
            let first = pending.iter().find(|(_, b)| b.is_naf()).expect("only negations remain");
            return Err(EngineError::NonGroundNaf(s.apply_literal(first.1.literal())));
        };
        let (idx, elem) = &pending[k];
        let rest: Vec<(usize, BodyElement)> =
            pending.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, e)| e.clone()).collect();

        match elem {
            BodyElement::Call(l) => {
                let inst = s.apply_literal(l);
                let (r, floor) = self.call(&inst, stack)?;
                out.lower_floor(floor);
                if r.answers.is_empty() {
                    out.fail(r.failure.expect("failed call has a tree"));
                    return Ok(());
                }
                for (ans, tree) in r.answers {
                    let Some(s2) = unify_literals(&inst, &ans, s) else { continue };
                    done.push((*idx, tree));
                    self.conj(&rest, &s2, done, stack, out)?;
                    done.pop();
                    if out.full() {
                        break;
                    }
                }
            }
            BodyElement::Naf(l) => {
                let inst = s.apply_literal(l);
                let (holds, tree) = self.naf(&inst)?;
                if holds {
                    done.push((*idx, tree));
                    self.conj(&rest, s, done, stack, out)?;
                    done.pop();
                } else {
                    out.fail(tree);
                }
            }
        }
        Ok(())
    }

    /// Evaluates `not lit` from scratch: the outcome does not depend on the
    /// caller's ancestors in a stratified program.
    fn naf(&mut self, lit: &Literal) -> Result<(bool, JustificationTree), EngineError> {
        if let Some(r) = self.naf_cache.get(lit) {
            return Ok(r.clone());
        }
        let mut fresh = Vec::new();
        let (r, _) = self.call(lit, &mut fresh)?;
        let result = match r.answers.into_iter().next() {
            None => (true, JustificationTree::negation(lit.clone(), true, r.failure.expect("tree"))),
            Some((_, proof)) => (false, JustificationTree::negation(lit.clone(), false, proof)),
        };
        if lit.is_ground() {
            self.naf_cache.insert(lit.clone(), result.clone());
        }
        Ok(result)
    }

    fn call(
        &mut self,
        lit: &Literal,
        stack: &mut Vec<Literal>,
    ) -> Result<(CallResult, Option<usize>), EngineError> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.call_inner(lit, stack))
    }

    fn call_inner(
        &mut self,
        lit: &Literal,
        stack: &mut Vec<Literal>,
    ) -> Result<(CallResult, Option<usize>), EngineError> {
        if is_builtin_true(lit) {
            let tree = JustificationTree::proved(lit.clone(), None, vec![]);
            return Ok((CallResult { answers: vec![(lit.clone(), tree)], failure: None }, None));
        }
        let ground = lit.is_ground();
        if ground {
            if let Some(r) = self.cache.get(lit) {
                return Ok((r.clone(), None));
            }
        }
        if let Some(pos) = stack.iter().position(|a| is_variant(a, lit)) {
            let tree = JustificationTree::failed(lit.clone(), Some(FailReason::Loop), vec![]);
            return Ok((CallResult { answers: vec![], failure: Some(tree) }, Some(pos)));
        }
        if self.depth >= self.opts.depth_limit {
            return Err(EngineError::DepthLimit(self.opts.depth_limit));
        }

        self.depth += 1;
        let here = stack.len();
        stack.push(lit.clone());
        let result = self.resolve(lit, ground, stack);
        stack.pop();
        self.depth -= 1;
        let (result, floor) = result?;

        let floor = floor.filter(|&f| f < here);
        if ground && (!result.answers.is_empty() || floor.is_none()) {
            self.cache.insert(lit.clone(), result.clone());
        }
        Ok((result, floor))
    }

    fn resolve(
        &mut self,
        lit: &Literal,
        ground: bool,
        stack: &mut Vec<Literal>,
    ) -> Result<(CallResult, Option<usize>), EngineError> {
        let rule_ids = self.index.get(&lit.key()).cloned().unwrap_or_default();
        let mut answers: Vec<(Literal, JustificationTree)> = Vec::new();
        let mut seen = HashSet::new();
        let mut failures = Vec::new();
        let mut applicable = false;
        let mut floor: Option<usize> = None;

        for i in rule_ids {
            let (head, body) = self.rename_rule(&self.program.rules[i]);
            let Some(s) = unify_literals(&head, lit, &Substitution::new()) else { continue };
            applicable = true;
            let mut out = ConjOut::new(if ground { 1 } else { usize::MAX });
            let pending: Vec<(usize, BodyElement)> = body.into_iter().enumerate().collect();
            self.conj(&pending, &s, &mut Vec::new(), stack, &mut out)?;
            floor = match (floor, out.floor) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            if out.solutions.is_empty() {
                if let Some(f) = out.failure {
                    failures.push(f);
                }
                continue;
            }
            for (s2, trees) in out.solutions {
                let ans = s2.apply_literal(lit);
                if seen.insert(ans.clone()) {
                    answers.push((ans.clone(), JustificationTree::proved(ans, Some(i), trees)));
                }
            }
            if ground {
                break;
            }
        }

        let failure = answers.is_empty().then(|| {
            let reason = (!applicable).then_some(FailReason::NoMatchingClause);
            JustificationTree::failed(lit.clone(), reason, failures)
        });
        Ok((CallResult { answers, failure }, floor))
    }
}

fn map_element(b: &BodyElement, f: &mut impl FnMut(&str) -> Term) -> BodyElement {
    match b {
        BodyElement::Call(l) => BodyElement::Call(l.map_vars(f)),
        BodyElement::Naf(l) => BodyElement::Naf(l.map_vars(f)),
    }
}

/// A negated literal may be called once its named variables are bound.
fn naf_ready(l: &Literal) -> bool {
    l.vars().iter().all(|v| is_anonymous(v))
}

fn query_tree(body: &[BodyElement], s: &Substitution, trees: Vec<JustificationTree>) -> JustificationTree {
    if trees.len() == 1 && body.len() == 1 {
        return trees.into_iter().next().expect("one tree");
    }
    JustificationTree {
        goal: Goal::Query(body.iter().map(|b| map_element(b, &mut |v| s.apply(&Term::var(v)))).collect()),
        status: NodeStatus::Proved,
        rule_used: None,
        reason: None,
        children: std::sync::Arc::new(trees),
    }
}
