use std::collections::BTreeSet;
use std::fmt;

use super::term::{is_anonymous, Literal, PredicateKey, Term};
use super::LogicError;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyElement {
    Call(Literal),
    /// Default negation, `not L`.
    Naf(Literal),
}

impl BodyElement {
    pub fn literal(&self) -> &Literal {
        match self {
            BodyElement::Call(l) | BodyElement::Naf(l) => l,
        }
    }

    pub fn is_naf(&self) -> bool {
        matches!(self, BodyElement::Naf(_))
    }
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Call(l) => write!(f, "{l}"),
            BodyElement::Naf(l) => write!(f, "not {l}"),
        }
    }
}

/// A normal rule. A missing head makes it an integrity constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Option<Literal>,
    pub body: Vec<BodyElement>,
}

impl Rule {
    pub fn fact(head: Literal) -> Self {
        Rule { head: Some(head), body: Vec::new() }
    }

    pub fn new(head: Literal, body: Vec<BodyElement>) -> Self {
        Rule { head: Some(head), body }
    }

    pub fn constraint(body: Vec<BodyElement>) -> Self {
        Rule { head: None, body }
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.body.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(h) = &self.head {
            h.collect_vars(&mut out);
        }
        for b in &self.body {
            b.literal().collect_vars(&mut out);
        }
        out
    }

    /// Returns the first variable that breaks safety: it appears in the head
    /// or in a negated element without occurring in a positive body call.
    /// Anonymous variables are allowed inside negated elements.
    pub fn unsafe_variable(&self) -> Option<String> {
        let bound = positive_vars(&self.body);
        if let Some(h) = &self.head {
            if let Some(v) = h.vars().into_iter().find(|v| !bound.contains(v)) {
                return Some(v);
            }
        }
        naf_unsafe_variable(&self.body, &bound)
    }

    pub fn check_safety(&self) -> Result<(), LogicError> {
        match self.unsafe_variable() {
            None => Ok(()),
            Some(variable) => Err(LogicError::Unsafe { rule: self.to_string(), variable }),
        }
    }
}

fn positive_vars(body: &[BodyElement]) -> BTreeSet<String> {
    let mut bound = BTreeSet::new();
    for b in body {
        if let BodyElement::Call(l) = b {
            l.collect_vars(&mut bound);
        }
    }
    bound
}

fn naf_unsafe_variable(body: &[BodyElement], bound: &BTreeSet<String>) -> Option<String> {
    body.iter()
        .filter_map(|b| match b {
            BodyElement::Naf(l) => Some(l),
            BodyElement::Call(_) => None,
        })
        .flat_map(|l| l.vars())
        .find(|v| !is_anonymous(v) && !bound.contains(v))
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[BodyElement]) -> fmt::Result {
    for (i, b) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "\n    {b}")?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.head, self.body.is_empty()) {
            (Some(h), true) => write!(f, "{h}."),
            (Some(h), false) => {
                write!(f, "{h} :-")?;
                write_body(f, &self.body)?;
                f.write_str(".")
            }
            (None, _) => {
                f.write_str(":-")?;
                write_body(f, &self.body)?;
                f.write_str(".")
            }
        }
    }
}

/// A conjunctive goal, `?- b1, ..., bn.`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub body: Vec<BodyElement>,
}

impl Query {
    pub fn new(body: Vec<BodyElement>) -> Self {
        Query { body }
    }

    pub fn single(lit: Literal) -> Self {
        Query { body: vec![BodyElement::Call(lit)] }
    }

    /// Named (non-anonymous) variables, whose bindings form an answer.
    pub fn answer_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for b in &self.body {
            b.literal().collect_vars(&mut out);
        }
        out.retain(|v| !is_anonymous(v));
        out
    }

    /// Checks that every named variable of a negated element also occurs in a
    /// positive element.
    pub fn check_safety(&self) -> Result<(), LogicError> {
        let bound = positive_vars(&self.body);
        match naf_unsafe_variable(&self.body, &bound) {
            None => Ok(()),
            Some(variable) => Err(LogicError::Unsafe { rule: self.to_string(), variable }),
        }
    }

    /// The default-negation wrapping of a single-literal positive query.
    pub fn negated(&self) -> Option<Query> {
        match self.body.as_slice() {
            [BodyElement::Call(l)] => Some(Query { body: vec![BodyElement::Naf(l.clone())] }),
            _ => None,
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("?- ")?;
        for (i, b) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

/// Ordered rules plus any `?-` queries read alongside them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub queries: Vec<Query>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules, queries: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.queries.is_empty()
    }

    pub fn check_safety(&self) -> Result<(), LogicError> {
        self.rules.iter().try_for_each(Rule::check_safety)?;
        self.queries.iter().try_for_each(Query::check_safety)
    }

    /// Concatenates programs in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Program>) -> Program {
        let mut out = Program::default();
        for p in parts {
            out.rules.extend(p.rules.iter().cloned());
            out.queries.extend(p.queries.iter().cloned());
        }
        out
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.is_constraint())
    }

    /// For every predicate used with both signs, the constraint
    /// `:- p(X1..Xn), -p(X1..Xn).` that keeps models consistent.
    pub fn classical_negation_constraints(&self) -> Vec<Rule> {
        let mut keys = BTreeSet::new();
        for r in &self.rules {
            if let Some(h) = &r.head {
                keys.insert(h.key());
            }
            for b in &r.body {
                keys.insert(b.literal().key());
            }
        }
        keys.iter()
            .filter(|k| k.negated)
            .filter(|k| keys.contains(&PredicateKey { negated: false, ..(*k).clone() }))
            .map(|k| {
                let args: Vec<Term> = (1..=k.arity).map(|i| Term::var(format!("X{i}"))).collect();
                Rule::constraint(vec![
                    BodyElement::Call(Literal::new(k.name.clone(), args.clone())),
                    BodyElement::Call(Literal::classical_neg(k.name.clone(), args)),
                ])
            })
            .collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        for q in &self.queries {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Renders a program in the text syntax accepted by [`super::parse_program`].
pub fn render_program(p: &Program) -> String {
    p.to_string()
}
