//! Idempotent substitutions and first-order unification with occurs check.

use std::collections::BTreeMap;
use std::fmt;

use super::term::{Literal, Term};

/// Mapping from variable names to terms. Kept idempotent: no bound variable
/// occurs in the range.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from raw pairs, resolving chains so the result is
    /// idempotent. Returns `None` when the pairs are cyclic.
    pub fn from_pairs<I, S>(pairs: I) -> Option<Self>
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            let v = v.into();
            let lhs = s.apply(&Term::Var(v));
            let rhs = s.apply(&t);
            s = unify(&lhs, &rhs, &s)?;
        }
        Some(s)
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| match self.bindings.get(v) {
            Some(bound) => bound.clone(),
            None => Term::Var(v.to_string()),
        })
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            negated: l.negated,
            predicate: l.predicate.clone(),
            args: l.args.iter().map(|a| self.apply(a)).collect(),
        }
    }

    /// `compose(s1, s2)` behaves as applying `s1` then `s2`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut bindings: BTreeMap<String, Term> = self
            .bindings
            .iter()
            .map(|(v, t)| (v.clone(), then.apply(t)))
            .filter(|(v, t)| !matches!(t, Term::Var(w) if w == v))
            .collect();
        for (v, t) in &then.bindings {
            bindings.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Substitution { bindings }
    }

    /// Restricts the domain to the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Substitution {
        let mut bindings = BTreeMap::new();
        for v in vars {
            if let Some(t) = self.bindings.get(v) {
                bindings.insert(v.clone(), t.clone());
            }
        }
        Substitution { bindings }
    }

    /// Binds `var` to `t`, where `t` is already fully applied and does not
    /// contain `var`.
    fn bind(&mut self, var: &str, t: Term) {
        let single = Substitution {
            bindings: BTreeMap::from([(var.to_string(), t.clone())]),
        };
        for bound in self.bindings.values_mut() {
            if bound.occurs(var) {
                *bound = single.apply(bound);
            }
        }
        self.bindings.insert(var.to_string(), t);
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} = {t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of `a` and `b` extending `s`, or `None` on clash or
/// occurs-check failure.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = out.apply(&x);
        let y = out.apply(&y);
        match (x, y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t.occurs(&v) {
                    return None;
                }
                out.bind(&v, t);
            }
            (Term::Atom(p), Term::Atom(q)) => {
                if p != q {
                    return None;
                }
            }
            (Term::Int(p), Term::Int(q)) => {
                if p != q {
                    return None;
                }
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.into_iter().zip(ys));
            }
            (Term::List(xs), Term::List(ys)) => {
                if xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.into_iter().zip(ys));
            }
            _ => return None,
        }
    }
    Some(out)
}

pub fn unify_literals(a: &Literal, b: &Literal, s: &Substitution) -> Option<Substitution> {
    if a.negated != b.negated || a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut out = s.clone();
    for (x, y) in a.args.iter().zip(&b.args) {
        out = unify(x, y, &out)?;
    }
    Some(out)
}

/// True when `a` and `b` are equal up to a bijective renaming of variables.
pub fn is_variant(a: &Literal, b: &Literal) -> bool {
    fn walk(
        x: &Term,
        y: &Term,
        fwd: &mut BTreeMap<String, String>,
        back: &mut BTreeMap<String, String>,
    ) -> bool {
        match (x, y) {
            (Term::Var(v), Term::Var(w)) => {
                let f = fwd.entry(v.clone()).or_insert_with(|| w.clone()).clone();
                let b = back.entry(w.clone()).or_insert_with(|| v.clone()).clone();
                &f == w && &b == v
            }
            (Term::Atom(p), Term::Atom(q)) => p == q,
            (Term::Int(p), Term::Int(q)) => p == q,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| walk(x, y, fwd, back))
            }
            (Term::List(xs), Term::List(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| walk(x, y, fwd, back))
            }
            _ => false,
        }
    }
    if a.key() != b.key() {
        return false;
    }
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    a.args.iter().zip(&b.args).all(|(x, y)| walk(x, y, &mut fwd, &mut back))
}
