use std::collections::BTreeSet;
use std::fmt;

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(String),
    Var(String),
    Int(i64),
    Compound(String, Vec<Term>),
    List(Vec<Term>),
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Self {
        Term::Atom(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Compound(functor.into(), args)
    }

    /// Builds an atom or a variable from an identifier, by its leading character.
    pub fn from_identifier(ident: &str) -> Self {
        if is_variable_name(ident) {
            Term::Var(ident.to_string())
        } else {
            Term::Atom(ident.to_string())
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound(_, args) | Term::List(args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Atom(_) | Term::Int(_) => {}
            Term::Compound(_, args) | Term::List(args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Atom(_) | Term::Int(_) => false,
            Term::Compound(_, args) | Term::List(args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Rewrites every variable name with `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Atom(_) | Term::Int(_) => self.clone(),
            Term::Compound(name, args) => {
                Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
            Term::List(items) => Term::List(items.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Term::Atom(a) => Some(a),
            _ => None,
        }
    }
}

/// `[A-Z_][A-Za-z0-9_]*`
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        _ => false,
    }
}

/// `[a-z][A-Za-z0-9_]*`, the atoms that print without quotes.
pub fn is_plain_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

/// Anonymous variables (`_`, `_Foo`) are exempt from the groundedness
/// requirement on negated calls.
pub fn is_anonymous(var: &str) -> bool {
    var.starts_with('_')
}

pub(crate) fn write_atom(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_atom(name) {
        f.write_str(name)
    } else {
        f.write_str("'")?;
        f.write_str(&name.replace('\'', "''"))?;
        f.write_str("'")
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => write_atom(f, a),
            Term::Var(v) => f.write_str(v),
            Term::Int(i) => write!(f, "{i}"),
            Term::Compound(name, args) => {
                write_atom(f, name)?;
                f.write_str("(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
            Term::List(items) => {
                f.write_str("[")?;
                write_args(f, items)?;
                f.write_str("]")
            }
        }
    }
}

/// Positive or classically negated (`-p`) literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub negated: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

/// Predicate identity: sign, name and arity. `-p/n` is a predicate distinct from `p/n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateKey {
    pub negated: bool,
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for PredicateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl Literal {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal { negated: false, predicate: predicate.into(), args }
    }

    pub fn classical_neg(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal { negated: true, predicate: predicate.into(), args }
    }

    pub fn key(&self) -> PredicateKey {
        PredicateKey {
            negated: self.negated,
            name: self.predicate.clone(),
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> Term) -> Literal {
        Literal {
            negated: self.negated,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }

    /// The literal viewed as a term, for unification of whole calls.
    pub fn as_term(&self) -> Term {
        Term::Compound(self.predicate.clone(), self.args.clone())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}
