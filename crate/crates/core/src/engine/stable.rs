//! Stable models by exhaustive search over the ground atom base. Only meant
//! as an oracle for small programs.

use std::collections::{BTreeMap, BTreeSet};

use super::EngineError;
use crate::logic::{BodyElement, Literal, Program, Substitution, Term};

/// Hard cap on the atom base, whatever budget is asked for.
const MAX_ATOMS: usize = 30;
const MAX_GROUND_RULES: usize = 1 << 20;

struct GroundRule {
    head: Option<usize>,
    pos: u64,
    neg: u64,
}

/// Every stable model of `p`, in increasing order of their bit encoding
/// over the sorted atom base.
pub fn brute_force_stable_models(
    p: &Program,
    atom_budget: usize,
) -> Result<Vec<BTreeSet<Literal>>, EngineError> {
    let ground = ground_program(p)?;

    let mut base = BTreeSet::new();
    for (h, body) in &ground {
        base.extend(h.iter().cloned());
        base.extend(body.iter().map(|b| b.literal().clone()));
    }
    let budget = atom_budget.min(MAX_ATOMS);
    if base.len() > budget {
        return Err(EngineError::AtomBudget { budget, needed: base.len() });
    }
    let atoms: Vec<Literal> = base.into_iter().collect();
    let index: BTreeMap<&Literal, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let bit = |l: &Literal| 1u64 << index[l];

    let rules: Vec<GroundRule> = ground
        .iter()
        .map(|(h, body)| {
            let mut g = GroundRule { head: h.as_ref().map(|l| index[l]), pos: 0, neg: 0 };
            for b in body {
                match b {
                    BodyElement::Call(l) => g.pos |= bit(l),
                    BodyElement::Naf(l) => g.neg |= bit(l),
                }
            }
            g
        })
        .collect();

    // Pairs p / -p that may not hold together.
    let mut clashes = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        if a.negated {
            let pos = Literal { negated: false, ..a.clone() };
            if let Some(&j) = index.get(&pos) {
                clashes.push((1u64 << i) | (1u64 << j));
            }
        }
    }

    let mut models = Vec::new();
    for m in 0..(1u64 << atoms.len()) {
        // Both atoms of a complementary pair are in the candidate.
        if clashes.iter().any(|&pair| pair & !m == 0) {
            continue;
        }
        let violated = rules
            .iter()
            .any(|r| r.head.is_none() && r.pos & m == r.pos && r.neg & m == 0);
        if violated {
            continue;
        }
        if reduct_least_model(&rules, m) == m {
            models.push(atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect());
        }
    }
    Ok(models)
}

/// Least model of the Gelfond-Lifschitz reduct of `rules` with respect to `m`.
fn reduct_least_model(rules: &[GroundRule], m: u64) -> u64 {
    let mut lm = 0u64;
    loop {
        let mut changed = false;
        for r in rules {
            if let Some(h) = r.head {
                if r.neg & m == 0 && r.pos & lm == r.pos && lm >> h & 1 == 0 {
                    lm |= 1 << h;
                    changed = true;
                }
            }
        }
        if !changed {
            return lm;
        }
    }
}

type GroundClause = (Option<Literal>, Vec<BodyElement>);

/// Instantiates every rule over the ground arguments occurring in `p`.
fn ground_program(p: &Program) -> Result<Vec<GroundClause>, EngineError> {
    let mut universe = BTreeSet::new();
    for r in &p.rules {
        for l in r.head.iter().chain(r.body.iter().map(BodyElement::literal)) {
            universe.extend(l.args.iter().filter(|a| a.is_ground()).cloned());
        }
    }
    let universe: Vec<Term> = universe.into_iter().collect();

    let mut out = Vec::new();
    for r in &p.rules {
        let vars: Vec<String> = r.vars().into_iter().collect();
        if vars.is_empty() {
            out.push((r.head.clone(), r.body.clone()));
            continue;
        }
        if universe.is_empty() {
            continue;
        }
        let mut counter = vec![0usize; vars.len()];
        'assignments: loop {
            if out.len() >= MAX_GROUND_RULES {
                return Err(EngineError::AtomBudget { budget: MAX_GROUND_RULES, needed: out.len() + 1 });
            }
            let s = Substitution::from_pairs(
                vars.iter().zip(&counter).map(|(v, &i)| (v.as_str(), universe[i].clone())),
            )
            .expect("ground bindings");
            out.push((
                r.head.as_ref().map(|h| s.apply_literal(h)),
                r.body
                    .iter()
                    .map(|b| match b {
                        BodyElement::Call(l) => BodyElement::Call(s.apply_literal(l)),
                        BodyElement::Naf(l) => BodyElement::Naf(s.apply_literal(l)),
                    })
                    .collect(),
            ));
            for c in counter.iter_mut() {
                *c += 1;
                if *c < universe.len() {
                    continue 'assignments;
                }
                *c = 0;
            }
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_literal, parse_program};

    fn models(text: &str) -> Vec<BTreeSet<Literal>> {
        brute_force_stable_models(&parse_program(text).unwrap(), 12).unwrap()
    }

    fn set(lits: &[&str]) -> BTreeSet<Literal> {
        lits.iter().map(|l| parse_literal(l).unwrap()).collect()
    }

    #[test]
    fn single_fact() {
        assert_eq!(models("p."), vec![set(&["p"])]);
    }

    #[test]
    fn odd_loop_has_no_model() {
        assert!(models("p :- not p.").is_empty());
    }

    #[test]
    fn even_loop_has_two_models() {
        assert_eq!(models("p :- not q. q :- not p."), vec![set(&["p"]), set(&["q"])]);
    }

    #[test]
    fn constraints_and_classical_negation_prune_models() {
        assert_eq!(models("p :- not q. q :- not p. :- p."), vec![set(&["q"])]);
        assert!(models("p. -p.").is_empty());
    }

    #[test]
    fn non_ground_rules_are_instantiated() {
        assert_eq!(
            models("a(x). a(y). b(y). c(X) :- a(X), not b(X)."),
            vec![set(&["a(x)", "a(y)", "b(y)", "c(x)"])]
        );
    }

    #[test]
    fn budget_is_enforced() {
        let p = parse_program("a. b. c.").unwrap();
        assert!(matches!(
            brute_force_stable_models(&p, 2),
            Err(EngineError::AtomBudget { budget: 2, needed: 3 })
        ));
    }
}
