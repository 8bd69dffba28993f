use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Atom, CfgPredicate};
use super::PredicateError;

pub const DEFAULT_CLAUSE_CAP: usize = 4096;

/// An atom, possibly negated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Self { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Self { atom, negated: true }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not({})", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// Conjunction of literals. The empty clause is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DnfClause {
    literals: BTreeSet<Literal>,
}

impl DnfClause {
    pub fn always() -> Self {
        Self::default()
    }

    /// Build a clause; `None` if it contains a literal and its negation.
    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Option<Self> {
        let literals: BTreeSet<Literal> = lits.into_iter().collect();
        let contradictory = literals
            .iter()
            .any(|l| l.negated && literals.contains(&Literal::pos(l.atom.clone())));
        (!contradictory).then_some(Self { literals })
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    fn conjoin(&self, other: &DnfClause) -> Option<DnfClause> {
        DnfClause::from_literals(self.literals.iter().chain(other.literals.iter()).cloned())
    }
}

impl fmt::Display for DnfClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Normalize to disjunctive normal form with the default clause cap.
pub fn to_dnf(pred: &CfgPredicate) -> Result<Vec<DnfClause>, PredicateError> {
    to_dnf_capped(pred, DEFAULT_CLAUSE_CAP)
}

/// Normalize to DNF. Negations are pushed to the atoms, contradictory clauses
/// dropped, duplicates removed, and the result sorted lexicographically.
pub fn to_dnf_capped(pred: &CfgPredicate, cap: usize) -> Result<Vec<DnfClause>, PredicateError> {
    Ok(normalize(pred, false, cap)?.into_iter().collect())
}

fn normalize(pred: &CfgPredicate, negate: bool, cap: usize) -> Result<BTreeSet<DnfClause>, PredicateError> {
    match pred {
        CfgPredicate::Atom(a) => {
            let lit = Literal { atom: a.clone(), negated: negate };
            Ok(BTreeSet::from([DnfClause { literals: BTreeSet::from([lit]) }]))
        }
        CfgPredicate::Not(inner) => normalize(inner, !negate, cap),
        CfgPredicate::All(cs) if !negate => conjunction(cs, negate, cap),
        CfgPredicate::Any(cs) if negate => conjunction(cs, negate, cap),
        CfgPredicate::All(cs) | CfgPredicate::Any(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                out.extend(normalize(c, negate, cap)?);
                if out.len() > cap {
                    return Err(PredicateError::ClauseExplosion { cap });
                }
            }
            Ok(out)
        }
    }
}

fn conjunction(children: &[CfgPredicate], negate: bool, cap: usize) -> Result<BTreeSet<DnfClause>, PredicateError> {
    let mut acc = BTreeSet::from([DnfClause::always()]);
    for c in children {
        let rhs = normalize(c, negate, cap)?;
        let mut next = BTreeSet::new();
        for a in &acc {
            for b in &rhs {
                if let Some(clause) = a.conjoin(b) {
                    next.insert(clause);
                    if next.len() > cap {
                        return Err(PredicateError::ClauseExplosion { cap });
                    }
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Evaluate a DNF under an atom assignment.
pub fn eval_dnf<F: Fn(&Atom) -> bool>(clauses: &[DnfClause], truth: F) -> bool {
    clauses
        .iter()
        .any(|c| c.literals().all(|l| truth(&l.atom) != l.negated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::parse_predicate;

    fn dnf(text: &str) -> Vec<String> {
        to_dnf(&parse_predicate(text).unwrap()).unwrap().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn distributes_conjunction_over_disjunction() {
        assert_eq!(dnf("all(any(a, b), c)"), ["{a, c}", "{b, c}"]);
    }

    #[test]
    fn single_atom() {
        assert_eq!(dnf("a"), ["{a}"]);
    }

    #[test]
    fn de_morgan() {
        assert_eq!(dnf("not(all(a, b))"), ["{not(a)}", "{not(b)}"]);
        assert_eq!(dnf("not(any(a, b))"), ["{not(a), not(b)}"]);
        assert_eq!(dnf("not(not(x))"), ["{x}"]);
    }

    #[test]
    fn contradictions_are_dropped() {
        assert!(dnf("all(a, not(a))").is_empty());
        assert_eq!(dnf("any(all(a, not(a)), b)"), ["{b}"]);
    }

    #[test]
    fn duplicates_collapse() {
        assert_eq!(dnf("any(a, a, all(a, a))"), ["{a}"]);
    }

    #[test]
    fn clause_cap_is_a_hard_error() {
        // 2^13 clauses
        let parts: Vec<String> = (0..13).map(|i| format!("any(x{i}, y{i})")).collect();
        let text = format!("all({})", parts.join(", "));
        let p = parse_predicate(&text).unwrap();
        assert_eq!(to_dnf(&p), Err(PredicateError::ClauseExplosion { cap: DEFAULT_CLAUSE_CAP }));
        assert_eq!(to_dnf_capped(&p, 1 << 13).unwrap().len(), 1 << 13);
    }
}
