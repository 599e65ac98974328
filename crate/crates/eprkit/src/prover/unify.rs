//! Unification with occurs check, substitution application, and one-way
//! matching for subsumption tests.

use super::Literal;
use crate::fol::Term;
use std::collections::BTreeMap;

/// A triangular substitution: bindings may mention variables bound earlier.
pub type Substitution = BTreeMap<String, Term>;

/// Resolve a term through the substitution until it is no longer a bound
/// variable at the root.
fn walk<'a>(mut term: &'a Term, subst: &'a Substitution) -> &'a Term {
    while let Term::Variable(name) = term {
        match subst.get(name) {
            Some(bound) => term = bound,
            None => break,
        }
    }
    term
}

/// Apply a substitution, fully resolving nested bindings.
pub fn apply(term: &Term, subst: &Substitution) -> Term {
    let term = walk(term, subst);
    match term {
        Term::Variable(_) | Term::Constant(_) => term.clone(),
        Term::Function(name, args) => Term::Function(
            name.clone(),
            args.iter().map(|a| apply(a, subst)).collect(),
        ),
    }
}

pub fn apply_literal(lit: &Literal, subst: &Substitution) -> Literal {
    Literal {
        positive: lit.positive,
        predicate: lit.predicate.clone(),
        args: lit.args.iter().map(|a| apply(a, subst)).collect(),
    }
}

fn occurs(var: &str, term: &Term, subst: &Substitution) -> bool {
    let term = walk(term, subst);
    match term {
        Term::Variable(name) => name == var,
        Term::Constant(_) => false,
        Term::Function(_, args) => args.iter().any(|a| occurs(var, a, subst)),
    }
}

/// Extend `subst` so that `a` and `b` become equal, or fail. The occurs
/// check is on.
pub fn unify_terms(a: &Term, b: &Term, subst: &mut Substitution) -> bool {
    let a = walk(a, subst).clone();
    let b = walk(b, subst).clone();
    match (&a, &b) {
        (Term::Variable(x), Term::Variable(y)) if x == y => true,
        (Term::Variable(x), other) | (other, Term::Variable(x)) => {
            if occurs(x, other, subst) {
                false
            } else {
                subst.insert(x.clone(), other.clone());
                true
            }
        }
        (Term::Constant(x), Term::Constant(y)) => x == y,
        (Term::Function(f, fa), Term::Function(g, ga)) => {
            f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| unify_terms(x, y, subst))
        }
        _ => false,
    }
}

/// Unify the argument lists of two literals with the same predicate symbol.
pub fn unify_literal_args(a: &Literal, b: &Literal, subst: &mut Substitution) -> bool {
    a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| unify_terms(x, y, subst))
}

/// One-way matching: extend `subst` binding only variables of `pattern` so
/// that `pattern` becomes syntactically equal to `target`.
fn match_terms(pattern: &Term, target: &Term, subst: &mut Substitution) -> bool {
    match pattern {
        Term::Variable(name) => match subst.get(name) {
            Some(bound) => bound == target,
            None => {
                subst.insert(name.clone(), target.clone());
                true
            }
        },
        Term::Constant(x) => matches!(target, Term::Constant(y) if x == y),
        Term::Function(f, fa) => match target {
            Term::Function(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(p, t)| match_terms(p, t, subst))
            }
            _ => false,
        },
    }
}

fn match_literals(pattern: &Literal, target: &Literal, subst: &mut Substitution) -> bool {
    pattern.positive == target.positive
        && pattern.predicate == target.predicate
        && pattern.args.len() == target.args.len()
        && pattern
            .args
            .iter()
            .zip(&target.args)
            .all(|(p, t)| match_terms(p, t, subst))
}

/// True when `general` subsumes `specific`: some substitution maps every
/// literal of `general` onto a literal of `specific`. Standard backtracking
/// search; the length guard avoids pathologies where a longer clause
/// "subsumes" one of its own factors.
pub fn subsumes(general: &[Literal], specific: &[Literal]) -> bool {
    if general.len() > specific.len() {
        return false;
    }
    fn assign(
        general: &[Literal],
        index: usize,
        specific: &[Literal],
        used: &mut Vec<bool>,
        subst: &Substitution,
    ) -> bool {
        let Some(pattern) = general.get(index) else {
            return true;
        };
        for (j, target) in specific.iter().enumerate() {
            if used[j] {
                continue;
            }
            let mut attempt = subst.clone();
            if match_literals(pattern, target, &mut attempt) {
                used[j] = true;
                if assign(general, index + 1, specific, used, &attempt) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(
        general,
        0,
        specific,
        &mut vec![false; specific.len()],
        &Substitution::new(),
    )
}
