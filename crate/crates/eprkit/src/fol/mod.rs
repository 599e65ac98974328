//! First-order logic syntax: the formula AST, a parser for the surface
//! notation used by NL-to-FOL translators (`all x. (Harp(x) -> Instrument(x))`),
//! a canonical printer, signature extraction, and TPTP FOF serialization.

mod parser;
mod printer;
mod tptp;

pub use parser::{parse_formula, ParseError};
pub use tptp::{to_tptp, MangleError, TptpRole, TptpSerializer};

use std::collections::BTreeSet;
use std::fmt;

/// A first-order term: a variable, a constant, or a function application.
///
/// Constants are represented separately from functions; a zero-argument
/// function is always a [`Term::Constant`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Variable(String),
    Constant(String),
    Function(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Variable(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Constant(name.to_string())
    }

    pub fn function(name: &str, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "zero-argument function must be a Constant");
        Term::Function(name.to_string(), args)
    }

    fn collect_signatures(&self, sig: &mut SignatureSet) {
        match self {
            Term::Variable(_) => {}
            Term::Constant(name) => {
                sig.constants.insert(name.clone());
            }
            Term::Function(_, args) => {
                for arg in args {
                    arg.collect_signatures(sig);
                }
            }
        }
    }

    fn collect_free_vars(&self, bound: &[String], free: &mut BTreeSet<String>) {
        match self {
            Term::Variable(name) => {
                if !bound.iter().any(|b| b == name) {
                    free.insert(name.clone());
                }
            }
            Term::Constant(_) => {}
            Term::Function(_, args) => {
                for arg in args {
                    arg.collect_free_vars(bound, free);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(name) | Term::Constant(name) => write!(f, "{name}"),
            Term::Function(name, args) => {
                write!(f, "{name}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A predicate identified by name and arity. Two predicates with the same
/// name but different arities are distinct symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateSignature {
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for PredicateSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// The predicates and constants occurring in a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureSet {
    pub predicates: BTreeSet<PredicateSignature>,
    pub constants: BTreeSet<String>,
}

impl SignatureSet {
    /// True when every predicate and constant of `self` also occurs in `other`.
    pub fn is_subset_of(&self, other: &SignatureSet) -> bool {
        self.predicates.is_subset(&other.predicates) && self.constants.is_subset(&other.constants)
    }

    pub fn extend(&mut self, other: &SignatureSet) {
        self.predicates.extend(other.predicates.iter().cloned());
        self.constants.extend(other.constants.iter().cloned());
    }
}

/// The abstract syntax tree of a first-order formula.
///
/// Quantifier nodes carry a nonempty variable list; the parser always
/// desugars `all x y.` into nested single-variable quantifiers, so
/// multi-variable nodes only arise from programmatic construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(Vec<String>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: &str, args: Vec<Term>) -> Formula {
        Formula::Atom {
            predicate: predicate.to_string(),
            args,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Formula {
        Formula::Not(Box::new(inner))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn implies(premise: Formula, conclusion: Formula) -> Formula {
        Formula::Implies(Box::new(premise), Box::new(conclusion))
    }

    pub fn iff(left: Formula, right: Formula) -> Formula {
        Formula::Iff(Box::new(left), Box::new(right))
    }

    pub fn forall(vars: &[&str], body: Formula) -> Formula {
        assert!(!vars.is_empty(), "quantifier needs at least one variable");
        Formula::ForAll(vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
    }

    pub fn exists(vars: &[&str], body: Formula) -> Formula {
        assert!(!vars.is_empty(), "quantifier needs at least one variable");
        Formula::Exists(vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
    }

    /// Every predicate (name, arity) pair and every constant occurring in
    /// the formula.
    pub fn signatures(&self) -> SignatureSet {
        let mut sig = SignatureSet::default();
        self.collect_signatures(&mut sig);
        sig
    }

    fn collect_signatures(&self, sig: &mut SignatureSet) {
        match self {
            Formula::Atom { predicate, args } => {
                sig.predicates.insert(PredicateSignature {
                    name: predicate.clone(),
                    arity: args.len(),
                });
                for arg in args {
                    arg.collect_signatures(sig);
                }
            }
            Formula::Not(inner) => inner.collect_signatures(sig),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_signatures(sig);
                r.collect_signatures(sig);
            }
            Formula::ForAll(_, body) | Formula::Exists(_, body) => body.collect_signatures(sig),
        }
    }

    /// Variables occurring outside the scope of any binding quantifier.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut free = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut free);
        free
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                for arg in args {
                    arg.collect_free_vars(bound, free);
                }
            }
            Formula::Not(inner) => inner.collect_free_vars(bound, free),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_free_vars(bound, free);
                r.collect_free_vars(bound, free);
            }
            Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                body.collect_free_vars(bound, free);
                bound.truncate(depth);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures_of_single_atom() {
        let f = Formula::atom("Loves", vec![Term::constant("john"), Term::constant("mary")]);
        let sig = f.signatures();
        assert_eq!(
            sig.predicates.into_iter().collect::<Vec<_>>(),
            vec![PredicateSignature { name: "Loves".into(), arity: 2 }]
        );
        assert_eq!(
            sig.constants.into_iter().collect::<Vec<_>>(),
            vec!["john".to_string(), "mary".to_string()]
        );
    }

    #[test]
    fn signatures_under_quantifier() {
        // all x. (Mammal(x) -> (Teeth(x) & Digestive(x)))
        let f = Formula::forall(
            &["x"],
            Formula::implies(
                Formula::atom("Mammal", vec![Term::var("x")]),
                Formula::and(
                    Formula::atom("Teeth", vec![Term::var("x")]),
                    Formula::atom("Digestive", vec![Term::var("x")]),
                ),
            ),
        );
        let sig = f.signatures();
        let names: Vec<String> = sig.predicates.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["Digestive/1", "Mammal/1", "Teeth/1"]);
        assert!(sig.constants.is_empty());
    }

    #[test]
    fn same_name_different_arity_are_distinct() {
        let f = Formula::and(
            Formula::atom("Block", vec![Term::constant("ash")]),
            Formula::atom("Block", vec![Term::constant("ash"), Term::constant("sunlight")]),
        );
        let sig = f.signatures();
        assert_eq!(sig.predicates.len(), 2);
    }

    #[test]
    fn free_variables_respect_binding() {
        let f = Formula::forall(
            &["x"],
            Formula::and(
                Formula::atom("P", vec![Term::var("x")]),
                Formula::atom("Q", vec![Term::var("y")]),
            ),
        );
        let free: Vec<String> = f.free_variables().into_iter().collect();
        assert_eq!(free, vec!["y".to_string()]);
        assert!(!f.is_closed());
    }

    #[test]
    fn shadowed_binding_is_not_free() {
        let f = Formula::forall(
            &["x"],
            Formula::and(
                Formula::atom("P", vec![Term::var("x")]),
                Formula::exists(&["x"], Formula::atom("Q", vec![Term::var("x")])),
            ),
        );
        assert!(f.is_closed());
    }
}
