//! Transformation of closed formulas into equisatisfiable clause sets.
//!
//! Order of operations: rewrite `<->` and `->`, push negations to atoms,
//! standardize bound variables apart, skolemize existentials (constants
//! under no universal, functions of the enclosing universal variables
//! otherwise), drop universal quantifiers, and distribute `|` over `&`.
//!
//! One [`Clausifier`] serves a whole refutation: its skolem counter is
//! shared across calls so symbols never collide between the premises and
//! the negated goal, and symbols of the source formulas are reserved so a
//! user constant named `sk1` cannot be captured.

use super::{Clause, Literal};
use crate::fol::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Cap on the number of clauses produced for a single formula.
pub const DEFAULT_CLAUSE_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClausifyError {
    #[error("clausifying {origin:?} exceeded the limit of {limit} clauses")]
    ClauseLimit { origin: String, limit: usize },
}

pub struct Clausifier {
    skolem_counter: usize,
    reserved: BTreeSet<String>,
    clause_limit: usize,
}

impl Default for Clausifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Clausifier {
    pub fn new() -> Clausifier {
        Clausifier {
            skolem_counter: 0,
            reserved: BTreeSet::new(),
            clause_limit: DEFAULT_CLAUSE_LIMIT,
        }
    }

    pub fn with_clause_limit(limit: usize) -> Clausifier {
        Clausifier {
            clause_limit: limit,
            ..Clausifier::new()
        }
    }

    /// Mark the constants and function names of `f` as taken, so fresh
    /// skolem symbols avoid them. Call for every formula of the problem
    /// before the first `clausify`.
    pub fn reserve_symbols(&mut self, f: &Formula) {
        let sig = f.signatures();
        self.reserved.extend(sig.constants);
        collect_function_names(f, &mut self.reserved);
    }

    pub fn clausify(&mut self, f: &Formula, origin: &str) -> Result<Vec<Clause>, ClausifyError> {
        debug_assert!(f.is_closed(), "clausify expects a closed formula");
        self.reserve_symbols(f);
        let f = eliminate_arrows(f);
        let f = nnf(&f, true);
        let f = standardize_apart(&f, &mut Vec::new(), &mut 0);
        let matrix = self.skolemize(&f, &mut Vec::new(), &mut BTreeMap::new());
        let mut clauses: Vec<Vec<Literal>> = Vec::new();
        self.distribute(&matrix, &mut clauses, origin)?;
        Ok(clauses
            .into_iter()
            .map(|literals| Clause::input(literals, origin))
            .collect())
    }

    fn fresh_skolem(&mut self, universals: &[String]) -> Term {
        let name = loop {
            self.skolem_counter += 1;
            let candidate = format!("sk{}", self.skolem_counter);
            if !self.reserved.contains(&candidate) {
                break candidate;
            }
        };
        if universals.is_empty() {
            Term::Constant(name)
        } else {
            Term::Function(
                name,
                universals.iter().map(|v| Term::Variable(v.clone())).collect(),
            )
        }
    }

    /// Replace existential variables by skolem terms and drop quantifiers.
    /// `f` must be in NNF with distinct binders.
    fn skolemize(
        &mut self,
        f: &Formula,
        universals: &mut Vec<String>,
        replacements: &mut BTreeMap<String, Term>,
    ) -> Matrix {
        match f {
            Formula::Atom { predicate, args } => Matrix::Lit(Literal {
                positive: true,
                predicate: predicate.clone(),
                args: args.iter().map(|a| substitute(a, replacements)).collect(),
            }),
            Formula::Not(inner) => match &**inner {
                Formula::Atom { predicate, args } => Matrix::Lit(Literal {
                    positive: false,
                    predicate: predicate.clone(),
                    args: args.iter().map(|a| substitute(a, replacements)).collect(),
                }),
                _ => unreachable!("negation below NNF reaches only atoms"),
            },
            Formula::And(l, r) => Matrix::And(
                Box::new(self.skolemize(l, universals, replacements)),
                Box::new(self.skolemize(r, universals, replacements)),
            ),
            Formula::Or(l, r) => Matrix::Or(
                Box::new(self.skolemize(l, universals, replacements)),
                Box::new(self.skolemize(r, universals, replacements)),
            ),
            Formula::ForAll(vars, body) => {
                universals.extend(vars.iter().cloned());
                let matrix = self.skolemize(body, universals, replacements);
                universals.truncate(universals.len() - vars.len());
                matrix
            }
            Formula::Exists(vars, body) => {
                for var in vars {
                    let term = self.fresh_skolem(universals);
                    replacements.insert(var.clone(), term);
                }
                let matrix = self.skolemize(body, universals, replacements);
                for var in vars {
                    replacements.remove(var);
                }
                matrix
            }
            Formula::Implies(..) | Formula::Iff(..) => {
                unreachable!("arrows are rewritten before skolemization")
            }
        }
    }

    fn distribute(
        &self,
        matrix: &Matrix,
        out: &mut Vec<Vec<Literal>>,
        origin: &str,
    ) -> Result<(), ClausifyError> {
        let limit_err = || ClausifyError::ClauseLimit {
            origin: origin.to_string(),
            limit: self.clause_limit,
        };
        let disjunctions = cnf(matrix, self.clause_limit).ok_or_else(limit_err)?;
        out.extend(disjunctions);
        if out.len() > self.clause_limit {
            return Err(limit_err());
        }
        Ok(())
    }
}

/// Quantifier-free skolemized matrix.
enum Matrix {
    Lit(Literal),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

/// Distribute into CNF, bailing out as soon as the intermediate clause
/// count exceeds `limit`.
fn cnf(matrix: &Matrix, limit: usize) -> Option<Vec<Vec<Literal>>> {
    match matrix {
        Matrix::Lit(lit) => Some(vec![vec![lit.clone()]]),
        Matrix::And(l, r) => {
            let mut clauses = cnf(l, limit)?;
            clauses.extend(cnf(r, limit)?);
            if clauses.len() > limit {
                return None;
            }
            Some(clauses)
        }
        Matrix::Or(l, r) => {
            let left = cnf(l, limit)?;
            let right = cnf(r, limit)?;
            if left.len().saturating_mul(right.len()) > limit {
                return None;
            }
            let mut clauses = Vec::with_capacity(left.len() * right.len());
            for cl in &left {
                for cr in &right {
                    let mut merged = cl.clone();
                    merged.extend(cr.iter().cloned());
                    clauses.push(merged);
                }
            }
            Some(clauses)
        }
    }
}

fn eliminate_arrows(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } => f.clone(),
        Formula::Not(inner) => Formula::not(eliminate_arrows(inner)),
        Formula::And(l, r) => Formula::and(eliminate_arrows(l), eliminate_arrows(r)),
        Formula::Or(l, r) => Formula::or(eliminate_arrows(l), eliminate_arrows(r)),
        Formula::Implies(l, r) => {
            Formula::or(Formula::not(eliminate_arrows(l)), eliminate_arrows(r))
        }
        Formula::Iff(l, r) => {
            let l = eliminate_arrows(l);
            let r = eliminate_arrows(r);
            Formula::and(
                Formula::or(Formula::not(l.clone()), r.clone()),
                Formula::or(Formula::not(r), l),
            )
        }
        Formula::ForAll(vars, body) => {
            Formula::ForAll(vars.clone(), Box::new(eliminate_arrows(body)))
        }
        Formula::Exists(vars, body) => {
            Formula::Exists(vars.clone(), Box::new(eliminate_arrows(body)))
        }
    }
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom { .. } => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(inner) => nnf(inner, !positive),
        Formula::And(l, r) => {
            if positive {
                Formula::and(nnf(l, true), nnf(r, true))
            } else {
                Formula::or(nnf(l, false), nnf(r, false))
            }
        }
        Formula::Or(l, r) => {
            if positive {
                Formula::or(nnf(l, true), nnf(r, true))
            } else {
                Formula::and(nnf(l, false), nnf(r, false))
            }
        }
        Formula::ForAll(vars, body) => {
            let body = Box::new(nnf(body, positive));
            if positive {
                Formula::ForAll(vars.clone(), body)
            } else {
                Formula::Exists(vars.clone(), body)
            }
        }
        Formula::Exists(vars, body) => {
            let body = Box::new(nnf(body, positive));
            if positive {
                Formula::Exists(vars.clone(), body)
            } else {
                Formula::ForAll(vars.clone(), body)
            }
        }
        Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("arrows are rewritten before NNF")
        }
    }
}

/// Rename every binder to a fresh `v{n}` so no two quantifiers share a
/// variable name.
fn standardize_apart(
    f: &Formula,
    env: &mut Vec<(String, String)>,
    counter: &mut usize,
) -> Formula {
    match f {
        Formula::Atom { predicate, args } => Formula::Atom {
            predicate: predicate.clone(),
            args: args.iter().map(|a| rename_with_env(a, env)).collect(),
        },
        Formula::Not(inner) => Formula::not(standardize_apart(inner, env, counter)),
        Formula::And(l, r) => Formula::and(
            standardize_apart(l, env, counter),
            standardize_apart(r, env, counter),
        ),
        Formula::Or(l, r) => Formula::or(
            standardize_apart(l, env, counter),
            standardize_apart(r, env, counter),
        ),
        Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
            let depth = env.len();
            let fresh: Vec<String> = vars
                .iter()
                .map(|v| {
                    *counter += 1;
                    let name = format!("v{counter}");
                    env.push((v.clone(), name.clone()));
                    name
                })
                .collect();
            let body = Box::new(standardize_apart(body, env, counter));
            env.truncate(depth);
            if matches!(f, Formula::ForAll(..)) {
                Formula::ForAll(fresh, body)
            } else {
                Formula::Exists(fresh, body)
            }
        }
        Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("arrows are rewritten before standardization")
        }
    }
}

fn rename_with_env(term: &Term, env: &[(String, String)]) -> Term {
    match term {
        Term::Variable(name) => {
            // Innermost binding wins.
            match env.iter().rev().find(|(from, _)| from == name) {
                Some((_, to)) => Term::Variable(to.clone()),
                None => term.clone(),
            }
        }
        Term::Constant(_) => term.clone(),
        Term::Function(name, args) => Term::Function(
            name.clone(),
            args.iter().map(|a| rename_with_env(a, env)).collect(),
        ),
    }
}

fn substitute(term: &Term, replacements: &BTreeMap<String, Term>) -> Term {
    match term {
        Term::Variable(name) => replacements.get(name).cloned().unwrap_or_else(|| term.clone()),
        Term::Constant(_) => term.clone(),
        Term::Function(name, args) => Term::Function(
            name.clone(),
            args.iter().map(|a| substitute(a, replacements)).collect(),
        ),
    }
}

fn collect_function_names(f: &Formula, out: &mut BTreeSet<String>) {
    fn from_term(t: &Term, out: &mut BTreeSet<String>) {
        if let Term::Function(name, args) = t {
            out.insert(name.clone());
            args.iter().for_each(|a| from_term(a, out));
        }
    }
    match f {
        Formula::Atom { args, .. } => args.iter().for_each(|a| from_term(a, out)),
        Formula::Not(inner) => collect_function_names(inner, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_function_names(l, out);
            collect_function_names(r, out);
        }
        Formula::ForAll(_, body) | Formula::Exists(_, body) => collect_function_names(body, out),
    }
}

/// Clausify a single formula with its own skolem namespace.
pub fn clausify(f: &Formula, origin: &str) -> Result<Vec<Clause>, ClausifyError> {
    Clausifier::new().clausify(f, origin)
}
