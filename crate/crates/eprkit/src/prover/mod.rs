//! Resolution theorem proving over clausal form.
//!
//! The pipeline is standard: formulas are clausified (rewrite `<->`/`->`,
//! negation normal form, standardize apart, skolemize, distribute), then a
//! given-clause saturation loop with binary resolution, factoring, and
//! subsumption searches for the empty clause. Every kept clause records its
//! parents, so a successful refutation yields a derivation DAG from which
//! the set of used input formulas is recovered.

mod clausify;
mod herbrand;
mod saturation;
mod unify;

pub use clausify::{clausify, Clausifier, ClausifyError, DEFAULT_CLAUSE_LIMIT};
pub use herbrand::{
    brute_force_entails, BruteForceConfig, BruteForceVerdict, Countermodel, InapplicableReason,
};
pub use saturation::{refute, verify_derivation};
pub use unify::{unify_terms, Substitution};

use crate::fol::Term;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

/// A signed atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(positive: bool, predicate: &str, args: Vec<Term>) -> Literal {
        Literal {
            positive,
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            predicate: self.predicate.clone(),
            args: self.args.clone(),
        }
    }

    fn symbol_count(&self) -> usize {
        fn term_symbols(t: &Term) -> usize {
            match t {
                Term::Variable(_) | Term::Constant(_) => 1,
                Term::Function(_, args) => 1 + args.iter().map(term_symbols).sum::<usize>(),
            }
        }
        1 + self.args.iter().map(term_symbols).sum::<usize>()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{arg}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Where a clause came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClauseOrigin {
    /// Clausification of the input formula with this identifier.
    Input(String),
    Derived,
}

/// How a derived clause was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InferenceRule {
    Input,
    Resolution,
    Factoring,
}

/// A disjunction of literals with set semantics (duplicates removed) and
/// derivation bookkeeping. Variables are canonically named `x0, x1, ...` in
/// order of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub origin: ClauseOrigin,
    pub parents: Vec<usize>,
    pub rule: InferenceRule,
}

impl Clause {
    pub fn input(literals: Vec<Literal>, origin: &str) -> Clause {
        let mut clause = Clause {
            literals,
            origin: ClauseOrigin::Input(origin.to_string()),
            parents: Vec::new(),
            rule: InferenceRule::Input,
        };
        clause.canonicalize();
        clause
    }

    pub fn derived(literals: Vec<Literal>, parents: Vec<usize>, rule: InferenceRule) -> Clause {
        let mut clause = Clause {
            literals,
            origin: ClauseOrigin::Derived,
            parents,
            rule,
        };
        clause.canonicalize();
        clause
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True when the clause contains a literal and its negation.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|lit| {
            lit.positive
                && self
                    .literals
                    .iter()
                    .any(|other| !other.positive && other.predicate == lit.predicate && other.args == lit.args)
        })
    }

    pub fn symbol_count(&self) -> usize {
        self.literals.iter().map(Literal::symbol_count).sum()
    }

    /// Sort and dedupe literals, then rename variables to `x0, x1, ...` in
    /// first-occurrence order. Two clauses equal up to consistent variable
    /// renaming usually normalize to the same form; subsumption catches the
    /// remainder.
    fn canonicalize(&mut self) {
        self.literals.sort();
        self.literals.dedup();
        let mut mapping: Vec<(String, String)> = Vec::new();
        let literals = std::mem::take(&mut self.literals);
        self.literals = literals
            .into_iter()
            .map(|mut lit| {
                for arg in &mut lit.args {
                    rename_term(arg, &mut mapping);
                }
                lit
            })
            .collect();
        self.literals.sort();
        self.literals.dedup();
    }

    fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        fn walk(t: &Term, vars: &mut BTreeSet<String>) {
            match t {
                Term::Variable(name) => {
                    vars.insert(name.clone());
                }
                Term::Constant(_) => {}
                Term::Function(_, args) => args.iter().for_each(|a| walk(a, vars)),
            }
        }
        for lit in &self.literals {
            lit.args.iter().for_each(|a| walk(a, &mut vars));
        }
        vars
    }
}

fn rename_term(term: &mut Term, mapping: &mut Vec<(String, String)>) {
    match term {
        Term::Variable(name) => {
            let renamed = match mapping.iter().find(|(from, _)| from == name) {
                Some((_, to)) => to.clone(),
                None => {
                    let to = format!("x{}", mapping.len());
                    mapping.push((name.clone(), to.clone()));
                    to
                }
            };
            *name = renamed;
        }
        Term::Constant(_) => {}
        Term::Function(_, args) => {
            for arg in args {
                rename_term(arg, mapping);
            }
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "<empty>");
        }
        for (i, lit) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

/// Wall-clock and clause-count limits for one prover call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceBudget {
    pub max_time: Duration,
    pub max_generated: u64,
}

impl Default for ResourceBudget {
    fn default() -> Self {
        ResourceBudget {
            max_time: Duration::from_secs(1),
            max_generated: 50_000,
        }
    }
}

impl ResourceBudget {
    pub fn with_timeout_ms(ms: u64) -> ResourceBudget {
        ResourceBudget {
            max_time: Duration::from_millis(ms),
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProverStatus {
    Proved,
    Saturated,
    Timeout,
    ResourceLimit,
}

/// One step of a refutation, topologically ordered (parents come first).
#[derive(Clone, Debug)]
pub struct DerivationStep {
    pub clause: Clause,
    /// Indices into the derivation's step list.
    pub parents: Vec<usize>,
    pub rule: InferenceRule,
    pub origin: ClauseOrigin,
}

/// The sub-DAG of kept clauses that ends in the empty clause.
#[derive(Clone, Debug, Default)]
pub struct Derivation {
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    /// Origins of the leaves (input clauses) of the DAG.
    pub fn used_inputs(&self) -> BTreeSet<String> {
        self.steps
            .iter()
            .filter(|s| s.parents.is_empty())
            .filter_map(|s| match &s.origin {
                ClauseOrigin::Input(id) => Some(id.clone()),
                ClauseOrigin::Derived => None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProverStats {
    pub clauses_generated: u64,
    pub clauses_kept: u64,
    pub elapsed: Duration,
}

/// Outcome of a refutation attempt.
#[derive(Clone, Debug)]
pub struct ProofVerdict {
    pub status: ProverStatus,
    /// Identifiers of the input formulas whose clauses are leaves of the
    /// derivation. Empty unless `status == Proved`.
    pub used_premises: BTreeSet<String>,
    pub derivation: Option<Derivation>,
    pub stats: ProverStats,
}

impl ProofVerdict {
    pub fn proved(&self) -> bool {
        self.status == ProverStatus::Proved
    }
}
