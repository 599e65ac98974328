//! Brute-force entailment decision over Herbrand interpretations.
//!
//! For function-free clause sets, satisfiability over the (finite) Herbrand
//! universe decides satisfiability outright, so exhaustively enumerating
//! truth assignments of the ground atoms decides entailment. This is the
//! independent reference the resolution prover is checked against: it
//! shares the clausifier but none of the saturation machinery.

use super::{Clause, Clausifier, Literal};
use crate::fol::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug)]
pub struct BruteForceConfig {
    /// Minimum universe size; fresh constants pad the universe up to this.
    pub domain_size: usize,
    /// Enumeration covers `2^atoms` interpretations; atom counts above this
    /// make the instance inapplicable.
    pub max_atoms: usize,
    /// Guard on the number of ground clause instances.
    pub max_instances: usize,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig {
            domain_size: 2,
            max_atoms: 24,
            max_instances: 4_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InapplicableReason {
    /// Function symbols (including skolem functions) make the Herbrand
    /// universe infinite.
    FunctionSymbols,
    TooManyAtoms { atoms: usize },
    TooManyInstances,
    ClauseLimit,
}

impl fmt::Display for InapplicableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InapplicableReason::FunctionSymbols => write!(f, "function symbols present"),
            InapplicableReason::TooManyAtoms { atoms } => {
                write!(f, "too many ground atoms ({atoms})")
            }
            InapplicableReason::TooManyInstances => write!(f, "too many ground instances"),
            InapplicableReason::ClauseLimit => write!(f, "clausification exceeded its limit"),
        }
    }
}

/// A Herbrand structure in which the premises hold and the hypothesis fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub universe: Vec<String>,
    pub true_atoms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteForceVerdict {
    Entailed,
    Countermodel(Countermodel),
    Inapplicable(InapplicableReason),
}

/// Decide `premises |= hypothesis` by enumerating Herbrand interpretations,
/// with the universe padded to at least `domain_size` constants.
pub fn brute_force_entails(
    premises: &[Formula],
    hypothesis: &Formula,
    domain_size: usize,
) -> BruteForceVerdict {
    brute_force_entails_with(
        premises,
        hypothesis,
        &BruteForceConfig {
            domain_size,
            ..Default::default()
        },
    )
}

pub fn brute_force_entails_with(
    premises: &[Formula],
    hypothesis: &Formula,
    config: &BruteForceConfig,
) -> BruteForceVerdict {
    let negated = Formula::not(hypothesis.clone());
    let mut clausifier = Clausifier::new();
    for f in premises {
        clausifier.reserve_symbols(f);
    }
    clausifier.reserve_symbols(&negated);

    let mut clauses: Vec<Clause> = Vec::new();
    for (i, f) in premises.iter().enumerate() {
        match clausifier.clausify(f, &format!("p{}", i + 1)) {
            Ok(cs) => clauses.extend(cs),
            Err(_) => return BruteForceVerdict::Inapplicable(InapplicableReason::ClauseLimit),
        }
    }
    match clausifier.clausify(&negated, "goal") {
        Ok(cs) => clauses.extend(cs),
        Err(_) => return BruteForceVerdict::Inapplicable(InapplicableReason::ClauseLimit),
    }

    if clauses
        .iter()
        .flat_map(|c| &c.literals)
        .flat_map(|l| &l.args)
        .any(has_function)
    {
        return BruteForceVerdict::Inapplicable(InapplicableReason::FunctionSymbols);
    }

    // Universe: all constants of the clause set, padded with fresh ones.
    let mut universe: BTreeSet<String> = clauses
        .iter()
        .flat_map(|c| &c.literals)
        .flat_map(|l| &l.args)
        .filter_map(|t| match t {
            Term::Constant(name) => Some(name.clone()),
            _ => None,
        })
        .collect();
    let mut pad = 1;
    while universe.len() < config.domain_size.max(1) {
        let candidate = format!("d{pad}");
        pad += 1;
        universe.insert(candidate);
    }
    let universe: Vec<String> = universe.into_iter().collect();

    // Index every ground atom.
    let predicates: BTreeSet<(String, usize)> = clauses
        .iter()
        .flat_map(|c| &c.literals)
        .map(|l| (l.predicate.clone(), l.args.len()))
        .collect();
    let mut atom_index: BTreeMap<(String, Vec<usize>), usize> = BTreeMap::new();
    let mut atom_names: Vec<String> = Vec::new();
    for (pred, arity) in &predicates {
        for tuple in tuples(universe.len(), *arity) {
            if atom_names.len() >= config.max_atoms {
                return BruteForceVerdict::Inapplicable(InapplicableReason::TooManyAtoms {
                    atoms: atom_names.len() + 1,
                });
            }
            let args: Vec<&str> = tuple.iter().map(|i| universe[*i].as_str()).collect();
            let name = if args.is_empty() {
                pred.clone()
            } else {
                format!("{pred}({})", args.join(", "))
            };
            atom_index.insert((pred.clone(), tuple), atom_names.len());
            atom_names.push(name);
        }
    }
    let atom_count = atom_names.len();

    let constant_index: BTreeMap<&str, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();

    // Ground every clause; an instance is a pair of positive/negative masks.
    let mut instances: BTreeSet<(u64, u64)> = BTreeSet::new();
    for clause in &clauses {
        let vars: Vec<String> = clause.variables().into_iter().collect();
        for assignment in tuples(universe.len(), vars.len()) {
            if instances.len() > config.max_instances {
                return BruteForceVerdict::Inapplicable(InapplicableReason::TooManyInstances);
            }
            let binding: BTreeMap<&str, usize> = vars
                .iter()
                .map(String::as_str)
                .zip(assignment.iter().copied())
                .collect();
            let mut pos = 0u64;
            let mut neg = 0u64;
            for lit in &clause.literals {
                let index = ground_atom_index(lit, &binding, &constant_index, &atom_index);
                if lit.positive {
                    pos |= 1 << index;
                } else {
                    neg |= 1 << index;
                }
            }
            if pos & neg != 0 {
                continue; // ground tautology, satisfied everywhere
            }
            instances.insert((pos, neg));
        }
    }
    let instances: Vec<(u64, u64)> = instances.into_iter().collect();

    // A model of premises + negated hypothesis is a countermodel to the
    // entailment; none existing means entailed.
    let full: u64 = if atom_count == 64 { u64::MAX } else { (1u64 << atom_count) - 1 };
    for model in 0..=full {
        let satisfied = instances
            .iter()
            .all(|(pos, neg)| model & pos != 0 || !model & neg & full != 0);
        if satisfied {
            let true_atoms = (0..atom_count)
                .filter(|i| model & (1 << i) != 0)
                .map(|i| atom_names[i].clone())
                .collect();
            return BruteForceVerdict::Countermodel(Countermodel {
                universe,
                true_atoms,
            });
        }
        if model == full {
            break;
        }
    }
    BruteForceVerdict::Entailed
}

fn has_function(term: &Term) -> bool {
    matches!(term, Term::Function(..))
}

fn ground_atom_index(
    lit: &Literal,
    binding: &BTreeMap<&str, usize>,
    constant_index: &BTreeMap<&str, usize>,
    atom_index: &BTreeMap<(String, Vec<usize>), usize>,
) -> usize {
    let tuple: Vec<usize> = lit
        .args
        .iter()
        .map(|arg| match arg {
            Term::Variable(name) => binding[name.as_str()],
            Term::Constant(name) => constant_index[name.as_str()],
            Term::Function(..) => unreachable!("function-free checked earlier"),
        })
        .collect();
    atom_index[&(lit.predicate.clone(), tuple)]
}

fn tuples(universe: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * universe);
        for prefix in &out {
            for element in 0..universe {
                let mut tuple = prefix.clone();
                tuple.push(element);
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}
