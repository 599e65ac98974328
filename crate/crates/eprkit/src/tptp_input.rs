//! Reading TPTP FOF problems into the native AST.
//!
//! This covers the fragment the toolkit itself emits (plain predicates,
//! `~ & | => <= <=> <~> ~& ~|`, `!`/`?` binders) plus the usual axiom role
//! spellings, which is enough to replay exported problems and to let the
//! CLI act as an SZS backend for another process. Arithmetic, equality,
//! `$true`/`$false`, and includes are rejected.

use crate::fol::{Formula, Term};
use tptp::common::{AtomicWord, Name, NonassocConnective};
use tptp::top::{AnnotatedFormula, TPTPInput};
use tptp::{fof, TPTPIterator};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TptpReadError {
    #[error("TPTP syntax error near byte {position}")]
    Syntax { position: usize },
    #[error("unsupported TPTP construct: {0}")]
    Unsupported(String),
    #[error("more than one conjecture in the problem")]
    MultipleConjectures,
}

/// A parsed TPTP problem: named axioms plus at most one (possibly
/// pre-negated) conjecture.
#[derive(Debug, Default)]
pub struct TptpProblem {
    pub axioms: Vec<(String, Formula)>,
    pub conjecture: Option<(String, Formula)>,
    /// A `negated_conjecture` input: the goal with the negation already
    /// applied.
    pub negated_conjecture: Option<(String, Formula)>,
}

pub fn read_tptp_problem(bytes: &[u8]) -> Result<TptpProblem, TptpReadError> {
    let mut problem = TptpProblem::default();
    let total = bytes.len();
    let mut parser = TPTPIterator::<()>::new(bytes);
    loop {
        let Some(input) = parser.next() else { break };
        let position = total - parser.remaining.len();
        let input = input.map_err(|_| TptpReadError::Syntax { position })?;
        match input {
            TPTPInput::Include(_) => {
                return Err(TptpReadError::Unsupported("include directive".to_string()));
            }
            TPTPInput::Annotated(annotated) => match *annotated {
                AnnotatedFormula::Fof(fof_annotated) => {
                    let name = name_to_string(&fof_annotated.0.name);
                    let role = fof_annotated.0.role.0 .0;
                    let formula = convert_formula(&(fof_annotated.0.formula).0)?;
                    match role {
                        "axiom" | "hypothesis" | "definition" | "lemma" => {
                            problem.axioms.push((name, formula));
                        }
                        "conjecture" => {
                            if problem.conjecture.is_some() {
                                return Err(TptpReadError::MultipleConjectures);
                            }
                            problem.conjecture = Some((name, formula));
                        }
                        "negated_conjecture" => {
                            if problem.negated_conjecture.is_some() {
                                return Err(TptpReadError::MultipleConjectures);
                            }
                            problem.negated_conjecture = Some((name, formula));
                        }
                        other => {
                            return Err(TptpReadError::Unsupported(format!(
                                "formula role {other:?}"
                            )));
                        }
                    }
                }
                AnnotatedFormula::Cnf(_) => {
                    return Err(TptpReadError::Unsupported("cnf input".to_string()));
                }
                AnnotatedFormula::Tfx(_) => {
                    return Err(TptpReadError::Unsupported("tfx input".to_string()));
                }
            },
        }
    }
    if !parser.remaining.is_empty() {
        return Err(TptpReadError::Syntax {
            position: total - parser.remaining.len(),
        });
    }
    Ok(problem)
}

fn name_to_string(name: &Name) -> String {
    match name {
        Name::AtomicWord(AtomicWord::Lower(w)) => w.0.to_string(),
        Name::AtomicWord(AtomicWord::SingleQuoted(q)) => q.0.to_string(),
        Name::Integer(i) => i.0.to_string(),
    }
}

fn atomic_word(word: &AtomicWord) -> String {
    match word {
        AtomicWord::Lower(w) => w.0.to_string(),
        AtomicWord::SingleQuoted(q) => q.0.to_string(),
    }
}

fn convert_formula(f: &fof::LogicFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::LogicFormula::Binary(binary) => convert_binary(binary),
        fof::LogicFormula::Unary(unary) => convert_unary(unary),
        fof::LogicFormula::Unitary(unitary) => convert_unitary(unitary),
    }
}

fn convert_binary(f: &fof::BinaryFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::BinaryFormula::Assoc(fof::BinaryAssoc::And(ands)) => {
            fold_assoc(&ands.0, Formula::and)
        }
        fof::BinaryFormula::Assoc(fof::BinaryAssoc::Or(ors)) => fold_assoc(&ors.0, Formula::or),
        fof::BinaryFormula::Nonassoc(nonassoc) => {
            let left = convert_unit(&nonassoc.left)?;
            let right = convert_unit(&nonassoc.right)?;
            Ok(match nonassoc.op {
                NonassocConnective::LRImplies => Formula::implies(left, right),
                NonassocConnective::RLImplies => Formula::implies(right, left),
                NonassocConnective::Equivalent => Formula::iff(left, right),
                NonassocConnective::NotEquivalent => Formula::not(Formula::iff(left, right)),
                NonassocConnective::NotOr => Formula::not(Formula::or(left, right)),
                NonassocConnective::NotAnd => Formula::not(Formula::and(left, right)),
            })
        }
    }
}

fn fold_assoc(
    units: &[fof::UnitFormula],
    combine: fn(Formula, Formula) -> Formula,
) -> Result<Formula, TptpReadError> {
    let mut iter = units.iter();
    let first = iter
        .next()
        .ok_or_else(|| TptpReadError::Unsupported("empty associative formula".to_string()))?;
    let mut formula = convert_unit(first)?;
    for unit in iter {
        formula = combine(formula, convert_unit(unit)?);
    }
    Ok(formula)
}

fn convert_unit(f: &fof::UnitFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::UnitFormula::Unitary(unitary) => convert_unitary(unitary),
        fof::UnitFormula::Unary(unary) => convert_unary(unary),
    }
}

fn convert_unary(f: &fof::UnaryFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::UnaryFormula::Unary(_, inner) => Ok(Formula::not(convert_unit(inner)?)),
        fof::UnaryFormula::InfixUnary(_) => {
            Err(TptpReadError::Unsupported("inequality".to_string()))
        }
    }
}

fn convert_unitary(f: &fof::UnitaryFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::UnitaryFormula::Quantified(quantified) => {
            let vars: Vec<String> = quantified
                .bound
                .0
                .iter()
                .map(|v| v.0 .0.to_string())
                .collect();
            let body = convert_unit(&quantified.formula)?;
            Ok(match quantified.quantifier {
                fof::Quantifier::Forall => Formula::ForAll(vars, Box::new(body)),
                fof::Quantifier::Exists => Formula::Exists(vars, Box::new(body)),
            })
        }
        fof::UnitaryFormula::Atomic(atomic) => convert_atomic(atomic),
        fof::UnitaryFormula::Parenthesised(inner) => convert_formula(inner),
    }
}

fn convert_atomic(f: &fof::AtomicFormula) -> Result<Formula, TptpReadError> {
    match f {
        fof::AtomicFormula::Plain(plain) => match &plain.0 {
            fof::PlainTerm::Constant(c) => Ok(Formula::Atom {
                predicate: atomic_word(&c.0 .0),
                args: Vec::new(),
            }),
            fof::PlainTerm::Function(functor, args) => Ok(Formula::Atom {
                predicate: atomic_word(&functor.0),
                args: convert_args(&args.0)?,
            }),
        },
        fof::AtomicFormula::Defined(_) => Err(TptpReadError::Unsupported(
            "defined atom (equality or $true/$false)".to_string(),
        )),
        fof::AtomicFormula::System(_) => {
            Err(TptpReadError::Unsupported("system atom".to_string()))
        }
    }
}

fn convert_args(args: &[fof::Term]) -> Result<Vec<Term>, TptpReadError> {
    args.iter().map(convert_term).collect()
}

fn convert_term(term: &fof::Term) -> Result<Term, TptpReadError> {
    match term {
        fof::Term::Variable(v) => Ok(Term::Variable(v.0 .0.to_string())),
        fof::Term::Function(function) => match &**function {
            fof::FunctionTerm::Plain(fof::PlainTerm::Constant(c)) => {
                Ok(Term::Constant(atomic_word(&c.0 .0)))
            }
            fof::FunctionTerm::Plain(fof::PlainTerm::Function(functor, args)) => Ok(
                Term::Function(atomic_word(&functor.0), convert_args(&args.0)?),
            ),
            fof::FunctionTerm::System(_) | fof::FunctionTerm::Defined(_) => Err(
                TptpReadError::Unsupported("system or defined term".to_string()),
            ),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, to_tptp, TptpRole};

    #[test]
    fn reads_emitted_statements_back() {
        for text in [
            "Planet(mars)",
            "all x. (H(x) -> M(x))",
            "exists x y. (Female(x) & Harp(y) & Holds(x, y))",
            "all x. (P(x) <-> -Q(x))",
            "-(P(a) | Q(a))",
        ] {
            let f = parse_formula(text).unwrap();
            let stmt = to_tptp(&f, TptpRole::Axiom, "a1").unwrap();
            let problem = read_tptp_problem(stmt.as_bytes()).unwrap();
            assert_eq!(problem.axioms.len(), 1, "statement: {stmt}");
        }
    }

    #[test]
    fn splits_axioms_and_conjecture() {
        let text = "\
fof(p1, axiom, h(s)).
fof(p2, axiom, ! [X] : (h(X) => m(X))).
fof(goal, conjecture, m(s)).
";
        let problem = read_tptp_problem(text.as_bytes()).unwrap();
        assert_eq!(problem.axioms.len(), 2);
        assert_eq!(problem.axioms[0].0, "p1");
        let (name, conjecture) = problem.conjecture.unwrap();
        assert_eq!(name, "goal");
        assert_eq!(conjecture.to_string(), "m(s)");
    }

    #[test]
    fn rejects_equality() {
        let text = "fof(a, axiom, sk1 = sk2).";
        assert!(matches!(
            read_tptp_problem(text.as_bytes()),
            Err(TptpReadError::Unsupported(_))
        ));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            read_tptp_problem(b"fof(a, axiom, )."),
            Err(TptpReadError::Syntax { .. })
        ));
    }

    #[test]
    fn reverse_implication_swaps_sides() {
        let text = "fof(a, axiom, p(c) <= q(c)).";
        let problem = read_tptp_problem(text.as_bytes()).unwrap();
        assert_eq!(problem.axioms[0].1.to_string(), "q(c) -> p(c)");
    }
}
