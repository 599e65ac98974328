//! Shared helpers for the integration suites: seeded random formula and
//! dataset generators, a raw (ungated) prover entry point, and an
//! exhaustive selection enumerator used as the oracle solver's reference.

#![allow(dead_code)]

use eprkit::dataset::{ingest_reader, Dataset};
use eprkit::fol::Formula;
use eprkit::metrics::PairReport;
use eprkit::prover::{refute, Clausifier, ProofVerdict, ResourceBudget};
use rand::rngs::StdRng;
use rand::Rng;
use std::fmt::Write as _;

/// Prove premises |- hypothesis with no vocabulary or used-premise gating.
pub fn raw_prove(premises: &[Formula], hypothesis: &Formula, budget: &ResourceBudget) -> ProofVerdict {
    let negated = Formula::not(hypothesis.clone());
    let mut clausifier = Clausifier::new();
    for f in premises {
        clausifier.reserve_symbols(f);
    }
    clausifier.reserve_symbols(&negated);
    let mut premise_clauses = Vec::new();
    for (i, f) in premises.iter().enumerate() {
        premise_clauses.extend(clausifier.clausify(f, &format!("p{}", i + 1)).unwrap());
    }
    let goal_clauses = clausifier.clausify(&negated, "goal").unwrap();
    refute(&premise_clauses, &goal_clauses, budget)
}

/// Random closed formula over unary P, Q and binary R with constants a, b,
/// c. Depth counts connective/quantifier nesting.
pub fn random_formula(rng: &mut StdRng, depth: usize, scope: &mut Vec<String>) -> Formula {
    if depth == 0 {
        return random_atom(rng, scope);
    }
    match rng.gen_range(0..10) {
        0 | 1 => random_atom(rng, scope),
        2 => Formula::not(random_formula(rng, depth - 1, scope)),
        3 | 4 => Formula::and(
            random_formula(rng, depth - 1, scope),
            random_formula(rng, depth - 1, scope),
        ),
        5 => Formula::or(
            random_formula(rng, depth - 1, scope),
            random_formula(rng, depth - 1, scope),
        ),
        6 | 7 => Formula::implies(
            random_formula(rng, depth - 1, scope),
            random_formula(rng, depth - 1, scope),
        ),
        _ => {
            let var = format!("x{}", scope.len());
            scope.push(var.clone());
            let body = random_formula(rng, depth - 1, scope);
            scope.pop();
            if rng.gen_bool(0.7) {
                Formula::ForAll(vec![var], Box::new(body))
            } else {
                Formula::Exists(vec![var], Box::new(body))
            }
        }
    }
}

fn random_atom(rng: &mut StdRng, scope: &[String]) -> Formula {
    let term = |rng: &mut StdRng, scope: &[String]| {
        if !scope.is_empty() && rng.gen_bool(0.6) {
            eprkit::fol::Term::Variable(scope[rng.gen_range(0..scope.len())].clone())
        } else {
            let constants = ["a", "b", "c"];
            eprkit::fol::Term::Constant(constants[rng.gen_range(0..3)].to_string())
        }
    };
    match rng.gen_range(0..3) {
        0 => Formula::atom("P", vec![term(rng, scope)]),
        1 => Formula::atom("Q", vec![term(rng, scope)]),
        _ => Formula::atom("R", vec![term(rng, scope), term(rng, scope)]),
    }
}

/// A random entailment instance: one or two premises and a hypothesis.
pub fn random_instance(rng: &mut StdRng) -> (Vec<Formula>, Formula) {
    let premise_count = rng.gen_range(1..=2);
    let mut premises = Vec::with_capacity(premise_count);
    for _ in 0..premise_count {
        let depth = rng.gen_range(1..=3);
        premises.push(random_formula(rng, depth, &mut Vec::new()));
    }
    let depth = rng.gen_range(1..=3);
    let hypothesis = random_formula(rng, depth, &mut Vec::new());
    (premises, hypothesis)
}

/// Random dataset with shared sentences: every sentence draws candidates
/// from a small pool of ground facts, and pairs draw overlapping sentence
/// subsets, so preserving combinations collide on shared sentences.
pub fn random_dataset(rng: &mut StdRng, sentence_count: usize, k: usize, pair_count: usize) -> Dataset {
    let pool = [
        "Alpha(a)",
        "Beta(a)",
        "Gamma(a)",
        "Alpha(b)",
        "Beta(b)",
        "Alpha(a) & Beta(a)",
        "Beta(a) & Gamma(a)",
    ];
    let mut text = String::new();
    for s in 0..sentence_count {
        writeln!(
            text,
            r#"{{"type": "sentence", "sentence_id": "s{s}", "text": "sentence {s}"}}"#
        )
        .unwrap();
        for index in 1..=k {
            let fol = if rng.gen_bool(0.1) {
                "Alpha(".to_string() // syntax error
            } else {
                pool[rng.gen_range(0..pool.len())].to_string()
            };
            let logprob = -0.1 * index as f64;
            writeln!(
                text,
                r#"{{"type": "candidate", "sentence_id": "s{s}", "index": {index}, "fol": "{fol}", "logprob": {logprob}}}"#
            )
            .unwrap();
        }
    }
    for p in 0..pair_count {
        let premise_count = rng.gen_range(1..=2.min(sentence_count - 1));
        let mut ids: Vec<usize> = Vec::new();
        while ids.len() < premise_count + 1 {
            let s = rng.gen_range(0..sentence_count);
            if !ids.contains(&s) {
                ids.push(s);
            }
        }
        let premises: Vec<String> = ids[..premise_count]
            .iter()
            .map(|s| format!("\"s{s}\""))
            .collect();
        writeln!(
            text,
            r#"{{"type": "pair", "pair_id": "b{p}", "premises": [{}], "hypothesis": "s{}", "label": "entailment"}}"#,
            premises.join(", "),
            ids[premise_count]
        )
        .unwrap();
    }
    ingest_reader(std::io::Cursor::new(text.into_bytes())).expect("generated dataset is valid")
}

/// Exhaustive reference for the oracle: try every assignment of one
/// candidate index per sentence and count satisfied pairs.
pub fn brute_force_oracle(dataset: &Dataset, reports: &[PairReport], k: usize) -> usize {
    let sentences: Vec<&str> = dataset.sentences.iter().map(|s| s.id.as_str()).collect();
    let choices: Vec<Vec<usize>> = dataset
        .sentences
        .iter()
        .map(|s| {
            let mut indices: Vec<usize> = s.candidates.iter().map(|c| c.index).collect();
            indices.truncate(k);
            indices
        })
        .collect();
    let mut assignment = vec![0usize; sentences.len()];
    let mut best = 0;
    loop {
        let selection: Vec<usize> = assignment
            .iter()
            .zip(&choices)
            .map(|(i, list)| list[*i])
            .collect();
        let satisfied = dataset
            .pairs
            .iter()
            .zip(reports)
            .filter(|(pair, report)| {
                let ids = pair.sentence_ids();
                report.preserving_combinations.iter().any(|combo| {
                    ids.iter().zip(combo).all(|(id, index)| {
                        let pos = sentences.iter().position(|s| s == id).unwrap();
                        selection[pos] == *index
                    })
                })
            })
            .count();
        best = best.max(satisfied);

        let mut pos = assignment.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < choices[pos].len() {
                break;
            }
            assignment[pos] = 0;
        }
    }
}
