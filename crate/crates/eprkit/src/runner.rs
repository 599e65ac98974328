//! End-to-end evaluation: top-1 checks, combination search, oracle
//! selection, candidate scores, and arbitrariness diagnostics over the
//! top-1 parses, plus the report writers.

use crate::arbitrariness::{corpus_arity_report, unique_predicates_per_sentence, ArityReport};
use crate::dataset::Dataset;
use crate::fol::Formula;
use crate::metrics::{
    build_report, evaluate_pairs, solve_oracle, Backend, EprReport, EvalError, VerdictCache,
};
use crate::scoring::{score_candidates, CandidateScore, ScoringError};
use serde::Serialize;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct EvalOptions {
    /// Candidate cutoff per sentence.
    pub k: usize,
    /// Enumerate every preserving combination instead of stopping at the
    /// first one per pair.
    pub exhaustive: bool,
    /// Compute candidate scores (forces exhaustive enumeration).
    pub emit_scores: bool,
    pub oracle_time_limit: Duration,
    /// Worker threads for the pair fan-out; 0 takes the pool default.
    pub workers: usize,
    /// Weight the mean arity entropy by predicate frequency.
    pub weighted_arity: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k: 16,
            exhaustive: false,
            emit_scores: false,
            oracle_time_limit: Duration::from_secs(600),
            workers: 0,
            weighted_arity: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArbitrarinessSummary {
    /// Sentences whose top-1 candidate parsed.
    pub sentence_count: usize,
    pub unique_predicates_per_sentence: Option<f64>,
    pub arity: Option<ArityReport>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunStats {
    pub prover_calls: u64,
    pub cache_hits: u64,
    pub elapsed: Duration,
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub report: EprReport,
    pub scores: Option<Vec<CandidateScore>>,
    pub arbitrariness: ArbitrarinessSummary,
    pub stats: RunStats,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Run the whole pipeline over a dataset.
pub fn run_eval(
    dataset: &Dataset,
    backend: &Backend,
    cache: &VerdictCache,
    options: &EvalOptions,
) -> Result<EvalOutcome, RunError> {
    let started = Instant::now();
    let exhaustive = options.exhaustive || options.emit_scores;

    let pair_reports = evaluate_pairs(
        dataset,
        options.k,
        exhaustive,
        cache,
        backend,
        options.workers,
    )?;
    let oracle = solve_oracle(dataset, &pair_reports, options.k, options.oracle_time_limit);
    let report = build_report(dataset, options.k, pair_reports, oracle);

    let scores = if options.emit_scores {
        Some(score_candidates(dataset, &report.pairs)?)
    } else {
        None
    };

    let arbitrariness = arbitrariness_over_top1(dataset, options.weighted_arity);

    Ok(EvalOutcome {
        report,
        scores,
        arbitrariness,
        stats: RunStats {
            prover_calls: cache.prover_calls(),
            cache_hits: cache.cache_hits(),
            elapsed: started.elapsed(),
        },
    })
}

/// The diagnostics run over the top-1 parse of each sentence; sentences
/// whose top-1 output failed to parse contribute nothing.
pub fn arbitrariness_over_top1(dataset: &Dataset, weighted: bool) -> ArbitrarinessSummary {
    let formulas: Vec<Formula> = dataset
        .sentences
        .iter()
        .filter_map(|s| s.top_candidate().and_then(|c| c.formula.clone()))
        .collect();
    ArbitrarinessSummary {
        sentence_count: formulas.len(),
        unique_predicates_per_sentence: unique_predicates_per_sentence(&formulas).ok(),
        arity: corpus_arity_report(&formulas, weighted).ok(),
    }
}

/// Full machine-readable report. Field order is fixed by the types, so the
/// output is byte-stable for identical inputs.
#[derive(Serialize)]
pub struct FullReport<'a> {
    pub dataset: &'a str,
    #[serde(flatten)]
    pub epr: &'a EprReport,
    pub arbitrariness: &'a ArbitrarinessSummary,
}

pub fn render_report_json(dataset_name: &str, outcome: &EvalOutcome) -> String {
    let full = FullReport {
        dataset: dataset_name,
        epr: &outcome.report,
        arbitrariness: &outcome.arbitrariness,
    };
    let mut text = serde_json::to_string_pretty(&full).expect("report serializes");
    text.push('\n');
    text
}

/// One-row CSV summary of the dataset-level ratios.
pub fn render_summary_csv(dataset_name: &str, report: &EprReport) -> String {
    let mut out = String::from(
        "dataset,pairs,k,epr_preserved,epr,epr_at_k_preserved,epr_at_k,\
         oracle_successes,epr_at_k_oracle,oracle_status\n",
    );
    let status = match report.oracle_status {
        crate::metrics::OracleStatus::Exact => "exact",
        crate::metrics::OracleStatus::LowerBound => "lower_bound",
    };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        dataset_name,
        report.pair_count,
        report.k,
        report.epr_preserved,
        report.epr,
        report.epr_at_k_preserved,
        report.epr_at_k,
        report.epr_at_k_oracle_successes,
        report.epr_at_k_oracle,
        status
    )
    .expect("string writes");
    out
}

pub fn render_arbitrariness_csv(summary: &ArbitrarinessSummary) -> String {
    let mut out = String::from("predicate,entropy_bits,occurrences,histogram\n");
    if let Some(arity) = &summary.arity {
        for row in &arity.rows {
            let histogram: Vec<String> = row
                .histogram
                .counts
                .iter()
                .map(|(arity, count)| format!("{arity}:{count}"))
                .collect();
            writeln!(
                out,
                "{},{},{},{}",
                row.predicate,
                row.entropy_bits,
                row.occurrences,
                histogram.join(";")
            )
            .expect("string writes");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ingest_reader;
    use crate::metrics::Backend;
    use crate::prover::ResourceBudget;

    const SYLLOGISM: &str = r#"
{"type": "sentence", "sentence_id": "s1", "text": "Socrates is human."}
{"type": "sentence", "sentence_id": "s2", "text": "All humans are mortal."}
{"type": "sentence", "sentence_id": "s3", "text": "Socrates is mortal."}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "Human(socrates)", "logprob": -0.2}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "all x. (Human(x) -> Mortal(x))", "logprob": -0.3}
{"type": "candidate", "sentence_id": "s3", "index": 1, "fol": "Mortal(socrates)", "logprob": -0.1}
{"type": "pair", "pair_id": "b1", "premises": ["s1", "s2"], "hypothesis": "s3", "label": "entailment"}
"#;

    #[test]
    fn end_to_end_on_a_one_pair_dataset() {
        let dataset = ingest_reader(std::io::Cursor::new(SYLLOGISM.as_bytes())).unwrap();
        let cache = VerdictCache::in_memory();
        let backend = Backend::Internal {
            budget: ResourceBudget::default(),
        };
        let outcome = run_eval(&dataset, &backend, &cache, &EvalOptions::default()).unwrap();
        assert_eq!(outcome.report.epr, 1.0);
        assert_eq!(outcome.report.epr_at_k, 1.0);
        assert_eq!(outcome.report.epr_at_k_oracle, 1.0);
        assert_eq!(outcome.stats.prover_calls, 1);
        let arb = &outcome.arbitrariness;
        assert_eq!(arb.sentence_count, 3);
        // Human and Mortal over three sentences.
        assert!((arb.unique_predicates_per_sentence.unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn reports_are_byte_stable() {
        let dataset = ingest_reader(std::io::Cursor::new(SYLLOGISM.as_bytes())).unwrap();
        let backend = Backend::Internal {
            budget: ResourceBudget::default(),
        };
        let first = {
            let cache = VerdictCache::in_memory();
            let outcome = run_eval(&dataset, &backend, &cache, &EvalOptions::default()).unwrap();
            render_report_json("syllogism", &outcome)
        };
        let second = {
            let cache = VerdictCache::in_memory();
            let outcome = run_eval(&dataset, &backend, &cache, &EvalOptions::default()).unwrap();
            render_report_json("syllogism", &outcome)
        };
        assert_eq!(first, second);
    }
}
