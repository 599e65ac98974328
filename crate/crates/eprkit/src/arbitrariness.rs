//! Diagnostics for predicate arbitrariness: how many distinct predicate
//! names a corpus spends per sentence, and how consistently each predicate
//! keeps one arity.

use crate::fol::Formula;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArbitrarinessError {
    #[error("the corpus is empty")]
    EmptyCorpus,
}

/// Count of occurrences per arity for one predicate name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ArityHistogram {
    pub counts: BTreeMap<usize, u64>,
}

impl ArityHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Distinct predicate names across the corpus divided by the sentence
/// count. Names only: arity variation does not add to the numerator, and
/// names are case-sensitive.
pub fn unique_predicates_per_sentence(
    formulas_by_sentence: &[Formula],
) -> Result<f64, ArbitrarinessError> {
    if formulas_by_sentence.is_empty() {
        return Err(ArbitrarinessError::EmptyCorpus);
    }
    let names: std::collections::BTreeSet<String> = formulas_by_sentence
        .iter()
        .flat_map(|f| f.signatures().predicates)
        .map(|p| p.name)
        .collect();
    Ok(names.len() as f64 / formulas_by_sentence.len() as f64)
}

/// Shannon entropy (bits) of the empirical arity distribution.
pub fn arity_entropy(histogram: &ArityHistogram) -> f64 {
    let total = histogram.total();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let bits: f64 = histogram
        .counts
        .values()
        .map(|&count| {
            let p = count as f64 / total;
            if p == 0.0 {
                0.0
            } else {
                -p * p.log2()
            }
        })
        .sum();
    // A point distribution yields -0.0; report plain zero.
    bits.max(0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PredicateArityRow {
    pub predicate: String,
    pub entropy_bits: f64,
    pub occurrences: u64,
    pub histogram: ArityHistogram,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArityReport {
    /// Mean entropy over distinct predicate names, unweighted by frequency
    /// unless `weighted` was requested.
    pub mean_entropy_bits: f64,
    pub weighted: bool,
    pub predicate_count: usize,
    /// Sorted by entropy descending, ties by name.
    pub rows: Vec<PredicateArityRow>,
}

/// Collect per-predicate arity histograms over a corpus of formulas.
pub fn arity_histograms(formulas: &[Formula]) -> BTreeMap<String, ArityHistogram> {
    let mut histograms: BTreeMap<String, ArityHistogram> = BTreeMap::new();
    for formula in formulas {
        collect_occurrences(formula, &mut histograms);
    }
    histograms
}

fn collect_occurrences(f: &Formula, out: &mut BTreeMap<String, ArityHistogram>) {
    match f {
        Formula::Atom { predicate, args } => {
            *out.entry(predicate.clone())
                .or_default()
                .counts
                .entry(args.len())
                .or_insert(0) += 1;
        }
        Formula::Not(inner) => collect_occurrences(inner, out),
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Implies(l, r)
        | Formula::Iff(l, r) => {
            collect_occurrences(l, out);
            collect_occurrences(r, out);
        }
        Formula::ForAll(_, body) | Formula::Exists(_, body) => collect_occurrences(body, out),
    }
}

/// Mean arity entropy over the corpus plus the per-predicate table.
pub fn corpus_arity_report(
    formulas: &[Formula],
    weighted: bool,
) -> Result<ArityReport, ArbitrarinessError> {
    let histograms = arity_histograms(formulas);
    if histograms.is_empty() {
        return Err(ArbitrarinessError::EmptyCorpus);
    }
    let mut rows: Vec<PredicateArityRow> = histograms
        .into_iter()
        .map(|(predicate, histogram)| PredicateArityRow {
            predicate,
            entropy_bits: arity_entropy(&histogram),
            occurrences: histogram.total(),
            histogram,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.entropy_bits
            .partial_cmp(&a.entropy_bits)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.predicate.cmp(&b.predicate))
    });
    let mean = if weighted {
        let total: u64 = rows.iter().map(|r| r.occurrences).sum();
        rows.iter()
            .map(|r| r.entropy_bits * r.occurrences as f64)
            .sum::<f64>()
            / total as f64
    } else {
        rows.iter().map(|r| r.entropy_bits).sum::<f64>() / rows.len() as f64
    };
    Ok(ArityReport {
        mean_entropy_bits: mean,
        weighted,
        predicate_count: rows.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    fn corpus(texts: &[&str]) -> Vec<Formula> {
        texts.iter().map(|t| parse_formula(t).unwrap()).collect()
    }

    #[test]
    fn consistent_naming_scores_one_per_sentence() {
        let formulas = corpus(&[
            "all x. (Eruption(x) -> Ash(x))",
            "all x. (Ash(x) -> BlocksSunlight(x))",
            "all x. (Eruption(x) -> BlocksSunlight(x))",
        ]);
        let value = unique_predicates_per_sentence(&formulas).unwrap();
        assert!((value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn split_concepts_raise_the_ratio() {
        // `AshCloud` and `Ash` name the same concept separately: four names
        // over three sentences.
        let formulas = corpus(&[
            "all x. (Eruption(x) -> AshCloud(x))",
            "all x. (Ash(x) -> BlocksSunlight(x))",
            "all x. (Eruption(x) -> BlocksSunlight(x))",
        ]);
        let value = unique_predicates_per_sentence(&formulas).unwrap();
        assert!((value - 4.0 / 3.0).abs() < 1e-9, "{value}");
    }

    #[test]
    fn entropy_of_mixed_arity_predicate() {
        let histogram = ArityHistogram {
            counts: [(2, 10), (3, 4)].into_iter().collect(),
        };
        let value = arity_entropy(&histogram);
        assert!((value - 0.8631).abs() < 0.005, "{value}");
    }

    #[test]
    fn single_arity_has_zero_entropy() {
        let histogram = ArityHistogram {
            counts: [(2, 7)].into_iter().collect(),
        };
        assert_eq!(arity_entropy(&histogram), 0.0);
    }

    #[test]
    fn uniform_two_arity_split_is_one_bit() {
        let histogram = ArityHistogram {
            counts: [(1, 5), (2, 5)].into_iter().collect(),
        };
        assert!((arity_entropy(&histogram) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_bounded_by_log_of_support() {
        let histogram = ArityHistogram {
            counts: [(1, 3), (2, 9), (4, 1)].into_iter().collect(),
        };
        assert!(arity_entropy(&histogram) <= (3f64).log2() + 1e-12);
    }

    #[test]
    fn report_averages_per_predicate_unweighted() {
        // One predicate with the 10/4 split, one with a single arity.
        let mut formulas = Vec::new();
        for _ in 0..10 {
            formulas.push(parse_formula("all x y. CausesCycles(x, y)").unwrap());
        }
        for _ in 0..4 {
            formulas.push(parse_formula("all x y z. CausesCycles(x, y, z)").unwrap());
        }
        for _ in 0..7 {
            formulas.push(parse_formula("all x. Stable(x)").unwrap());
        }
        let report = corpus_arity_report(&formulas, false).unwrap();
        assert_eq!(report.predicate_count, 2);
        let expected = (0.863_120_568_566_631_4 + 0.0) / 2.0;
        assert!((report.mean_entropy_bits - expected).abs() < 1e-9);
        assert_eq!(report.rows[0].predicate, "CausesCycles");
    }

    #[test]
    fn metrics_ignore_reordering_and_renaming() {
        let a = corpus(&["all x. (P(x) -> Q(x))", "P(c)"]);
        let b = corpus(&["P(d)", "all y. (P(y) -> Q(y))"]);
        assert_eq!(
            unique_predicates_per_sentence(&a).unwrap(),
            unique_predicates_per_sentence(&b).unwrap()
        );
        let ra = corpus_arity_report(&a, false).unwrap();
        let rb = corpus_arity_report(&b, false).unwrap();
        assert_eq!(ra.mean_entropy_bits, rb.mean_entropy_bits);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            unique_predicates_per_sentence(&[]),
            Err(ArbitrarinessError::EmptyCorpus)
        ));
        assert!(matches!(
            corpus_arity_report(&[], false),
            Err(ArbitrarinessError::EmptyCorpus)
        ));
    }
}
