//! Sentence-level candidate scores and the pairwise margin ranking loss.
//!
//! A candidate's score is the number of preserving combinations it appears
//! in, summed over every pair that references its sentence; syntax errors
//! score -1. The ranking loss sorts candidates by score and charges
//! `max(p_j - p_i + margin * (j - i), 0)` for every sorted pair `i < j`
//! over length-normalized log-probabilities, pushing model probabilities
//! to follow the scores.

use crate::dataset::Dataset;
use crate::metrics::PairReport;
use serde::Serialize;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("pair {pair_id:?} lacks exhaustive combination detail")]
    MissingDetail { pair_id: String },
    #[error("candidate without a log-probability")]
    MissingLogprob,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateScore {
    pub sentence_id: String,
    pub index: usize,
    /// -1 for syntax errors, otherwise the combination count (>= 0).
    pub score: i64,
}

/// Hyperparameters of the ranking loss. The mixing rate `lambda` weighs
/// this loss against a cross-entropy term in a downstream trainer; it is
/// carried here for that consumer and not applied by [`brio_loss`].
#[derive(Clone, Copy, Debug)]
pub struct LossConfig {
    pub margin: f64,
    pub lambda: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            margin: 0.01,
            lambda: 10.0,
        }
    }
}

/// Score every candidate of every sentence from exhaustive per-pair detail.
///
/// Each preserving combination contributes one count to each of its slots
/// (every premise and the hypothesis), so the positive scores sum to
/// `combinations x (N + 1)` over all pairs.
pub fn score_candidates(
    dataset: &Dataset,
    reports: &[PairReport],
) -> Result<Vec<CandidateScore>, ScoringError> {
    for report in reports {
        if !report.exhaustive {
            return Err(ScoringError::MissingDetail {
                pair_id: report.pair_id.clone(),
            });
        }
    }

    let mut counts: HashMap<(String, usize), i64> = HashMap::new();
    for (pair, report) in dataset.pairs.iter().zip(reports) {
        let ids = pair.sentence_ids();
        for combo in &report.preserving_combinations {
            for (id, index) in ids.iter().zip(combo) {
                *counts.entry((id.to_string(), *index)).or_insert(0) += 1;
            }
        }
    }

    let mut scores = Vec::new();
    for sentence in &dataset.sentences {
        for candidate in &sentence.candidates {
            let score = if candidate.is_syntax_error() {
                -1
            } else {
                counts
                    .get(&(sentence.id.clone(), candidate.index))
                    .copied()
                    .unwrap_or(0)
            };
            scores.push(CandidateScore {
                sentence_id: sentence.id.clone(),
                index: candidate.index,
                score,
            });
        }
    }
    Ok(scores)
}

/// Pairwise hinge ranking loss over one sentence's candidates.
///
/// Candidates are sorted by score descending (ties by higher
/// log-probability, then lower position in the input), and every sorted
/// pair `i < j` contributes `max(p_j - p_i + margin * (j - i), 0)`. Equal
/// scores get no exemption: the margin term applies to every sorted pair.
pub fn brio_loss(
    candidates: &[(Option<f64>, i64)],
    config: &LossConfig,
) -> Result<f64, ScoringError> {
    let mut ranked: Vec<(f64, i64)> = Vec::with_capacity(candidates.len());
    for (logprob, score) in candidates {
        let logprob = logprob.ok_or(ScoringError::MissingLogprob)?;
        ranked.push((logprob, *score));
    }
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut loss = 0.0;
    for i in 0..ranked.len() {
        for j in (i + 1)..ranked.len() {
            let gap = (j - i) as f64;
            loss += (ranked[j].0 - ranked[i].0 + config.margin * gap).max(0.0);
        }
    }
    Ok(loss)
}

#[derive(Serialize)]
struct RankedCandidate<'a> {
    index: usize,
    fol: Option<&'a str>,
    score: i64,
    logprob: Option<f64>,
}

#[derive(Serialize)]
struct RankedRecord<'a> {
    sentence_id: &'a str,
    text: &'a str,
    candidates: Vec<RankedCandidate<'a>>,
}

/// Write the ranked training file: one JSONL record per sentence, in
/// dataset order, candidates sorted by score descending (ties by higher
/// log-probability, then lower index). Re-export of identical inputs is
/// byte-identical.
pub fn export_ranked_training_file(
    dataset: &Dataset,
    scores: &[CandidateScore],
    path: impl AsRef<Path>,
) -> Result<(), ScoringError> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(|source| ScoringError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let rendered = render_ranked(dataset, scores);
    file.write_all(rendered.as_bytes())
        .map_err(|source| ScoringError::Io {
            path: path.display().to_string(),
            source,
        })
}

pub fn render_ranked(dataset: &Dataset, scores: &[CandidateScore]) -> String {
    let score_of: HashMap<(&str, usize), i64> = scores
        .iter()
        .map(|s| ((s.sentence_id.as_str(), s.index), s.score))
        .collect();
    let mut out = String::new();
    for sentence in &dataset.sentences {
        let mut candidates: Vec<RankedCandidate> = sentence
            .candidates
            .iter()
            .map(|c| RankedCandidate {
                index: c.index,
                fol: c.raw.as_deref(),
                score: score_of
                    .get(&(sentence.id.as_str(), c.index))
                    .copied()
                    .unwrap_or(if c.is_syntax_error() { -1 } else { 0 }),
                logprob: c.logprob,
            })
            .collect();
        candidates.sort_by(|a, b| {
            b.score.cmp(&a.score).then(
                b.logprob
                    .unwrap_or(f64::NEG_INFINITY)
                    .partial_cmp(&a.logprob.unwrap_or(f64::NEG_INFINITY))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.index.cmp(&b.index)),
            )
        });
        let record = RankedRecord {
            sentence_id: &sentence.id,
            text: &sentence.text,
            candidates,
        };
        out.push_str(&serde_json::to_string(&record).expect("records serialize"));
        out.push('\n');
    }
    out
}
