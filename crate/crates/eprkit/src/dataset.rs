//! JSONL dataset ingestion.
//!
//! A dataset file carries three record kinds, discriminated by a `type`
//! field: `sentence` (id and text), `candidate` (one model output for a
//! sentence: FOL string, length-normalized log-probability, 1-based index),
//! and `pair` (premise sentence ids, hypothesis sentence id, label).
//! Ingestion parses every candidate's FOL string; unparseable or missing
//! strings become syntax-error markers rather than errors, since downstream
//! scoring assigns them -1.

use crate::entailment::Label;
use crate::fol::{parse_formula, Formula};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("pair {pair_id:?} references undeclared sentences: {}", .ids.join(", "))]
    DanglingReference { pair_id: String, ids: Vec<String> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DatasetRecord {
    Sentence {
        sentence_id: String,
        text: String,
    },
    Candidate {
        sentence_id: String,
        index: usize,
        fol: Option<String>,
        #[serde(default)]
        logprob: Option<f64>,
        #[serde(default)]
        syntax_error: bool,
    },
    Pair {
        pair_id: String,
        premises: Vec<String>,
        hypothesis: String,
        label: Label,
    },
}

/// One model output for a sentence. `formula` is `None` exactly when the
/// candidate is a syntax error.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub index: usize,
    pub raw: Option<String>,
    pub formula: Option<Formula>,
    pub logprob: Option<f64>,
}

impl Candidate {
    pub fn is_syntax_error(&self) -> bool {
        self.formula.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    /// Sorted by index; indices are dense starting at 1.
    pub candidates: Vec<Candidate>,
}

impl Sentence {
    /// The candidate the model ranks highest: maximal log-probability,
    /// ties broken by the lowest index. Missing log-probabilities compare
    /// lowest.
    pub fn top_candidate(&self) -> Option<&Candidate> {
        self.candidates.iter().reduce(|best, c| {
            let b = best.logprob.unwrap_or(f64::NEG_INFINITY);
            let v = c.logprob.unwrap_or(f64::NEG_INFINITY);
            if v > b {
                c
            } else {
                best
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct Pair {
    pub id: String,
    pub premises: Vec<String>,
    pub hypothesis: String,
    pub label: Label,
}

impl Pair {
    /// Premise sentence ids followed by the hypothesis id.
    pub fn sentence_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.premises.iter().map(String::as_str).collect();
        ids.push(&self.hypothesis);
        ids
    }
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub sentences: Vec<Sentence>,
    pub pairs: Vec<Pair>,
    by_id: HashMap<String, usize>,
}

impl Dataset {
    pub fn sentence(&self, id: &str) -> Option<&Sentence> {
        self.by_id.get(id).map(|i| &self.sentences[*i])
    }

    /// How many pairs reference each sentence.
    pub fn pair_degree(&self, id: &str) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.premises.iter().any(|s| s == id) || p.hypothesis == id)
            .count()
    }
}

pub fn ingest(path: impl AsRef<Path>) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(BufReader::new(file))
}

pub fn ingest_reader(reader: impl BufRead) -> Result<Dataset, IngestError> {
    struct PendingCandidate {
        line: usize,
        index: usize,
        raw: Option<String>,
        formula: Option<Formula>,
        logprob: Option<f64>,
    }

    let mut sentences: Vec<Sentence> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    let mut candidates: HashMap<String, Vec<PendingCandidate>> = HashMap::new();
    let mut candidate_lines: Vec<(usize, String)> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut pair_ids: BTreeSet<String> = BTreeSet::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line_number = lineno + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: "<reader>".to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::Schema {
                line: line_number,
                message: e.to_string(),
            })?;
        match record {
            DatasetRecord::Sentence { sentence_id, text } => {
                if by_id.contains_key(&sentence_id) {
                    return Err(IngestError::Schema {
                        line: line_number,
                        message: format!("duplicate sentence_id {sentence_id:?}"),
                    });
                }
                by_id.insert(sentence_id.clone(), sentences.len());
                sentences.push(Sentence {
                    id: sentence_id,
                    text,
                    candidates: Vec::new(),
                });
            }
            DatasetRecord::Candidate {
                sentence_id,
                index,
                fol,
                logprob,
                syntax_error,
            } => {
                if index == 0 {
                    return Err(IngestError::Schema {
                        line: line_number,
                        message: "candidate indices start at 1".to_string(),
                    });
                }
                if let Some(lp) = logprob {
                    if lp > 0.0 {
                        return Err(IngestError::Schema {
                            line: line_number,
                            message: format!(
                                "logprob must be a length-normalized log-probability (<= 0), got {lp}"
                            ),
                        });
                    }
                }
                let formula = if syntax_error {
                    None
                } else {
                    fol.as_deref().and_then(|text| parse_formula(text).ok())
                };
                candidate_lines.push((line_number, sentence_id.clone()));
                candidates.entry(sentence_id).or_default().push(PendingCandidate {
                    line: line_number,
                    index,
                    raw: fol,
                    formula,
                    logprob,
                });
            }
            DatasetRecord::Pair {
                pair_id,
                premises,
                hypothesis,
                label,
            } => {
                if premises.is_empty() {
                    return Err(IngestError::Schema {
                        line: line_number,
                        message: format!("pair {pair_id:?} has no premises"),
                    });
                }
                if !pair_ids.insert(pair_id.clone()) {
                    return Err(IngestError::Schema {
                        line: line_number,
                        message: format!("duplicate pair_id {pair_id:?}"),
                    });
                }
                pairs.push(Pair {
                    id: pair_id,
                    premises,
                    hypothesis,
                    label,
                });
            }
        }
    }

    // Candidates must reference declared sentences.
    for (line, sentence_id) in &candidate_lines {
        if !by_id.contains_key(sentence_id) {
            return Err(IngestError::Schema {
                line: *line,
                message: format!("candidate references undeclared sentence {sentence_id:?}"),
            });
        }
    }

    // Attach candidates, enforcing dense 1-based indices.
    for (sentence_id, mut pending) in candidates {
        let slot = by_id[&sentence_id];
        pending.sort_by_key(|c| c.index);
        for (expected, candidate) in pending.iter().enumerate() {
            if candidate.index != expected + 1 {
                return Err(IngestError::Schema {
                    line: candidate.line,
                    message: format!(
                        "candidate indices for sentence {sentence_id:?} must be dense from 1; \
                         found index {} where {} was expected",
                        candidate.index,
                        expected + 1
                    ),
                });
            }
        }
        sentences[slot].candidates = pending
            .into_iter()
            .map(|c| Candidate {
                index: c.index,
                raw: c.raw,
                formula: c.formula,
                logprob: c.logprob,
            })
            .collect();
    }

    // Pairs must reference declared sentences.
    for pair in &pairs {
        let dangling: Vec<String> = pair
            .sentence_ids()
            .into_iter()
            .filter(|id| !by_id.contains_key(*id))
            .map(str::to_string)
            .collect();
        if !dangling.is_empty() {
            return Err(IngestError::DanglingReference {
                pair_id: pair.id.clone(),
                ids: dangling,
            });
        }
    }

    Ok(Dataset {
        sentences,
        pairs,
        by_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest_str(text: &str) -> Result<Dataset, IngestError> {
        ingest_reader(std::io::Cursor::new(text.as_bytes()))
    }

    const SMALL: &str = r#"
{"type": "sentence", "sentence_id": "s1", "text": "Socrates is human."}
{"type": "sentence", "sentence_id": "s2", "text": "All humans are mortal."}
{"type": "sentence", "sentence_id": "s3", "text": "Socrates is mortal."}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "Human(socrates)", "logprob": -0.2}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "all x. (Human(x) -> Mortal(x))", "logprob": -0.3}
{"type": "candidate", "sentence_id": "s3", "index": 1, "fol": "Mortal(socrates)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s3", "index": 2, "fol": "Mortal(", "logprob": -0.9}
{"type": "pair", "pair_id": "b1", "premises": ["s1", "s2"], "hypothesis": "s3", "label": "entailment"}
"#;

    #[test]
    fn ingests_a_small_dataset() {
        let ds = ingest_str(SMALL).unwrap();
        assert_eq!(ds.sentences.len(), 3);
        assert_eq!(ds.pairs.len(), 1);
        assert_eq!(ds.pairs[0].premises.len(), 2);
        let s3 = ds.sentence("s3").unwrap();
        assert_eq!(s3.candidates.len(), 2);
        assert!(!s3.candidates[0].is_syntax_error());
        assert!(s3.candidates[1].is_syntax_error(), "unparseable fol is a marker");
    }

    #[test]
    fn top_candidate_maximizes_logprob_with_index_ties() {
        let text = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "P(a)", "logprob": -0.5}
{"type": "candidate", "sentence_id": "s1", "index": 2, "fol": "Q(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s1", "index": 3, "fol": "R(a)", "logprob": -0.1}
"#;
        let ds = ingest_str(text).unwrap();
        let top = ds.sentence("s1").unwrap().top_candidate().unwrap();
        assert_eq!(top.index, 2, "ties go to the lowest index");
    }

    #[test]
    fn dangling_pair_reference_is_rejected() {
        let text = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "nope", "label": "entailment"}
"#;
        match ingest_str(text) {
            Err(IngestError::DanglingReference { pair_id, ids }) => {
                assert_eq!(pair_id, "b1");
                assert_eq!(ids, vec!["nope".to_string()]);
            }
            other => panic!("expected DanglingReference, got {other:?}"),
        }
    }

    #[test]
    fn sparse_candidate_indices_are_rejected() {
        let text = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "P(a)"}
{"type": "candidate", "sentence_id": "s1", "index": 3, "fol": "Q(a)"}
"#;
        match ingest_str(text) {
            Err(IngestError::Schema { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("dense"), "{message}");
            }
            other => panic!("expected Schema error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_line_numbers() {
        let text = "\n{\"type\": \"sentence\", \"sentence_id\": \"s1\"}\n";
        match ingest_str(text) {
            Err(IngestError::Schema { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Schema error, got {other:?}"),
        }
    }

    #[test]
    fn positive_logprob_is_rejected() {
        let text = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "P(a)", "logprob": 0.25}
"#;
        assert!(matches!(ingest_str(text), Err(IngestError::Schema { .. })));
    }

    #[test]
    fn explicit_syntax_error_flag_wins() {
        let text = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "P(a)", "syntax_error": true}
"#;
        let ds = ingest_str(text).unwrap();
        assert!(ds.sentence("s1").unwrap().candidates[0].is_syntax_error());
    }
}
