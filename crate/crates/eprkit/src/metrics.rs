//! The EPR metric family over a dataset of candidate parses.
//!
//! `epr` checks only the model's top-ranked parse per sentence. `epr@K`
//! admits any combination of up to K parses per sentence and succeeds on
//! the first preserving combination (or enumerates all of them in
//! exhaustive mode, which scoring and the oracle need). `epr@K-oracle`
//! fixes one parse per sentence globally and maximizes the number of
//! satisfied pairs with an exact branch-and-bound that degrades to an
//! anytime lower bound under its time limit.
//!
//! All prover verdicts flow through a shared cache keyed by the canonical
//! forms of the premises and the goal, so duplicated sentences across pairs
//! never re-prove, and a populated verdict store replays a whole run
//! without prover calls.

use crate::dataset::{Candidate, Dataset, Pair, Sentence};
use crate::entailment::{
    check_entailment, CheckError, CheckReason, EntailmentQuery, Label, QueryError,
};
use crate::external::{check_external, ExternalError, ExternalProverConfig};
use crate::fol::Formula;
use crate::prover::ResourceBudget;
use crate::store::{StoreRecord, VerdictStore};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sentence {sentence_id:?} has no candidate parses")]
    MissingCandidate { sentence_id: String },
    #[error("pair {pair_id:?} lacks exhaustive combination detail")]
    MissingDetail { pair_id: String },
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    External(#[from] ExternalError),
    #[error("verdict store: {0}")]
    Store(#[from] std::io::Error),
    #[error("TPTP export: {0}")]
    Tptp(#[from] crate::fol::MangleError),
}

/// Which prover answers entailment queries.
pub enum Backend {
    Internal { budget: ResourceBudget },
    External { config: ExternalProverConfig },
}

impl Backend {
    fn check(&self, query: &EntailmentQuery) -> Result<crate::entailment::CheckResult, EvalError> {
        match self {
            Backend::Internal { budget } => Ok(check_entailment(query, budget)?),
            Backend::External { config } => Ok(check_external(query, config)?),
        }
    }
}

/// Outcome of one cached query, id-free so it can be shared across pairs.
#[derive(Clone, Debug)]
pub struct CachedVerdict {
    pub reason: CheckReason,
    /// Canonical premise formulas the proof used.
    pub used_formulas: BTreeSet<String>,
}

type Slot = Arc<Mutex<Option<CachedVerdict>>>;

/// Verdict cache shared by all pairs of a run, optionally backed by an
/// append-only store. Per-key slots serialize concurrent computation of
/// the same query, so the prover-call count never exceeds the number of
/// distinct queries.
pub struct VerdictCache {
    slots: Mutex<HashMap<String, Slot>>,
    store: Option<VerdictStore>,
    /// When set, every distinct query encountered in this run is written
    /// out as one TPTP problem file, cache hit or not.
    emit_tptp_dir: Option<std::path::PathBuf>,
    emitted: Mutex<BTreeSet<String>>,
    prover_calls: AtomicU64,
    cache_hits: AtomicU64,
}

impl VerdictCache {
    pub fn in_memory() -> VerdictCache {
        VerdictCache {
            slots: Mutex::new(HashMap::new()),
            store: None,
            emit_tptp_dir: None,
            emitted: Mutex::new(BTreeSet::new()),
            prover_calls: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        }
    }

    pub fn with_store(path: impl AsRef<std::path::Path>) -> std::io::Result<VerdictCache> {
        let (store, records) = VerdictStore::open(path)?;
        let cache = VerdictCache {
            slots: Mutex::new(HashMap::new()),
            store: Some(store),
            emit_tptp_dir: None,
            emitted: Mutex::new(BTreeSet::new()),
            prover_calls: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        };
        {
            let mut slots = cache.slots.lock().unwrap();
            for record in records {
                let verdict = CachedVerdict {
                    reason: record.reason,
                    used_formulas: record.used.into_iter().collect(),
                };
                slots.insert(record.key, Arc::new(Mutex::new(Some(verdict))));
            }
        }
        Ok(cache)
    }

    pub fn set_tptp_emit_dir(&mut self, dir: impl Into<std::path::PathBuf>) {
        self.emit_tptp_dir = Some(dir.into());
    }

    pub fn prover_calls(&self) -> u64 {
        self.prover_calls.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits.load(Ordering::Relaxed)
    }

    fn emit_tptp(&self, key: &str, query: &EntailmentQuery) -> Result<(), EvalError> {
        let Some(dir) = &self.emit_tptp_dir else {
            return Ok(());
        };
        {
            let mut emitted = self.emitted.lock().unwrap();
            if !emitted.insert(key.to_string()) {
                return Ok(());
            }
        }
        std::fs::create_dir_all(dir)?;
        let goal = query.goal();
        let deduped = query.deduped_premises();
        let mut formulas: Vec<&Formula> = deduped.iter().map(|(_, _, f)| *f).collect();
        formulas.push(&goal);
        let serializer = crate::fol::TptpSerializer::for_formulas(formulas)?;
        let mut problem = String::new();
        for (i, (_, _, f)) in deduped.iter().enumerate() {
            problem.push_str(&serializer.serialize(f, crate::fol::TptpRole::Axiom, &format!("p{}", i + 1))?);
            problem.push('\n');
        }
        problem.push_str(&serializer.serialize(&goal, crate::fol::TptpRole::Conjecture, "goal")?);
        problem.push('\n');
        std::fs::write(dir.join(format!("q_{key}.p")), problem)?;
        Ok(())
    }

    /// Run (or replay) the gated check for `query`.
    fn check(
        &self,
        query: &EntailmentQuery,
        backend: &Backend,
    ) -> Result<CachedVerdict, EvalError> {
        let key = query_key(query);
        self.emit_tptp(&key, query)?;
        let slot = {
            let mut slots = self.slots.lock().unwrap();
            slots.entry(key.clone()).or_default().clone()
        };
        let mut guard = slot.lock().unwrap();
        if let Some(verdict) = guard.as_ref() {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(verdict.clone());
        }
        self.prover_calls.fetch_add(1, Ordering::Relaxed);
        let result = backend.check(query)?;
        let used_formulas: BTreeSet<String> = query
            .premises()
            .iter()
            .filter(|(id, _)| result.used_premises.contains(id))
            .map(|(_, f)| f.to_string())
            .collect();
        let verdict = CachedVerdict {
            reason: result.reason,
            used_formulas,
        };
        if let Some(store) = &self.store {
            store.append(&StoreRecord {
                key,
                reason: verdict.reason,
                used: verdict.used_formulas.iter().cloned().collect(),
            })?;
        }
        *guard = Some(verdict.clone());
        Ok(verdict)
    }
}

/// Canonical cache key: the premise formula multiset and the label-adjusted
/// goal, all in canonical surface syntax.
fn query_key(query: &EntailmentQuery) -> String {
    let mut premises: Vec<String> = query
        .premises()
        .iter()
        .map(|(_, f)| f.to_string())
        .collect();
    premises.sort();
    let text = format!("{}\n|-\n{}", premises.join("\n"), query.goal());
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Exact,
    LowerBound,
}

/// Per-pair evaluation detail.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub pair_id: String,
    pub label: Label,
    /// Candidate indices of the top-ranked parses (premises, then
    /// hypothesis).
    pub top1: Vec<usize>,
    pub top1_syntax_error: bool,
    /// Reason from the top-1 check; absent when a top-1 parse was a syntax
    /// error and no query was posed.
    pub top1_reason: Option<CheckReason>,
    pub preserved_top1: bool,
    pub preserved_at_k: bool,
    /// Preserving combinations discovered, as candidate indices (premises,
    /// then hypothesis). Complete when `exhaustive` is set.
    pub preserving_combinations: Vec<Vec<usize>>,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EprReport {
    pub k: usize,
    pub pair_count: usize,
    pub epr_preserved: usize,
    pub epr: f64,
    pub epr_at_k_preserved: usize,
    pub epr_at_k: f64,
    pub epr_at_k_oracle_successes: usize,
    pub epr_at_k_oracle: f64,
    pub oracle_status: OracleStatus,
    /// One selected candidate index per sentence.
    pub oracle_selection: BTreeMap<String, usize>,
    pub pairs: Vec<PairReport>,
}

/// The candidates of a sentence admitted at cutoff `k`: the k best by
/// log-probability (ties to the lower index), kept in index order. Rank
/// truncation rather than index truncation makes `epr@1` coincide with
/// `epr` by construction.
pub fn eligible_candidates(sentence: &Sentence, k: usize) -> Vec<&Candidate> {
    let mut ranked: Vec<&Candidate> = sentence.candidates.iter().collect();
    ranked.sort_by(|a, b| {
        let la = a.logprob.unwrap_or(f64::NEG_INFINITY);
        let lb = b.logprob.unwrap_or(f64::NEG_INFINITY);
        lb.partial_cmp(&la)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
    ranked.truncate(k.max(1));
    ranked.sort_by_key(|c| c.index);
    ranked
}

struct PairSentences<'a> {
    /// Unique sentences of the pair, in first-occurrence order.
    unique: Vec<&'a Sentence>,
    /// For each slot (premises then hypothesis), the position in `unique`.
    slot_of: Vec<usize>,
}

fn pair_sentences<'a>(dataset: &'a Dataset, pair: &Pair) -> Result<PairSentences<'a>, EvalError> {
    let mut unique: Vec<&Sentence> = Vec::new();
    let mut slot_of = Vec::new();
    for id in pair.sentence_ids() {
        let sentence = dataset
            .sentence(id)
            .expect("ingest validated referential integrity");
        if sentence.candidates.is_empty() {
            return Err(EvalError::MissingCandidate {
                sentence_id: id.to_string(),
            });
        }
        let pos = match unique.iter().position(|s| s.id == sentence.id) {
            Some(pos) => pos,
            None => {
                unique.push(sentence);
                unique.len() - 1
            }
        };
        slot_of.push(pos);
    }
    Ok(PairSentences { unique, slot_of })
}

/// Render a per-unique-sentence choice as per-slot candidate indices.
fn slots_from_choice(sentences: &PairSentences, choice: &[usize]) -> Vec<usize> {
    sentences.slot_of.iter().map(|pos| choice[*pos]).collect()
}

fn build_query(
    sentences: &PairSentences,
    choice: &[usize],
    label: Label,
) -> Result<Option<EntailmentQuery>, EvalError> {
    let mut formulas: Vec<Option<&Formula>> = Vec::new();
    for (sentence, index) in sentences.unique.iter().zip(choice) {
        let candidate = &sentence.candidates[index - 1];
        formulas.push(candidate.formula.as_ref());
    }
    if formulas.iter().any(Option::is_none) {
        return Ok(None); // syntax error in the combination
    }
    let hypothesis_pos = *sentences.slot_of.last().expect("pair has a hypothesis");
    let mut premises = Vec::new();
    for (pos, sentence) in sentences.unique.iter().enumerate() {
        if pos != hypothesis_pos {
            premises.push((
                sentence.id.clone(),
                formulas[pos].expect("checked above").clone(),
            ));
        }
    }
    let hypothesis = formulas[hypothesis_pos].expect("checked above").clone();
    if premises.is_empty() {
        // Degenerate pair whose only premise is the hypothesis sentence
        // itself; prove it from itself.
        premises.push((
            sentences.unique[hypothesis_pos].id.clone(),
            hypothesis.clone(),
        ));
    }
    Ok(Some(EntailmentQuery::new(premises, hypothesis, label)?))
}

/// Top-1 choice (per unique sentence) for a pair.
fn top1_choice(sentences: &PairSentences) -> Vec<usize> {
    sentences
        .unique
        .iter()
        .map(|s| s.top_candidate().expect("non-empty checked").index)
        .collect()
}

/// Evaluate one pair: the top-1 check, then combination search at cutoff
/// `k`. With `exhaustive` unset the search stops at the first preserving
/// combination; either way the top-1 combination is tried first, so a
/// top-1 success always appears in the detail.
fn evaluate_pair(
    dataset: &Dataset,
    pair: &Pair,
    k: usize,
    exhaustive: bool,
    cache: &VerdictCache,
    backend: &Backend,
) -> Result<PairReport, EvalError> {
    let sentences = pair_sentences(dataset, pair)?;
    let top1 = top1_choice(&sentences);

    let mut report = PairReport {
        pair_id: pair.id.clone(),
        label: pair.label,
        top1: slots_from_choice(&sentences, &top1),
        top1_syntax_error: false,
        top1_reason: None,
        preserved_top1: false,
        preserved_at_k: false,
        preserving_combinations: Vec::new(),
        exhaustive,
    };

    match build_query(&sentences, &top1, pair.label)? {
        None => report.top1_syntax_error = true,
        Some(query) => {
            let verdict = cache.check(&query, backend)?;
            report.top1_reason = Some(verdict.reason);
            report.preserved_top1 = verdict.reason == CheckReason::Ok;
            if report.preserved_top1 {
                report
                    .preserving_combinations
                    .push(slots_from_choice(&sentences, &top1));
                report.preserved_at_k = true;
                if !exhaustive {
                    return Ok(report);
                }
            }
        }
    }

    // Candidate index lists per unique sentence: the k best, parseable
    // candidates, in index order.
    let index_lists: Vec<Vec<usize>> = sentences
        .unique
        .iter()
        .map(|s| {
            eligible_candidates(s, k)
                .into_iter()
                .filter(|c| !c.is_syntax_error())
                .map(|c| c.index)
                .collect()
        })
        .collect();
    if index_lists.iter().any(Vec::is_empty) {
        // Some sentence has no parseable candidate at this cutoff.
        return Ok(report);
    }

    let mut odometer: Vec<usize> = vec![0; index_lists.len()];
    'combos: loop {
        let choice: Vec<usize> = odometer
            .iter()
            .zip(&index_lists)
            .map(|(i, list)| list[*i])
            .collect();
        let already_counted = choice == top1 && !report.top1_syntax_error;
        if !already_counted {
            if let Some(query) = build_query(&sentences, &choice, pair.label)? {
                let verdict = cache.check(&query, backend)?;
                if verdict.reason == CheckReason::Ok {
                    report.preserved_at_k = true;
                    report
                        .preserving_combinations
                        .push(slots_from_choice(&sentences, &choice));
                    if !exhaustive {
                        break 'combos;
                    }
                }
            }
        }
        // Advance lexicographically.
        let mut pos = odometer.len();
        loop {
            if pos == 0 {
                break 'combos;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < index_lists[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }

    if exhaustive {
        report.preserving_combinations.sort();
        report.preserving_combinations.dedup();
    }
    Ok(report)
}

/// Evaluate every pair; `workers` bounds the fan-out (0 means the rayon
/// default). Results are in dataset pair order regardless of scheduling.
pub fn evaluate_pairs(
    dataset: &Dataset,
    k: usize,
    exhaustive: bool,
    cache: &VerdictCache,
    backend: &Backend,
    workers: usize,
) -> Result<Vec<PairReport>, EvalError> {
    use rayon::prelude::*;
    let run = || {
        dataset
            .pairs
            .par_iter()
            .map(|pair| evaluate_pair(dataset, pair, k, exhaustive, cache, backend))
            .collect::<Result<Vec<_>, _>>()
    };
    if workers == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(run)
    }
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub successes: usize,
    pub selection: BTreeMap<String, usize>,
    pub status: OracleStatus,
}

/// Maximize the number of pairs satisfiable by one global parse selection.
///
/// Branch and bound over sentences in descending pair-degree order. The
/// bound is the satisfied count plus the pairs still consistent with the
/// partial assignment. The incumbent starts at the top-1 selection, so the
/// result never falls below plain EPR even when the time limit cuts the
/// search into a lower bound.
pub fn solve_oracle(
    dataset: &Dataset,
    reports: &[PairReport],
    k: usize,
    time_limit: Duration,
) -> OracleOutcome {
    let deadline = Instant::now() + time_limit;

    // Sentences that occur in pairs, most-constrained first.
    let mut involved: Vec<&Sentence> = dataset
        .sentences
        .iter()
        .filter(|s| dataset.pair_degree(&s.id) > 0)
        .collect();
    involved.sort_by(|a, b| {
        dataset
            .pair_degree(&b.id)
            .cmp(&dataset.pair_degree(&a.id))
            .then(a.id.cmp(&b.id))
    });
    let position: HashMap<&str, usize> = involved
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();

    // Candidate choices per involved sentence.
    let choices: Vec<Vec<usize>> = involved
        .iter()
        .map(|s| {
            let parseable: Vec<usize> = eligible_candidates(s, k)
                .into_iter()
                .filter(|c| !c.is_syntax_error())
                .map(|c| c.index)
                .collect();
            if parseable.is_empty() {
                vec![fallback_index(s, k)]
            } else {
                parseable
            }
        })
        .collect();

    // Pair constraints in solver coordinates.
    let constraints: Vec<Vec<Vec<(usize, usize)>>> = dataset
        .pairs
        .iter()
        .zip(reports)
        .map(|(pair, report)| {
            let ids = pair.sentence_ids();
            report
                .preserving_combinations
                .iter()
                .map(|combo| {
                    let mut assignment: Vec<(usize, usize)> = ids
                        .iter()
                        .zip(combo)
                        .map(|(id, index)| (position[*id], *index))
                        .collect();
                    assignment.sort();
                    assignment.dedup();
                    assignment
                })
                .collect()
        })
        .collect();

    // Seed the incumbent with the top-1 selection.
    let top1: Vec<usize> = involved
        .iter()
        .map(|s| s.top_candidate().map(|c| c.index).unwrap_or(1))
        .collect();
    let mut best = top1.clone();
    let mut best_score = satisfied_count(&constraints, &top1);

    let mut assignment: Vec<Option<usize>> = vec![None; involved.len()];
    let mut timed_out = false;
    branch(
        &choices,
        &constraints,
        &mut assignment,
        0,
        &mut best,
        &mut best_score,
        deadline,
        &mut timed_out,
    );

    let mut selection: BTreeMap<String, usize> = involved
        .iter()
        .zip(&best)
        .map(|(s, index)| (s.id.clone(), *index))
        .collect();
    for sentence in &dataset.sentences {
        selection
            .entry(sentence.id.clone())
            .or_insert_with(|| fallback_index(sentence, k));
    }

    OracleOutcome {
        successes: best_score,
        selection,
        status: if timed_out {
            OracleStatus::LowerBound
        } else {
            OracleStatus::Exact
        },
    }
}

/// Lowest admissible candidate index, used where the choice cannot affect
/// any pair.
fn fallback_index(sentence: &Sentence, k: usize) -> usize {
    eligible_candidates(sentence, k)
        .first()
        .map(|c| c.index)
        .unwrap_or(1)
}

fn satisfied_count(constraints: &[Vec<Vec<(usize, usize)>>], full: &[usize]) -> usize {
    constraints
        .iter()
        .filter(|pair| {
            pair.iter()
                .any(|combo| combo.iter().all(|(pos, index)| full[*pos] == *index))
        })
        .count()
}

#[allow(clippy::too_many_arguments)]
fn branch(
    choices: &[Vec<usize>],
    constraints: &[Vec<Vec<(usize, usize)>>],
    assignment: &mut Vec<Option<usize>>,
    depth: usize,
    best: &mut Vec<usize>,
    best_score: &mut usize,
    deadline: Instant,
    timed_out: &mut bool,
) {
    if *timed_out {
        return;
    }
    if Instant::now() >= deadline {
        *timed_out = true;
        return;
    }

    // Bound: pairs already satisfied plus pairs still consistent.
    let mut satisfied = 0;
    let mut possible = 0;
    for pair in constraints {
        let mut pair_satisfied = false;
        let mut pair_possible = false;
        for combo in pair {
            let mut consistent = true;
            let mut complete = true;
            for (pos, index) in combo {
                match assignment[*pos] {
                    Some(assigned) if assigned == *index => {}
                    Some(_) => {
                        consistent = false;
                        break;
                    }
                    None => complete = false,
                }
            }
            if consistent {
                if complete {
                    pair_satisfied = true;
                    break;
                }
                pair_possible = true;
            }
        }
        if pair_satisfied {
            satisfied += 1;
        } else if pair_possible {
            possible += 1;
        }
    }
    if satisfied + possible <= *best_score {
        return; // cannot beat the incumbent
    }

    if depth == choices.len() {
        // All assigned; `possible` is zero here.
        if satisfied > *best_score {
            *best_score = satisfied;
            *best = assignment.iter().map(|a| a.expect("complete")).collect();
        }
        return;
    }

    for index in &choices[depth] {
        assignment[depth] = Some(*index);
        branch(
            choices,
            constraints,
            assignment,
            depth + 1,
            best,
            best_score,
            deadline,
            timed_out,
        );
        if *timed_out {
            break;
        }
    }
    assignment[depth] = None;
}

/// Assemble the report and assert the definitional ordering
/// `epr <= epr@K-oracle <= epr@K` on the counts.
pub fn build_report(
    dataset: &Dataset,
    k: usize,
    pair_reports: Vec<PairReport>,
    oracle: OracleOutcome,
) -> EprReport {
    let pair_count = dataset.pairs.len();
    let epr_preserved = pair_reports.iter().filter(|p| p.preserved_top1).count();
    let at_k_preserved = pair_reports.iter().filter(|p| p.preserved_at_k).count();
    assert!(
        epr_preserved <= oracle.successes && oracle.successes <= at_k_preserved,
        "metric ordering violated: epr {epr_preserved} <= oracle {} <= epr@K {at_k_preserved}",
        oracle.successes
    );
    let ratio = |n: usize| {
        if pair_count == 0 {
            0.0
        } else {
            n as f64 / pair_count as f64
        }
    };
    EprReport {
        k,
        pair_count,
        epr_preserved,
        epr: ratio(epr_preserved),
        epr_at_k_preserved: at_k_preserved,
        epr_at_k: ratio(at_k_preserved),
        epr_at_k_oracle_successes: oracle.successes,
        epr_at_k_oracle: ratio(oracle.successes),
        oracle_status: oracle.status,
        oracle_selection: oracle.selection,
        pairs: pair_reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ingest_reader;

    fn dataset(text: &str) -> Dataset {
        ingest_reader(std::io::Cursor::new(text.as_bytes())).unwrap()
    }

    fn internal() -> Backend {
        Backend::Internal {
            budget: ResourceBudget::default(),
        }
    }

    const CHAIN: &str = r#"
{"type": "sentence", "sentence_id": "s1", "text": "t1"}
{"type": "sentence", "sentence_id": "s2", "text": "t2"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "Wet(street)", "logprob": -0.8}
{"type": "candidate", "sentence_id": "s1", "index": 2, "fol": "Rain(street)", "logprob": -0.2}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "Rain(street)", "logprob": -0.3}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "s2", "label": "entailment"}
"#;

    #[test]
    fn rank_truncation_makes_at_one_collapse_to_epr() {
        // The top-ranked candidate of s1 sits at index 2; with k = 1 the
        // eligible set is exactly that candidate.
        let ds = dataset(CHAIN);
        let cache = VerdictCache::in_memory();
        let reports = evaluate_pairs(&ds, 1, false, &cache, &internal(), 0).unwrap();
        assert!(reports[0].preserved_top1);
        assert_eq!(
            reports[0].preserved_top1, reports[0].preserved_at_k,
            "epr@1 must equal epr"
        );
        assert_eq!(reports[0].preserving_combinations, vec![vec![2, 1]]);
    }

    #[test]
    fn eligible_candidates_rank_then_restore_index_order() {
        let ds = dataset(CHAIN);
        let s1 = ds.sentence("s1").unwrap();
        let top1: Vec<usize> = eligible_candidates(s1, 1).iter().map(|c| c.index).collect();
        assert_eq!(top1, vec![2]);
        let both: Vec<usize> = eligible_candidates(s1, 2).iter().map(|c| c.index).collect();
        assert_eq!(both, vec![1, 2]);
    }

    #[test]
    fn syntax_error_at_top1_fails_the_pair_without_a_query() {
        let ds = dataset(
            r#"
{"type": "sentence", "sentence_id": "s1", "text": "t1"}
{"type": "sentence", "sentence_id": "s2", "text": "t2"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "Wet(", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "Wet(street)", "logprob": -0.1}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "s2", "label": "entailment"}
"#,
        );
        let cache = VerdictCache::in_memory();
        let reports = evaluate_pairs(&ds, 3, false, &cache, &internal(), 0).unwrap();
        assert!(!reports[0].preserved_top1);
        assert!(reports[0].top1_syntax_error);
        assert_eq!(reports[0].top1_reason, None);
        assert!(!reports[0].preserved_at_k, "no parseable premise candidate");
        assert_eq!(cache.prover_calls(), 0);
    }

    #[test]
    fn missing_candidates_are_an_error() {
        let ds = dataset(
            r#"
{"type": "sentence", "sentence_id": "s1", "text": "t1"}
{"type": "sentence", "sentence_id": "s2", "text": "t2"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "Wet(street)", "logprob": -0.1}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "s2", "label": "entailment"}
"#,
        );
        let cache = VerdictCache::in_memory();
        match evaluate_pairs(&ds, 3, false, &cache, &internal(), 0) {
            Err(EvalError::MissingCandidate { sentence_id }) => assert_eq!(sentence_id, "s2"),
            other => panic!("expected MissingCandidate, got {other:?}"),
        }
    }

    #[test]
    fn oracle_equals_at_k_without_shared_sentences() {
        // Two pairs over disjoint sentences: the oracle faces no conflict.
        let ds = dataset(
            r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "sentence", "sentence_id": "s2", "text": "t"}
{"type": "sentence", "sentence_id": "s3", "text": "t"}
{"type": "sentence", "sentence_id": "s4", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "A(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s1", "index": 2, "fol": "B(a)", "logprob": -0.2}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "C(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s2", "index": 2, "fol": "B(a)", "logprob": -0.2}
{"type": "candidate", "sentence_id": "s3", "index": 1, "fol": "D(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s4", "index": 1, "fol": "D(a)", "logprob": -0.1}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "s2", "label": "entailment"}
{"type": "pair", "pair_id": "b2", "premises": ["s3"], "hypothesis": "s4", "label": "entailment"}
"#,
        );
        let cache = VerdictCache::in_memory();
        let reports = evaluate_pairs(&ds, 2, true, &cache, &internal(), 0).unwrap();
        let oracle = solve_oracle(&ds, &reports, 2, Duration::from_secs(10));
        let at_k = reports.iter().filter(|r| r.preserved_at_k).count();
        assert_eq!(at_k, 2);
        assert_eq!(oracle.successes, at_k);
        assert_eq!(oracle.status, OracleStatus::Exact);
    }

    #[test]
    fn duplicate_queries_hit_the_cache() {
        // Both pairs pose the identical premise/hypothesis formulas; the
        // second resolves from the cache.
        let ds = dataset(
            r#"
{"type": "sentence", "sentence_id": "s1", "text": "t"}
{"type": "sentence", "sentence_id": "s2", "text": "t"}
{"type": "sentence", "sentence_id": "s3", "text": "t"}
{"type": "sentence", "sentence_id": "s4", "text": "t"}
{"type": "candidate", "sentence_id": "s1", "index": 1, "fol": "A(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s2", "index": 1, "fol": "A(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s3", "index": 1, "fol": "A(a)", "logprob": -0.1}
{"type": "candidate", "sentence_id": "s4", "index": 1, "fol": "A(a)", "logprob": -0.1}
{"type": "pair", "pair_id": "b1", "premises": ["s1"], "hypothesis": "s2", "label": "entailment"}
{"type": "pair", "pair_id": "b2", "premises": ["s3"], "hypothesis": "s4", "label": "entailment"}
"#,
        );
        let cache = VerdictCache::in_memory();
        let reports = evaluate_pairs(&ds, 1, false, &cache, &internal(), 0).unwrap();
        assert!(reports.iter().all(|r| r.preserved_top1));
        assert_eq!(cache.prover_calls(), 1, "one distinct query");
        assert_eq!(cache.cache_hits(), 1);
    }

    #[test]
    fn exhaustive_detail_is_lexicographic_and_complete() {
        let ds = dataset(CHAIN);
        let cache = VerdictCache::in_memory();
        let reports = evaluate_pairs(&ds, 2, true, &cache, &internal(), 0).unwrap();
        // (s1: Rain, s2: Rain) preserves; (s1: Wet, s2: Rain) fails on
        // vocabulary.
        assert_eq!(reports[0].preserving_combinations, vec![vec![2, 1]]);
        assert!(reports[0].exhaustive);
    }
}
