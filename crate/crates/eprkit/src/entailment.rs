//! The verified entailment check: vocabulary gate, prover call, and
//! used-premise verification.
//!
//! A proof only counts as preserving the entailment when (1) the goal
//! introduces no predicate or constant absent from the premises and (2) the
//! refutation actually touches every premise. Both gates run on the source
//! formulas; skolem constants never enter the vocabulary comparison. A
//! contradiction label is checked by proving the negated hypothesis.

use crate::fol::{Formula, SignatureSet};
use crate::prover::{Clausifier, ClausifyError, ProofVerdict, ProverStatus, ResourceBudget, refute};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Entailment,
    Contradiction,
}

/// One premises-hypothesis proof obligation.
#[derive(Clone, Debug)]
pub struct EntailmentQuery {
    premises: Vec<(String, Formula)>,
    hypothesis: Formula,
    label: Label,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("a query needs at least one premise")]
    NoPremises,
    #[error("formula {id:?} is not closed")]
    OpenFormula { id: String },
}

impl EntailmentQuery {
    pub fn new(
        premises: Vec<(String, Formula)>,
        hypothesis: Formula,
        label: Label,
    ) -> Result<EntailmentQuery, QueryError> {
        if premises.is_empty() {
            return Err(QueryError::NoPremises);
        }
        for (id, f) in &premises {
            if !f.is_closed() {
                return Err(QueryError::OpenFormula { id: id.clone() });
            }
        }
        if !hypothesis.is_closed() {
            return Err(QueryError::OpenFormula {
                id: "hypothesis".to_string(),
            });
        }
        Ok(EntailmentQuery {
            premises,
            hypothesis,
            label,
        })
    }

    pub fn premises(&self) -> &[(String, Formula)] {
        &self.premises
    }

    pub fn hypothesis(&self) -> &Formula {
        &self.hypothesis
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// The formula handed to the prover: the hypothesis itself, or its
    /// negation under a contradiction label.
    pub fn goal(&self) -> Formula {
        match self.label {
            Label::Entailment => self.hypothesis.clone(),
            Label::Contradiction => Formula::not(self.hypothesis.clone()),
        }
    }

    /// Premises deduplicated by canonical form: identical formulas share
    /// one representative id (the first one, in premise order).
    pub fn deduped_premises(&self) -> Vec<(String, Vec<String>, &Formula)> {
        let mut groups: Vec<(String, String, Vec<String>, &Formula)> = Vec::new();
        for (id, f) in &self.premises {
            let canonical = f.to_string();
            match groups.iter_mut().find(|(c, ..)| *c == canonical) {
                Some((_, _, ids, _)) => ids.push(id.clone()),
                None => groups.push((canonical, id.clone(), vec![id.clone()], f)),
            }
        }
        groups
            .into_iter()
            .map(|(_, rep, ids, f)| (rep, ids, f))
            .collect()
    }

    pub fn premise_ids(&self) -> BTreeSet<String> {
        self.premises.iter().map(|(id, _)| id.clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckReason {
    Ok,
    VocabularyViolation,
    NotProved,
    PremisesUnused,
    ProverTimeout,
}

/// Outcome of the gated check. `preserved` holds exactly when `reason` is
/// [`CheckReason::Ok`]. `verdict` is absent when the vocabulary gate
/// rejected the query before any prover call.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub preserved: bool,
    pub reason: CheckReason,
    pub used_premises: BTreeSet<String>,
    pub verdict: Option<ProofVerdict>,
}

impl CheckResult {
    fn gated() -> CheckResult {
        CheckResult {
            preserved: false,
            reason: CheckReason::VocabularyViolation,
            used_premises: BTreeSet::new(),
            verdict: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Clausify(#[from] ClausifyError),
}

/// Run the two-gate check with the in-process prover.
pub fn check_entailment(
    query: &EntailmentQuery,
    budget: &ResourceBudget,
) -> Result<CheckResult, CheckError> {
    let goal = query.goal();
    if !vocabulary_admissible(query, &goal) {
        return Ok(CheckResult::gated());
    }

    let deduped = query.deduped_premises();
    let goal_origin = fresh_goal_origin(query);
    let mut clausifier = Clausifier::new();
    for (_, _, f) in &deduped {
        clausifier.reserve_symbols(f);
    }
    let negated_goal = Formula::not(goal);
    clausifier.reserve_symbols(&negated_goal);

    let mut premise_clauses = Vec::new();
    for (rep, _, f) in &deduped {
        premise_clauses.extend(clausifier.clausify(f, rep)?);
    }
    let goal_clauses = clausifier.clausify(&negated_goal, &goal_origin)?;

    let verdict = refute(&premise_clauses, &goal_clauses, budget);
    Ok(interpret_verdict(query, &deduped, verdict))
}

/// Shared by both backends: signatures of the goal must be covered by the
/// union of the premise signatures.
pub(crate) fn vocabulary_admissible(query: &EntailmentQuery, goal: &Formula) -> bool {
    let mut premise_sig = SignatureSet::default();
    for (_, f) in query.premises() {
        premise_sig.extend(&f.signatures());
    }
    goal.signatures().is_subset_of(&premise_sig)
}

pub(crate) fn fresh_goal_origin(query: &EntailmentQuery) -> String {
    let ids = query.premise_ids();
    let mut origin = "__goal__".to_string();
    while ids.contains(&origin) {
        origin.push('_');
    }
    origin
}

/// Map a prover verdict through the used-premise gate.
pub(crate) fn interpret_verdict(
    query: &EntailmentQuery,
    deduped: &[(String, Vec<String>, &Formula)],
    verdict: ProofVerdict,
) -> CheckResult {
    match verdict.status {
        ProverStatus::Proved => {
            let mut used = BTreeSet::new();
            for (rep, ids, _) in deduped {
                if verdict.used_premises.contains(rep) {
                    used.extend(ids.iter().cloned());
                }
            }
            let all = query.premise_ids();
            if used == all {
                CheckResult {
                    preserved: true,
                    reason: CheckReason::Ok,
                    used_premises: used,
                    verdict: Some(verdict),
                }
            } else {
                CheckResult {
                    preserved: false,
                    reason: CheckReason::PremisesUnused,
                    used_premises: used,
                    verdict: Some(verdict),
                }
            }
        }
        ProverStatus::Saturated => CheckResult {
            preserved: false,
            reason: CheckReason::NotProved,
            used_premises: BTreeSet::new(),
            verdict: Some(verdict),
        },
        ProverStatus::Timeout | ProverStatus::ResourceLimit => CheckResult {
            preserved: false,
            reason: CheckReason::ProverTimeout,
            used_premises: BTreeSet::new(),
            verdict: Some(verdict),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    fn query(premises: &[(&str, &str)], hypothesis: &str, label: Label) -> EntailmentQuery {
        EntailmentQuery::new(
            premises
                .iter()
                .map(|(id, text)| (id.to_string(), parse_formula(text).unwrap()))
                .collect(),
            parse_formula(hypothesis).unwrap(),
            label,
        )
        .unwrap()
    }

    #[test]
    fn syllogism_is_preserved() {
        let q = query(
            &[("p1", "H(s)"), ("p2", "all x. (H(x) -> M(x))")],
            "M(s)",
            Label::Entailment,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(result.preserved);
        assert_eq!(result.reason, CheckReason::Ok);
        assert_eq!(
            result.used_premises.iter().collect::<Vec<_>>(),
            vec!["p1", "p2"]
        );
    }

    #[test]
    fn vocabulary_gate_blocks_before_proving() {
        let q = query(&[("p1", "P(a)")], "Q(a)", Label::Entailment);
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(!result.preserved);
        assert_eq!(result.reason, CheckReason::VocabularyViolation);
        assert!(result.verdict.is_none(), "no prover call may happen");
    }

    #[test]
    fn novel_constant_also_trips_the_gate() {
        let q = query(
            &[("p1", "all x. (H(x) -> M(x))"), ("p2", "H(s)")],
            "M(socrates)",
            Label::Entailment,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert_eq!(result.reason, CheckReason::VocabularyViolation);
    }

    #[test]
    fn embedded_contradiction_is_rejected_as_unused_premises() {
        let q = query(
            &[("p1", "P(c)"), ("p2", "all x. (-Q(x) -> R(x) & -R(x))")],
            "Q(c)",
            Label::Entailment,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(!result.preserved);
        assert_eq!(result.reason, CheckReason::PremisesUnused);
        // The raw prover did find a proof; only the gate rejects it.
        let verdict = result.verdict.expect("prover ran");
        assert_eq!(verdict.status, ProverStatus::Proved);
        assert!(!result.used_premises.contains("p1"));
    }

    #[test]
    fn unprovable_goal_is_not_proved() {
        let q = query(
            &[("p1", "P(a) | Q(a)"), ("p2", "R(a)")],
            "P(a) & R(a)",
            Label::Entailment,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(!result.preserved);
        assert_eq!(result.reason, CheckReason::NotProved);
    }

    #[test]
    fn contradiction_label_proves_the_negation() {
        let q = query(
            &[("p1", "Planet(mars)"), ("p2", "all x. (Planet(x) -> Round(x))")],
            "-Round(mars)",
            Label::Contradiction,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(result.preserved, "{:?}", result.reason);

        // Same outcome as checking the negated hypothesis as entailment.
        let equivalent = query(
            &[("p1", "Planet(mars)"), ("p2", "all x. (Planet(x) -> Round(x))")],
            "--Round(mars)",
            Label::Entailment,
        );
        let other = check_entailment(&equivalent, &ResourceBudget::default()).unwrap();
        assert_eq!(result.preserved, other.preserved);
        assert_eq!(result.reason, other.reason);
    }

    #[test]
    fn duplicate_premise_formulas_share_one_id() {
        let q = query(
            &[("p1", "H(s)"), ("p2", "H(s)"), ("p3", "all x. (H(x) -> M(x))")],
            "M(s)",
            Label::Entailment,
        );
        let result = check_entailment(&q, &ResourceBudget::default()).unwrap();
        assert!(result.preserved, "{:?}", result.reason);
        assert_eq!(result.used_premises.len(), 3, "both duplicates count as used");
    }

    #[test]
    fn timeout_is_a_reason_not_an_error() {
        let q = query(
            &[("p1", "all x. (P(x) -> P(f(x)))"), ("p2", "P(a)")],
            "P(f(a)) & -P(f(a)) | Q2(a)",
            Label::Entailment,
        );
        // Unprovable and non-terminating vocabulary; zero budget forces the
        // timeout path deterministically.
        let budget = ResourceBudget {
            max_time: std::time::Duration::from_millis(0),
            max_generated: u64::MAX,
        };
        let q2 = EntailmentQuery::new(
            q.premises().to_vec(),
            parse_formula("P(f(a))").unwrap(),
            Label::Entailment,
        )
        .unwrap();
        let result = check_entailment(&q2, &budget).unwrap();
        assert!(!result.preserved);
        assert_eq!(result.reason, CheckReason::ProverTimeout);
    }

    #[test]
    fn query_validation() {
        assert!(matches!(
            EntailmentQuery::new(vec![], parse_formula("P(a)").unwrap(), Label::Entailment),
            Err(QueryError::NoPremises)
        ));
        let open = Formula::atom("P", vec![crate::fol::Term::var("x")]);
        assert!(matches!(
            EntailmentQuery::new(
                vec![("p1".to_string(), open)],
                parse_formula("P(a)").unwrap(),
                Label::Entailment
            ),
            Err(QueryError::OpenFormula { .. })
        ));
    }
}
