//! Given-clause saturation with binary resolution and factoring.
//!
//! All input clauses start passive. Each iteration selects a given clause
//! (lightest by symbol count four times out of five, oldest otherwise, ties
//! by clause id), moves it to the active set, and resolves it against every
//! active clause including itself. Tautologies are dropped, new clauses
//! subsumed by kept ones are dropped, and kept clauses subsumed by a new
//! one are deleted. Deleted clauses stay in the arena so derivations remain
//! reconstructible. The search is deterministic for a fixed input order.

use super::unify::{apply_literal, subsumes, unify_literal_args, Substitution};
use super::{
    Clause, Derivation, DerivationStep, InferenceRule, Literal, ProofVerdict, ProverStats,
    ProverStatus, ResourceBudget,
};
use crate::fol::Term;
use std::time::Instant;

/// Decide unsatisfiability of `premise_clauses` together with the clauses
/// of a negated goal.
pub fn refute(
    premise_clauses: &[Clause],
    negated_goal_clauses: &[Clause],
    budget: &ResourceBudget,
) -> ProofVerdict {
    let mut prover = Saturation::new(budget);
    for clause in premise_clauses.iter().chain(negated_goal_clauses) {
        if let Some(verdict) = prover.insert_input(clause.clone()) {
            return verdict;
        }
    }
    prover.run()
}

struct Stored {
    clause: Clause,
    alive: bool,
}

struct Saturation {
    arena: Vec<Stored>,
    /// Ids not yet selected as given, in insertion order.
    passive: Vec<usize>,
    /// Ids already processed, in selection order.
    active: Vec<usize>,
    budget: ResourceBudget,
    started: Instant,
    pick_counter: u64,
    generated: u64,
    kept: u64,
}

impl Saturation {
    fn new(budget: &ResourceBudget) -> Saturation {
        Saturation {
            arena: Vec::new(),
            passive: Vec::new(),
            active: Vec::new(),
            budget: *budget,
            started: Instant::now(),
            pick_counter: 0,
            generated: 0,
            kept: 0,
        }
    }

    fn insert_input(&mut self, clause: Clause) -> Option<ProofVerdict> {
        self.process_new(clause)
            .map(|empty_id| self.proof_verdict(empty_id))
    }

    fn run(&mut self) -> ProofVerdict {
        loop {
            if self.started.elapsed() >= self.budget.max_time {
                return self.exhausted_verdict(ProverStatus::Timeout);
            }
            if self.generated >= self.budget.max_generated {
                return self.exhausted_verdict(ProverStatus::ResourceLimit);
            }
            let Some(given_id) = self.select_given() else {
                return self.exhausted_verdict(ProverStatus::Saturated);
            };
            self.active.push(given_id);
            if let Some(empty_id) = self.infer_from(given_id) {
                return self.proof_verdict(empty_id);
            }
        }
    }

    /// Age-weight selection at ratio 1:4.
    fn select_given(&mut self) -> Option<usize> {
        self.passive.retain(|id| self.arena[*id].alive);
        if self.passive.is_empty() {
            return None;
        }
        let by_age = self.pick_counter % 5 == 4;
        self.pick_counter += 1;
        let index = if by_age {
            0
        } else {
            let mut best = 0;
            let mut best_weight = usize::MAX;
            for (i, id) in self.passive.iter().enumerate() {
                let weight = self.arena[*id].clause.symbol_count();
                if weight < best_weight {
                    best_weight = weight;
                    best = i;
                }
            }
            best
        };
        Some(self.passive.remove(index))
    }

    /// Resolvents of the given clause against every active clause (itself
    /// included) plus its factors.
    fn infer_from(&mut self, given_id: usize) -> Option<usize> {
        let given = rename_apart(&self.arena[given_id].clause.literals);
        let partners = self.active.clone();
        for partner_id in partners {
            if !self.arena[partner_id].alive {
                continue;
            }
            for i in 0..given.len() {
                for j in 0..self.arena[partner_id].clause.literals.len() {
                    let lit_g = &given[i];
                    let lit_p = &self.arena[partner_id].clause.literals[j];
                    if lit_g.positive == lit_p.positive || lit_g.predicate != lit_p.predicate {
                        continue;
                    }
                    let mut subst = Substitution::new();
                    if !unify_literal_args(lit_g, lit_p, &mut subst) {
                        continue;
                    }
                    let mut literals: Vec<Literal> = Vec::new();
                    for (k, lit) in given.iter().enumerate() {
                        if k != i {
                            literals.push(apply_literal(lit, &subst));
                        }
                    }
                    for (k, lit) in self.arena[partner_id].clause.literals.iter().enumerate() {
                        if k != j {
                            literals.push(apply_literal(lit, &subst));
                        }
                    }
                    self.generated += 1;
                    let resolvent = Clause::derived(
                        literals,
                        vec![given_id, partner_id],
                        InferenceRule::Resolution,
                    );
                    if let Some(empty_id) = self.process_new(resolvent) {
                        return Some(empty_id);
                    }
                    if self.over_budget() {
                        return None;
                    }
                }
            }
        }
        // Factoring on the given clause.
        for i in 0..given.len() {
            for j in (i + 1)..given.len() {
                if given[i].positive != given[j].positive
                    || given[i].predicate != given[j].predicate
                {
                    continue;
                }
                let mut subst = Substitution::new();
                if !unify_literal_args(&given[i], &given[j], &mut subst) {
                    continue;
                }
                let literals: Vec<Literal> =
                    given.iter().map(|lit| apply_literal(lit, &subst)).collect();
                self.generated += 1;
                let factor = Clause::derived(literals, vec![given_id], InferenceRule::Factoring);
                if let Some(empty_id) = self.process_new(factor) {
                    return Some(empty_id);
                }
                if self.over_budget() {
                    return None;
                }
            }
        }
        None
    }

    fn over_budget(&self) -> bool {
        self.generated >= self.budget.max_generated
            || self.started.elapsed() >= self.budget.max_time
    }

    /// Returns the arena id of the empty clause when one is derived.
    fn process_new(&mut self, clause: Clause) -> Option<usize> {
        if clause.is_empty() {
            let id = self.arena.len();
            self.arena.push(Stored { clause, alive: true });
            self.kept += 1;
            return Some(id);
        }
        if clause.is_tautology() {
            return None;
        }
        if self
            .live_ids()
            .any(|id| subsumes(&self.arena[id].clause.literals, &clause.literals))
        {
            return None;
        }
        let victims: Vec<usize> = self
            .live_ids()
            .filter(|id| subsumes(&clause.literals, &self.arena[*id].clause.literals))
            .collect();
        for id in victims {
            self.arena[id].alive = false;
        }
        let id = self.arena.len();
        self.arena.push(Stored { clause, alive: true });
        self.passive.push(id);
        self.kept += 1;
        None
    }

    fn live_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.arena
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(id, _)| id)
    }

    fn stats(&self) -> ProverStats {
        ProverStats {
            clauses_generated: self.generated,
            clauses_kept: self.kept,
            elapsed: self.started.elapsed(),
        }
    }

    fn exhausted_verdict(&self, status: ProverStatus) -> ProofVerdict {
        ProofVerdict {
            status,
            used_premises: Default::default(),
            derivation: None,
            stats: self.stats(),
        }
    }

    fn proof_verdict(&self, empty_id: usize) -> ProofVerdict {
        let derivation = self.extract_derivation(empty_id);
        let used_premises = derivation.used_inputs();
        ProofVerdict {
            status: ProverStatus::Proved,
            used_premises,
            derivation: Some(derivation),
            stats: self.stats(),
        }
    }

    /// The sub-DAG reachable from the empty clause. Arena ids ascend from
    /// parents to children, so ascending id order is topological.
    fn extract_derivation(&self, empty_id: usize) -> Derivation {
        let mut reachable = vec![false; self.arena.len()];
        let mut stack = vec![empty_id];
        while let Some(id) = stack.pop() {
            if reachable[id] {
                continue;
            }
            reachable[id] = true;
            stack.extend(self.arena[id].clause.parents.iter().copied());
        }
        let ids: Vec<usize> = (0..self.arena.len()).filter(|id| reachable[*id]).collect();
        let position: std::collections::HashMap<usize, usize> =
            ids.iter().enumerate().map(|(pos, id)| (*id, pos)).collect();
        let steps = ids
            .iter()
            .map(|id| {
                let clause = &self.arena[*id].clause;
                DerivationStep {
                    clause: clause.clone(),
                    parents: clause.parents.iter().map(|p| position[p]).collect(),
                    rule: clause.rule,
                    origin: clause.origin.clone(),
                }
            })
            .collect();
        Derivation { steps }
    }
}

/// Re-check a derivation step by step: every derived clause must be
/// reproducible from its parents by the recorded rule, parents must precede
/// children, leaves must be input clauses, and the final step must be the
/// empty clause.
pub fn verify_derivation(derivation: &super::Derivation) -> Result<(), String> {
    use super::ClauseOrigin;
    let steps = &derivation.steps;
    if steps.is_empty() {
        return Err("empty derivation".to_string());
    }
    for (i, step) in steps.iter().enumerate() {
        if step.parents.iter().any(|p| *p >= i) {
            return Err(format!("step {i} references a later step"));
        }
        match step.rule {
            InferenceRule::Input => {
                if !step.parents.is_empty() {
                    return Err(format!("input step {i} has parents"));
                }
                if !matches!(step.origin, ClauseOrigin::Input(_)) {
                    return Err(format!("input step {i} lacks an origin"));
                }
            }
            InferenceRule::Resolution => {
                let [a, b] = step.parents[..] else {
                    return Err(format!("resolution step {i} needs two parents"));
                };
                let derivable = all_resolvents(&steps[a].clause, &steps[b].clause);
                if !derivable.iter().any(|c| c.literals == step.clause.literals) {
                    return Err(format!(
                        "step {i} ({}) is not a resolvent of its parents",
                        step.clause
                    ));
                }
            }
            InferenceRule::Factoring => {
                let [a] = step.parents[..] else {
                    return Err(format!("factoring step {i} needs one parent"));
                };
                let derivable = all_factors(&steps[a].clause);
                if !derivable.iter().any(|c| c.literals == step.clause.literals) {
                    return Err(format!(
                        "step {i} ({}) is not a factor of its parent",
                        step.clause
                    ));
                }
            }
        }
    }
    if !steps.last().expect("nonempty").clause.is_empty() {
        return Err("derivation does not end in the empty clause".to_string());
    }
    Ok(())
}

/// All binary resolvents of two clauses, in canonical form.
fn all_resolvents(left: &Clause, right: &Clause) -> Vec<Clause> {
    let renamed = rename_apart(&left.literals);
    let mut out = Vec::new();
    for (i, lit_l) in renamed.iter().enumerate() {
        for (j, lit_r) in right.literals.iter().enumerate() {
            if lit_l.positive == lit_r.positive || lit_l.predicate != lit_r.predicate {
                continue;
            }
            let mut subst = Substitution::new();
            if !unify_literal_args(lit_l, lit_r, &mut subst) {
                continue;
            }
            let mut literals = Vec::new();
            for (k, lit) in renamed.iter().enumerate() {
                if k != i {
                    literals.push(apply_literal(lit, &subst));
                }
            }
            for (k, lit) in right.literals.iter().enumerate() {
                if k != j {
                    literals.push(apply_literal(lit, &subst));
                }
            }
            out.push(Clause::derived(literals, Vec::new(), InferenceRule::Resolution));
        }
    }
    out
}

/// All binary factors of a clause, in canonical form.
fn all_factors(clause: &Clause) -> Vec<Clause> {
    let literals = &clause.literals;
    let mut out = Vec::new();
    for i in 0..literals.len() {
        for j in (i + 1)..literals.len() {
            if literals[i].positive != literals[j].positive
                || literals[i].predicate != literals[j].predicate
            {
                continue;
            }
            let mut subst = Substitution::new();
            if !unify_literal_args(&literals[i], &literals[j], &mut subst) {
                continue;
            }
            let factored: Vec<Literal> =
                literals.iter().map(|lit| apply_literal(lit, &subst)).collect();
            out.push(Clause::derived(factored, Vec::new(), InferenceRule::Factoring));
        }
    }
    out
}

/// Rename variables with a prefix no canonical clause uses, so the given
/// clause shares no variables with its resolution partner.
fn rename_apart(literals: &[Literal]) -> Vec<Literal> {
    fn rename(term: &Term) -> Term {
        match term {
            Term::Variable(name) => Term::Variable(format!("g_{name}")),
            Term::Constant(_) => term.clone(),
            Term::Function(name, args) => {
                Term::Function(name.clone(), args.iter().map(rename).collect())
            }
        }
    }
    literals
        .iter()
        .map(|lit| Literal {
            positive: lit.positive,
            predicate: lit.predicate.clone(),
            args: lit.args.iter().map(rename).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;
    use crate::prover::Clausifier;

    fn clauses_of(texts: &[(&str, &str)]) -> Vec<Clause> {
        let mut clausifier = Clausifier::new();
        let formulas: Vec<(String, crate::fol::Formula)> = texts
            .iter()
            .map(|(id, text)| (id.to_string(), parse_formula(text).unwrap()))
            .collect();
        for (_, f) in &formulas {
            clausifier.reserve_symbols(f);
        }
        formulas
            .iter()
            .flat_map(|(id, f)| clausifier.clausify(f, id).unwrap())
            .collect()
    }

    #[test]
    fn proves_syllogism_and_reports_used_premises() {
        let premises = clauses_of(&[("p1", "H(s)"), ("p2", "all x. (H(x) -> M(x))")]);
        let goal = clauses_of(&[("goal", "-M(s)")]);
        let verdict = refute(&premises, &goal, &ResourceBudget::default());
        assert_eq!(verdict.status, ProverStatus::Proved);
        let used: Vec<&str> = verdict.used_premises.iter().map(String::as_str).collect();
        assert_eq!(used, vec!["goal", "p1", "p2"]);
    }

    #[test]
    fn saturates_on_independent_symbols() {
        let premises = clauses_of(&[("p1", "P(a)")]);
        let goal = clauses_of(&[("goal", "-Q(a)")]);
        let verdict = refute(&premises, &goal, &ResourceBudget::default());
        assert_eq!(verdict.status, ProverStatus::Saturated);
        assert!(verdict.derivation.is_none());
    }

    #[test]
    fn embedded_contradiction_leaves_side_premise_unused() {
        let premises = clauses_of(&[
            ("p1", "P(c)"),
            ("p2", "all x. (-Q(x) -> R(x) & -R(x))"),
        ]);
        let goal = clauses_of(&[("goal", "-Q(c)")]);
        let verdict = refute(&premises, &goal, &ResourceBudget::default());
        assert_eq!(verdict.status, ProverStatus::Proved);
        assert!(!verdict.used_premises.contains("p1"));
        assert!(verdict.used_premises.contains("p2"));
    }

    #[test]
    fn proof_needs_factoring() {
        // P(x) | P(y) and -P(u) | -P(v) refute each other only via factoring.
        let premises = clauses_of(&[("p1", "all x y. (P(x) | P(y))")]);
        let goal = clauses_of(&[("goal", "all u v. (-P(u) | -P(v))")]);
        let verdict = refute(&premises, &goal, &ResourceBudget::default());
        assert_eq!(verdict.status, ProverStatus::Proved);
    }

    #[test]
    fn timeout_budget_is_honored() {
        let premises = clauses_of(&[
            ("p1", "all x. (P(x) -> P(f(x)))"),
            ("p2", "P(a)"),
        ]);
        let goal = clauses_of(&[("goal", "-Q(a)")]);
        let budget = ResourceBudget {
            max_time: std::time::Duration::from_millis(50),
            max_generated: u64::MAX,
        };
        let start = Instant::now();
        let verdict = refute(&premises, &goal, &budget);
        assert_eq!(verdict.status, ProverStatus::Timeout);
        assert!(start.elapsed() < std::time::Duration::from_secs(2));
    }

    #[test]
    fn generated_clause_budget_is_honored() {
        let premises = clauses_of(&[
            ("p1", "all x. (P(x) -> P(f(x)))"),
            ("p2", "P(a)"),
        ]);
        let goal = clauses_of(&[("goal", "-Q(a)")]);
        let budget = ResourceBudget {
            max_time: std::time::Duration::from_secs(30),
            max_generated: 200,
        };
        let verdict = refute(&premises, &goal, &budget);
        assert_eq!(verdict.status, ProverStatus::ResourceLimit);
        assert!(verdict.stats.clauses_generated <= 210);
    }

    #[test]
    fn deterministic_verdicts_and_derivations() {
        let premises = clauses_of(&[
            ("p1", "all x. (Mammal(x) -> Teeth(x) & Digestive(x))"),
            ("p2", "all x. (Teeth(x) -> AidsDigestiveSystem(x) & BreaksDownFood(x))"),
        ]);
        let goal = clauses_of(&[("goal", "-(all x. (Mammal(x) -> Teeth(x) & BreaksDownFood(x)))")]);
        let first = refute(&premises, &goal, &ResourceBudget::default());
        let second = refute(&premises, &goal, &ResourceBudget::default());
        assert_eq!(first.status, ProverStatus::Proved);
        assert_eq!(first.status, second.status);
        assert_eq!(first.used_premises, second.used_premises);
        let d1: Vec<String> = first
            .derivation
            .unwrap()
            .steps
            .iter()
            .map(|s| s.clause.to_string())
            .collect();
        let d2: Vec<String> = second
            .derivation
            .unwrap()
            .steps
            .iter()
            .map(|s| s.clause.to_string())
            .collect();
        assert_eq!(d1, d2);
    }
}
