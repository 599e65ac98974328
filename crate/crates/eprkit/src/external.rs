//! Adapter for external TPTP provers.
//!
//! The contract: the prover is invoked as `<command> [args...] <file>` on a
//! file of `fof(...)` statements, prints `% SZS status <S>` on stdout, and
//! when it proves the conjecture emits the proof between `% SZS output
//! start` and `% SZS output end`. Used premises are recovered from the
//! axiom names referenced in that block, either as `fof(name, axiom, ...)`
//! statements or inside `file('...', name)` source annotations. The same
//! vocabulary and used-premise gates apply as for the in-process backend.

use crate::entailment::{
    interpret_verdict, vocabulary_admissible, CheckReason, CheckResult, EntailmentQuery,
};
use crate::fol::{MangleError, TptpRole, TptpSerializer};
use crate::prover::{ProofVerdict, ProverStats, ProverStatus};
use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Clone, Debug)]
pub struct ExternalProverConfig {
    pub command: PathBuf,
    /// Extra arguments placed before the problem file path.
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ExternalProverConfig {
    pub fn new(command: impl Into<PathBuf>, timeout: Duration) -> ExternalProverConfig {
        ExternalProverConfig {
            command: command.into(),
            args: Vec::new(),
            timeout,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("failed to run external prover: {0}")]
    Io(#[from] std::io::Error),
    #[error("external prover exited with {code:?} and no SZS status: {excerpt}")]
    NoSzsStatus { code: Option<i32>, excerpt: String },
    #[error(transparent)]
    Mangle(#[from] MangleError),
}

/// Run the gated check through an external SZS prover.
pub fn check_external(
    query: &EntailmentQuery,
    config: &ExternalProverConfig,
) -> Result<CheckResult, ExternalError> {
    let goal = query.goal();
    if !vocabulary_admissible(query, &goal) {
        return Ok(CheckResult {
            preserved: false,
            reason: CheckReason::VocabularyViolation,
            used_premises: BTreeSet::new(),
            verdict: None,
        });
    }

    let deduped = query.deduped_premises();
    let mut formulas: Vec<&crate::fol::Formula> = deduped.iter().map(|(_, _, f)| *f).collect();
    formulas.push(&goal);
    let serializer = TptpSerializer::for_formulas(formulas)?;

    // Axiom names are positional; map them back to premise ids afterwards.
    let mut problem = String::new();
    let mut name_to_rep = Vec::new();
    for (i, (rep, _, f)) in deduped.iter().enumerate() {
        let name = format!("p{}", i + 1);
        problem.push_str(&serializer.serialize(f, TptpRole::Axiom, &name)?);
        problem.push('\n');
        name_to_rep.push((name, rep.clone()));
    }
    problem.push_str(&serializer.serialize(&goal, TptpRole::Conjecture, "goal")?);
    problem.push('\n');

    let run = run_prover(config, &problem)?;
    let elapsed = run.elapsed;

    let status = match run.szs_status.as_deref() {
        Some("Theorem") => ProverStatus::Proved,
        Some("CounterSatisfiable") | Some("Satisfiable") => ProverStatus::Saturated,
        Some(_) => ProverStatus::Timeout,
        None if run.timed_out => ProverStatus::Timeout,
        None => {
            return Err(ExternalError::NoSzsStatus {
                code: run.exit_code,
                excerpt: run.output.chars().take(400).collect(),
            });
        }
    };

    let used_premises = if status == ProverStatus::Proved {
        let names = referenced_axiom_names(&run.output);
        let used: BTreeSet<String> = name_to_rep
            .iter()
            .filter(|(name, _)| names.contains(name))
            .map(|(_, rep)| rep.clone())
            .collect();
        if used.is_empty() {
            // Status Theorem but no recoverable axiom references: treat as
            // spurious rather than trusting the proof.
            eprintln!(
                "warning: external prover reported Theorem but the proof names no axioms; \
                 treating the result as premises_unused"
            );
        }
        used
    } else {
        BTreeSet::new()
    };

    let verdict = ProofVerdict {
        status,
        used_premises,
        derivation: None,
        stats: ProverStats {
            clauses_generated: 0,
            clauses_kept: 0,
            elapsed,
        },
    };
    Ok(interpret_verdict(query, &deduped, verdict))
}

struct ProverRun {
    output: String,
    szs_status: Option<String>,
    exit_code: Option<i32>,
    timed_out: bool,
    elapsed: Duration,
}

fn run_prover(config: &ExternalProverConfig, problem: &str) -> Result<ProverRun, std::io::Error> {
    let mut file = tempfile::Builder::new()
        .prefix("eprkit-")
        .suffix(".p")
        .tempfile()?;
    file.write_all(problem.as_bytes())?;
    file.flush()?;

    let started = Instant::now();
    let mut child = Command::new(&config.command)
        .args(&config.args)
        .arg(file.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .stdin(Stdio::null())
        .spawn()?;

    let mut timed_out = false;
    let exit_code = loop {
        match child.try_wait()? {
            Some(status) => break status.code(),
            None => {
                if started.elapsed() >= config.timeout {
                    timed_out = true;
                    let _ = child.kill();
                    let _ = child.wait();
                    break None;
                }
                std::thread::sleep(Duration::from_millis(5));
            }
        }
    };
    let elapsed = started.elapsed();

    let mut output = String::new();
    if let Some(mut stdout) = child.stdout.take() {
        use std::io::Read as _;
        let _ = stdout.read_to_string(&mut output);
    }

    let szs_status = output.lines().find_map(|line| {
        let rest = line.trim().strip_prefix("% SZS status ")?;
        rest.split_whitespace().next().map(str::to_string)
    });

    Ok(ProverRun {
        output,
        szs_status,
        exit_code,
        timed_out,
        elapsed,
    })
}

/// Axiom names referenced inside the SZS proof block.
fn referenced_axiom_names(output: &str) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    let mut in_proof = false;
    for line in output.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with("% SZS output start") {
            in_proof = true;
            continue;
        }
        if trimmed.starts_with("% SZS output end") {
            in_proof = false;
            continue;
        }
        if !in_proof {
            continue;
        }
        // fof(name, axiom, ...) or cnf(name, axiom, ...)
        for head in ["fof(", "cnf("] {
            if let Some(rest) = trimmed.strip_prefix(head) {
                let mut parts = rest.splitn(3, ',');
                if let (Some(name), Some(role)) = (parts.next(), parts.next()) {
                    if role.trim() == "axiom" {
                        names.insert(unquote(name.trim()));
                    }
                }
            }
        }
        // source annotations: file('problem.p', name)
        let mut remainder = trimmed;
        while let Some(pos) = remainder.find("file(") {
            remainder = &remainder[pos + 5..];
            if let Some(end) = remainder.find(')') {
                let inner = &remainder[..end];
                if let Some((_, name)) = inner.rsplit_once(',') {
                    names.insert(unquote(name.trim()));
                }
                remainder = &remainder[end..];
            } else {
                break;
            }
        }
    }
    names
}

fn unquote(name: &str) -> String {
    name.trim_matches('\'').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_names_from_fof_statements() {
        let output = "\
% SZS status Theorem for x.p
% SZS output start Proof for x.p
fof(p1, axiom, h(s)).
fof(p2, axiom, ! [X] : (h(X) => m(X))).
fof(goal, conjecture, m(s)).
cnf(d1, plain, m(s), inference(resolution, [], [p1, p2])).
% SZS output end Proof for x.p
";
        let names = referenced_axiom_names(output);
        assert!(names.contains("p1"));
        assert!(names.contains("p2"));
        assert!(!names.contains("goal"));
    }

    #[test]
    fn recovers_names_from_file_annotations() {
        let output = "\
% SZS status Theorem for x.p
% SZS output start Proof for x.p
fof(f17, plain, h(s), file('/tmp/eprkit-x.p', p1)).
fof(f18, plain, ! [X0] : (h(X0) => m(X0)), file('/tmp/eprkit-x.p', p2)).
% SZS output end Proof for x.p
";
        let names = referenced_axiom_names(output);
        assert!(names.contains("p1"));
        assert!(names.contains("p2"));
    }

    #[test]
    fn names_outside_the_proof_block_are_ignored() {
        let output = "\
fof(p1, axiom, h(s)).
% SZS status Theorem for x.p
";
        assert!(referenced_axiom_names(output).is_empty());
    }
}
