//! Command-line surface: parse formulas, check entailment queries (or act
//! as a TPTP SZS prover), evaluate datasets, run corpus diagnostics, and
//! export ranked training files.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use eprkit::dataset::{ingest, Dataset};
use eprkit::entailment::{CheckReason, CheckResult, EntailmentQuery, Label};
use eprkit::external::ExternalProverConfig;
use eprkit::fol::{parse_formula, to_tptp, Formula, TptpRole, TptpSerializer};
use eprkit::metrics::{Backend, VerdictCache};
use eprkit::prover::{
    refute, Clausifier, ClauseOrigin, DerivationStep, InferenceRule, ProverStatus, ResourceBudget,
};
use eprkit::runner::{
    arbitrariness_over_top1, render_arbitrariness_csv, render_report_json, render_summary_csv,
    run_eval, EvalOptions,
};
use eprkit::scoring::export_ranked_training_file;
use eprkit::tptp_input::read_tptp_problem;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Parser)]
#[command(name = "eprkit", version, about = "Entailment-preserving FOL evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Axiom,
    Conjecture,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelArg {
    Entailment,
    Contradiction,
}

impl From<LabelArg> for Label {
    fn from(value: LabelArg) -> Label {
        match value {
            LabelArg::Entailment => Label::Entailment,
            LabelArg::Contradiction => Label::Contradiction,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Internal,
    External,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form (or a TPTP statement)
    Parse {
        /// The formula text; read from stdin when omitted
        formula: Option<String>,
        /// Emit a TPTP FOF statement instead of the canonical form
        #[arg(long)]
        tptp: bool,
        /// Statement name for --tptp
        #[arg(long, default_value = "f1")]
        name: String,
        /// Statement role for --tptp
        #[arg(long, value_enum, default_value = "axiom")]
        role: RoleArg,
    },
    /// Check premises |- hypothesis with the gated prover, or prove a TPTP
    /// file and emit SZS result lines
    Prove {
        /// Premise formula (repeatable, in order)
        #[arg(long = "premise")]
        premises: Vec<String>,
        #[arg(long)]
        hypothesis: Option<String>,
        #[arg(long, value_enum, default_value = "entailment")]
        label: LabelArg,
        #[arg(long, value_enum, default_value = "internal")]
        backend: BackendArg,
        /// External prover command line, e.g. "vampire --proof tptp"
        /// (implies --backend external); the problem file path is appended
        #[arg(long)]
        prover_cmd: Option<String>,
        /// Per-call prover budget in milliseconds
        #[arg(long, default_value_t = 1000)]
        prover_timeout_ms: u64,
        /// Prove this TPTP problem file instead; prints `% SZS status ...`
        /// and a proof block, so the binary can serve as an external prover
        #[arg(long)]
        tptp_file: Option<PathBuf>,
    },
    /// Evaluate a JSONL dataset: EPR, EPR@K, EPR@K-oracle, diagnostics
    Eval {
        dataset: PathBuf,
        /// Output directory for report.json and summary.csv
        #[arg(long, default_value = "eprkit-out")]
        out_dir: PathBuf,
        /// Candidate cutoff per sentence
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, value_enum, default_value = "internal")]
        backend: BackendArg,
        #[arg(long)]
        prover_cmd: Option<String>,
        #[arg(long, default_value_t = 1000)]
        prover_timeout_ms: u64,
        /// Oracle search time limit in seconds
        #[arg(long, default_value_t = 600)]
        oracle_time_limit: u64,
        /// Enumerate all preserving combinations (no early exit)
        #[arg(long)]
        exhaustive: bool,
        /// Compute candidate scores and write ranked.jsonl (implies
        /// exhaustive enumeration)
        #[arg(long)]
        emit_scores: bool,
        /// Write one TPTP problem file per distinct prover query
        #[arg(long)]
        emit_tptp_dir: Option<PathBuf>,
        /// Persist verdicts here and replay them on reruns
        #[arg(long)]
        verdict_store: Option<PathBuf>,
        /// Worker threads for the pair fan-out (0 = automatic)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Weight mean arity entropy by predicate frequency
        #[arg(long)]
        weighted_arity: bool,
    },
    /// Corpus diagnostics
    Metrics {
        #[command(subcommand)]
        command: MetricsCommand,
    },
    /// Evaluate exhaustively and write the ranked training JSONL
    ExportRanked {
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, value_enum, default_value = "internal")]
        backend: BackendArg,
        #[arg(long)]
        prover_cmd: Option<String>,
        #[arg(long, default_value_t = 1000)]
        prover_timeout_ms: u64,
        #[arg(long)]
        verdict_store: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Unique predicate names per sentence and arity entropy over the
    /// top-1 parses of a dataset
    Arbitrariness {
        dataset: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv or json
        #[arg(long, default_value = "json")]
        format: String,
        /// Weight mean arity entropy by predicate frequency
        #[arg(long)]
        weighted: bool,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Parse {
            formula,
            tptp,
            name,
            role,
        } => cmd_parse(formula, tptp, &name, role),
        Command::Prove {
            premises,
            hypothesis,
            label,
            backend,
            prover_cmd,
            prover_timeout_ms,
            tptp_file,
        } => {
            if let Some(file) = tptp_file {
                cmd_prove_tptp(&file, prover_timeout_ms)
            } else {
                cmd_prove(
                    &premises,
                    hypothesis.as_deref(),
                    label.into(),
                    make_backend(backend, prover_cmd, prover_timeout_ms)?,
                )
            }
        }
        Command::Eval {
            dataset,
            out_dir,
            k,
            backend,
            prover_cmd,
            prover_timeout_ms,
            oracle_time_limit,
            exhaustive,
            emit_scores,
            emit_tptp_dir,
            verdict_store,
            workers,
            weighted_arity,
        } => cmd_eval(EvalArgs {
            dataset,
            out_dir,
            options: EvalOptions {
                k,
                exhaustive,
                emit_scores,
                oracle_time_limit: Duration::from_secs(oracle_time_limit),
                workers,
                weighted_arity,
            },
            backend: make_backend(backend, prover_cmd, prover_timeout_ms)?,
            emit_tptp_dir,
            verdict_store,
        }),
        Command::Metrics { command } => match command {
            MetricsCommand::Arbitrariness {
                dataset,
                out,
                format,
                weighted,
            } => cmd_arbitrariness(&dataset, out.as_deref(), &format, weighted),
        },
        Command::ExportRanked {
            dataset,
            out,
            k,
            backend,
            prover_cmd,
            prover_timeout_ms,
            verdict_store,
            workers,
        } => cmd_export_ranked(
            &dataset,
            &out,
            k,
            make_backend(backend, prover_cmd, prover_timeout_ms)?,
            verdict_store,
            workers,
        ),
    }
}

fn make_backend(
    backend: BackendArg,
    prover_cmd: Option<String>,
    prover_timeout_ms: u64,
) -> Result<Backend> {
    let timeout = Duration::from_millis(prover_timeout_ms);
    match (backend, prover_cmd) {
        (BackendArg::Internal, None) => Ok(Backend::Internal {
            budget: ResourceBudget {
                max_time: timeout,
                ..Default::default()
            },
        }),
        (_, Some(command_line)) => {
            let mut parts = command_line.split_whitespace();
            let Some(command) = parts.next() else {
                bail!("--prover-cmd is empty");
            };
            let mut config = ExternalProverConfig::new(command, timeout);
            config.args = parts.map(str::to_string).collect();
            Ok(Backend::External { config })
        }
        (BackendArg::External, None) => {
            bail!("--backend external requires --prover-cmd")
        }
    }
}

fn cmd_parse(formula: Option<String>, tptp: bool, name: &str, role: RoleArg) -> Result<()> {
    let text = match formula {
        Some(text) => text,
        None => {
            use std::io::Read as _;
            let mut buffer = String::new();
            std::io::stdin().read_to_string(&mut buffer)?;
            buffer
        }
    };
    let parsed = parse_formula(text.trim()).map_err(|e| anyhow::anyhow!("{e}"))?;
    if tptp {
        let role = match role {
            RoleArg::Axiom => TptpRole::Axiom,
            RoleArg::Conjecture => TptpRole::Conjecture,
        };
        println!("{}", to_tptp(&parsed, role, name)?);
    } else {
        println!("{parsed}");
    }
    Ok(())
}

fn cmd_prove(
    premises: &[String],
    hypothesis: Option<&str>,
    label: Label,
    backend: Backend,
) -> Result<()> {
    let Some(hypothesis) = hypothesis else {
        bail!("--hypothesis is required (or use --tptp-file)");
    };
    if premises.is_empty() {
        bail!("at least one --premise is required");
    }
    let premises: Vec<(String, Formula)> = premises
        .iter()
        .enumerate()
        .map(|(i, text)| {
            parse_formula(text)
                .map(|f| (format!("p{}", i + 1), f))
                .map_err(|e| anyhow::anyhow!("premise {}: {e}", i + 1))
        })
        .collect::<Result<_>>()?;
    let hypothesis =
        parse_formula(hypothesis).map_err(|e| anyhow::anyhow!("hypothesis: {e}"))?;
    let query = EntailmentQuery::new(premises, hypothesis, label)?;
    let result = match &backend {
        Backend::Internal { budget } => eprkit::entailment::check_entailment(&query, budget)?,
        Backend::External { config } => eprkit::external::check_external(&query, config)?,
    };
    print_check_result(&result);
    Ok(())
}

fn print_check_result(result: &CheckResult) {
    let reason = match result.reason {
        CheckReason::Ok => "ok",
        CheckReason::VocabularyViolation => "vocabulary_violation",
        CheckReason::NotProved => "not_proved",
        CheckReason::PremisesUnused => "premises_unused",
        CheckReason::ProverTimeout => "prover_timeout",
    };
    println!("preserved: {}", result.preserved);
    println!("reason: {reason}");
    if !result.used_premises.is_empty() {
        let used: Vec<&str> = result.used_premises.iter().map(String::as_str).collect();
        println!("used_premises: {}", used.join(", "));
    }
    if let Some(verdict) = &result.verdict {
        let status = match verdict.status {
            ProverStatus::Proved => "proved",
            ProverStatus::Saturated => "saturated",
            ProverStatus::Timeout => "timeout",
            ProverStatus::ResourceLimit => "resource_limit",
        };
        println!("prover_status: {status}");
        println!(
            "clauses_generated: {}  clauses_kept: {}  elapsed_ms: {}",
            verdict.stats.clauses_generated,
            verdict.stats.clauses_kept,
            verdict.stats.elapsed.as_millis()
        );
    }
}

/// SZS prover mode: read a TPTP problem, refute it, print the status line
/// and (for theorems) a proof block whose axiom statements carry the input
/// names, so callers can recover the used premises.
fn cmd_prove_tptp(file: &Path, prover_timeout_ms: u64) -> Result<()> {
    let display = file.display().to_string();
    let bytes = std::fs::read(file).with_context(|| format!("cannot read {display}"))?;
    let problem = read_tptp_problem(&bytes).map_err(|e| anyhow::anyhow!("{display}: {e}"))?;

    let mut clausifier = Clausifier::new();
    let mut all_formulas: Vec<(String, Formula)> = problem.axioms.clone();
    let goal = match (&problem.conjecture, &problem.negated_conjecture) {
        (Some(_), Some(_)) => bail!("{display}: both conjecture and negated_conjecture present"),
        (Some((name, f)), None) => Some((name.clone(), Formula::not(f.clone()))),
        (None, Some((name, f))) => Some((name.clone(), f.clone())),
        (None, None) => None,
    };
    for (_, f) in &all_formulas {
        clausifier.reserve_symbols(f);
    }
    if let Some((_, negated)) = &goal {
        clausifier.reserve_symbols(negated);
    }

    let mut premise_clauses = Vec::new();
    for (name, f) in &all_formulas {
        premise_clauses.extend(clausifier.clausify(f, name)?);
    }
    let mut goal_clauses = Vec::new();
    if let Some((name, negated)) = &goal {
        goal_clauses.extend(clausifier.clausify(negated, name)?);
    }

    let budget = ResourceBudget {
        max_time: Duration::from_millis(prover_timeout_ms),
        ..Default::default()
    };
    let verdict = refute(&premise_clauses, &goal_clauses, &budget);

    let has_goal = goal.is_some();
    let status = match verdict.status {
        ProverStatus::Proved if has_goal => "Theorem",
        ProverStatus::Proved => "Unsatisfiable",
        ProverStatus::Saturated if has_goal => "CounterSatisfiable",
        ProverStatus::Saturated => "Satisfiable",
        ProverStatus::Timeout => "Timeout",
        ProverStatus::ResourceLimit => "ResourceOut",
    };
    println!("% SZS status {status} for {display}");

    if verdict.status == ProverStatus::Proved {
        if let Some((name, negated)) = &goal {
            all_formulas.push((name.clone(), negated.clone()));
        }
        let derivation = verdict.derivation.expect("proved implies derivation");
        println!("% SZS output start Proof for {display}");
        print_proof(
            &derivation.steps,
            &all_formulas,
            goal.as_ref().map(|(n, _)| n.as_str()),
        )?;
        println!("% SZS output end Proof for {display}");
    }
    Ok(())
}

fn print_proof(
    steps: &[DerivationStep],
    formulas: &[(String, Formula)],
    goal_name: Option<&str>,
) -> Result<()> {
    let by_name: BTreeMap<&str, &Formula> =
        formulas.iter().map(|(n, f)| (n.as_str(), f)).collect();
    let serializer = TptpSerializer::for_formulas(formulas.iter().map(|(_, f)| f))?;

    // Names for derived steps; inputs reuse their statement names.
    let mut step_names: Vec<String> = Vec::with_capacity(steps.len());
    let mut derived_counter = 0usize;
    for step in steps {
        match &step.origin {
            ClauseOrigin::Input(name) => step_names.push(name.clone()),
            ClauseOrigin::Derived => {
                derived_counter += 1;
                step_names.push(format!("c{derived_counter}"));
            }
        }
    }

    for (i, step) in steps.iter().enumerate() {
        match &step.origin {
            ClauseOrigin::Input(name) => {
                let formula = by_name
                    .get(name.as_str())
                    .expect("derivation leaves come from the input");
                if Some(name.as_str()) == goal_name {
                    // The negated conjecture; role spelled accordingly.
                    let statement =
                        serializer.serialize(formula, TptpRole::Axiom, name)?;
                    println!("{}", statement.replacen("axiom", "negated_conjecture", 1));
                } else {
                    println!("{}", serializer.serialize(formula, TptpRole::Axiom, name)?);
                }
            }
            ClauseOrigin::Derived => {
                let rule = match step.rule {
                    InferenceRule::Resolution => "resolution",
                    InferenceRule::Factoring => "factoring",
                    InferenceRule::Input => "input",
                };
                let parents: Vec<&str> = step
                    .parents
                    .iter()
                    .map(|p| step_names[*p].as_str())
                    .collect();
                println!(
                    "cnf({}, plain, {}, inference({}, [], [{}])).",
                    step_names[i],
                    clause_to_tptp(&step.clause),
                    rule,
                    parents.join(", ")
                );
            }
        }
    }
    Ok(())
}

fn clause_to_tptp(clause: &eprkit::prover::Clause) -> String {
    if clause.literals.is_empty() {
        return "$false".to_string();
    }
    let literals: Vec<String> = clause
        .literals
        .iter()
        .map(|lit| {
            let args: Vec<String> = lit.args.iter().map(term_to_tptp).collect();
            let atom = if args.is_empty() {
                lower_first(&lit.predicate)
            } else {
                format!("{}({})", lower_first(&lit.predicate), args.join(","))
            };
            if lit.positive {
                atom
            } else {
                format!("~{atom}")
            }
        })
        .collect();
    format!("({})", literals.join(" | "))
}

fn term_to_tptp(term: &eprkit::fol::Term) -> String {
    match term {
        eprkit::fol::Term::Variable(name) => upper_first(name),
        eprkit::fol::Term::Constant(name) => lower_first(name),
        eprkit::fol::Term::Function(name, args) => {
            let args: Vec<String> = args.iter().map(term_to_tptp).collect();
            format!("{}({})", lower_first(name), args.join(","))
        }
    }
}

fn lower_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_ascii_lowercase().to_string() + chars.as_str(),
        None => name.to_string(),
    }
}

fn upper_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => name.to_string(),
    }
}

struct EvalArgs {
    dataset: PathBuf,
    out_dir: PathBuf,
    options: EvalOptions,
    backend: Backend,
    emit_tptp_dir: Option<PathBuf>,
    verdict_store: Option<PathBuf>,
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_cache(store: Option<&Path>) -> Result<VerdictCache> {
    Ok(match store {
        Some(path) => VerdictCache::with_store(path)
            .with_context(|| format!("opening verdict store {}", path.display()))?,
        None => VerdictCache::in_memory(),
    })
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let dataset: Dataset = ingest(&args.dataset)?;
    let mut cache = load_cache(args.verdict_store.as_deref())?;
    if let Some(dir) = &args.emit_tptp_dir {
        cache.set_tptp_emit_dir(dir);
    }

    let outcome = run_eval(&dataset, &args.backend, &cache, &args.options)?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let name = dataset_name(&args.dataset);
    let report_path = args.out_dir.join("report.json");
    std::fs::write(&report_path, render_report_json(&name, &outcome))?;
    let summary_path = args.out_dir.join("summary.csv");
    std::fs::write(&summary_path, render_summary_csv(&name, &outcome.report))?;
    if let Some(scores) = &outcome.scores {
        let ranked_path = args.out_dir.join("ranked.jsonl");
        export_ranked_training_file(&dataset, scores, &ranked_path)?;
    }

    let report = &outcome.report;
    println!(
        "pairs: {}  epr: {}/{} ({:.4})  epr@{}: {}/{} ({:.4})  oracle: {}/{} ({:.4}, {})",
        report.pair_count,
        report.epr_preserved,
        report.pair_count,
        report.epr,
        report.k,
        report.epr_at_k_preserved,
        report.pair_count,
        report.epr_at_k,
        report.epr_at_k_oracle_successes,
        report.pair_count,
        report.epr_at_k_oracle,
        match report.oracle_status {
            eprkit::metrics::OracleStatus::Exact => "exact",
            eprkit::metrics::OracleStatus::LowerBound => "lower_bound",
        }
    );
    println!("report: {}", report_path.display());
    eprintln!(
        "prover_calls: {}  cache_hits: {}  elapsed_ms: {}",
        outcome.stats.prover_calls,
        outcome.stats.cache_hits,
        outcome.stats.elapsed.as_millis()
    );
    Ok(())
}

fn cmd_arbitrariness(
    dataset: &Path,
    out: Option<&Path>,
    format: &str,
    weighted: bool,
) -> Result<()> {
    let dataset = ingest(dataset)?;
    let summary = arbitrariness_over_top1(&dataset, weighted);
    let rendered = match format {
        "json" => {
            let mut text = serde_json::to_string_pretty(&summary)?;
            text.push('\n');
            text
        }
        "csv" => render_arbitrariness_csv(&summary),
        other => bail!("unknown format {other:?} (expected json or csv)"),
    };
    match out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    if let Some(value) = summary.unique_predicates_per_sentence {
        eprintln!("unique_predicates_per_sentence: {value:.4}");
    }
    if let Some(arity) = &summary.arity {
        eprintln!("mean_arity_entropy_bits: {:.4}", arity.mean_entropy_bits);
    }
    Ok(())
}

fn cmd_export_ranked(
    dataset_path: &Path,
    out: &Path,
    k: usize,
    backend: Backend,
    verdict_store: Option<PathBuf>,
    workers: usize,
) -> Result<()> {
    let dataset = ingest(dataset_path)?;
    let cache = load_cache(verdict_store.as_deref())?;
    let options = EvalOptions {
        k,
        emit_scores: true,
        workers,
        ..Default::default()
    };
    let outcome = run_eval(&dataset, &backend, &cache, &options)?;
    let scores = outcome.scores.expect("emit_scores was set");
    export_ranked_training_file(&dataset, &scores, out)?;
    println!("ranked training file: {}", out.display());
    eprintln!(
        "prover_calls: {}  cache_hits: {}",
        outcome.stats.prover_calls, outcome.stats.cache_hits
    );
    Ok(())
}
