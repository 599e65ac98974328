//! C ABI for the toolkit: opaque handles, integer status codes, and a
//! thread-local last-error message. The header is generated by cbindgen
//! into `include/eprkit.h` at build time.
//!
//! Ownership rules: every `*_free` function matches one constructor;
//! strings returned through `char **` out-parameters are released with
//! `eprkit_string_free`; input pointers are borrowed for the call only.

#![allow(clippy::missing_safety_doc)]

use eprkit::dataset::{ingest, Dataset};
use eprkit::entailment::{check_entailment, CheckReason, EntailmentQuery, Label};
use eprkit::fol::{parse_formula, to_tptp, Formula, ParseError, TptpRole};
use eprkit::metrics::{Backend, VerdictCache};
use eprkit::prover::ResourceBudget;
use eprkit::runner::{render_report_json, run_eval, EvalOptions, EvalOutcome};
use eprkit::scoring::{brio_loss, LossConfig};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum EprkitStatus {
    EprkitOk = 0,
    EprkitErrNullArgument = 1,
    EprkitErrUtf8 = 2,
    EprkitErrSyntax = 3,
    EprkitErrFreeVariable = 4,
    EprkitErrQuery = 5,
    EprkitErrEval = 6,
    EprkitErrIo = 7,
    EprkitErrInvalidArgument = 8,
    EprkitErrInternal = 9,
}

/// Why a checked entailment was or was not preserved.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum EprkitReason {
    EprkitReasonOk = 0,
    EprkitReasonVocabularyViolation = 1,
    EprkitReasonNotProved = 2,
    EprkitReasonPremisesUnused = 3,
    EprkitReasonProverTimeout = 4,
}

/// Result of one gated entailment check.
#[repr(C)]
pub struct EprkitCheckOutcome {
    pub preserved: bool,
    pub reason: EprkitReason,
}

/// Opaque parsed formula.
pub struct EprkitFormula(Formula);

/// Opaque loaded dataset.
pub struct EprkitDataset(Dataset);

/// Opaque evaluation outcome.
pub struct EprkitReport {
    name: String,
    outcome: EvalOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

/// The message for the most recent error on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eprkit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, EprkitStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(EprkitStatus::EprkitErrNullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        EprkitStatus::EprkitErrUtf8
    })
}

fn guard<F: FnOnce() -> EprkitStatus>(f: F) -> EprkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            EprkitStatus::EprkitErrInternal
        }
    }
}

fn export_string(text: String, out: *mut *mut c_char) -> EprkitStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            EprkitStatus::EprkitOk
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            EprkitStatus::EprkitErrInternal
        }
    }
}

/// Parse one closed formula in the surface syntax.
#[no_mangle]
pub unsafe extern "C" fn eprkit_formula_parse(
    text: *const c_char,
    out: *mut *mut EprkitFormula,
) -> EprkitStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let text = match read_utf8(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_formula(text) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(EprkitFormula(f)));
                EprkitStatus::EprkitOk
            }
            Err(e @ ParseError::Syntax { .. }) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrSyntax
            }
            Err(e @ ParseError::FreeVariables(_)) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrFreeVariable
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_formula_free(formula: *mut EprkitFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Canonical surface-syntax form of the formula.
#[no_mangle]
pub unsafe extern "C" fn eprkit_formula_print(
    formula: *const EprkitFormula,
    out: *mut *mut c_char,
) -> EprkitStatus {
    guard(|| {
        if formula.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        export_string((*formula).0.to_string(), out)
    })
}

/// One TPTP FOF statement; role 0 = axiom, 1 = conjecture.
#[no_mangle]
pub unsafe extern "C" fn eprkit_formula_to_tptp(
    formula: *const EprkitFormula,
    role: i32,
    name: *const c_char,
    out: *mut *mut c_char,
) -> EprkitStatus {
    guard(|| {
        if formula.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let name = match read_utf8(name) {
            Ok(n) => n,
            Err(status) => return status,
        };
        let role = match role {
            0 => TptpRole::Axiom,
            1 => TptpRole::Conjecture,
            _ => {
                set_error("role must be 0 (axiom) or 1 (conjecture)");
                return EprkitStatus::EprkitErrInvalidArgument;
            }
        };
        match to_tptp(&(*formula).0, role, name) {
            Ok(statement) => export_string(statement, out),
            Err(e) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrInvalidArgument
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Check premises entail (or, with `contradiction_label`, contradict) the
/// hypothesis with the in-process prover and both verification gates.
#[no_mangle]
pub unsafe extern "C" fn eprkit_check_entailment(
    premises: *const *const EprkitFormula,
    premise_count: usize,
    hypothesis: *const EprkitFormula,
    contradiction_label: bool,
    prover_timeout_ms: u64,
    out: *mut EprkitCheckOutcome,
) -> EprkitStatus {
    guard(|| {
        if premises.is_null() || hypothesis.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let mut owned = Vec::with_capacity(premise_count);
        for i in 0..premise_count {
            let premise = *premises.add(i);
            if premise.is_null() {
                set_error(format!("premise {i} is null"));
                return EprkitStatus::EprkitErrNullArgument;
            }
            owned.push((format!("p{}", i + 1), (*premise).0.clone()));
        }
        let label = if contradiction_label {
            Label::Contradiction
        } else {
            Label::Entailment
        };
        let query = match EntailmentQuery::new(owned, (*hypothesis).0.clone(), label) {
            Ok(q) => q,
            Err(e) => {
                set_error(e.to_string());
                return EprkitStatus::EprkitErrQuery;
            }
        };
        let budget = ResourceBudget {
            max_time: Duration::from_millis(prover_timeout_ms),
            ..Default::default()
        };
        match check_entailment(&query, &budget) {
            Ok(result) => {
                (*out).preserved = result.preserved;
                (*out).reason = match result.reason {
                    CheckReason::Ok => EprkitReason::EprkitReasonOk,
                    CheckReason::VocabularyViolation => {
                        EprkitReason::EprkitReasonVocabularyViolation
                    }
                    CheckReason::NotProved => EprkitReason::EprkitReasonNotProved,
                    CheckReason::PremisesUnused => EprkitReason::EprkitReasonPremisesUnused,
                    CheckReason::ProverTimeout => EprkitReason::EprkitReasonProverTimeout,
                };
                EprkitStatus::EprkitOk
            }
            Err(e) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrEval
            }
        }
    })
}

/// Load a JSONL dataset from disk.
#[no_mangle]
pub unsafe extern "C" fn eprkit_dataset_load(
    path: *const c_char,
    out: *mut *mut EprkitDataset,
) -> EprkitStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let path = match read_utf8(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match ingest(path) {
            Ok(dataset) => {
                *out = Box::into_raw(Box::new(EprkitDataset(dataset)));
                EprkitStatus::EprkitOk
            }
            Err(e) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrIo
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_dataset_free(dataset: *mut EprkitDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Evaluate the dataset with the in-process prover: EPR, EPR@K, and the
/// EPR@K-oracle, with exhaustive combination detail when requested.
#[no_mangle]
pub unsafe extern "C" fn eprkit_eval(
    dataset: *const EprkitDataset,
    k: usize,
    exhaustive: bool,
    prover_timeout_ms: u64,
    oracle_time_limit_s: u64,
    out: *mut *mut EprkitReport,
) -> EprkitStatus {
    guard(|| {
        if dataset.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let backend = Backend::Internal {
            budget: ResourceBudget {
                max_time: Duration::from_millis(prover_timeout_ms),
                ..Default::default()
            },
        };
        let cache = VerdictCache::in_memory();
        let options = EvalOptions {
            k,
            exhaustive,
            oracle_time_limit: Duration::from_secs(oracle_time_limit_s),
            ..Default::default()
        };
        match run_eval(&(*dataset).0, &backend, &cache, &options) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(EprkitReport {
                    name: "dataset".to_string(),
                    outcome,
                }));
                EprkitStatus::EprkitOk
            }
            Err(e) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrEval
            }
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_report_free(report: *mut EprkitReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_report_epr(report: *const EprkitReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).outcome.report.epr
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_report_epr_at_k(report: *const EprkitReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).outcome.report.epr_at_k
}

#[no_mangle]
pub unsafe extern "C" fn eprkit_report_epr_at_k_oracle(report: *const EprkitReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    (*report).outcome.report.epr_at_k_oracle
}

/// The full report as JSON (the same document `eval` writes).
#[no_mangle]
pub unsafe extern "C" fn eprkit_report_to_json(
    report: *const EprkitReport,
    out: *mut *mut c_char,
) -> EprkitStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let text = render_report_json(&(*report).name, &(*report).outcome);
        export_string(text, out)
    })
}

/// Pairwise margin ranking loss over parallel arrays of length-normalized
/// log-probabilities and scores.
#[no_mangle]
pub unsafe extern "C" fn eprkit_brio_loss(
    logprobs: *const f64,
    scores: *const i64,
    count: usize,
    margin: f64,
    out: *mut f64,
) -> EprkitStatus {
    guard(|| {
        if logprobs.is_null() || scores.is_null() || out.is_null() {
            set_error("null pointer argument");
            return EprkitStatus::EprkitErrNullArgument;
        }
        let logprobs = std::slice::from_raw_parts(logprobs, count);
        let scores = std::slice::from_raw_parts(scores, count);
        let candidates: Vec<(Option<f64>, i64)> = logprobs
            .iter()
            .zip(scores)
            .map(|(lp, s)| (Some(*lp), *s))
            .collect();
        let config = LossConfig {
            margin,
            ..Default::default()
        };
        match brio_loss(&candidates, &config) {
            Ok(loss) => {
                *out = loss;
                EprkitStatus::EprkitOk
            }
            Err(e) => {
                set_error(e.to_string());
                EprkitStatus::EprkitErrInvalidArgument
            }
        }
    })
}

/// Shannon entropy (bits) of an arity histogram given as parallel arrays
/// of arities and occurrence counts.
#[no_mangle]
pub unsafe extern "C" fn eprkit_arity_entropy(
    arities: *const usize,
    counts: *const u64,
    count: usize,
) -> f64 {
    if arities.is_null() || counts.is_null() {
        return f64::NAN;
    }
    let arities = std::slice::from_raw_parts(arities, count);
    let counts = std::slice::from_raw_parts(counts, count);
    let histogram = eprkit::arbitrariness::ArityHistogram {
        counts: arities.iter().copied().zip(counts.iter().copied()).collect(),
    };
    eprkit::arbitrariness::arity_entropy(&histogram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    unsafe fn parse(text: &str) -> *mut EprkitFormula {
        let text = CString::new(text).unwrap();
        let mut out = std::ptr::null_mut();
        assert!(eprkit_formula_parse(text.as_ptr(), &mut out) == EprkitStatus::EprkitOk);
        out
    }

    #[test]
    fn parse_print_roundtrip() {
        unsafe {
            let f = parse("all x. (Harp(x) -> Instrument(x))");
            let mut printed = std::ptr::null_mut();
            assert!(eprkit_formula_print(f, &mut printed) == EprkitStatus::EprkitOk);
            let text = CStr::from_ptr(printed).to_str().unwrap().to_string();
            assert_eq!(text, "all x. (Harp(x) -> Instrument(x))");
            eprkit_string_free(printed);
            eprkit_formula_free(f);
        }
    }

    #[test]
    fn syntax_errors_set_the_message() {
        unsafe {
            let text = CString::new("P(").unwrap();
            let mut out = std::ptr::null_mut();
            let status = eprkit_formula_parse(text.as_ptr(), &mut out);
            assert!(status == EprkitStatus::EprkitErrSyntax);
            let message = eprkit_last_error_message();
            assert!(!message.is_null());
            let message = CStr::from_ptr(message).to_str().unwrap();
            assert!(message.contains("syntax error"), "{message}");
        }
    }

    #[test]
    fn free_variables_have_their_own_code() {
        unsafe {
            let text = CString::new("P(x)").unwrap();
            let mut out = std::ptr::null_mut();
            let status = eprkit_formula_parse(text.as_ptr(), &mut out);
            assert!(status == EprkitStatus::EprkitErrFreeVariable);
        }
    }

    #[test]
    fn tptp_export() {
        unsafe {
            let f = parse("Planet(mars)");
            let name = CString::new("p1").unwrap();
            let mut out = std::ptr::null_mut();
            assert!(
                eprkit_formula_to_tptp(f, 0, name.as_ptr(), &mut out)
                    == EprkitStatus::EprkitOk
            );
            let text = CStr::from_ptr(out).to_str().unwrap();
            assert_eq!(text, "fof(p1, axiom, planet(mars)).");
            eprkit_string_free(out);
            eprkit_formula_free(f);
        }
    }

    #[test]
    fn gated_check_through_the_abi() {
        unsafe {
            let p1 = parse("H(s)");
            let p2 = parse("all x. (H(x) -> M(x))");
            let hypothesis = parse("M(s)");
            let premises = [p1 as *const EprkitFormula, p2 as *const EprkitFormula];
            let mut outcome = EprkitCheckOutcome {
                preserved: false,
                reason: EprkitReason::EprkitReasonNotProved,
            };
            let status = eprkit_check_entailment(
                premises.as_ptr(),
                2,
                hypothesis,
                false,
                1000,
                &mut outcome,
            );
            assert!(status == EprkitStatus::EprkitOk);
            assert!(outcome.preserved);
            assert!(outcome.reason == EprkitReason::EprkitReasonOk);

            // Vocabulary gate through the same surface.
            let q = parse("Q(s)");
            let premises = [p1 as *const EprkitFormula];
            let status =
                eprkit_check_entailment(premises.as_ptr(), 1, q, false, 1000, &mut outcome);
            assert!(status == EprkitStatus::EprkitOk);
            assert!(!outcome.preserved);
            assert!(outcome.reason == EprkitReason::EprkitReasonVocabularyViolation);

            eprkit_formula_free(p1);
            eprkit_formula_free(p2);
            eprkit_formula_free(hypothesis);
            eprkit_formula_free(q);
        }
    }

    #[test]
    fn dataset_eval_through_the_abi() {
        unsafe {
            let path = concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../eprkit/fixtures/moonlight.jsonl"
            );
            let path = CString::new(path).unwrap();
            let mut dataset = std::ptr::null_mut();
            assert!(eprkit_dataset_load(path.as_ptr(), &mut dataset) == EprkitStatus::EprkitOk);
            let mut report = std::ptr::null_mut();
            assert!(
                eprkit_eval(dataset, 3, false, 1000, 600, &mut report) == EprkitStatus::EprkitOk
            );
            assert_eq!(eprkit_report_epr(report), 0.0);
            assert_eq!(eprkit_report_epr_at_k(report), 1.0);
            assert_eq!(eprkit_report_epr_at_k_oracle(report), 0.5);
            let mut json = std::ptr::null_mut();
            assert!(eprkit_report_to_json(report, &mut json) == EprkitStatus::EprkitOk);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"epr\""));
            eprkit_string_free(json);
            eprkit_report_free(report);
            eprkit_dataset_free(dataset);
        }
    }

    #[test]
    fn loss_and_entropy_helpers() {
        unsafe {
            let logprobs = [-1.0, -0.5];
            let scores = [1i64, 0];
            let mut loss = 0.0;
            let status = eprkit_brio_loss(
                logprobs.as_ptr(),
                scores.as_ptr(),
                2,
                0.01,
                &mut loss,
            );
            assert!(status == EprkitStatus::EprkitOk);
            assert!((loss - 0.51).abs() < 1e-9);

            let arities = [2usize, 3];
            let counts = [10u64, 4];
            let bits = eprkit_arity_entropy(arities.as_ptr(), counts.as_ptr(), 2);
            assert!((bits - 0.8631).abs() < 0.005);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut out = std::ptr::null_mut();
            assert!(
                eprkit_formula_parse(std::ptr::null(), &mut out)
                    == EprkitStatus::EprkitErrNullArgument
            );
            assert!(eprkit_report_epr(std::ptr::null()).is_nan());
        }
    }
}
