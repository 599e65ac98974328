#ifndef EPRKIT_H
#define EPRKIT_H

/* Generated by cbindgen from eprkit-ffi; do not edit by hand. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Why a checked entailment was or was not preserved.
 */
typedef enum {
  EPRKIT_REASON_OK = 0,
  EPRKIT_REASON_VOCABULARY_VIOLATION = 1,
  EPRKIT_REASON_NOT_PROVED = 2,
  EPRKIT_REASON_PREMISES_UNUSED = 3,
  EPRKIT_REASON_PROVER_TIMEOUT = 4,
} EprkitReason;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum {
  EPRKIT_OK = 0,
  EPRKIT_ERR_NULL_ARGUMENT = 1,
  EPRKIT_ERR_UTF8 = 2,
  EPRKIT_ERR_SYNTAX = 3,
  EPRKIT_ERR_FREE_VARIABLE = 4,
  EPRKIT_ERR_QUERY = 5,
  EPRKIT_ERR_EVAL = 6,
  EPRKIT_ERR_IO = 7,
  EPRKIT_ERR_INVALID_ARGUMENT = 8,
  EPRKIT_ERR_INTERNAL = 9,
} EprkitStatus;

/**
 * Opaque loaded dataset.
 */
typedef struct EprkitDataset EprkitDataset;

/**
 * Opaque parsed formula.
 */
typedef struct EprkitFormula EprkitFormula;

/**
 * Opaque evaluation outcome.
 */
typedef struct EprkitReport EprkitReport;

/**
 * Result of one gated entailment check.
 */
typedef struct {
  bool preserved;
  EprkitReason reason;
} EprkitCheckOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the most recent error on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *eprkit_last_error_message(void);

/**
 * Parse one closed formula in the surface syntax.
 */
EprkitStatus eprkit_formula_parse(const char *text, EprkitFormula **out);

void eprkit_formula_free(EprkitFormula *formula);

/**
 * Canonical surface-syntax form of the formula.
 */
EprkitStatus eprkit_formula_print(const EprkitFormula *formula, char **out);

/**
 * One TPTP FOF statement; role 0 = axiom, 1 = conjecture.
 */
EprkitStatus eprkit_formula_to_tptp(const EprkitFormula *formula,
                                    int32_t role,
                                    const char *name,
                                    char **out);

void eprkit_string_free(char *s);

/**
 * Check premises entail (or, with `contradiction_label`, contradict) the
 * hypothesis with the in-process prover and both verification gates.
 */
EprkitStatus eprkit_check_entailment(const EprkitFormula *const *premises,
                                     uintptr_t premise_count,
                                     const EprkitFormula *hypothesis,
                                     bool contradiction_label,
                                     uint64_t prover_timeout_ms,
                                     EprkitCheckOutcome *out);

/**
 * Load a JSONL dataset from disk.
 */
EprkitStatus eprkit_dataset_load(const char *path, EprkitDataset **out);

void eprkit_dataset_free(EprkitDataset *dataset);

/**
 * Evaluate the dataset with the in-process prover: EPR, EPR@K, and the
 * EPR@K-oracle, with exhaustive combination detail when requested.
 */
EprkitStatus eprkit_eval(const EprkitDataset *dataset,
                         uintptr_t k,
                         bool exhaustive,
                         uint64_t prover_timeout_ms,
                         uint64_t oracle_time_limit_s,
                         EprkitReport **out);

void eprkit_report_free(EprkitReport *report);

double eprkit_report_epr(const EprkitReport *report);

double eprkit_report_epr_at_k(const EprkitReport *report);

double eprkit_report_epr_at_k_oracle(const EprkitReport *report);

/**
 * The full report as JSON (the same document `eval` writes).
 */
EprkitStatus eprkit_report_to_json(const EprkitReport *report, char **out);

/**
 * Pairwise margin ranking loss over parallel arrays of length-normalized
 * log-probabilities and scores.
 */
EprkitStatus eprkit_brio_loss(const double *logprobs,
                              const int64_t *scores,
                              uintptr_t count,
                              double margin,
                              double *out);

/**
 * Shannon entropy (bits) of an arity histogram given as parallel arrays
 * of arities and occurrence counts.
 */
double eprkit_arity_entropy(const uintptr_t *arities, const uint64_t *counts, uintptr_t count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPRKIT_H */
