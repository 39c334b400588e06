#ifndef TLEMMA_H
#define TLEMMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TlemmaStatus {
  TLEMMA_STATUS_OK = 0,
  TLEMMA_STATUS_NULL_POINTER = 1,
  TLEMMA_STATUS_INVALID_UTF8 = 2,
  TLEMMA_STATUS_PARSE = 3,
  TLEMMA_STATUS_UNSUPPORTED = 4,
  TLEMMA_STATUS_UNKNOWN_STRATEGY = 5,
  /**
   * The budget lapsed; the returned lemma set is partial.
   */
  TLEMMA_STATUS_BUDGET_EXCEEDED = 6,
  TLEMMA_STATUS_CAP_EXCEEDED = 7,
  TLEMMA_STATUS_ORACLE = 8,
  TLEMMA_STATUS_OUT_OF_RANGE = 9,
  TLEMMA_STATUS_INTERNAL = 10,
  TLEMMA_STATUS_PANIC = 11,
} TlemmaStatus;

/**
 * A parsed instance.
 */
typedef struct TlemmaInstance TlemmaInstance;

/**
 * A deduplicated lemma set.
 */
typedef struct TlemmaLemmaSet TlemmaLemmaSet;

/**
 * Enumeration options. Zero `workers` means one worker; a non-positive
 * `budget_secs` means no budget; a null `oracle_cmd` selects the builtin
 * procedure.
 */
typedef struct TlemmaOptions {
  size_t workers;
  double budget_secs;
  uint32_t early_pruning;
  bool subsume;
  const char *oracle_cmd;
} TlemmaOptions;

/**
 * Verification outcome.
 */
typedef struct TlemmaVerdict {
  bool rules_out;
  bool lemmas_valid;
  bool atoms_in_theory;
  bool abstraction_equivalent;
  size_t n_ctta;
  size_t n_itta;
} TlemmaVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *tlemma_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tlemma_version(void);

/**
 * Default options: one worker, no budget, builtin oracle.
 */
struct TlemmaOptions tlemma_options_default(void);

/**
 * Parses an SMT-LIB2 script.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum TlemmaStatus tlemma_instance_parse(const char *text, struct TlemmaInstance **out);

/**
 * # Safety
 * `inst` must come from [`tlemma_instance_parse`] or be null.
 */
void tlemma_instance_free(struct TlemmaInstance *inst);

/**
 * Number of atoms (theory and Boolean); 0 for a null handle.
 *
 * # Safety
 * `inst` must be a live instance handle or null.
 */
size_t tlemma_instance_num_atoms(const struct TlemmaInstance *inst);

/**
 * Runs a strategy (e.g. `"dnc-proj-part"`). On `TLEMMA_STATUS_BUDGET_EXCEEDED`
 * `*out` still receives the partial lemma set.
 *
 * # Safety
 * `inst` must be a live instance, `strategy` a NUL-terminated string,
 * `options` null or valid, and `out` writable.
 */
enum TlemmaStatus tlemma_enumerate(const struct TlemmaInstance *inst,
                                   const char *strategy,
                                   const struct TlemmaOptions *options,
                                   struct TlemmaLemmaSet **out);

/**
 * # Safety
 * `set` must come from [`tlemma_enumerate`] or be null.
 */
void tlemma_lemmas_free(struct TlemmaLemmaSet *set);

/**
 * Number of lemmas; 0 for a null handle.
 *
 * # Safety
 * `set` must be a live lemma-set handle or null.
 */
size_t tlemma_lemmas_len(const struct TlemmaLemmaSet *set);

/**
 * Literal count of lemma `index`.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum TlemmaStatus tlemma_lemma_len(const struct TlemmaLemmaSet *set, size_t index, size_t *out);

/**
 * Literal `lit` of lemma `index` as an atom index and a polarity.
 *
 * # Safety
 * `set` must be a live handle; `atom` and `positive` writable.
 */
enum TlemmaStatus tlemma_lemma_literal(const struct TlemmaLemmaSet *set,
                                       size_t index,
                                       size_t lit,
                                       uint32_t *atom,
                                       bool *positive);

/**
 * The lemma set as an SMT-LIB2 script over the instance's symbols. Release
 * with [`tlemma_string_free`]. Null on failure.
 *
 * # Safety
 * Both handles must be live, and the set must come from `inst`.
 */
char *tlemma_lemmas_render(const struct TlemmaInstance *inst, const struct TlemmaLemmaSet *set);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void tlemma_string_free(char *s);

/**
 * Brute-force verification of `set` against `inst`, for instances with at
 * most `cap` atoms.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum TlemmaStatus tlemma_verify(const struct TlemmaInstance *inst,
                                const struct TlemmaLemmaSet *set,
                                size_t cap,
                                struct TlemmaVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TLEMMA_H */
