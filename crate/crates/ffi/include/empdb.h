#ifndef EMPDB_H
#define EMPDB_H

/* Generated by cbindgen from empdb-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How a consistency check turns ground models into count bounds.
 */
typedef enum EmpdbMode {
  /**
   * One lower bound per predicate of each ground model.
   */
  EMPDB_MODE_PAPER = 0,
  /**
   * One lower bound per full constant description; catches more.
   */
  EMPDB_MODE_STRICT = 1,
} EmpdbMode;

/**
 * Result of every fallible call. Zero is success.
 */
typedef enum EmpdbStatus {
  EMPDB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  EMPDB_STATUS_NULL_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  EMPDB_STATUS_INVALID_UTF8 = 2,
  /**
   * The text failed to parse; see `empdb_last_error`.
   */
  EMPDB_STATUS_PARSE_ERROR = 3,
  /**
   * The program parsed but breaks a structural rule.
   */
  EMPDB_STATUS_INVALID_PROGRAM = 4,
  /**
   * Compilation outgrew its configured budget.
   */
  EMPDB_STATUS_CAP_EXCEEDED = 5,
  /**
   * A query's applicable clauses contradict each other.
   */
  EMPDB_STATUS_CONFLICTING_EVIDENCE = 6,
  /**
   * Any other engine failure; see `empdb_last_error`.
   */
  EMPDB_STATUS_ENGINE_ERROR = 7,
  /**
   * An internal invariant broke; the call had no effect.
   */
  EMPDB_STATUS_PANIC = 8,
} EmpdbStatus;

/**
 * A compiled program ready for queries. Opaque.
 */
typedef struct EmpdbCompiled EmpdbCompiled;

/**
 * A parsed program. Opaque.
 */
typedef struct EmpdbProgram EmpdbProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failure on this thread, or null if none.
 * Valid until the next failing call on the same thread; do not free.
 */
const char *empdb_last_error(void);

/**
 * Release a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `text` must have come from this library's out-parameters, unfreed.
 */
void empdb_string_free(char *text);

/**
 * Parse program text into a handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EmpdbStatus empdb_program_parse(const char *text, struct EmpdbProgram **out);

/**
 * Release a program handle. Null is a no-op.
 *
 * # Safety
 * `program` must have come from `empdb_program_parse`, unfreed.
 */
void empdb_program_free(struct EmpdbProgram *program);

/**
 * Render a program back to its canonical text.
 *
 * # Safety
 * `program` must be a live handle; `out` must be a valid pointer.
 */
enum EmpdbStatus empdb_program_render(const struct EmpdbProgram *program, char **out);

/**
 * Decide consistency; the verdict arrives as a JSON document with keys
 * `kind`, `mode`, and (when consistent) `witness` and `model`.
 *
 * # Safety
 * `program` must be a live handle; `out_json` must be a valid pointer.
 */
enum EmpdbStatus empdb_check_json(const struct EmpdbProgram *program,
                                  enum EmpdbMode mode,
                                  char **out_json);

/**
 * Chain the program's empirical clauses to a fixpoint.
 *
 * # Safety
 * `program` must be a live handle; `out` must be a valid pointer.
 */
enum EmpdbStatus empdb_compile(const struct EmpdbProgram *program, struct EmpdbCompiled **out);

/**
 * Release a compiled handle. Null is a no-op.
 *
 * # Safety
 * `compiled` must have come from this library, unfreed.
 */
void empdb_compiled_free(struct EmpdbCompiled *compiled);

/**
 * Serialize a compiled program to its text artifact.
 *
 * # Safety
 * `compiled` must be a live handle; `out` must be a valid pointer.
 */
enum EmpdbStatus empdb_compiled_serialize(const struct EmpdbCompiled *compiled, char **out);

/**
 * Load a compiled program from artifact text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EmpdbStatus empdb_compiled_parse(const char *text, struct EmpdbCompiled **out);

/**
 * Answer a query like `"~White(clyde)"`; the answer arrives as a JSON
 * document with key `kind` and, for evidence-based answers, `results`
 * holding one `{cluster, lo, hi}` entry per reference class.
 *
 * # Safety
 * `compiled` must be a live handle; `query` a NUL-terminated string;
 * `out_json` a valid pointer.
 */
enum EmpdbStatus empdb_query_json(const struct EmpdbCompiled *compiled,
                                  const char *query,
                                  char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMPDB_H */
