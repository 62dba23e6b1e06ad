#ifndef RADAR_EVIDENCE_H
#define RADAR_EVIDENCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RdeStatus {
  RDE_STATUS_OK = 0,
  RDE_STATUS_NULL_POINTER = 1,
  RDE_STATUS_INVALID_UTF8 = 2,
  RDE_STATUS_INVALID_ARGUMENT = 3,
  RDE_STATUS_FRAME_MISMATCH = 4,
  RDE_STATUS_TOTAL_CONFLICT = 5,
  RDE_STATUS_IO = 6,
  RDE_STATUS_MODEL_FORMAT = 7,
  RDE_STATUS_PANIC = 8,
} RdeStatus;

typedef struct RdeFrame RdeFrame;

typedef struct RdeMass RdeMass;

typedef struct RdeModel RdeModel;

typedef struct RdeVerdict RdeVerdict;

/**
 * Belief, plausibility and their difference for one set.
 */
typedef struct RdeInterval {
  double belief;
  double plausibility;
  double uncertainty;
} RdeInterval;

/**
 * One radar reading. `label` is the claimed class (`"s"` or `"m"`).
 */
typedef struct RdeRecord {
  double timestamp;
  double density;
  double reflection;
  double velocity;
  const char *label;
} RdeRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or null if none. Free the
 * result with [`rde_string_free`].
 */
char *rde_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void rde_string_free(char *s);

/**
 * Static, NUL-terminated library version.
 */
const char *rde_version(void);

/**
 * Builds a frame from `len` distinct, non-empty labels.
 */
enum RdeStatus rde_frame_new(const char *const *labels, size_t len, struct RdeFrame **out);

/**
 * The obstacle frame `{s, m}`.
 */
enum RdeStatus rde_frame_radar(struct RdeFrame **out);

void rde_frame_free(struct RdeFrame *frame);

enum RdeStatus rde_frame_len(const struct RdeFrame *frame, size_t *out);

/**
 * Bitmask of a set written as compact labels (`"sm"`) or joined with `+`.
 */
enum RdeStatus rde_frame_parse_set(const struct RdeFrame *frame, const char *set, uint32_t *out);

/**
 * Builds a mass function from `len` values indexed by set bitmask; `len`
 * must be `2^n` for a frame of `n` labels and entry 0 must be zero.
 */
enum RdeStatus rde_mass_new(const struct RdeFrame *frame,
                            const double *masses,
                            size_t len,
                            struct RdeMass **out);

/**
 * All mass on the full frame.
 */
enum RdeStatus rde_mass_vacuous(const struct RdeFrame *frame, struct RdeMass **out);

void rde_mass_free(struct RdeMass *mass);

enum RdeStatus rde_mass_get(const struct RdeMass *mass, uint32_t set, double *out);

/**
 * Dempster's rule. `conflict` may be null; otherwise it receives the mass
 * lost to contradictory pairs. Fails with `TotalConflict` when no mass
 * agrees.
 */
enum RdeStatus rde_mass_combine(const struct RdeMass *a,
                                const struct RdeMass *b,
                                struct RdeMass **out,
                                double *conflict);

enum RdeStatus rde_mass_interval(const struct RdeMass *mass, uint32_t set, struct RdeInterval *out);

enum RdeStatus rde_mass_belief(const struct RdeMass *mass, uint32_t set, double *out);

enum RdeStatus rde_mass_plausibility(const struct RdeMass *mass, uint32_t set, double *out);

/**
 * Loads a model file written by the `fit` command.
 */
enum RdeStatus rde_model_load(const char *path, struct RdeModel **out);

void rde_model_free(struct RdeModel *model);

/**
 * Mass function induced by one feature value (`"velocity"`, `"reflection"`,
 * `"density"`, `"timestamp"`).
 */
enum RdeStatus rde_model_mass_from_feature(const struct RdeModel *model,
                                           const char *feature,
                                           double value,
                                           struct RdeMass **out);

/**
 * Classifies one record. `features` is a comma-separated list, or null for
 * velocity and reflection; `tau` is the full-frame mass above which the
 * decision is ambiguous.
 */
enum RdeStatus rde_classify(const struct RdeModel *model,
                            const struct RdeRecord *record,
                            const char *features,
                            double tau,
                            struct RdeVerdict **out);

void rde_verdict_free(struct RdeVerdict *verdict);

/**
 * Bitmask of the decided set; the full frame means ambiguous.
 */
enum RdeStatus rde_verdict_decided(const struct RdeVerdict *verdict, uint32_t *out);

enum RdeStatus rde_verdict_spoof_flagged(const struct RdeVerdict *verdict, bool *out);

enum RdeStatus rde_verdict_conflict(const struct RdeVerdict *verdict, double *out);

/**
 * Combined mass as a new handle, to be freed with [`rde_mass_free`].
 */
enum RdeStatus rde_verdict_combined(const struct RdeVerdict *verdict, struct RdeMass **out);

/**
 * JSON explanation of the verdict. Free with [`rde_string_free`].
 */
enum RdeStatus rde_verdict_explain_json(const struct RdeVerdict *verdict, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADAR_EVIDENCE_H */
