#ifndef MAGZOH_H
#define MAGZOH_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 2–4 coincide with the command-line exit codes.
 */
typedef enum MzStatus {
  MZ_STATUS_OK = 0,
  MZ_STATUS_FAILURE = 1,
  MZ_STATUS_VALIDATION = 2,
  MZ_STATUS_DESIGN = 3,
  MZ_STATUS_DIVERGED = 4,
  MZ_STATUS_NULL_ARGUMENT = 5,
  MZ_STATUS_INVALID_UTF8 = 6,
  MZ_STATUS_OUT_OF_RANGE = 7,
  MZ_STATUS_PANIC = 8,
} MzStatus;

typedef enum MzDesignKind {
  /**
   * Follow the scenario's control law.
   */
  MZ_DESIGN_KIND_DEFAULT = 0,
  MZ_DESIGN_KIND_STATE = 1,
  MZ_DESIGN_KIND_OUTPUT = 2,
} MzDesignKind;

typedef struct MzDesignReport MzDesignReport;

typedef struct MzScenario MzScenario;

typedef struct MzTrajectory MzTrajectory;

/**
 * One trajectory row; same fields and order as the CSV output.
 */
typedef struct MzSample {
  double t;
  double q[4];
  double omega[3];
  double m[3];
  double b_b[3];
} MzSample;

/**
 * Circular orbit parameters (SI units, radians).
 */
typedef struct MzOrbit {
  double radius_m;
  double incl_rad;
  double raan_rad;
  double phi0_rad;
  double mu_earth;
  double mu_m;
} MzOrbit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next `mz_*` call on the same thread.
 */
const char *mz_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mz_version(void);

/**
 * Loads and validates a scenario file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be writable.
 */
enum MzStatus mz_scenario_load(const char *path, struct MzScenario **out);

/**
 * Parses and validates a scenario from TOML text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum MzStatus mz_scenario_parse(const char *text, struct MzScenario **out);

/**
 * # Safety
 * `scenario` must come from `mz_scenario_load`/`mz_scenario_parse` and not
 * have been freed. NULL is ignored.
 */
void mz_scenario_free(struct MzScenario *scenario);

/**
 * Runs the sampling design (Assumption 1, `T*`, `ε₀`) for a scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum MzStatus mz_design_run(const struct MzScenario *scenario,
                            enum MzDesignKind kind,
                            struct MzDesignReport **out);

/**
 * # Safety
 * `report` must be a live handle or NULL (NaN is returned for NULL).
 */
double mz_design_tstar(const struct MzDesignReport *report);

/**
 * # Safety
 * `report` must be a live handle or NULL (NaN is returned for NULL).
 */
double mz_design_eps0(const struct MzDesignReport *report);

/**
 * # Safety
 * `report` must be a live handle or NULL (NaN is returned for NULL).
 */
double mz_design_period(const struct MzDesignReport *report);

/**
 * # Safety
 * `report` must be a live handle or NULL (NaN is returned for NULL).
 */
double mz_design_assumption1_margin(const struct MzDesignReport *report);

/**
 * # Safety
 * `report` must be a live handle or NULL (0 is returned for NULL).
 */
size_t mz_design_spectrum_len(const struct MzDesignReport *report);

/**
 * Eigenvalue `index` of the averaged matrix at the design period.
 *
 * # Safety
 * `report` must be a live handle; `re` and `im` must be writable.
 */
enum MzStatus mz_design_spectrum_get(const struct MzDesignReport *report,
                                     size_t index,
                                     double *re,
                                     double *im);

/**
 * # Safety
 * `report` must come from `mz_design_run` and not have been freed. NULL is ignored.
 */
void mz_design_free(struct MzDesignReport *report);

/**
 * Simulates the scenario's closed loop.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum MzStatus mz_simulate(const struct MzScenario *scenario, struct MzTrajectory **out);

/**
 * # Safety
 * `traj` must be a live handle or NULL (0 is returned for NULL).
 */
size_t mz_trajectory_len(const struct MzTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum MzStatus mz_trajectory_sample(const struct MzTrajectory *traj,
                                   size_t index,
                                   struct MzSample *out);

/**
 * Writes the trajectory as CSV (same layout as `magzoh simulate`).
 *
 * # Safety
 * `traj` must be a live handle; `path` a valid NUL-terminated string.
 */
enum MzStatus mz_trajectory_write_csv(const struct MzTrajectory *traj, const char *path);

/**
 * # Safety
 * `traj` must come from `mz_simulate` and not have been freed. NULL is ignored.
 */
void mz_trajectory_free(struct MzTrajectory *traj);

/**
 * Orbit with default Earth constants for the given altitude and angles.
 */
struct MzOrbit mz_orbit_from_altitude(double altitude_m,
                                      double incl_rad,
                                      double raan_rad,
                                      double phi0_rad);

/**
 * Inertial dipole field at time `t`, tesla, written to `out[0..3]`.
 *
 * # Safety
 * `orbit` must point to a valid `MzOrbit`; `out` to three writable doubles.
 */
enum MzStatus mz_field_inertial(const struct MzOrbit *orbit, double t, double *out);

/**
 * Positive-definiteness test of the averaged field matrix for an orbit.
 *
 * # Safety
 * `orbit` must point to a valid `MzOrbit`; `holds` and `margin` must be writable.
 */
enum MzStatus mz_assumption1(const struct MzOrbit *orbit, bool *holds, double *margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAGZOH_H */
