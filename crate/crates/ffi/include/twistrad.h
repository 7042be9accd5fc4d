#ifndef TWISTRAD_H
#define TWISTRAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TwistradStatus {
  TWISTRAD_STATUS_OK = 0,
  TWISTRAD_STATUS_NULL_POINTER = 1,
  TWISTRAD_STATUS_INVALID_PARAMETER = 2,
  TWISTRAD_STATUS_OUT_OF_DOMAIN = 3,
  TWISTRAD_STATUS_NUMERICAL = 4,
  TWISTRAD_STATUS_DARK_CHANNEL = 5,
  TWISTRAD_STATUS_IO = 6,
  TWISTRAD_STATUS_CONFIG = 7,
  TWISTRAD_STATUS_PANIC = 8,
} TwistradStatus;

/**
 * Normalized axial field profile.
 */
typedef struct TwistradProfile TwistradProfile;

/**
 * Sampled angular rate curve.
 */
typedef struct TwistradRateCurve TwistradRateCurve;

/**
 * Solved envelope with Lewis and Larmor phases.
 */
typedef struct TwistradTrajectory TwistradTrajectory;

typedef struct TwistradKinematics {
  double beta;
  double gamma;
  /**
   * Electron wavenumber, 1/m.
   */
  double k;
  /**
   * Magnetic length, m.
   */
  double rho_h;
  double chi;
} TwistradKinematics;

typedef struct TwistradEnvelopeSample {
  double z;
  double b;
  double b_prime;
  double lewis_phase;
  double larmor_phase;
  double omega;
} TwistradEnvelopeSample;

typedef struct TwistradTotalRate {
  double norm;
  double si;
  double refinement_change;
  bool undersampled;
} TwistradTotalRate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *twistrad_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *twistrad_version(void);

/**
 * Beam kinematics for a kinetic energy in keV and a peak field in tesla.
 *
 * # Safety
 * `out` must point to writable storage for one `TwistradKinematics`.
 */
enum TwistradStatus twistrad_kinematics(double energy_kev,
                                        double b_max_tesla,
                                        struct TwistradKinematics *out);

/**
 * Field-free profile on `[z_min, z_max]`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_zero(double z_min, double z_max, struct TwistradProfile **out);

/**
 * Uniform unit field on `[z_min, z_max]`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_constant(double z_min,
                                              double z_max,
                                              struct TwistradProfile **out);

/**
 * Plateau of length `plateau_length` centred at 0 with raised-cosine ramps.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_flat_top(double ramp_length,
                                              double plateau_length,
                                              double z_min,
                                              double z_max,
                                              struct TwistradProfile **out);

/**
 * Two coils centred at `+-coil_center_offset` with a field-free gap between them.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_two_solenoid(double coil_center_offset,
                                                  double coil_width,
                                                  double gap,
                                                  double z_min,
                                                  double z_max,
                                                  struct TwistradProfile **out);

/**
 * Gaussian lens.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_gaussian(double center,
                                              double width,
                                              double z_min,
                                              double z_max,
                                              struct TwistradProfile **out);

/**
 * Profile from `n` samples `(z[i], field[i])`, rescaled to unit peak.
 *
 * # Safety
 * `z` and `field` must each point to `n` readable doubles; `out` must be a
 * valid pointer to a handle slot.
 */
enum TwistradStatus twistrad_profile_tabulated(const double *z,
                                               const double *field,
                                               size_t n,
                                               struct TwistradProfile **out);

/**
 * `Omega(z)`.
 *
 * # Safety
 * `profile` must be a live handle and `out` writable.
 */
enum TwistradStatus twistrad_profile_omega(const struct TwistradProfile *profile,
                                           double z,
                                           double *out);

/**
 * # Safety
 * `profile` must be null or a handle not yet freed.
 */
void twistrad_profile_free(struct TwistradProfile *profile);

/**
 * Solves the envelope on `[z_start, z_end]` with `b(z_ref) = b0`,
 * `b'(z_ref) = b0_prime`. Phases are measured from `z_start`.
 *
 * # Safety
 * `profile` must be a live handle and `out` a valid handle slot.
 */
enum TwistradStatus twistrad_trajectory_integrate(const struct TwistradProfile *profile,
                                                  double z_ref,
                                                  double b0,
                                                  double b0_prime,
                                                  double z_start,
                                                  double z_end,
                                                  double rel_tol,
                                                  struct TwistradTrajectory **out);

/**
 * Interpolated envelope at `z`.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum TwistradStatus twistrad_trajectory_sample(const struct TwistradTrajectory *traj,
                                               double z,
                                               struct TwistradEnvelopeSample *out);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void twistrad_trajectory_free(struct TwistradTrajectory *traj);

/**
 * Form factor `<n_f| exp[-i(kappa a + kappa^* a^dagger)] |n_i>`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum TwistradStatus twistrad_form_factor(uint32_t n_f,
                                         uint32_t n_i,
                                         double kappa_re,
                                         double kappa_im,
                                         double *re,
                                         double *im);

/**
 * Closed-form field-free curve for the `(ell_i, 0) -> (ell_i - 1, 0)` channel.
 *
 * # Safety
 * `theta` must point to `n` readable doubles; `kin` must be readable and
 * `out` a valid handle slot.
 */
enum TwistradStatus twistrad_rate_curve_fieldfree(const double *theta,
                                                  size_t n,
                                                  double length,
                                                  double b0,
                                                  uint32_t ell_i,
                                                  const struct TwistradKinematics *kin,
                                                  struct TwistradRateCurve **out);

/**
 * General rate curve for the channel `(ni_plus, ni_minus) -> (nf_plus, nf_minus)`
 * on `traj`, which must cover `[-L/2, L/2]`.
 *
 * # Safety
 * `traj` must be a live handle, `theta` must point to `n` readable doubles,
 * `kin` must be readable and `out` a valid handle slot.
 */
enum TwistradStatus twistrad_rate_curve_general(const struct TwistradTrajectory *traj,
                                                uint32_t ni_plus,
                                                uint32_t ni_minus,
                                                uint32_t nf_plus,
                                                uint32_t nf_minus,
                                                const struct TwistradKinematics *kin,
                                                double length,
                                                const double *theta,
                                                size_t n,
                                                size_t phi_samples,
                                                bool dipole,
                                                struct TwistradRateCurve **out);

/**
 * Number of samples in the curve, 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t twistrad_rate_curve_len(const struct TwistradRateCurve *curve);

/**
 * Sample `index`: angle in rad and `dw/dtheta` in units of `m_e`.
 *
 * # Safety
 * `curve` must be a live handle; `theta` and `rate` must be writable.
 */
enum TwistradStatus twistrad_rate_curve_get(const struct TwistradRateCurve *curve,
                                            size_t index,
                                            double *theta,
                                            double *rate);

/**
 * Simpson integral of the curve.
 *
 * # Safety
 * `curve` must be a live handle and `out` writable.
 */
enum TwistradStatus twistrad_rate_curve_total(const struct TwistradRateCurve *curve,
                                              struct TwistradTotalRate *out);

/**
 * # Safety
 * `curve` must be null or a handle not yet freed.
 */
void twistrad_rate_curve_free(struct TwistradRateCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTRAD_H */
