#ifndef XXZ_BETHE_H
#define XXZ_BETHE_H

/* Generated by cbindgen from xxz-bethe-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum XxzStatus {
  // Success; for runs, every asserted check passed.
  XXZ_STATUS_OK = 0,
  // The run completed but at least one asserted check failed.
  XXZ_STATUS_CHECK_FAILED = 1,
  // A mathematical or configuration precondition was not met.
  XXZ_STATUS_PRECONDITION = 2,
  // Null pointer, malformed UTF-8/JSON, or an unknown subcommand.
  XXZ_STATUS_INVALID_ARGUMENT = 3,
  // Unexpected internal failure.
  XXZ_STATUS_INTERNAL = 4,
} XxzStatus;

// Opaque chain handle.
typedef struct XxzChain XxzChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or null. The
// pointer stays valid until the next failing call on the same thread.
const char *xxz_last_error(void);

// Library version as a static null-terminated string.
const char *xxz_version(void);

// Parse a JSON config (same format as the CLI accepts) into a chain handle.
//
// # Safety
// `config_json` must be a null-terminated string and `out` a valid pointer.
enum XxzStatus xxz_chain_new(const char *config_json, struct XxzChain **out);

// Release a chain handle. Null is accepted.
//
// # Safety
// `chain` must have come from [`xxz_chain_new`] and not been freed before.
void xxz_chain_free(struct XxzChain *chain);

// Hilbert-space dimension of the chain; 0 for a null handle.
//
// # Safety
// `chain` must be a live handle or null.
size_t xxz_chain_dimension(const struct XxzChain *chain);

// Number of chain sites; 0 for a null handle.
//
// # Safety
// `chain` must be a live handle or null.
size_t xxz_chain_sites(const struct XxzChain *chain);

// Dimension of the weight sector with excitation number `k`.
//
// # Safety
// `chain` must be a live handle or null.
size_t xxz_chain_weight_sector_dim(const struct XxzChain *chain, size_t k);

// Vacuum eigenvalue of A(u) at `u = u_re + i u_im`.
//
// # Safety
// `chain` must be a live handle; `out_re`/`out_im` valid pointers.
enum XxzStatus xxz_chain_script_a(const struct XxzChain *chain,
                                  double u_re,
                                  double u_im,
                                  double *out_re,
                                  double *out_im);

// Vacuum eigenvalue of D(u) at `u = u_re + i u_im`.
//
// # Safety
// `chain` must be a live handle; `out_re`/`out_im` valid pointers.
enum XxzStatus xxz_chain_script_d(const struct XxzChain *chain,
                                  double u_re,
                                  double u_im,
                                  double *out_re,
                                  double *out_im);

// Run one subcommand (`identities`, `solve`, `verify`, `census`,
// `nilpotency`, `degenerate`, `xeq`, `spectrum`) on a JSON config and hand
// back the full JSON report, which is produced for check failures and
// precondition failures too. Free the report with [`xxz_string_free`].
//
// # Safety
// `subcommand` and `config_json` must be null-terminated strings;
// `out_report_json` must be a valid pointer.
enum XxzStatus xxz_run_json(const char *subcommand,
                            const char *config_json,
                            char **out_report_json);

// Release a string returned by this library. Null is accepted.
//
// # Safety
// `s` must have been returned by this library and not been freed before.
void xxz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XXZ_BETHE_H */
