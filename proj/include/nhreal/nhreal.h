#ifndef NHREAL_NHREAL_H
#define NHREAL_NHREAL_H

/*
 * C interface to the nhreal library: non-Hermitian matrices H = H0 A with
 * real spectra, their biorthogonal eigensystems, lasing thresholds and the
 * scenario runner.
 *
 * Handles are opaque and owned by the caller. Every function that can fail
 * returns an nhr_status; the message of the most recent failure on the
 * calling thread is available from nhr_last_error(). Strings returned
 * through char** arguments must be released with nhr_string_free().
 * Dense matrices cross the boundary as separate real and imaginary arrays
 * in row-major order.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NHR_BUILDING_LIBRARY)
#    define NHR_API __declspec(dllexport)
#  else
#    define NHR_API __declspec(dllimport)
#  endif
#else
#  define NHR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nhr_status {
  NHR_OK = 0,
  NHR_ERR_INVALID_ARGUMENT = 1,
  NHR_ERR_DIMENSION_MISMATCH = 2,
  NHR_ERR_SINGULAR = 3,
  NHR_ERR_NOT_PSD = 4,
  NHR_ERR_NO_CONVERGENCE = 5,
  NHR_ERR_NO_ZERO_MODE = 6,
  NHR_ERR_NO_THRESHOLD = 7,
  NHR_ERR_DEGENERATE = 8,
  NHR_ERR_AMBIGUOUS_TRACKING = 9,
  NHR_ERR_CONFIG = 10,
  NHR_ERR_IO = 11,
  NHR_ERR_INTERNAL = 99
} nhr_status;

typedef struct nhr_matrix nhr_matrix;
typedef struct nhr_eigensystem nhr_eigensystem;

NHR_API const char* nhr_version(void);
NHR_API const char* nhr_status_string(nhr_status status);
/* Message of the last failure on this thread; empty after a success. */
NHR_API const char* nhr_last_error(void);
NHR_API void nhr_string_free(char* s);

/* im may be NULL for a real matrix. */
NHR_API nhr_status nhr_matrix_create(size_t rows, size_t cols, const double* re, const double* im,
                                     nhr_matrix** out);
NHR_API void nhr_matrix_free(nhr_matrix* m);
NHR_API nhr_status nhr_matrix_shape(const nhr_matrix* m, size_t* rows, size_t* cols);
/* re and im must each hold rows * cols doubles; im may be NULL. */
NHR_API nhr_status nhr_matrix_data(const nhr_matrix* m, double* re, double* im);

/* Builds H0 and A from a lattice JSON object (see README for the schema). */
NHR_API nhr_status nhr_lattice_build(const char* lattice_json, nhr_matrix** h0, nhr_matrix** a);
/* H = H0 A. */
NHR_API nhr_status nhr_construct_product(const nhr_matrix* h0, const nhr_matrix* a, nhr_matrix** out);
/* H'' = A^-1 H0 A; NHR_ERR_SINGULAR when A is singular. */
NHR_API nhr_status nhr_construct_gauge(const nhr_matrix* h0, const nhr_matrix* a, nhr_matrix** out);

NHR_API nhr_status nhr_eig(const nhr_matrix* m, nhr_eigensystem** out);
NHR_API void nhr_eigensystem_free(nhr_eigensystem* es);
NHR_API size_t nhr_eigensystem_dim(const nhr_eigensystem* es);
/* Eigenvalues sorted by (Re, Im); arrays of length dim. */
NHR_API nhr_status nhr_eigensystem_eigenvalues(const nhr_eigensystem* es, double* re, double* im);
/* Right (left = 0) or left (left != 0) vectors; entry (site, mode) at
 * index site * dim + mode. Column u of the left set pairs with column u of
 * the right set. */
NHR_API nhr_status nhr_eigensystem_vectors(const nhr_eigensystem* es, int left, double* re, double* im);
NHR_API nhr_status nhr_eigensystem_json(const nhr_eigensystem* es, char** out_json);

/* Spectral certificate of h against the metric h0^-1, as JSON. */
NHR_API nhr_status nhr_certify_json(const nhr_matrix* h, const nhr_matrix* h0, char** out_json);
/* Jordan structure of h at the target eigenvalue, as JSON. */
NHR_API nhr_status nhr_ep_json(const nhr_matrix* h, double target_re, double target_im, char** out_json);

/* Lasing threshold of h under pump_json = {"kappa0", "pumped_sites", "gamma"}.
 * report_json may be NULL. */
NHR_API nhr_status nhr_find_threshold(const nhr_matrix* h, const char* pump_json, double* threshold,
                                      char** report_json);

/* Runs a scenario described by a config JSON document and writes its
 * outputs. *all_passed is set to 1 when every assertion passed. */
NHR_API nhr_status nhr_run_scenario(const char* config_json, char** report_json, int* all_passed);
/* JSON array of scenario names. */
NHR_API nhr_status nhr_scenario_names(char** out_json);
/* JSON object of tolerance keys and their defaults. */
NHR_API nhr_status nhr_default_tolerances(char** out_json);

#ifdef __cplusplus
}
#endif

#endif
