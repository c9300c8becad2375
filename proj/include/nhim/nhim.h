#ifndef NHIM_NHIM_H
#define NHIM_NHIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NHIM_API __declspec(dllexport)
#else
#define NHIM_API __attribute__((visibility("default")))
#endif

typedef enum nhim_status {
  NHIM_OK = 0,
  NHIM_DOMAIN_VIOLATION = 1,
  NHIM_PRECISION_EXHAUSTED = 2,
  NHIM_SINGULAR = 3,
  NHIM_DIMENSION_MISMATCH = 4,
  NHIM_RADIUS_COLLAPSE = 5,
  NHIM_LEFT_AMBIENT_BOX = 6,
  NHIM_CONE_SIGN_LOSS = 7,
  NHIM_UNSUPPORTED_SIGNATURE = 8,
  NHIM_GUESS_OUT_OF_DOMAIN = 9,
  NHIM_MONOTONICITY_UNVERIFIED = 10,
  NHIM_GAP_COLLAPSE = 11,
  NHIM_BRANCH_INCONSISTENT = 12,
  NHIM_NO_SOLUTION = 13,
  NHIM_DEGENERATE_ORBIT = 14,
  NHIM_INVALID_ARGUMENT = 15,
  NHIM_COVERING_FAILED = 16,
  NHIM_CERTIFICATE_MISMATCH = 17,
  NHIM_IO_ERROR = 100,
  NHIM_BUFFER_TOO_SMALL = 101,
  NHIM_INTERNAL = 102
} nhim_status;

typedef struct nhim_config nhim_config;
typedef struct nhim_proof nhim_proof;

/* last error message of the calling thread */
NHIM_API const char* nhim_last_error(void);
NHIM_API const char* nhim_status_name(int status);
NHIM_API const char* nhim_version(void);

/* run configuration; every value is a string, validated on set */
NHIM_API nhim_config* nhim_config_new(void);
NHIM_API void nhim_config_free(nhim_config* c);
NHIM_API nhim_status nhim_config_set(nhim_config* c, const char* key, const char* value);
/* key = value lines, '#' comments */
NHIM_API nhim_status nhim_config_load(nhim_config* c, const char* path);
NHIM_API nhim_status nhim_config_get(const nhim_config* c, const char* key, char* buf, size_t len);
/* NULL-terminated list of keys */
NHIM_API const char* const* nhim_config_keys(void);
NHIM_API const char* nhim_config_help(const char* key);

/* rigorous proof; *out is set even when the verdict is false (failure record inside) */
NHIM_API nhim_status nhim_prove(const nhim_config* c, nhim_proof** out);
NHIM_API void nhim_proof_free(nhim_proof* p);
NHIM_API int nhim_proof_verdict(const nhim_proof* p);
NHIM_API double nhim_proof_seconds(const nhim_proof* p);
/* failure code (NHIM_OK if none), step index (-1 if none) */
NHIM_API int nhim_proof_failure_code(const nhim_proof* p);
NHIM_API long nhim_proof_failure_step(const nhim_proof* p);
/* counts of certified single coverings, chains, cone checks */
NHIM_API void nhim_proof_counts(const nhim_proof* p, int* single, int* chain, int* cone);
/* smallest chain strip gap, decimal endpoints */
NHIM_API void nhim_proof_min_gap(const nhim_proof* p, double* lo, double* hi);
NHIM_API long nhim_proof_oracle_violations(const nhim_proof* p);
/* certificate text; *needed gets the size including the terminator */
NHIM_API nhim_status nhim_proof_certificate(const nhim_proof* p, int with_timing, char* buf, size_t len,
                                            size_t* needed);
/* columns: strip,theta,p_lo,p_up; grid points per strip */
NHIM_API nhim_status nhim_proof_write_strips_csv(const nhim_proof* p, const char* path, int grid);

/* re-validate a certificate's records; *verdict gets the recomputed verdict, *agrees whether it
   matches the stored one. report may be NULL */
NHIM_API nhim_status nhim_recheck(const char* certificate, int* verdict, int* agrees, char* report, size_t len);

/* analytics; csv_path may be NULL */
NHIM_API nhim_status nhim_averaged_lyapunov(const nhim_config* c, double* out);
NHIM_API nhim_status nhim_lyapunov(const nhim_config* c, const char* csv_path, double* lambda, double* os,
                                   long* os_index);
NHIM_API nhim_status nhim_predict(const nhim_config* c, const char* csv_path, double* theta_d, double* theta_l,
                                  double* os_pred);
NHIM_API nhim_status nhim_simulate(const nhim_config* c, const char* csv_path, long* points);
NHIM_API nhim_status nhim_curve(const nhim_config* c, const char* csv_path, double* max_residual0,
                                double* max_residual1);

#ifdef __cplusplus
}
#endif

#endif
