/* C interface to the branching-with-immigration simulation and verification
 * toolkit. All entry points return a status code; on failure,
 * mbpnpi_last_error() holds a thread-local human-readable message. Handles
 * are opaque and must be released with the matching _destroy call. */

#ifndef MBPNPI_H
#define MBPNPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mbpnpi_status {
  MBPNPI_OK = 0,
  MBPNPI_ERR_ARGUMENT = 1, /* null pointer / malformed call */
  MBPNPI_ERR_CONFIG = 2,   /* config parse or validation failure */
  MBPNPI_ERR_DOMAIN = 3,   /* argument outside a function's domain */
  MBPNPI_ERR_NUMERIC = 4,  /* quadrature/root-finding tolerance failure */
  MBPNPI_ERR_REGIME = 5,   /* operation invalid for the model's regime */
  MBPNPI_ERR_IO = 6,       /* filesystem failure */
  MBPNPI_ERR_INTERNAL = 7
} mbpnpi_status;

/* Library version string, e.g. "0.1.0". */
const char* mbpnpi_version(void);

/* Message of the most recent failure on the calling thread ("" if none). */
const char* mbpnpi_last_error(void);

/* ------------------------------------------------------------------ run -- */

/* A parsed run configuration plus the analytic machinery for its model. */
typedef struct mbpnpi_run mbpnpi_run;

/* Parses a JSON config document (see README for the schema). */
mbpnpi_status mbpnpi_run_create(const char* config_json, mbpnpi_run** out);
void mbpnpi_run_destroy(mbpnpi_run* run);

mbpnpi_status mbpnpi_run_set_seed(mbpnpi_run* run, uint64_t seed);
mbpnpi_status mbpnpi_run_set_workers(mbpnpi_run* run, int workers);
mbpnpi_status mbpnpi_run_set_out_dir(mbpnpi_run* run, const char* dir);

/* 16 lowercase hex digits + NUL; buf must hold >= 17 bytes. The digest
 * covers model/experiment/budget only (not seed or output path). */
mbpnpi_status mbpnpi_run_digest(const mbpnpi_run* run, char* buf, size_t bufsize);

/* Canonical serialization of the config; pointer owned by the run handle,
 * valid until the next call on the same handle. */
mbpnpi_status mbpnpi_run_canonical_config(mbpnpi_run* run, const char** out);

/* --------------------------------------------------------- classification */

typedef struct mbpnpi_classification {
  int regime;     /* 1..4 */
  double c_const; /* lim t*q(t): finite positive in regime 2, else NaN */
  double q_total; /* integral of q: finite in regime 3, else +infinity */
} mbpnpi_classification;

mbpnpi_status mbpnpi_classify(mbpnpi_run* run, mbpnpi_classification* out);

/* Diagnostic notes from classification; owned by the run handle. */
mbpnpi_status mbpnpi_classify_notes(mbpnpi_run* run, const char** out);

/* One-line summary like "III, Q=4.4444"; truncated if bufsize is small. */
mbpnpi_status mbpnpi_classify_text(mbpnpi_run* run, char* buf, size_t bufsize);

/* ------------------------------------------------------ analytic calculus */

typedef enum mbpnpi_fn {
  MBPNPI_FN_V = 0,        /* V(x), x >= 1 */
  MBPNPI_FN_W = 1,        /* W(y), y >= 0 */
  MBPNPI_FN_PSI = 2,      /* Psi(x), x >= 1 */
  MBPNPI_FN_PSI_INV = 3,  /* inverse of Psi */
  MBPNPI_FN_Q0 = 4,       /* q(t; 0) */
  MBPNPI_FN_Q_CUM = 5,    /* integral of q(.;0) over [0, t] */
  MBPNPI_FN_I0 = 6,       /* I(t; 0) */
  MBPNPI_FN_PHI0 = 7,     /* exp(-I(t;0)) = P{Y(t)=0} */
  MBPNPI_FN_SURVIVAL = 8, /* P{Y(t)>0} */
  MBPNPI_FN_DELTA = 9,    /* Delta(s), s in [0,1); finite-Q regime */
  MBPNPI_FN_H = 10,       /* H(s), s in [0,1); finite-Q regime */
  MBPNPI_FN_B = 11,       /* B(x), x >= 0 */
  MBPNPI_FN_B_INV = 12,   /* inverse of B */
  MBPNPI_FN_A = 13,       /* A(x) = B(V(x)), x >= 1 */
  MBPNPI_FN_T_EPS = 14    /* smallest t with rho Q_cum(t) = ln(1/eps) */
} mbpnpi_fn;

/* Evaluates one analytic function at `arg`. force_generic != 0 bypasses
 * closed forms and uses the quadrature/root-finding route. */
mbpnpi_status mbpnpi_analytic_eval(mbpnpi_run* run, mbpnpi_fn fn, double arg,
                                   int force_generic, double* out);

/* ------------------------------------------------------------- simulation */

typedef struct mbpnpi_samples mbpnpi_samples;

/* n Monte Carlo replicates of Y(t) with the run's seed/worker settings. */
mbpnpi_status mbpnpi_simulate(mbpnpi_run* run, double t, uint64_t n,
                              mbpnpi_samples** out);
void mbpnpi_samples_destroy(mbpnpi_samples* s);

mbpnpi_status mbpnpi_samples_count(const mbpnpi_samples* s, uint64_t* n);
/* Value of replicate i as a 128-bit integer split into 64-bit halves. */
mbpnpi_status mbpnpi_samples_value(const mbpnpi_samples* s, uint64_t i,
                                   uint64_t* lo, uint64_t* hi, int* truncated);

/* ------------------------------------------------- whole-command pipelines */

/* Dumps `fn` over a grid of `points` arguments from lo to hi (log-spaced if
 * log_spacing != 0) to <out_dir>/analytic_<name>.csv with columns
 * argument,value,method; closed-form models get rows for both methods. */
mbpnpi_status mbpnpi_cmd_analytic(mbpnpi_run* run, mbpnpi_fn fn, double lo,
                                  double hi, int points, int log_spacing);

/* Simulates every t in the config's tgrid; writes samples.csv + run.json. */
mbpnpi_status mbpnpi_cmd_simulate(mbpnpi_run* run);

/* Runs the regime-appropriate verification experiment; writes report.json,
 * lt.csv, cdf.csv, survival.csv. *all_pass is 1 iff every verdict passed. */
mbpnpi_status mbpnpi_cmd_verify(mbpnpi_run* run, int* all_pass);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MBPNPI_H */
