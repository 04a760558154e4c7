#ifndef RANGEBOUND_H
#define RANGEBOUND_H

/*
 * C interface to the rangebound library.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns an rb_status; on
 * failure rb_last_error() describes the problem (per thread, valid until the
 * next failing call on that thread). Strings returned through char** out
 * parameters are owned by the caller and released with rb_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RANGEBOUND_BUILDING)
#define RB_API __declspec(dllexport)
#else
#define RB_API __declspec(dllimport)
#endif
#else
#define RB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
    RB_OK = 0,
    RB_INVALID_ARGUMENT = 1, /* precondition or invariant violated */
    RB_NO_CONVERGENCE = 2,   /* iterative solver missed its tolerance */
    RB_INFEASIBLE = 3,       /* requested coupling does not exist */
    RB_PARSE_ERROR = 4,      /* malformed JSON */
    RB_INTERNAL_ERROR = 5
} rb_status;

typedef enum rb_method {
    RB_METHOD_GENERAL_SOLVER = 0,
    RB_METHOD_N2_CLOSED_FORM = 1,
    RB_METHOD_EQUAL_MEANS_CLOSED_FORM = 2
} rb_method;

typedef enum rb_uniqueness {
    RB_UNIQUE = 0,
    RB_NOT_UNIQUE = 1,
    RB_UNKNOWN = 2
} rb_uniqueness;

typedef struct rb_spec rb_spec;
typedef struct rb_report rb_report;
typedef struct rb_joint rb_joint;
typedef struct rb_matrix rb_matrix;

RB_API const char* rb_last_error(void);
RB_API const char* rb_version(void);
RB_API void rb_string_free(char* s);

/* ---- moment specifications ------------------------------------------- */

RB_API rb_status rb_spec_create(const double* mu, const double* sigma, size_t n, rb_spec** out);
RB_API rb_status rb_spec_from_json(const char* json, rb_spec** out);
RB_API rb_status rb_spec_to_json(const rb_spec* spec, char** out);
RB_API size_t rb_spec_size(const rb_spec* spec);
RB_API rb_status rb_spec_get(const rb_spec* spec, double* mu, double* sigma);
RB_API void rb_spec_free(rb_spec* spec);

/* ---- tight bound ------------------------------------------------------ */

typedef struct rb_solver_options {
    double tol;
    size_t inner_max_iter;
    size_t outer_max_iter;
    int has_initial_c;
    double initial_c;
} rb_solver_options;

RB_API void rb_solver_options_default(rb_solver_options* opts);

typedef struct rb_report_values {
    double rho;
    double c;
    double lambda;
    double ag;
    double infimum;
    double residual;
    size_t iterations;
    rb_method method;
    int boundary_degenerate;
} rb_report_values;

/* opts may be NULL for defaults. */
RB_API rb_status rb_bound(const rb_spec* spec, const rb_solver_options* opts, rb_report** out);
RB_API rb_status rb_report_get(const rb_report* report, rb_report_values* out);
/* region is 1..4. Writes up to cap indices (0-based); *count receives the set size. */
RB_API rb_status rb_report_region(const rb_report* report, int region, size_t* indices, size_t cap, size_t* count);
RB_API rb_status rb_report_to_json(const rb_report* report, char** out);
RB_API void rb_report_free(rb_report* report);

typedef struct rb_comparison {
    double rho;
    double ag;
    double bnt_range;
    double plackett; /* valid when has_plackett */
    int has_plackett;
    double infimum;
} rb_comparison;

RB_API rb_status rb_compare(const rb_spec* spec, const rb_solver_options* opts, rb_comparison* out);

/* ---- scalar bounds ---------------------------------------------------- */

RB_API rb_status rb_ag_bound(const rb_spec* spec, double* out);
RB_API rb_status rb_bnt_max_bound(const rb_spec* spec, double* bound, double* y0);
RB_API rb_status rb_bnt_range_bound(const rb_spec* spec, double* out);
RB_API rb_status rb_equal_means_bound(const rb_spec* spec, double* out);
RB_API rb_status rb_plackett_iid_bound(size_t n, double sigma, double* out);
RB_API rb_status rb_gamma2_bound(double mu1, double mu2, double sigma1, double sigma2, double rho, double* out);
/* Evaluates phi at (c, lambda); gradient may be NULL, otherwise receives two values. */
RB_API rb_status rb_phi(const rb_spec* spec, double c, double lambda, double* value, double* gradient);

/* ---- extremal constructions ------------------------------------------- */

/* Any of the out pointers except joint may be NULL. */
RB_API rb_status rb_extremal(const rb_spec* spec, const rb_solver_options* opts, rb_joint** joint,
                             rb_matrix** coupling, rb_report** report, rb_uniqueness* uniqueness);
/* p_plus and p_minus receive n values each. */
RB_API rb_status rb_extremal_marginals(const rb_spec* spec, double c, double lambda, double* p_plus,
                                       double* p_minus);
/* construction may be NULL; it is set to NULL when the bound is not tight. */
RB_API rb_status rb_ag_tightness(const rb_spec* spec, int* tight, rb_uniqueness* unique, rb_joint** construction);
RB_API rb_status rb_bnt_extremal_max(const rb_spec* spec, rb_joint** out);

RB_API rb_status rb_joint_create(const double* points, const double* prob, size_t count, size_t dimension,
                                 rb_joint** out);
RB_API rb_status rb_joint_from_json(const char* json, rb_joint** out);
RB_API rb_status rb_joint_to_json(const rb_joint* joint, char** out);
RB_API size_t rb_joint_size(const rb_joint* joint);
RB_API size_t rb_joint_dimension(const rb_joint* joint);
/* x receives dimension values. */
RB_API rb_status rb_joint_point(const rb_joint* joint, size_t k, double* x, double* prob);
RB_API void rb_joint_free(rb_joint* joint);

RB_API rb_status rb_zero_trace_coupling(const double* p, const double* q, size_t n, rb_matrix** out);
/* *out is NULL when the coupling is the only one with its marginals. */
RB_API rb_status rb_perturb_coupling(const rb_matrix* m, rb_matrix** out);
RB_API rb_status rb_matrix_from_json(const char* json, rb_matrix** out);
RB_API rb_status rb_matrix_to_json(const rb_matrix* m, char** out);
RB_API size_t rb_matrix_size(const rb_matrix* m);
RB_API double rb_matrix_get(const rb_matrix* m, size_t i, size_t j);
RB_API void rb_matrix_free(rb_matrix* m);

/* ---- verification ----------------------------------------------------- */

typedef struct rb_moment_check {
    double max_mean_error;
    double max_var_error;
    double expected_range;
    int pass;
} rb_moment_check;

RB_API rb_status rb_expected_range(const rb_joint* joint, double* out);
RB_API rb_status rb_check_moments(const rb_joint* joint, const rb_spec* spec, double tol, rb_moment_check* out);
RB_API rb_status rb_check_moments_json(const rb_joint* joint, const rb_spec* spec, double tol, char** out);
RB_API rb_status rb_mc_expected_range(const rb_joint* joint, size_t n_samples, uint64_t seed, double* estimate,
                                      double* std_error);
RB_API rb_status rb_pair_mc_expected_gap(double mu1, double mu2, double sigma1, double sigma2, double rho,
                                         size_t n_samples, uint64_t seed, double* estimate, double* std_error);
RB_API rb_status rb_feasible_probe(const rb_spec* spec, size_t trials, uint64_t seed, double* out);
RB_API rb_status rb_dual_grid_check(const rb_spec* spec, size_t grid, double* out);
/* Uses the diagonal dispersion diag(sigma^2). */
RB_API rb_status rb_infimum_witness(const rb_spec* spec, double epsilon, size_t n_samples, uint64_t seed,
                                    double* estimate, double* std_error);

#ifdef __cplusplus
}
#endif

#endif
