/*
 * lrr: low-rank recovery toolkit.
 *
 * C interface to a family of singular-value thresholding solvers for
 * affinely constrained rank minimization (min rank(X) s.t. A(X) = b and the
 * nuclear-norm relaxations thereof), together with measurement-operator
 * diagnostics, a randomized column-sampling SVD, and a benchmark harness for
 * random recovery experiments.
 *
 * Conventions:
 *  - all objects are opaque handles created by lrr_* constructors and freed
 *    by the matching *_destroy;
 *  - every fallible call returns lrr_status; on failure the thread-local
 *    message lrr_last_error() describes what went wrong;
 *  - matrices passed as raw buffers are row-major; measurement vectors have
 *    length p = lrr_map_measurements(); internally matrices are flattened
 *    column by column (vec);
 *  - file arguments accept "-" to mean stdout where noted.
 */

#ifndef LRR_H
#define LRR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrr_status {
    LRR_OK = 0,
    LRR_ERR_ARGUMENT = 1, /* invalid argument / dimension mismatch */
    LRR_ERR_NUMERIC = 2,  /* iterative kernel exceeded its cap */
    LRR_ERR_IO = 3,       /* file access or format problem */
    LRR_ERR_INTERNAL = 4
} lrr_status;

const char* lrr_version(void);
const char* lrr_status_name(lrr_status s);
/* Message for the most recent failure on the calling thread; "" if none. */
const char* lrr_last_error(void);

/* -------- dense matrices -------- */

typedef struct lrr_matrix lrr_matrix;

/* row_major may be NULL for an all-zero matrix. */
lrr_status lrr_matrix_create(int64_t rows, int64_t cols, const double* row_major,
                             lrr_matrix** out);
/* Text format: header "m n", then m rows of n space-separated reals written
 * with 17 significant digits (bit-exact round trip); NaN/Inf are rejected.
 * The writer accepts "-" for stdout. */
lrr_status lrr_matrix_read_text(const char* path, lrr_matrix** out);
lrr_status lrr_matrix_write_text(const lrr_matrix* x, const char* path);
int64_t lrr_matrix_rows(const lrr_matrix* x);
int64_t lrr_matrix_cols(const lrr_matrix* x);
lrr_status lrr_matrix_get(const lrr_matrix* x, int64_t i, int64_t j, double* out);
/* capacity must be >= rows*cols. */
lrr_status lrr_matrix_copy(const lrr_matrix* x, double* row_major_out, int64_t capacity);
void lrr_matrix_destroy(lrr_matrix* x);

/* -------- spectral operators -------- */

/* Thin SVD; k = -1 for full rank, else the leading k triples. sigma is
 * returned as a k-by-1 matrix with nonincreasing entries. */
lrr_status lrr_svd(const lrr_matrix* x, int64_t k, lrr_matrix** u,
                   lrr_matrix** sigma, lrr_matrix** v);
/* Best rank-r approximation (leading r singular triples). */
lrr_status lrr_hard_threshold(const lrr_matrix* y, int64_t r, lrr_matrix** out);
/* Replace each singular value s by max(s - nu, 0). */
lrr_status lrr_soft_shrink(const lrr_matrix* x, double nu, lrr_matrix** out);
/* Any output pointer may be NULL if that norm is not needed. */
lrr_status lrr_norms(const lrr_matrix* x, double* frobenius, double* spectral,
                     double* nuclear);

/* -------- measurement operators -------- */

typedef struct lrr_map lrr_map;

/* Dense sensing matrix with i.i.d. N(0, 1/p) entries, regenerated from the
 * seed on every construction. */
lrr_status lrr_map_gaussian(int64_t m, int64_t n, int64_t p, uint64_t seed,
                            lrr_map** out);
lrr_status lrr_map_identity(int64_t m, int64_t n, lrr_map** out);
/* Observes p distinct entries chosen uniformly from the seed. */
lrr_status lrr_map_entry_mask(int64_t m, int64_t n, int64_t p, uint64_t seed,
                              lrr_map** out);
/* Explicit p x (m*n) sensing matrix acting on vec(X); not serializable. */
lrr_status lrr_map_dense(int64_t m, int64_t n, int64_t p, const double* a_row_major,
                         lrr_map** out);
/* JSON header {kind, m, n, p, seed}; payloads regenerate from the seed. */
lrr_status lrr_map_read_json(const char* path, lrr_map** out);
lrr_status lrr_map_write_json(const lrr_map* map, const char* path);
int64_t lrr_map_rows(const lrr_map* map);
int64_t lrr_map_cols(const lrr_map* map);
int64_t lrr_map_measurements(const lrr_map* map);
/* y_out must hold p doubles. */
lrr_status lrr_map_apply(const lrr_map* map, const lrr_matrix* x, double* y_out);
lrr_status lrr_map_adjoint(const lrr_map* map, const double* y, int64_t p,
                           lrr_matrix** out);
/* Power-iteration estimate of lambda_max(A* A), relative tolerance 1e-6. */
lrr_status lrr_map_spectral_bound(const lrr_map* map, double* lambda_max);
void lrr_map_destroy(lrr_map* map);

/* -------- restricted isometry diagnostics -------- */

typedef struct lrr_rip_report {
    double delta_lower;  /* witnessed deviation: a certified lower bound */
    double delta_upper;  /* conservative spectral certificate */
    int64_t r;
    int64_t trials;      /* samples per rank level 1..r */
    uint64_t seed;
} lrr_rip_report;

/* witness (optional) receives the unit-Frobenius sample achieving
 * delta_lower. */
lrr_status lrr_estimate_rip(const lrr_map* map, int64_t r, int64_t trials,
                            uint64_t seed, lrr_rip_report* out, lrr_matrix** witness);

typedef struct lrr_prop_report {
    double delta_upper;
    /* Minimum slack (RHS - LHS) over all trials for each inequality family;
     * anything above -1e-9 counts as satisfied. */
    double margin_projected_adjoint;
    double margin_gram_upper;
    double margin_gram_lower;
    double margin_cross_term;
    double margin_mixed_norm;
    int64_t trials;
    int64_t violations;
    uint64_t seed;
} lrr_prop_report;

lrr_status lrr_check_propositions(const lrr_map* map, int64_t r, int64_t trials,
                                  uint64_t seed, lrr_prop_report* out);

/* -------- randomized column-sampling SVD -------- */

typedef struct lrr_sketch lrr_sketch;

/* Sample cs columns of a (with replacement; probs NULL = uniform, else n
 * nonnegative entries summing to 1) and keep up to ks approximate left
 * singular directions. */
lrr_status lrr_linear_time_svd(const lrr_matrix* a, int64_t cs, int64_t ks,
                               const double* probs, uint64_t seed, lrr_sketch** out);
int64_t lrr_sketch_rank(const lrr_sketch* s); /* k_eff, may be < ks, 0 if collapsed */
lrr_status lrr_sketch_values(const lrr_sketch* s, double* out, int64_t capacity);
lrr_status lrr_sketch_vectors(const lrr_sketch* s, lrr_matrix** h);
/* Sampled column indices in draw order; capacity must be >= cs. */
lrr_status lrr_sketch_columns(const lrr_sketch* s, int64_t* out, int64_t capacity);
/* H (H^T a): the rank-k_eff reconstruction; fails when k_eff = 0. */
lrr_status lrr_sketch_reconstruct(const lrr_sketch* s, const lrr_matrix* a,
                                  lrr_matrix** out);
void lrr_sketch_destroy(lrr_sketch* s);

/* -------- solvers -------- */

typedef enum lrr_solver_kind {
    LRR_SOLVER_FPC = 0,   /* soft shrinkage fixed point at a fixed mu */
    LRR_SOLVER_IHT = 1,   /* rank-r hard thresholding */
    LRR_SOLVER_IHTMS = 2, /* hard thresholding + fixed matrix shrinkage */
    LRR_SOLVER_FPCAR = 3, /* fixed-rank continuation */
    LRR_SOLVER_FPCA = 4   /* adaptive-rank continuation */
} lrr_solver_kind;

typedef enum lrr_rank_mode { LRR_RANK_FIXED = 0, LRR_RANK_ADAPTIVE = 1 } lrr_rank_mode;
typedef enum lrr_svd_mode { LRR_SVD_EXACT = 0, LRR_SVD_MONTE_CARLO = 1 } lrr_svd_mode;

typedef struct lrr_solver_config {
    double tau;          /* step size; 0 derives min(1, 2/curvature) from the
                          * map's curvature restricted to low-rank matrices
                          * (1 for identity/mask maps; 1/lambda_max for FPC) */
    double mu;           /* fixed shrinkage for FPC / IHTMS; initialized to
                          * the continuation floor (mu_bar) */
    double mu_bar;       /* continuation floor */
    double eta_mu;       /* continuation decrease factor in (0,1) */
    double mu_1;         /* first continuation level; 0 derives
                          * eta_mu * sigma_1(A*(b)) */
    double xtol;         /* relative step stopping tolerance */
    double eps_s;        /* adaptive rank survival threshold */
    double grad_blowup;  /* rank bump when the gradient grows this much */
    int64_t cs;          /* sketch columns; 0 derives max(2*r_max+2, 3*rank) */
    int64_t max_inner_iters;
    int64_t max_total_iters;
    int64_t rank;        /* fixed rank, or r_max override when adaptive */
    int64_t nonexpansive_limit;
    int rank_mode;       /* lrr_rank_mode */
    int svd_mode;        /* lrr_svd_mode */
    int nonexpansive_rule;
    uint64_t seed;
} lrr_solver_config;

/* Experiment-calibrated defaults: mu_bar 1e-8, eta_mu 0.25, xtol 1e-6,
 * eps_s 0.01, caps 500/10000, adaptive rank, sketched projections. */
void lrr_solver_config_init(lrr_solver_config* cfg);

typedef struct lrr_trace lrr_trace;

lrr_status lrr_solve(lrr_solver_kind kind, const lrr_map* map, const double* b,
                     int64_t p, const lrr_solver_config* cfg,
                     const lrr_matrix* truth, lrr_trace** out);
/* Dispatch by bench id: fpc, ihtr, iht, ihtmsr, ihtms, fpcar, fpca (see
 * lrr_run_campaign); `rank` feeds the fixed-rank ids. */
lrr_status lrr_solve_id(const char* solver_id, const lrr_map* map, const double* b,
                        int64_t p, int64_t rank, const lrr_solver_config* cfg,
                        const lrr_matrix* truth, lrr_trace** out);

int lrr_trace_converged(const lrr_trace* t);
int64_t lrr_trace_iterations(const lrr_trace* t);
double lrr_trace_seconds(const lrr_trace* t);
double lrr_trace_final_residual(const lrr_trace* t);
double lrr_trace_final_rel_err(const lrr_trace* t); /* NaN without truth */
lrr_status lrr_trace_solution(const lrr_trace* t, lrr_matrix** x);
int64_t lrr_trace_length(const lrr_trace* t);
/* Any output pointer may be NULL. rel_err is NaN without truth. */
lrr_status lrr_trace_record(const lrr_trace* t, int64_t i, int64_t* iter, double* mu,
                            int64_t* rank, double* residual, double* step,
                            double* rel_err);
/* Columns iter,mu,rank,residual,step,rel_err; "-" writes to stdout. */
lrr_status lrr_trace_csv(const lrr_trace* t, const char* path);
/* Columns iter,log10_abs_err (requires truth at solve time). */
lrr_status lrr_trace_plot_csv(const lrr_trace* t, const char* path);
int64_t lrr_trace_warning_count(const lrr_trace* t);
const char* lrr_trace_warning(const lrr_trace* t, int64_t i);
void lrr_trace_destroy(lrr_trace* t);

/* -------- instances and benchmarks -------- */

typedef struct lrr_instance lrr_instance;

/* Random rank-r target M = M_L M_R^T (standard normal factors), Gaussian
 * map, b = A(vec M) plus optional noise of the given Euclidean norm. */
lrr_status lrr_generate_instance(int64_t m, int64_t n, int64_t p, int64_t r,
                                 uint64_t seed, double noise_norm, lrr_instance** out);
/* Full-spectrum target: unit top-r singular values, geometric tail with the
 * given decay in [0,1). */
lrr_status lrr_near_lowrank_instance(int64_t m, int64_t n, int64_t p, int64_t r,
                                     double decay, uint64_t seed, lrr_instance** out);
const lrr_map* lrr_instance_map(const lrr_instance* inst);
int64_t lrr_instance_rank(const lrr_instance* inst);
lrr_status lrr_instance_b(const lrr_instance* inst, double* out, int64_t capacity);
lrr_status lrr_instance_truth(const lrr_instance* inst, lrr_matrix** out);
/* Same dispatch as the campaign runner (instance seed folded into the
 * config seed, mu pinned to mu_bar for the multistage ids). */
lrr_status lrr_solve_instance(const char* solver_id, const lrr_instance* inst,
                              int64_t rank, const lrr_solver_config* cfg,
                              lrr_trace** out);
void lrr_instance_destroy(lrr_instance* inst);

/* SR = p/(m n), FR = r(m+n-r)/p, r_max = largest rank with FR < 1. Output
 * pointers may be NULL. */
lrr_status lrr_metrics(int64_t m, int64_t n, int64_t p, int64_t r, double* sr,
                       double* fr, int64_t* r_max);
/* ||x - m||_F / ||m||_F. */
lrr_status lrr_rel_err(const lrr_matrix* x, const lrr_matrix* m, double* out);

typedef struct lrr_report lrr_report;

/* cells: ncells quadruples (m, n, p, r). solvers: comma list or "all"
 * (ihtr, iht, ihtmsr, ihtms, fpcar, fpca; "-adaptive" aliases accepted).
 * Every solver sees the same instances, seeded by
 * mix(master_seed, m, n, p, r, index). threads <= 0 consults LRR_THREADS,
 * then the hardware. */
lrr_status lrr_run_campaign(const int64_t* cells, int64_t ncells,
                            int64_t instances_per_cell, const char* solvers,
                            const lrr_solver_config* cfg, uint64_t master_seed,
                            double noise_norm, int threads, lrr_report** out);
/* Fixed-rank solvers run once per given rank on instances of true_rank;
 * adaptive ids contribute one row each. */
lrr_status lrr_wrong_rank_study(int64_t m, int64_t n, int64_t p, int64_t true_rank,
                                const int64_t* given_ranks, int64_t nranks,
                                const char* solvers, int64_t instances,
                                const lrr_solver_config* cfg, uint64_t master_seed,
                                int threads, lrr_report** out);
/* Owned by the report; valid until destroy. Campaign CSV header:
 * solver,m,n,p,r,SR,FR,NS,avg_time_s,avg_rel_err ("---" when NS = 0). */
const char* lrr_report_csv(const lrr_report* rep);
const char* lrr_report_text(const lrr_report* rep);
lrr_status lrr_report_write_csv(const lrr_report* rep, const char* path);
lrr_status lrr_report_write_text(const lrr_report* rep, const char* path);
void lrr_report_destroy(lrr_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* LRR_H */
