/* cachenet — replica placement and delivery simulation for hybrid
 * (mobile ad-hoc + small-cell) content networks.
 *
 * C API: everything behind opaque handles, every call returns a cn_status.
 * On failure, cn_last_error() returns a thread-local human-readable message
 * describing the most recent failing call on this thread.
 */
#ifndef CACHENET_H
#define CACHENET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CN_API __declspec(dllexport)
#else
#  define CN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ------------------------------------------------------------------ */
/* status codes                                                        */
/* ------------------------------------------------------------------ */

typedef enum cn_status {
    CN_OK = 0,
    CN_EINVAL = 1,          /* invalid argument / parameter validation   */
    CN_EINFEASIBLE = 2,     /* instance cannot satisfy its constraints   */
    CN_ENOCONVERGE = 3,     /* iterative solve exceeded its budgets      */
    CN_EREFMISMATCH = 4,    /* reference-dataset regression gate failed  */
    CN_EZEROTOTAL = 5,      /* allocation with a zero A_m+B_m total      */
    CN_ECAPACITY = 6,       /* placement exceeds cache capacities        */
    CN_ENOHOLDER = 7,       /* no holder exists for a requested content  */
    CN_EHORIZON = 8,        /* request not delivered within the horizon  */
    CN_EMISSINGEXP = 9,     /* scaling exponents absent from parameters  */
    CN_ENOTAPPLICABLE = 10, /* asymptotic result undefined here          */
    CN_EIO = 11,            /* file could not be read or written         */
    CN_EPARSE = 12,         /* malformed config or data file             */
    CN_EINTERNAL = 13
} cn_status;

CN_API const char *cn_strerror(cn_status s);
CN_API const char *cn_last_error(void);

/* ------------------------------------------------------------------ */
/* popularity model                                                    */
/* ------------------------------------------------------------------ */

/* Generalized harmonic number H(alpha, M) = sum_{i=1..M} i^-alpha,
 * accumulated from i = M down to 1. alpha must be > 0, M >= 1. */
CN_API cn_status cn_zipf_harmonic(double alpha, int64_t catalog, double *out);

/* P(rank m) = m^-alpha / H(alpha, M), 1-based rank. */
CN_API cn_status cn_zipf_pmf(double alpha, int64_t catalog, int64_t rank,
                             double *out);

typedef enum cn_growth {
    CN_GROWTH_CONSTANT = 0,    /* H bounded as the catalog grows          */
    CN_GROWTH_LOGARITHMIC = 1, /* H ~ log M                               */
    CN_GROWTH_POLYNOMIAL = 2   /* H ~ M^exponent                          */
} cn_growth;

/* Growth class of H(alpha, M) in M; *exponent is 1-alpha for the
 * polynomial class and 0 otherwise. */
CN_API cn_status cn_zipf_growth(double alpha, cn_growth *cls, double *exponent);

/* ------------------------------------------------------------------ */
/* network instance parameters                                         */
/* ------------------------------------------------------------------ */

typedef struct cn_params cn_params;

CN_API cn_params *cn_params_new(void);
CN_API void cn_params_free(cn_params *p);
CN_API cn_params *cn_params_clone(const cn_params *p);

/* Keys: "nodes" (n), "catalog" (M), "sbs_count" (f), "node_cache" (K per
 * node), "sbs_cache" (K per SBS), "alpha", and the optional scaling
 * exponents "gamma", "beta", "delta". Unknown key -> CN_EINVAL. */
CN_API cn_status cn_params_set(cn_params *p, const char *key, double value);
CN_API cn_status cn_params_get(const cn_params *p, const char *key,
                               double *value);

/* Checks ranges (n,M >= 1; f >= 0; caches >= 0; alpha > 0; exponents, when
 * all three are present: 0 < beta < gamma < 1, 0 <= delta < 1,
 * beta + delta >= 1). */
CN_API cn_status cn_params_validate(const cn_params *p);

/* ------------------------------------------------------------------ */
/* replica placement solver                                            */
/* ------------------------------------------------------------------ */

typedef struct cn_solution cn_solution;

/* Minimize sum_m p_m / sqrt(A_m + B_m) subject to
 *   sum A <= n*node_cache, sum B <= f*sbs_cache,
 *   0 <= A_m <= n, 0 <= B_m <= f, A_m + B_m >= 1.
 * tol <= 0 selects the default (1e-8 scaled KKT residual). */
CN_API cn_status cn_solve_joint(const cn_params *p, double tol,
                                cn_solution **out);

/* Node-side problem over set1 (A variables, no per-pair floor) plus
 * SBS-side problem over set3 (B variables), solved independently.
 * Sets hold 1-based ranks; either may be empty (pass NULL, 0). */
CN_API cn_status cn_solve_decoupled(const cn_params *p, const int64_t *set1,
                                    size_t len1, const int64_t *set3,
                                    size_t len3, double tol,
                                    cn_solution **out);

typedef enum cn_baseline {
    CN_BASELINE_NODES_ONLY = 0, /* 1 <= A_m <= n, sum A <= n*node_cache  */
    CN_BASELINE_SBS_ONLY = 1    /* 1 <= B_m <= f, sum B <= f*sbs_cache   */
} cn_baseline;

CN_API cn_status cn_solve_baseline(const cn_params *p, cn_baseline which,
                                   double tol, cn_solution **out);

/* Projected-gradient reference solver over the same feasible set as
 * cn_solve_joint (Dykstra projection). Slow; intended for cross-checks. */
CN_API cn_status cn_solve_projected_gradient(const cn_params *p,
                                             int64_t max_iters, double tol,
                                             cn_solution **out);

CN_API void cn_solution_free(cn_solution *s);
CN_API cn_status cn_solution_size(const cn_solution *s, int64_t *catalog);
/* rank is 1-based; either output pointer may be NULL. */
CN_API cn_status cn_solution_replicas(const cn_solution *s, int64_t rank,
                                      double *node_replicas,
                                      double *sbs_replicas);
CN_API cn_status cn_solution_objective(const cn_solution *s, double *value);
/* Multipliers: budget prices and the scaled KKT residual of the returned
 * point. cap_* arrays (length = catalog) receive the per-rank cap
 * multipliers; any output may be NULL. */
CN_API cn_status cn_solution_certificate(const cn_solution *s,
                                         double *lambda_node, double *mu_sbs,
                                         double *kkt_residual);
CN_API cn_status cn_solution_cap_multipliers(const cn_solution *s,
                                             double *cap_node,
                                             double *cap_sbs, size_t len);

/* Objective of an arbitrary allocation (arrays of length catalog).
 * *below_floor counts ranks with A+B < 1 (still evaluated); a rank with
 * A+B <= 0 yields CN_EZEROTOTAL. */
CN_API cn_status cn_objective_of(const cn_params *p, const double *node_reps,
                                 const double *sbs_reps, size_t len,
                                 double *value, int64_t *below_floor);

/* ------------------------------------------------------------------ */
/* closed-form scaling laws                                            */
/* ------------------------------------------------------------------ */

typedef enum cn_regime {
    CN_REGIME_HEAVY = 0,    /* alpha >= 3/2                              */
    CN_REGIME_MODERATE = 1, /* boundary <= alpha < 3/2                   */
    CN_REGIME_FLAT = 2      /* alpha below the regime boundary           */
} cn_regime;

typedef struct cn_regime_report {
    cn_regime regime;
    double b;               /* delay-throughput scaling exponent         */
    double case_boundary;   /* single-piece vs three-piece threshold     */
    double regime_boundary; /* moderate/flat threshold                   */
    double m1_exponent;     /* n-exponent of the head boundary           */
    double m2_exponent;     /* n-exponent of the plateau/tail boundary   */
    double m4_exponent;     /* n-exponent of the baseline head boundary  */
} cn_regime_report;

CN_API cn_status cn_classify_regime(const cn_params *p, cn_regime_report *out);

/* One piece of a piecewise power law: valid for ranks in
 * [n^lo_exponent, n^hi_exponent), value ~ scale * m^m_exponent *
 * n^n_exponent.  hi_exponent of the last piece is the catalog exponent. */
typedef struct cn_power_piece {
    double lo_exponent;
    double hi_exponent;
    double m_exponent;
    double n_exponent;
} cn_power_piece;

/* Asymptotic order of the optimal totals A*+B* (alpha < 3/2 only,
 * CN_ENOTAPPLICABLE otherwise). Writes up to cap pieces, count <= 3. */
CN_API cn_status cn_joint_asymptotics(const cn_params *p, cn_power_piece *out,
                                      size_t cap, size_t *count);
/* Individual node-side / SBS-side orders (Proposition-style split). */
CN_API cn_status cn_split_asymptotics(const cn_params *p,
                                      cn_power_piece *node_out, size_t node_cap,
                                      size_t *node_count,
                                      cn_power_piece *sbs_out, size_t sbs_cap,
                                      size_t *sbs_count);
/* Asymptotic order of the decoupled baseline totals. */
CN_API cn_status cn_baseline_asymptotics(const cn_params *p,
                                         cn_power_piece *out, size_t cap,
                                         size_t *count);

typedef enum cn_compare_verdict {
    CN_COMPARE_EQUAL_ORDER = 0,
    CN_COMPARE_JOINT_WINS = 1
} cn_compare_verdict;

/* Joint vs baseline order comparison for alpha < 3/2; *threshold gets the
 * alpha value separating the verdicts. */
CN_API cn_status cn_compare_strategies(const cn_params *p,
                                       cn_compare_verdict *verdict,
                                       double *threshold);

/* Delay-throughput trade-off: b and the throughput upper-bound exponent
 * (-b/2; -1/2 in the heavy regime, where a log factor is elided). */
CN_API cn_status cn_tradeoff_exponents(const cn_params *p, double *b,
                                       double *throughput_exponent);

/* Least-squares fit of the scale constant of `curve` against (rank, value)
 * samples at a given n, in log space. Samples at plateau/caps included. */
CN_API cn_status cn_fit_scale(const cn_power_piece *curve, size_t pieces,
                              double n, const int64_t *ranks,
                              const double *values, size_t len, double *scale);

/* ------------------------------------------------------------------ */
/* delivery simulation                                                 */
/* ------------------------------------------------------------------ */

typedef struct cn_simcfg cn_simcfg;

CN_API cn_simcfg *cn_simcfg_new(void);
CN_API void cn_simcfg_free(cn_simcfg *c);
/* Keys: "nodes", "lattice_side" (0 = round(sqrt(nodes))),
 * "routing_area_factor" (cell area = factor*ln(n)/n), "protocol_delta",
 * "activation_period" (0 = derived from protocol_delta),
 * "tx_range_cells" (range as multiple of routing-cell side, default
 * sqrt(5)), "horizon", "trials", "warmup", "seed", "threads",
 * "mobile" (0/1), "torus" (0/1), "collect_load" (0/1). */
CN_API cn_status cn_simcfg_set(cn_simcfg *c, const char *key, double value);
CN_API cn_status cn_simcfg_get(const cn_simcfg *c, const char *key,
                               double *value);

typedef struct cn_outcome cn_outcome;

/* Runs `trials` independent seeded realizations: place rounded replicas,
 * closed-loop requests (one outstanding per node), random-walk mobility,
 * two-phase cell routing under the activation schedule. Identical
 * (config, params, allocation) inputs give bit-identical outcomes
 * regardless of thread count. */
CN_API cn_status cn_run_experiment(const cn_simcfg *c, const cn_params *p,
                                   const double *node_reps,
                                   const double *sbs_reps, size_t len,
                                   cn_outcome **out);

/* Scalar fields: "mean_delay", "delay_stderr", "mean_initial_distance",
 * "max_cell_load", "achieved_throughput", "completed", "horizon_exceeded",
 * "activation_period". */
CN_API cn_status cn_outcome_stat(const cn_outcome *o, const char *key,
                                 double *value);
/* Histogram of total hops per completed delivery; hist[i] = deliveries
 * with i hops. Writes min(cap, size) entries, *size gets the full size. */
CN_API cn_status cn_outcome_hop_histogram(const cn_outcome *o, int64_t *hist,
                                          size_t cap, size_t *size);
/* Mean requester-to-chosen-holder distance at issue time, per rank. */
CN_API cn_status cn_outcome_initial_distance(const cn_outcome *o, double *out,
                                             size_t cap, size_t *size);
CN_API void cn_outcome_free(cn_outcome *o);

/* Mean closest-replica distance for each replica count, plus the fitted
 * log-log slope (expected near -1/2). Uses placement only; no routing. */
CN_API cn_status cn_replica_distance_scan(const cn_simcfg *c,
                                          const int64_t *replica_counts,
                                          size_t len, double *mean_distances,
                                          double *slope);

/* ------------------------------------------------------------------ */
/* reference dataset gate                                              */
/* ------------------------------------------------------------------ */

/* Solves the instance in `p` at the checkpoints' alpha values and compares
 * against the built-in reference checkpoints. tolerance <= 0 keeps each
 * checkpoint's pinned tolerance; a positive value rescales them by
 * tolerance/0.03. Returns CN_OK or CN_EREFMISMATCH (gate failure); when
 * `report` is non-NULL it receives a malloc'd text table (caller frees
 * with cn_text_free) in both cases. */
CN_API cn_status cn_reference_gate(const cn_params *p, double tolerance,
                                   char **report);
CN_API void cn_text_free(char *text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CACHENET_H */
