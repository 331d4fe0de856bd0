// C ABI layer: opaque handles around the C++ core, exceptions mapped to
// status codes, last-error text kept per thread.
#include "cachenet.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "errors.hpp"
#include "figures.hpp"
#include "params.hpp"
#include "pg_oracle.hpp"
#include "scaling.hpp"
#include "sim.hpp"
#include "solver.hpp"
#include "zipf.hpp"

using cachenet::Error;
using cachenet::Params;
using cachenet::Status;

struct cn_params {
    Params p;
};

struct cn_solution {
    cachenet::Solution s;
};

struct cn_simcfg {
    cachenet::SimConfig c;
};

struct cn_outcome {
    cachenet::SimOutcome o;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) {
    try {
        g_last_error = msg != nullptr ? msg : "";
    } catch (...) {
        // keep the previous message if even storing the new one fails
    }
}

cn_status to_c(Status s) { return static_cast<cn_status>(static_cast<int>(s)); }

template <typename F>
cn_status guarded(F&& body) noexcept {
    try {
        return body();
    } catch (const Error& e) {
        set_error(e.what());
        return to_c(e.status());
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return CN_EINTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return CN_EINTERNAL;
    } catch (...) {
        set_error("unknown failure");
        return CN_EINTERNAL;
    }
}

cn_status need(bool ok, const char* what) {
    if (ok) return CN_OK;
    set_error(what);
    return CN_EINVAL;
}

// Wraps a Solution into a fresh handle; reports non-convergence through
// the status while still handing the best iterate to the caller.
cn_status finish_solution(cachenet::Solution&& s, cn_solution** out) {
    auto* h = new cn_solution{std::move(s)};
    *out = h;
    if (!h->s.converged) {
        set_error("solver stopped before reaching its tolerance");
        return CN_ENOCONVERGE;
    }
    return CN_OK;
}

} // namespace

extern "C" {

const char* cn_strerror(cn_status s) {
    switch (s) {
        case CN_OK: return "ok";
        case CN_EINVAL: return "invalid argument";
        case CN_EINFEASIBLE: return "infeasible instance";
        case CN_ENOCONVERGE: return "iteration budget exhausted";
        case CN_EREFMISMATCH: return "reference regression gate failed";
        case CN_EZEROTOTAL: return "allocation has a zero total";
        case CN_ECAPACITY: return "cache capacity exceeded";
        case CN_ENOHOLDER: return "content has no holder";
        case CN_EHORIZON: return "horizon exceeded";
        case CN_EMISSINGEXP: return "scaling exponents missing";
        case CN_ENOTAPPLICABLE: return "result not applicable here";
        case CN_EIO: return "i/o failure";
        case CN_EPARSE: return "parse failure";
        case CN_EINTERNAL: return "internal failure";
    }
    return "unknown status";
}

const char* cn_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ */

cn_status cn_zipf_harmonic(double alpha, int64_t catalog, double* out) {
    if (cn_status s = need(out != nullptr, "cn_zipf_harmonic: out is NULL")) return s;
    return guarded([&] {
        *out = cachenet::zipf_harmonic(alpha, catalog);
        return CN_OK;
    });
}

cn_status cn_zipf_pmf(double alpha, int64_t catalog, int64_t rank, double* out) {
    if (cn_status s = need(out != nullptr, "cn_zipf_pmf: out is NULL")) return s;
    return guarded([&] {
        *out = cachenet::zipf_pmf(alpha, catalog, rank);
        return CN_OK;
    });
}

cn_status cn_zipf_growth(double alpha, cn_growth* cls, double* exponent) {
    if (cn_status s = need(cls != nullptr, "cn_zipf_growth: cls is NULL")) return s;
    return guarded([&] {
        double ex = 0.0;
        const cachenet::Growth g = cachenet::zipf_growth(alpha, &ex);
        *cls = static_cast<cn_growth>(static_cast<int>(g));
        if (exponent) *exponent = ex;
        return CN_OK;
    });
}

/* ------------------------------------------------------------------ */

cn_params* cn_params_new(void) { return new (std::nothrow) cn_params{}; }

void cn_params_free(cn_params* p) { delete p; }

cn_params* cn_params_clone(const cn_params* p) {
    if (!p) return nullptr;
    return new (std::nothrow) cn_params{p->p};
}

cn_status cn_params_set(cn_params* p, const char* key, double value) {
    if (cn_status s = need(p && key, "cn_params_set: NULL argument")) return s;
    return guarded([&] {
        p->p.set(key, value);
        return CN_OK;
    });
}

cn_status cn_params_get(const cn_params* p, const char* key, double* value) {
    if (cn_status s = need(p && key && value, "cn_params_get: NULL argument")) return s;
    return guarded([&] {
        *value = p->p.get(key);
        return CN_OK;
    });
}

cn_status cn_params_validate(const cn_params* p) {
    if (cn_status s = need(p != nullptr, "cn_params_validate: p is NULL")) return s;
    return guarded([&] {
        p->p.validate();
        return CN_OK;
    });
}

/* ------------------------------------------------------------------ */

cn_status cn_solve_joint(const cn_params* p, double tol, cn_solution** out) {
    if (cn_status s = need(p && out, "cn_solve_joint: NULL argument")) return s;
    *out = nullptr;
    return guarded([&] {
        return finish_solution(
            cachenet::solve_joint(p->p, tol > 0 ? tol : cachenet::kDefaultTol), out);
    });
}

cn_status cn_solve_decoupled(const cn_params* p, const int64_t* set1, size_t len1,
                             const int64_t* set3, size_t len3, double tol,
                             cn_solution** out) {
    if (cn_status s = need(p && out, "cn_solve_decoupled: NULL argument")) return s;
    if (cn_status s = need(len1 == 0 || set1, "cn_solve_decoupled: set1 is NULL"))
        return s;
    if (cn_status s = need(len3 == 0 || set3, "cn_solve_decoupled: set3 is NULL"))
        return s;
    *out = nullptr;
    return guarded([&] {
        std::vector<int64_t> s1(set1, set1 + len1);
        std::vector<int64_t> s3(set3, set3 + len3);
        return finish_solution(
            cachenet::solve_decoupled(p->p, s1, s3,
                                      tol > 0 ? tol : cachenet::kDefaultTol),
            out);
    });
}

cn_status cn_solve_baseline(const cn_params* p, cn_baseline which, double tol,
                            cn_solution** out) {
    if (cn_status s = need(p && out, "cn_solve_baseline: NULL argument")) return s;
    if (cn_status s = need(which == CN_BASELINE_NODES_ONLY || which == CN_BASELINE_SBS_ONLY,
                           "cn_solve_baseline: bad selector"))
        return s;
    *out = nullptr;
    return guarded([&] {
        const auto b = which == CN_BASELINE_NODES_ONLY ? cachenet::Baseline::nodes_only
                                                       : cachenet::Baseline::sbs_only;
        return finish_solution(
            cachenet::solve_baseline(p->p, b, tol > 0 ? tol : cachenet::kDefaultTol),
            out);
    });
}

cn_status cn_solve_projected_gradient(const cn_params* p, int64_t max_iters,
                                      double tol, cn_solution** out) {
    if (cn_status s = need(p && out, "cn_solve_projected_gradient: NULL argument"))
        return s;
    *out = nullptr;
    return guarded([&] {
        return finish_solution(
            cachenet::solve_projected_gradient(p->p, max_iters,
                                               tol > 0 ? tol : 1e-12),
            out);
    });
}

void cn_solution_free(cn_solution* s) { delete s; }

cn_status cn_solution_size(const cn_solution* s, int64_t* catalog) {
    if (cn_status r = need(s && catalog, "cn_solution_size: NULL argument")) return r;
    *catalog = static_cast<int64_t>(s->s.a.size());
    return CN_OK;
}

cn_status cn_solution_replicas(const cn_solution* s, int64_t rank,
                               double* node_replicas, double* sbs_replicas) {
    if (cn_status r = need(s != nullptr, "cn_solution_replicas: s is NULL")) return r;
    if (cn_status r = need(rank >= 1 && rank <= static_cast<int64_t>(s->s.a.size()),
                           "cn_solution_replicas: rank out of range"))
        return r;
    const auto i = static_cast<size_t>(rank - 1);
    if (node_replicas) *node_replicas = s->s.a[i];
    if (sbs_replicas) *sbs_replicas = s->s.b[i];
    return CN_OK;
}

cn_status cn_solution_objective(const cn_solution* s, double* value) {
    if (cn_status r = need(s && value, "cn_solution_objective: NULL argument")) return r;
    *value = s->s.objective;
    return CN_OK;
}

cn_status cn_solution_certificate(const cn_solution* s, double* lambda_node,
                                  double* mu_sbs, double* kkt_residual) {
    if (cn_status r = need(s != nullptr, "cn_solution_certificate: s is NULL")) return r;
    if (lambda_node) *lambda_node = s->s.cert.lambda_node;
    if (mu_sbs) *mu_sbs = s->s.cert.mu_sbs;
    if (kkt_residual) *kkt_residual = s->s.cert.kkt_residual;
    return CN_OK;
}

cn_status cn_solution_cap_multipliers(const cn_solution* s, double* cap_node,
                                      double* cap_sbs, size_t len) {
    if (cn_status r = need(s != nullptr, "cn_solution_cap_multipliers: s is NULL"))
        return r;
    if (cn_status r = need(len >= s->s.cert.w.size(),
                           "cn_solution_cap_multipliers: arrays too short"))
        return r;
    if (cap_node)
        std::memcpy(cap_node, s->s.cert.w.data(), s->s.cert.w.size() * sizeof(double));
    if (cap_sbs)
        std::memcpy(cap_sbs, s->s.cert.nu.data(), s->s.cert.nu.size() * sizeof(double));
    return CN_OK;
}

cn_status cn_objective_of(const cn_params* p, const double* node_reps,
                          const double* sbs_reps, size_t len, double* value,
                          int64_t* below_floor) {
    if (cn_status s = need(p && node_reps && sbs_reps && value,
                           "cn_objective_of: NULL argument"))
        return s;
    return guarded([&] {
        p->p.validate();
        if (static_cast<int64_t>(len) != p->p.catalog)
            cachenet::fail(Status::invalid, "cn_objective_of: len must equal the catalog");
        const std::vector<double> pm = cachenet::zipf_pmf_all(p->p.alpha, p->p.catalog);
        std::vector<double> a(node_reps, node_reps + len);
        std::vector<double> b(sbs_reps, sbs_reps + len);
        *value = cachenet::objective_of(pm, a, b, below_floor);
        return CN_OK;
    });
}

/* ------------------------------------------------------------------ */

cn_status cn_classify_regime(const cn_params* p, cn_regime_report* out) {
    if (cn_status s = need(p && out, "cn_classify_regime: NULL argument")) return s;
    return guarded([&] {
        const cachenet::RegimeReport r = cachenet::classify_regime(p->p);
        out->regime = static_cast<cn_regime>(static_cast<int>(r.regime));
        out->b = r.b;
        out->case_boundary = r.case_boundary;
        out->regime_boundary = r.regime_boundary;
        out->m1_exponent = r.m1_exponent;
        out->m2_exponent = r.m2_exponent;
        out->m4_exponent = r.m4_exponent;
        return CN_OK;
    });
}

namespace {

cn_status copy_pieces(const std::vector<cachenet::PowerPiece>& src,
                      cn_power_piece* out, size_t cap, size_t* count) {
    if (cn_status s = need(count != nullptr, "asymptotics: count is NULL")) return s;
    *count = src.size();
    if (cn_status s = need(out != nullptr || cap == 0, "asymptotics: out is NULL"))
        return s;
    const size_t n = src.size() < cap ? src.size() : cap;
    for (size_t i = 0; i < n; ++i) {
        out[i].lo_exponent = src[i].lo_exponent;
        out[i].hi_exponent = src[i].hi_exponent;
        out[i].m_exponent = src[i].m_exponent;
        out[i].n_exponent = src[i].n_exponent;
    }
    return CN_OK;
}

} // namespace

cn_status cn_joint_asymptotics(const cn_params* p, cn_power_piece* out, size_t cap,
                               size_t* count) {
    if (cn_status s = need(p != nullptr, "cn_joint_asymptotics: p is NULL")) return s;
    return guarded([&] { return copy_pieces(cachenet::joint_asymptotics(p->p), out, cap, count); });
}

cn_status cn_split_asymptotics(const cn_params* p, cn_power_piece* node_out,
                               size_t node_cap, size_t* node_count,
                               cn_power_piece* sbs_out, size_t sbs_cap,
                               size_t* sbs_count) {
    if (cn_status s = need(p != nullptr, "cn_split_asymptotics: p is NULL")) return s;
    return guarded([&] {
        std::vector<cachenet::PowerPiece> ns, ss;
        cachenet::split_asymptotics(p->p, ns, ss);
        if (cn_status s = copy_pieces(ns, node_out, node_cap, node_count)) return s;
        return copy_pieces(ss, sbs_out, sbs_cap, sbs_count);
    });
}

cn_status cn_baseline_asymptotics(const cn_params* p, cn_power_piece* out, size_t cap,
                                  size_t* count) {
    if (cn_status s = need(p != nullptr, "cn_baseline_asymptotics: p is NULL")) return s;
    return guarded([&] {
        return copy_pieces(cachenet::baseline_asymptotics(p->p), out, cap, count);
    });
}

cn_status cn_compare_strategies(const cn_params* p, cn_compare_verdict* verdict,
                                double* threshold) {
    if (cn_status s = need(p && verdict, "cn_compare_strategies: NULL argument"))
        return s;
    return guarded([&] {
        double thr = 0.0;
        const cachenet::CompareVerdict v = cachenet::compare_strategies(p->p, &thr);
        *verdict = static_cast<cn_compare_verdict>(static_cast<int>(v));
        if (threshold) *threshold = thr;
        return CN_OK;
    });
}

cn_status cn_tradeoff_exponents(const cn_params* p, double* b,
                                double* throughput_exponent) {
    if (cn_status s = need(p != nullptr, "cn_tradeoff_exponents: p is NULL")) return s;
    return guarded([&] {
        double bb = 0.0, te = 0.0;
        cachenet::tradeoff_exponents(p->p, &bb, &te);
        if (b) *b = bb;
        if (throughput_exponent) *throughput_exponent = te;
        return CN_OK;
    });
}

cn_status cn_fit_scale(const cn_power_piece* curve, size_t pieces, double n,
                       const int64_t* ranks, const double* values, size_t len,
                       double* scale) {
    if (cn_status s = need(curve && ranks && values && scale && pieces > 0 && len > 0,
                           "cn_fit_scale: NULL or empty argument"))
        return s;
    return guarded([&] {
        std::vector<cachenet::PowerPiece> c(pieces);
        for (size_t i = 0; i < pieces; ++i) {
            c[i].lo_exponent = curve[i].lo_exponent;
            c[i].hi_exponent = curve[i].hi_exponent;
            c[i].m_exponent = curve[i].m_exponent;
            c[i].n_exponent = curve[i].n_exponent;
        }
        std::vector<int64_t> r(ranks, ranks + len);
        std::vector<double> v(values, values + len);
        *scale = cachenet::fit_scale(c, n, r, v);
        return CN_OK;
    });
}

/* ------------------------------------------------------------------ */

cn_simcfg* cn_simcfg_new(void) { return new (std::nothrow) cn_simcfg{}; }

void cn_simcfg_free(cn_simcfg* c) { delete c; }

cn_status cn_simcfg_set(cn_simcfg* c, const char* key, double value) {
    if (cn_status s = need(c && key, "cn_simcfg_set: NULL argument")) return s;
    return guarded([&] {
        c->c.set(key, value);
        return CN_OK;
    });
}

cn_status cn_simcfg_get(const cn_simcfg* c, const char* key, double* value) {
    if (cn_status s = need(c && key && value, "cn_simcfg_get: NULL argument")) return s;
    return guarded([&] {
        *value = c->c.get(key);
        return CN_OK;
    });
}

cn_status cn_run_experiment(const cn_simcfg* c, const cn_params* p,
                            const double* node_reps, const double* sbs_reps,
                            size_t len, cn_outcome** out) {
    if (cn_status s = need(c && p && node_reps && sbs_reps && out,
                           "cn_run_experiment: NULL argument"))
        return s;
    *out = nullptr;
    return guarded([&] {
        if (static_cast<int64_t>(len) != p->p.catalog)
            cachenet::fail(Status::invalid,
                           "cn_run_experiment: len must equal the catalog");
        std::vector<double> a(node_reps, node_reps + len);
        std::vector<double> b(sbs_reps, sbs_reps + len);
        auto* h = new cn_outcome{cachenet::run_experiment(c->c, p->p, a, b)};
        *out = h;
        return CN_OK;
    });
}

cn_status cn_outcome_stat(const cn_outcome* o, const char* key, double* value) {
    if (cn_status s = need(o && key && value, "cn_outcome_stat: NULL argument")) return s;
    const std::string k(key);
    const cachenet::SimOutcome& r = o->o;
    if (k == "mean_delay") *value = r.mean_delay;
    else if (k == "delay_stderr") *value = r.delay_stderr;
    else if (k == "mean_initial_distance") *value = r.mean_initial_distance;
    else if (k == "max_cell_load") *value = r.max_cell_load;
    else if (k == "achieved_throughput") *value = r.achieved_throughput;
    else if (k == "completed") *value = static_cast<double>(r.completed);
    else if (k == "horizon_exceeded") *value = static_cast<double>(r.horizon_exceeded);
    else if (k == "activation_period") *value = static_cast<double>(r.activation_period);
    else {
        set_error("cn_outcome_stat: unknown key");
        return CN_EINVAL;
    }
    return CN_OK;
}

cn_status cn_outcome_hop_histogram(const cn_outcome* o, int64_t* hist, size_t cap,
                                   size_t* size) {
    if (cn_status s = need(o && size, "cn_outcome_hop_histogram: NULL argument"))
        return s;
    *size = o->o.hop_histogram.size();
    if (cn_status s = need(hist != nullptr || cap == 0,
                           "cn_outcome_hop_histogram: hist is NULL"))
        return s;
    const size_t n = *size < cap ? *size : cap;
    for (size_t i = 0; i < n; ++i) hist[i] = o->o.hop_histogram[i];
    return CN_OK;
}

cn_status cn_outcome_initial_distance(const cn_outcome* o, double* out, size_t cap,
                                      size_t* size) {
    if (cn_status s = need(o && size, "cn_outcome_initial_distance: NULL argument"))
        return s;
    *size = o->o.per_rank_distance.size();
    if (cn_status s = need(out != nullptr || cap == 0,
                           "cn_outcome_initial_distance: out is NULL"))
        return s;
    const size_t n = *size < cap ? *size : cap;
    for (size_t i = 0; i < n; ++i) out[i] = o->o.per_rank_distance[i];
    return CN_OK;
}

void cn_outcome_free(cn_outcome* o) { delete o; }

cn_status cn_replica_distance_scan(const cn_simcfg* c, const int64_t* replica_counts,
                                   size_t len, double* mean_distances,
                                   double* slope) {
    if (cn_status s = need(c && replica_counts && mean_distances && len > 0,
                           "cn_replica_distance_scan: NULL or empty argument"))
        return s;
    return guarded([&] {
        std::vector<int64_t> counts(replica_counts, replica_counts + len);
        const std::vector<double> means =
            cachenet::replica_distance_scan(c->c, counts, slope);
        for (size_t i = 0; i < len; ++i) mean_distances[i] = means[i];
        return CN_OK;
    });
}

/* ------------------------------------------------------------------ */

cn_status cn_reference_gate(const cn_params* p, double tolerance, char** report) {
    if (cn_status s = need(p != nullptr, "cn_reference_gate: p is NULL")) return s;
    if (report) *report = nullptr;
    return guarded([&] {
        const cachenet::GateResult r =
            cachenet::reference_gate(p->p, tolerance > 0 ? tolerance : 0.03);
        if (report) {
            char* text = static_cast<char*>(std::malloc(r.report.size() + 1));
            if (!text) cachenet::fail(Status::internal, "out of memory");
            std::memcpy(text, r.report.c_str(), r.report.size() + 1);
            *report = text;
        }
        if (!r.pass) {
            set_error("reference regression gate failed");
            return CN_EREFMISMATCH;
        }
        return CN_OK;
    });
}

void cn_text_free(char* text) { std::free(text); }

} /* extern "C" */
