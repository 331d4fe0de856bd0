#include "figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "errors.hpp"
#include "solver.hpp"

namespace cachenet {

namespace {

#include "reference_data.inc"

std::vector<RefPoint> to_vec(const RefPoint* p, size_t count) {
    return std::vector<RefPoint>(p, p + count);
}

} // namespace

#define REF_ACCESSOR(fn, arr)                                  \
    const std::vector<RefPoint>& fn() {                        \
        static const std::vector<RefPoint> v =                 \
            to_vec(arr, sizeof(arr) / sizeof(arr[0]));         \
        return v;                                              \
    }

REF_ACCESSOR(ref_total_low_skew, kRefTotalLowSkew)
REF_ACCESSOR(ref_total_high_skew, kRefTotalHighSkew)
REF_ACCESSOR(ref_node_low_skew, kRefNodeLowSkew)
REF_ACCESSOR(ref_sbs_low_skew, kRefSbsLowSkew)
REF_ACCESSOR(ref_node_high_skew, kRefNodeHighSkew)
REF_ACCESSOR(ref_sbs_high_skew, kRefSbsHighSkew)

#undef REF_ACCESSOR

namespace {

struct GateState {
    std::string report;
    int checks = 0;
    int failures = 0;

    void line(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[256];
        va_list ap;
        va_start(ap, fmt);
        vsnprintf(buf, sizeof(buf), fmt, ap);
        va_end(ap);
        report += buf;
        report += '\n';
    }

    void check_rel(const char* what, int rank, double ref, double got, double tol) {
        ++checks;
        const double dev = std::fabs(got - ref) / std::fabs(ref);
        const bool ok = dev <= tol;
        if (!ok) ++failures;
        line("[gate] %s rank %d: ref %.6g got %.6g dev %.3f%% tol %.2f%% : %s", what,
             rank, ref, got, dev * 100.0, tol * 100.0, ok ? "PASS" : "FAIL");
    }

    void check_cond(const char* what, bool ok, const std::string& detail) {
        ++checks;
        if (!ok) ++failures;
        line("[gate] %s: %s : %s", what, detail.c_str(), ok ? "PASS" : "FAIL");
    }

    // informational full-curve deviation (relative where the reference is
    // not close to zero, absolute otherwise); never gates
    void info_curve(const char* what, const std::vector<RefPoint>& ref,
                    const std::vector<double>& got) {
        double worst = 0.0;
        int worst_rank = 0;
        for (const RefPoint& p : ref) {
            const auto idx = static_cast<size_t>(p.rank - 1);
            if (idx >= got.size()) continue;
            const double base = std::fabs(p.value) >= 1.0 ? std::fabs(p.value) : 1.0;
            const double dev = std::fabs(got[idx] - p.value) / base;
            if (dev > worst) {
                worst = dev;
                worst_rank = p.rank;
            }
        }
        line("[info] %s: max curve deviation %.3f%% at rank %d (not gated)", what,
             worst * 100.0, worst_rank);
    }
};

double value_at(const std::vector<RefPoint>& ref, int rank) {
    for (const RefPoint& p : ref)
        if (p.rank == rank) return p.value;
    fail(Status::internal, "reference curve misses a pinned rank");
}

} // namespace

GateResult reference_gate(const Params& base, double tolerance) {
    if (!(tolerance > 0.0) || !std::isfinite(tolerance))
        fail(Status::invalid, "reference gate: tolerance must be positive");
    const double tol3 = tolerance;              // pins published at 3%
    const double tol5 = tolerance * 5.0 / 3.0;  // pins published at 5%

    GateState g;

    Params p = base;
    p.alpha = 0.55;
    p.validate();
    const Solution low = solve_joint(p, kDefaultTol);
    p.alpha = 1.2;
    const Solution high = solve_joint(p, kDefaultTol);
    const auto M = static_cast<size_t>(p.catalog);

    std::vector<double> tl(M), th(M);
    for (size_t m = 0; m < M; ++m) {
        tl[m] = low.a[m] + low.b[m];
        th[m] = high.a[m] + high.b[m];
    }

    for (int rank : {1, 2, 5, 10, 50, 100, 200})
        if (rank <= p.catalog)
            g.check_rel("low-skew totals", rank, value_at(ref_total_low_skew(), rank),
                        tl[static_cast<size_t>(rank - 1)], tol3);
    g.check_rel("low-skew node copies", 1, value_at(ref_node_low_skew(), 1), low.a[0],
                tol5);
    g.check_rel("low-skew box copies", 1, value_at(ref_sbs_low_skew(), 1), low.b[0],
                tol5);

    g.check_rel("high-skew totals", 1, value_at(ref_total_high_skew(), 1), th[0], tol3);
    if (p.catalog >= 200)
        g.check_rel("high-skew totals", 200, value_at(ref_total_high_skew(), 200),
                    th[199], tol3);

    // plateau: the ranks whose total sits in [49, 51] must be one
    // contiguous run covering at least ranks 10 through 14
    {
        int first = 0, last = 0, count = 0;
        for (size_t m = 0; m < M; ++m) {
            if (th[m] >= 49.0 && th[m] <= 51.0) {
                const int rank = static_cast<int>(m) + 1;
                if (count == 0) first = rank;
                last = rank;
                ++count;
            }
        }
        char detail[128];
        snprintf(detail, sizeof(detail), "ranks [%d, %d], %d members", first, last,
                 count);
        const bool contiguous = count > 0 && last - first + 1 == count;
        const bool covers = first > 0 && first <= 10 && last >= 14;
        g.check_cond("high-skew plateau in [49, 51]", contiguous && covers, detail);
    }

    g.check_rel("high-skew node copies", 1, value_at(ref_node_high_skew(), 1),
                high.a[0], tol5);
    g.check_rel("high-skew box copies", 1, value_at(ref_sbs_high_skew(), 1), high.b[0],
                tol3);
    {
        double worst = 0.0;
        for (size_t m = 19; m < M; ++m) worst = std::max(worst, high.a[m]);
        char detail[128];
        snprintf(detail, sizeof(detail), "max node copies beyond rank 19 = %.3g",
                 worst);
        g.check_cond("high-skew node tail <= 0.1", worst <= 0.1, detail);
    }

    g.info_curve("low-skew totals", ref_total_low_skew(), tl);
    g.info_curve("high-skew totals", ref_total_high_skew(), th);
    g.info_curve("low-skew node copies", ref_node_low_skew(), low.a);
    g.info_curve("low-skew box copies", ref_sbs_low_skew(), low.b);
    g.info_curve("high-skew node copies", ref_node_high_skew(), high.a);
    g.info_curve("high-skew box copies", ref_sbs_high_skew(), high.b);

    GateResult out;
    out.pass = g.failures == 0;
    char tail[96];
    snprintf(tail, sizeof(tail), "[gate] summary: %d checks, %d failed", g.checks,
             g.failures);
    g.report += tail;
    g.report += '\n';
    out.report = std::move(g.report);
    return out;
}

} // namespace cachenet
