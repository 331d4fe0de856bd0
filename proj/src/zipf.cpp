#include "zipf.hpp"

#include <cmath>

#include "errors.hpp"

namespace cachenet {

namespace {

void check_args(double alpha, int64_t catalog) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(Status::invalid, "alpha must be > 0");
    if (catalog < 1) fail(Status::invalid, "catalog must be >= 1");
}

} // namespace

double zipf_harmonic(double alpha, int64_t catalog) {
    check_args(alpha, catalog);
    double h = 0.0;
    for (int64_t i = catalog; i >= 1; --i)
        h += std::pow(static_cast<double>(i), -alpha);
    return h;
}

double zipf_pmf(double alpha, int64_t catalog, int64_t rank) {
    check_args(alpha, catalog);
    if (rank < 1 || rank > catalog)
        fail(Status::invalid, "rank out of range");
    return std::pow(static_cast<double>(rank), -alpha) /
           zipf_harmonic(alpha, catalog);
}

std::vector<double> zipf_pmf_all(double alpha, int64_t catalog) {
    check_args(alpha, catalog);
    const double h = zipf_harmonic(alpha, catalog);
    std::vector<double> p(static_cast<size_t>(catalog));
    for (int64_t m = 1; m <= catalog; ++m)
        p[static_cast<size_t>(m - 1)] =
            std::pow(static_cast<double>(m), -alpha) / h;
    return p;
}

Growth zipf_growth(double alpha, double* exponent) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail(Status::invalid, "alpha must be > 0");
    if (exponent) *exponent = 0.0;
    if (alpha > 1.0) return Growth::constant;
    if (alpha == 1.0) return Growth::logarithmic;
    if (exponent) *exponent = 1.0 - alpha;
    return Growth::polynomial;
}

} // namespace cachenet
