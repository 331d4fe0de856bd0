#include "params.hpp"

#include <cmath>

#include "errors.hpp"

namespace cachenet {

namespace {

void check(bool ok, const std::string& msg) {
    if (!ok) fail(Status::invalid, msg);
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

void Params::validate() const {
    check(nodes >= 1, "nodes must be >= 1");
    check(catalog >= 1, "catalog must be >= 1");
    check(sbs_count >= 0, "sbs_count must be >= 0");
    check(finite(node_cache) && node_cache >= 0.0, "node_cache must be >= 0");
    check(finite(sbs_cache) && sbs_cache >= 0.0, "sbs_cache must be >= 0");
    check(finite(alpha) && alpha > 0.0, "alpha must be > 0");

    const bool any = gamma || beta || delta;
    if (any && !has_exponents())
        fail(Status::missing_exponents,
             "scaling exponents gamma, beta, delta must be set together");
    if (has_exponents()) {
        const double g = *gamma, b = *beta, d = *delta;
        check(finite(g) && finite(b) && finite(d), "exponents must be finite");
        check(b > 0.0 && b < g && g < 1.0, "need 0 < beta < gamma < 1");
        check(d >= 0.0 && d < 1.0, "need 0 <= delta < 1");
        check(b + d >= 1.0, "need beta + delta >= 1");
    }
}

void Params::set(const std::string& key, double value) {
    if (key == "nodes")
        nodes = static_cast<int64_t>(std::llround(value));
    else if (key == "catalog")
        catalog = static_cast<int64_t>(std::llround(value));
    else if (key == "sbs_count")
        sbs_count = static_cast<int64_t>(std::llround(value));
    else if (key == "node_cache")
        node_cache = value;
    else if (key == "sbs_cache")
        sbs_cache = value;
    else if (key == "alpha")
        alpha = value;
    else if (key == "gamma")
        gamma = value;
    else if (key == "beta")
        beta = value;
    else if (key == "delta")
        delta = value;
    else
        fail(Status::invalid, "unknown parameter key: " + key);
}

double Params::get(const std::string& key) const {
    if (key == "nodes") return static_cast<double>(nodes);
    if (key == "catalog") return static_cast<double>(catalog);
    if (key == "sbs_count") return static_cast<double>(sbs_count);
    if (key == "node_cache") return node_cache;
    if (key == "sbs_cache") return sbs_cache;
    if (key == "alpha") return alpha;
    if (key == "gamma" || key == "beta" || key == "delta") {
        const std::optional<double>& v =
            key == "gamma" ? gamma : (key == "beta" ? beta : delta);
        if (!v) fail(Status::missing_exponents, "exponent not set: " + key);
        return *v;
    }
    fail(Status::invalid, "unknown parameter key: " + key);
}

} // namespace cachenet
