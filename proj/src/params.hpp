// Network instance parameters shared by the solver, the scaling laws and
// the simulator, plus key/value access used by the C API and the config
// loader.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cachenet {

struct Params {
    int64_t nodes = 0;        // n: mobile nodes
    int64_t catalog = 0;      // M: contents, ranked by popularity
    int64_t sbs_count = 0;    // f: small base stations
    double node_cache = 0.0;  // per-node cache size
    double sbs_cache = 0.0;   // per-SBS cache size
    double alpha = 0.0;       // popularity skew

    // Scaling exponents; optional, only needed by the asymptotic module.
    std::optional<double> gamma; // catalog growth:   M = Theta(n^gamma)
    std::optional<double> beta;  // per-SBS cache:    K_f = Theta(n^beta)
    std::optional<double> delta; // SBS count:        f = Theta(n^delta)

    double node_budget() const { return static_cast<double>(nodes) * node_cache; }
    double sbs_budget() const { return static_cast<double>(sbs_count) * sbs_cache; }

    bool has_exponents() const {
        return gamma.has_value() && beta.has_value() && delta.has_value();
    }

    // Throws Error(Status::invalid) on out-of-range values.
    void validate() const;

    // Key/value access; throws Error(Status::invalid) on unknown key, and
    // get() also on a key that was never set.
    void set(const std::string& key, double value);
    double get(const std::string& key) const;
};

} // namespace cachenet
