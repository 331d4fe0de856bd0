// Published reference curves for the default instance (n=300 nodes with
// 2-slot caches, 50 box stations with 75-slot caches, 200-rank catalog)
// and the regression gate that re-solves the instance and compares the
// result against pinned checkpoints of those curves.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "params.hpp"

namespace cachenet {

struct RefPoint {
    int32_t rank;
    double value;
};

// Reference curves, indexed by skew: low = alpha 0.55, high = alpha 1.2.
const std::vector<RefPoint>& ref_total_low_skew();
const std::vector<RefPoint>& ref_total_high_skew();
const std::vector<RefPoint>& ref_node_low_skew();
const std::vector<RefPoint>& ref_sbs_low_skew();
const std::vector<RefPoint>& ref_node_high_skew();
const std::vector<RefPoint>& ref_sbs_high_skew();

struct GateResult {
    bool pass = false;
    std::string report;  // one line per check plus informational deviations
};

// Re-solves the allocation at both skews using everything from `base`
// except alpha and compares pinned checkpoints within `tolerance`
// (relative; pin classes published at 5% scale with tolerance/0.03).
// Throws on solver errors; a mismatch is reported, not thrown.
GateResult reference_gate(const Params& base, double tolerance);

} // namespace cachenet
