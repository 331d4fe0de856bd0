// Discrete-time Monte Carlo simulator: random-walk mobility on a subcell
// lattice over the unit square (torus by default), SBSs on a regular
// grid, random replica placement matching a rounded allocation, and
// two-phase cell routing (request message to the closest holder, content
// back to the moving requester) under a TDMA cell-activation schedule
// that satisfies the protocol interference model.
//
// Determinism: every trial owns an independent RNG stream derived from
// (seed, trial index), trial results are reduced in trial order, and all
// per-trial accumulators of integer quantities are integers, so outcomes
// are bit-identical for any thread count.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "params.hpp"
#include "rng.hpp"

namespace cachenet {

struct SimConfig {
    int64_t nodes = 0;
    int64_t lattice_side = 0;          // 0: round(sqrt(nodes))
    double routing_area_factor = 2.0;  // cell area = factor * ln(n) / n
    double protocol_delta = 1.0;       // guard factor of the protocol model
    int64_t activation_period = 0;     // 0: derived; else a perfect square
    double tx_range_cells = 0.0;       // 0: sqrt(5) (adjacent-cell corners)
    int64_t horizon = 2000;
    int64_t trials = 4;
    int64_t warmup = 0;
    uint64_t seed = 1;
    int64_t threads = 0;               // 0: hardware concurrency
    bool mobile = true;
    bool torus = true;
    bool collect_load = true;

    void validate() const;
    void set(const std::string& key, double value);
    double get(const std::string& key) const;

    int64_t side() const;           // subcell lattice side L
    int64_t routing_cells() const;  // routing grid side R
    double tx_range() const { return tx_range_cells > 0.0 ? tx_range_cells : 2.2360679774997896; }
    // Smallest activation pitch P with (P - 2) >= (1 + delta) * range, so
    // that simultaneously active cells P apart cannot violate the
    // exclusion rule around any receiver of an adjacent-cell hop.  On the
    // torus the P-apart guarantee is exact when the routing grid side R is
    // a multiple of P (the coloring tiles the wrap seam) or when R < P (at
    // most one cell per color); otherwise same-color cells can sit closer
    // than P across the seam.  Within one active cell, concurrent hops
    // share the slot fluidly rather than queueing.
    int64_t pitch() const;
    int64_t period() const;  // activation_period override or pitch^2
};

struct SimOutcome {
    double mean_delay = 0.0;
    double delay_stderr = 0.0;
    double mean_initial_distance = 0.0;
    std::vector<double> per_rank_distance;  // mean requester-holder distance
    double max_cell_load = 0.0;
    double achieved_throughput = 0.0;
    int64_t completed = 0;
    int64_t horizon_exceeded = 0;
    int64_t activation_period = 0;
    std::vector<int64_t> hop_histogram;  // index = hops per delivery
};

// Integer replica counts from a real allocation: per-side largest-remainder
// rounding against the (floored) budgets, then single-unit transfers from
// the least-popular surplus holders onto any rank left with zero copies.
struct RoundedPlacement {
    std::vector<int64_t> node_copies;
    std::vector<int64_t> sbs_copies;
};
RoundedPlacement round_replicas(const Params& p, const std::vector<double>& a,
                                const std::vector<double>& b);

// One random-walk move: to one of the four adjacent subcells, equally
// likely; wraps on the torus, otherwise an off-grid attempt stays put.
void rwmm_step(int64_t& x, int64_t& y, int64_t side, bool torus,
               Xoshiro256pp& rng);

// Transmission audit record for interference checks (ad-hoc band only;
// SBS uplink/downlink hops ride a separate infrastructure band, and
// same-cell exchanges are short-range local traffic outside the cell
// schedule — both are excluded from the protocol-model audit).
struct TxRecord {
    int64_t slot;
    int8_t sub_slot;  // 0 = request messages, 1 = content
    int8_t band;      // 0 = ad-hoc, 1 = infrastructure, 2 = local
    int32_t src_cx, src_cy, dst_cx, dst_cy;
};

SimOutcome run_experiment(const SimConfig& cfg, const Params& p,
                          const std::vector<double>& node_reps,
                          const std::vector<double>& sbs_reps,
                          std::vector<TxRecord>* audit = nullptr);

// Mean distance from every node to the closest of `count` replica-holder
// nodes, for each entry of `counts`, plus the fitted log-log slope
// (expected near -1/2). Placement only; no routing.
std::vector<double> replica_distance_scan(const SimConfig& cfg,
                                          const std::vector<int64_t>& counts,
                                          double* slope);

} // namespace cachenet
