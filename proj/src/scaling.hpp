// Closed-form asymptotics for the placement problem when the instance
// grows with n: catalog M = Theta(n^gamma), SBS count f = Theta(n^delta),
// per-SBS cache Theta(n^beta). Everything here is an exponent computation;
// absolute constants are out of scope except for fit_scale, which fits the
// single multiplicative constant to finite-n data.
#pragma once

#include <cstdint>
#include <vector>

#include "params.hpp"

namespace cachenet {

enum class Regime { heavy, moderate, flat }; // alpha >= 3/2, middle, low

struct RegimeReport {
    Regime regime = Regime::heavy;
    double b = 0.0;              // delay-throughput scaling exponent
    double case_boundary = 0.0;  // single power law vs three-piece
    double regime_boundary = 0.0; // moderate/flat split
    double m1_exponent = 0.0;
    double m2_exponent = 0.0;
    double m4_exponent = 0.0;
};

RegimeReport classify_regime(const Params& p);

// One piece of a piecewise power law Theta(m^m_exponent * n^n_exponent),
// valid for ranks m in [n^lo_exponent, n^hi_exponent).
struct PowerPiece {
    double lo_exponent = 0.0;
    double hi_exponent = 0.0;
    double m_exponent = 0.0;
    double n_exponent = 0.0;
};

// Order of the optimal totals A*+B*. Requires alpha < 3/2.
std::vector<PowerPiece> joint_asymptotics(const Params& p);

// Per-side orders: node replicas live on the prefix only; SBS replicas
// are at the SBS-count order up to the m2 boundary and follow the tail
// law beyond. Ranks past the last returned piece carry zero (node side).
void split_asymptotics(const Params& p, std::vector<PowerPiece>& node_side,
                       std::vector<PowerPiece>& sbs_side);

// Order of the separately-optimized baseline totals. Requires alpha < 3/2.
std::vector<PowerPiece> baseline_asymptotics(const Params& p);

enum class CompareVerdict { equal_order, joint_wins };

// Joint vs baseline objective order for alpha < 3/2; *threshold receives
// the alpha value separating the verdicts.
CompareVerdict compare_strategies(const Params& p, double* threshold);

// Delay-throughput trade-off: b, and the exponent of the throughput upper
// bound (-b/2 up to an arbitrarily small epsilon; -1/2 with an elided log
// factor when alpha >= 3/2).
void tradeoff_exponents(const Params& p, double* b, double* throughput_exp);

// Least-squares fit (in log space) of the single scale constant of
// `curve` against samples (rank, value) taken at a given finite n.
// Samples outside every piece's rank window are ignored.
double fit_scale(const std::vector<PowerPiece>& curve, double n,
                 const std::vector<int64_t>& ranks,
                 const std::vector<double>& values);

} // namespace cachenet
