// Zipf popularity: P(rank m) = m^-alpha / H(alpha, M).
#pragma once

#include <cstdint>
#include <vector>

namespace cachenet {

enum class Growth { constant, logarithmic, polynomial };

// Generalized harmonic number sum_{i=1..M} i^-alpha, summed from the
// smallest terms up (i = M down to 1) so the head terms do not swamp the
// tail in the accumulator.
double zipf_harmonic(double alpha, int64_t catalog);

// P(rank), rank in [1, catalog].
double zipf_pmf(double alpha, int64_t catalog, int64_t rank);

// Full pmf, index m-1 holds P(rank m).
std::vector<double> zipf_pmf_all(double alpha, int64_t catalog);

// How H(alpha, M) grows with M; for the polynomial class *exponent gets
// 1 - alpha, otherwise 0.
Growth zipf_growth(double alpha, double* exponent);

} // namespace cachenet
