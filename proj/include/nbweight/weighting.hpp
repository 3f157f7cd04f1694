#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "nbweight/scoring.hpp"

namespace nbweight {

/**
 * Parameters of the decreasing logistic that maps uncertainty scores to
 * sample weights:
 *
 *     g(b) = gamma / (1 + exp(-alpha * (-b + beta))) + eta
 *
 * g is strictly decreasing with range (eta, eta + gamma); g(beta) is exactly
 * eta + gamma/2. The defaults keep certain samples (b = 0) near weight 1.49
 * and push highly uncertain ones toward the 0.25 floor.
 */
struct WeightMapConfig {
    double alpha = 4.0;    // steepness, > 0
    double beta = 1.13;    // score at the midpoint
    double gamma = 1.25;   // weight range, > 0
    double eta = 0.25;     // weight floor, >= 0

    void validate() const;  // throws DataError
};

double logistic_weight(double score, const WeightMapConfig& cfg);

/// Midpoint heuristic: median of the strictly positive scores (mean of the
/// two middle values for even counts). Throws DataError when no positive
/// scores exist.
double default_beta(std::span<const double> scores);

/**
 * Score-ordered three-way split. G0 holds the zero scores. The nonzero
 * scores, ordered by (score, id) ascending, are halved: lower half G1,
 * upper half G2; an odd count puts the extra element in G1. The (score, id)
 * order is total, so equal scores around the cut stay on a deterministic
 * side. Requires at least 2 nonzero scores.
 */
struct GroupSplit {
    std::vector<SampleId> g0_ids;
    std::vector<SampleId> g1_ids;
    std::vector<SampleId> g2_ids;

    std::array<std::int64_t, 3> sizes() const {
        return {static_cast<std::int64_t>(g0_ids.size()), static_cast<std::int64_t>(g1_ids.size()),
                static_cast<std::int64_t>(g2_ids.size())};
    }
};

GroupSplit split_groups(std::span<const UncertaintyScore> scores);

/// id -> weight map giving every member of G0/G1/G2 the corresponding value.
/// Weights must be > 0.
std::unordered_map<SampleId, double> group_weights(const GroupSplit& split,
                                                   const std::array<double, 3>& weights);

/// Uniformly random partition of ids into groups of the given sizes
/// (control condition for the grouped weighting). Deterministic per seed.
GroupSplit random_groups(const std::array<std::int64_t, 3>& sizes,
                         std::span<const SampleId> ids, std::uint64_t seed);

/// Candidate group weights used by the grid-search experiment.
inline constexpr std::array<double, 5> kDefaultWeightGrid{0.25, 0.6, 1.0, 1.5, 2.0};

}  // namespace nbweight
