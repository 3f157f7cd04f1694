#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nbweight/dataset.hpp"

namespace nbweight {

enum class DistanceMetric { Euclidean, Cosine };

DistanceMetric parse_metric(const std::string& name);   // "euclidean" | "cosine"
std::string metric_name(DistanceMetric metric);

/// Euclidean distance or cosine distance 1 - u.v/(|u||v|), clamped at 0.
/// Cosine requires non-zero vectors (DataError otherwise).
double distance(std::span<const double> u, std::span<const double> v, DistanceMetric metric);

/**
 * k-nearest neighborhood of one sample, the sample itself included.
 * member_ids[0] is the center; the rest are ordered by (raw distance, id)
 * ascending. normalized_distances rescale raw ones so the nearest non-self
 * member sits at exactly 1; the center stays at 0. When the nearest non-self
 * distance is 0 (duplicate points) the divisor 1e-12 is used instead and
 * `degenerate` is set.
 */
struct Neighborhood {
    SampleId center_id = 0;
    std::vector<SampleId> member_ids;
    std::vector<double> raw_distances;
    std::vector<double> normalized_distances;
    bool degenerate = false;
};

/**
 * Brute-force k-NN over all samples (or over `candidates` ids when
 * non-empty; every center must itself be a candidate). Distance ties are
 * broken by ascending sample id, so the result does not depend on input
 * order or thread count. jobs: 1 = serial, 0 = all hardware threads.
 *
 * Requires 2 <= k <= number of candidate points.
 */
std::vector<Neighborhood> neighborhoods(const Dataset& data, int k, DistanceMetric metric,
                                        std::span<const SampleId> candidates = {},
                                        int jobs = 1);

/// Straightforward serial implementation (full distance matrix, full sort).
/// Kept as the reference the production kernel is tested and benchmarked
/// against; produces identical results.
std::vector<Neighborhood> neighborhoods_reference(const Dataset& data, int k,
                                                  DistanceMetric metric);

/// raw must be non-negative with raw[0] == 0 (the center) and at least one
/// non-self entry. Returns normalized distances and the degenerate flag.
std::pair<std::vector<double>, bool> normalize_distances(std::span<const double> raw);

/// Divisor used in place of a zero nearest-neighbor distance.
inline constexpr double kDegenerateDistanceEpsilon = 1e-12;

}  // namespace nbweight
