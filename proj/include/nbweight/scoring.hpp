#pragma once

#include <filesystem>
#include <span>
#include <unordered_set>
#include <vector>

#include "nbweight/knn.hpp"

namespace nbweight {

struct UncertaintyScore {
    SampleId sample_id = 0;
    double score = 0.0;
    bool zero_denominator = false;       // homogeneous neighborhood, score fixed at 0
    bool self_only_class = false;        // center is its class's only member
    bool degenerate_neighborhood = false;  // duplicate-point distance normalization
};

/**
 * Label-uncertainty score of one neighborhood from the class entropy of its
 * members, each class term weighted by its inverse average normalized
 * distance from the center:
 *
 *     b = C * e_y / (sum over classes j of e_j),
 *     e_j = (k_j / k) * log(k_j / k) * (k_j / sum_d_j)
 *
 * where k is the neighborhood size (center included), k_j the number of
 * members with class j (the center counts toward its own class), and
 * sum_d_j the sum of normalized distances to the class-j members other than
 * the center. Conventions, chosen so the score is total and finite:
 *   - 0 * log 0 terms are 0 (absent classes contribute nothing);
 *   - a homogeneous neighborhood (every member shares the center's class)
 *     makes the denominator 0; the score is then defined as 0 and
 *     zero_denominator is set;
 *   - when the center is its class's only member, sum_d_y would be 0; the
 *     divisor 1 is substituted and self_only_class is set;
 *   - a zero distance sum caused by duplicate points falls back to the
 *     1e-12 divisor, and the neighborhood's degenerate flag is carried over.
 *
 * The score is invariant to the logarithm base (it cancels in the ratio).
 * Scores are >= 0, 0 exactly for homogeneous neighborhoods, and 1 exactly
 * when every class holds one member at equal distance.
 *
 * member_labels must align with nb.member_ids; labels outside
 * [0, class_count) throw DataError.
 */
UncertaintyScore neighborhood_score(const Neighborhood& nb,
                                    std::span<const int> member_labels,
                                    int class_count);

/**
 * Scores every non-excluded sample using k-nearest neighborhoods drawn from
 * the non-excluded samples only; excluded ids never appear as neighbors and
 * receive no score. Throws DataError if the exclusion leaves fewer than k
 * points. jobs: 1 = serial, 0 = all hardware threads.
 */
std::vector<UncertaintyScore> score_dataset(const Dataset& data, int k, DistanceMetric metric,
                                            const std::unordered_set<SampleId>* exclude_ids = nullptr,
                                            int jobs = 1);

/// CSV columns: sample_id, label, score, zero_denominator, self_only_class.
void write_scores_csv(const std::filesystem::path& path, const Dataset& data,
                      std::span<const UncertaintyScore> scores);

/// Reads sample_id and score columns back (flags when present).
std::vector<UncertaintyScore> read_scores_csv(const std::filesystem::path& path);

/// Diagnostic dump: center_id, rank, member_id, raw_distance, normalized_distance.
void write_neighborhoods_csv(const std::filesystem::path& path,
                             std::span<const Neighborhood> neighborhoods);

}  // namespace nbweight
