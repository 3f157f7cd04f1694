#include "nbweight/weighting.hpp"

#include <algorithm>
#include <cmath>

#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"

namespace nbweight {

void WeightMapConfig::validate() const {
    if (!(alpha > 0.0)) throw DataError("weight map: alpha must be > 0");
    if (!(gamma > 0.0)) throw DataError("weight map: gamma must be > 0");
    if (!(eta >= 0.0)) throw DataError("weight map: eta must be >= 0");
    if (!std::isfinite(beta)) throw DataError("weight map: beta must be finite");
}

double logistic_weight(double score, const WeightMapConfig& cfg) {
    if (!(score >= 0.0)) throw DataError("logistic_weight: score must be >= 0");
    // exp overflow saturates to +inf, which correctly drives the term to 0
    return cfg.gamma / (1.0 + std::exp(-cfg.alpha * (-score + cfg.beta))) + cfg.eta;
}

double default_beta(std::span<const double> scores) {
    std::vector<double> positive;
    for (const double s : scores) {
        if (s > 0.0) positive.push_back(s);
    }
    if (positive.empty()) throw DataError("default_beta: no strictly positive scores");
    std::sort(positive.begin(), positive.end());
    const std::size_t m = positive.size();
    if (m % 2 == 1) return positive[m / 2];
    return 0.5 * (positive[m / 2 - 1] + positive[m / 2]);
}

GroupSplit split_groups(std::span<const UncertaintyScore> scores) {
    GroupSplit split;
    std::vector<std::pair<double, SampleId>> nonzero;
    for (const auto& s : scores) {
        if (s.score < 0.0) throw DataError("split_groups: negative score");
        if (s.score == 0.0) {
            split.g0_ids.push_back(s.sample_id);
        } else {
            nonzero.emplace_back(s.score, s.sample_id);
        }
    }
    if (nonzero.size() < 2) {
        throw DataError("split_groups: need at least 2 nonzero scores, got " +
                        std::to_string(nonzero.size()));
    }
    std::sort(split.g0_ids.begin(), split.g0_ids.end());  // canonical order, input-order agnostic
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t g1_count = (nonzero.size() + 1) / 2;  // odd count: extra element in G1
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        (i < g1_count ? split.g1_ids : split.g2_ids).push_back(nonzero[i].second);
    }
    return split;
}

std::unordered_map<SampleId, double> group_weights(const GroupSplit& split,
                                                   const std::array<double, 3>& weights) {
    for (const double w : weights) {
        if (!(w > 0.0)) throw DataError("group_weights: weights must be > 0");
    }
    std::unordered_map<SampleId, double> map;
    map.reserve(split.g0_ids.size() + split.g1_ids.size() + split.g2_ids.size());
    for (const SampleId id : split.g0_ids) map.emplace(id, weights[0]);
    for (const SampleId id : split.g1_ids) map.emplace(id, weights[1]);
    for (const SampleId id : split.g2_ids) map.emplace(id, weights[2]);
    return map;
}

GroupSplit random_groups(const std::array<std::int64_t, 3>& sizes,
                         std::span<const SampleId> ids, std::uint64_t seed) {
    const std::int64_t total = sizes[0] + sizes[1] + sizes[2];
    if (total != static_cast<std::int64_t>(ids.size())) {
        throw DataError("random_groups: sizes sum to " + std::to_string(total) + " but " +
                        std::to_string(ids.size()) + " ids were given");
    }
    std::vector<SampleId> shuffled(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(shuffled);

    GroupSplit split;
    auto it = shuffled.begin();
    split.g0_ids.assign(it, it + sizes[0]);
    it += sizes[0];
    split.g1_ids.assign(it, it + sizes[1]);
    it += sizes[1];
    split.g2_ids.assign(it, it + sizes[2]);
    return split;
}

}  // namespace nbweight
