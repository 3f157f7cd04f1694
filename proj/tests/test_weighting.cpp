#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"
#include "nbweight/weighting.hpp"

using namespace nbweight;

namespace {

std::vector<UncertaintyScore> as_scores(const std::vector<double>& values) {
    std::vector<UncertaintyScore> scores;
    for (std::size_t i = 0; i < values.size(); ++i) {
        UncertaintyScore s;
        s.sample_id = static_cast<SampleId>(i);
        s.score = values[i];
        scores.push_back(s);
    }
    return scores;
}

}  // namespace

TEST_CASE("logistic midpoint and published-parameter values") {
    const WeightMapConfig cfg;  // defaults: alpha 4, beta 1.13, gamma 1.25, eta 0.25
    CHECK(logistic_weight(cfg.beta, cfg) == 0.875);  // eta + gamma/2, exact in binary
    CHECK(std::abs(logistic_weight(0.0, cfg) - 1.4865) < 1e-3);
    CHECK(logistic_weight(1e6, cfg) <= cfg.eta + 1e-12);
    CHECK_THROWS_AS(logistic_weight(-0.1, cfg), DataError);
}

TEST_CASE("logistic is strictly decreasing with range (eta, eta+gamma)") {
    Rng rng(31);
    for (int round = 0; round < 200; ++round) {
        WeightMapConfig cfg;
        cfg.alpha = 0.5 + 8.0 * rng.uniform();
        cfg.beta = 3.0 * rng.uniform();
        cfg.gamma = 0.2 + 2.0 * rng.uniform();
        cfg.eta = 2.0 * rng.uniform();
        // stay clear of the saturated tails where the double rounds to eta itself
        const double b_max = cfg.beta + 15.0 / cfg.alpha;
        double b1 = b_max * rng.uniform();
        double b2 = b_max * rng.uniform();
        if (b1 > b2) std::swap(b1, b2);
        if (b2 - b1 < 0.01) continue;
        const double w1 = logistic_weight(b1, cfg);
        const double w2 = logistic_weight(b2, cfg);
        CHECK(w1 > w2);
        for (const double w : {w1, w2}) {
            CHECK(w > cfg.eta);
            CHECK(w < cfg.eta + cfg.gamma);
        }
    }
}

TEST_CASE("config validation") {
    WeightMapConfig cfg;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = WeightMapConfig{};
    cfg.gamma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = WeightMapConfig{};
    cfg.eta = -0.1;
    CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("default beta is the median of the nonzero scores") {
    CHECK(default_beta(std::vector<double>{0.0, 0.5, 1.0, 2.0}) == 1.0);
    CHECK(default_beta(std::vector<double>{0.4, 0.6}) == 0.5);
    CHECK_THROWS_AS(default_beta(std::vector<double>{0.0, 0.0, 0.0}), DataError);
}

TEST_CASE("group split puts zeros in G0 and halves the rest by score") {
    const auto scores = as_scores({0.0, 0.0, 0.5, 0.9, 1.2, 2.0});
    const GroupSplit split = split_groups(scores);
    CHECK(split.g0_ids == std::vector<SampleId>{0, 1});
    CHECK(split.g1_ids == std::vector<SampleId>{2, 3});
    CHECK(split.g2_ids == std::vector<SampleId>{4, 5});
}

TEST_CASE("odd nonzero count leaves the extra element in G1") {
    const auto scores = as_scores({0.0, 0.3, 0.8, 1.5, 2.0, 2.5});
    const GroupSplit split = split_groups(scores);
    CHECK(split.g1_ids.size() == 3);
    CHECK(split.g2_ids.size() == 2);
}

TEST_CASE("equal nonzero scores split by id order") {
    const auto scores = as_scores({1.0, 1.0, 1.0, 1.0});
    const GroupSplit split = split_groups(scores);
    CHECK(split.g0_ids.empty());
    CHECK(split.g1_ids == std::vector<SampleId>{0, 1});
    CHECK(split.g2_ids == std::vector<SampleId>{2, 3});
}

TEST_CASE("split needs at least two nonzero scores") {
    CHECK_THROWS_AS(split_groups(as_scores({0.0, 0.0, 1.0})), DataError);
}

TEST_CASE("split order is independent of input order") {
    auto scores = as_scores({0.0, 0.7, 0.2, 1.4, 0.0, 0.9});
    const GroupSplit forward = split_groups(scores);
    std::reverse(scores.begin(), scores.end());
    const GroupSplit reversed = split_groups(scores);
    CHECK(forward.g0_ids == reversed.g0_ids);
    CHECK(forward.g1_ids == reversed.g1_ids);
    CHECK(forward.g2_ids == reversed.g2_ids);
}

TEST_CASE("group weights map every id to its group's value") {
    const auto scores = as_scores({0.0, 0.0, 0.5, 0.9, 1.2, 2.0});
    const GroupSplit split = split_groups(scores);
    const auto best = group_weights(split, {1.5, 0.6, 0.25});
    CHECK(best.at(0) == 1.5);
    CHECK(best.at(3) == 0.6);
    CHECK(best.at(5) == 0.25);

    const auto uniform = group_weights(split, {1.0, 1.0, 1.0});
    for (const auto& [id, w] : uniform) CHECK(w == 1.0);

    const auto worst = group_weights(split, {0.25, 0.25, 2.0});
    CHECK(worst.at(1) == 0.25);
    CHECK(worst.at(2) == 0.25);
    CHECK(worst.at(4) == 2.0);

    CHECK_THROWS_AS(group_weights(split, {0.0, 1.0, 1.0}), DataError);
}

TEST_CASE("random groups form a deterministic partition of the given sizes") {
    const std::vector<SampleId> ids{10, 11, 12, 13, 14, 15, 16};
    const GroupSplit a = random_groups({2, 3, 2}, ids, 77);
    const GroupSplit b = random_groups({2, 3, 2}, ids, 77);
    CHECK(a.g0_ids == b.g0_ids);
    CHECK(a.g1_ids == b.g1_ids);
    CHECK(a.g2_ids == b.g2_ids);
    CHECK(a.g0_ids.size() == 2);
    CHECK(a.g1_ids.size() == 3);
    CHECK(a.g2_ids.size() == 2);

    std::unordered_set<SampleId> seen;
    for (const auto* group : {&a.g0_ids, &a.g1_ids, &a.g2_ids}) {
        for (const auto id : *group) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == ids.size());

    const GroupSplit all = random_groups({7, 0, 0}, ids, 3);
    CHECK(all.g0_ids.size() == 7);
    CHECK(all.g1_ids.empty());

    CHECK_THROWS_AS(random_groups({1, 1, 1}, ids, 3), DataError);
}

TEST_CASE("default grid carries the five candidate weights") {
    CHECK(kDefaultWeightGrid == std::array<double, 5>{0.25, 0.6, 1.0, 1.5, 2.0});
}
