#pragma once

// Randomized neighborhood fixtures shared by the unit and acceptance suites.
// Shapes mirror what the k-NN stage emits: member 0 is the center with
// distance 0; other members carry normalized distances >= 1, except for
// injected duplicate members sitting at exactly 0.

#include <vector>

#include "nbweight/knn.hpp"
#include "nbweight/rng.hpp"

struct NeighborhoodFixture {
    nbweight::Neighborhood nb;
    std::vector<int> labels;
    int class_count = 2;
};

inline NeighborhoodFixture random_neighborhood(nbweight::Rng& rng, bool allow_duplicates = true) {
    NeighborhoodFixture out;
    out.class_count = 2 + static_cast<int>(rng.below(4));  // 2..5
    const int k = 3 + static_cast<int>(rng.below(10));     // 3..12

    out.labels.resize(static_cast<std::size_t>(k));
    for (auto& label : out.labels) label = static_cast<int>(rng.below(out.class_count));

    out.nb.center_id = 0;
    out.nb.member_ids.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out.nb.member_ids[static_cast<std::size_t>(i)] = i;
    out.nb.raw_distances.assign(static_cast<std::size_t>(k), 0.0);
    out.nb.normalized_distances.assign(static_cast<std::size_t>(k), 0.0);

    for (int i = 1; i < k; ++i) {
        double d = 1.0 + 5.0 * rng.uniform();
        if (i == 1) d = 1.0;  // nearest non-self member anchors the scale
        if (allow_duplicates && rng.below(10) == 0) {
            d = 0.0;  // coincident duplicate
            out.nb.degenerate = true;
        }
        out.nb.normalized_distances[static_cast<std::size_t>(i)] = d;
        out.nb.raw_distances[static_cast<std::size_t>(i)] = d;
    }
    return out;
}
