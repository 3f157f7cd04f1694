#pragma once

// Independent re-implementation of the neighborhood uncertainty score, kept
// deliberately plain: long double accumulation, log base 2 (the ratio is
// base-invariant, so agreement also demonstrates that), and direct loops
// over the members. The production scorer is tested against this.

#include <cmath>
#include <span>
#include <vector>

#include "nbweight/knn.hpp"

struct ReferenceScore {
    long double score = 0.0L;
    bool zero_denominator = false;
    bool self_only_class = false;
};

// labels[i] belongs to member i; member 0 is the center. normalized[i] is
// the center-relative normalized distance of member i (normalized[0] == 0).
inline ReferenceScore reference_score(std::span<const int> labels,
                                      std::span<const double> normalized, int class_count) {
    const int k = static_cast<int>(labels.size());
    const int own = labels[0];

    std::vector<int> count(static_cast<std::size_t>(class_count), 0);
    std::vector<long double> dist_sum(static_cast<std::size_t>(class_count), 0.0L);
    count[static_cast<std::size_t>(own)] += 1;  // center counts, contributes no distance
    for (int i = 1; i < k; ++i) {
        count[static_cast<std::size_t>(labels[i])] += 1;
        dist_sum[static_cast<std::size_t>(labels[i])] +=
            static_cast<long double>(normalized[static_cast<std::size_t>(i)]);
    }

    ReferenceScore out;
    std::vector<long double> term(static_cast<std::size_t>(class_count), 0.0L);
    for (int j = 0; j < class_count; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (count[ju] == 0) continue;  // 0 * log 0 := 0
        long double dsum = dist_sum[ju];
        if (j == own && count[ju] == 1) {
            dsum = 1.0L;  // the center is its class's only member
            out.self_only_class = true;
        }
        if (dsum == 0.0L) dsum = 1e-12L;  // duplicate points collapsed onto the center
        const long double p = static_cast<long double>(count[ju]) / k;
        term[ju] = p * std::log2(p) * (static_cast<long double>(count[ju]) / dsum);
    }

    long double denominator = 0.0L;
    for (const long double t : term) denominator += t;
    if (denominator == 0.0L) {
        out.zero_denominator = true;
        out.score = 0.0L;
        return out;
    }
    out.score = static_cast<long double>(class_count) * term[static_cast<std::size_t>(own)] /
                denominator;
    return out;
}

// Convenience overload running against a production Neighborhood.
inline ReferenceScore reference_score(const nbweight::Neighborhood& nb,
                                      std::span<const int> member_labels, int class_count) {
    return reference_score(member_labels,
                           std::span<const double>(nb.normalized_distances.data(),
                                                   nb.normalized_distances.size()),
                           class_count);
}
