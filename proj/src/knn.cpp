#include "nbweight/knn.hpp"

#include <algorithm>
#include <cmath>

#include "nbweight/errors.hpp"
#include "nbweight/parallel.hpp"

namespace nbweight {

namespace {

double euclidean(std::span<const double> u, std::span<const double> v) {
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double diff = u[i] - v[i];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

double norm(std::span<const double> u) {
    double sq = 0.0;
    for (const double x : u) sq += x * x;
    return std::sqrt(sq);
}

double cosine(std::span<const double> u, std::span<const double> v, double nu, double nv) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    // rounding can push 1 - cos slightly negative for near-parallel vectors
    return std::max(0.0, 1.0 - dot / (nu * nv));
}

struct Candidates {
    std::vector<std::int64_t> rows;       // row indices into the dataset
    std::vector<double> norms;            // row norms, cosine only
};

Candidates collect_candidates(const Dataset& data, DistanceMetric metric,
                              std::span<const SampleId> candidate_ids) {
    Candidates c;
    if (candidate_ids.empty()) {
        c.rows.resize(static_cast<std::size_t>(data.size()));
        for (std::int64_t i = 0; i < data.size(); ++i) c.rows[static_cast<std::size_t>(i)] = i;
    } else {
        const auto index = data.id_index();
        c.rows.reserve(candidate_ids.size());
        for (const SampleId id : candidate_ids) {
            const auto it = index.find(id);
            if (it == index.end()) throw DataError("neighborhoods: unknown candidate id " + std::to_string(id));
            c.rows.push_back(it->second);
        }
    }
    if (metric == DistanceMetric::Cosine) {
        c.norms.resize(c.rows.size());
        for (std::size_t i = 0; i < c.rows.size(); ++i) {
            c.norms[i] = norm(data.features.row(c.rows[i]));
            if (c.norms[i] == 0.0) {
                throw DataError("cosine distance undefined for zero vector (sample id " +
                                std::to_string(data.ids[static_cast<std::size_t>(c.rows[i])]) + ")");
            }
        }
    }
    return c;
}

Neighborhood finish_neighborhood(const Dataset& data, std::int64_t center_row,
                                 std::vector<std::pair<double, std::int64_t>>& nearest) {
    Neighborhood nb;
    nb.center_id = data.ids[static_cast<std::size_t>(center_row)];
    nb.member_ids.reserve(nearest.size() + 1);
    nb.raw_distances.reserve(nearest.size() + 1);
    nb.member_ids.push_back(nb.center_id);
    nb.raw_distances.push_back(0.0);
    for (const auto& [dist, row] : nearest) {
        nb.member_ids.push_back(data.ids[static_cast<std::size_t>(row)]);
        nb.raw_distances.push_back(dist);
    }
    auto [normalized, degenerate] = normalize_distances(nb.raw_distances);
    nb.normalized_distances = std::move(normalized);
    nb.degenerate = degenerate;
    return nb;
}

}  // namespace

DistanceMetric parse_metric(const std::string& name) {
    if (name == "euclidean") return DistanceMetric::Euclidean;
    if (name == "cosine") return DistanceMetric::Cosine;
    throw DataError("unknown distance metric: '" + name + "'");
}

std::string metric_name(DistanceMetric metric) {
    return metric == DistanceMetric::Euclidean ? "euclidean" : "cosine";
}

double distance(std::span<const double> u, std::span<const double> v, DistanceMetric metric) {
    if (u.size() != v.size()) throw DataError("distance: dimension mismatch");
    if (metric == DistanceMetric::Euclidean) return euclidean(u, v);
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw DataError("cosine distance undefined for zero vector");
    return cosine(u, v, nu, nv);
}

std::vector<Neighborhood> neighborhoods(const Dataset& data, int k, DistanceMetric metric,
                                        std::span<const SampleId> candidate_ids, int jobs) {
    data.validate();
    const Candidates cand = collect_candidates(data, metric, candidate_ids);
    const std::int64_t m = static_cast<std::int64_t>(cand.rows.size());
    if (k < 2 || k > m) {
        throw DataError("neighborhoods: k must be in [2, " + std::to_string(m) + "], got " +
                        std::to_string(k));
    }

    std::vector<Neighborhood> result(static_cast<std::size_t>(m));
    parallel_for(m, jobs, [&](std::int64_t ci) {
        const std::int64_t center_row = cand.rows[static_cast<std::size_t>(ci)];
        const auto center = data.features.row(center_row);

        // (distance, id) keyed selection; the id tiebreak makes the order total
        std::vector<std::pair<double, std::int64_t>> dists;
        dists.reserve(static_cast<std::size_t>(m - 1));
        for (std::int64_t cj = 0; cj < m; ++cj) {
            if (cj == ci) continue;
            const std::int64_t row = cand.rows[static_cast<std::size_t>(cj)];
            const double dist =
                metric == DistanceMetric::Euclidean
                    ? euclidean(center, data.features.row(row))
                    : cosine(center, data.features.row(row), cand.norms[static_cast<std::size_t>(ci)],
                             cand.norms[static_cast<std::size_t>(cj)]);
            dists.emplace_back(dist, row);
        }
        const auto cmp = [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return data.ids[static_cast<std::size_t>(a.second)] < data.ids[static_cast<std::size_t>(b.second)];
        };
        const std::size_t take = static_cast<std::size_t>(k - 1);
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(take - 1), dists.end(), cmp);
        dists.resize(take);
        std::sort(dists.begin(), dists.end(), cmp);

        result[static_cast<std::size_t>(ci)] = finish_neighborhood(data, center_row, dists);
    });
    return result;
}

std::vector<Neighborhood> neighborhoods_reference(const Dataset& data, int k,
                                                  DistanceMetric metric) {
    data.validate();
    const std::int64_t n = data.size();
    if (k < 2 || k > n) {
        throw DataError("neighborhoods: k must be in [2, " + std::to_string(n) + "], got " +
                        std::to_string(k));
    }

    std::vector<Neighborhood> result;
    result.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::int64_t>> dists;
        for (std::int64_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.emplace_back(distance(data.features.row(i), data.features.row(j), metric), j);
        }
        std::sort(dists.begin(), dists.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return data.ids[static_cast<std::size_t>(a.second)] < data.ids[static_cast<std::size_t>(b.second)];
        });
        dists.resize(static_cast<std::size_t>(k - 1));
        result.push_back(finish_neighborhood(data, i, dists));
    }
    return result;
}

std::pair<std::vector<double>, bool> normalize_distances(std::span<const double> raw) {
    if (raw.size() < 2) throw DataError("normalize_distances: need at least one non-self entry");
    if (raw[0] != 0.0) throw DataError("normalize_distances: first entry must be the center (0)");
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (!(raw[i] >= 0.0) || !std::isfinite(raw[i])) {
            throw DataError("normalize_distances: distances must be finite and non-negative");
        }
        nearest = std::min(nearest, raw[i]);
    }
    const bool degenerate = nearest == 0.0;
    const double divisor = degenerate ? kDegenerateDistanceEpsilon : nearest;
    std::vector<double> normalized(raw.size());
    normalized[0] = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i) normalized[i] = raw[i] / divisor;
    return {std::move(normalized), degenerate};
}

}  // namespace nbweight
