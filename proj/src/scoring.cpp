#include "nbweight/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "nbweight/csv.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/parallel.hpp"

namespace nbweight {

UncertaintyScore neighborhood_score(const Neighborhood& nb,
                                    std::span<const int> member_labels,
                                    int class_count) {
    const std::size_t k = nb.member_ids.size();
    if (member_labels.size() != k) throw DataError("neighborhood_score: labels/members length mismatch");
    if (k < 2) throw DataError("neighborhood_score: neighborhood needs at least 2 members");
    if (class_count < 2) throw DataError("neighborhood_score: class_count must be >= 2");
    for (const int label : member_labels) {
        if (label < 0 || label >= class_count) throw DataError("neighborhood_score: label out of range");
    }

    UncertaintyScore result;
    result.sample_id = nb.center_id;
    result.degenerate_neighborhood = nb.degenerate;

    std::vector<std::int64_t> counts(static_cast<std::size_t>(class_count), 0);
    std::vector<double> dist_sums(static_cast<std::size_t>(class_count), 0.0);
    counts[static_cast<std::size_t>(member_labels[0])]++;  // center: counted, no distance
    for (std::size_t i = 1; i < k; ++i) {
        counts[static_cast<std::size_t>(member_labels[i])]++;
        dist_sums[static_cast<std::size_t>(member_labels[i])] += nb.normalized_distances[i];
    }

    const int own = member_labels[0];
    if (counts[static_cast<std::size_t>(own)] == static_cast<std::int64_t>(k)) {
        // every member shares the center's label: entropy term vanishes
        result.score = 0.0;
        result.zero_denominator = true;
        return result;
    }
    if (counts[static_cast<std::size_t>(own)] == 1) {
        result.self_only_class = true;
        dist_sums[static_cast<std::size_t>(own)] = 1.0;
    }

    double denominator = 0.0;
    double own_term = 0.0;
    for (int c = 0; c < class_count; ++c) {
        const std::int64_t count = counts[static_cast<std::size_t>(c)];
        if (count == 0) continue;
        double dist_sum = dist_sums[static_cast<std::size_t>(c)];
        if (dist_sum == 0.0) dist_sum = kDegenerateDistanceEpsilon;  // coincident duplicates
        const double p = static_cast<double>(count) / static_cast<double>(k);
        const double term = p * std::log(p) * (static_cast<double>(count) / dist_sum);
        denominator += term;
        if (c == own) own_term = term;
    }

    // negatives cancel in the ratio; denominator != 0 because own count < k
    result.score = static_cast<double>(class_count) * own_term / denominator;
    return result;
}

std::vector<UncertaintyScore> score_dataset(const Dataset& data, int k, DistanceMetric metric,
                                            const std::unordered_set<SampleId>* exclude_ids,
                                            int jobs) {
    data.validate();

    std::vector<SampleId> kept;
    kept.reserve(static_cast<std::size_t>(data.size()));
    for (const SampleId id : data.ids) {
        if (exclude_ids && exclude_ids->count(id)) continue;
        kept.push_back(id);
    }
    if (static_cast<std::int64_t>(kept.size()) < k) {
        throw DataError("score_dataset: exclusion leaves " + std::to_string(kept.size()) +
                        " points, fewer than k = " + std::to_string(k));
    }

    const auto nbs = neighborhoods(data, k, metric, kept, jobs);
    const auto index = data.id_index();

    std::vector<UncertaintyScore> scores(nbs.size());
    parallel_for(static_cast<std::int64_t>(nbs.size()), jobs, [&](std::int64_t i) {
        const Neighborhood& nb = nbs[static_cast<std::size_t>(i)];
        std::vector<int> labels(nb.member_ids.size());
        for (std::size_t m = 0; m < nb.member_ids.size(); ++m) {
            labels[m] = data.labels[static_cast<std::size_t>(index.at(nb.member_ids[m]))];
        }
        scores[static_cast<std::size_t>(i)] = neighborhood_score(nb, labels, data.class_count);
    });
    return scores;
}

void write_scores_csv(const std::filesystem::path& path, const Dataset& data,
                      std::span<const UncertaintyScore> scores) {
    const auto index = data.id_index();
    std::vector<std::vector<std::string>> rows;
    rows.reserve(scores.size());
    for (const auto& s : scores) {
        const auto it = index.find(s.sample_id);
        if (it == index.end()) throw DataError("write_scores_csv: unknown sample id " + std::to_string(s.sample_id));
        const int label = data.labels[static_cast<std::size_t>(it->second)];
        rows.push_back({format_int(s.sample_id),
                        data.label_names[static_cast<std::size_t>(label)],
                        format_double(s.score),
                        s.zero_denominator ? "1" : "0",
                        s.self_only_class ? "1" : "0"});
    }
    write_csv(path, {"sample_id", "label", "score", "zero_denominator", "self_only_class"}, rows);
}

std::vector<UncertaintyScore> read_scores_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const int id_col = table.column("sample_id");
    const int score_col = table.column("score");
    if (id_col < 0 || score_col < 0) {
        throw DataError(path.string() + ": scores file needs sample_id and score columns");
    }
    const int zero_col = table.column("zero_denominator");
    const int self_col = table.column("self_only_class");

    std::vector<UncertaintyScore> scores;
    scores.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string context = path.string() + " row " + std::to_string(r + 2);
        UncertaintyScore s;
        s.sample_id = parse_int(row[static_cast<std::size_t>(id_col)], context);
        s.score = parse_double(row[static_cast<std::size_t>(score_col)], context);
        if (s.score < 0.0) throw DataError(context + ": negative score");
        if (zero_col >= 0) s.zero_denominator = row[static_cast<std::size_t>(zero_col)] == "1";
        if (self_col >= 0) s.self_only_class = row[static_cast<std::size_t>(self_col)] == "1";
        scores.push_back(s);
    }
    return scores;
}

void write_neighborhoods_csv(const std::filesystem::path& path,
                             std::span<const Neighborhood> neighborhoods) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& nb : neighborhoods) {
        for (std::size_t m = 0; m < nb.member_ids.size(); ++m) {
            rows.push_back({format_int(nb.center_id), format_int(static_cast<std::int64_t>(m)),
                            format_int(nb.member_ids[m]), format_double(nb.raw_distances[m]),
                            format_double(nb.normalized_distances[m])});
        }
    }
    write_csv(path, {"center_id", "rank", "member_id", "raw_distance", "normalized_distance"}, rows);
}

}  // namespace nbweight
