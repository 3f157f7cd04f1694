#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nbweight/matrix.hpp"

namespace nbweight {

/**
 * In-memory classification dataset.
 *
 * Labels are dense integers in [0, class_count); the original label text is
 * kept in label_names (index -> text) so reports can show the source labels.
 * Every sample carries a stable id; all pipeline files (scores, weights) are
 * keyed by these ids rather than row positions.
 */
struct Dataset {
    Matrix features;                        // n x d
    std::vector<int> labels;                // n, values in [0, class_count)
    int class_count = 0;
    std::vector<SampleId> ids;              // n, unique
    std::vector<std::string> label_names;   // class_count entries
    std::vector<std::string> feature_names; // d entries

    std::int64_t size() const { return features.rows; }
    std::int64_t dim() const { return features.cols; }

    /// Checks the structural invariants; throws DataError on violation.
    void validate() const;

    /// id -> row index
    std::unordered_map<SampleId, std::int64_t> id_index() const;
};

struct LoadOptions {
    std::string id_column = "id";        // used when present; otherwise row order
    std::optional<int> class_count;      // force a class count larger than observed
};

/**
 * Loads a CSV dataset. The header row is required; every column except the
 * label column (and the id column, when present) is parsed as a numeric
 * feature. Labels are re-encoded to [0, C) in first-appearance order.
 *
 * Throws DataError for: missing file, non-numeric or non-finite feature
 * cells, absent label column, fewer than 2 distinct labels, duplicate ids,
 * or a forced class_count smaller than the number of distinct labels.
 */
Dataset load_csv(const std::filesystem::path& path,
                 const std::string& label_column,
                 const LoadOptions& options = {});

/// Writes id, feature..., label columns; reloading reproduces the dataset.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column = "label");

/// Rows for the given ids, in the given order. Unknown ids throw DataError.
Dataset subset(const Dataset& data, std::span<const SampleId> keep_ids);

/// Per-row weight vector from an id-keyed map; missing ids throw DataError.
std::vector<double> align_weights(const Dataset& data,
                                  const std::unordered_map<SampleId, double>& by_id);

enum class PointStatus { Informative, Uncertain };

/**
 * Classifies one sample against the true posterior at its location: the
 * observed label is Informative if it attains the posterior maximum (any
 * arg-max label counts), Uncertain otherwise.
 *
 * posterior must sum to 1 within 1e-9 and label must be a valid index.
 */
PointStatus point_status(std::span<const double> posterior, int label);

}  // namespace nbweight
