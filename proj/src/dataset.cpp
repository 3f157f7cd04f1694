#include "nbweight/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "nbweight/csv.hpp"
#include "nbweight/errors.hpp"

namespace nbweight {

void Dataset::validate() const {
    const auto n = size();
    if (static_cast<std::int64_t>(labels.size()) != n) throw DataError("dataset: labels/features length mismatch");
    if (static_cast<std::int64_t>(ids.size()) != n) throw DataError("dataset: ids/features length mismatch");
    if (class_count < 2) throw DataError("dataset: fewer than 2 classes");
    for (const int label : labels) {
        if (label < 0 || label >= class_count) throw DataError("dataset: label out of range");
    }
    for (const double v : features.values) {
        if (!std::isfinite(v)) throw DataError("dataset: non-finite feature");
    }
    std::unordered_set<SampleId> seen;
    for (const SampleId id : ids) {
        if (!seen.insert(id).second) throw DataError("dataset: duplicate sample id");
    }
}

std::unordered_map<SampleId, std::int64_t> Dataset::id_index() const {
    std::unordered_map<SampleId, std::int64_t> index;
    index.reserve(ids.size());
    for (std::int64_t i = 0; i < size(); ++i) index.emplace(ids[i], i);
    return index;
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::string& label_column,
                 const LoadOptions& options) {
    const CsvTable table = read_csv(path);

    const int label_col = table.column(label_column);
    if (label_col < 0) throw DataError(path.string() + ": label column '" + label_column + "' not found");
    const int id_col = options.id_column.empty() ? -1 : table.column(options.id_column);

    Dataset data;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<int>(c) == label_col || static_cast<int>(c) == id_col) continue;
        data.feature_names.push_back(table.header[c]);
    }
    const std::int64_t n = static_cast<std::int64_t>(table.rows.size());
    const std::int64_t d = static_cast<std::int64_t>(data.feature_names.size());
    if (n == 0) throw DataError(path.string() + ": no data rows");
    if (d == 0) throw DataError(path.string() + ": no feature columns");

    data.features = Matrix(n, d);
    data.labels.resize(static_cast<std::size_t>(n));
    data.ids.resize(static_cast<std::size_t>(n));

    std::unordered_map<std::string, int> label_codes;
    for (std::int64_t r = 0; r < n; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        const std::string context = path.string() + " row " + std::to_string(r + 2);
        std::int64_t f = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (static_cast<int>(c) == label_col || static_cast<int>(c) == id_col) continue;
            data.features.at(r, f++) =
                parse_double(row[c], context + " column '" + table.header[c] + "'");
        }
        const std::string& label_text = row[static_cast<std::size_t>(label_col)];
        auto [it, inserted] = label_codes.emplace(label_text, static_cast<int>(label_codes.size()));
        if (inserted) data.label_names.push_back(label_text);
        data.labels[static_cast<std::size_t>(r)] = it->second;
        data.ids[static_cast<std::size_t>(r)] =
            id_col >= 0 ? parse_int(row[static_cast<std::size_t>(id_col)], context + " id") : r;
    }

    const int distinct = static_cast<int>(label_codes.size());
    if (distinct < 2) throw DataError(path.string() + ": fewer than 2 distinct labels");
    data.class_count = distinct;
    if (options.class_count) {
        if (*options.class_count < distinct) {
            throw DataError(path.string() + ": class_count " + std::to_string(*options.class_count) +
                            " smaller than " + std::to_string(distinct) + " distinct labels");
        }
        data.class_count = *options.class_count;
        while (static_cast<int>(data.label_names.size()) < data.class_count) {
            data.label_names.push_back(std::to_string(data.label_names.size()));
        }
    }

    data.validate();
    return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column) {
    std::vector<std::string> header;
    header.push_back("id");
    for (const auto& name : data.feature_names) header.push_back(name);
    if (data.feature_names.empty()) {
        for (std::int64_t f = 0; f < data.dim(); ++f) header.push_back("x" + std::to_string(f));
    }
    header.push_back(label_column);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(data.size()));
    for (std::int64_t r = 0; r < data.size(); ++r) {
        std::vector<std::string> row;
        row.push_back(format_int(data.ids[static_cast<std::size_t>(r)]));
        for (std::int64_t f = 0; f < data.dim(); ++f) row.push_back(format_double(data.features.at(r, f)));
        const int label = data.labels[static_cast<std::size_t>(r)];
        row.push_back(label < static_cast<int>(data.label_names.size())
                          ? data.label_names[static_cast<std::size_t>(label)]
                          : std::to_string(label));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

Dataset subset(const Dataset& data, std::span<const SampleId> keep_ids) {
    const auto index = data.id_index();
    Dataset out;
    out.class_count = data.class_count;
    out.label_names = data.label_names;
    out.feature_names = data.feature_names;
    out.features = Matrix(static_cast<std::int64_t>(keep_ids.size()), data.dim());
    out.labels.resize(keep_ids.size());
    out.ids.resize(keep_ids.size());
    for (std::size_t i = 0; i < keep_ids.size(); ++i) {
        const auto it = index.find(keep_ids[i]);
        if (it == index.end()) throw DataError("subset: unknown sample id " + std::to_string(keep_ids[i]));
        const std::int64_t r = it->second;
        std::copy_n(data.features.row(r).data(), data.dim(),
                    out.features.row(static_cast<std::int64_t>(i)).data());
        out.labels[i] = data.labels[static_cast<std::size_t>(r)];
        out.ids[i] = keep_ids[i];
    }
    return out;
}

std::vector<double> align_weights(const Dataset& data,
                                  const std::unordered_map<SampleId, double>& by_id) {
    std::vector<double> weights(static_cast<std::size_t>(data.size()));
    for (std::int64_t r = 0; r < data.size(); ++r) {
        const auto it = by_id.find(data.ids[static_cast<std::size_t>(r)]);
        if (it == by_id.end()) {
            throw DataError("weights missing for sample id " +
                            std::to_string(data.ids[static_cast<std::size_t>(r)]));
        }
        weights[static_cast<std::size_t>(r)] = it->second;
    }
    return weights;
}

PointStatus point_status(std::span<const double> posterior, int label) {
    if (posterior.empty()) throw DataError("point_status: empty posterior");
    if (label < 0 || label >= static_cast<int>(posterior.size())) {
        throw DataError("point_status: label out of range");
    }
    double sum = 0.0;
    for (const double p : posterior) {
        if (!std::isfinite(p) || p < 0.0) throw DataError("point_status: invalid posterior entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("point_status: posterior does not sum to 1");
    const double top = *std::max_element(posterior.begin(), posterior.end());
    return posterior[static_cast<std::size_t>(label)] == top ? PointStatus::Informative
                                                             : PointStatus::Uncertain;
}

}  // namespace nbweight
