#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nbweight {

using SampleId = std::int64_t;

// Dense row-major matrix of doubles. Deliberately minimal: the models and
// datasets in this project are small enough that hand-rolled loops beat the
// overhead of pulling in a linear algebra dependency, and keeping every
// floating point operation explicit makes bitwise reproducibility easy to
// reason about.
struct Matrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::int64_t r, std::int64_t c, double fill = 0.0)
        : rows(r), cols(c), values(static_cast<std::size_t>(r * c), fill) {}

    double& at(std::int64_t r, std::int64_t c) { return values[static_cast<std::size_t>(r * cols + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return values[static_cast<std::size_t>(r * cols + c)]; }

    std::span<double> row(std::int64_t r) {
        return {values.data() + r * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(std::int64_t r) const {
        return {values.data() + r * cols, static_cast<std::size_t>(cols)};
    }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

}  // namespace nbweight
