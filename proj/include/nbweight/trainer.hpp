#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "nbweight/dataset.hpp"
#include "nbweight/matrix.hpp"

namespace nbweight {

/**
 * One-hidden-layer classifier: input -> hidden (ReLU) -> softmax.
 * Weights are double precision throughout; w1 is input_dim x hidden_dim and
 * w2 hidden_dim x output_dim, both row-major.
 */
struct ModelParameters {
    int input_dim = 0;
    int hidden_dim = 0;
    int output_dim = 0;
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;

    bool all_finite() const;
};

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.01;
    int hidden_dim = 64;
    std::uint64_t seed = 0;
    // Keeps every update sequential so that two runs with identical inputs
    // produce bit-identical parameters. There is no parallel training path;
    // the flag records the guarantee callers may rely on.
    bool deterministic = true;
    // Divide each batch by its weight sum instead of its size. This is NOT
    // the objective the rest of the project is built around (that one always
    // divides by the sample count); provided as an opt-in alternative only.
    bool renormalize_weights = false;

    void validate() const;  // throws DataError
};

struct TrainedModel {
    ModelParameters params;
    std::vector<double> loss_trace;   // per-epoch mean weighted loss
    double train_accuracy = 0.0;
    TrainConfig config;               // resolved config echo
    std::uint64_t seed = 0;
};

struct EvalResult {
    double accuracy = 0.0;
    Matrix probabilities;                            // n x C
    std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
};

/**
 * Weighted cross-entropy over explicit probability rows:
 *
 *     L = (1/N) * sum_i weights[i] * -log(max(probs[i][labels[i]], 1e-12))
 *
 * The divisor is the sample count N, not the weight sum, so scaling all
 * weights by c scales the loss by exactly c. Rows must sum to 1 within
 * 1e-6; weights must be >= 0.
 */
double weighted_loss(const Matrix& probs, std::span<const int> labels,
                     std::span<const double> weights);

/// Glorot-uniform weights (range +-sqrt(6/(fan_in+fan_out))) drawn from the
/// seeded generator, zero biases. Pure function of its arguments.
ModelParameters init_parameters(int input_dim, int hidden_dim, int output_dim,
                                std::uint64_t seed);

struct Gradients {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
};

/// Mean weighted cross-entropy of one batch under the given parameters
/// (forward only; same objective the training loop descends).
double weighted_batch_loss(const ModelParameters& params, const Matrix& x,
                           std::span<const int> y, std::span<const double> w);

/// Analytic gradients of weighted_batch_loss; optionally returns the loss.
Gradients weighted_batch_gradients(const ModelParameters& params, const Matrix& x,
                                   std::span<const int> y, std::span<const double> w,
                                   double* loss_out = nullptr);

/**
 * Mini-batch gradient descent on the weighted objective. Epoch order is a
 * seeded shuffle; batch composition is a pure function of the seed, not of
 * the weights. With equal configs and inputs the returned parameters are
 * bit-identical across runs. Throws NumericError (with epoch/batch) if the
 * loss turns non-finite, DataError for shape/weight violations.
 */
TrainedModel train(const Dataset& data, std::span<const double> weights, const TrainConfig& cfg);

/// Same, with weights keyed by sample id (every id must be present).
TrainedModel train(const Dataset& data, const std::unordered_map<SampleId, double>& weights_by_id,
                   const TrainConfig& cfg);

/// Accuracy, per-sample class probabilities and the confusion matrix.
/// Arg-max ties resolve to the lowest class index.
EvalResult evaluate(const ModelParameters& params, const Dataset& data);

/// Versioned little-endian binary checkpoint; load restores bit-identical
/// parameters.
void save_model(const ModelParameters& params, const std::filesystem::path& path);
ModelParameters load_model(const std::filesystem::path& path);

}  // namespace nbweight
