#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nbweight/dataset.hpp"
#include "nbweight/knn.hpp"
#include "nbweight/synthetic.hpp"
#include "nbweight/trainer.hpp"
#include "nbweight/weighting.hpp"

namespace nbweight {

/**
 * Shared experiment protocol settings. Every experiment derives all of its
 * randomness (splits, seed lists, draws, bootstrap) from master_seed, so a
 * report is a pure function of (inputs, config). jobs controls run-level
 * parallelism only and never changes any output byte.
 */
struct ExperimentConfig {
    TrainConfig train;
    int k = 5;
    DistanceMetric metric = DistanceMetric::Euclidean;
    double test_fraction = 0.2;
    std::uint64_t master_seed = 0;
    int jobs = 1;
};

/// Seeded stratified split: per class, test_fraction of the samples
/// (rounded) go to the test side. Returns (train_ids, test_ids).
std::pair<std::vector<SampleId>, std::vector<SampleId>> stratified_split(
    const Dataset& data, double test_fraction, std::uint64_t seed);

struct GridCombination {
    std::string mode;                   // "NB" (score-ordered groups) | "Random"
    std::array<double, 3> weights;      // w(G0), w(G1), w(G2)
    std::vector<double> accuracies;     // per seed, on the shared test set
    double mean_accuracy = 0.0;
    double mean_delta = 0.0;            // mean_accuracy - baseline mean
};

struct GridSearchReport {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;           // shared by every combination
    std::vector<double> weight_grid;
    std::vector<double> baseline_accuracies;    // all-1.0 weights, per seed
    double baseline_mean_accuracy = 0.0;
    std::int64_t train_size = 0;
    std::int64_t test_size = 0;
    std::array<std::int64_t, 3> group_sizes{};  // G0/G1/G2 on the training side
    std::vector<GridCombination> combinations;  // sorted by mean_delta descending
};

/**
 * Full grid over weight triples for both group assignments (score-ordered
 * and random control), every combination trained with the same seed list
 * and evaluated against one shared held-out test set. Scores are computed
 * on the training side only; held-out samples never appear in any
 * neighborhood. The all-1.0 triple reuses the cached baseline runs.
 */
GridSearchReport grid_search(const Dataset& data, std::span<const double> weight_grid,
                             int n_seeds, const ExperimentConfig& cfg);

struct PairedRunReport {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;       // distinct, drawn from [0, 100000)
    std::vector<double> baseline_accuracy;  // per seed
    std::vector<double> weighted_accuracy;  // per seed, same init and data order
    double baseline_mean = 0.0;
    double weighted_mean = 0.0;
    double mean_improvement = 0.0;
    double baseline_variance = 0.0;  // population variance
    double weighted_variance = 0.0;
    double baseline_stddev = 0.0;
    double weighted_stddev = 0.0;
    double variance_ratio = 1.0;     // weighted / baseline
    // paired bootstrap (10,000 resamples) quantiles of the variance ratio
    double bootstrap_ratio_q025 = 1.0;
    double bootstrap_ratio_q950 = 1.0;
    double bootstrap_ratio_q975 = 1.0;
    // accuracy histogram in 1-percentage-point bins: [bin, baseline, weighted]
    std::vector<std::array<std::int64_t, 3>> histogram;
    WeightMapConfig weight_map;
    bool control_uniform = false;    // weighted arm ran with all-1.0 weights
    double beta_used = 0.0;
    std::int64_t train_size = 0;
    std::int64_t test_size = 0;
};

/**
 * Trains baseline (all-1.0 weights) and logistic-weighted models in pairs
 * that share one seed, hence identical initialization and batch order, over
 * n_pairs distinct seeds drawn from [0, 100000). Passing nullopt for the
 * weight map runs the control configuration in which both arms use weight
 * 1.0 (their accuracies must then match exactly).
 */
PairedRunReport paired_evaluation(const Dataset& data,
                                  const std::optional<WeightMapConfig>& weight_map,
                                  int n_pairs, const ExperimentConfig& cfg,
                                  bool beta_from_scores = false);

struct BiasVarianceReport {
    int draws = 0;               // number of models / training set draws
    std::int64_t n_train = 0;
    std::int64_t test_point_count = 0;
    Matrix mean_prediction;      // T x C, the ensemble average per test point
    double bias = 0.0;           // mean_t |mean_r g_r(x_t) - y(x_t)|^2
    double variance = 0.0;       // mean_t mean_r |g_r(x_t) - mean_r g_r(x_t)|^2
    double mse = 0.0;            // mean_t mean_r |g_r(x_t) - y(x_t)|^2
    double identity_gap = 0.0;   // |mse - (bias + variance)| relative to mse
};

/// Estimator core over explicit prediction sets: per_draw_predictions[r] is
/// a T x C probability matrix, targets a T x C one-hot matrix. Exposed so
/// the decomposition algebra can be verified directly.
BiasVarianceReport decompose_predictions(const std::vector<Matrix>& per_draw_predictions,
                                         const Matrix& targets);

/**
 * Monte Carlo bias-variance estimate: R independent training-set draws from
 * the domain (seeds derived from master_seed), one model per draw, all
 * evaluated on a fixed set of noise-free test points whose targets are the
 * posterior arg-max, one-hot encoded. The decomposition satisfies
 * mse = bias + variance to 1e-9 relative by construction.
 */
BiasVarianceReport bias_variance(const SyntheticDomain& domain, int R, std::int64_t n_train,
                                 std::int64_t test_points, const ExperimentConfig& cfg);

struct BiasVarianceComparison {
    BiasVarianceReport baseline;
    BiasVarianceReport weighted;
    double delta_bias = 0.0;      // weighted - baseline
    double delta_variance = 0.0;
    // Monte Carlo standard errors of the deltas over test points
    double se_delta_bias = 0.0;
    double se_delta_variance = 0.0;
};

/// Same draws and training seeds for both arms; the weighted arm scores each
/// draw with the experiment's k/metric and maps scores through the logistic.
BiasVarianceComparison compare_bias_variance(const SyntheticDomain& domain,
                                             const WeightMapConfig& weight_map, int R,
                                             std::int64_t n_train, std::int64_t test_points,
                                             const ExperimentConfig& cfg);

// Report writers. Each emits a machine-readable JSON file plus CSV tables
// into the directory; all output is deterministic (no timestamps, fixed key
// order, shortest-round-trip floats).
void write_grid_report(const GridSearchReport& report, const std::filesystem::path& dir);
void write_paired_report(const PairedRunReport& report, const std::filesystem::path& dir);
void write_bias_variance_report(const BiasVarianceReport& report, const std::filesystem::path& dir);
void write_bias_variance_comparison(const BiasVarianceComparison& cmp, const std::filesystem::path& dir);

}  // namespace nbweight
