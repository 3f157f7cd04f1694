#include "nbweight/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "nbweight/csv.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/parallel.hpp"
#include "nbweight/rng.hpp"
#include "nbweight/scoring.hpp"

namespace nbweight {

namespace {

using ordered_json = nlohmann::ordered_json;

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v, double mean) {
    double sum = 0.0;
    for (const double x : v) sum += (x - mean) * (x - mean);
    return sum / static_cast<double>(v.size());
}

// nearest-rank quantile on a sorted copy
double quantile(std::vector<double> sorted, double p) {
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<std::size_t>(
        std::llround(p * static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

std::vector<std::uint64_t> draw_seed_list(std::uint64_t master, int count) {
    Rng rng(derive_seed(master, seed_tag::kSeedList));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (auto& s : seeds) s = rng.below(std::uint64_t{1} << 31);
    return seeds;
}

// squared Euclidean distance between a prediction row and a target row
double squared_error(std::span<const double> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sq += diff * diff;
    }
    return sq;
}

struct SplitData {
    std::vector<SampleId> train_ids;
    std::vector<SampleId> test_ids;
    Dataset train_set;
    Dataset test_set;
};

SplitData make_split(const Dataset& data, const ExperimentConfig& cfg) {
    SplitData split;
    std::tie(split.train_ids, split.test_ids) =
        stratified_split(data, cfg.test_fraction, derive_seed(cfg.master_seed, seed_tag::kSplit));
    split.train_set = subset(data, split.train_ids);
    split.test_set = subset(data, split.test_ids);
    return split;
}

// Training-side uncertainty scores; held-out ids are excluded from every
// neighborhood so no test information leaks into the weights.
std::vector<UncertaintyScore> train_side_scores(const Dataset& data, const SplitData& split,
                                                const ExperimentConfig& cfg) {
    const std::unordered_set<SampleId> exclude(split.test_ids.begin(), split.test_ids.end());
    return score_dataset(data, cfg.k, cfg.metric, &exclude, cfg.jobs);
}

double train_and_score(const Dataset& train_set, const Dataset& test_set,
                       std::span<const double> weights, const TrainConfig& base_cfg,
                       std::uint64_t seed) {
    TrainConfig tc = base_cfg;
    tc.seed = seed;
    const TrainedModel model = train(train_set, weights, tc);
    return evaluate(model.params, test_set).accuracy;
}

ordered_json bias_variance_json(const BiasVarianceReport& report, bool include_means) {
    ordered_json j;
    j["draws"] = report.draws;
    j["n_train"] = report.n_train;
    j["test_points"] = report.test_point_count;
    j["bias"] = report.bias;
    j["variance"] = report.variance;
    j["mse"] = report.mse;
    j["identity_gap"] = report.identity_gap;
    if (include_means) {
        ordered_json rows = ordered_json::array();
        for (std::int64_t t = 0; t < report.mean_prediction.rows; ++t) {
            ordered_json row = ordered_json::array();
            for (std::int64_t c = 0; c < report.mean_prediction.cols; ++c) {
                row.push_back(report.mean_prediction.at(t, c));
            }
            rows.push_back(std::move(row));
        }
        j["mean_prediction"] = std::move(rows);
    }
    return j;
}

void dump_json(const ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace

std::pair<std::vector<SampleId>, std::vector<SampleId>> stratified_split(
    const Dataset& data, double test_fraction, std::uint64_t seed) {
    data.validate();
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw DataError("stratified_split: test_fraction must be in (0, 1)");
    }

    std::vector<std::vector<SampleId>> by_class(static_cast<std::size_t>(data.class_count));
    for (std::int64_t r = 0; r < data.size(); ++r) {
        by_class[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r)])].push_back(
            data.ids[static_cast<std::size_t>(r)]);
    }

    Rng rng(seed);
    std::vector<SampleId> train_ids;
    std::vector<SampleId> test_ids;
    for (auto& members : by_class) {
        rng.shuffle(members);
        const auto n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i) {
            (i < n_test ? test_ids : train_ids).push_back(members[i]);
        }
    }
    if (train_ids.empty() || test_ids.empty()) {
        throw DataError("stratified_split: split produced an empty side");
    }
    std::sort(train_ids.begin(), train_ids.end());
    std::sort(test_ids.begin(), test_ids.end());
    return {std::move(train_ids), std::move(test_ids)};
}

GridSearchReport grid_search(const Dataset& data, std::span<const double> weight_grid,
                             int n_seeds, const ExperimentConfig& cfg) {
    if (weight_grid.empty()) throw DataError("grid_search: empty weight grid");
    for (const double w : weight_grid) {
        if (!(w > 0.0)) throw DataError("grid_search: grid weights must be > 0");
    }
    if (n_seeds < 1) throw DataError("grid_search: n_seeds must be >= 1");
    cfg.train.validate();

    GridSearchReport report;
    report.master_seed = cfg.master_seed;
    report.weight_grid.assign(weight_grid.begin(), weight_grid.end());
    report.seeds = draw_seed_list(cfg.master_seed, n_seeds);

    const SplitData split = make_split(data, cfg);
    report.train_size = split.train_set.size();
    report.test_size = split.test_set.size();

    const auto scores = train_side_scores(data, split, cfg);
    const GroupSplit nb_split = split_groups(scores);
    const GroupSplit random_split = random_groups(
        nb_split.sizes(), split.train_ids, derive_seed(cfg.master_seed, seed_tag::kRandomGroups));
    report.group_sizes = nb_split.sizes();

    // baseline: all-1.0 weights, one run per seed, cached for the 1/1/1 triple
    const std::vector<double> unit_weights(static_cast<std::size_t>(split.train_set.size()), 1.0);
    report.baseline_accuracies.resize(report.seeds.size());
    parallel_for(static_cast<std::int64_t>(report.seeds.size()), cfg.jobs, [&](std::int64_t i) {
        report.baseline_accuracies[static_cast<std::size_t>(i)] =
            train_and_score(split.train_set, split.test_set, unit_weights, cfg.train,
                            report.seeds[static_cast<std::size_t>(i)]);
    });
    report.baseline_mean_accuracy = mean_of(report.baseline_accuracies);

    struct Combo {
        std::string mode;
        std::array<double, 3> weights;
        std::vector<double> row_weights;  // per train_set row; empty -> baseline cache
    };
    std::vector<Combo> combos;
    for (const std::string mode : {"NB", "Random"}) {
        const GroupSplit& groups = mode == "NB" ? nb_split : random_split;
        for (const double w0 : weight_grid) {
            for (const double w1 : weight_grid) {
                for (const double w2 : weight_grid) {
                    Combo combo{mode, {w0, w1, w2}, {}};
                    if (!(w0 == 1.0 && w1 == 1.0 && w2 == 1.0)) {
                        combo.row_weights =
                            align_weights(split.train_set, group_weights(groups, combo.weights));
                    }
                    combos.push_back(std::move(combo));
                }
            }
        }
    }

    // one task per (combination, seed); results land in disjoint slots
    std::vector<std::vector<double>> accuracies(combos.size());
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        accuracies[c].resize(report.seeds.size());
        if (combos[c].row_weights.empty()) {
            accuracies[c] = report.baseline_accuracies;
            continue;
        }
        for (std::size_t s = 0; s < report.seeds.size(); ++s) tasks.emplace_back(c, s);
    }
    parallel_for(static_cast<std::int64_t>(tasks.size()), cfg.jobs, [&](std::int64_t t) {
        const auto [c, s] = tasks[static_cast<std::size_t>(t)];
        accuracies[c][s] = train_and_score(split.train_set, split.test_set, combos[c].row_weights,
                                           cfg.train, report.seeds[s]);
    });

    for (std::size_t c = 0; c < combos.size(); ++c) {
        GridCombination out;
        out.mode = combos[c].mode;
        out.weights = combos[c].weights;
        out.accuracies = accuracies[c];
        out.mean_accuracy = mean_of(out.accuracies);
        out.mean_delta = out.mean_accuracy - report.baseline_mean_accuracy;
        report.combinations.push_back(std::move(out));
    }
    std::sort(report.combinations.begin(), report.combinations.end(),
              [](const GridCombination& a, const GridCombination& b) {
                  if (a.mean_delta != b.mean_delta) return a.mean_delta > b.mean_delta;
                  if (a.mode != b.mode) return a.mode < b.mode;
                  return a.weights < b.weights;
              });
    return report;
}

PairedRunReport paired_evaluation(const Dataset& data,
                                  const std::optional<WeightMapConfig>& weight_map,
                                  int n_pairs, const ExperimentConfig& cfg,
                                  bool beta_from_scores) {
    if (n_pairs < 2) throw DataError("paired_evaluation: need at least 2 pairs");
    if (n_pairs > 100000) throw DataError("paired_evaluation: at most 100000 distinct seeds exist");
    cfg.train.validate();

    PairedRunReport report;
    report.master_seed = cfg.master_seed;
    report.control_uniform = !weight_map.has_value();

    const SplitData split = make_split(data, cfg);
    report.train_size = split.train_set.size();
    report.test_size = split.test_set.size();

    const std::vector<double> unit_weights(static_cast<std::size_t>(split.train_set.size()), 1.0);
    std::vector<double> arm_weights = unit_weights;
    if (weight_map) {
        const auto scores = train_side_scores(data, split, cfg);
        WeightMapConfig wm = *weight_map;
        if (beta_from_scores) {
            std::vector<double> values;
            values.reserve(scores.size());
            for (const auto& s : scores) values.push_back(s.score);
            wm.beta = default_beta(values);
        }
        wm.validate();
        std::unordered_map<SampleId, double> by_id;
        by_id.reserve(scores.size());
        for (const auto& s : scores) by_id.emplace(s.sample_id, logistic_weight(s.score, wm));
        arm_weights = align_weights(split.train_set, by_id);
        report.weight_map = wm;
        report.beta_used = wm.beta;
    }

    // distinct pair seeds, uniform over [0, 100000)
    Rng seed_rng(derive_seed(cfg.master_seed, seed_tag::kPairSeeds));
    std::unordered_set<std::uint64_t> chosen;
    report.seeds.reserve(static_cast<std::size_t>(n_pairs));
    while (report.seeds.size() < static_cast<std::size_t>(n_pairs)) {
        const std::uint64_t s = seed_rng.below(100000);
        if (chosen.insert(s).second) report.seeds.push_back(s);
    }

    report.baseline_accuracy.resize(report.seeds.size());
    report.weighted_accuracy.resize(report.seeds.size());
    parallel_for(static_cast<std::int64_t>(report.seeds.size()), cfg.jobs, [&](std::int64_t i) {
        const std::uint64_t seed = report.seeds[static_cast<std::size_t>(i)];
        // same seed for both arms: identical initialization and batch order
        report.baseline_accuracy[static_cast<std::size_t>(i)] =
            train_and_score(split.train_set, split.test_set, unit_weights, cfg.train, seed);
        report.weighted_accuracy[static_cast<std::size_t>(i)] =
            train_and_score(split.train_set, split.test_set, arm_weights, cfg.train, seed);
    });

    report.baseline_mean = mean_of(report.baseline_accuracy);
    report.weighted_mean = mean_of(report.weighted_accuracy);
    report.mean_improvement = report.weighted_mean - report.baseline_mean;
    report.baseline_variance = population_variance(report.baseline_accuracy, report.baseline_mean);
    report.weighted_variance = population_variance(report.weighted_accuracy, report.weighted_mean);
    report.baseline_stddev = std::sqrt(report.baseline_variance);
    report.weighted_stddev = std::sqrt(report.weighted_variance);
    report.variance_ratio = report.baseline_variance > 0.0
                                ? report.weighted_variance / report.baseline_variance
                                : (report.weighted_variance == 0.0 ? 1.0
                                                                   : std::numeric_limits<double>::infinity());

    // paired bootstrap of the variance ratio over seeds
    constexpr int kResamples = 10000;
    Rng boot_rng(derive_seed(cfg.master_seed, seed_tag::kBootstrap));
    std::vector<double> ratios;
    ratios.reserve(kResamples);
    std::vector<double> rb(report.seeds.size());
    std::vector<double> rw(report.seeds.size());
    for (int rep = 0; rep < kResamples; ++rep) {
        for (std::size_t i = 0; i < report.seeds.size(); ++i) {
            const auto pick = static_cast<std::size_t>(boot_rng.below(report.seeds.size()));
            rb[i] = report.baseline_accuracy[pick];
            rw[i] = report.weighted_accuracy[pick];
        }
        const double bv = population_variance(rb, mean_of(rb));
        const double wv = population_variance(rw, mean_of(rw));
        if (bv > 0.0) {
            ratios.push_back(wv / bv);
        } else {
            ratios.push_back(wv == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        }
    }
    report.bootstrap_ratio_q025 = quantile(ratios, 0.025);
    report.bootstrap_ratio_q950 = quantile(ratios, 0.95);
    report.bootstrap_ratio_q975 = quantile(ratios, 0.975);

    // accuracy histogram, 1-percentage-point bins
    std::array<std::array<std::int64_t, 2>, 101> bins{};
    const auto bin_of = [](double accuracy) {
        return std::clamp(static_cast<int>(std::floor(accuracy * 100.0)), 0, 100);
    };
    for (const double a : report.baseline_accuracy) bins[static_cast<std::size_t>(bin_of(a))][0]++;
    for (const double a : report.weighted_accuracy) bins[static_cast<std::size_t>(bin_of(a))][1]++;
    for (int b = 0; b <= 100; ++b) {
        const auto& counts = bins[static_cast<std::size_t>(b)];
        if (counts[0] || counts[1]) report.histogram.push_back({b, counts[0], counts[1]});
    }
    return report;
}

BiasVarianceReport decompose_predictions(const std::vector<Matrix>& per_draw_predictions,
                                         const Matrix& targets) {
    if (per_draw_predictions.empty()) throw DataError("decompose_predictions: no prediction sets");
    const std::int64_t T = targets.rows;
    const std::int64_t C = targets.cols;
    if (T == 0) throw DataError("decompose_predictions: no test points");
    for (const auto& preds : per_draw_predictions) {
        if (preds.rows != T || preds.cols != C) {
            throw DataError("decompose_predictions: prediction shape mismatch");
        }
    }
    const auto R = static_cast<std::int64_t>(per_draw_predictions.size());

    BiasVarianceReport report;
    report.draws = static_cast<int>(R);
    report.test_point_count = T;
    report.mean_prediction = Matrix(T, C);
    for (const auto& preds : per_draw_predictions) {
        for (std::size_t i = 0; i < preds.values.size(); ++i) {
            report.mean_prediction.values[i] += preds.values[i];
        }
    }
    for (double& v : report.mean_prediction.values) v /= static_cast<double>(R);

    double bias_sum = 0.0;
    double var_sum = 0.0;
    double mse_sum = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
        const auto mean_row = report.mean_prediction.row(t);
        const auto target_row = targets.row(t);
        bias_sum += squared_error(mean_row, target_row);
        for (const auto& preds : per_draw_predictions) {
            var_sum += squared_error(preds.row(t), mean_row);
            mse_sum += squared_error(preds.row(t), target_row);
        }
    }
    report.bias = bias_sum / static_cast<double>(T);
    report.variance = var_sum / static_cast<double>(T * R);
    report.mse = mse_sum / static_cast<double>(T * R);
    const double gap = std::abs(report.mse - (report.bias + report.variance));
    report.identity_gap = report.mse > 0.0 ? gap / report.mse : gap;
    return report;
}

namespace {

// shared scaffolding for the one- and two-arm Monte Carlo estimates
struct DrawSeeds {
    std::uint64_t data_seed;
    std::uint64_t train_seed;
};

DrawSeeds draw_seeds(std::uint64_t master, int r) {
    const std::uint64_t draw_master = derive_seed(master, seed_tag::kDraws);
    return {derive_seed(draw_master, static_cast<std::uint64_t>(2 * r)),
            derive_seed(draw_master, static_cast<std::uint64_t>(2 * r + 1))};
}

struct FixedTestSet {
    Dataset points;   // labels are the posterior arg-max (used only for shape)
    Matrix targets;   // one-hot arg-max posterior rows
};

FixedTestSet make_test_set(const SyntheticDomain& domain, std::int64_t test_points,
                           std::uint64_t master_seed) {
    SyntheticDomain clean = domain;
    clean.noise = NoiseMode{NoiseKind::PosteriorSampling, 0.0, 1.0};
    Generated gen = generate(clean, test_points, derive_seed(master_seed, seed_tag::kTestPoints));

    FixedTestSet out;
    out.targets = Matrix(test_points, domain.class_count());
    for (std::int64_t t = 0; t < test_points; ++t) {
        const auto row = gen.posteriors.row(t);
        int top = 0;  // ties to the lowest class index
        for (int c = 1; c < domain.class_count(); ++c) {
            if (row[static_cast<std::size_t>(c)] > row[static_cast<std::size_t>(top)]) top = c;
        }
        out.targets.at(t, top) = 1.0;
        gen.data.labels[static_cast<std::size_t>(t)] = top;
    }
    out.points = std::move(gen.data);
    return out;
}

void check_bias_variance_args(int R, std::int64_t n_train, std::int64_t test_points) {
    if (R < 2) throw DataError("bias_variance: need at least 2 draws");
    if (n_train < 1) throw DataError("bias_variance: n_train must be >= 1");
    if (test_points < 1) throw DataError("bias_variance: test_points must be >= 1");
}

}  // namespace

BiasVarianceReport bias_variance(const SyntheticDomain& domain, int R, std::int64_t n_train,
                                 std::int64_t test_points, const ExperimentConfig& cfg) {
    check_bias_variance_args(R, n_train, test_points);
    cfg.train.validate();
    const FixedTestSet test = make_test_set(domain, test_points, cfg.master_seed);

    std::vector<Matrix> preds(static_cast<std::size_t>(R));
    parallel_for(R, cfg.jobs, [&](std::int64_t r) {
        const DrawSeeds seeds = draw_seeds(cfg.master_seed, static_cast<int>(r));
        const Generated g = generate(domain, n_train, seeds.data_seed);
        TrainConfig tc = cfg.train;
        tc.seed = seeds.train_seed;
        const std::vector<double> unit(static_cast<std::size_t>(g.data.size()), 1.0);
        const TrainedModel model = train(g.data, unit, tc);
        preds[static_cast<std::size_t>(r)] = evaluate(model.params, test.points).probabilities;
    });

    BiasVarianceReport report = decompose_predictions(preds, test.targets);
    report.n_train = n_train;
    return report;
}

BiasVarianceComparison compare_bias_variance(const SyntheticDomain& domain,
                                             const WeightMapConfig& weight_map, int R,
                                             std::int64_t n_train, std::int64_t test_points,
                                             const ExperimentConfig& cfg) {
    check_bias_variance_args(R, n_train, test_points);
    cfg.train.validate();
    weight_map.validate();
    const FixedTestSet test = make_test_set(domain, test_points, cfg.master_seed);

    std::vector<Matrix> preds_base(static_cast<std::size_t>(R));
    std::vector<Matrix> preds_weighted(static_cast<std::size_t>(R));
    parallel_for(R, cfg.jobs, [&](std::int64_t r) {
        const DrawSeeds seeds = draw_seeds(cfg.master_seed, static_cast<int>(r));
        const Generated g = generate(domain, n_train, seeds.data_seed);
        TrainConfig tc = cfg.train;
        tc.seed = seeds.train_seed;

        const std::vector<double> unit(static_cast<std::size_t>(g.data.size()), 1.0);
        const TrainedModel base = train(g.data, unit, tc);
        preds_base[static_cast<std::size_t>(r)] = evaluate(base.params, test.points).probabilities;

        const auto scores = score_dataset(g.data, cfg.k, cfg.metric, nullptr, 1);
        std::unordered_map<SampleId, double> by_id;
        by_id.reserve(scores.size());
        for (const auto& s : scores) by_id.emplace(s.sample_id, logistic_weight(s.score, weight_map));
        const TrainedModel weighted = train(g.data, align_weights(g.data, by_id), tc);
        preds_weighted[static_cast<std::size_t>(r)] =
            evaluate(weighted.params, test.points).probabilities;
    });

    BiasVarianceComparison cmp;
    cmp.baseline = decompose_predictions(preds_base, test.targets);
    cmp.baseline.n_train = n_train;
    cmp.weighted = decompose_predictions(preds_weighted, test.targets);
    cmp.weighted.n_train = n_train;
    cmp.delta_bias = cmp.weighted.bias - cmp.baseline.bias;
    cmp.delta_variance = cmp.weighted.variance - cmp.baseline.variance;

    // Monte Carlo standard errors of the deltas over test points
    const std::int64_t T = test.targets.rows;
    std::vector<double> bias_delta(static_cast<std::size_t>(T));
    std::vector<double> var_delta(static_cast<std::size_t>(T));
    for (std::int64_t t = 0; t < T; ++t) {
        const double bias_b = squared_error(cmp.baseline.mean_prediction.row(t), test.targets.row(t));
        const double bias_w = squared_error(cmp.weighted.mean_prediction.row(t), test.targets.row(t));
        double var_b = 0.0;
        double var_w = 0.0;
        for (int r = 0; r < R; ++r) {
            var_b += squared_error(preds_base[static_cast<std::size_t>(r)].row(t),
                                   cmp.baseline.mean_prediction.row(t));
            var_w += squared_error(preds_weighted[static_cast<std::size_t>(r)].row(t),
                                   cmp.weighted.mean_prediction.row(t));
        }
        bias_delta[static_cast<std::size_t>(t)] = bias_w - bias_b;
        var_delta[static_cast<std::size_t>(t)] = (var_w - var_b) / static_cast<double>(R);
    }
    cmp.se_delta_bias =
        std::sqrt(population_variance(bias_delta, mean_of(bias_delta)) / static_cast<double>(T));
    cmp.se_delta_variance =
        std::sqrt(population_variance(var_delta, mean_of(var_delta)) / static_cast<double>(T));
    return cmp;
}

void write_grid_report(const GridSearchReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    ordered_json j;
    j["protocol"] = "grid-search";
    j["master_seed"] = report.master_seed;
    j["seeds"] = report.seeds;
    j["weight_grid"] = report.weight_grid;
    j["train_size"] = report.train_size;
    j["test_size"] = report.test_size;
    j["group_sizes"] = report.group_sizes;
    j["baseline"] = {{"accuracies", report.baseline_accuracies},
                     {"mean_accuracy", report.baseline_mean_accuracy}};
    ordered_json combos = ordered_json::array();
    for (const auto& c : report.combinations) {
        ordered_json jc;
        jc["mode"] = c.mode;
        jc["weights"] = c.weights;
        jc["accuracies"] = c.accuracies;
        jc["mean_accuracy"] = c.mean_accuracy;
        jc["mean_delta"] = c.mean_delta;
        combos.push_back(std::move(jc));
    }
    j["combinations"] = std::move(combos);
    dump_json(j, dir / "grid_report.json");

    std::vector<std::vector<std::string>> rows;
    for (const auto& c : report.combinations) {
        rows.push_back({c.mode, format_double(c.weights[0]), format_double(c.weights[1]),
                        format_double(c.weights[2]), format_double(c.mean_accuracy),
                        format_double(c.mean_delta)});
    }
    write_csv(dir / "grid_report.csv",
              {"mode", "g0_weight", "g1_weight", "g2_weight", "mean_accuracy", "mean_delta"}, rows);
}

void write_paired_report(const PairedRunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    ordered_json j;
    j["protocol"] = "paired-eval";
    j["master_seed"] = report.master_seed;
    j["pairs"] = report.seeds.size();
    j["train_size"] = report.train_size;
    j["test_size"] = report.test_size;
    j["control_uniform"] = report.control_uniform;
    if (!report.control_uniform) {
        j["weight_map"] = {{"alpha", report.weight_map.alpha},
                           {"beta", report.weight_map.beta},
                           {"gamma", report.weight_map.gamma},
                           {"eta", report.weight_map.eta}};
        j["beta_used"] = report.beta_used;
    }
    j["seeds"] = report.seeds;
    j["baseline_accuracy"] = report.baseline_accuracy;
    j["weighted_accuracy"] = report.weighted_accuracy;
    j["baseline_mean"] = report.baseline_mean;
    j["weighted_mean"] = report.weighted_mean;
    j["mean_improvement"] = report.mean_improvement;
    j["baseline_variance"] = report.baseline_variance;
    j["weighted_variance"] = report.weighted_variance;
    j["baseline_stddev"] = report.baseline_stddev;
    j["weighted_stddev"] = report.weighted_stddev;
    j["variance_ratio"] = report.variance_ratio;
    j["bootstrap_ratio_q025"] = report.bootstrap_ratio_q025;
    j["bootstrap_ratio_q950"] = report.bootstrap_ratio_q950;
    j["bootstrap_ratio_q975"] = report.bootstrap_ratio_q975;
    dump_json(j, dir / "report.json");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
        rows.push_back({format_int(static_cast<std::int64_t>(report.seeds[i])),
                        format_double(report.baseline_accuracy[i]),
                        format_double(report.weighted_accuracy[i]),
                        format_double(report.weighted_accuracy[i] - report.baseline_accuracy[i])});
    }
    write_csv(dir / "paired_runs.csv",
              {"seed", "baseline_accuracy", "weighted_accuracy", "improvement"}, rows);

    rows.clear();
    for (const auto& bin : report.histogram) {
        rows.push_back({format_int(bin[0]), format_int(bin[1]), format_int(bin[2])});
    }
    write_csv(dir / "histogram.csv", {"accuracy_pct", "baseline_count", "weighted_count"}, rows);
}

void write_bias_variance_report(const BiasVarianceReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    ordered_json j = bias_variance_json(report, true);
    j["protocol"] = "bias-variance";
    dump_json(j, dir / "report.json");

    write_csv(dir / "summary.csv", {"arm", "bias", "variance", "mse", "identity_gap"},
              {{"model", format_double(report.bias), format_double(report.variance),
                format_double(report.mse), format_double(report.identity_gap)}});
}

void write_bias_variance_comparison(const BiasVarianceComparison& cmp,
                                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    ordered_json j;
    j["protocol"] = "bias-variance-compare";
    j["baseline"] = bias_variance_json(cmp.baseline, false);
    j["weighted"] = bias_variance_json(cmp.weighted, false);
    j["delta_bias"] = cmp.delta_bias;
    j["delta_variance"] = cmp.delta_variance;
    j["se_delta_bias"] = cmp.se_delta_bias;
    j["se_delta_variance"] = cmp.se_delta_variance;
    dump_json(j, dir / "report.json");

    write_csv(dir / "summary.csv", {"arm", "bias", "variance", "mse", "identity_gap"},
              {{"baseline", format_double(cmp.baseline.bias), format_double(cmp.baseline.variance),
                format_double(cmp.baseline.mse), format_double(cmp.baseline.identity_gap)},
               {"weighted", format_double(cmp.weighted.bias), format_double(cmp.weighted.variance),
                format_double(cmp.weighted.mse), format_double(cmp.weighted.identity_gap)}});
}

}  // namespace nbweight
