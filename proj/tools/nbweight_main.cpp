#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "nbweight/csv.hpp"
#include "nbweight/dataset.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/experiments.hpp"
#include "nbweight/knn.hpp"
#include "nbweight/manifest.hpp"
#include "nbweight/scoring.hpp"
#include "nbweight/synthetic.hpp"
#include "nbweight/trainer.hpp"
#include "nbweight/weighting.hpp"

namespace fs = std::filesystem;
using namespace nbweight;

namespace {

// flag conflicts and other argument-level mistakes; exit code 1
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative output paths are resolved against NBWEIGHT_OUT_DIR when it is
// set, so pipelines can redirect all artifacts with one variable.
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_absolute()) return p;
    if (const char* base = std::getenv("NBWEIGHT_OUT_DIR"); base && *base) {
        return fs::path(base) / p;
    }
    return p;
}

fs::path default_out_dir(const std::string& out, const char* subcommand) {
    if (!out.empty()) return resolve_out(out);
    if (const char* base = std::getenv("NBWEIGHT_OUT_DIR"); base && *base) {
        return fs::path(base);
    }
    throw UsageError(std::string(subcommand) + ": pass --out or set NBWEIGHT_OUT_DIR");
}

struct DataFlags {
    std::string input;
    std::string label_col = "label";
    std::string id_col = "id";
    int classes = 0;  // 0 = infer from the file
};

void add_data_flags(CLI::App* sub, DataFlags& f) {
    sub->add_option("--input", f.input, "input dataset CSV")->required();
    sub->add_option("--label-col", f.label_col, "label column name")->capture_default_str();
    sub->add_option("--id-col", f.id_col, "sample id column name")->capture_default_str();
    sub->add_option("--classes", f.classes,
                    "force a class count larger than the file's distinct labels");
}

Dataset load_input(const DataFlags& f) {
    LoadOptions opts;
    opts.id_column = f.id_col;
    if (f.classes > 0) opts.class_count = f.classes;
    return load_csv(f.input, f.label_col, opts);
}

struct TrainFlags {
    int epochs = 50;
    int batch_size = 32;
    double lr = 0.01;
    int hidden = 64;
};

void add_train_flags(CLI::App* sub, TrainFlags& f) {
    sub->add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
    sub->add_option("--batch-size", f.batch_size, "mini-batch size")->capture_default_str();
    sub->add_option("--lr", f.lr, "learning rate")->capture_default_str();
    sub->add_option("--hidden", f.hidden, "hidden layer width")->capture_default_str();
}

TrainConfig to_train_config(const TrainFlags& f) {
    TrainConfig cfg;
    cfg.epochs = f.epochs;
    cfg.batch_size = f.batch_size;
    cfg.learning_rate = f.lr;
    cfg.hidden_dim = f.hidden;
    return cfg;
}

std::vector<ManifestEntry> train_entries(const TrainFlags& f) {
    return {{"epochs", format_int(f.epochs)},
            {"batch_size", format_int(f.batch_size)},
            {"learning_rate", format_double(f.lr)},
            {"hidden", format_int(f.hidden)}};
}

struct DomainFlags {
    std::string preset;
    std::string domain_file;
    std::string noise_kind;  // empty = keep the domain's own mode
    double noise_rate = 0.0;
    double noise_bandwidth = 0.0;
    CLI::Option* rate_opt = nullptr;
    CLI::Option* bandwidth_opt = nullptr;
};

void add_domain_flags(CLI::App* sub, DomainFlags& f) {
    auto* preset = sub->add_option("--preset", f.preset, "built-in domain name")
                       ->check(CLI::IsMember({"two-gauss-overlap", "five-class-ring"}));
    auto* file = sub->add_option("--domain", f.domain_file, "domain config file");
    preset->excludes(file);
    sub->add_option("--noise", f.noise_kind, "override the noise mode")
        ->check(CLI::IsMember({"posterior-sampling", "boundary-flip"}));
    f.rate_opt = sub->add_option("--noise-rate", f.noise_rate, "boundary-flip rate in [0,1]");
    f.bandwidth_opt =
        sub->add_option("--noise-bandwidth", f.noise_bandwidth, "boundary-flip bandwidth > 0");
}

SyntheticDomain resolve_domain(const DomainFlags& f, const char* subcommand) {
    SyntheticDomain domain;
    if (!f.preset.empty()) {
        domain = preset_domain(f.preset);
    } else if (!f.domain_file.empty()) {
        domain = load_domain_file(f.domain_file);
    } else {
        throw UsageError(std::string(subcommand) + ": pass --preset or --domain");
    }
    if (!f.noise_kind.empty()) {
        domain.noise.kind = f.noise_kind == "boundary-flip" ? NoiseKind::BoundaryFlip
                                                            : NoiseKind::PosteriorSampling;
    }
    if (f.rate_opt->count() > 0) domain.noise.rate = f.noise_rate;
    if (f.bandwidth_opt->count() > 0) domain.noise.bandwidth = f.noise_bandwidth;
    domain.validate();
    return domain;
}

std::vector<ManifestEntry> domain_entries(const DomainFlags& f, const SyntheticDomain& domain) {
    std::vector<ManifestEntry> entries;
    if (!f.preset.empty()) entries.push_back({"preset", f.preset});
    if (!f.domain_file.empty()) entries.push_back({"domain_file", f.domain_file});
    entries.push_back({"noise",
                       domain.noise.kind == NoiseKind::BoundaryFlip ? "boundary-flip"
                                                                    : "posterior-sampling"});
    if (domain.noise.kind == NoiseKind::BoundaryFlip) {
        entries.push_back({"noise_rate", format_double(domain.noise.rate)});
        entries.push_back({"noise_bandwidth", format_double(domain.noise.bandwidth)});
    }
    return entries;
}

std::unordered_map<SampleId, double> read_weight_file(const fs::path& path) {
    const CsvTable table = read_csv(path);
    const int id_col = table.column("sample_id");
    const int w_col = table.column("weight");
    if (id_col < 0 || w_col < 0) {
        throw DataError("weights file needs sample_id and weight columns: " + path.string());
    }
    std::unordered_map<SampleId, double> by_id;
    by_id.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const SampleId id = parse_int(row[static_cast<std::size_t>(id_col)]);
        const double w = parse_double(row[static_cast<std::size_t>(w_col)]);
        if (w < 0.0) throw DataError("negative weight for sample " + std::to_string(id));
        if (!by_id.emplace(id, w).second) {
            throw DataError("duplicate sample_id in weights file: " + std::to_string(id));
        }
    }
    return by_id;
}

// ---- gen-data ----------------------------------------------------------

struct GenOpts {
    DomainFlags domain;
    std::int64_t n = 1000;
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen_data(const GenOpts& o) {
    const SyntheticDomain domain = resolve_domain(o.domain, "gen-data");
    const fs::path dir = default_out_dir(o.out, "gen-data");
    fs::create_directories(dir);

    const Generated gen = generate(domain, o.n, o.seed);
    save_csv(gen.data, dir / "data.csv");
    save_domain_file(domain, dir / "domain.txt");

    std::vector<std::string> header{"id"};
    for (int c = 0; c < domain.class_count(); ++c) header.push_back("p" + std::to_string(c));
    header.push_back("status");
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(o.n));
    for (std::int64_t i = 0; i < o.n; ++i) {
        std::vector<std::string> row{format_int(gen.data.ids[static_cast<std::size_t>(i)])};
        for (int c = 0; c < domain.class_count(); ++c) row.push_back(format_double(gen.posteriors.at(i, c)));
        row.push_back(gen.status[static_cast<std::size_t>(i)] == PointStatus::Informative
                          ? "Informative"
                          : "Uncertain");
        rows.push_back(std::move(row));
    }
    write_csv(dir / "truth.csv", header, rows);

    std::vector<ManifestEntry> config = domain_entries(o.domain, domain);
    config.push_back({"n", format_int(o.n)});
    config.push_back({"seed", format_int(static_cast<std::int64_t>(o.seed))});
    std::vector<fs::path> inputs;
    if (!o.domain.domain_file.empty()) inputs.push_back(o.domain.domain_file);
    write_manifest(dir / "manifest.json",
                   make_manifest("gen-data", config, inputs, {"data.csv", "truth.csv", "domain.txt"}));

    std::int64_t uncertain = 0;
    for (const auto s : gen.status) uncertain += s == PointStatus::Uncertain ? 1 : 0;
    std::cout << "wrote " << o.n << " samples to " << dir.string() << " (uncertain " << uncertain
              << ")\n";
    return 0;
}

// ---- score -------------------------------------------------------------

struct ScoreOpts {
    DataFlags data;
    int k = 5;
    std::string metric = "euclidean";
    int jobs = 1;
    std::string out;
    std::string neighborhoods_out;
};

int run_score(const ScoreOpts& o) {
    const Dataset data = load_input(o.data);
    const DistanceMetric metric = parse_metric(o.metric);
    const auto scores = score_dataset(data, o.k, metric, nullptr, o.jobs);

    const fs::path out = resolve_out(o.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_scores_csv(out, data, scores);

    std::vector<std::string> outputs{out.filename().string()};
    if (!o.neighborhoods_out.empty()) {
        const fs::path nb_out = resolve_out(o.neighborhoods_out);
        if (nb_out.has_parent_path()) fs::create_directories(nb_out.parent_path());
        write_neighborhoods_csv(nb_out, neighborhoods(data, o.k, metric, {}, o.jobs));
        outputs.push_back(nb_out.filename().string());
    }

    write_manifest(fs::path(out.string() + ".manifest.json"),
                   make_manifest("score",
                                 {{"label_col", o.data.label_col},
                                  {"id_col", o.data.id_col},
                                  {"k", format_int(o.k)},
                                  {"metric", o.metric}},
                                 {o.data.input}, outputs));
    std::cout << "wrote " << out.string() << " (" << scores.size() << " rows)\n";
    return 0;
}

// ---- weight ------------------------------------------------------------

struct WeightOpts {
    std::string scores;
    std::string mode = "logistic";
    double alpha = 4.0;
    double beta = 1.13;
    double gamma = 1.25;
    double eta = 0.25;
    bool beta_median = false;
    double g0 = 0.0, g1 = 0.0, g2 = 0.0;
    std::string out;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
    CLI::Option* beta_median_opt = nullptr;
    CLI::Option* g0_opt = nullptr;
    CLI::Option* g1_opt = nullptr;
    CLI::Option* g2_opt = nullptr;
};

int run_weight(const WeightOpts& o) {
    const bool logistic = o.mode == "logistic";
    const bool any_logistic_flag = o.alpha_opt->count() || o.beta_opt->count() ||
                                   o.gamma_opt->count() || o.eta_opt->count() ||
                                   o.beta_median_opt->count();
    const bool any_group_flag = o.g0_opt->count() || o.g1_opt->count() || o.g2_opt->count();
    if (logistic && any_group_flag) {
        throw UsageError("weight: --g0/--g1/--g2 require --mode groups");
    }
    if (!logistic && any_logistic_flag) {
        throw UsageError("weight: logistic parameters conflict with --mode groups");
    }
    if (!logistic && (!o.g0_opt->count() || !o.g1_opt->count() || !o.g2_opt->count())) {
        throw UsageError("weight: --mode groups needs --g0, --g1 and --g2");
    }

    const auto scores = read_scores_csv(o.scores);
    const fs::path out = resolve_out(o.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());

    std::vector<std::vector<std::string>> rows;
    rows.reserve(scores.size());
    std::vector<ManifestEntry> config{{"mode", o.mode}};
    if (logistic) {
        WeightMapConfig cfg;
        cfg.alpha = o.alpha;
        cfg.beta = o.beta;
        cfg.gamma = o.gamma;
        cfg.eta = o.eta;
        if (o.beta_median) {
            std::vector<double> values;
            values.reserve(scores.size());
            for (const auto& s : scores) values.push_back(s.score);
            cfg.beta = default_beta(values);
        }
        cfg.validate();
        for (const auto& s : scores) {
            rows.push_back({format_int(s.sample_id), format_double(s.score), "-",
                            format_double(logistic_weight(s.score, cfg))});
        }
        config.push_back({"alpha", format_double(cfg.alpha)});
        config.push_back({"beta", format_double(cfg.beta)});
        config.push_back({"gamma", format_double(cfg.gamma)});
        config.push_back({"eta", format_double(cfg.eta)});
        config.push_back({"beta_median", o.beta_median ? "true" : "false"});
    } else {
        const GroupSplit split = split_groups(scores);
        const auto by_id = group_weights(split, {o.g0, o.g1, o.g2});
        std::unordered_map<SampleId, const char*> group_of;
        for (const auto id : split.g0_ids) group_of[id] = "G0";
        for (const auto id : split.g1_ids) group_of[id] = "G1";
        for (const auto id : split.g2_ids) group_of[id] = "G2";
        for (const auto& s : scores) {
            rows.push_back({format_int(s.sample_id), format_double(s.score),
                            group_of.at(s.sample_id), format_double(by_id.at(s.sample_id))});
        }
        config.push_back({"g0", format_double(o.g0)});
        config.push_back({"g1", format_double(o.g1)});
        config.push_back({"g2", format_double(o.g2)});
    }
    write_csv(out, {"sample_id", "score", "group", "weight"}, rows);
    write_manifest(fs::path(out.string() + ".manifest.json"),
                   make_manifest("weight", config, {o.scores}, {out.filename().string()}));
    std::cout << "wrote " << out.string() << " (" << rows.size() << " rows)\n";
    return 0;
}

// ---- train -------------------------------------------------------------

struct TrainOpts {
    DataFlags data;
    TrainFlags train;
    std::string weights;
    std::uint64_t seed = 0;
    bool renormalize = false;
    std::string eval;
    std::string out;
};

int run_train(const TrainOpts& o) {
    const Dataset data = load_input(o.data);
    std::vector<double> weights(static_cast<std::size_t>(data.size()), 1.0);
    if (!o.weights.empty()) weights = align_weights(data, read_weight_file(o.weights));

    TrainConfig cfg = to_train_config(o.train);
    cfg.seed = o.seed;
    cfg.renormalize_weights = o.renormalize;
    const TrainedModel model = train(data, weights, cfg);

    const fs::path out = resolve_out(o.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_model(model.params, out);

    std::cout << "final loss " << format_double(model.loss_trace.back()) << ", train accuracy "
              << format_double(model.train_accuracy) << "\n";
    if (!o.eval.empty()) {
        DataFlags eval_flags = o.data;
        eval_flags.input = o.eval;
        eval_flags.classes = data.class_count;
        const EvalResult result = evaluate(model.params, load_input(eval_flags));
        std::cout << "eval accuracy " << format_double(result.accuracy) << "\n";
    }

    std::vector<ManifestEntry> config = train_entries(o.train);
    config.push_back({"seed", format_int(static_cast<std::int64_t>(o.seed))});
    config.push_back({"renormalize", o.renormalize ? "true" : "false"});
    std::vector<fs::path> inputs{o.data.input};
    if (!o.weights.empty()) inputs.push_back(o.weights);
    if (!o.eval.empty()) inputs.push_back(o.eval);
    write_manifest(fs::path(out.string() + ".manifest.json"),
                   make_manifest("train", config, inputs, {out.filename().string()}));
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

// ---- experiment commands -----------------------------------------------

struct GridOpts {
    DataFlags data;
    TrainFlags train;
    int k = 5;
    std::string metric = "euclidean";
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    int seeds = 10;
    std::vector<double> grid{kDefaultWeightGrid.begin(), kDefaultWeightGrid.end()};
    int jobs = 1;
    std::string out;
};

ExperimentConfig to_experiment_config(const TrainFlags& train, int k, const std::string& metric,
                                      double test_fraction, std::uint64_t seed, int jobs) {
    ExperimentConfig cfg;
    cfg.train = to_train_config(train);
    cfg.k = k;
    cfg.metric = parse_metric(metric);
    cfg.test_fraction = test_fraction;
    cfg.master_seed = seed;
    cfg.jobs = jobs;
    return cfg;
}

int run_grid_search(const GridOpts& o) {
    const Dataset data = load_input(o.data);
    const ExperimentConfig cfg =
        to_experiment_config(o.train, o.k, o.metric, o.test_fraction, o.seed, o.jobs);
    const GridSearchReport report = grid_search(data, o.grid, o.seeds, cfg);

    const fs::path dir = default_out_dir(o.out, "grid-search");
    write_grid_report(report, dir);

    std::vector<ManifestEntry> config = train_entries(o.train);
    config.push_back({"k", format_int(o.k)});
    config.push_back({"metric", o.metric});
    config.push_back({"test_fraction", format_double(o.test_fraction)});
    config.push_back({"master_seed", format_int(static_cast<std::int64_t>(o.seed))});
    config.push_back({"seeds_per_combination", format_int(o.seeds)});
    std::string grid_text;
    for (const double w : o.grid) {
        if (!grid_text.empty()) grid_text += ",";
        grid_text += format_double(w);
    }
    config.push_back({"grid", grid_text});
    write_manifest(dir / "manifest.json",
                   make_manifest("grid-search", config, {o.data.input},
                                 {"grid_report.json", "grid_report.csv"}));

    const auto& best = report.combinations.front();
    std::cout << "best: " << best.mode << " " << format_double(best.weights[0]) << "/"
              << format_double(best.weights[1]) << "/" << format_double(best.weights[2])
              << " mean_delta " << format_double(best.mean_delta) << "\n";
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

struct PairedOpts {
    DataFlags data;
    TrainFlags train;
    int k = 5;
    std::string metric = "euclidean";
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    int pairs = 1000;
    double alpha = 4.0, beta = 1.13, gamma = 1.25, eta = 0.25;
    bool beta_median = false;
    bool control_uniform = false;
    int jobs = 1;
    std::string out;
};

int run_paired_eval(const PairedOpts& o) {
    const Dataset data = load_input(o.data);
    const ExperimentConfig cfg =
        to_experiment_config(o.train, o.k, o.metric, o.test_fraction, o.seed, o.jobs);

    std::optional<WeightMapConfig> weight_map;
    if (!o.control_uniform) {
        WeightMapConfig wm;
        wm.alpha = o.alpha;
        wm.beta = o.beta;
        wm.gamma = o.gamma;
        wm.eta = o.eta;
        weight_map = wm;
    }
    const PairedRunReport report =
        paired_evaluation(data, weight_map, o.pairs, cfg, o.beta_median);

    const fs::path dir = default_out_dir(o.out, "paired-eval");
    write_paired_report(report, dir);

    std::vector<ManifestEntry> config = train_entries(o.train);
    config.push_back({"k", format_int(o.k)});
    config.push_back({"metric", o.metric});
    config.push_back({"test_fraction", format_double(o.test_fraction)});
    config.push_back({"master_seed", format_int(static_cast<std::int64_t>(o.seed))});
    config.push_back({"pairs", format_int(o.pairs)});
    if (o.control_uniform) {
        config.push_back({"control_uniform", "true"});
    } else {
        config.push_back({"alpha", format_double(o.alpha)});
        config.push_back({"beta", format_double(report.beta_used)});
        config.push_back({"gamma", format_double(o.gamma)});
        config.push_back({"eta", format_double(o.eta)});
        config.push_back({"beta_median", o.beta_median ? "true" : "false"});
    }
    write_manifest(dir / "manifest.json",
                   make_manifest("paired-eval", config, {o.data.input},
                                 {"report.json", "paired_runs.csv", "histogram.csv"}));

    std::cout << "baseline mean " << format_double(report.baseline_mean) << " sd "
              << format_double(report.baseline_stddev) << "; weighted mean "
              << format_double(report.weighted_mean) << " sd "
              << format_double(report.weighted_stddev) << "; variance ratio "
              << format_double(report.variance_ratio) << "\n";
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

struct BiasVarOpts {
    DomainFlags domain;
    TrainFlags train;
    int draws = 20;
    std::int64_t n_train = 500;
    std::int64_t test_points = 1000;
    int k = 5;
    std::string metric = "euclidean";
    std::uint64_t seed = 0;
    bool compare = false;
    double alpha = 4.0, beta = 1.13, gamma = 1.25, eta = 0.25;
    int jobs = 1;
    std::string out;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
};

int run_bias_var(const BiasVarOpts& o) {
    const bool any_map_flag =
        o.alpha_opt->count() || o.beta_opt->count() || o.gamma_opt->count() || o.eta_opt->count();
    if (!o.compare && any_map_flag) {
        throw UsageError("bias-var: weight-map parameters require --compare");
    }
    const SyntheticDomain domain = resolve_domain(o.domain, "bias-var");
    const ExperimentConfig cfg =
        to_experiment_config(o.train, o.k, o.metric, 0.2, o.seed, o.jobs);
    const fs::path dir = default_out_dir(o.out, "bias-var");

    std::vector<ManifestEntry> config = domain_entries(o.domain, domain);
    for (auto& entry : train_entries(o.train)) config.push_back(std::move(entry));
    config.push_back({"draws", format_int(o.draws)});
    config.push_back({"n_train", format_int(o.n_train)});
    config.push_back({"test_points", format_int(o.test_points)});
    config.push_back({"master_seed", format_int(static_cast<std::int64_t>(o.seed))});
    std::vector<fs::path> inputs;
    if (!o.domain.domain_file.empty()) inputs.push_back(o.domain.domain_file);

    if (o.compare) {
        WeightMapConfig wm;
        wm.alpha = o.alpha;
        wm.beta = o.beta;
        wm.gamma = o.gamma;
        wm.eta = o.eta;
        const BiasVarianceComparison cmp =
            compare_bias_variance(domain, wm, o.draws, o.n_train, o.test_points, cfg);
        write_bias_variance_comparison(cmp, dir);
        config.push_back({"k", format_int(o.k)});
        config.push_back({"metric", o.metric});
        config.push_back({"alpha", format_double(wm.alpha)});
        config.push_back({"beta", format_double(wm.beta)});
        config.push_back({"gamma", format_double(wm.gamma)});
        config.push_back({"eta", format_double(wm.eta)});
        write_manifest(dir / "manifest.json",
                       make_manifest("bias-var", config, inputs, {"report.json", "summary.csv"}));
        std::cout << "baseline bias " << format_double(cmp.baseline.bias) << " variance "
                  << format_double(cmp.baseline.variance) << "; weighted bias "
                  << format_double(cmp.weighted.bias) << " variance "
                  << format_double(cmp.weighted.variance) << "\n";
    } else {
        const BiasVarianceReport report =
            bias_variance(domain, o.draws, o.n_train, o.test_points, cfg);
        write_bias_variance_report(report, dir);
        write_manifest(dir / "manifest.json",
                       make_manifest("bias-var", config, inputs, {"report.json", "summary.csv"}));
        std::cout << "bias " << format_double(report.bias) << " variance "
                  << format_double(report.variance) << " mse " << format_double(report.mse)
                  << "\n";
    }
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-NN uncertainty scoring, logistic sample weighting, deterministic weighted "
                 "training and the experiment protocols built on them"};
    app.require_subcommand(1);

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "sample a synthetic labeled dataset");
    add_domain_flags(gen_cmd, gen.domain);
    gen_cmd->add_option("--n", gen.n, "number of samples")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed, "generation seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "output directory");

    ScoreOpts score;
    auto* score_cmd = app.add_subcommand("score", "compute k-NN uncertainty scores");
    add_data_flags(score_cmd, score.data);
    score_cmd->add_option("--k", score.k, "neighborhood size (center included)")->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    score_cmd->add_option("--metric", score.metric, "distance metric")->capture_default_str()
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    score_cmd->add_option("--jobs", score.jobs, "worker threads (0 = all)")->capture_default_str()
        ->check(CLI::Range(0, 4096));
    score_cmd->add_option("--out", score.out, "scores CSV path")->required();
    score_cmd->add_option("--neighborhoods", score.neighborhoods_out,
                          "also dump the neighborhoods to this CSV");

    WeightOpts weight;
    auto* weight_cmd = app.add_subcommand("weight", "map scores to training weights");
    weight_cmd->add_option("--scores", weight.scores, "scores CSV from the score step")->required();
    weight_cmd->add_option("--mode", weight.mode, "logistic or groups")->capture_default_str()
        ->check(CLI::IsMember({"logistic", "groups"}));
    weight.alpha_opt = weight_cmd->add_option("--alpha", weight.alpha, "logistic steepness")->capture_default_str();
    weight.beta_opt = weight_cmd->add_option("--beta", weight.beta, "logistic center")->capture_default_str();
    weight.gamma_opt = weight_cmd->add_option("--gamma", weight.gamma, "logistic range")->capture_default_str();
    weight.eta_opt = weight_cmd->add_option("--eta", weight.eta, "logistic floor")->capture_default_str();
    weight.beta_median_opt = weight_cmd->add_flag(
        "--beta-median", weight.beta_median, "center the logistic at the median nonzero score");
    weight.beta_median_opt->excludes(weight.beta_opt);
    weight.g0_opt = weight_cmd->add_option("--g0", weight.g0, "weight for the zero-score group");
    weight.g1_opt = weight_cmd->add_option("--g1", weight.g1, "weight for the lower-score half");
    weight.g2_opt = weight_cmd->add_option("--g2", weight.g2, "weight for the upper-score half");
    weight_cmd->add_option("--out", weight.out, "weights CSV path")->required();

    TrainOpts train_opts;
    auto* train_cmd = app.add_subcommand("train", "train the weighted classifier");
    add_data_flags(train_cmd, train_opts.data);
    add_train_flags(train_cmd, train_opts.train);
    train_cmd->add_option("--weights", train_opts.weights,
                          "weights CSV (default: every sample weight 1.0)");
    train_cmd->add_option("--seed", train_opts.seed, "training seed")->capture_default_str();
    train_cmd->add_flag("--renormalize", train_opts.renormalize,
                        "divide each batch by its weight sum instead of its size");
    train_cmd->add_option("--eval", train_opts.eval, "held-out CSV to evaluate after training");
    train_cmd->add_option("--out", train_opts.out, "model checkpoint path")->required();

    GridOpts grid;
    auto* grid_cmd = app.add_subcommand("grid-search", "group-weight grid search with random control");
    add_data_flags(grid_cmd, grid.data);
    add_train_flags(grid_cmd, grid.train);
    grid_cmd->add_option("--k", grid.k, "neighborhood size")->capture_default_str();
    grid_cmd->add_option("--metric", grid.metric, "distance metric")->capture_default_str()
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    grid_cmd->add_option("--test-fraction", grid.test_fraction, "held-out fraction")->capture_default_str();
    grid_cmd->add_option("--seed", grid.seed, "master seed")->capture_default_str();
    grid_cmd->add_option("--seeds", grid.seeds, "training seeds per combination")->capture_default_str()
        ->check(CLI::PositiveNumber);
    grid_cmd->add_option("--grid", grid.grid, "comma-separated weight grid")->delimiter(',');
    grid_cmd->add_option("--jobs", grid.jobs, "worker threads (0 = all)")->capture_default_str();
    grid_cmd->add_option("--out", grid.out, "output directory");

    PairedOpts paired;
    auto* paired_cmd = app.add_subcommand("paired-eval", "paired baseline vs weighted runs");
    add_data_flags(paired_cmd, paired.data);
    add_train_flags(paired_cmd, paired.train);
    paired_cmd->add_option("--k", paired.k, "neighborhood size")->capture_default_str();
    paired_cmd->add_option("--metric", paired.metric, "distance metric")->capture_default_str()
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    paired_cmd->add_option("--test-fraction", paired.test_fraction, "held-out fraction")->capture_default_str();
    paired_cmd->add_option("--seed", paired.seed, "master seed")->capture_default_str();
    paired_cmd->add_option("--pairs,--n-pairs", paired.pairs, "number of seed pairs")->capture_default_str()
        ->check(CLI::Range(2, 100000));
    auto* p_alpha = paired_cmd->add_option("--alpha", paired.alpha, "logistic steepness")->capture_default_str();
    auto* p_beta = paired_cmd->add_option("--beta", paired.beta, "logistic center")->capture_default_str();
    auto* p_gamma = paired_cmd->add_option("--gamma", paired.gamma, "logistic range")->capture_default_str();
    auto* p_eta = paired_cmd->add_option("--eta", paired.eta, "logistic floor")->capture_default_str();
    auto* p_median = paired_cmd->add_flag("--beta-median", paired.beta_median,
                                          "center the logistic at the median nonzero score");
    p_median->excludes(p_beta);
    auto* p_control = paired_cmd->add_flag(
        "--control-uniform", paired.control_uniform,
        "run the weighted arm with all-1.0 weights (control; arms must coincide)");
    p_control->excludes(p_alpha);
    p_control->excludes(p_beta);
    p_control->excludes(p_gamma);
    p_control->excludes(p_eta);
    p_control->excludes(p_median);
    paired_cmd->add_option("--jobs", paired.jobs, "worker threads (0 = all)")->capture_default_str();
    paired_cmd->add_option("--out", paired.out, "output directory");

    BiasVarOpts bias;
    auto* bias_cmd = app.add_subcommand("bias-var", "Monte Carlo bias-variance decomposition");
    add_domain_flags(bias_cmd, bias.domain);
    add_train_flags(bias_cmd, bias.train);
    bias_cmd->add_option("--draws", bias.draws, "independent training-set draws")->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    bias_cmd->add_option("--n-train", bias.n_train, "training samples per draw")->capture_default_str()
        ->check(CLI::PositiveNumber);
    bias_cmd->add_option("--test-points", bias.test_points, "fixed noise-free test points")->capture_default_str()
        ->check(CLI::PositiveNumber);
    bias_cmd->add_option("--k", bias.k, "neighborhood size (weighted arm)")->capture_default_str();
    bias_cmd->add_option("--metric", bias.metric, "distance metric (weighted arm)")->capture_default_str()
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    bias_cmd->add_option("--seed", bias.seed, "master seed")->capture_default_str();
    bias_cmd->add_flag("--compare", bias.compare,
                       "also run the logistic-weighted arm on the same draws");
    bias.alpha_opt = bias_cmd->add_option("--alpha", bias.alpha, "logistic steepness")->capture_default_str();
    bias.beta_opt = bias_cmd->add_option("--beta", bias.beta, "logistic center")->capture_default_str();
    bias.gamma_opt = bias_cmd->add_option("--gamma", bias.gamma, "logistic range")->capture_default_str();
    bias.eta_opt = bias_cmd->add_option("--eta", bias.eta, "logistic floor")->capture_default_str();
    bias_cmd->add_option("--jobs", bias.jobs, "worker threads (0 = all)")->capture_default_str();
    bias_cmd->add_option("--out", bias.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_cmd->parsed()) return run_gen_data(gen);
        if (score_cmd->parsed()) return run_score(score);
        if (weight_cmd->parsed()) return run_weight(weight);
        if (train_cmd->parsed()) return run_train(train_opts);
        if (grid_cmd->parsed()) return run_grid_search(grid);
        if (paired_cmd->parsed()) return run_paired_eval(paired);
        if (bias_cmd->parsed()) return run_bias_var(bias);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
