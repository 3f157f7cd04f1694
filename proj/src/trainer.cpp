#include "nbweight/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"

namespace nbweight {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr char kModelMagic[4] = {'N', 'B', 'W', 'M'};
constexpr std::uint32_t kModelVersion = 1;

// forward pass for one batch; z1/a1/probs are resized by the callee
void forward(const ModelParameters& p, const Matrix& x, Matrix& z1, Matrix& a1, Matrix& probs) {
    const std::int64_t n = x.rows;
    const int H = p.hidden_dim;
    const int C = p.output_dim;
    z1 = Matrix(n, H);
    a1 = Matrix(n, H);
    probs = Matrix(n, C);
    for (std::int64_t r = 0; r < n; ++r) {
        const auto xr = x.row(r);
        for (int j = 0; j < H; ++j) {
            double z = p.b1[static_cast<std::size_t>(j)];
            for (int i = 0; i < p.input_dim; ++i) z += xr[static_cast<std::size_t>(i)] * p.w1.at(i, j);
            z1.at(r, j) = z;
            a1.at(r, j) = z > 0.0 ? z : 0.0;
        }
        double top = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < C; ++c) {
            double z = p.b2[static_cast<std::size_t>(c)];
            for (int j = 0; j < H; ++j) z += a1.at(r, j) * p.w2.at(j, c);
            probs.at(r, c) = z;
            top = std::max(top, z);
        }
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
            probs.at(r, c) = std::exp(probs.at(r, c) - top);
            sum += probs.at(r, c);
        }
        for (int c = 0; c < C; ++c) probs.at(r, c) /= sum;
    }
}

double loss_from_probs(const Matrix& probs, std::span<const int> y, std::span<const double> w,
                       double divisor) {
    double total = 0.0;
    for (std::int64_t r = 0; r < probs.rows; ++r) {
        const double p = std::max(probs.at(r, y[static_cast<std::size_t>(r)]), kProbFloor);
        total += w[static_cast<std::size_t>(r)] * -std::log(p);
    }
    return total / divisor;
}

void check_batch_args(const ModelParameters& p, const Matrix& x, std::span<const int> y,
                      std::span<const double> w) {
    if (x.cols != p.input_dim) throw DataError("trainer: feature dimension mismatch");
    if (static_cast<std::int64_t>(y.size()) != x.rows || y.size() != w.size()) {
        throw DataError("trainer: batch length mismatch");
    }
    if (x.rows == 0) throw DataError("trainer: empty batch");
    for (const int label : y) {
        if (label < 0 || label >= p.output_dim) throw DataError("trainer: label out of range");
    }
    for (const double weight : w) {
        if (!(weight >= 0.0) || !std::isfinite(weight)) throw DataError("trainer: weights must be >= 0 and finite");
    }
}

Gradients make_gradients(const ModelParameters& p) {
    Gradients g;
    g.w1 = Matrix(p.input_dim, p.hidden_dim);
    g.b1.assign(static_cast<std::size_t>(p.hidden_dim), 0.0);
    g.w2 = Matrix(p.hidden_dim, p.output_dim);
    g.b2.assign(static_cast<std::size_t>(p.output_dim), 0.0);
    return g;
}

// gradients of (1/divisor) * sum w_i * CE_i for one batch
Gradients batch_gradients(const ModelParameters& p, const Matrix& x, std::span<const int> y,
                          std::span<const double> w, double divisor, double* loss_out) {
    Matrix z1, a1, probs;
    forward(p, x, z1, a1, probs);
    if (loss_out) *loss_out = loss_from_probs(probs, y, w, divisor);

    Gradients g = make_gradients(p);
    const int H = p.hidden_dim;
    const int C = p.output_dim;
    std::vector<double> dz2(static_cast<std::size_t>(C));
    std::vector<double> dz1(static_cast<std::size_t>(H));
    for (std::int64_t r = 0; r < x.rows; ++r) {
        const double scale = w[static_cast<std::size_t>(r)] / divisor;
        for (int c = 0; c < C; ++c) {
            dz2[static_cast<std::size_t>(c)] =
                scale * (probs.at(r, c) - (c == y[static_cast<std::size_t>(r)] ? 1.0 : 0.0));
        }
        for (int c = 0; c < C; ++c) {
            const double d = dz2[static_cast<std::size_t>(c)];
            g.b2[static_cast<std::size_t>(c)] += d;
            for (int j = 0; j < H; ++j) g.w2.at(j, c) += a1.at(r, j) * d;
        }
        for (int j = 0; j < H; ++j) {
            double d = 0.0;
            if (z1.at(r, j) > 0.0) {
                for (int c = 0; c < C; ++c) d += dz2[static_cast<std::size_t>(c)] * p.w2.at(j, c);
            }
            dz1[static_cast<std::size_t>(j)] = d;
        }
        const auto xr = x.row(r);
        for (int j = 0; j < H; ++j) {
            const double d = dz1[static_cast<std::size_t>(j)];
            if (d == 0.0) continue;
            g.b1[static_cast<std::size_t>(j)] += d;
            for (int i = 0; i < p.input_dim; ++i) g.w1.at(i, j) += xr[static_cast<std::size_t>(i)] * d;
        }
    }
    return g;
}

void write_doubles(std::ofstream& out, const double* values, std::size_t count) {
    out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* values, std::size_t count) {
    in.read(reinterpret_cast<char*>(values), static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace

bool ModelParameters::all_finite() const {
    const auto finite = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return finite(w1.values) && finite(b1) && finite(w2.values) && finite(b2);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw DataError("train config: epochs must be >= 1");
    if (batch_size < 1) throw DataError("train config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw DataError("train config: learning_rate must be > 0");
    if (hidden_dim < 1) throw DataError("train config: hidden_dim must be >= 1");
}

double weighted_loss(const Matrix& probs, std::span<const int> labels,
                     std::span<const double> weights) {
    if (static_cast<std::int64_t>(labels.size()) != probs.rows || labels.size() != weights.size()) {
        throw DataError("weighted_loss: length mismatch");
    }
    if (probs.rows == 0) throw DataError("weighted_loss: empty prediction set");
    for (std::int64_t r = 0; r < probs.rows; ++r) {
        double sum = 0.0;
        for (std::int64_t c = 0; c < probs.cols; ++c) {
            const double p = probs.at(r, c);
            if (!(p >= 0.0) || !std::isfinite(p)) throw DataError("weighted_loss: invalid probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) throw DataError("weighted_loss: probability row does not sum to 1");
        const int label = labels[static_cast<std::size_t>(r)];
        if (label < 0 || label >= probs.cols) throw DataError("weighted_loss: label out of range");
        if (!(weights[static_cast<std::size_t>(r)] >= 0.0)) throw DataError("weighted_loss: negative weight");
    }
    return loss_from_probs(probs, labels, weights, static_cast<double>(probs.rows));
}

ModelParameters init_parameters(int input_dim, int hidden_dim, int output_dim,
                                std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1 || output_dim < 2) {
        throw DataError("init_parameters: invalid dimensions");
    }
    ModelParameters p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.output_dim = output_dim;
    p.w1 = Matrix(input_dim, hidden_dim);
    p.b1.assign(static_cast<std::size_t>(hidden_dim), 0.0);
    p.w2 = Matrix(hidden_dim, output_dim);
    p.b2.assign(static_cast<std::size_t>(output_dim), 0.0);

    Rng rng(derive_seed(seed, seed_tag::kInit));
    const double limit1 = std::sqrt(6.0 / (input_dim + hidden_dim));
    for (double& v : p.w1.values) v = rng.uniform(-limit1, limit1);
    const double limit2 = std::sqrt(6.0 / (hidden_dim + output_dim));
    for (double& v : p.w2.values) v = rng.uniform(-limit2, limit2);
    return p;
}

double weighted_batch_loss(const ModelParameters& params, const Matrix& x,
                           std::span<const int> y, std::span<const double> w) {
    check_batch_args(params, x, y, w);
    Matrix z1, a1, probs;
    forward(params, x, z1, a1, probs);
    return loss_from_probs(probs, y, w, static_cast<double>(x.rows));
}

Gradients weighted_batch_gradients(const ModelParameters& params, const Matrix& x,
                                   std::span<const int> y, std::span<const double> w,
                                   double* loss_out) {
    check_batch_args(params, x, y, w);
    return batch_gradients(params, x, y, w, static_cast<double>(x.rows), loss_out);
}

TrainedModel train(const Dataset& data, std::span<const double> weights, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (static_cast<std::int64_t>(weights.size()) != data.size()) {
        throw DataError("train: weights length does not match dataset size");
    }
    for (const double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("train: weights must be >= 0 and finite");
    }

    const std::int64_t n = data.size();
    TrainedModel model;
    model.config = cfg;
    model.seed = cfg.seed;
    model.params = init_parameters(static_cast<int>(data.dim()), cfg.hidden_dim, data.class_count, cfg.seed);

    Rng shuffle_rng(derive_seed(cfg.seed, seed_tag::kShuffle));
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    const std::int64_t batch = cfg.batch_size;
    Matrix bx;
    std::vector<int> by;
    std::vector<double> bw;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_weighted_ce = 0.0;
        for (std::int64_t start = 0, batch_index = 0; start < n; start += batch, ++batch_index) {
            const std::int64_t size = std::min(batch, n - start);
            bx = Matrix(size, data.dim());
            by.resize(static_cast<std::size_t>(size));
            bw.resize(static_cast<std::size_t>(size));
            for (std::int64_t r = 0; r < size; ++r) {
                const std::int64_t src = order[static_cast<std::size_t>(start + r)];
                std::copy_n(data.features.row(src).data(), data.dim(), bx.row(r).data());
                by[static_cast<std::size_t>(r)] = data.labels[static_cast<std::size_t>(src)];
                bw[static_cast<std::size_t>(r)] = weights[static_cast<std::size_t>(src)];
            }

            double divisor = static_cast<double>(size);
            if (cfg.renormalize_weights) {
                double weight_sum = 0.0;
                for (const double w : bw) weight_sum += w;
                if (weight_sum == 0.0) continue;  // gradient is zero anyway
                divisor = weight_sum;
            }

            double batch_loss = 0.0;
            const Gradients g = batch_gradients(model.params, bx, by, bw, divisor, &batch_loss);
            if (!std::isfinite(batch_loss)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index));
            }
            epoch_weighted_ce += batch_loss * divisor;

            const double lr = cfg.learning_rate;
            for (std::size_t i = 0; i < model.params.w1.values.size(); ++i) {
                model.params.w1.values[i] -= lr * g.w1.values[i];
            }
            for (std::size_t i = 0; i < model.params.b1.size(); ++i) model.params.b1[i] -= lr * g.b1[i];
            for (std::size_t i = 0; i < model.params.w2.values.size(); ++i) {
                model.params.w2.values[i] -= lr * g.w2.values[i];
            }
            for (std::size_t i = 0; i < model.params.b2.size(); ++i) model.params.b2[i] -= lr * g.b2[i];
        }
        model.loss_trace.push_back(epoch_weighted_ce / static_cast<double>(n));
    }

    if (!model.params.all_finite()) throw NumericError("train: non-finite parameters after training");
    model.train_accuracy = evaluate(model.params, data).accuracy;
    return model;
}

TrainedModel train(const Dataset& data, const std::unordered_map<SampleId, double>& weights_by_id,
                   const TrainConfig& cfg) {
    return train(data, align_weights(data, weights_by_id), cfg);
}

EvalResult evaluate(const ModelParameters& params, const Dataset& data) {
    data.validate();
    if (data.dim() != params.input_dim) throw DataError("evaluate: feature dimension mismatch");
    if (data.class_count > params.output_dim) throw DataError("evaluate: more classes than model outputs");

    EvalResult result;
    Matrix z1, a1;
    forward(params, data.features, z1, a1, result.probabilities);
    result.confusion.assign(static_cast<std::size_t>(params.output_dim),
                            std::vector<std::int64_t>(static_cast<std::size_t>(params.output_dim), 0));
    std::int64_t correct = 0;
    for (std::int64_t r = 0; r < data.size(); ++r) {
        int predicted = 0;  // ties keep the lowest class index
        for (int c = 1; c < params.output_dim; ++c) {
            if (result.probabilities.at(r, c) > result.probabilities.at(r, predicted)) predicted = c;
        }
        const int truth = data.labels[static_cast<std::size_t>(r)];
        result.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)]++;
        if (predicted == truth) ++correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

void save_model(const ModelParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    out.write(kModelMagic, 4);
    const std::uint32_t version = kModelVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::int32_t dims[3] = {params.input_dim, params.hidden_dim, params.output_dim};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    write_doubles(out, params.w1.values.data(), params.w1.values.size());
    write_doubles(out, params.b1.data(), params.b1.size());
    write_doubles(out, params.w2.values.data(), params.w2.values.size());
    write_doubles(out, params.b2.data(), params.b2.size());
    if (!out) throw DataError("write failed: " + path.string());
}

ModelParameters load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0) {
        throw DataError("not a model checkpoint: " + path.string());
    }
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kModelVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    std::int32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 2) {
        throw DataError("corrupt checkpoint header: " + path.string());
    }
    ModelParameters p;
    p.input_dim = dims[0];
    p.hidden_dim = dims[1];
    p.output_dim = dims[2];
    p.w1 = Matrix(p.input_dim, p.hidden_dim);
    p.b1.resize(static_cast<std::size_t>(p.hidden_dim));
    p.w2 = Matrix(p.hidden_dim, p.output_dim);
    p.b2.resize(static_cast<std::size_t>(p.output_dim));
    read_doubles(in, p.w1.values.data(), p.w1.values.size());
    read_doubles(in, p.b1.data(), p.b1.size());
    read_doubles(in, p.w2.values.data(), p.w2.values.size());
    read_doubles(in, p.b2.data(), p.b2.size());
    if (!in) throw DataError("truncated checkpoint: " + path.string());
    return p;
}

}  // namespace nbweight
