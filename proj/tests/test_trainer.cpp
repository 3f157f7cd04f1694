#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nbweight/dataset.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"
#include "nbweight/trainer.hpp"
#include "temp_dir.hpp"

using namespace nbweight;

namespace {

Dataset make_dataset(const Matrix& features, std::vector<int> labels, int class_count) {
    Dataset data;
    data.features = features;
    data.labels = std::move(labels);
    data.class_count = class_count;
    for (std::int64_t i = 0; i < features.rows; ++i) data.ids.push_back(i);
    for (int c = 0; c < class_count; ++c) data.label_names.push_back(std::to_string(c));
    for (std::int64_t f = 0; f < features.cols; ++f) data.feature_names.push_back("x" + std::to_string(f));
    return data;
}

// two tight blobs around +/- (5, 5); linearly separable by a wide margin
Dataset separable_blobs(std::int64_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    Matrix features(2 * per_class, 2);
    std::vector<int> labels;
    for (std::int64_t i = 0; i < 2 * per_class; ++i) {
        const int cls = i < per_class ? 0 : 1;
        const double center = cls == 0 ? -5.0 : 5.0;
        features.at(i, 0) = center + 0.3 * rng.normal();
        features.at(i, 1) = center + 0.3 * rng.normal();
        labels.push_back(cls);
    }
    return make_dataset(features, std::move(labels), 2);
}

// independent check that a dataset is linearly separable at all
bool perceptron_separates(const Dataset& data, int max_updates) {
    double w0 = 0.0, w1 = 0.0, bias = 0.0;
    int updates = 0;
    while (updates <= max_updates) {
        bool clean = true;
        for (std::int64_t i = 0; i < data.features.rows; ++i) {
            const double y = data.labels[static_cast<std::size_t>(i)] == 0 ? -1.0 : 1.0;
            const double margin = y * (w0 * data.features.at(i, 0) + w1 * data.features.at(i, 1) + bias);
            if (margin <= 0.0) {
                w0 += y * data.features.at(i, 0);
                w1 += y * data.features.at(i, 1);
                bias += y;
                ++updates;
                clean = false;
            }
        }
        if (clean) return true;
    }
    return false;
}

struct RandomInstance {
    ModelParameters params;
    Matrix x;
    std::vector<int> y;
    std::vector<double> w;
};

RandomInstance random_instance(Rng& rng) {
    RandomInstance inst;
    const int d = 1 + static_cast<int>(rng.below(4));
    const int h = 2 + static_cast<int>(rng.below(7));
    const int c = 2 + static_cast<int>(rng.below(2));
    const auto n = static_cast<std::int64_t>(2 + rng.below(15));
    inst.params = init_parameters(d, h, c, rng.below(1'000'000));
    inst.x = Matrix(n, d);
    for (double& v : inst.x.values) v = 2.0 * rng.uniform() - 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
        inst.y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(c))));
        inst.w.push_back(0.25 + 2.0 * rng.uniform());
    }
    return inst;
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("uniform weights reduce the loss to a plain mean cross entropy") {
    Matrix probs(3, 2);
    probs.at(0, 0) = 0.9; probs.at(0, 1) = 0.1;
    probs.at(1, 0) = 0.4; probs.at(1, 1) = 0.6;
    probs.at(2, 0) = 0.25; probs.at(2, 1) = 0.75;
    const std::vector<int> labels = {0, 1, 0};
    const std::vector<double> ones = {1.0, 1.0, 1.0};
    const double expected = (-std::log(0.9) - std::log(0.6) - std::log(0.25)) / 3.0;
    CHECK(weighted_loss(probs, labels, ones) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("the loss is linear in a single sample's weight") {
    Matrix probs(1, 2);
    probs.at(0, 0) = 0.3; probs.at(0, 1) = 0.7;
    const std::vector<int> labels = {0};
    const double base = weighted_loss(probs, labels, std::vector<double>{1.0});
    const double doubled = weighted_loss(probs, labels, std::vector<double>{2.0});
    CHECK(doubled == 2.0 * base);
}

TEST_CASE("confident correct predictions cost nothing") {
    Matrix probs(2, 3);
    probs.at(0, 1) = 1.0;
    probs.at(1, 2) = 1.0;
    const std::vector<int> labels = {1, 2};
    const std::vector<double> ones = {1.0, 1.0};
    CHECK(weighted_loss(probs, labels, ones) <= 1e-11);
}

TEST_CASE("zero probability at the label is clamped, not infinite") {
    Matrix probs(1, 2);
    probs.at(0, 0) = 0.0; probs.at(0, 1) = 1.0;
    const std::vector<int> labels = {0};
    const double loss = weighted_loss(probs, labels, std::vector<double>{1.0});
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
}

TEST_CASE("loss input validation") {
    Matrix probs(2, 2);
    probs.at(0, 0) = 0.5; probs.at(0, 1) = 0.5;
    probs.at(1, 0) = 0.5; probs.at(1, 1) = 0.5;
    const std::vector<int> labels = {0, 1};
    CHECK_THROWS_AS(weighted_loss(probs, labels, std::vector<double>{1.0}), DataError);
    CHECK_THROWS_AS(weighted_loss(probs, labels, std::vector<double>{1.0, -0.5}), DataError);
    CHECK_THROWS_AS(weighted_loss(probs, std::vector<int>{0, 5}, std::vector<double>{1.0, 1.0}), DataError);
    Matrix bad(1, 2);
    bad.at(0, 0) = 0.9; bad.at(0, 1) = 0.9;
    CHECK_THROWS_AS(weighted_loss(bad, std::vector<int>{0}, std::vector<double>{1.0}), DataError);
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        RandomInstance inst = random_instance(rng);
        double analytic_loss = 0.0;
        const Gradients grads = weighted_batch_gradients(inst.params, inst.x, inst.y, inst.w, &analytic_loss);
        CHECK(analytic_loss == weighted_batch_loss(inst.params, inst.x, inst.y, inst.w));

        const double step = 1e-5;
        double worst = 0.0;
        const auto probe = [&](double& slot, double analytic) {
            const double saved = slot;
            slot = saved + step;
            const double up = weighted_batch_loss(inst.params, inst.x, inst.y, inst.w);
            slot = saved - step;
            const double down = weighted_batch_loss(inst.params, inst.x, inst.y, inst.w);
            slot = saved;
            const double fd = (up - down) / (2.0 * step);
            worst = std::max(worst, std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1.0}));
        };
        for (std::size_t i = 0; i < inst.params.w1.values.size(); ++i) probe(inst.params.w1.values[i], grads.w1.values[i]);
        for (std::size_t i = 0; i < inst.params.b1.size(); ++i) probe(inst.params.b1[i], grads.b1[i]);
        for (std::size_t i = 0; i < inst.params.w2.values.size(); ++i) probe(inst.params.w2.values[i], grads.w2.values[i]);
        for (std::size_t i = 0; i < inst.params.b2.size(); ++i) probe(inst.params.b2[i], grads.b2[i]);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("doubling every weight doubles the loss and the gradients exactly") {
    Rng rng(7);
    RandomInstance inst = random_instance(rng);
    std::vector<double> doubled = inst.w;
    for (double& v : doubled) v *= 2.0;

    double loss1 = 0.0, loss2 = 0.0;
    const Gradients g1 = weighted_batch_gradients(inst.params, inst.x, inst.y, inst.w, &loss1);
    const Gradients g2 = weighted_batch_gradients(inst.params, inst.x, inst.y, doubled, &loss2);

    CHECK(loss2 == 2.0 * loss1);
    for (std::size_t i = 0; i < g1.w1.values.size(); ++i) CHECK(g2.w1.values[i] == 2.0 * g1.w1.values[i]);
    for (std::size_t i = 0; i < g1.b1.size(); ++i) CHECK(g2.b1[i] == 2.0 * g1.b1[i]);
    for (std::size_t i = 0; i < g1.w2.values.size(); ++i) CHECK(g2.w2.values[i] == 2.0 * g1.w2.values[i]);
    for (std::size_t i = 0; i < g1.b2.size(); ++i) CHECK(g2.b2[i] == 2.0 * g1.b2[i]);
}

TEST_CASE("zero-weight samples are inert") {
    Rng rng(13);
    RandomInstance inst = random_instance(rng);
    inst.w[0] = 0.0;
    inst.w[inst.w.size() / 2] = 0.0;

    // changing anything about a zero-weighted sample must not move the numbers
    RandomInstance altered = inst;
    altered.y[0] = (altered.y[0] + 1) % inst.params.output_dim;
    for (std::int64_t f = 0; f < altered.x.cols; ++f) altered.x.at(0, f) += 3.5;

    double loss_a = 0.0, loss_b = 0.0;
    const Gradients ga = weighted_batch_gradients(inst.params, inst.x, inst.y, inst.w, &loss_a);
    const Gradients gb = weighted_batch_gradients(altered.params, altered.x, altered.y, altered.w, &loss_b);
    CHECK(loss_a == loss_b);
    CHECK(ga.w1.values == gb.w1.values);
    CHECK(ga.b1 == gb.b1);
    CHECK(ga.w2.values == gb.w2.values);
    CHECK(ga.b2 == gb.b2);

    // dropping the zero-weighted rows only rescales by the changed sample count
    Matrix kept_x(inst.x.rows - 2, inst.x.cols);
    std::vector<int> kept_y;
    std::vector<double> kept_w;
    std::int64_t out = 0;
    for (std::int64_t i = 0; i < inst.x.rows; ++i) {
        if (inst.w[static_cast<std::size_t>(i)] == 0.0) continue;
        for (std::int64_t f = 0; f < inst.x.cols; ++f) kept_x.at(out, f) = inst.x.at(i, f);
        kept_y.push_back(inst.y[static_cast<std::size_t>(i)]);
        kept_w.push_back(inst.w[static_cast<std::size_t>(i)]);
        ++out;
    }
    const double loss_kept = weighted_batch_loss(inst.params, kept_x, kept_y, kept_w);
    const double n_full = static_cast<double>(inst.x.rows);
    const double n_kept = static_cast<double>(kept_x.rows);
    CHECK(rel_gap(loss_a * n_full, loss_kept * n_kept) <= 1e-14);
}

TEST_CASE("training is bit-identical for a fixed seed") {
    const Dataset data = separable_blobs(20, 3);
    const std::vector<double> ones(static_cast<std::size_t>(data.features.rows), 1.0);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.hidden_dim = 6;
    cfg.seed = 42;

    const TrainedModel a = train(data, ones, cfg);
    const TrainedModel b = train(data, ones, cfg);
    CHECK(a.params.w1.values == b.params.w1.values);
    CHECK(a.params.b1 == b.params.b1);
    CHECK(a.params.w2.values == b.params.w2.values);
    CHECK(a.params.b2 == b.params.b2);
    CHECK(a.loss_trace == b.loss_trace);
    CHECK(a.loss_trace.size() == 8);

    cfg.seed = 43;
    const TrainedModel c = train(data, ones, cfg);
    CHECK(a.params.w1.values != c.params.w1.values);
}

TEST_CASE("zero-weighted samples do not influence training at all") {
    Dataset data = separable_blobs(15, 9);
    std::vector<double> weights(static_cast<std::size_t>(data.features.rows), 1.0);
    weights[3] = 0.0;
    weights[20] = 0.0;

    Dataset poisoned = data;
    poisoned.labels[3] = 1 - poisoned.labels[3];
    poisoned.labels[20] = 1 - poisoned.labels[20];

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.hidden_dim = 4;
    cfg.batch_size = 8;
    cfg.seed = 17;

    const TrainedModel a = train(data, weights, cfg);
    const TrainedModel b = train(poisoned, weights, cfg);
    CHECK(a.params.w1.values == b.params.w1.values);
    CHECK(a.params.b1 == b.params.b1);
    CHECK(a.params.w2.values == b.params.w2.values);
    CHECK(a.params.b2 == b.params.b2);
    CHECK(a.loss_trace == b.loss_trace);
}

TEST_CASE("an easily separable problem is learned to perfection") {
    const Dataset data = separable_blobs(40, 5);
    REQUIRE(perceptron_separates(data, 10000));

    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.hidden_dim = 8;
    cfg.learning_rate = 0.1;
    cfg.seed = 1;
    const std::vector<double> ones(static_cast<std::size_t>(data.features.rows), 1.0);
    const TrainedModel model = train(data, ones, cfg);
    CHECK(model.train_accuracy == 1.0);
    CHECK(model.loss_trace.back() < model.loss_trace.front());
}

TEST_CASE("a numeric blowup reports where it happened") {
    const Dataset data = separable_blobs(1, 2);
    const std::vector<double> huge(2, 1e308);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 2;
    cfg.hidden_dim = 4;
    cfg.learning_rate = 10.0;
    try {
        train(data, huge, cfg);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        const std::string message = e.what();
        CHECK(message.find("epoch") != std::string::npos);
        CHECK(message.find("batch") != std::string::npos);
    }
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = TrainConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = TrainConfig{};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = TrainConfig{};
    cfg.hidden_dim = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);

    const Dataset data = separable_blobs(5, 1);
    cfg = TrainConfig{};
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(data, std::vector<double>{1.0}, cfg), DataError);
    std::vector<double> negative(static_cast<std::size_t>(data.features.rows), 1.0);
    negative[2] = -1.0;
    CHECK_THROWS_AS(train(data, negative, cfg), DataError);
}

TEST_CASE("an all-zero output layer predicts uniformly and ties go to class 0") {
    const Dataset data = separable_blobs(12, 4);
    ModelParameters params = init_parameters(2, 3, 2, 6);
    for (double& v : params.w2.values) v = 0.0;
    for (double& v : params.b2) v = 0.0;

    const EvalResult eval = evaluate(params, data);
    std::int64_t class0 = 0;
    for (const int label : data.labels) class0 += label == 0 ? 1 : 0;
    CHECK(eval.accuracy == static_cast<double>(class0) / static_cast<double>(data.features.rows));
    for (std::int64_t i = 0; i < eval.probabilities.rows; ++i) {
        CHECK(eval.probabilities.at(i, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(eval.probabilities.at(i, 1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    // every prediction lands in column 0 of the confusion matrix
    CHECK(eval.confusion[0][0] == class0);
    CHECK(eval.confusion[1][0] == data.features.rows - class0);
    CHECK(eval.confusion[0][1] == 0);
    CHECK(eval.confusion[1][1] == 0);
}

TEST_CASE("probability rows from evaluate sum to one") {
    const Dataset data = separable_blobs(10, 8);
    const std::vector<double> ones(static_cast<std::size_t>(data.features.rows), 1.0);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.hidden_dim = 5;
    const TrainedModel model = train(data, ones, cfg);
    const EvalResult eval = evaluate(model.params, data);
    for (std::int64_t i = 0; i < eval.probabilities.rows; ++i) {
        double sum = 0.0;
        for (std::int64_t c = 0; c < eval.probabilities.cols; ++c) sum += eval.probabilities.at(i, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("checkpoints restore parameters bit for bit") {
    TempDir tmp;
    const ModelParameters params = init_parameters(3, 7, 4, 99);
    const auto path = tmp.file("model.bin");
    save_model(params, path);
    const ModelParameters loaded = load_model(path);
    CHECK(loaded.input_dim == 3);
    CHECK(loaded.hidden_dim == 7);
    CHECK(loaded.output_dim == 4);
    CHECK(loaded.w1.values == params.w1.values);
    CHECK(loaded.b1 == params.b1);
    CHECK(loaded.w2.values == params.w2.values);
    CHECK(loaded.b2 == params.b2);

    // corrupt the magic
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
    }
    CHECK_THROWS_AS(load_model(path), DataError);

    // honest header, truncated payload
    save_model(params, path);
    const auto truncated = tmp.file("short.bin");
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(truncated, std::ios::binary);
        out.write(all.data(), static_cast<std::streamsize>(all.size() / 2));
    }
    CHECK_THROWS_AS(load_model(truncated), DataError);
}

TEST_CASE("renormalizing divides by the batch weight sum instead of its size") {
    // with every weight equal to 2 the renormalized gradient step matches the
    // unweighted one exactly, while the recorded weighted loss doubles
    const Dataset data = separable_blobs(16, 21);
    const auto n = static_cast<std::size_t>(data.features.rows);

    TrainConfig plain;
    plain.epochs = 6;
    plain.hidden_dim = 4;
    plain.seed = 30;
    const TrainedModel base = train(data, std::vector<double>(n, 1.0), plain);

    TrainConfig renorm = plain;
    renorm.renormalize_weights = true;
    const TrainedModel scaled = train(data, std::vector<double>(n, 2.0), renorm);

    CHECK(base.params.w1.values == scaled.params.w1.values);
    CHECK(base.params.b1 == scaled.params.b1);
    CHECK(base.params.w2.values == scaled.params.w2.values);
    CHECK(base.params.b2 == scaled.params.b2);
    REQUIRE(base.loss_trace.size() == scaled.loss_trace.size());
    for (std::size_t e = 0; e < base.loss_trace.size(); ++e) {
        CHECK(rel_gap(scaled.loss_trace[e], 2.0 * base.loss_trace[e]) <= 1e-15);
    }

    // without renormalizing, doubled weights double the step size, so the
    // trajectories genuinely differ
    const TrainedModel heavier = train(data, std::vector<double>(n, 2.0), plain);
    CHECK(heavier.params.w1.values != base.params.w1.values);
}
