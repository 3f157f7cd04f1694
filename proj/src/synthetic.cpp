#include "nbweight/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "nbweight/csv.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"

namespace nbweight {

namespace {

// log N(x; mu, sigma^2 I)
double log_gaussian(std::span<const double> x, const GaussianComponent& comp) {
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - comp.mean[i];
        sq += diff * diff;
    }
    const double d = static_cast<double>(x.size());
    return -sq / (2.0 * comp.stddev * comp.stddev) - d * std::log(comp.stddev) -
           0.5 * d * std::log(2.0 * std::numbers::pi);
}

std::vector<std::string> split_csv_values(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, ',')) {
        const auto begin = part.find_first_not_of(" \t");
        const auto end = part.find_last_not_of(" \t");
        parts.push_back(begin == std::string::npos ? "" : part.substr(begin, end - begin + 1));
    }
    return parts;
}

}  // namespace

void SyntheticDomain::validate() const {
    if (dim < 1) throw DataError("domain: dim must be >= 1");
    if (class_count() < 2) throw DataError("domain: need at least 2 classes");
    if (mixtures.size() != priors.size()) throw DataError("domain: priors/mixtures size mismatch");

    double prior_sum = 0.0;
    for (const double p : priors) {
        if (!(p >= 0.0)) throw DataError("domain: negative class prior");
        prior_sum += p;
    }
    if (std::abs(prior_sum - 1.0) > 1e-12) throw DataError("domain: class priors must sum to 1");

    for (std::size_t c = 0; c < mixtures.size(); ++c) {
        if (mixtures[c].empty()) throw DataError("domain: class " + std::to_string(c) + " has no components");
        double weight_sum = 0.0;
        for (const auto& comp : mixtures[c]) {
            if (static_cast<int>(comp.mean.size()) != dim) throw DataError("domain: component mean dimension mismatch");
            if (!(comp.stddev > 0.0)) throw DataError("domain: degenerate mixture (stddev must be > 0)");
            if (!(comp.weight > 0.0)) throw DataError("domain: component weight must be > 0");
            weight_sum += comp.weight;
        }
        if (std::abs(weight_sum - 1.0) > 1e-12) {
            throw DataError("domain: component weights of class " + std::to_string(c) + " must sum to 1");
        }
    }
    if (noise.kind == NoiseKind::BoundaryFlip) {
        if (noise.rate < 0.0 || noise.rate > 1.0) throw DataError("domain: flip rate must be in [0, 1]");
        if (!(noise.bandwidth > 0.0)) throw DataError("domain: flip bandwidth must be > 0");
    }
}

std::vector<double> SyntheticDomain::posterior(std::span<const double> x) const {
    const int C = class_count();
    std::vector<double> log_joint(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) {
        // log sum over components, stabilized
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(mixtures[static_cast<std::size_t>(c)].size());
        for (const auto& comp : mixtures[static_cast<std::size_t>(c)]) {
            const double t = std::log(comp.weight) + log_gaussian(x, comp);
            terms.push_back(t);
            best = std::max(best, t);
        }
        double acc = 0.0;
        for (const double t : terms) acc += std::exp(t - best);
        log_joint[static_cast<std::size_t>(c)] =
            std::log(priors[static_cast<std::size_t>(c)]) + best + std::log(acc);
    }
    const double top = *std::max_element(log_joint.begin(), log_joint.end());
    std::vector<double> post(static_cast<std::size_t>(C));
    double norm = 0.0;
    for (int c = 0; c < C; ++c) {
        post[static_cast<std::size_t>(c)] = std::exp(log_joint[static_cast<std::size_t>(c)] - top);
        norm += post[static_cast<std::size_t>(c)];
    }
    for (double& p : post) p /= norm;
    return post;
}

Generated generate(const SyntheticDomain& domain, std::int64_t n, std::uint64_t seed) {
    domain.validate();
    if (n < 1) throw DataError("generate: n must be >= 1");

    const int C = domain.class_count();
    Rng rng(seed);

    Generated out;
    out.data.features = Matrix(n, domain.dim);
    out.data.labels.resize(static_cast<std::size_t>(n));
    out.data.ids.resize(static_cast<std::size_t>(n));
    out.data.class_count = C;
    for (int c = 0; c < C; ++c) out.data.label_names.push_back(std::to_string(c));
    for (int f = 0; f < domain.dim; ++f) out.data.feature_names.push_back("x" + std::to_string(f));
    out.posteriors = Matrix(n, C);
    out.status.resize(static_cast<std::size_t>(n));

    for (std::int64_t i = 0; i < n; ++i) {
        const int cls = rng.categorical(domain.priors);
        const auto& mixture = domain.mixtures[static_cast<std::size_t>(cls)];
        std::vector<double> comp_weights;
        comp_weights.reserve(mixture.size());
        for (const auto& comp : mixture) comp_weights.push_back(comp.weight);
        const auto& comp = mixture[static_cast<std::size_t>(rng.categorical(comp_weights))];

        auto x = out.data.features.row(i);
        for (int f = 0; f < domain.dim; ++f) {
            x[static_cast<std::size_t>(f)] = comp.mean[static_cast<std::size_t>(f)] + comp.stddev * rng.normal();
        }

        const auto post = domain.posterior(x);
        std::copy(post.begin(), post.end(), out.posteriors.row(i).data());

        int label = cls;
        if (domain.noise.kind == NoiseKind::BoundaryFlip) {
            // top two posterior classes (ties resolved to the lower index)
            int top1 = 0;
            for (int c = 1; c < C; ++c) {
                if (post[static_cast<std::size_t>(c)] > post[static_cast<std::size_t>(top1)]) top1 = c;
            }
            int top2 = top1 == 0 ? 1 : 0;
            for (int c = 0; c < C; ++c) {
                if (c == top1) continue;
                if (post[static_cast<std::size_t>(c)] > post[static_cast<std::size_t>(top2)]) top2 = c;
            }
            const double margin = post[static_cast<std::size_t>(top1)] - post[static_cast<std::size_t>(top2)];
            const double flip_prob =
                domain.noise.rate * std::exp(-margin * margin / (domain.noise.bandwidth * domain.noise.bandwidth));
            const double u = rng.uniform();
            if (u < flip_prob) label = (cls == top1) ? top2 : top1;
        }

        out.data.labels[static_cast<std::size_t>(i)] = label;
        out.data.ids[static_cast<std::size_t>(i)] = i;
        out.status[static_cast<std::size_t>(i)] = point_status(post, label);
    }
    return out;
}

SyntheticDomain preset_domain(const std::string& name) {
    SyntheticDomain domain;
    domain.dim = 2;
    if (name == "two-gauss-overlap") {
        domain.priors = {0.5, 0.5};
        domain.mixtures = {
            {{{-1.2, 0.0}, 1.0, 1.0}},
            {{{1.2, 0.0}, 1.0, 1.0}},
        };
    } else if (name == "five-class-ring") {
        const int C = 5;
        domain.priors.assign(C, 1.0 / C);
        const double radius = 2.0;
        for (int c = 0; c < C; ++c) {
            const double angle = 2.0 * std::numbers::pi * c / C;
            domain.mixtures.push_back(
                {{{radius * std::cos(angle), radius * std::sin(angle)}, 0.9, 1.0}});
        }
    } else {
        throw DataError("unknown preset domain: " + name);
    }
    domain.validate();
    return domain;
}

SyntheticDomain load_domain_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open domain file: " + path.string());

    SyntheticDomain domain;
    std::vector<std::tuple<int, double, double, std::vector<double>>> components;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        const std::string context = path.string() + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw DataError(context + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);

        if (key == "dim") {
            domain.dim = static_cast<int>(parse_int(value, context));
        } else if (key == "priors") {
            domain.priors.clear();
            for (const auto& cell : split_csv_values(value)) domain.priors.push_back(parse_double(cell, context));
        } else if (key == "component") {
            const auto cells = split_csv_values(value);
            if (cells.size() < 4) throw DataError(context + ": component needs class,weight,stddev,mean...");
            const int cls = static_cast<int>(parse_int(cells[0], context));
            const double weight = parse_double(cells[1], context);
            const double stddev = parse_double(cells[2], context);
            std::vector<double> mean;
            for (std::size_t i = 3; i < cells.size(); ++i) mean.push_back(parse_double(cells[i], context));
            components.emplace_back(cls, weight, stddev, std::move(mean));
        } else if (key == "noise") {
            const auto cells = split_csv_values(value);
            if (cells.empty()) throw DataError(context + ": empty noise value");
            if (cells[0] == "posterior-sampling") {
                domain.noise = {NoiseKind::PosteriorSampling, 0.0, 1.0};
            } else if (cells[0] == "boundary-flip") {
                if (cells.size() != 3) throw DataError(context + ": boundary-flip needs rate,bandwidth");
                domain.noise = {NoiseKind::BoundaryFlip, parse_double(cells[1], context),
                                parse_double(cells[2], context)};
            } else {
                throw DataError(context + ": unknown noise mode '" + cells[0] + "'");
            }
        } else {
            throw DataError(context + ": unknown key '" + key + "'");
        }
    }

    domain.mixtures.assign(domain.priors.size(), {});
    for (auto& [cls, weight, stddev, mean] : components) {
        if (cls < 0 || cls >= domain.class_count()) {
            throw DataError(path.string() + ": component class " + std::to_string(cls) + " out of range");
        }
        domain.mixtures[static_cast<std::size_t>(cls)].push_back({std::move(mean), stddev, weight});
    }
    domain.validate();
    return domain;
}

void save_domain_file(const SyntheticDomain& domain, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write domain file: " + path.string());
    out << "dim = " << domain.dim << "\n";
    out << "priors = ";
    for (std::size_t c = 0; c < domain.priors.size(); ++c) {
        if (c) out << ",";
        out << format_double(domain.priors[c]);
    }
    out << "\n";
    for (std::size_t c = 0; c < domain.mixtures.size(); ++c) {
        for (const auto& comp : domain.mixtures[c]) {
            out << "component = " << c << "," << format_double(comp.weight) << ","
                << format_double(comp.stddev);
            for (const double m : comp.mean) out << "," << format_double(m);
            out << "\n";
        }
    }
    if (domain.noise.kind == NoiseKind::PosteriorSampling) {
        out << "noise = posterior-sampling\n";
    } else {
        out << "noise = boundary-flip," << format_double(domain.noise.rate) << ","
            << format_double(domain.noise.bandwidth) << "\n";
    }
}

}  // namespace nbweight
