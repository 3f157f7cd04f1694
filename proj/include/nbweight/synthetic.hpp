#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nbweight/dataset.hpp"
#include "nbweight/matrix.hpp"

namespace nbweight {

enum class NoiseKind { PosteriorSampling, BoundaryFlip };

// PosteriorSampling: the observed label is the class that generated the
// point, i.e. a draw from the true posterior at that location.
// BoundaryFlip: starting from the generating class, the label is flipped
// across the local decision boundary with probability
// rate * exp(-margin^2 / bandwidth^2), where margin is the gap between the
// two largest posterior probabilities. Flips land on the posterior's top
// class when the sample is not already labeled with it, otherwise on the
// runner-up, so the corruption concentrates along class boundaries.
struct NoiseMode {
    NoiseKind kind = NoiseKind::PosteriorSampling;
    double rate = 0.0;        // BoundaryFlip only, in [0, 1]
    double bandwidth = 1.0;   // BoundaryFlip only, > 0
};

struct GaussianComponent {
    std::vector<double> mean;
    double stddev = 1.0;      // isotropic
    double weight = 1.0;      // mixing weight within the class
};

/**
 * Per-class isotropic Gaussian mixture over R^dim with known class priors.
 * The class posterior f(x) is available in closed form, which is what makes
 * the generated datasets usable as ground truth for uncertainty experiments.
 */
struct SyntheticDomain {
    int dim = 0;
    std::vector<double> priors;                            // one per class
    std::vector<std::vector<GaussianComponent>> mixtures;  // one list per class
    NoiseMode noise;

    int class_count() const { return static_cast<int>(priors.size()); }

    /// Throws DataError on: empty mixtures, zero/negative stddev, prior or
    /// component weights not summing to 1 (1e-12), dimension mismatches.
    void validate() const;

    /// Closed-form posterior f(x); entries sum to 1 within 1e-12.
    std::vector<double> posterior(std::span<const double> x) const;
};

struct Generated {
    Dataset data;                      // observed labels (after noise)
    Matrix posteriors;                 // n x C, true posterior rows f(x_i)
    std::vector<PointStatus> status;   // per sample, from observed label vs f(x_i)
};

/**
 * Draws n samples: class by prior, location from that class's mixture,
 * observed label per the domain's noise mode. Pure function of
 * (domain, n, seed): repeated calls are bit-identical.
 */
Generated generate(const SyntheticDomain& domain, std::int64_t n, std::uint64_t seed);

/// Built-in domains: "two-gauss-overlap" (2 classes, 2-D) and
/// "five-class-ring" (5 classes, 2-D). Unknown names throw DataError.
SyntheticDomain preset_domain(const std::string& name);

/**
 * Key-value domain description:
 *   dim = 2
 *   priors = 0.5,0.5
 *   component = <class>,<weight>,<stddev>,<mean_0>,...,<mean_{dim-1}>
 *   noise = posterior-sampling | boundary-flip,<rate>,<bandwidth>
 * Lines starting with '#' are comments.
 */
SyntheticDomain load_domain_file(const std::filesystem::path& path);
void save_domain_file(const SyntheticDomain& domain, const std::filesystem::path& path);

}  // namespace nbweight
