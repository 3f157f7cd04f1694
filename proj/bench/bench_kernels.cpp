// Times the production neighborhood kernel (partial-select, OpenMP over
// centers) against the serial full-sort reference, verifies they agree
// exactly, and reports scoring throughput for 1 thread vs all threads.

#include <chrono>
#include <cstdio>
#include <string>

#include "nbweight/knn.hpp"
#include "nbweight/scoring.hpp"
#include "nbweight/synthetic.hpp"

using namespace nbweight;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool same_neighborhoods(const std::vector<Neighborhood>& a, const std::vector<Neighborhood>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].center_id != b[i].center_id || a[i].member_ids != b[i].member_ids ||
            a[i].raw_distances != b[i].raw_distances ||
            a[i].normalized_distances != b[i].normalized_distances ||
            a[i].degenerate != b[i].degenerate) {
            return false;
        }
    }
    return true;
}

bool same_scores(const std::vector<UncertaintyScore>& a, const std::vector<UncertaintyScore>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].sample_id != b[i].sample_id || a[i].score != b[i].score) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::int64_t n = argc > 1 ? std::stoll(argv[1]) : 4000;
    const int k = argc > 2 ? std::stoi(argv[2]) : 15;
    const int repeats = 3;

    const SyntheticDomain domain = preset_domain("five-class-ring");
    const Dataset data = generate(domain, n, 11).data;
    std::printf("n=%lld  k=%d  repeats=%d\n", static_cast<long long>(n), k, repeats);

    for (const DistanceMetric metric : {DistanceMetric::Euclidean, DistanceMetric::Cosine}) {
        const char* name = metric == DistanceMetric::Euclidean ? "euclidean" : "cosine";

        auto t0 = std::chrono::steady_clock::now();
        std::vector<Neighborhood> ref;
        for (int r = 0; r < repeats; ++r) ref = neighborhoods_reference(data, k, metric);
        const double t_ref = seconds_since(t0) / repeats;

        t0 = std::chrono::steady_clock::now();
        std::vector<Neighborhood> serial;
        for (int r = 0; r < repeats; ++r) serial = neighborhoods(data, k, metric, {}, 1);
        const double t_serial = seconds_since(t0) / repeats;

        t0 = std::chrono::steady_clock::now();
        std::vector<Neighborhood> parallel;
        for (int r = 0; r < repeats; ++r) parallel = neighborhoods(data, k, metric, {}, 0);
        const double t_parallel = seconds_since(t0) / repeats;

        const bool ok = same_neighborhoods(ref, serial) && same_neighborhoods(ref, parallel);
        std::printf("%-10s reference %8.4fs  select/1t %8.4fs  select/all %8.4fs  "
                    "speedup %5.2fx  agree %s\n",
                    name, t_ref, t_serial, t_parallel,
                    t_parallel > 0 ? t_ref / t_parallel : 0.0, ok ? "yes" : "NO");
        if (!ok) return 1;
    }

    auto t0 = std::chrono::steady_clock::now();
    const auto scores_serial = score_dataset(data, k, DistanceMetric::Euclidean, nullptr, 1);
    const double t_score_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto scores_parallel = score_dataset(data, k, DistanceMetric::Euclidean, nullptr, 0);
    const double t_score_parallel = seconds_since(t0);
    const bool score_ok = same_scores(scores_serial, scores_parallel);
    std::printf("scoring    serial    %8.4fs  all-threads %8.4fs  speedup %5.2fx  agree %s\n",
                t_score_serial, t_score_parallel,
                t_score_parallel > 0 ? t_score_serial / t_score_parallel : 0.0,
                score_ok ? "yes" : "NO");
    return score_ok ? 0 : 1;
}
