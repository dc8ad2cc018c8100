#include "sbench/membench.hpp"

#include <limits>
#include <memory>
#include <new>
#include <random>

namespace sbench {

std::vector<BandwidthPoint> stream_copy(const StreamConfig& cfg, Clock clock) {
    if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
    if (cfg.workers_sweep.empty())
        throw ConfigError("need at least one worker count");
    for (std::size_t w : cfg.workers_sweep)
        if (w == 0 || cfg.elements < w)
            throw ConfigError("need elements >= workers >= 1");
    if (!clock) clock = &monotonic_seconds;

    const std::size_t n = cfg.elements;
    std::unique_ptr<double[]> a, b;
    try {
        a = std::make_unique_for_overwrite<double[]>(n);
        b = std::make_unique_for_overwrite<double[]>(n);
    } catch (const std::bad_alloc&) {
        throw ConfigError(
            "cannot allocate two arrays of " + std::to_string(n) +
            " doubles; rerun with a smaller --elements");
    }

    std::vector<BandwidthPoint> points;
    points.reserve(cfg.workers_sweep.size());
    for (std::size_t workers : cfg.workers_sweep) {
        Executor ex(workers);
        // first touch under the same block split the copy will use
        ex.parallel_for_each(0, n, [&](std::size_t i) {
            a[i] = double(i % 1024);
            b[i] = 0.0;
        });

        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < cfg.runs; ++r) {
            const double t0 = clock();
            ex.parallel_for_each(0, n, [&](std::size_t i) { b[i] = a[i]; });
            best = std::min(best, clock() - t0);
        }

        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (int s = 0; s < 1000; ++s) {
            const std::size_t i = pick(rng);
            if (b[i] != a[i])
                throw std::runtime_error(
                    "stream copy verification failed at index " +
                    std::to_string(i));
        }

        BandwidthPoint p = make_bandwidth_point(workers, n, best);
        for (std::size_t i = 0; i < n; ++i) p.checksum += b[i];
        points.push_back(p);
    }
    return points;
}

}  // namespace sbench
