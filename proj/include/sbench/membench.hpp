#pragma once

#include <cstdint>
#include <vector>

#include "sbench/tasking.hpp"

namespace sbench {

struct StreamConfig {
    std::size_t elements = 128'000'000;  // doubles per array, paper default
    int runs = 10;
    std::vector<std::size_t> workers_sweep = {1};
    std::uint64_t seed = 12345;  // for the post-run spot check
};

struct BandwidthPoint {
    std::size_t workers = 0;
    std::uint64_t bytes_moved = 0;  // one read + one write per element
    double best_seconds = 0.0;      // minimum over runs
    double gbps = 0.0;              // bytes_moved / best_seconds / 1e9
    double checksum = 0.0;          // sum of the destination array
};

/// The reporting formula, separated so it is testable with scripted timings.
inline BandwidthPoint make_bandwidth_point(std::size_t workers,
                                           std::size_t elements,
                                           double best_seconds) {
    BandwidthPoint p;
    p.workers = workers;
    p.bytes_moved = 2 * std::uint64_t(elements) * sizeof(double);
    p.best_seconds = best_seconds;
    p.gbps = double(p.bytes_moved) / best_seconds / 1e9;
    return p;
}

/// STREAM COPY: b[i] = a[i], arrays first-touch-initialized per worker
/// block, `runs` timed passes per worker count with the fastest reported.
/// The copy is verified with 1000 random spot checks and the destination
/// checksum lands in the report so the loop cannot be elided.
std::vector<BandwidthPoint> stream_copy(const StreamConfig& cfg,
                                        Clock clock = {});

}  // namespace sbench
