#include "sbench/stencil2d.hpp"

#include <limits>

namespace sbench {

namespace {

template <class GridT, class InitFn, class SweepFn, class SumFn>
Run2DResult run_kernel(const Run2DConfig& cfg, Clock& clock, InitFn&& init,
                       SweepFn&& sweep, SumFn&& checksum) {
    Executor ex(cfg.workers);
    Run2DResult result;
    result.run_seconds.reserve(cfg.runs);
    const std::uint64_t updates =
        interior_updates(cfg.width, cfg.height, cfg.steps);

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.runs; ++r) {
        GridT grid(cfg.width, cfg.height);
        init(grid, ex);
        const double t0 = clock();
        for (int t = 0; t < cfg.steps; ++t) sweep(grid, ex);
        const double seconds = clock() - t0;
        result.run_seconds.push_back(seconds);
        if (seconds < best) {
            best = seconds;
            result.best_run = r;
        }
        if (r == cfg.runs - 1) result.checksum = checksum(grid);
    }
    result.best = make_lup_report(updates, best);
    return result;
}

template <class S>
Run2DResult run_scalar(const Run2DConfig& cfg, Clock& clock) {
    return run_kernel<Grid2D<S>>(
        cfg, clock, [](Grid2D<S>& g, Executor& ex) { init_grid(g, ex); },
        [](Grid2D<S>& g, Executor& ex) { sweep_scalar(g, ex); },
        [](const Grid2D<S>& g) { return grid_checksum(g); });
}

template <class S, std::size_t VL>
Run2DResult run_packed(const Run2DConfig& cfg, Clock& clock) {
    return run_kernel<PackedGrid<S, VL>>(
        cfg, clock,
        [](PackedGrid<S, VL>& g, Executor& ex) { init_packed_grid(g, ex); },
        [](PackedGrid<S, VL>& g, Executor& ex) { sweep_packed(g, ex); },
        [](const PackedGrid<S, VL>& g) { return packed_checksum(g); });
}

template <class S>
Run2DResult run_typed(const Run2DConfig& cfg, Clock& clock) {
    if (cfg.kernel == Kernel2D::scalar) return run_scalar<S>(cfg, clock);
    switch (cfg.lanes) {
        case 1: return run_packed<S, 1>(cfg, clock);
        case 2: return run_packed<S, 2>(cfg, clock);
        case 4: return run_packed<S, 4>(cfg, clock);
        case 8: return run_packed<S, 8>(cfg, clock);
        case 16: return run_packed<S, 16>(cfg, clock);
        default:
            throw ConfigError("supported lane counts: 1, 2, 4, 8, 16");
    }
}

}  // namespace

Run2DResult run_2d(const Run2DConfig& cfg, Clock clock) {
    if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
    if (cfg.width < 3 || cfg.height < 3)
        throw ConfigError("grid must be at least 3x3");
    if (cfg.kernel == Kernel2D::packed) {
        if (cfg.width % cfg.lanes != 0)
            throw ConfigError("packed kernel needs width divisible by lanes");
        if (cfg.width < 2 * cfg.lanes)
            throw ConfigError("packed kernel needs at least two chunks");
    }
    if (!clock) clock = &monotonic_seconds;
    return cfg.precision == Precision::f64 ? run_typed<double>(cfg, clock)
                                           : run_typed<float>(cfg, clock);
}

}  // namespace sbench
