#include "sbench/stencil1d.hpp"

#include <mutex>

namespace sbench {

namespace {
// channel tags: one per direction plus the checksum protocol
constexpr std::uint32_t kTagRightward = 0;  // rank r -> r+1 boundary value
constexpr std::uint32_t kTagLeftward = 1;   // rank r -> r-1 boundary value
constexpr std::uint32_t kTagChain = 2;      // running checksum, left to right
constexpr std::uint32_t kTagResult = 3;     // final checksum, last rank -> 0
}  // namespace

Partition1D::Partition1D(std::uint64_t global_offset, std::size_t local_nx,
                         std::size_t nlp)
    : global_offset_(global_offset), local_nx_(local_nx), nlp_(nlp) {
    if (local_nx < 2) throw ConfigError("local_nx must be >= 2");
    if (nlp < 1) throw ConfigError("nlp must be >= 1");
    cells_[0] = std::make_unique_for_overwrite<double[]>(cell_count());
    cells_[1] = std::make_unique_for_overwrite<double[]>(cell_count());
}

void partition_step(Partition1D& p, std::size_t pi, const HeatParams& params,
                    const Future<double>& left_ghost,
                    const Future<double>& right_ghost, bool global_left_edge,
                    bool global_right_edge) {
    const double k = params.k();
    const double* cur = p.current();
    double* nxt = p.next();
    const std::size_t total = p.cell_count();
    const std::size_t lo = pi * p.local_nx();
    const std::size_t hi = lo + p.local_nx();

    std::size_t begin = lo;
    std::size_t end = hi;
    if (lo == 0) {
        if (global_left_edge) {
            nxt[0] = cur[0];  // Dirichlet endpoint
        } else {
            p.left_ghost = left_ghost.get();
            nxt[0] = heat_update_cell(p.left_ghost, cur[0], cur[1], k);
        }
        begin = 1;
    }
    if (hi == total) {
        if (global_right_edge) {
            nxt[total - 1] = cur[total - 1];
        } else {
            p.right_ghost = right_ghost.get();
            nxt[total - 1] =
                heat_update_cell(cur[total - 2], cur[total - 1], p.right_ghost, k);
        }
        end = total - 1;
    }
    for (std::size_t i = begin; i < end; ++i)
        nxt[i] = heat_update_cell(cur[i - 1], cur[i], cur[i + 1], k);
}

void Stencil1DConfig::validate(int localities) const {
    params.validate();
    if (localities < 1) throw ConfigError("need at least one locality");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (nlp < 1) throw ConfigError("nlp must be >= 1");
    const std::uint64_t parts = std::uint64_t(localities) * nlp;
    if (total_points == 0 || total_points % parts != 0)
        throw ConfigError(
            "total points must divide evenly into localities * nlp "
            "partitions");
    if (total_points / parts < 2)
        throw ConfigError("decomposition leaves fewer than 2 cells per "
                          "partition; use fewer partitions");
}

LocalityResult solve_1d_locality(Transport& transport, Executor& executor,
                                 const Stencil1DConfig& cfg) {
    const int rank = transport.id().rank;
    const int world = transport.id().world;
    cfg.validate(world);

    const std::uint64_t points_per_loc = cfg.total_points / world;
    const std::size_t local_nx = std::size_t(points_per_loc / cfg.nlp);
    Partition1D part(std::uint64_t(rank) * points_per_loc, local_nx, cfg.nlp);

    const bool leftmost = rank == 0;
    const bool rightmost = rank == world - 1;
    std::optional<Channel<double>> send_left, send_right;
    std::optional<Channel<double>> recv_left, recv_right;
    if (!leftmost) {
        send_left.emplace(transport, rank - 1, kTagLeftward);
        recv_left.emplace(transport, rank - 1, kTagRightward);
    }
    if (!rightmost) {
        send_right.emplace(transport, rank + 1, kTagRightward);
        recv_right.emplace(transport, rank + 1, kTagLeftward);
    }

    LocalityResult result;
    Stopwatch watch;

    // first touch: each partition's future owner writes its cells
    executor.parallel_for_each(0, cfg.nlp, [&](std::size_t pi) {
        double* cur = part.current();
        double* nxt = part.next();
        for (std::size_t i = pi * local_nx; i < (pi + 1) * local_nx; ++i) {
            cur[i] = double((part.global_offset() + i) % 1000);
            nxt[i] = 0.0;
        }
    });

    const std::size_t n = part.cell_count();
    for (int t = 0; t < cfg.steps; ++t) {
        const std::uint64_t step = std::uint64_t(t);
        // boundary values go out first so neighbors can overlap their edges
        if (!leftmost) send_left->send(step, part.current()[0]);
        if (!rightmost) send_right->send(step, part.current()[n - 1]);
        Future<double> left_ghost, right_ghost;
        if (!leftmost) left_ghost = recv_left->recv(step);
        if (!rightmost) right_ghost = recv_right->recv(step);

        executor.parallel_for_each(0, cfg.nlp, [&](std::size_t pi) {
            partition_step(part, pi, cfg.params, left_ghost, right_ghost,
                           leftmost, rightmost);
        });
        part.swap_buffers();
    }
    result.seconds = watch.elapsed();

    // rank-ordered summation chain: bit-identical to one serial sweep
    const std::uint64_t chain_step = std::uint64_t(cfg.steps);
    double sum = 0.0;
    if (!leftmost)
        sum = Channel<double>(transport, rank - 1, kTagChain).recv(chain_step)
                  .get();
    const double* cur = part.current();
    for (std::size_t i = 0; i < n; ++i) sum += cur[i];
    if (!rightmost) {
        Channel<double>(transport, rank + 1, kTagChain).send(chain_step, sum);
    } else {
        result.global_checksum = sum;
        if (world > 1)
            Channel<double>(transport, 0, kTagResult).send(chain_step, sum);
    }
    if (leftmost && world > 1)
        result.global_checksum =
            Channel<double>(transport, world - 1, kTagResult).recv(chain_step)
                .get();
    return result;
}

LocalityResult run_1d_inproc(const Stencil1DConfig& cfg, int localities,
                             std::size_t workers) {
    LocalityResult rank0;
    std::mutex m;
    run_cluster_inproc(localities, [&](Transport& tr) {
        Executor ex(workers);
        LocalityResult local = solve_1d_locality(tr, ex, cfg);
        if (tr.id().rank == 0) {
            std::lock_guard lk(m);
            rank0 = local;
        }
    });
    return rank0;
}

}  // namespace sbench
