#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "sbench/locality.hpp"
#include "sbench/tasking.hpp"

namespace sbench {

struct HeatParams {
    double alpha = 1.0;  // diffusion constant
    double dt = 1.0;
    double dx = 2.0;  // defaults give k = 0.25

    double k() const { return alpha * dt / (dx * dx); }

    void validate() const {
        if (!(alpha > 0.0) || !(dt > 0.0) || !(dx > 0.0))
            throw ConfigError("heat parameters must be positive");
        if (k() > 0.5)
            throw ConfigError(
                "alpha*dt/dx^2 exceeds 0.5; explicit scheme unstable");
    }
};

/// 3-point explicit update of Eq.: T + k*(T_left - 2*T + T_right).
inline double heat_update_cell(double left, double center, double right,
                               double k) {
    return center + k * (left - 2.0 * center + right);
}

/// One locality's contiguous slice of the global 1D domain: nlp partitions
/// of local_nx cells each, double-buffered, plus one ghost cell per side.
class Partition1D {
  public:
    Partition1D(std::uint64_t global_offset, std::size_t local_nx,
                std::size_t nlp);

    std::uint64_t global_offset() const { return global_offset_; }
    std::size_t local_nx() const { return local_nx_; }
    std::size_t nlp() const { return nlp_; }
    std::size_t cell_count() const { return local_nx_ * nlp_; }

    double* current() { return cells_[cur_].get(); }
    const double* current() const { return cells_[cur_].get(); }
    double* next() { return cells_[cur_ ^ 1].get(); }

    void swap_buffers() { cur_ ^= 1; }

    double left_ghost = 0.0;
    double right_ghost = 0.0;

  private:
    std::uint64_t global_offset_;
    std::size_t local_nx_;
    std::size_t nlp_;
    int cur_ = 0;
    // untouched pages until first_touch_init writes them
    std::unique_ptr<double[]> cells_[2];
};

/// Advances sub-partition `pi` one step. Interior sub-partitions never look
/// at the futures; the edge ones await exactly the ghost they need. Global
/// domain endpoints are Dirichlet (copied through).
void partition_step(Partition1D& p, std::size_t pi, const HeatParams& params,
                    const Future<double>& left_ghost,
                    const Future<double>& right_ghost, bool global_left_edge,
                    bool global_right_edge);

struct Stencil1DConfig {
    std::uint64_t total_points = 0;  // across all localities
    int steps = 100;
    std::size_t nlp = 4;  // partitions per locality
    HeatParams params;

    void validate(int localities) const;
};

/// Result of one locality's solve. `global_checksum` is populated on rank 0
/// (and on the last rank, which closes the checksum chain).
struct LocalityResult {
    double seconds = 0.0;
    std::optional<double> global_checksum;
};

/// Full solve on this locality: first-touch init (u[i] = i mod 1000),
/// `steps` timesteps with one task per partition and ghost exchange with
/// both neighbors, then a rank-ordered checksum chain so the reported sum
/// is bit-identical to a serial left-to-right accumulation.
LocalityResult solve_1d_locality(Transport& transport, Executor& executor,
                                 const Stencil1DConfig& cfg);

/// Convenience wrapper: L in-process localities, each with `workers`
/// workers; returns rank 0's wall seconds and the global checksum.
LocalityResult run_1d_inproc(const Stencil1DConfig& cfg, int localities,
                             std::size_t workers);

}  // namespace sbench
