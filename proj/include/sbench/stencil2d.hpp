#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sbench/simd.hpp"
#include "sbench/tasking.hpp"

namespace sbench {

// ---------------------------------------------------------------------------
// Grid2D: double-buffered scalar field
// ---------------------------------------------------------------------------

/// Row-major W x H field with two buffers; boundary cells (row 0, row H-1,
/// col 0, col W-1) are Dirichlet and identical in both buffers at all times.
template <class S>
class Grid2D {
  public:
    Grid2D(std::size_t width, std::size_t height)
        : width_(width), height_(height) {
        if (width < 3 || height < 3)
            throw ConfigError("Grid2D: need width and height >= 3");
        buf_[0] = std::make_unique_for_overwrite<S[]>(width * height);
        buf_[1] = std::make_unique_for_overwrite<S[]>(width * height);
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }

    S* current_row(std::size_t y) { return buf_[cur_].get() + y * width_; }
    const S* current_row(std::size_t y) const {
        return buf_[cur_].get() + y * width_;
    }
    S* next_row(std::size_t y) { return buf_[cur_ ^ 1].get() + y * width_; }

    void swap_buffers() { cur_ ^= 1; }

  private:
    std::size_t width_;
    std::size_t height_;
    int cur_ = 0;
    std::unique_ptr<S[]> buf_[2];
};

// ---------------------------------------------------------------------------
// Jacobi kernel
// ---------------------------------------------------------------------------

/// 5-point Jacobi update: mean of the four neighbors, with the fixed
/// association (((left+right)+up)+down) * 0.25. V is a scalar or a Pack;
/// both kernels share this definition so they execute the same IEEE
/// operation sequence per element.
template <class V>
inline V jacobi_update_cell(const V& up, const V& down, const V& left,
                            const V& right) {
    using S = scalar_of_t<V>;
    return (((left + right) + up) + down) * S(0.25);
}

struct LupReport {
    std::uint64_t updates = 0;  // interior cells times steps
    double seconds = 0.0;
    double glups = 0.0;  // updates / seconds / 1e9
};

inline std::uint64_t interior_updates(std::size_t width, std::size_t height,
                                      int steps) {
    return std::uint64_t(width - 2) * std::uint64_t(height - 2) *
           std::uint64_t(steps);
}

inline LupReport make_lup_report(std::uint64_t updates, double seconds) {
    return {updates, seconds, double(updates) / seconds / 1e9};
}

// ---------------------------------------------------------------------------
// Sweeps: one task per row, barrier per timestep, buffers swapped at the end
// ---------------------------------------------------------------------------

template <class S>
void sweep_scalar(Grid2D<S>& grid, Executor& ex) {
    const std::size_t w = grid.width();
    ex.parallel_for_each(1, grid.height() - 1, [&](std::size_t y) {
        const S* above = grid.current_row(y - 1);
        const S* row = grid.current_row(y);
        const S* below = grid.current_row(y + 1);
        S* out = grid.next_row(y);
        for (std::size_t x = 1; x < w - 1; ++x)
            out[x] = jacobi_update_cell(above[x], below[x], row[x - 1],
                                        row[x + 1]);
    });
    grid.swap_buffers();
}

/// Packed sweep. Every pack of an updated row is computed whole; the lanes
/// holding the row's Dirichlet columns (pack 1 lane 0 and pack C lane VL-1)
/// are then restored from the stored boundary values, and the halo packs are
/// reshuffled, so unpacking reproduces the scalar sweep bit for bit.
template <class S, std::size_t VL>
void sweep_packed(PackedGrid<S, VL>& grid, Executor& ex) {
    ex.parallel_for_each(1, grid.height() - 1, [&](std::size_t y) {
        const PackedRow<S, VL>& above = grid.current(y - 1);
        const PackedRow<S, VL>& row = grid.current(y);
        const PackedRow<S, VL>& below = grid.current(y + 1);
        PackedRow<S, VL>& out = grid.next(y);
        const std::size_t c = row.chunk_len;
        for (std::size_t j = 1; j <= c; ++j)
            out.packs[j] =
                jacobi_update_cell(above.packs[j], below.packs[j],
                                   row.packs[j - 1], row.packs[j + 1]);
        out.packs[1][0] = out.left_boundary;
        out.packs[c][VL - 1] = out.right_boundary;
        shuffle_halo(out);
    });
    grid.swap_buffers();
}

// ---------------------------------------------------------------------------
// Initialization and checksums
// ---------------------------------------------------------------------------

/// Boundary 1, interior 0; rows are first-touched by the worker that will
/// later update them (boundary rows by the adjacent row's owner).
template <class S>
void init_grid(Grid2D<S>& grid, Executor& ex) {
    const std::size_t w = grid.width();
    const std::size_t h = grid.height();
    auto fill_row = [&](std::size_t y, S* row0, S* row1) {
        for (std::size_t x = 0; x < w; ++x) {
            const bool boundary = y == 0 || y == h - 1 || x == 0 || x == w - 1;
            const S v = boundary ? S(1) : S(0);
            row0[x] = v;
            row1[x] = v;
        }
    };
    ex.parallel_for_each(1, h - 1, [&](std::size_t y) {
        fill_row(y, grid.current_row(y), grid.next_row(y));
        if (y == 1) fill_row(0, grid.current_row(0), grid.next_row(0));
        if (y == h - 2)
            fill_row(h - 1, grid.current_row(h - 1), grid.next_row(h - 1));
    });
}

/// Same layout in pack space, rows packed by their computing worker.
template <class S, std::size_t VL>
void init_packed_grid(PackedGrid<S, VL>& grid, Executor& ex) {
    const std::size_t w = grid.width();
    const std::size_t h = grid.height();
    auto pack_one = [&](std::size_t y) {
        std::vector<S> row(w, S(0));
        if (y == 0 || y == h - 1) {
            std::fill(row.begin(), row.end(), S(1));
        } else {
            row.front() = S(1);
            row.back() = S(1);
        }
        grid.assign_row(y, row);
    };
    ex.parallel_for_each(1, h - 1, [&](std::size_t y) {
        pack_one(y);
        if (y == 1) pack_one(0);
        if (y == h - 2) pack_one(h - 1);
    });
}

/// Row-major sum of every cell, in double precision.
template <class S>
double grid_checksum(const Grid2D<S>& grid) {
    double sum = 0.0;
    for (std::size_t y = 0; y < grid.height(); ++y) {
        const S* row = grid.current_row(y);
        for (std::size_t x = 0; x < grid.width(); ++x) sum += double(row[x]);
    }
    return sum;
}

template <class S, std::size_t VL>
double packed_checksum(const PackedGrid<S, VL>& grid) {
    double sum = 0.0;
    for (std::size_t y = 0; y < grid.height(); ++y)
        for (S v : unpack_row(grid.current(y))) sum += double(v);
    return sum;
}

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

enum class Precision { f32, f64 };
enum class Kernel2D { scalar, packed };

struct Run2DConfig {
    std::size_t width = 512;
    std::size_t height = 1024;
    int steps = 100;
    std::size_t workers = 1;
    Precision precision = Precision::f64;
    Kernel2D kernel = Kernel2D::scalar;
    std::size_t lanes = 1;  // packed kernel only
    int runs = 5;           // repetitions; maximum GLUP/s is reported
};

struct Run2DResult {
    LupReport best;
    int best_run = 0;  // repetition that achieved the reported GLUP/s
    double checksum = 0.0;
    std::vector<double> run_seconds;
};

Run2DResult run_2d(const Run2DConfig& cfg, Clock clock = {});

}  // namespace sbench
