#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "sbench/errors.hpp"

namespace sbench {

// ---------------------------------------------------------------------------
// Pack: fixed-lane vector value
// ---------------------------------------------------------------------------

/// VL scalars operated on elementwise. VL is a run-configuration parameter
/// (dispatched over a fixed instantiation set), constant for the lifetime of
/// a grid; lanes are a plain array the compiler is free to vectorize.
template <class S, std::size_t VL>
struct Pack {
    static_assert(std::is_floating_point_v<S>);
    static_assert(VL >= 1 && (VL & (VL - 1)) == 0,
                  "lane count must be a power of two");

    std::array<S, VL> lane{};

    Pack() = default;
    /*implicit*/ Pack(S v) { lane.fill(v); }  // broadcast
    /*implicit*/ Pack(std::array<S, VL> lanes) : lane(lanes) {}

    S& operator[](std::size_t l) { return lane[l]; }
    const S& operator[](std::size_t l) const { return lane[l]; }

    bool operator==(const Pack&) const = default;

    friend Pack operator+(Pack a, const Pack& b) {
        for (std::size_t l = 0; l < VL; ++l) a.lane[l] += b.lane[l];
        return a;
    }
    friend Pack operator*(Pack a, S s) {
        for (std::size_t l = 0; l < VL; ++l) a.lane[l] *= s;
        return a;
    }
};

template <class T>
struct scalar_of {
    using type = T;
};
template <class S, std::size_t VL>
struct scalar_of<Pack<S, VL>> {
    using type = S;
};
template <class T>
using scalar_of_t = typename scalar_of<T>::type;

// ---------------------------------------------------------------------------
// PackedRow: Virtual Node Scheme row layout
// ---------------------------------------------------------------------------

/// W scalar columns split into VL chunks of C = W/VL columns; lane l owns
/// columns [l*C, (l+1)*C). Scalar column c lives in pack 1 + (c mod C),
/// lane c / C, so the horizontal neighbors of any interior pack are whole
/// adjacent packs. packs[0] and packs[C+1] are halo packs exposing the
/// out-of-chunk neighbor of each lane:
///
///   left halo:  lane 0 = left_boundary, lane l>=1 = column l*C - 1
///   right halo: lane VL-1 = right_boundary, lane l<VL-1 = column (l+1)*C
template <class S, std::size_t VL>
struct PackedRow {
    std::size_t width = 0;      // W, scalar row length
    std::size_t chunk_len = 0;  // C = W / VL
    S left_boundary{};
    S right_boundary{};
    std::vector<Pack<S, VL>> packs;  // C + 2, halos at 0 and C+1
};

template <class S, std::size_t VL>
void shuffle_halo(PackedRow<S, VL>& row);

template <class S, std::size_t VL>
PackedRow<S, VL> pack_row(std::span<const S> scalars, S left_boundary,
                          S right_boundary) {
    const std::size_t w = scalars.size();
    if (w % VL != 0)
        throw ConfigError("pack_row: row width not divisible by lane count");
    if (w < 2 * VL)
        throw ConfigError("pack_row: need at least two chunks per lane");

    PackedRow<S, VL> row;
    row.width = w;
    row.chunk_len = w / VL;
    row.left_boundary = left_boundary;
    row.right_boundary = right_boundary;
    row.packs.resize(row.chunk_len + 2);
    const std::size_t c = row.chunk_len;
    for (std::size_t col = 0; col < w; ++col)
        row.packs[1 + col % c][col / c] = scalars[col];
    shuffle_halo(row);
    return row;
}

/// Exact inverse of pack_row's interior mapping.
template <class S, std::size_t VL>
std::vector<S> unpack_row(const PackedRow<S, VL>& row) {
    std::vector<S> scalars(row.width);
    const std::size_t c = row.chunk_len;
    for (std::size_t col = 0; col < row.width; ++col)
        scalars[col] = row.packs[1 + col % c][col / c];
    return scalars;
}

/// Recomputes the halo packs from the interior packs. Called after every
/// row update to keep the layout consistent; idempotent.
template <class S, std::size_t VL>
void shuffle_halo(PackedRow<S, VL>& row) {
    const std::size_t c = row.chunk_len;
    row.packs[0][0] = row.left_boundary;
    for (std::size_t l = 1; l < VL; ++l) row.packs[0][l] = row.packs[c][l - 1];
    for (std::size_t l = 0; l + 1 < VL; ++l)
        row.packs[c + 1][l] = row.packs[1][l + 1];
    row.packs[c + 1][VL - 1] = row.right_boundary;
}

template <class S, std::size_t VL>
struct NeighborPacks {
    Pack<S, VL> left, right, up, down;
};

/// Stencil operands for interior pack j (1..C): horizontal neighbors are the
/// adjacent packs of the same row (halos at the chunk seams), vertical
/// neighbors the same pack index of the adjacent rows.
template <class S, std::size_t VL>
NeighborPacks<S, VL> packed_neighbors(const PackedRow<S, VL>& row_above,
                                      const PackedRow<S, VL>& row,
                                      const PackedRow<S, VL>& row_below,
                                      std::size_t j) {
    if (j < 1 || j > row.chunk_len)
        throw ConfigError("packed_neighbors: pack index outside 1..C");
    return {row.packs[j - 1], row.packs[j + 1], row_above.packs[j],
            row_below.packs[j]};
}

// ---------------------------------------------------------------------------
// PackedGrid: double-buffered grid of packed rows
// ---------------------------------------------------------------------------

/// H rows sharing one (W, C, VL) layout, double-buffered. The halo invariant
/// holds on every row of the current buffer at the start of each timestep.
template <class S, std::size_t VL>
class PackedGrid {
  public:
    PackedGrid(std::size_t width, std::size_t height)
        : width_(width), height_(height) {
        if (height < 3) throw ConfigError("PackedGrid: height must be >= 3");
        if (width % VL != 0 || width < 2 * VL)
            throw ConfigError("PackedGrid: invalid width for lane count");
        rows_[0].resize(height);
        rows_[1].resize(height);
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }

    PackedRow<S, VL>& current(std::size_t y) { return rows_[cur_][y]; }
    const PackedRow<S, VL>& current(std::size_t y) const {
        return rows_[cur_][y];
    }
    PackedRow<S, VL>& next(std::size_t y) { return rows_[cur_ ^ 1][y]; }

    void swap_buffers() { cur_ ^= 1; }

    /// Packs row y of both buffers from its scalar values. Row boundaries are
    /// the Dirichlet columns 0 and W-1 of the scalar row.
    void assign_row(std::size_t y, std::span<const S> scalars) {
        auto packed =
            pack_row<S, VL>(scalars, scalars.front(), scalars.back());
        rows_[cur_ ^ 1][y] = packed;
        rows_[cur_][y] = std::move(packed);
    }

  private:
    std::size_t width_;
    std::size_t height_;
    int cur_ = 0;
    std::vector<PackedRow<S, VL>> rows_[2];
};

}  // namespace sbench
