#include "sbench/verify.hpp"

#include <bit>
#include <cstring>
#include <random>
#include <sstream>

#include "sbench/membench.hpp"
#include "sbench/roofline.hpp"
#include "sbench/stencil1d.hpp"
#include "sbench/stencil2d.hpp"

namespace sbench {

namespace {

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}
bool bits_equal(float a, float b) {
    return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
}

// -------------------------------------------------------------------------
// Reference solvers. Plain sequential loops, written out independently of
// the executor / channel / pack machinery they are used to check.
// -------------------------------------------------------------------------

double serial_1d_checksum(std::uint64_t points, int steps, double k) {
    std::vector<double> u(points), v(points);
    for (std::uint64_t i = 0; i < points; ++i) u[i] = double(i % 1000);
    for (int t = 0; t < steps; ++t) {
        v.front() = u.front();
        v.back() = u.back();
        for (std::uint64_t i = 1; i + 1 < points; ++i)
            v[i] = u[i] + k * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        std::swap(u, v);
    }
    double sum = 0.0;
    for (double x : u) sum += x;
    return sum;
}

template <class S>
std::vector<S> serial_2d_field(std::vector<S> field, std::size_t w,
                               std::size_t h, int steps) {
    std::vector<S> next = field;
    for (int t = 0; t < steps; ++t) {
        for (std::size_t y = 1; y + 1 < h; ++y)
            for (std::size_t x = 1; x + 1 < w; ++x)
                next[y * w + x] = (((field[y * w + x - 1] +
                                     field[y * w + x + 1]) +
                                    field[(y - 1) * w + x]) +
                                   field[(y + 1) * w + x]) *
                                  S(0.25);
        std::swap(field, next);
    }
    return field;
}

template <class S>
std::vector<S> boundary_one_interior_zero(std::size_t w, std::size_t h) {
    std::vector<S> field(w * h, S(0));
    for (std::size_t x = 0; x < w; ++x) {
        field[x] = S(1);
        field[(h - 1) * w + x] = S(1);
    }
    for (std::size_t y = 0; y < h; ++y) {
        field[y * w] = S(1);
        field[y * w + w - 1] = S(1);
    }
    return field;
}

template <class S>
std::vector<S> random_field(std::size_t w, std::size_t h,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<S> field(w * h);
    for (S& v : field) v = S(dist(rng));
    return field;
}

// -------------------------------------------------------------------------
// Individual checks
// -------------------------------------------------------------------------

CheckResult check_1d_serial_oracle(bool quick) {
    const std::uint64_t points = quick ? 1000 : 100000;
    const int steps = quick ? 20 : 100;
    Stencil1DConfig cfg;
    cfg.total_points = points;
    cfg.steps = steps;
    cfg.nlp = 1;
    const double expected = serial_1d_checksum(points, steps, cfg.params.k());
    const LocalityResult got = run_1d_inproc(cfg, 1, 1);
    CheckResult r{"1d-serial-oracle", false, ""};
    if (!got.global_checksum) {
        r.detail = "solver reported no checksum";
        return r;
    }
    r.pass = bits_equal(*got.global_checksum, expected);
    std::ostringstream os;
    os.precision(15);
    os << "solver " << *got.global_checksum << " vs oracle " << expected;
    r.detail = os.str();
    return r;
}

CheckResult check_1d_partition_invariance(bool quick) {
    const std::uint64_t points = quick ? 8000 : 100000;
    const int steps = quick ? 20 : 100;
    Stencil1DConfig cfg;
    cfg.total_points = points;
    cfg.steps = steps;
    const double expected = serial_1d_checksum(points, steps, cfg.params.k());
    CheckResult r{"1d-partition-invariance", true, ""};
    for (int localities : {1, 2, 4}) {
        for (std::size_t nlp : {std::size_t(1), std::size_t(4)}) {
            cfg.nlp = nlp;
            const LocalityResult got = run_1d_inproc(cfg, localities, 2);
            if (!got.global_checksum ||
                !bits_equal(*got.global_checksum, expected)) {
                r.pass = false;
                std::ostringstream os;
                os << "mismatch at L=" << localities << " nlp=" << nlp;
                r.detail = os.str();
                return r;
            }
        }
    }
    r.detail = "L in {1,2,4} x nlp in {1,4} all bit-identical to serial";
    return r;
}

template <class S, std::size_t VL>
bool packed_equivalence_once(std::size_t w, std::size_t h, int steps,
                             std::uint64_t seed, bool corrupt,
                             std::string& detail) {
    Executor ex(2);
    const std::vector<S> initial = random_field<S>(w, h, seed);

    Grid2D<S> grid(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        std::memcpy(grid.current_row(y), initial.data() + y * w,
                    w * sizeof(S));
        std::memcpy(grid.next_row(y), initial.data() + y * w, w * sizeof(S));
    }
    PackedGrid<S, VL> packed(w, h);
    for (std::size_t y = 0; y < h; ++y)
        packed.assign_row(y, std::span<const S>(initial.data() + y * w, w));

    for (int t = 0; t < steps; ++t) {
        sweep_scalar(grid, ex);
        sweep_packed(packed, ex);
        if (corrupt && t == steps / 2 && VL >= 2)
            packed.current(h / 2).packs[0][1] += S(1);
    }
    for (std::size_t y = 0; y < h; ++y) {
        const std::vector<S> row = unpack_row(packed.current(y));
        const S* expect = grid.current_row(y);
        for (std::size_t x = 0; x < w; ++x) {
            if (!bits_equal(row[x], expect[x])) {
                std::ostringstream os;
                os << "first mismatch at (" << x << "," << y << ") VL=" << VL
                   << " sizeof(S)=" << sizeof(S);
                detail = os.str();
                return false;
            }
        }
    }
    return true;
}

template <class S>
bool packed_equivalence_all_lanes(std::size_t w, std::size_t h, int steps,
                                  int grids, std::uint64_t seed, bool corrupt,
                                  std::string& detail) {
    for (int g = 0; g < grids; ++g) {
        const std::uint64_t s = seed + 1315423911ull * std::uint64_t(g + 1);
        if (!packed_equivalence_once<S, 1>(w, h, steps, s, corrupt, detail))
            return false;
        if (!packed_equivalence_once<S, 2>(w, h, steps, s, corrupt, detail))
            return false;
        if (!packed_equivalence_once<S, 4>(w, h, steps, s, corrupt, detail))
            return false;
        if (!packed_equivalence_once<S, 8>(w, h, steps, s, corrupt, detail))
            return false;
    }
    return true;
}

CheckResult check_packed_equivalence(const VerifyOptions& opt) {
    const int grids = opt.quick ? 2 : 5;
    CheckResult r{"2d-packed-equivalence", false, ""};
    std::string detail;
    const bool ok32 = packed_equivalence_all_lanes<float>(
        64, 128, 10, grids, opt.seed, opt.corrupt_shuffle, detail);
    const bool ok64 =
        ok32 && packed_equivalence_all_lanes<double>(
                    64, 128, 10, grids, opt.seed ^ 0x9e3779b97f4a7c15ull,
                    opt.corrupt_shuffle, detail);
    r.pass = ok32 && ok64;
    r.detail = r.pass ? "packed == scalar bit-exact, f32/f64, VL in {1,2,4,8}"
                      : detail;
    return r;
}

CheckResult check_2d_worker_invariance(bool quick) {
    const std::size_t w = quick ? 128 : 512;
    const std::size_t h = quick ? 64 : 1024;
    const int steps = quick ? 20 : 100;
    const std::vector<double> oracle =
        serial_2d_field(boundary_one_interior_zero<double>(w, h), w, h, steps);
    double expected = 0.0;
    for (double v : oracle) expected += v;

    CheckResult r{"2d-worker-invariance", true, ""};
    for (std::size_t workers : {1u, 2u, 4u, 8u}) {
        Run2DConfig cfg;
        cfg.width = w;
        cfg.height = h;
        cfg.steps = steps;
        cfg.workers = workers;
        cfg.runs = 1;
        const Run2DResult res = run_2d(cfg);
        if (!bits_equal(res.checksum, expected)) {
            r.pass = false;
            std::ostringstream os;
            os.precision(17);
            os << "workers=" << workers << ": " << res.checksum
               << " != " << expected;
            r.detail = os.str();
            return r;
        }
    }
    r.detail = "workers in {1,2,4,8} bit-identical to serial oracle";
    return r;
}

template <class S, std::size_t VL>
bool halo_oracle_once(std::size_t w, std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<S> scalars(w);
    for (S& v : scalars) v = S(dist(rng));
    const S bl = S(dist(rng));
    const S br = S(dist(rng));

    PackedRow<S, VL> row = pack_row<S, VL>(scalars, bl, br);
    const std::size_t c = row.chunk_len;

    // round trip
    if (unpack_row(row) != scalars) {
        detail = "pack/unpack round trip failed";
        return false;
    }
    // bijection: every (pack, lane) hit exactly once by the layout map
    std::vector<int> hits(c * VL, 0);
    for (std::size_t col = 0; col < w; ++col)
        ++hits[(col % c) * VL + col / c];
    for (int hit : hits)
        if (hit != 1) {
            detail = "layout map is not a bijection";
            return false;
        }
    // halo lanes expose the scalar neighbor of each chunk seam
    shuffle_halo(row);
    for (std::size_t l = 0; l < VL; ++l) {
        const S want_left = l == 0 ? bl : scalars[l * c - 1];
        const S want_right = l == VL - 1 ? br : scalars[(l + 1) * c];
        if (!bits_equal(row.packs[0][l], want_left) ||
            !bits_equal(row.packs[c + 1][l], want_right)) {
            detail = "halo lane does not match scalar neighbor";
            return false;
        }
    }
    return true;
}

template <std::size_t VL>
bool halo_oracle_lane(std::uint64_t seed, std::string& detail) {
    for (std::size_t w : {8u, 16u, 64u, 256u}) {
        if (w % VL != 0 || w < 2 * VL) continue;
        if (!halo_oracle_once<float, VL>(w, seed ^ w, detail)) return false;
        if (!halo_oracle_once<double, VL>(w, seed + w, detail)) return false;
    }
    return true;
}

CheckResult check_halo_oracle(std::uint64_t seed) {
    CheckResult r{"layout-halo-oracle", false, ""};
    std::string detail;
    r.pass = halo_oracle_lane<1>(seed, detail) &&
             halo_oracle_lane<2>(seed, detail) &&
             halo_oracle_lane<4>(seed, detail) &&
             halo_oracle_lane<8>(seed, detail);
    r.detail = r.pass ? "W in {8,16,64,256} x VL in {1,2,4,8}" : detail;
    return r;
}

CheckResult check_roofline_units() {
    CheckResult r{"roofline-units", false, ""};
    const double huge_cp = 1e30;
    const double lo = attainable({huge_cp, 1.0 / 24.0, 48e9});
    const double hi = attainable({huge_cp, 1.0 / 12.0, 48e9});
    if (std::abs(lo - 2e9) > 1e-9 * 2e9 || std::abs(hi - 4e9) > 1e-9 * 4e9) {
        r.detail = "attainable() off the 48 GB/s reference points";
        return r;
    }
    if (StencilAiSpec{4, 3}.bytes_per_lup() != 12 ||
        StencilAiSpec{8, 3}.bytes_per_lup() != 24 ||
        StencilAiSpec{4, 2}.bytes_per_lup() != 8 ||
        StencilAiSpec{8, 2}.bytes_per_lup() != 16) {
        r.detail = "bytes-per-update constants are wrong";
        return r;
    }
    const BandwidthPoint bw = make_bandwidth_point(1, 100000000, 0.1);
    if (bw.gbps != 2.0 * 1e8 * 8.0 / 0.1 / 1e9) {
        r.detail = "bandwidth formula drifted";
        return r;
    }
    for (const HardwareProfile& p : table1_profiles()) {
        const bool expect_consistent = p.name != "thunderx2";
        if (p.peak_consistent() != expect_consistent) {
            r.detail = "peak consistency flag wrong for " + p.name;
            return r;
        }
    }
    r.pass = true;
    r.detail = "attainable, AI constants, bandwidth formula, Table check";
    return r;
}

}  // namespace

std::vector<CheckResult> verify_all(const VerifyOptions& opt) {
    std::vector<CheckResult> results;
    results.push_back(check_1d_serial_oracle(opt.quick));
    results.push_back(check_1d_partition_invariance(opt.quick));
    results.push_back(check_packed_equivalence(opt));
    results.push_back(check_2d_worker_invariance(opt.quick));
    results.push_back(check_halo_oracle(opt.seed));
    results.push_back(check_roofline_units());
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace sbench
