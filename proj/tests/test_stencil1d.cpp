#include <doctest.h>

#include <bit>
#include <random>
#include <vector>

#include "sbench/stencil1d.hpp"

using namespace sbench;

namespace {

/// Reference solver: plain sequential loop over the same initial condition
/// (u[i] = i mod 1000) and Dirichlet endpoints.
std::vector<double> serial_solve(std::uint64_t points, int steps, double k) {
    std::vector<double> u(points), v(points);
    for (std::uint64_t i = 0; i < points; ++i) u[i] = double(i % 1000);
    for (int t = 0; t < steps; ++t) {
        v.front() = u.front();
        v.back() = u.back();
        for (std::uint64_t i = 1; i + 1 < points; ++i)
            v[i] = u[i] + k * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        std::swap(u, v);
    }
    return u;
}

double sum_of(const std::vector<double>& u) {
    double s = 0.0;
    for (double x : u) s += x;
    return s;
}

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

/// Drives a single locality's Partition1D through `steps` steps with global
/// Dirichlet edges, from an arbitrary initial field.
std::vector<double> drive_partition(std::vector<double> initial,
                                    std::size_t nlp, int steps,
                                    const HeatParams& params,
                                    std::size_t workers) {
    Executor ex(workers);
    Partition1D part(0, initial.size() / nlp, nlp);
    for (std::size_t i = 0; i < initial.size(); ++i) {
        part.current()[i] = initial[i];
        part.next()[i] = 0.0;
    }
    Future<double> none;
    for (int t = 0; t < steps; ++t) {
        ex.parallel_for_each(0, nlp, [&](std::size_t pi) {
            partition_step(part, pi, params, none, none, true, true);
        });
        part.swap_buffers();
    }
    return {part.current(), part.current() + part.cell_count()};
}

}  // namespace

TEST_CASE("heat_update_cell hand arithmetic") {
    CHECK(heat_update_cell(0, 1, 0, 0.5) == 0.0);
    CHECK(heat_update_cell(5, 5, 5, 0.123) == 5.0);
    CHECK(heat_update_cell(1, 2, 4, 0.25) == 2.25);
}

TEST_CASE("heat parameters enforce the stability bound") {
    CHECK(HeatParams{}.k() == 0.25);  // defaults
    CHECK_NOTHROW((HeatParams{1.0, 0.5, 1.0}).validate());  // k = 0.5 is legal
    CHECK_THROWS_AS((HeatParams{1.0, 1.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS((HeatParams{-1.0, 1.0, 2.0}).validate(), ConfigError);
    CHECK_THROWS_AS((HeatParams{1.0, 0.0, 2.0}).validate(), ConfigError);
}

TEST_CASE("a uniform field is a fixed point") {
    const std::vector<double> u0(64, 3.75);
    const auto u = drive_partition(u0, 4, 25, HeatParams{}, 2);
    CHECK(u == u0);
}

TEST_CASE("maximum principle: cells stay inside the initial value range") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    std::vector<double> u0(96);
    for (double& v : u0) v = dist(rng);
    const double lo = *std::min_element(u0.begin(), u0.end());
    const double hi = *std::max_element(u0.begin(), u0.end());

    for (double k_dx : {2.0, 1.5}) {  // k = 0.25 and k ~ 0.444
        HeatParams params{1.0, 1.0, k_dx};
        std::vector<double> field = u0;
        for (int chunk = 0; chunk < 10; ++chunk) {
            field = drive_partition(field, 2, 5, params, 2);
            for (double v : field) {
                CHECK(v >= lo);
                CHECK(v <= hi);
            }
        }
    }
}

TEST_CASE("single locality, nlp=1 matches the serial reference bit-exactly") {
    Stencil1DConfig cfg;
    cfg.total_points = 10;
    cfg.steps = 3;
    cfg.nlp = 1;
    const LocalityResult res = run_1d_inproc(cfg, 1, 1);
    const double expected = sum_of(serial_solve(10, 3, cfg.params.k()));
    REQUIRE(res.global_checksum.has_value());
    CHECK(same_bits(*res.global_checksum, expected));
}

TEST_CASE("partition invariance: L x nlp decompositions agree bit-exactly") {
    Stencil1DConfig cfg;
    cfg.total_points = 1024;
    cfg.steps = 100;
    const double expected = sum_of(serial_solve(1024, 100, cfg.params.k()));
    for (int localities : {1, 2, 4}) {
        for (std::size_t nlp : {std::size_t(1), std::size_t(4)}) {
            cfg.nlp = nlp;
            const LocalityResult res = run_1d_inproc(cfg, localities, 2);
            REQUIRE(res.global_checksum.has_value());
            INFO("L=", localities, " nlp=", nlp);
            CHECK(same_bits(*res.global_checksum, expected));
        }
    }
}

TEST_CASE("ghost exchange feeds edge partitions the neighbor boundary") {
    // two localities, steep step in the middle; after one step the cells at
    // the locality seam must see each other through ghosts
    Stencil1DConfig cfg;
    cfg.total_points = 8;
    cfg.steps = 1;
    cfg.nlp = 1;
    const LocalityResult split = run_1d_inproc(cfg, 2, 1);
    const double expected = sum_of(serial_solve(8, 1, cfg.params.k()));
    REQUIRE(split.global_checksum.has_value());
    CHECK(same_bits(*split.global_checksum, expected));
}

TEST_CASE("invalid decompositions are rejected") {
    Stencil1DConfig cfg;
    cfg.total_points = 1000;
    cfg.nlp = 3;
    CHECK_THROWS_AS(cfg.validate(7), ConfigError);  // 1000 % 21 != 0
    cfg.nlp = 250;
    CHECK_NOTHROW(cfg.validate(2));                 // exactly 2 cells each
    cfg.nlp = 500;
    CHECK_THROWS_AS(cfg.validate(2), ConfigError);  // 1 cell per partition
    cfg.total_points = 0;
    CHECK_THROWS_AS(cfg.validate(1), ConfigError);
}

TEST_CASE("partition rejects degenerate shapes") {
    CHECK_THROWS_AS(Partition1D(0, 1, 4), ConfigError);
    CHECK_THROWS_AS(Partition1D(0, 8, 0), ConfigError);
}

TEST_CASE("tcp loopback solve matches the in-process checksum") {
    Stencil1DConfig cfg;
    cfg.total_points = 4000;
    cfg.steps = 25;
    cfg.nlp = 2;
    const LocalityResult inproc = run_1d_inproc(cfg, 2, 1);

    std::optional<double> tcp_checksum;
    std::mutex m;
    run_cluster_tcp_loopback(2, [&](Transport& tr) {
        Executor ex(1);
        const LocalityResult local = solve_1d_locality(tr, ex, cfg);
        if (tr.id().rank == 0) {
            std::lock_guard lk(m);
            tcp_checksum = local.global_checksum;
        }
    });
    REQUIRE(inproc.global_checksum.has_value());
    REQUIRE(tcp_checksum.has_value());
    CHECK(same_bits(*tcp_checksum, *inproc.global_checksum));
}
