#include <doctest.h>

#include <random>
#include <sstream>

#include "sbench/roofline.hpp"

using namespace sbench;

TEST_CASE("attainable performance is min(CP, AI * BW)") {
    const double huge = 1e30;
    CHECK(attainable({huge, 1.0 / 24.0, 48e9}) ==
          doctest::Approx(2e9).epsilon(1e-12));
    CHECK(attainable({huge, 1.0 / 12.0, 100e9}) ==
          doctest::Approx(8.333e9).epsilon(1e-3));
    // compute-bound branch
    CHECK(attainable({1e9, 1.0, 2e9}) == 1e9);
}

TEST_CASE("attainable rejects non-positive inputs") {
    CHECK_THROWS_AS(attainable({0.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(attainable({1.0, -1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(attainable({1.0, 1.0, 0.0}), ConfigError);
}

TEST_CASE("attainable is monotone in every input") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    for (int rep = 0; rep < 200; ++rep) {
        RooflineInputs in{dist(rng) * 1e9, dist(rng) / 16.0, dist(rng) * 1e10};
        const double base = attainable(in);
        RooflineInputs more = in;
        more.cp_lups *= 1.5;
        CHECK(attainable(more) >= base);
        more = in;
        more.ai_lup_per_byte *= 1.5;
        CHECK(attainable(more) >= base);
        more = in;
        more.bw_bytes_per_s *= 1.5;
        CHECK(attainable(more) >= base);
    }
}

TEST_CASE("stencil arithmetic intensities") {
    CHECK(StencilAiSpec{4, 3}.bytes_per_lup() == 12);
    CHECK(StencilAiSpec{8, 3}.bytes_per_lup() == 24);
    CHECK(StencilAiSpec{4, 2}.bytes_per_lup() == 8);
    CHECK(StencilAiSpec{8, 2}.bytes_per_lup() == 16);
    CHECK(StencilAiSpec{4, 3}.ai() == 1.0 / 12.0);
    CHECK(StencilAiSpec{8, 3}.ai() == 1.0 / 24.0);
    CHECK(StencilAiSpec{4, 2}.ai() == 1.0 / 8.0);
    CHECK(StencilAiSpec{8, 2}.ai() == 1.0 / 16.0);
}

TEST_CASE("reference node table") {
    const auto profiles = table1_profiles();
    REQUIRE(profiles.size() == 4);

    const auto& xeon = profiles[0];
    CHECK(xeon.name == "xeon-e5-2660v3");
    CHECK(xeon.derived_peak_gflops() == doctest::Approx(832.0));
    CHECK(xeon.peak_consistent());

    const auto& kunpeng = profiles[1];
    CHECK(kunpeng.derived_peak_gflops() == doctest::Approx(614.4));
    CHECK(kunpeng.peak_consistent());

    // the published ThunderX2 peak does not factor; the invariant flags it
    const auto& tx2 = profiles[2];
    CHECK(tx2.peak_gflops == 1228.0);
    CHECK(tx2.derived_peak_gflops() == doctest::Approx(614.4));
    CHECK_FALSE(tx2.peak_consistent());

    const auto& a64fx = profiles[3];
    CHECK(a64fx.derived_peak_gflops() == doctest::Approx(3379.2));
    CHECK(a64fx.peak_consistent());
}

TEST_CASE("profile tables parse and reject junk") {
    std::istringstream good("# comment\n\nmybox 3.0 16 8 384\n");
    const auto profiles = parse_profiles(good);
    REQUIRE(profiles.size() == 1);
    CHECK(profiles[0].name == "mybox");
    CHECK(profiles[0].peak_consistent());

    std::istringstream missing_field("mybox 3.0 16\n");
    CHECK_THROWS_AS(parse_profiles(missing_field), ConfigError);
    std::istringstream negative("mybox -3.0 16 8 384\n");
    CHECK_THROWS_AS(parse_profiles(negative), ConfigError);
    CHECK_THROWS_AS(load_profiles("/nonexistent/profiles.cfg"), ConfigError);
}

TEST_CASE("expected-peak curves and the cache-blocking headroom") {
    std::vector<BandwidthPoint> bw;
    for (std::size_t w : {1u, 2u, 4u, 8u}) {
        BandwidthPoint p = make_bandwidth_point(w, 1000, 1.0);
        p.gbps = 48.0 * double(w) / 8.0;  // synthetic ramp up to 48 GB/s
        bw.push_back(p);
    }

    const auto dbl = expected_peak_curves(bw, 8);
    REQUIRE(dbl.size() == 4);
    CHECK(dbl.back().min_glups == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dbl.back().max_glups == doctest::Approx(3.0).epsilon(1e-12));
    for (const auto& p : dbl)
        CHECK(p.max_glups / p.min_glups ==
              doctest::Approx(1.5).epsilon(1e-9));

    const auto flt = expected_peak_curves(bw, 4);
    // float spec at 96 GB/s gives 8 GLUP/s on the three-transfer roof
    BandwidthPoint fast = make_bandwidth_point(16, 1000, 1.0);
    fast.gbps = 96.0;
    const auto one = expected_peak_curves(std::vector<BandwidthPoint>{fast}, 4);
    CHECK(one[0].min_glups == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(flt.back().min_glups == doctest::Approx(4.0).epsilon(1e-12));

    CHECK_THROWS_AS(expected_peak_curves({}, 8), ConfigError);
}
