#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "sbench/records.hpp"
#include "sbench/verify.hpp"

using namespace sbench;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sbench_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

}  // namespace

TEST_CASE("dat lines are exactly '<x> <y>\\n'") {
    CHECK(format_dat_line(4, 2.5) == "4 2.5\n");
    CHECK(format_dat_line(1, 28.0) == "1 28\n");
    CHECK(format_dat_line(16, 0.125) == "16 0.125\n");

    TempDir tmp;
    {
        DatWriter dat(tmp.file("series.dat"), false);
        dat.point(1, 10.5);
        dat.point(2, 21.25);
    }
    std::ifstream in(tmp.file("series.dat"));
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    CHECK(all == "1 10.5\n2 21.25\n");
}

TEST_CASE("run records round-trip through JSON lines and only append") {
    RunRecord rec;
    rec.benchmark = "stencil2d";
    rec.config = {{"width", "512"}, {"workers", "4"}};
    rec.timestamp = "2021-03-02T10:00:00Z";
    rec.wall_seconds = 1.25;
    rec.metric_name = "glups";
    rec.metric_value = 0.42;
    rec.work_units = 525000000ull;
    rec.checksum = 123456.789;
    rec.run_index = 2;
    rec.runs = 5;
    rec.best_of = "max-glups";

    const RunRecord back = record_from_json_line(to_json_line(rec));
    CHECK(back.benchmark == rec.benchmark);
    CHECK(back.config == rec.config);
    CHECK(back.wall_seconds == rec.wall_seconds);
    CHECK(back.metric_value == rec.metric_value);
    CHECK(back.work_units == rec.work_units);
    CHECK(back.checksum == rec.checksum);
    CHECK(back.run_index == rec.run_index);
    CHECK(back.best_of == rec.best_of);

    TempDir tmp;
    const std::string path = tmp.file("records.jsonl");
    append_record(path, rec);
    rec.run_index = 3;
    append_record(path, rec);
    const auto recs = load_records(path);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].run_index == 2);  // the earlier record survived
    CHECK(recs[1].run_index == 3);
}

TEST_CASE("metric is recomputable from the work/seconds pair") {
    RunRecord rec;
    rec.metric_name = "glups";
    rec.work_units = 1000000000ull;
    rec.wall_seconds = 2.0;
    rec.metric_value = 0.5;
    CHECK(double(rec.work_units) / rec.wall_seconds / 1e9 == rec.metric_value);
}

TEST_CASE("verify_all passes on the default seed") {
    VerifyOptions opt;
    opt.quick = true;
    const auto results = verify_all(opt);
    REQUIRE(results.size() == 6);
    for (const auto& r : results) {
        INFO(r.name, ": ", r.detail);
        CHECK(r.pass);
    }
    CHECK(all_passed(results));
}

TEST_CASE("a corrupted halo shuffle is caught by the equivalence oracle") {
    VerifyOptions opt;
    opt.quick = true;
    opt.corrupt_shuffle = true;
    const auto results = verify_all(opt);
    bool equivalence_failed = false;
    for (const auto& r : results)
        if (r.name == "2d-packed-equivalence" && !r.pass)
            equivalence_failed = true;
    CHECK(equivalence_failed);
    CHECK_FALSE(all_passed(results));
}
