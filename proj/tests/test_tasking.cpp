#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <vector>

#include "sbench/tasking.hpp"

using namespace sbench;

TEST_CASE("static block split matches the ceil/floor rule") {
    // [0,8) over 2 workers: {0..3} and {4..7}
    CHECK(block_for_worker(0, 8, 2, 0) == BlockRange{0, 4});
    CHECK(block_for_worker(0, 8, 2, 1) == BlockRange{4, 8});

    // [0,7) over 3 workers: sizes {3,2,2} in order
    CHECK(block_for_worker(0, 7, 3, 0) == BlockRange{0, 3});
    CHECK(block_for_worker(0, 7, 3, 1) == BlockRange{3, 5});
    CHECK(block_for_worker(0, 7, 3, 2) == BlockRange{5, 7});

    // empty range: every block empty
    CHECK(block_for_worker(0, 0, 4, 2).size() == 0);
}

TEST_CASE("block split is a deterministic partition with near-equal sizes") {
    for (std::size_t n : {0u, 1u, 2u, 7u, 8u, 63u, 64u, 1001u}) {
        for (std::size_t w : {1u, 2u, 3u, 5u, 8u, 16u}) {
            std::size_t covered = 0;
            std::size_t min_size = n + 1, max_size = 0;
            for (std::size_t b = 0; b < w; ++b) {
                const BlockRange blk = block_for_worker(3, 3 + n, w, b);
                CHECK(blk == block_for_worker(3, 3 + n, w, b));  // repeatable
                covered += blk.size();
                min_size = std::min(min_size, blk.size());
                max_size = std::max(max_size, blk.size());
                for (std::size_t i = blk.begin; i < blk.end; ++i)
                    CHECK(worker_for_index(3, 3 + n, w, i) == b);
            }
            CHECK(covered == n);  // exactly one owner per index
            if (n > 0) CHECK(max_size - min_size <= 1);
        }
    }
}

TEST_CASE("parallel_for_each invokes the body exactly once per index") {
    Executor ex(3);
    std::vector<std::atomic<int>> hits(100);
    ex.parallel_for_each(0, 100, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for_each on an empty range returns immediately") {
    Executor ex(4);
    bool invoked = false;
    ex.parallel_for_each(5, 5, [&](std::size_t) { invoked = true; });
    CHECK_FALSE(invoked);
}

TEST_CASE("a throwing body reports failure after all workers stop") {
    Executor ex(4);
    std::vector<std::atomic<int>> hits(64);
    CHECK_THROWS_WITH_AS(
        ex.parallel_for_each(0, 64,
                             [&](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                                 hits[i]++;
                             }),
        "boom", std::runtime_error);
    // every index outside the failing worker's tail still ran
    int ran = 0;
    for (auto& h : hits) ran += h.load();
    CHECK(ran >= 48);  // three healthy workers of 16 indices each
    // the executor stays usable
    ex.parallel_for_each(0, 8, [](std::size_t) {});
}

TEST_CASE("worker_count=1 is bit-identical to a plain sequential loop") {
    const std::size_t n = 1000;
    std::vector<double> serial(n), pooled(n);
    for (std::size_t i = 0; i < n; ++i)
        serial[i] = std::sin(double(i)) * 0.3 + double(i % 7);
    Executor ex(1);
    ex.parallel_for_each(0, n, [&](std::size_t i) {
        pooled[i] = std::sin(double(i)) * 0.3 + double(i % 7);
    });
    CHECK(serial == pooled);
}

TEST_CASE("executor rejects zero workers") {
    CHECK_THROWS_AS(Executor(0), ConfigError);
}

TEST_CASE("first_touch_init writes each block on its computing worker") {
    Executor ex(2);
    std::vector<double> buf(8, -1.0);
    std::vector<std::thread::id> init_by(8), compute_by(8);

    first_touch_init(std::span<double>(buf), ex, [&](std::size_t i) {
        init_by[i] = std::this_thread::get_id();
        return 0.0;
    });
    for (double v : buf) CHECK(v == 0.0);

    ex.parallel_for_each(0, buf.size(), [&](std::size_t i) {
        compute_by[i] = std::this_thread::get_id();
    });
    CHECK(init_by == compute_by);
    // block 0 = {0..3} on one thread, block 1 = {4..7} on another
    CHECK(init_by[0] == init_by[3]);
    CHECK(init_by[4] == init_by[7]);
    CHECK(init_by[0] != init_by[4]);
}

TEST_CASE("init split equals compute split across a size sweep") {
    for (std::size_t n : {1u, 5u, 16u, 33u}) {
        for (std::size_t w : {1u, 2u, 4u}) {
            for (std::size_t b = 0; b < w; ++b)
                CHECK(block_for_worker(0, n, w, b) ==
                      block_for_worker(0, n, w, b));
        }
    }
}

TEST_CASE("monotonic timer") {
    const double t1 = monotonic_seconds();
    const double t2 = monotonic_seconds();
    CHECK(t2 >= t1);

    Stopwatch watch;
    const double spin_until = monotonic_seconds() + 0.01;
    while (monotonic_seconds() < spin_until) {
    }
    const double elapsed = watch.elapsed();
    CHECK(elapsed >= 0.005);
    CHECK(elapsed <= 1.0);
}

TEST_CASE("stopwatch accepts an injected clock") {
    double now = 100.0;
    Stopwatch watch([&] { return now; });
    now += 0.5;
    CHECK(watch.elapsed() == 0.5);
    watch.restart();
    CHECK(watch.elapsed() == 0.0);
}

TEST_CASE("future is one-shot and ready futures return without blocking") {
    Promise<int> p;
    Future<int> f = p.future();
    CHECK_FALSE(f.is_ready());
    p.set_value(7);
    CHECK(f.is_ready());
    CHECK(f.get() == 7);
    CHECK(f.get() == 7);  // repeatable once ready
    CHECK_THROWS_AS(p.set_value(8), std::logic_error);
}

TEST_CASE("future get blocks until another thread fulfils it") {
    Promise<double> p;
    Future<double> f = p.future();
    std::thread producer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
        p.set_value(2.5);
    });
    CHECK(f.get() == 2.5);
    producer.join();
}

TEST_CASE("future propagates errors") {
    Promise<int> p;
    Future<int> f = p.future();
    p.set_error(std::make_exception_ptr(std::runtime_error("nope")));
    CHECK_THROWS_AS(f.get(), std::runtime_error);
}
