#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "sbench/errors.hpp"

namespace sbench {

// ---------------------------------------------------------------------------
// Static block distribution
// ---------------------------------------------------------------------------

struct BlockRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const BlockRange&) const = default;
};

/// Contiguous block of [lo, hi) owned by `worker` under the static policy:
/// the first (hi-lo) % workers blocks get ceil(n/w) indices, the rest floor.
BlockRange block_for_worker(std::size_t lo, std::size_t hi,
                            std::size_t workers, std::size_t worker);

/// Inverse map: which worker owns `index` of [lo, hi).
std::size_t worker_for_index(std::size_t lo, std::size_t hi,
                             std::size_t workers, std::size_t index);

enum class BlockPolicy { static_block };

struct ExecutorConfig {
    std::size_t worker_count = 1;
    BlockPolicy block_policy = BlockPolicy::static_block;
};

// ---------------------------------------------------------------------------
// Future / Promise
// ---------------------------------------------------------------------------

/// One-shot future. pending -> ready happens at most once; get() on a ready
/// future returns the stored value without blocking, and may be called from
/// any thread, any number of times.
template <class T>
class Future {
  public:
    Future() = default;

    bool valid() const { return static_cast<bool>(st_); }

    bool is_ready() const {
        std::lock_guard lk(st_->m);
        return st_->ready;
    }

    /// Blocks until ready, then returns the value (or rethrows the error).
    T get() const {
        std::unique_lock lk(st_->m);
        st_->cv.wait(lk, [&] { return st_->ready; });
        if (st_->error) std::rethrow_exception(st_->error);
        return *st_->value;
    }

  private:
    template <class U>
    friend class Promise;

    struct State {
        mutable std::mutex m;
        std::condition_variable cv;
        bool ready = false;
        std::optional<T> value;
        std::exception_ptr error;
    };

    explicit Future(std::shared_ptr<State> st) : st_(std::move(st)) {}

    std::shared_ptr<State> st_;
};

template <class T>
class Promise {
  public:
    Promise() : st_(std::make_shared<typename Future<T>::State>()) {}

    Future<T> future() const { return Future<T>(st_); }

    void set_value(T v) {
        std::lock_guard lk(st_->m);
        if (st_->ready) throw std::logic_error("promise already satisfied");
        st_->value = std::move(v);
        st_->ready = true;
        st_->cv.notify_all();
    }

    void set_error(std::exception_ptr e) {
        std::lock_guard lk(st_->m);
        if (st_->ready) throw std::logic_error("promise already satisfied");
        st_->error = std::move(e);
        st_->ready = true;
        st_->cv.notify_all();
    }

  private:
    std::shared_ptr<typename Future<T>::State> st_;
};

// ---------------------------------------------------------------------------
// Executor
// ---------------------------------------------------------------------------

/// Fixed pool of workers. parallel_for_each() splits [lo, hi) into
/// worker_count contiguous blocks, block b runs on worker b, and the call
/// returns only after every invocation completed (barrier per call). If any
/// body invocation throws, the first exception is rethrown after all workers
/// finished their blocks.
///
/// One coordinating thread may drive an executor at a time; worker bodies may
/// block on futures delivered by other threads.
class Executor {
  public:
    explicit Executor(std::size_t worker_count);
    explicit Executor(const ExecutorConfig& cfg) : Executor(cfg.worker_count) {}
    ~Executor();

    Executor(const Executor&) = delete;
    Executor& operator=(const Executor&) = delete;

    std::size_t worker_count() const { return workers_.size(); }

    template <class F>
    void parallel_for_each(std::size_t lo, std::size_t hi, F&& body) {
        if (lo > hi) throw ConfigError("parallel_for_each: lo > hi");
        if (lo == hi) return;
        run_on_workers([&](std::size_t w) {
            const BlockRange blk = block_for_worker(lo, hi, worker_count(), w);
            for (std::size_t i = blk.begin; i != blk.end; ++i) body(i);
        });
    }

  private:
    // Publishes one job per worker and waits for the barrier.
    void run_on_workers(const std::function<void(std::size_t)>& job);
    void worker_loop(std::size_t w);

    std::vector<std::thread> workers_;
    std::mutex coordinator_;

    std::mutex m_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::uint64_t epoch_ = 0;
    std::size_t remaining_ = 0;
    std::exception_ptr first_error_;
    bool stop_ = false;
};

/// Writes initial values into exactly the blocks each worker will later
/// compute on (same split function as parallel_for_each), so that Linux
/// first-touch places every page on the NUMA domain of its future writer.
template <class S, class F>
void first_touch_init(std::span<S> buffer, Executor& ex, F&& value_at) {
    ex.parallel_for_each(0, buffer.size(),
                         [&](std::size_t i) { buffer[i] = value_at(i); });
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

/// Monotonic wall clock in fractional seconds, sub-microsecond resolution.
double monotonic_seconds();

/// Injectable clock source; benchmark runners take one so throughput
/// formulas stay testable with scripted timings.
using Clock = std::function<double()>;

class Stopwatch {
  public:
    explicit Stopwatch(Clock clock = {})
        : clock_(clock ? std::move(clock) : Clock(&monotonic_seconds)),
          start_(clock_()) {}

    double elapsed() const { return clock_() - start_; }
    void restart() { start_ = clock_(); }

  private:
    Clock clock_;
    double start_;
};

}  // namespace sbench
