#include "sbench/tasking.hpp"

#include <chrono>

namespace sbench {

BlockRange block_for_worker(std::size_t lo, std::size_t hi,
                            std::size_t workers, std::size_t worker) {
    if (workers == 0) throw ConfigError("worker_count must be >= 1");
    if (worker >= workers) throw ConfigError("worker index out of range");
    const std::size_t n = hi - lo;
    const std::size_t q = n / workers;
    const std::size_t r = n % workers;
    // first r blocks take q+1 indices, the rest q
    const std::size_t begin =
        lo + worker * q + std::min<std::size_t>(worker, r);
    const std::size_t size = q + (worker < r ? 1 : 0);
    return {begin, begin + size};
}

std::size_t worker_for_index(std::size_t lo, std::size_t hi,
                             std::size_t workers, std::size_t index) {
    const std::size_t n = hi - lo;
    const std::size_t q = n / workers;
    const std::size_t r = n % workers;
    const std::size_t off = index - lo;
    const std::size_t fat = r * (q + 1);  // indices covered by the q+1 blocks
    if (q == 0 || off < fat) return off / (q + 1);
    return r + (off - fat) / q;
}

Executor::Executor(std::size_t worker_count) {
    if (worker_count == 0) throw ConfigError("worker_count must be >= 1");
    workers_.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w)
        workers_.emplace_back([this, w] { worker_loop(w); });
}

Executor::~Executor() {
    {
        std::lock_guard lk(m_);
        stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : workers_) t.join();
}

void Executor::worker_loop(std::size_t w) {
    std::uint64_t seen = 0;
    for (;;) {
        const std::function<void(std::size_t)>* job = nullptr;
        {
            std::unique_lock lk(m_);
            cv_work_.wait(lk, [&] { return stop_ || epoch_ != seen; });
            if (stop_) return;
            seen = epoch_;
            job = job_;
        }
        std::exception_ptr err;
        try {
            (*job)(w);
        } catch (...) {
            err = std::current_exception();
        }
        {
            std::lock_guard lk(m_);
            if (err && !first_error_) first_error_ = err;
            if (--remaining_ == 0) cv_done_.notify_all();
        }
    }
}

void Executor::run_on_workers(const std::function<void(std::size_t)>& job) {
    std::lock_guard coord(coordinator_);
    {
        std::lock_guard lk(m_);
        job_ = &job;
        first_error_ = nullptr;
        remaining_ = workers_.size();
        ++epoch_;
    }
    cv_work_.notify_all();
    std::exception_ptr err;
    {
        std::unique_lock lk(m_);
        cv_done_.wait(lk, [&] { return remaining_ == 0; });
        job_ = nullptr;
        err = first_error_;
    }
    if (err) std::rethrow_exception(err);
}

double monotonic_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace sbench
