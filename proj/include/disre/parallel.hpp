#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace disre {

/**
 * Runs fn(i) for i in [0, count) over `workers` threads using static
 * contiguous chunks. Each index is visited exactly once, so any per-index
 * output is independent of the worker count. The first exception thrown by
 * any worker is rethrown on the calling thread.
 */
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(workers, count);
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::jthread> threads;
    threads.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = count * c / chunks;
        const std::size_t hi = count * (c + 1) / chunks;
        threads.emplace_back([&, c, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    threads.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Fixed-size thread pool executing queued jobs in FIFO order.
class WorkerPool {
public:
    explicit WorkerPool(unsigned workers) {
        workers = std::max(1u, workers);
        for (unsigned i = 0; i < workers; ++i) {
            threads_.emplace_back([this](std::stop_token stop) { loop(stop); });
        }
    }

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            closing_ = true;
        }
        ready_.notify_all();
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void submit(std::function<void()> job) {
        {
            std::lock_guard lock(mutex_);
            jobs_.push(std::move(job));
        }
        ready_.notify_one();
    }

    std::size_t size() const { return threads_.size(); }

private:
    void loop(std::stop_token stop) {
        for (;;) {
            std::function<void()> job;
            {
                std::unique_lock lock(mutex_);
                ready_.wait(lock, [&] { return closing_ || !jobs_.empty() || stop.stop_requested(); });
                if (jobs_.empty()) return;
                job = std::move(jobs_.front());
                jobs_.pop();
            }
            job();
        }
    }

    std::mutex mutex_;
    std::condition_variable ready_;
    std::queue<std::function<void()>> jobs_;
    bool closing_ = false;
    std::vector<std::jthread> threads_;
};

}  // namespace disre
