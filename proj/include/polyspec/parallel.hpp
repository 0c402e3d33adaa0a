#ifndef POLYSPEC_PARALLEL_HPP
#define POLYSPEC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace polyspec {

/// Number of worker threads; 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Jobs share
/// nothing, so results do not depend on scheduling. The first exception
/// thrown by any job is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn &&fn)
{
    std::vector<T> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace polyspec

#endif // POLYSPEC_PARALLEL_HPP
