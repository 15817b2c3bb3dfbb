#pragma once

#include <exception>
#include <thread>
#include <vector>

#include "bkh/common.hpp"

namespace bkh {

// Deterministic parallel reduction: the index range is split into one
// contiguous chunk per worker, each chunk is reduced left to right, and
// chunk results are merged in chunk order. Any merge that is associative
// therefore yields results independent of the worker count.
template <class T, class PerIndex, class Merge>
T parallel_reduce(std::size_t count, int workers, T init, PerIndex per_index, Merge merge) {
    if (workers < 1) workers = 1;
    if (count == 0) return init;
    if (workers == 1 || count == 1) {
        T acc = std::move(init);
        for (std::size_t i = 0; i < count; ++i) merge(acc, per_index(i));
        return acc;
    }
    std::size_t nchunks = std::min<std::size_t>(std::size_t(workers), count);
    std::vector<T> partial(nchunks, init);
    std::vector<std::exception_ptr> errors(nchunks);
    std::vector<std::thread> pool;
    pool.reserve(nchunks);
    for (std::size_t c = 0; c < nchunks; ++c) {
        pool.emplace_back([&, c]() {
            try {
                std::size_t lo = count * c / nchunks;
                std::size_t hi = count * (c + 1) / nchunks;
                for (std::size_t i = lo; i < hi; ++i) merge(partial[c], per_index(i));
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    T acc = std::move(init);
    for (std::size_t c = 0; c < nchunks; ++c) merge(acc, std::move(partial[c]));
    return acc;
}

} // namespace bkh
