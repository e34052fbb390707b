// Copyright 2026 The cqbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQBSIM_PARALLEL_H
#define CQBSIM_PARALLEL_H

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cqbsim {

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads. Results are stored by
/// index, so any reduction over the returned vector is independent of scheduling.
/// The first exception thrown by a task is rethrown on the calling thread.
template <typename Fn>
auto parallel_map(size_t n, int workers, Fn &&fn) -> std::vector<decltype(fn(size_t{}))> {
    using T = decltype(fn(size_t{}));
    std::vector<T> out(n);
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; i++) {
            out[i] = fn(i);
        }
        return out;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    size_t count = std::min<size_t>(static_cast<size_t>(workers), n);
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (size_t k = 0; k < count; k++) {
        threads.emplace_back(worker);
    }
    for (auto &t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace cqbsim

#endif
