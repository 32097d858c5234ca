// Copyright 2026 the kgqa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace kgqa {

/// Apply fn to every item with at most `threads` workers, returning results
/// in input order. Used to run independent LLM calls under the gateway's
/// in-flight cap; output order stays canonical regardless of scheduling.
/// fn must be safe to call concurrently. The first exception thrown by fn
/// is rethrown after all workers finish.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, Fn fn, unsigned threads)
    -> std::vector<decltype(fn(items.front()))> {
    using Out = decltype(fn(items.front()));
    if (threads <= 1 || items.size() <= 1) {
        std::vector<Out> out;
        out.reserve(items.size());
        for (const auto& item : items) out.push_back(fn(item));
        return out;
    }

    std::vector<std::optional<Out>> slots(items.size());
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            size_t i = cursor.fetch_add(1);
            if (i >= items.size()) return;
            try {
                slots[i] = fn(items[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned n = std::min<size_t>(threads, items.size());
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
    std::vector<Out> out;
    out.reserve(items.size());
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

}  // namespace kgqa
