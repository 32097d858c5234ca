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

#include <cstdint>
#include <string_view>
#include <vector>

namespace kgqa {

/// Splittable deterministic PRNG (splitmix64 core). Sampling results depend
/// only on (seed, substream key, call sequence) — never on platform libstdc++
/// distribution internals or hash-map iteration order.
class Prng {
public:
    explicit Prng(uint64_t seed) : state_(seed) {}

    /// Derive an independent substream from a string key, e.g. a relation id.
    static Prng substream(uint64_t seed, std::string_view key) {
        uint64_t h = fnv1a(key);
        Prng mixer(seed ^ (h + 0x9e3779b97f4a7c15ULL));
        mixer.next();  // decorrelate from the raw xor
        return Prng(mixer.next());
    }

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t bounded(uint64_t n) {
        // multiply-shift reduction with rejection of the biased zone
        uint64_t threshold = (0 - n) % n;
        while (true) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// First k elements of a seeded partial Fisher-Yates shuffle of v.
    template <typename T>
    std::vector<T> sample(std::vector<T> v, size_t k) {
        if (k > v.size()) k = v.size();
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + static_cast<size_t>(bounded(v.size() - i));
            std::swap(v[i], v[j]);
        }
        v.resize(k);
        return v;
    }

    static uint64_t fnv1a(std::string_view s) {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    uint64_t state_;
};

}  // namespace kgqa
