/*
 Copyright 2026 The lightaug Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lightaug
{
    /// Seeded random source with platform-independent draws.
    ///
    /// The engine is std::mt19937_64, whose output sequence is fixed by the
    /// standard. The std:: distributions are not, so the uniform draws are
    /// implemented here to keep augmented images identical across toolchains.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed)
            : m_engine(seed)
        {
        }

        std::uint64_t next() { return m_engine(); }

        /// Uniform in [0, 1).
        double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        /// Uniform integer in [lo, hi], both inclusive. Unbiased (rejection).
        std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
        {
            const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
            if (span == 0)
            {
                return static_cast<std::int64_t>(next());
            }
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
            std::uint64_t       v     = next();
            while (v >= limit)
            {
                v = next();
            }
            return lo + static_cast<std::int64_t>(v % span);
        }

        bool bernoulli(double p) { return uniform() < p; }

    private:
        std::mt19937_64 m_engine;
    };

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL)
    {
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    /// Per-image seed derived from the run seed and the image id. Stable
    /// across runs, platforms and worker scheduling.
    inline std::uint64_t image_seed(std::uint64_t global_seed, std::string_view image_id)
    {
        return splitmix64(global_seed ^ splitmix64(fnv1a64(image_id)));
    }
}
