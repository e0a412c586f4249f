/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEML_RNG_HPP
#define LEML_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>

namespace leml {

// Seeded generator with hand-mapped draws so the same seed produces the
// same stream on every platform (std::uniform_*_distribution is not
// portable across standard libraries).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Uniform in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % n;
        } while (x - r > UINT64_MAX - (n - 1));
        return r;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace leml

#endif // LEML_RNG_HPP
