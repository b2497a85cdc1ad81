// Copyright 2026 The PottsDE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace potts {

// splitmix64 step; also used as the stream-splitting hash.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: a stream is fully determined by (seed, stream id),
// so independent trials can be generated in any order or in parallel.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds
    next_u64();
    next_u64();
  }

  static Rng stream(uint64_t seed, uint64_t stream_id) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    s ^= stream_id * 0x9e3779b97f4a7c15ULL;
    uint64_t b = splitmix64(s);
    return Rng(a ^ (b + 0x632be59bd9b4e019ULL));
  }

  uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  double next_gaussian() {
    // polar Box-Muller, spare discarded
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  // sample index from a cumulative table (cdf.back() == 1 within rounding)
  int next_from_cdf(const std::vector<double>& cdf) {
    double u = next_unit();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  uint64_t state_;
};

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t s = seed ^ (salt * 0xd1342543de82ef95ULL);
  return splitmix64(s);
}

}  // namespace potts
