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

// Compares the OpenMP kernels against their serial reference paths and
// checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "potts/bp.hpp"
#include "potts/channel.hpp"
#include "potts/rng.hpp"
#include "potts/treesim.hpp"

using namespace potts;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

Channel random_population(int q, int atoms, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(atoms), pts;
  double s = 0.0;
  for (double& x : w) {
    x = rng.next_unit() + 1e-3;
    s += x;
  }
  for (double& x : w) x /= s;
  for (int a = 0; a < atoms; ++a) {
    std::vector<double> pi(q);
    double t = 0.0;
    for (double& x : pi) {
      x = -std::log(rng.next_unit() + 1e-300);
      t += x;
    }
    for (double& x : pi) x /= t;
    auto c = canonicalize(pi).probs();
    pts.insert(pts.end(), c.begin(), c.end());
  }
  return Channel(q, std::move(w), std::move(pts));
}

void bench_star() {
  const int q = 3, atoms = 500;
  auto p = random_population(q, atoms, 11);
  auto r = random_population(q, atoms, 12);
  const uint64_t budget = uint64_t(1) << 22;

  auto t0 = clock_type::now();
  auto serial = star_serial(p, r, budget);
  double ts = seconds_since(t0);
  t0 = clock_type::now();
  auto parallel = star(p, r, budget);
  double tp = seconds_since(t0);

  bool same = serial.weights() == parallel.weights() &&
              serial.points() == parallel.points();
  std::printf("star %dx%d atoms (q=%d): serial %.3fs, openmp %.3fs, x%.2f, %s\n",
              atoms, atoms, q, ts, tp, ts / tp,
              same ? "bit-identical" : "MISMATCH");
}

void bench_trials() {
  Scenario sc;
  sc.leaf = make_channel(ChannelSpec::potts(0.5), 3);
  sc.survey = make_channel(ChannelSpec::erasure(0.5), 3);
  auto off = OffspringDist::poisson(3.0);
  const int trials = 20000;

  auto t0 = clock_type::now();
  auto serial = estimate(sc, 3, 0.5, off, 4, trials, 77, false);
  double ts = seconds_since(t0);
  t0 = clock_type::now();
  auto parallel = estimate(sc, 3, 0.5, off, 4, trials, 77, true);
  double tp = seconds_since(t0);

  bool same = serial.pe.mean == parallel.pe.mean &&
              serial.info.mean == parallel.info.mean &&
              serial.chi2.mean == parallel.chi2.mean;
  std::printf("treesim %d trials (depth 4): serial %.3fs, openmp %.3fs, x%.2f, %s\n",
              trials, ts, tp, ts / tp, same ? "bit-identical" : "MISMATCH");
}

void bench_bp_step() {
  BpParams params(PottsParams(3, 0.6), OffspringDist::poisson(4.0));
  params.cap = 50000;
  params.star_budget = uint64_t(1) << 19;
  params.survey = make_channel(ChannelSpec::erasure(0.5), 3);
  auto m = make_channel(ChannelSpec::identity(), 3);
  auto t0 = clock_type::now();
  for (int k = 1; k <= 5; ++k) m = bp_step(m, params, k);
  double t = seconds_since(t0);
  std::printf("bp_step x5 (poisson d=4, budget 2^19): %.3fs total, %d atoms\n", t,
              m.atom_count());
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp with %d threads\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both paths run serially\n");
#endif
  bench_star();
  bench_trials();
  bench_bp_step();
  return 0;
}
