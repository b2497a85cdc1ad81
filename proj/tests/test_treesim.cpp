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

#include "potts/treesim.hpp"

#include <cmath>

#include "doctest.h"

using namespace potts;

TEST_CASE("sample_tree shapes") {
  Rng rng(1);
  auto one = sample_tree(OffspringDist::regular(3), 0, rng);
  CHECK(one.node_count() == 1);
  CHECK(one.depth() == 0);

  auto reg = sample_tree(OffspringDist::regular(2), 3, rng);
  CHECK(reg.node_count() == 15);
  CHECK(reg.level_begin(3) == 7);
  CHECK(reg.level_end(3) == 15);
  for (int v = 1; v < reg.node_count(); ++v) CHECK(reg.parent[v] < v);

  CHECK_THROWS(sample_tree(OffspringDist::regular(10), 9, rng));  // budget
}

TEST_CASE("poisson tree mean size") {
  // E[nodes] at depth 2 with d = 3 is 1 + 3 + 9 = 13
  const int trials = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(99, t);
    auto tree = sample_tree(OffspringDist::poisson(3.0), 2, rng);
    double n = tree.node_count();
    sum += n;
    sum2 += n * n;
  }
  double mean = sum / trials;
  double se = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 13.0) <= 3.0 * se);
}

TEST_CASE("broadcast marginals") {
  Rng rng(7);
  auto tree = sample_tree(OffspringDist::regular(2), 3, rng);
  auto all_same = broadcast_labels(tree, PottsParams(3, 1.0), rng);
  for (int8_t l : all_same) CHECK(l == all_same[0]);

  // depth-1 marginal under q=2, lambda=0.5: P(child = root) = 0.75
  int hits = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    Rng r2 = Rng::stream(11, t);
    auto t1 = sample_tree(OffspringDist::regular(1), 1, r2);
    auto lab = broadcast_labels(t1, PottsParams(2, 0.5), r2, 0);
    if (lab[1] == 0) ++hits;
  }
  double p = static_cast<double>(hits) / trials;
  double se = std::sqrt(0.75 * 0.25 / trials);
  CHECK(std::abs(p - 0.75) <= 3.0 * se);

  // lambda = 0: i.i.d. uniform labels
  int count0 = 0;
  for (int t = 0; t < trials / 10; ++t) {
    Rng r2 = Rng::stream(13, t);
    auto t1 = sample_tree(OffspringDist::regular(1), 1, r2);
    auto lab = broadcast_labels(t1, PottsParams(3, 0.0), r2, 0);
    if (lab[1] == 0) ++count0;
  }
  double p0 = static_cast<double>(count0) / (trials / 10);
  CHECK(std::abs(p0 - 1.0 / 3) <= 3.0 * std::sqrt((1.0 / 3) * (2.0 / 3) / (trials / 10)));
}

TEST_CASE("antiferromagnetic broadcast matches the Potts row") {
  const int trials = 100000;
  int same = 0;
  const double lambda = -0.4;
  for (int t = 0; t < trials; ++t) {
    Rng r2 = Rng::stream(17, t);
    auto t1 = sample_tree(OffspringDist::regular(1), 1, r2);
    auto lab = broadcast_labels(t1, PottsParams(2, lambda), r2, 0);
    if (lab[1] == 0) ++same;
  }
  double want = lambda + (1.0 - lambda) / 2;  // 0.3
  double got = static_cast<double>(same) / trials;
  CHECK(std::abs(got - want) <= 3.0 * std::sqrt(want * (1 - want) / trials));
}

TEST_CASE("exact_posterior reference cases") {
  Rng rng(3);
  // no observations: uniform
  auto tree = sample_tree(OffspringDist::regular(2), 2, rng);
  Observation none;
  none.like.assign(tree.node_count() * 3, 1.0);
  none.observed.assign(tree.node_count(), 0);
  auto post = exact_posterior(tree, none, PottsParams(3, 0.5));
  for (double x : post) CHECK(x == doctest::Approx(1.0 / 3));

  // depth 0, root observed exactly
  auto root_only = sample_tree(OffspringDist::regular(2), 0, rng);
  auto id = make_channel(ChannelSpec::identity(), 3);
  std::vector<int8_t> lab = {2};
  auto obs = observe(root_only, lab, nullptr, &id, rng);
  auto post2 = exact_posterior(root_only, obs, PottsParams(3, 0.5));
  CHECK(post2[2] == doctest::Approx(1.0));

  // depth 1, q=2, lambda=0.6, both children observed as color 0
  auto t2 = sample_tree(OffspringDist::regular(2), 1, rng);
  Observation o2;
  o2.like.assign(t2.node_count() * 2, 1.0);
  o2.observed.assign(t2.node_count(), 0);
  for (int v = 1; v <= 2; ++v) {
    o2.observed[v] = 1;
    o2.like[v * 2 + 0] = 1.0;
    o2.like[v * 2 + 1] = 0.0;
  }
  auto post3 = exact_posterior(t2, o2, PottsParams(2, 0.6));
  CHECK(post3[0] == doctest::Approx(16.0 / 17.0));
  CHECK(post3[1] == doctest::Approx(1.0 / 17.0));
}

TEST_CASE("observation likelihood of an erasure survey") {
  // erased draws give a constant likelihood row, exact draws a point mass
  auto ec = make_channel(ChannelSpec::erasure(0.4), 3);
  Rng rng(23);
  int erased = 0, exact = 0;
  const int trials = 20000;
  double like[3];
  for (int t = 0; t < trials; ++t) {
    sample_observation(ec, 1, rng, like);
    if (like[0] == like[1] && like[1] == like[2]) {
      ++erased;
    } else {
      CHECK(like[1] == doctest::Approx(1.0));
      CHECK(like[0] == doctest::Approx(0.0));
      ++exact;
    }
  }
  CHECK(erased + exact == trials);
  double frac = static_cast<double>(erased) / trials;
  CHECK(std::abs(frac - 0.4) <= 3.0 * std::sqrt(0.4 * 0.6 / trials));
}

TEST_CASE("estimate: trivial survey at depth 0 carries no information") {
  Scenario sc;
  sc.survey = make_channel(ChannelSpec::trivial(), 3);
  auto r = estimate(sc, 3, 0.5, OffspringDist::regular(2), 0, 500, 42);
  CHECK(r.info.mean == doctest::Approx(0.0));
  CHECK(r.pe.mean == doctest::Approx(2.0 / 3));
}

TEST_CASE("estimate matches the exact one-level channel") {
  // q=2, regular d=2, lambda=0.8, identity leaves, depth 1: the exact
  // error rate is 0.1 (two-vote enumeration)
  Scenario sc;
  sc.leaf = make_channel(ChannelSpec::identity(), 2);
  auto r = estimate(sc, 2, 0.8, OffspringDist::regular(2), 1, 100000, 7);
  CHECK(std::abs(r.pe.mean - 0.1) <= 3.0 * r.pe.se);
  CHECK(r.pe.se < 0.01);
}

TEST_CASE("estimate agrees with density evolution on a poisson case") {
  const int q = 3;
  const double lambda = 0.5;
  auto off = OffspringDist::poisson(3.0);
  Scenario sc;
  sc.leaf = make_channel(ChannelSpec::identity(), q);

  BpParams params(PottsParams(q, lambda), off);
  params.cap = 60000;
  params.star_budget = 1 << 19;
  params.seed = 5;
  auto trace = iterate(make_channel(ChannelSpec::identity(), q), params, 2, 0.0);

  for (int k = 1; k <= 2; ++k) {
    auto mc = estimate(sc, q, lambda, off, k, 40000, 1234 + k);
    const auto& de = trace.rows[k].m;
    CHECK(std::abs(mc.pe.mean - de.pe) <= 4.0 * mc.pe.se + 1e-3);
    CHECK(std::abs(mc.info.mean - de.capacity) <= 4.0 * mc.info.se + 1e-3);
    CHECK(std::abs(mc.chi2.mean - de.chi2) <= 4.0 * mc.chi2.se + 2e-3);
  }
}

TEST_CASE("parallel and serial trial loops agree bitwise") {
  Scenario sc;
  sc.leaf = make_channel(ChannelSpec::potts(0.5), 2);
  sc.survey = make_channel(ChannelSpec::erasure(0.5), 2);
  auto a = estimate(sc, 2, 0.6, OffspringDist::poisson(2.0), 3, 4000, 99, true);
  auto b = estimate(sc, 2, 0.6, OffspringDist::poisson(2.0), 3, 4000, 99, false);
  CHECK(a.pe.mean == b.pe.mean);
  CHECK(a.info.mean == b.info.mean);
  CHECK(a.chi2.mean == b.chi2.mean);
  CHECK(a.pe.se == b.pe.se);
}

TEST_CASE("variance recursion: hand-checked first step") {
  // q=3, lambda=0.7, d=3 regular, eta=0.5
  auto pred0 = variance_recursion(3, 0.7, 3.0, 0.5, 0, true);
  CHECK(pred0.var_plus == doctest::Approx(0.5 + 1.0 / 3 - 0.25).epsilon(1e-12));
  CHECK(pred0.var_zero == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pred0.mean_plus == doctest::Approx(0.5));

  auto pred1 = variance_recursion(3, 0.7, 3.0, 0.5, 1, true);
  // one recursion step by hand: stay = 0.9, cross = 0.1, drift = 0.25
  CHECK(pred1.var_plus == doctest::Approx(1.9825).epsilon(1e-12));
  CHECK(pred1.var_zero == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(pred1.mean_plus == doctest::Approx(0.5 * 2.1));
}

TEST_CASE("variance recursion: lambda = 0 kills the conditional mean") {
  auto pred = variance_recursion(3, 0.0, 3.0, 0.5, 4, true);
  CHECK(pred.mean_plus == doctest::Approx(0.0));
}

TEST_CASE("variance recursion approaches its closed form above KS") {
  // d lambda^2 = 1.47 > 1; the leading-order solution is (1+o(1))-exact
  auto pred = variance_recursion(3, 0.7, 3.0, 0.5, 20, true);
  CHECK(pred.var_plus / pred.var_plus_closed == doctest::Approx(1.0).epsilon(0.05));
  CHECK(pred.var_zero / pred.var_zero_closed == doctest::Approx(1.0).epsilon(0.05));
  // and the chi2 ratio settles at the predicted limit
  auto deep = variance_recursion(3, 0.7, 3.0, 0.5, 12, true);
  CHECK(deep.chi2_limit > 0.0);
  CHECK(deep.chi2_ratio == doctest::Approx(deep.chi2_limit).epsilon(0.10));
}

TEST_CASE("majority statistics match the recursion at small depth") {
  const int trials = 30000;
  auto emp = majority_stats(3, 0.7, OffspringDist::regular(3), 0.5, 2, trials, 31);
  auto pred = variance_recursion(3, 0.7, 3.0, 0.5, 2, true);
  CHECK(std::abs(emp.mean_plus.mean - pred.mean_plus) <= 3.0 * emp.mean_plus.se);
  CHECK(std::abs(emp.var_plus.mean - pred.var_plus) <= 3.0 * emp.var_plus.se);
  CHECK(std::abs(emp.var_zero.mean - pred.var_zero) <= 3.0 * emp.var_zero.se);
  // conditional symmetry between the two embedded colors
  double comb = std::hypot(emp.var_plus.se, emp.var_minus.se);
  CHECK(std::abs(emp.var_plus.mean - emp.var_minus.mean) <= 3.0 * comb);
}

TEST_CASE("poisson majority uses the poisson correction") {
  const int trials = 30000;
  auto emp = majority_stats(3, 0.7, OffspringDist::poisson(3.0), 0.5, 2, trials, 37);
  auto pred = variance_recursion(3, 0.7, 3.0, 0.5, 2, false);
  CHECK(std::abs(emp.var_plus.mean - pred.var_plus) <= 3.0 * emp.var_plus.se);
  auto wrong = variance_recursion(3, 0.7, 3.0, 0.5, 2, true);
  CHECK(std::abs(pred.var_plus - wrong.var_plus) > 6.0 * emp.var_plus.se);
}

TEST_CASE("estimate's fast trial path matches the public ops bit for bit") {
  // estimate() runs an allocation-free trial loop that must consume the
  // random stream exactly like the public sample_tree/broadcast/observe/
  // exact_posterior pipeline
  const int q = 3;
  PottsParams params(q, 0.55);
  auto off = OffspringDist::poisson(2.5);
  Scenario sc;
  sc.leaf = make_channel(ChannelSpec::potts(0.5), q);
  sc.survey = make_channel(ChannelSpec::erasure(0.5), q);
  const uint64_t seed = 4242;
  const int k = 3;
  const int trials = 500;

  auto fast = estimate(sc, q, 0.55, off, k, trials, seed, false);

  std::vector<double> pe(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, t);
    TreeSample tree = sample_tree(off, k, rng);
    auto labels = broadcast_labels(tree, params, rng);
    auto obs = observe(tree, labels, &*sc.leaf, &*sc.survey, rng);
    auto post = exact_posterior(tree, obs, params);
    double mx = 0.0;
    for (double x : post) mx = std::max(mx, x);
    pe[t] = 1.0 - mx;
  }
  double mean = 0.0;
  for (double x : pe) mean += x;
  mean /= trials;
  CHECK(fast.pe.mean == doctest::Approx(mean).epsilon(1e-14));
}
