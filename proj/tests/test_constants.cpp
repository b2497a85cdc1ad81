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

#include "potts/constants.hpp"

#include <cmath>

#include "doctest.h"
#include "potts/rng.hpp"

using namespace potts;

namespace {
std::vector<double> random_interior(int q, Rng& rng) {
  std::vector<double> pi(q);
  double s = 0.0;
  for (double& x : pi) {
    x = rng.next_unit() + 0.02;
    s += x;
  }
  for (double& x : pi) x /= s;
  return pi;
}

std::vector<double> random_centered(int q, Rng& rng) {
  std::vector<double> v(q);
  double mean = 0.0;
  for (double& x : v) {
    x = rng.next_gaussian();
    mean += x / q;
  }
  for (double& x : v) x -= mean;
  return v;
}
}  // namespace

TEST_CASE("f_low on reference points") {
  // uniform pi: every coefficient is q + q = 2q
  std::vector<double> u2 = {0.5, 0.5};
  std::vector<double> v = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
  CHECK(f_low(u2, v) == doctest::Approx(4.0));
  CHECK(f_low(u2, {0.0, 0.0}) == doctest::Approx(0.0));

  for (int q : {3, 5}) {
    std::vector<double> u(q, 1.0 / q);
    Rng rng(3);
    auto w = random_centered(q, rng);
    double norm2 = 0.0;
    for (double x : w) norm2 += x * x;
    CHECK(f_low(u, w) == doctest::Approx(2.0 * q * norm2).epsilon(1e-10));
  }
}

TEST_CASE("f_high on reference points") {
  std::vector<double> u2 = {0.5, 0.5};
  CHECK(f_high(u2, {0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(f_high(u2, {1.0, -1.0}) == doctest::Approx(8.0));

  // q^2 ||v||^2 at the uniform point
  for (int q : {3, 4}) {
    std::vector<double> u(q, 1.0 / q);
    Rng rng(5);
    auto w = random_centered(q, rng);
    double norm2 = 0.0;
    for (double x : w) norm2 += x * x;
    CHECK(f_high(u, w) == doctest::Approx(q * q * norm2).epsilon(1e-10));
  }

  // nonnegative everywhere (Cauchy-Schwarz)
  Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    int q = 2 + static_cast<int>(rng.next_below(4));
    CHECK(f_high(random_interior(q, rng), random_centered(q, rng)) >= -1e-9);
  }
}

TEST_CASE("sup_over_v closed cases") {
  Rng rng(11);
  for (int q : {2, 3, 5}) {
    auto pi = random_interior(q, rng);
    CHECK(sup_over_v(pi, 1.0, FormKind::kLow) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sup_over_v(pi, 1.0, FormKind::kHigh) == doctest::Approx(1.0).epsilon(1e-10));
  }
  std::vector<double> u3(3, 1.0 / 3.0);
  CHECK(sup_over_v(u3, 0.0, FormKind::kLow) == doctest::Approx(1.0).epsilon(1e-9));

  // q = 2 leaves one direction; the ratio is computable by hand
  std::vector<double> pi = {0.8, 0.2};
  double num = (1.0 / 0.5 + 1.0 / (2 * 0.25)) * 2.0;  // f_low(uniform, (1,-1))
  double den = (1.0 / 0.8 + 1.0 / (2 * 0.64)) + (1.0 / 0.2 + 1.0 / (2 * 0.04));
  CHECK(sup_over_v(pi, 0.0, FormKind::kLow) == doctest::Approx(num / den).epsilon(1e-10));
  CHECK(num / den == doctest::Approx(0.4096).epsilon(1e-12));
}

TEST_CASE("sup_over_v is invariant under coordinate permutation") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    int q = 3 + static_cast<int>(rng.next_below(2));
    auto pi = random_interior(q, rng);
    auto rotated = pi;
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    for (auto kind : {FormKind::kLow, FormKind::kHigh}) {
      CHECK(sup_over_v(pi, 0.35, kind) ==
            doctest::Approx(sup_over_v(rotated, 0.35, kind)).epsilon(1e-8));
    }
  }
}

TEST_CASE("constants at lambda = 1 and basic bounds") {
  for (int q : {2, 3, 4}) {
    auto cl = c_low(q, 1.0);
    auto ch = c_high(q, 1.0);
    CHECK(cl.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ch.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cl.cap == doctest::Approx(q * q));
    CHECK(ch.cap == doctest::Approx(std::pow(q, 2.5)));
  }
  for (double lambda : {-0.3, 0.0, 0.6}) {
    auto cl = c_low(3, lambda);
    auto ch = c_high(3, lambda);
    CHECK(cl.value >= 1.0 - 1e-9);  // the uniform seed already attains 1
    CHECK(ch.value >= 1.0 - 1e-9);
    CHECK(cl.value <= cl.cap + 1e-6);
    CHECK(ch.value <= ch.cap + 1e-6);
  }
}

TEST_CASE("c_small closed form") {
  CHECK(c_small(2, 0.3, 5.0) == doctest::Approx(1.0));
  CHECK(c_small(2, -0.9, 30.0) == doctest::Approx(1.0));
  double want = 1.0 / (0.5 + 0.5 * (4 * 0.36 - 1.0) / (4 * 0.6 - 1.0));
  CHECK(c_small(4, 0.6, 4.0) == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS(c_small(3, 0.5, 2.0));  // pole at d lambda = 1

  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    int q = 3 + static_cast<int>(rng.next_below(3));
    double lambda = -1.0 / (q - 1) + (1.0 + 1.0 / (q - 1)) * rng.next_unit();
    if (std::abs(lambda) < 1e-3) continue;
    double d = (1.0 + 3.0 * rng.next_unit()) / (lambda * lambda);
    if (d * lambda * lambda <= 1.0 || std::abs(d * lambda - 1.0) < 1e-6) continue;
    CHECK(c_small(q, lambda, d) >= 1.0 - 1e-9);
  }
}

TEST_CASE("classify reference points") {
  auto at = classify(3, 0.5, 4.0);  // d lambda^2 = 1 exactly
  CHECK(at.ks_side == KsSide::kAt);
  CHECK_FALSE(at.low_ok_cert);
  CHECK_FALSE(at.high_ok_cert);

  auto low = classify(3, 0.1, 5.0);  // d lambda^2 = 0.05 < 1/9
  CHECK(low.ks_side == KsSide::kBelow);
  CHECK(low.closed_form_low);
  CHECK(low.low_ok_cert);
  CHECK(low.low_ok_emp);

  auto high = classify(3, 0.9, 80.0);  // d lambda^2 = 64.8 > 1 + 56*0.9*log 3
  CHECK(high.ks_side == KsSide::kAbove);
  CHECK(high.closed_form_high);
  CHECK(high.high_ok_cert);
  CHECK(high.high_ok_emp);

  // the closed-form clause is the cap-based low condition verbatim
  CHECK(low.closed_form_low == low.low_ok_cert);

  // survey variant carries the extra Bhattacharyya factor
  auto w = make_channel(ChannelSpec::erasure(0.5), 3);
  auto withw = classify(3, 0.9, 80.0, w);
  REQUIRE(withw.w_high_ok_cert.has_value());
  CHECK(*withw.w_high_ok_cert);
}

TEST_CASE("quad ratio bound never exceeds q^alpha") {
  for (int q : {2, 3}) {
    for (double alpha : {1.0, 1.5}) {
      for (double lambda : {-1.0 / (q - 1), 0.0, 0.5, 1.0}) {
        double m = quad_ratio_bound_check(q, alpha, lambda, 20000, 5);
        CHECK(m <= std::pow(q, alpha) + 1e-6);
        if (lambda == 1.0) CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("phase_scan rows match classify") {
  auto rows = phase_scan(3, {0.1}, {5.0});
  REQUIRE(rows.size() == 1);
  auto ref = classify(3, 0.1, 5.0);
  CHECK(rows[0].low_ok_cert == ref.low_ok_cert);
  CHECK(rows[0].c_low_emp == doctest::Approx(ref.c_low_emp).epsilon(1e-9));

  auto grid = phase_scan(3, {0.2, 0.8}, {2.0, 10.0, 40.0});
  CHECK(grid.size() == 6);
  CHECK(grid[0].lambda == doctest::Approx(0.2));
  CHECK(grid[5].d == doctest::Approx(40.0));
  CHECK_THROWS(phase_scan(3, {}, {1.0}));
}

TEST_CASE("high-SNR certified region is upward-closed in d past the monotone point") {
  const int q = 3;
  const double lambda = 0.8;
  auto rows = phase_scan(q, {lambda}, {10, 20, 30, 45, 60, 80});
  bool seen_ok = false;
  for (const auto& v : rows) {
    double dl2 = v.d * lambda * lambda;
    if (dl2 <= 8.0 * std::max(lambda, 1.0 / q)) continue;
    if (seen_ok) CHECK(v.high_ok_cert);
    if (v.high_ok_cert) seen_ok = true;
  }
  CHECK(seen_ok);
}

TEST_CASE("inverse coefficient gap is convex in the antiferromagnetic range") {
  // f(x) = ((x/q)^-a - (lx + (1-l)/q)^-a)^-1 on (0, (1-l)/(1-lq)), checked
  // by second differences
  for (int q : {2, 3, 5}) {
    for (double alpha : {1.0, 1.5, 3.0}) {
      for (double lambda : {-1.0 / (q - 1), -0.5 / (q - 1), -0.1}) {
        double hi = (1.0 - lambda) / (1.0 - lambda * q);
        auto f = [&](double x) {
          double a = std::pow(x / q, -alpha);
          double b = std::pow(lambda * x + (1.0 - lambda) / q, -alpha);
          return 1.0 / (a - b);
        };
        const int grid = 60;
        for (int i = 1; i + 1 < grid; ++i) {
          double x = hi * i / grid, h = hi / grid;
          double second = f(x - h) - 2.0 * f(x) + f(x + h);
          CHECK(second >= -1e-12);
        }
      }
    }
  }
}
