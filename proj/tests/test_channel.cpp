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

#include "potts/channel.hpp"

#include <cmath>

#include <cstdio>

#include "doctest.h"
#include "potts/io.hpp"
#include "potts/rng.hpp"

using namespace potts;

namespace {

std::vector<double> random_simplex(int q, Rng& rng, double mix_uniform = 0.0) {
  std::vector<double> v(q);
  double s = 0.0;
  for (double& x : v) {
    x = -std::log(rng.next_unit() + 1e-300);
    s += x;
  }
  for (double& x : v) x = (1.0 - mix_uniform) * x / s + mix_uniform / q;
  return v;
}

Channel random_channel(int q, int atoms, Rng& rng, double mix_uniform = 0.0) {
  std::vector<double> w(atoms), pts;
  double s = 0.0;
  for (double& x : w) {
    x = rng.next_unit() + 1e-3;
    s += x;
  }
  for (double& x : w) x /= s;
  for (int a = 0; a < atoms; ++a) {
    auto p = canonicalize(random_simplex(q, rng, mix_uniform)).probs();
    pts.insert(pts.end(), p.begin(), p.end());
  }
  return Channel(q, std::move(w), std::move(pts));
}

double phi_high(std::span<const double> pi) {
  double s = 0.0;
  for (double x : pi) s += std::sqrt(x);
  return (s * s - 1.0) / (pi.size() - 1);
}

}  // namespace

TEST_CASE("make_channel atoms") {
  auto id = make_channel(ChannelSpec::identity(), 3);
  CHECK(id.atom_count() == 1);
  CHECK(id.point(0)[0] == 1.0);
  CHECK(id.point(0)[1] == 0.0);

  auto ec = make_channel(ChannelSpec::erasure(0.25), 2);
  CHECK(ec.atom_count() == 2);
  // canonical order puts the delta atom first
  CHECK(ec.point(0)[0] == doctest::Approx(1.0));
  CHECK(ec.weight(0) == doctest::Approx(0.75));
  CHECK(ec.point(1)[0] == doctest::Approx(0.5));
  CHECK(ec.weight(1) == doctest::Approx(0.25));

  auto po = make_channel(ChannelSpec::potts(0.6), 2);
  CHECK(po.atom_count() == 1);
  CHECK(po.point(0)[0] == doctest::Approx(0.8));
  CHECK(po.point(0)[1] == doctest::Approx(0.2));

  CHECK_THROWS(make_channel(ChannelSpec::erasure(1.5), 2));
  CHECK_THROWS(make_channel(ChannelSpec::potts(-0.9), 3));
}

TEST_CASE("channel spec round trip") {
  for (const char* s : {"identity", "trivial", "potts:0.6", "erasure:0.25", "fsc:0.7,0.2,0.1"}) {
    auto spec = ChannelSpec::parse(s);
    auto spec2 = ChannelSpec::parse(spec.to_string());
    CHECK(spec.kind == spec2.kind);
    CHECK(spec.param == doctest::Approx(spec2.param));
  }
  CHECK_THROWS(ChannelSpec::parse("bogus:1"));
}

TEST_CASE("compose_potts maps atoms") {
  auto id = make_channel(ChannelSpec::identity(), 3);
  auto t = compose_potts(id, 0.0);
  CHECK(t.atom_count() == 1);
  CHECK(t.point(0)[0] == doctest::Approx(1.0 / 3));

  auto c = compose_potts(make_channel(ChannelSpec::identity(), 2), 0.5);
  auto ref = make_channel(ChannelSpec::potts(0.5), 2);
  CHECK(c.point(0)[0] == doctest::Approx(ref.point(0)[0]));

  Rng rng(5);
  for (double lam : {-0.4, 0.0, 0.9}) {
    auto tr = compose_potts(make_channel(ChannelSpec::trivial(), 3), lam);
    CHECK(tr.atom_count() == 1);
    CHECK(tr.point(0)[0] == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("star of two fsc atoms, hand-expanded") {
  auto f = make_channel(ChannelSpec::fsc({0.8, 0.2}), 2);
  auto s = star(f, f);
  REQUIRE(s.atom_count() == 2);
  // identity permutation: weight 0.64+0.04 = 0.68, point (16/17, 1/17)
  CHECK(s.weight(0) == doctest::Approx(0.68));
  CHECK(s.point(0)[0] == doctest::Approx(16.0 / 17.0));
  CHECK(s.point(0)[1] == doctest::Approx(1.0 / 17.0));
  // swap: weight 0.32, uniform point
  CHECK(s.weight(1) == doctest::Approx(0.32));
  CHECK(s.point(1)[0] == doctest::Approx(0.5));
}

TEST_CASE("star identities") {
  Rng rng(11);
  for (int q : {2, 3, 4}) {
    auto id = make_channel(ChannelSpec::identity(), q);
    auto tr = make_channel(ChannelSpec::trivial(), q);
    auto p = random_channel(q, 5, rng);

    auto idid = star(id, id);
    CHECK(idid.atom_count() == 1);
    CHECK(idid.point(0)[0] == doctest::Approx(1.0));

    // trivial is a star identity atom-for-atom
    auto tp = star(tr, p);
    REQUIRE(tp.atom_count() == p.atom_count());
    for (int a = 0; a < p.atom_count(); ++a) {
      CHECK(tp.weight(a) == doctest::Approx(p.weight(a)));
      for (int i = 0; i < q; ++i) CHECK(tp.point(a)[i] == doctest::Approx(p.point(a)[i]));
    }

    // star with the identity yields a perfect channel
    auto ip = star(id, p);
    auto m = measures(ip);
    CHECK(m.pe == doctest::Approx(0.0));
    CHECK(m.chi2 == doctest::Approx(q - 1.0));
  }
}

TEST_CASE("star is commutative and preserves mass") {
  Rng rng(21);
  for (int q : {2, 3}) {
    auto p = random_channel(q, 4, rng);
    auto r = random_channel(q, 3, rng);
    auto a = star(p, r);
    auto b = star(r, p);
    REQUIRE(a.atom_count() == b.atom_count());
    double wa = 0.0;
    for (int i = 0; i < a.atom_count(); ++i) {
      wa += a.weight(i);
      CHECK(a.weight(i) == doctest::Approx(b.weight(i)));
      for (int k = 0; k < q; ++k) CHECK(a.point(i)[k] == doctest::Approx(b.point(i)[k]));
    }
    CHECK(wa == doctest::Approx(1.0));
  }
}

TEST_CASE("star parallel kernel matches the serial reference bit for bit") {
  Rng rng(31);
  for (int q : {2, 3, 5}) {
    auto p = random_channel(q, 20, rng);
    auto r = random_channel(q, 17, rng);
    auto a = star(p, r);
    auto b = star_serial(p, r);
    REQUIRE(a.atom_count() == b.atom_count());
    CHECK(a.weights() == b.weights());
    CHECK(a.points() == b.points());
  }
}

TEST_CASE("star budget is enforced") {
  Rng rng(41);
  auto p = random_channel(3, 30, rng);
  CHECK_THROWS_AS(star(p, p, 100), BudgetExceeded);
  auto fitted = star_fit(p, p, 600, 1 << 20, 7);
  CHECK(fitted.atom_count() > 0);
}

TEST_CASE("star_power basics") {
  auto p = make_channel(ChannelSpec::potts(0.7), 3);
  auto p0 = star_power(p, 0, 1000, 1);
  CHECK(measures(p0).pe == doctest::Approx(0.0));
  auto p1 = star_power(p, 1, 1000, 1);
  CHECK(p1.atom_count() == 1);
  CHECK(p1.point(0)[0] == doctest::Approx(p.point(0)[0]));
  auto tr = make_channel(ChannelSpec::trivial(), 4);
  auto trb = star_power(tr, 5, 1000, 1);
  CHECK(trb.atom_count() == 1);
  CHECK(measures(trb).chi2 == doctest::Approx(0.0));
}

TEST_CASE("restrict_binary endpoints") {
  auto idr = restrict_binary(make_channel(ChannelSpec::identity(), 4));
  REQUIRE(idr.deltas.size() == 1);
  CHECK(idr.deltas[0] == doctest::Approx(0.0));
  CHECK(idr.weights[0] == doctest::Approx(1.0));

  auto trr = restrict_binary(make_channel(ChannelSpec::trivial(), 4));
  REQUIRE(trr.deltas.size() == 1);
  CHECK(trr.deltas[0] == doctest::Approx(0.5));
}

TEST_CASE("restrict_binary matches the Bhattacharyya closed form") {
  // Z(fsc(pi)^R) = ((sum sqrt(pi))^2 - 1)/(q-1), checked against the
  // pair expansion, including the spec's 3-point example.
  auto f = make_channel(ChannelSpec::fsc({0.8, 0.1, 0.1}), 3);
  double z = bhattacharyya(restrict_binary(f));
  double s = std::sqrt(0.8) + 2 * std::sqrt(0.1);
  CHECK(z == doctest::Approx((s * s - 1.0) / 2.0).epsilon(1e-12));

  Rng rng(55);
  for (int q = 2; q <= 6; ++q) {
    for (int rep = 0; rep < 100; ++rep) {
      auto pi = canonicalize(random_simplex(q, rng));
      auto ch = make_channel(ChannelSpec::fsc(pi.probs()), q);
      double got = bhattacharyya(restrict_binary(ch));
      CHECK(got == doctest::Approx(phi_high(pi.probs())).epsilon(1e-11));
    }
  }
}

TEST_CASE("measures on reference channels") {
  auto mid = measures(make_channel(ChannelSpec::identity(), 3));
  CHECK(mid.pe == doctest::Approx(0.0));
  CHECK(mid.capacity == doctest::Approx(std::log(3.0)));
  CHECK(mid.chi2 == doctest::Approx(2.0));
  CHECK(mid.skl_saturated);

  for (int q : {2, 4}) {
    auto mtr = measures(make_channel(ChannelSpec::trivial(), q));
    CHECK(mtr.pe == doctest::Approx(1.0 - 1.0 / q));
    CHECK(mtr.capacity == doctest::Approx(0.0));
    CHECK(mtr.chi2 == doctest::Approx(0.0));
    CHECK(mtr.skl == doctest::Approx(0.0));
    CHECK_FALSE(mtr.skl_saturated);
  }
}

TEST_CASE("chi2 of a Potts channel is (q-1) lambda^2") {
  // q sum(pi^2) - 1 at pi = lambda e1 + (1-lambda)/q expands to (q-1) lambda^2;
  // for q = 2 this is the familiar lambda^2.
  for (int q : {2, 3, 5}) {
    for (double lam : {-0.3, 0.3, 0.9}) {
      if (lam < -1.0 / (q - 1)) continue;
      auto m = measures(make_channel(ChannelSpec::potts(lam), q));
      CHECK(m.chi2 == doctest::Approx((q - 1.0) * lam * lam).epsilon(1e-12));
    }
  }
}

TEST_CASE("bhattacharyya examples") {
  BmsChannel b;
  b.weights = {1.0};
  b.deltas = {0.0};
  CHECK(bhattacharyya(b) == doctest::Approx(0.0));
  b.deltas = {0.5};
  CHECK(bhattacharyya(b) == doctest::Approx(1.0));
  b.deltas = {0.1};
  CHECK(bhattacharyya(b) == doctest::Approx(0.6));
}

TEST_CASE("resample keeps small populations and stays unbiased") {
  Rng rng(77);
  auto p = random_channel(3, 10, rng);
  auto same = resample(p, 100, 3);
  CHECK(same.atom_count() == p.atom_count());
  CHECK(same.weights() == p.weights());

  // one atom repeated collapses to itself
  auto one = make_channel(ChannelSpec::fsc({0.6, 0.4}), 2);
  auto r1 = resample(one, 1, 9);
  CHECK(r1.atom_count() == 1);
  CHECK(r1.point(0)[0] == doctest::Approx(0.6));

  // Monte Carlo unbiasedness: mean chi2 over seeds within 3 empirical
  // standard errors of the exact value
  auto big = random_channel(4, 10000, rng);
  double exact = measures(big).chi2;
  const int reps = 200;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < reps; ++s) {
    double v = measures(resample(big, 1000, 1000 + s)).chi2;
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / reps;
  double var = (sum2 - reps * mean * mean) / (reps - 1);
  double se = std::sqrt(std::max(var, 1e-30) / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
}

TEST_CASE("degradation necessary conditions") {
  auto id = make_channel(ChannelSpec::identity(), 3);
  auto tr = make_channel(ChannelSpec::trivial(), 3);
  CHECK(degrades_necessary(tr, id));
  CHECK_FALSE(degrades_necessary(id, tr));
  CHECK(degrades_necessary(make_channel(ChannelSpec::potts(0.3), 3),
                           make_channel(ChannelSpec::potts(0.6), 3)));
}

TEST_CASE("degrades_exact on small instances") {
  Rng rng(101);
  for (int q : {2, 3}) {
    auto p = random_channel(q, 6, rng);
    CHECK(degrades_exact(p, p) == DegradationVerdict::kYes);
    auto tr = make_channel(ChannelSpec::trivial(), q);
    CHECK(degrades_exact(tr, p) == DegradationVerdict::kYes);
  }
  auto a = make_channel(ChannelSpec::fsc({0.9, 0.1}), 2);
  auto b = make_channel(ChannelSpec::fsc({0.8, 0.2}), 2);
  CHECK(degrades_exact(a, b) == DegradationVerdict::kNo);
  CHECK(degrades_exact(b, a) == DegradationVerdict::kYes);

  Rng rng2(202);
  auto big1 = random_channel(2, 25, rng2);
  auto big2 = random_channel(2, 25, rng2);
  CHECK(degrades_exact(big1, big2) == DegradationVerdict::kBudgetExceeded);
}

TEST_CASE("degraded constructions are certified and pass the necessary checks") {
  Rng rng(707);
  for (int rep = 0; rep < 20; ++rep) {
    int q = 2 + static_cast<int>(rng.next_below(3));
    auto quality = random_channel(q, 4, rng);
    // potts composition only ever degrades a channel
    auto degraded = compose_potts(quality, 0.2 + 0.6 * rng.next_unit());
    CHECK(degrades_exact(degraded, quality) == DegradationVerdict::kYes);
    CHECK(degrades_necessary(degraded, quality));
  }
}

TEST_CASE("SKL additivity and Z multiplicativity under star") {
  Rng rng(303);
  for (int q : {2, 3, 4}) {
    for (int rep = 0; rep < 50; ++rep) {
      auto pi = canonicalize(random_simplex(q, rng, 1e-3));
      auto pj = canonicalize(random_simplex(q, rng, 1e-3));
      auto a = make_channel(ChannelSpec::fsc(pi.probs()), q);
      auto b = make_channel(ChannelSpec::fsc(pj.probs()), q);
      auto s = star(a, b);
      auto ms = measures(s);
      CHECK(ms.skl ==
            doctest::Approx(measures(a).skl + measures(b).skl).epsilon(1e-10));
      double zs = bhattacharyya(restrict_binary(s));
      double za = bhattacharyya(restrict_binary(a));
      double zb = bhattacharyya(restrict_binary(b));
      CHECK(zs == doctest::Approx(za * zb).epsilon(1e-10));
    }
  }
}

TEST_CASE("Z is bounded by sqrt(1 - chi2) for BMS populations") {
  Rng rng(404);
  for (int rep = 0; rep < 500; ++rep) {
    int n = 1 + static_cast<int>(rng.next_below(8));
    BmsChannel b;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      b.weights.push_back(rng.next_unit() + 1e-3);
      b.deltas.push_back(0.5 * rng.next_unit());
      s += b.weights.back();
    }
    for (double& w : b.weights) w /= s;
    CHECK(bhattacharyya(b) <= std::sqrt(1.0 - bms_chi2(b)) + 1e-10);
  }
}

TEST_CASE("data processing: exact degradation implies all necessary inequalities") {
  Rng rng(505);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    int q = 2 + static_cast<int>(rng.next_below(2));
    auto strong = random_channel(q, 3, rng);
    auto weak = compose_potts(strong, 0.1 + 0.8 * rng.next_unit());
    if (degrades_exact(weak, strong) == DegradationVerdict::kYes) {
      CHECK(degrades_necessary(weak, strong));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("channel JSON round trip") {
  Rng rng(606);
  auto p = random_channel(3, 7, rng);
  save_channel("test_channel_tmp.json", p);
  auto q = load_channel("test_channel_tmp.json");
  REQUIRE(q.atom_count() == p.atom_count());
  for (int a = 0; a < p.atom_count(); ++a) {
    CHECK(q.weight(a) == doctest::Approx(p.weight(a)).epsilon(1e-15));
    for (int i = 0; i < 3; ++i)
      CHECK(q.point(a)[i] == doctest::Approx(p.point(a)[i]).epsilon(1e-15));
  }
  std::remove("test_channel_tmp.json");
  CHECK_THROWS(load_channel("no_such_file.json"));
}

TEST_CASE("star is associative up to merging tolerance") {
  Rng rng(808);
  for (int q : {2, 3}) {
    auto a = random_channel(q, 3, rng);
    auto b = random_channel(q, 3, rng);
    auto c = random_channel(q, 2, rng);
    auto left = star(star(a, b), c);
    auto right = star(a, star(b, c));
    auto ml = measures(left);
    auto mr = measures(right);
    CHECK(ml.pe == doctest::Approx(mr.pe).epsilon(1e-10));
    CHECK(ml.chi2 == doctest::Approx(mr.chi2).epsilon(1e-10));
    CHECK(ml.skl == doctest::Approx(mr.skl).epsilon(1e-9));
    CHECK(bhattacharyya(restrict_binary(left)) ==
          doctest::Approx(bhattacharyya(restrict_binary(right))).epsilon(1e-10));
  }
}
