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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#if defined(_OPENMP)
#include <parallel/algorithm>
#endif

#include "potts/rng.hpp"

namespace potts {

namespace {

constexpr double kWeightFloor = 1e-14;
constexpr double kMergeTol = 1e-12;

uint64_t factorial(int n) {
  uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<uint64_t>(i);
  return f;
}

std::vector<int> all_permutations(int q) {
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> out;
  out.reserve(factorial(q) * q);
  do {
    out.insert(out.end(), perm.begin(), perm.end());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// descending sort of one point, insertion sort (q is tiny)
void sort_point_desc(double* p, int q) {
  for (int i = 1; i < q; ++i) {
    double x = p[i];
    int j = i - 1;
    while (j >= 0 && p[j] < x) {
      p[j + 1] = p[j];
      --j;
    }
    p[j + 1] = x;
  }
}

// Drops sub-floor weights, sorts atoms into canonical (lexicographically
// descending) order, merges points equal within kMergeTol per coordinate, and
// renormalizes the total mass to 1. Shared by every population-producing op.
Channel finalize_population(int q, const std::vector<double>& w_raw,
                            const std::vector<double>& pts_raw, int cap_field) {
  const size_t n = w_raw.size();
  struct Key {
    double first;  // leading coordinate resolves almost every comparison
    uint32_t idx;
  };
  std::vector<Key> keyed;
  keyed.reserve(n);
  for (size_t i = 0; i < n; ++i)
    if (w_raw[i] >= kWeightFloor)
      keyed.push_back({pts_raw[i * q], static_cast<uint32_t>(i)});

  auto cmp = [&](const Key& a, const Key& b) {
    if (a.first != b.first) return a.first > b.first;
    const double* pa = pts_raw.data() + static_cast<size_t>(a.idx) * q;
    const double* pb = pts_raw.data() + static_cast<size_t>(b.idx) * q;
    for (int k = 1; k < q; ++k) {
      if (pa[k] != pb[k]) return pa[k] > pb[k];
    }
    return a.idx < b.idx;
  };
  // the comparator is a total order, so any sort yields the same sequence
#if defined(_OPENMP)
  if (keyed.size() > (1u << 15))
    __gnu_parallel::sort(keyed.begin(), keyed.end(), cmp);
  else
    std::sort(keyed.begin(), keyed.end(), cmp);
#else
  std::sort(keyed.begin(), keyed.end(), cmp);
#endif

  std::vector<double> w_out;
  std::vector<double> pts_out;
  w_out.reserve(keyed.size());
  pts_out.reserve(keyed.size() * q);

  const double* rep = nullptr;
  for (const Key& key : keyed) {
    const uint32_t i = key.idx;
    const double* p = pts_raw.data() + static_cast<size_t>(i) * q;
    bool same = rep != nullptr;
    if (same) {
      for (int k = 0; k < q; ++k) {
        if (std::abs(p[k] - rep[k]) > kMergeTol) {
          same = false;
          break;
        }
      }
    }
    if (same) {
      w_out.back() += w_raw[i];
    } else {
      w_out.push_back(w_raw[i]);
      pts_out.insert(pts_out.end(), p, p + q);
      rep = pts_out.data() + pts_out.size() - q;
    }
  }

  double total = std::accumulate(w_out.begin(), w_out.end(), 0.0);
  if (total <= 0.0) throw std::runtime_error("population lost all mass");
  for (double& w : w_out) w /= total;
  return Channel(q, std::move(w_out), std::move(pts_out), cap_field);
}

// One (atom pair, permutation) product of the star expansion. Writes the
// normalized sorted point and returns its weight; shared by the parallel and
// the serial reference path so both produce identical bits.
inline double star_product(const double* pa, const double* pb, const int* perm,
                           int q, double wa, double wb, double inv_fact_q1,
                           double* out) {
  double denom = 0.0;
  for (int i = 0; i < q; ++i) {
    double t = pa[i] * pb[perm[i]];
    out[i] = t;
    denom += t;
  }
  if (denom <= 0.0) return 0.0;
  double inv = 1.0 / denom;
  for (int i = 0; i < q; ++i) out[i] *= inv;
  sort_point_desc(out, q);
  return wa * wb * denom * inv_fact_q1;
}

Channel star_impl(const Channel& p, const Channel& q, uint64_t budget, bool parallel) {
  if (p.q() != q.q()) throw std::invalid_argument("star: q mismatch");
  const int Q = p.q();
  const uint64_t fact = factorial(Q);
  const uint64_t na = p.atom_count(), nb = q.atom_count();
  if (na * nb > budget / fact)
    throw BudgetExceeded("star: expansion " + std::to_string(na * nb * fact) +
                         " exceeds budget " + std::to_string(budget));
  const std::vector<int> perms = all_permutations(Q);
  const double inv_fact_q1 = 1.0 / static_cast<double>(factorial(Q - 1));
  const size_t n_products = na * nb * fact;

  std::vector<double> w_raw(n_products, 0.0);
  std::vector<double> pts_raw(n_products * Q);

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int64_t ab = 0; ab < static_cast<int64_t>(na * nb); ++ab) {
      const int a = static_cast<int>(ab / nb), b = static_cast<int>(ab % nb);
      const double* pa = p.point(a).data();
      const double* pb = q.point(b).data();
      const double wa = p.weight(a), wb = q.weight(b);
      size_t slot = static_cast<size_t>(ab) * fact;
      for (uint64_t t = 0; t < fact; ++t, ++slot) {
        w_raw[slot] = star_product(pa, pb, perms.data() + t * Q, Q, wa, wb,
                                   inv_fact_q1, pts_raw.data() + slot * Q);
      }
    }
  } else {
    size_t slot = 0;
    for (uint64_t a = 0; a < na; ++a) {
      for (uint64_t b = 0; b < nb; ++b) {
        const double* pa = p.point(static_cast<int>(a)).data();
        const double* pb = q.point(static_cast<int>(b)).data();
        const double wa = p.weight(static_cast<int>(a));
        const double wb = q.weight(static_cast<int>(b));
        for (uint64_t t = 0; t < fact; ++t, ++slot) {
          w_raw[slot] = star_product(pa, pb, perms.data() + t * Q, Q, wa, wb,
                                     inv_fact_q1, pts_raw.data() + slot * Q);
        }
      }
    }
  }

  return finalize_population(Q, w_raw, pts_raw,
                             std::max(p.population_cap(), q.population_cap()));
}

}  // namespace

Channel::Channel(int q, std::vector<double> weights, std::vector<double> points,
                 int population_cap)
    : q_(q), population_cap_(population_cap), weights_(std::move(weights)),
      points_(std::move(points)) {
  if (q_ < 2) throw std::invalid_argument("Channel: q must be >= 2");
  if (points_.size() != weights_.size() * static_cast<size_t>(q_))
    throw std::invalid_argument("Channel: size mismatch");
  double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("Channel: weights must sum to 1");
  if (std::abs(total - 1.0) > 1e-12)
    for (double& w : weights_) w /= total;

  // keep the atom list in canonical order
  bool sorted = true;
  for (int a = 1; a < atom_count() && sorted; ++a) {
    auto prev = point(a - 1), cur = point(a);
    for (int k = 0; k < q_; ++k) {
      if (prev[k] != cur[k]) {
        sorted = prev[k] > cur[k];
        break;
      }
    }
  }
  if (!sorted) {
    std::vector<int> idx(atom_count());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      auto pa = point(a), pb = point(b);
      for (int k = 0; k < q_; ++k)
        if (pa[k] != pb[k]) return pa[k] > pb[k];
      return false;
    });
    std::vector<double> w2(weights_.size());
    std::vector<double> p2(points_.size());
    for (size_t i = 0; i < idx.size(); ++i) {
      w2[i] = weights_[idx[i]];
      std::copy_n(points_.begin() + static_cast<size_t>(idx[i]) * q_, q_,
                  p2.begin() + static_cast<size_t>(i) * q_);
    }
    weights_ = std::move(w2);
    points_ = std::move(p2);
  }
}

SimplexPoint Channel::atom(int a) const {
  auto pt = point(a);
  return canonicalize(std::vector<double>(pt.begin(), pt.end()));
}

ChannelSpec ChannelSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "identity") return identity();
  if (head == "trivial") return trivial();
  if (head == "potts") return potts(std::stod(tail));
  if (head == "erasure") return erasure(std::stod(tail));
  if (head == "fsc") {
    std::vector<double> pi;
    std::stringstream ss(tail);
    std::string tok;
    while (std::getline(ss, tok, ',')) pi.push_back(std::stod(tok));
    return fsc(std::move(pi));
  }
  throw std::invalid_argument("unknown channel spec: " + text);
}

std::string ChannelSpec::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kIdentity: return "identity";
    case Kind::kTrivial: return "trivial";
    case Kind::kPotts: os << "potts:" << param; return os.str();
    case Kind::kErasure: os << "erasure:" << param; return os.str();
    case Kind::kFsc:
      os << "fsc:";
      for (size_t i = 0; i < pi.size(); ++i) os << (i ? "," : "") << pi[i];
      return os.str();
  }
  return "?";
}

Channel make_channel(const ChannelSpec& spec, int q) {
  using Kind = ChannelSpec::Kind;
  switch (spec.kind) {
    case Kind::kIdentity:
      return Channel(q, {1.0}, SimplexPoint::delta(q).probs());
    case Kind::kTrivial:
      return Channel(q, {1.0}, SimplexPoint::uniform(q).probs());
    case Kind::kPotts: {
      PottsParams p(q, spec.param);  // validates the range
      return Channel(q, {1.0}, potts_push(SimplexPoint::delta(q), p).probs());
    }
    case Kind::kErasure: {
      double eps = spec.param;
      if (eps < 0.0 || eps > 1.0)
        throw std::invalid_argument("erasure: eps outside [0,1]");
      if (eps == 0.0) return make_channel(ChannelSpec::identity(), q);
      if (eps == 1.0) return make_channel(ChannelSpec::trivial(), q);
      std::vector<double> w = {1.0 - eps, eps};
      std::vector<double> pts = SimplexPoint::delta(q).probs();
      auto u = SimplexPoint::uniform(q).probs();
      pts.insert(pts.end(), u.begin(), u.end());
      return Channel(q, std::move(w), std::move(pts));
    }
    case Kind::kFsc: {
      if (static_cast<int>(spec.pi.size()) != q)
        throw std::invalid_argument("fsc: pi has wrong dimension");
      return Channel(q, {1.0}, canonicalize(spec.pi).probs());
    }
  }
  throw std::invalid_argument("make_channel: bad spec");
}

Channel merge_population(int q, const std::vector<double>& weights,
                         const std::vector<double>& points, int population_cap) {
  return finalize_population(q, weights, points, population_cap);
}

Channel compose_potts(const Channel& p, double lambda) {
  PottsParams params(p.q(), lambda);
  const int q = p.q();
  std::vector<double> pts(p.points());
  const double shift = (1.0 - lambda) / q;
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = lambda * pts[i] + shift;
  if (lambda < 0.0) {
    // affine map with negative slope reverses the within-atom order
    for (int a = 0; a < p.atom_count(); ++a)
      std::reverse(pts.begin() + static_cast<size_t>(a) * q,
                   pts.begin() + static_cast<size_t>(a + 1) * q);
  }
  return finalize_population(q, p.weights(), pts, p.population_cap());
}

Channel star(const Channel& p, const Channel& q, uint64_t budget) {
  return star_impl(p, q, budget, true);
}

Channel star_serial(const Channel& p, const Channel& q, uint64_t budget) {
  return star_impl(p, q, budget, false);
}

Channel star_fit(const Channel& p, const Channel& q, uint64_t budget, int cap,
                 uint64_t seed) {
  const uint64_t fact = factorial(p.q());
  Channel a = p, b = q;
  int round = 0;
  auto fits = [&](const Channel& x, const Channel& y) {
    return static_cast<uint64_t>(x.atom_count()) * y.atom_count() <= budget / fact;
  };
  while (!fits(a, b)) {
    Channel& big = a.atom_count() >= b.atom_count() ? a : b;
    const Channel& small = a.atom_count() >= b.atom_count() ? b : a;
    uint64_t root = std::max<uint64_t>(
        1, static_cast<uint64_t>(std::sqrt(static_cast<double>(budget / fact))));
    uint64_t target;
    if (static_cast<uint64_t>(small.atom_count()) <= root)
      target = std::max<uint64_t>(1, budget / fact / std::max(1, small.atom_count()));
    else
      target = root;
    big = resample(big, static_cast<int>(target), mix_seed(seed, 1000 + round));
    ++round;
  }
  Channel out = star(a, b, budget);
  if (out.atom_count() > cap) out = resample(out, cap, mix_seed(seed, 2000 + round));
  return out;
}

Channel star_power(const Channel& p, int b, int cap, uint64_t seed, uint64_t budget) {
  if (b < 0) throw std::invalid_argument("star_power: b must be >= 0");
  if (b == 0) return make_channel(ChannelSpec::identity(), p.q());
  Channel acc = p;
  for (int i = 2; i <= b; ++i) {
    acc = star_fit(acc, p, budget, cap, seed + static_cast<uint64_t>(i));
  }
  return acc;
}

BmsChannel restrict_binary(const Channel& p) {
  const int q = p.q();
  BmsChannel out;
  out.weights.reserve(static_cast<size_t>(p.atom_count()) * q * (q - 1) / 2);
  out.deltas.reserve(out.weights.capacity());
  const double inv = 1.0 / (q - 1);
  for (int a = 0; a < p.atom_count(); ++a) {
    auto pt = p.point(a);
    const double w = p.weight(a);
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) {
        double s = pt[i] + pt[j];
        double wt = w * s * inv;
        if (wt < kWeightFloor || s <= 0.0) continue;
        out.weights.push_back(wt);
        out.deltas.push_back(std::min(pt[i], pt[j]) / s);
      }
    }
  }
  // canonical order + merge, same conventions as Channel populations
  std::vector<uint32_t> idx(out.weights.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](uint32_t x, uint32_t y) {
    if (out.deltas[x] != out.deltas[y]) return out.deltas[x] < out.deltas[y];
    return x < y;
  });
  BmsChannel merged;
  double total = 0.0;
  for (uint32_t i : idx) {
    if (!merged.deltas.empty() &&
        std::abs(out.deltas[i] - merged.deltas.back()) <= kMergeTol) {
      merged.weights.back() += out.weights[i];
    } else {
      merged.deltas.push_back(out.deltas[i]);
      merged.weights.push_back(out.weights[i]);
    }
    total += out.weights[i];
  }
  for (double& w : merged.weights) w /= total;
  return merged;
}

Measures measures(const Channel& p) {
  Measures m;
  const int q = p.q();
  for (int a = 0; a < p.atom_count(); ++a) {
    auto pt = p.point(a);
    const double w = p.weight(a);
    m.pe += w * (1.0 - pt[0]);  // canonical order: pt[0] is the max
    // log q - H(pi) written as sum pi log(q pi): cancels exactly at uniform
    double cap = 0.0;
    for (double x : pt)
      if (x > 0.0) cap += x * std::log(q * x);
    m.capacity += w * cap;
    m.chi2 += w * chi2_of_point(pt);
    m.skl += w * skl_of_point(pt, &m.skl_saturated);
  }
  m.capacity = std::max(m.capacity, 0.0);
  return m;
}

double bhattacharyya(const BmsChannel& b) {
  double z = 0.0;
  for (size_t i = 0; i < b.weights.size(); ++i)
    z += b.weights[i] * 2.0 * std::sqrt(b.deltas[i] * (1.0 - b.deltas[i]));
  return z;
}

double bms_chi2(const BmsChannel& b) {
  double c = 0.0;
  for (size_t i = 0; i < b.weights.size(); ++i) {
    double t = 1.0 - 2.0 * b.deltas[i];
    c += b.weights[i] * t * t;
  }
  return c;
}

Channel resample(const Channel& p, int cap, uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("resample: cap must be >= 1");
  if (p.atom_count() <= cap) {
    Channel out = p;
    out.set_population_cap(cap);
    return out;
  }
  Rng rng(mix_seed(seed, 0x5e5a));
  const double offset = rng.next_unit();
  const int n = p.atom_count();
  std::vector<double> w_out;
  std::vector<double> pts_out;
  w_out.reserve(cap);
  pts_out.reserve(static_cast<size_t>(cap) * p.q());
  double cum = 0.0;
  int j = 0;  // next stratified position index
  const double inv_cap = 1.0 / cap;
  for (int a = 0; a < n && j < cap; ++a) {
    cum += p.weight(a);
    int copies = 0;
    while (j < cap && (static_cast<double>(j) + offset) * inv_cap < cum) {
      ++copies;
      ++j;
    }
    if (copies > 0) {
      w_out.push_back(copies * inv_cap);
      auto pt = p.point(a);
      pts_out.insert(pts_out.end(), pt.begin(), pt.end());
    }
  }
  // guard against the total falling a hair short of the last position
  if (j < cap && !w_out.empty()) w_out.back() += (cap - j) * inv_cap;
  return Channel(p.q(), std::move(w_out), std::move(pts_out), cap);
}

bool degrades_necessary(const Channel& p, const Channel& q) {
  if (p.q() != q.q()) throw std::invalid_argument("degrades_necessary: q mismatch");
  constexpr double kSlack = 1e-9;
  Measures mp = measures(p), mq = measures(q);
  if (mp.pe < mq.pe - kSlack) return false;
  if (mp.capacity > mq.capacity + kSlack) return false;
  if (mp.chi2 > mq.chi2 + kSlack) return false;
  if (mp.skl_saturated && !mq.skl_saturated) return false;
  if (!mp.skl_saturated && !mq.skl_saturated && mp.skl > mq.skl + kSlack) return false;
  if (bhattacharyya(restrict_binary(p)) < bhattacharyya(restrict_binary(q)) - kSlack)
    return false;
  return true;
}

std::string to_string(DegradationVerdict v) {
  switch (v) {
    case DegradationVerdict::kYes: return "yes";
    case DegradationVerdict::kNo: return "no";
    case DegradationVerdict::kBudgetExceeded: return "budget_exceeded";
  }
  return "?";
}

}  // namespace potts
