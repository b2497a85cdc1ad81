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

#include "potts/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace potts {

namespace {
constexpr double kNegativeReject = -1e-9;
constexpr double kSumReject = 1e-6;
constexpr double kMajorizeTol = 1e-10;
}  // namespace

PottsParams::PottsParams(int q_, double lambda_) : q(q_), lambda(lambda_) {
  if (q < 2) throw std::invalid_argument("PottsParams: q must be >= 2");
  double lo = -1.0 / (q - 1);
  if (lambda < lo - 1e-12 || lambda > 1.0 + 1e-12)
    throw std::invalid_argument("PottsParams: lambda outside [-1/(q-1), 1]");
  lambda = std::clamp(lambda, lo, 1.0);
}

SimplexPoint SimplexPoint::uniform(int q) {
  return canonicalize(std::vector<double>(q, 1.0 / q));
}

SimplexPoint SimplexPoint::delta(int q) {
  std::vector<double> v(q, 0.0);
  v[0] = 1.0;
  return canonicalize(std::move(v));
}

SimplexPoint canonicalize(std::vector<double> v) {
  if (v.size() < 2) throw std::invalid_argument("canonicalize: need q >= 2");
  double sum = 0.0;
  for (double& x : v) {
    if (x < kNegativeReject) throw std::invalid_argument("canonicalize: negative entry");
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumReject)
    throw std::invalid_argument("canonicalize: sum deviates from 1");
  std::stable_sort(v.begin(), v.end(), std::greater<double>());
  // renormalize only when actually off; keeps canonicalize exactly idempotent
  if (std::abs(sum - 1.0) > 1e-12)
    for (double& x : v) x /= sum;
  SimplexPoint p;
  p.probs_ = std::move(v);
  return p;
}

bool majorizes(const SimplexPoint& a, const SimplexPoint& b) {
  if (a.q() != b.q()) throw std::invalid_argument("majorizes: dimension mismatch");
  double pa = 0.0, pb = 0.0;
  for (int k = 0; k < a.q() - 1; ++k) {
    pa += a[k];
    pb += b[k];
    if (pb > pa + kMajorizeTol) return false;
  }
  return true;
}

SimplexPoint potts_push(const SimplexPoint& pi, const PottsParams& p) {
  if (pi.q() != p.q) throw std::invalid_argument("potts_push: q mismatch");
  std::vector<double> v(pi.probs());
  double shift = (1.0 - p.lambda) / p.q;
  for (double& x : v) x = p.lambda * x + shift;
  return canonicalize(std::move(v));
}

std::vector<double> potts_matrix(const PottsParams& p) {
  std::vector<double> m(static_cast<size_t>(p.q) * p.q, (1.0 - p.lambda) / p.q);
  for (int i = 0; i < p.q; ++i) m[static_cast<size_t>(i) * p.q + i] += p.lambda;
  return m;
}

double entropy_nats(std::span<const double> probs) {
  double h = 0.0;
  for (double x : probs)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

double chi2_of_point(std::span<const double> probs) {
  double s = 0.0;
  for (double x : probs) s += x * x;
  return static_cast<double>(probs.size()) * s - 1.0;
}

double skl_of_point(std::span<const double> probs, bool* saturated) {
  const double inv_q = 1.0 / static_cast<double>(probs.size());
  double s = 0.0;
  for (double x : probs) {
    if (x <= 0.0 && saturated) *saturated = true;
    s += (x - inv_q) * std::log(std::max(x, 1e-300));
  }
  return s;
}

}  // namespace potts
