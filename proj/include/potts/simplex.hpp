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

#include <span>
#include <stdexcept>
#include <vector>

namespace potts {

// Canonical point of the probability simplex over [q]: entries sorted
// non-increasing, summing to 1. Canonical representatives quotient out the
// color symmetry, so two posterior vectors that differ by a relabeling map to
// the same SimplexPoint.
class SimplexPoint {
 public:
  SimplexPoint() = default;

  int q() const { return static_cast<int>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](int i) const { return probs_[i]; }

  bool operator==(const SimplexPoint& other) const { return probs_ == other.probs_; }

  static SimplexPoint uniform(int q);
  static SimplexPoint delta(int q);  // (1, 0, ..., 0)

  // Only canonicalize() constructs nontrivial points; keeps the invariant in
  // one place.
  friend SimplexPoint canonicalize(std::vector<double> v);

 private:
  std::vector<double> probs_;
};

struct PottsParams {
  int q = 2;
  double lambda = 0.0;

  PottsParams(int q_, double lambda_);
};

// Sorts non-increasing and renormalizes. Rejects entries below -1e-9 or a sum
// off by more than 1e-6; entries in [-1e-12, 0) are clamped to 0.
SimplexPoint canonicalize(std::vector<double> v);

// Prefix-sum dominance of canonical vectors (tolerance 1e-10 per prefix).
bool majorizes(const SimplexPoint& a, const SimplexPoint& b);

// Pushforward of the Potts composition on posterior points:
// pi -> lambda*pi + (1-lambda)/q, re-canonicalized (lambda < 0 reverses order).
SimplexPoint potts_push(const SimplexPoint& pi, const PottsParams& p);

// Row-major q x q matrix M[i][j] = lambda*1{i=j} + (1-lambda)/q.
std::vector<double> potts_matrix(const PottsParams& p);

// Helpers on raw canonical coordinate spans (used by the population code,
// which stores atoms in flat arrays).
double entropy_nats(std::span<const double> probs);
double chi2_of_point(std::span<const double> probs);           // q*sum(p^2)-1
double skl_of_point(std::span<const double> probs, bool* saturated);  // sum (p-1/q) log p

}  // namespace potts
