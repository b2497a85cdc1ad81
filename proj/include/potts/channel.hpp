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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/simplex.hpp"

namespace potts {

// A q-ary fully-symmetric channel represented as a finite weighted population
// of posterior-orbit atoms. Atoms are kept in canonical order (points sorted
// lexicographically descending, equal points merged), so a population built
// from the same inputs is bit-identical regardless of thread count.
class Channel {
 public:
  Channel() = default;
  Channel(int q, std::vector<double> weights, std::vector<double> points,
          int population_cap = kDefaultCap);

  int q() const { return q_; }
  int atom_count() const { return static_cast<int>(weights_.size()); }
  int population_cap() const { return population_cap_; }
  void set_population_cap(int cap) { population_cap_ = cap; }

  double weight(int a) const { return weights_[a]; }
  std::span<const double> point(int a) const {
    return {points_.data() + static_cast<size_t>(a) * q_, static_cast<size_t>(q_)};
  }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& points() const { return points_; }

  SimplexPoint atom(int a) const;

  static constexpr int kDefaultCap = 1 << 20;

 private:
  int q_ = 0;
  int population_cap_ = kDefaultCap;
  std::vector<double> weights_;
  std::vector<double> points_;  // flat, q per atom
};

// Restriction of an FMS channel to a binary input pair: a BMS channel stored
// as a population of crossover atoms, delta in [0, 1/2].
struct BmsChannel {
  std::vector<double> weights;
  std::vector<double> deltas;
};

struct Measures {
  double pe = 0.0;
  double capacity = 0.0;
  double chi2 = 0.0;
  double skl = 0.0;
  bool skl_saturated = false;
};

// Channel constructors, given as a tagged spec so the CLI can parse them.
struct ChannelSpec {
  enum class Kind { kIdentity, kTrivial, kPotts, kErasure, kFsc };
  Kind kind = Kind::kIdentity;
  double param = 0.0;            // lambda for potts, eps for erasure
  std::vector<double> pi;        // for fsc

  static ChannelSpec identity() { return {Kind::kIdentity, 0.0, {}}; }
  static ChannelSpec trivial() { return {Kind::kTrivial, 0.0, {}}; }
  static ChannelSpec potts(double lambda) { return {Kind::kPotts, lambda, {}}; }
  static ChannelSpec erasure(double eps) { return {Kind::kErasure, eps, {}}; }
  static ChannelSpec fsc(std::vector<double> pi_) { return {Kind::kFsc, 0.0, std::move(pi_)}; }

  // "identity" | "trivial" | "potts:0.6" | "erasure:0.25" | "fsc:0.7,0.2,0.1"
  static ChannelSpec parse(const std::string& text);
  std::string to_string() const;
};

Channel make_channel(const ChannelSpec& spec, int q);

// Canonicalizes a raw atom list: drops sub-floor weights, sorts points into
// canonical order, merges equal points, renormalizes.
Channel merge_population(int q, const std::vector<double>& weights,
                         const std::vector<double>& points,
                         int population_cap = Channel::kDefaultCap);

// Atom-wise Potts composition: every point pushed through potts_push.
Channel compose_potts(const Channel& p, double lambda);

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr uint64_t kDefaultStarBudget = 400000;

// Convolution of two independent observations of the same input. Expands all
// atom pairs against all q! output permutations; throws BudgetExceeded if the
// raw product count |P|*|Q|*q! exceeds `budget` (callers resample first).
// OpenMP-parallel over pairs; output is canonical and thread-count invariant.
Channel star(const Channel& p, const Channel& q, uint64_t budget = kDefaultStarBudget);

// Plain serial loop kept as the reference implementation; must produce a
// bit-identical population.
Channel star_serial(const Channel& p, const Channel& q, uint64_t budget = kDefaultStarBudget);

// Resamples star inputs (largest first) until the expansion fits the budget,
// then convolves. The only entry point that silently loses information.
Channel star_fit(const Channel& p, const Channel& q, uint64_t budget, int cap, uint64_t seed);

// Iterated star power with resampling after any convolution that exceeds cap.
// b = 0 yields the identity channel.
Channel star_power(const Channel& p, int b, int cap, uint64_t seed,
                   uint64_t budget = kDefaultStarBudget);

// Binary input restriction via unordered coordinate-pair expansion; pinned by
// the identity Z(restrict_binary(fsc(pi))) = ((sum sqrt(pi_i))^2 - 1)/(q-1).
BmsChannel restrict_binary(const Channel& p);

Measures measures(const Channel& p);

double bhattacharyya(const BmsChannel& b);
double bms_chi2(const BmsChannel& b);  // sum w (1-2 delta)^2

// Systematic (low-variance) weighted resampling to at most cap atoms, with a
// deterministic stratified offset from the seed. Returns p unchanged when it
// already fits.
Channel resample(const Channel& p, int cap, uint64_t seed);

// Necessary conditions for "p is a degradation of q": the four measure
// inequalities plus the Bhattacharyya ordering of the binary restrictions.
// false certifies non-degradation; true is only necessary.
bool degrades_necessary(const Channel& p, const Channel& q);

enum class DegradationVerdict { kYes, kNo, kBudgetExceeded };

// Exact small-instance degradation check: solves the coupling feasibility
// problem with prefix-sum (majorization) constraints by a dense phase-1
// simplex. Instances with |P|*|Q| > 400 report kBudgetExceeded.
DegradationVerdict degrades_exact(const Channel& p, const Channel& q);

std::string to_string(DegradationVerdict v);

}  // namespace potts
