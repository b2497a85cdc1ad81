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

#include <optional>
#include <vector>

#include "potts/channel.hpp"

namespace potts {

struct OffspringDist {
  enum class Kind { kRegular, kPoisson };
  Kind kind = Kind::kRegular;
  double d = 2.0;

  static OffspringDist regular(int d_) {
    if (d_ < 0) throw std::invalid_argument("offspring: d must be >= 0");
    return {Kind::kRegular, static_cast<double>(d_)};
  }
  static OffspringDist poisson(double d_) {
    if (d_ < 0) throw std::invalid_argument("offspring: d must be >= 0");
    return {Kind::kPoisson, d_};
  }

  // pmf over b = 0..truncation with the discarded tail below 1e-12,
  // renormalized. Regular offspring yields a single unit mass.
  std::vector<double> pmf() const;

  double mean() const { return d; }
  bool is_regular() const { return kind == Kind::kRegular; }

  // "regular:3" | "poisson:3.5"
  static OffspringDist parse(const std::string& text);
  std::string to_string() const;
};

struct BpParams {
  PottsParams potts;
  OffspringDist offspring;
  std::optional<Channel> survey;
  int cap = 100000;
  uint64_t seed = 1;
  uint64_t star_budget = kDefaultStarBudget;

  BpParams(PottsParams potts_, OffspringDist offspring_)
      : potts(potts_), offspring(offspring_) {}
};

struct BpTraceRow {
  Measures m;
  double phi_low = 0.0;   // SKL potential, saturated entries flagged in m
  double phi_high = 0.0;  // Bhattacharyya of the binary restriction
  int atom_count = 0;
};

struct BpTrace {
  std::vector<BpTraceRow> rows;  // rows[0] describes the initial channel
  bool converged = false;
  Channel last;
};

// The offspring mixture E_b[(M o P_lambda)^{star b}] alone: no survey
// convolution and no final resampling. This is the "boundary information
// only" channel at the next level (the survey below the root applied, the
// root's own survey not yet folded in).
Channel bp_mix(const Channel& m, const BpParams& p, int iteration = 0);

// One level of the tree recursion: bp_mix, then the survey convolution,
// then a single resampling to cap.
Channel bp_step(const Channel& m, const BpParams& p, int iteration = 0);

// Repeated bp_step with per-step measures; stops early when the step-to-step
// change |dPe| + |dC| + |dchi2| falls below tol.
BpTrace iterate(const Channel& m0, const BpParams& p, int k_max, double tol = 1e-7);

struct PhiGap {
  double gap_low = 0.0;   // Phi^L(M_k) - Phi^L(Mtilde_k), NaN while saturated
  double gap_high = 0.0;  // Phi^H(Mtilde_k) - Phi^H(M_k)
};

// Evolves both channels with identical seeds and caps and records the raw
// potential gaps per step (index 0 = initial channels). For k >= 1 the SKL
// gap is evaluated on the pre-survey mixtures: the survey contribution to
// the SKL potential is an additive constant shared by both chains, and with
// an erasure survey it is infinite, so differencing before the survey
// convolution is the only finite evaluation of the same quantity.
std::vector<PhiGap> phi_gap_trace(const Channel& m0, const Channel& mtilde0,
                                  const BpParams& p, int k_max);

struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

// chi2(P o P_lambda) <= lambda^2 chi2(P), checked with 1e-10 headroom.
ContractionCheck check_chi2_contraction(const Channel& p, double lambda);

struct SubadditivityCheck {
  double lhs = 0.0;    // chi2(P star Q), exact expansion
  double sum = 0.0;    // chi2(P) + chi2(Q)
  double ratio = 1.0;  // lhs / sum, 1 when sum == 0
};

SubadditivityCheck check_subadditivity(const Channel& p, const Channel& q);

struct RobustProbeRow {
  double eta = 0.0;        // survey strength parameter
  double sup_chi2 = 0.0;   // running sup over recorded iterations
  double final_chi2 = 0.0;
  std::vector<double> chi2_trace;
};

// Iterates BP_W for each survey strength (W = potts(eta)) and records the
// chi2 trajectory. init chooses the seed channel; the survey-only dynamics
// of interest start from the trivial channel.
std::vector<RobustProbeRow> robust_reconstruction_probe(
    int q, double lambda, const OffspringDist& offspring,
    const std::vector<double>& survey_etas, int k_max,
    const ChannelSpec& init = ChannelSpec::identity(), int cap = 100000,
    uint64_t seed = 1, uint64_t star_budget = kDefaultStarBudget);

}  // namespace potts
