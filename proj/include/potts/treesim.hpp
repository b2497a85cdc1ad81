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
#include <vector>

#include "potts/bp.hpp"
#include "potts/channel.hpp"
#include "potts/rng.hpp"

namespace potts {

// A sampled tree in BFS order: parent[i] < i for every non-root node, nodes
// of depth l occupy [level_offset[l], level_offset[l+1]).
struct TreeSample {
  std::vector<int32_t> parent;
  std::vector<int32_t> level_offset;

  int node_count() const { return static_cast<int>(parent.size()); }
  int depth() const { return static_cast<int>(level_offset.size()) - 2; }
  int level_begin(int l) const { return level_offset[l]; }
  int level_end(int l) const { return level_offset[l + 1]; }
};

TreeSample sample_tree(const OffspringDist& offspring, int k, Rng& rng,
                       int64_t node_budget = 10000000);

// Broadcast process: root uniform unless forced, children drawn from the
// parent's Potts row.
std::vector<int8_t> broadcast_labels(const TreeSample& tree, const PottsParams& p,
                                     Rng& rng, int forced_root = -1);

// Per-node observation likelihoods; like holds q values per node,
// meaningful where observed[v] is set.
struct Observation {
  std::vector<double> like;
  std::vector<uint8_t> observed;
};

// Draws one FMS-channel output for the given input color and writes the
// induced likelihood vector P(output | x) for all x.
void sample_observation(const Channel& w, int label, Rng& rng, double* like_out);

// Leaf channel applies to depth-k nodes, survey to every node in the tree.
Observation observe(const TreeSample& tree, const std::vector<int8_t>& labels,
                    const Channel* leaf, const Channel* survey, Rng& rng);

// Exact sum-product pass leaves-to-root; returns the root posterior under a
// uniform prior. Messages are normalized at every node.
std::vector<double> exact_posterior(const TreeSample& tree, const Observation& obs,
                                    const PottsParams& p);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct Scenario {
  std::optional<Channel> leaf;    // observation channel at depth k
  std::optional<Channel> survey;  // observation channel on the whole tree
};

struct EstimateResult {
  MeanSe info;  // log q - E[H(posterior)], nats
  MeanSe pe;    // E[1 - max posterior]
  MeanSe chi2;  // E[q sum posterior^2 - 1]
  int trials = 0;
  int k = 0;
};

// Monte Carlo estimate of the depth-k channel functionals; trials run in
// parallel on counter-based streams and reduce in fixed order, so the result
// is identical for any thread count.
EstimateResult estimate(const Scenario& scenario, int q, double lambda,
                        const OffspringDist& offspring, int k, int trials,
                        uint64_t seed, bool parallel = true);

// Majority-statistic experiment: colors {0,1} embedded as {+,-}, leaves
// observed through potts(eta), S_k = #(obs=0) - #(obs=1) over depth-k nodes.
struct MajorityEmpirical {
  MeanSe mean_plus;
  MeanSe var_plus;
  MeanSe var_minus;
  MeanSe var_zero;  // conditioned on a root color outside {0,1}; q >= 3
};

MajorityEmpirical majority_stats(int q, double lambda, const OffspringDist& offspring,
                                 double eta, int k, int trials, uint64_t seed,
                                 bool parallel = true);

struct MajorityPrediction {
  double mean_plus = 0.0;         // eta (d lambda)^k
  double var_plus = 0.0;          // iterated recursion
  double var_zero = 0.0;
  double var_plus_closed = 0.0;   // leading-order closed form (d lambda != 1)
  double var_zero_closed = 0.0;
  double chi2_ratio = 0.0;        // second-moment ratio at this k
  double chi2_limit = 0.0;        // c(q,lambda,d) (d lambda^2 - 1)/(d - 1_regular)
};

// Iterates the conditional variance recursions exactly from the closed-form
// depth-0 moments of the potts(eta) leaf observation.
MajorityPrediction variance_recursion(int q, double lambda, double d, double eta,
                                      int k, bool regular);

}  // namespace potts
