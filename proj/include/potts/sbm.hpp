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

#include <functional>
#include <string>
#include <vector>

#include "potts/channel.hpp"
#include "potts/rng.hpp"

namespace potts {

struct SbmInstance {
  int n = 0;
  int q = 2;
  double a = 0.0;
  double b = 0.0;
  uint64_t seed = 0;
  std::vector<std::pair<int32_t, int32_t>> edges;
  std::vector<int8_t> labels;

  double mean_degree() const { return (a + (q - 1) * b) / q; }
  double edge_lambda() const { return (a - b) / (a + (q - 1) * b); }
};

// Labels i.i.d. uniform; each unordered pair joined with probability a/n
// (same label) or b/n (different), sampled with geometric skipping.
SbmInstance generate_sbm(int n, int q, double a, double b, uint64_t seed);

// Compressed adjacency with the reverse-slot map needed for directed
// message passing.
struct Csr {
  std::vector<int32_t> offset;
  std::vector<int32_t> nbr;
  std::vector<int32_t> rev;  // rev[slot of u->v] = slot of v->u

  explicit Csr(const SbmInstance& g);
  int degree(int v) const { return offset[v + 1] - offset[v]; }
};

// Per-vertex observation likelihoods P(Y_v | X_v = x), flattened n*q.
struct SideInfo {
  std::vector<double> like;
};

SideInfo sample_side_info(const SbmInstance& g, const Channel& w, uint64_t seed);

int default_bp_rounds(int n);  // floor(log(n)^0.9)

// Belief propagation with side information: directed messages seeded from
// the normalized side likelihood, synchronous rounds, argmax marginals
// (ties toward the smaller color). Throws if the side channel is trivial.
std::vector<int8_t> bp_side_info(const SbmInstance& g, const Csr& adj,
                                 const SideInfo& side, double lambda,
                                 int rounds = -1);

// Ground truth pushed through a row-stochastic q x q matrix; the stand-in
// for an initial recovery algorithm with known empirical transition matrix.
// Only vertices with active[v] set receive labels (others get -1).
std::vector<int8_t> oracle_initializer(const std::vector<int8_t>& labels,
                                       const std::vector<double>& f_matrix,
                                       const std::vector<uint8_t>& active,
                                       Rng& rng);

// Row-stochastic with sigma_min above the margin; rank-deficient matrices
// (e.g. uniform rows) make the anchor alignment meaningless.
bool valid_initializer_matrix(const std::vector<double>& f_matrix, int q,
                              double sigma_min = 1e-9);

// Initializer callback: given the active mask, produce labels for the active
// vertices (fresh randomness per call, seeded by the caller).
using Initializer =
    std::function<std::vector<int8_t>(const std::vector<uint8_t>& active, uint64_t seed)>;

struct VanillaConfig {
  int rounds = -1;          // BP rounds and ball radius; default log10(n)^0.9
  int sample_size = 2000;   // vertices to label (accuracy is estimated on these)
  bool reuse_global_init = false;  // skip per-vertex re-initialization
  // diagnostic conditioning: boundary likelihoods from the true ring labels
  // through the exact edge channel instead of the estimated one (the anchor
  // and alignment machinery still runs and is still reported)
  bool perfect_boundary = false;
  uint64_t seed = 1;
};

struct VanillaResult {
  std::vector<int32_t> vertices;  // evaluated vertices
  std::vector<int8_t> assigned;   // label per evaluated vertex, -1 on failure
  int anchor_failures = 0;        // anchors impossible for some color
  int alignment_failures = 0;     // no permutation matched the anchor profile
  bool reused_global_init = false;
};

// Belief propagation for the vanilla SBM: hold-out set, anchor vertices per
// color, per-vertex re-initialization outside the BP ball, permutation
// alignment against the anchors, and BP on the ball with the estimated
// boundary channel.
VanillaResult bp_vanilla(const SbmInstance& g, const Csr& adj, const Initializer& init,
                         double lambda, int assortative_sign,
                         const VanillaConfig& config);

// 1 - min over relabelings of the mismatch rate; exhaustive for q <= 6,
// Hungarian assignment on the confusion matrix above that (both exact).
double accuracy(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat, int q);

// exposed for the equivalence test between the two minimizers
double accuracy_exhaustive(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat,
                           int q);
double accuracy_assignment(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat,
                           int q);

}  // namespace potts
