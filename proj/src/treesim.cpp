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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace potts {

namespace {

// inverse-CDF Poisson sampler; the table covers all but ~1e-17 of the mass
// and the loop extends it exactly when a draw lands beyond
struct PoissonSampler {
  std::vector<double> cdf;
  double d;

  explicit PoissonSampler(double d_) : d(d_) {
    double term = std::exp(-d);
    double cum = term;
    cdf.push_back(cum);
    for (int b = 1; b < 512; ++b) {
      term *= d / b;
      cum += term;
      cdf.push_back(cum);
      if (1.0 - cum < 1e-17 && b > d) break;
    }
  }

  int draw(Rng& rng) const {
    double u = rng.next_unit();
    if (u < cdf.back()) {
      int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
      while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (u < cdf[mid]) hi = mid; else lo = mid + 1;
      }
      return lo;
    }
    // exact tail extension
    int b = static_cast<int>(cdf.size()) - 1;
    double term = cdf.back() - (cdf.size() > 1 ? cdf[cdf.size() - 2] : 0.0);
    double cum = cdf.back();
    while (cum <= u && b < 100000) {
      ++b;
      term *= d / b;
      cum += term;
    }
    return b;
  }
};

// fixed-order pairwise summation; deterministic regardless of how the
// entries were produced
double pairwise_sum(const double* x, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

MeanSe mean_se(const std::vector<double>& x) {
  const size_t n = x.size();
  MeanSe r;
  r.mean = pairwise_sum(x.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (size_t i = 0; i < n; ++i) sq[i] = (x[i] - r.mean) * (x[i] - r.mean);
  double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  r.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  return r;
}

// variance of x with the standard error of the variance estimate itself
// (delta method: se^2 = (m4 - m2^2)/n)
MeanSe variance_se(const std::vector<double>& x) {
  const size_t n = x.size();
  double mean = pairwise_sum(x.data(), n) / static_cast<double>(n);
  std::vector<double> c2(n), c4(n);
  for (size_t i = 0; i < n; ++i) {
    double d = x[i] - mean;
    c2[i] = d * d;
    c4[i] = d * d * d * d;
  }
  double m2 = pairwise_sum(c2.data(), n) / static_cast<double>(n);
  double m4 = pairwise_sum(c4.data(), n) / static_cast<double>(n);
  MeanSe r;
  r.mean = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
  r.se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / static_cast<double>(n));
  return r;
}

}  // namespace

TreeSample sample_tree(const OffspringDist& offspring, int k, Rng& rng,
                       int64_t node_budget) {
  if (k < 0) throw std::invalid_argument("sample_tree: k must be >= 0");
  TreeSample t;
  t.parent.push_back(-1);
  t.level_offset = {0, 1};
  const bool regular = offspring.is_regular();
  const int d_regular = static_cast<int>(offspring.d);
  std::optional<PoissonSampler> pois;
  if (!regular) pois.emplace(offspring.d);

  for (int level = 0; level < k; ++level) {
    int begin = t.level_offset[level], end = t.level_offset[level + 1];
    for (int v = begin; v < end; ++v) {
      int children = regular ? d_regular : pois->draw(rng);
      for (int c = 0; c < children; ++c) t.parent.push_back(v);
      if (static_cast<int64_t>(t.parent.size()) > node_budget)
        throw std::runtime_error("sample_tree: node budget exceeded");
    }
    t.level_offset.push_back(static_cast<int32_t>(t.parent.size()));
  }
  return t;
}

std::vector<int8_t> broadcast_labels(const TreeSample& tree, const PottsParams& p,
                                     Rng& rng, int forced_root) {
  const int q = p.q;
  std::vector<int8_t> labels(tree.node_count());
  labels[0] = forced_root >= 0 ? static_cast<int8_t>(forced_root)
                               : static_cast<int8_t>(rng.next_below(q));
  // row of the Potts matrix: same color with prob lambda + (1-lambda)/q,
  // each other color with prob (1-lambda)/q (valid for negative lambda too)
  const double p_same = p.lambda + (1.0 - p.lambda) / q;
  const double p_other = (1.0 - p.lambda) / q;
  for (int v = 1; v < tree.node_count(); ++v) {
    double u = rng.next_unit();
    int8_t parent_color = labels[tree.parent[v]];
    if (u < p_same) {
      labels[v] = parent_color;
    } else {
      int r = static_cast<int>((u - p_same) / p_other);
      if (r > q - 2) r = q - 2;
      labels[v] = static_cast<int8_t>(r < parent_color ? r : r + 1);
    }
  }
  return labels;
}

void sample_observation(const Channel& w, int label, Rng& rng, double* like_out) {
  const int q = w.q();
  // pick the atom
  int a = 0;
  if (w.atom_count() > 1) {
    double u = rng.next_unit();
    double cum = 0.0;
    for (; a < w.atom_count() - 1; ++a) {
      cum += w.weight(a);
      if (u < cum) break;
    }
  }
  auto pi = w.point(a);
  // output permutation tau with tau(j) = label, j ~ pi; the induced
  // likelihood is pi[tau^{-1}(x)], a uniformly shuffled assignment of the
  // remaining coordinates to the remaining colors
  double u = rng.next_unit();
  double cum = 0.0;
  int j = q - 1;
  for (int i = 0; i < q - 1; ++i) {
    cum += pi[i];
    if (u < cum) {
      j = i;
      break;
    }
  }
  like_out[label] = pi[j];
  // Fisher-Yates over the remaining coordinate indices
  int rest[16];
  int m = 0;
  for (int i = 0; i < q; ++i)
    if (i != j) rest[m++] = i;
  for (int i = m - 1; i > 0; --i)
    std::swap(rest[i], rest[rng.next_below(static_cast<uint64_t>(i) + 1)]);
  m = 0;
  for (int x = 0; x < q; ++x)
    if (x != label) like_out[x] = pi[rest[m++]];
}

Observation observe(const TreeSample& tree, const std::vector<int8_t>& labels,
                    const Channel* leaf, const Channel* survey, Rng& rng) {
  const int n = tree.node_count();
  const int q = leaf ? leaf->q() : (survey ? survey->q() : 0);
  Observation obs;
  obs.like.assign(static_cast<size_t>(n) * q, 1.0);
  obs.observed.assign(n, 0);
  double tmp[16];
  if (survey) {
    for (int v = 0; v < n; ++v) {
      sample_observation(*survey, labels[v], rng, tmp);
      obs.observed[v] = 1;
      for (int x = 0; x < q; ++x) obs.like[static_cast<size_t>(v) * q + x] = tmp[x];
    }
  }
  if (leaf) {
    const int k = tree.depth();
    for (int v = tree.level_begin(k); v < tree.level_end(k); ++v) {
      sample_observation(*leaf, labels[v], rng, tmp);
      if (obs.observed[v]) {
        for (int x = 0; x < q; ++x) obs.like[static_cast<size_t>(v) * q + x] *= tmp[x];
      } else {
        obs.observed[v] = 1;
        for (int x = 0; x < q; ++x) obs.like[static_cast<size_t>(v) * q + x] = tmp[x];
      }
    }
  }
  return obs;
}

std::vector<double> exact_posterior(const TreeSample& tree, const Observation& obs,
                                    const PottsParams& p) {
  const int n = tree.node_count();
  const int q = p.q;
  // acc[v] accumulates likelihood times incoming child messages
  std::vector<double> acc(static_cast<size_t>(n) * q, 1.0);
  for (int v = 0; v < n; ++v) {
    if (obs.observed[v]) {
      for (int x = 0; x < q; ++x)
        acc[static_cast<size_t>(v) * q + x] = obs.like[static_cast<size_t>(v) * q + x];
    }
  }
  const double lam = p.lambda;
  const double off = (1.0 - lam) / q;
  // children precede nothing: BFS order guarantees parent[v] < v, so a
  // reverse sweep sends every message before its target is folded
  for (int v = n - 1; v >= 1; --v) {
    double* m = acc.data() + static_cast<size_t>(v) * q;
    double sum = 0.0;
    for (int x = 0; x < q; ++x) sum += m[x];
    if (sum <= 0.0) throw std::runtime_error("exact_posterior: impossible observation");
    double inv = 1.0 / sum;
    // up-message: (P_lambda m)(j) = lambda m(j) + (1-lambda)/q sum(m)
    double* pa = acc.data() + static_cast<size_t>(tree.parent[v]) * q;
    for (int x = 0; x < q; ++x) pa[x] *= lam * m[x] * inv + off;
  }
  std::vector<double> post(acc.begin(), acc.begin() + q);
  double sum = std::accumulate(post.begin(), post.end(), 0.0);
  if (sum <= 0.0) throw std::runtime_error("exact_posterior: impossible observation");
  for (double& x : post) x /= sum;
  return post;
}

namespace {

// Allocation-free trial runner: buffers live in a per-thread workspace and
// observation likelihoods fold straight into the message accumulator. The
// random stream is consumed in exactly the same order as the plain
// sample_tree / broadcast_labels / observe pipeline, so results match it
// bit for bit.
struct TrialWorkspace {
  std::vector<int32_t> parent;
  std::vector<int32_t> level_offset;
  std::vector<int8_t> labels;
  std::vector<double> acc;
};

void run_trial_fast(const PottsParams& params, const Channel* leaf,
                    const Channel* survey, const OffspringDist& offspring,
                    const PoissonSampler* pois, int k, Rng& rng,
                    TrialWorkspace& ws, double* post_out) {
  const int q = params.q;
  // tree
  ws.parent.clear();
  ws.parent.push_back(-1);
  ws.level_offset.assign(1, 0);
  ws.level_offset.push_back(1);
  const bool regular = offspring.is_regular();
  const int d_regular = static_cast<int>(offspring.d);
  for (int level = 0; level < k; ++level) {
    int begin = ws.level_offset[level], end = ws.level_offset[level + 1];
    for (int v = begin; v < end; ++v) {
      int children = regular ? d_regular : pois->draw(rng);
      for (int c = 0; c < children; ++c) ws.parent.push_back(v);
    }
    ws.level_offset.push_back(static_cast<int32_t>(ws.parent.size()));
  }
  const int n = static_cast<int>(ws.parent.size());

  // labels
  ws.labels.resize(n);
  ws.labels[0] = static_cast<int8_t>(rng.next_below(q));
  const double p_same = params.lambda + (1.0 - params.lambda) / q;
  const double p_other = (1.0 - params.lambda) / q;
  for (int v = 1; v < n; ++v) {
    double u = rng.next_unit();
    int8_t pc = ws.labels[ws.parent[v]];
    if (u < p_same) {
      ws.labels[v] = pc;
    } else {
      int rr = static_cast<int>((u - p_same) / p_other);
      if (rr > q - 2) rr = q - 2;
      ws.labels[v] = static_cast<int8_t>(rr < pc ? rr : rr + 1);
    }
  }

  // observations folded into the accumulator
  ws.acc.assign(static_cast<size_t>(n) * q, 1.0);
  double like[16];
  if (survey) {
    for (int v = 0; v < n; ++v) {
      sample_observation(*survey, ws.labels[v], rng, like);
      double* a = ws.acc.data() + static_cast<size_t>(v) * q;
      for (int x = 0; x < q; ++x) a[x] *= like[x];
    }
  }
  if (leaf) {
    for (int v = ws.level_offset[k]; v < ws.level_offset[k + 1]; ++v) {
      sample_observation(*leaf, ws.labels[v], rng, like);
      double* a = ws.acc.data() + static_cast<size_t>(v) * q;
      for (int x = 0; x < q; ++x) a[x] *= like[x];
    }
  }

  // leaves-to-root sum-product
  const double lam = params.lambda;
  const double off = (1.0 - lam) / q;
  for (int v = n - 1; v >= 1; --v) {
    double* m = ws.acc.data() + static_cast<size_t>(v) * q;
    double sum = 0.0;
    for (int x = 0; x < q; ++x) sum += m[x];
    double inv = 1.0 / sum;
    double* pa = ws.acc.data() + static_cast<size_t>(ws.parent[v]) * q;
    for (int x = 0; x < q; ++x) pa[x] *= lam * m[x] * inv + off;
  }
  double sum = 0.0;
  for (int x = 0; x < q; ++x) sum += ws.acc[x];
  for (int x = 0; x < q; ++x) post_out[x] = ws.acc[x] / sum;
}

}  // namespace

EstimateResult estimate(const Scenario& scenario, int q, double lambda,
                        const OffspringDist& offspring, int k, int trials,
                        uint64_t seed, bool parallel) {
  PottsParams params(q, lambda);
  if (trials < 100) throw std::invalid_argument("estimate: need at least 100 trials");
  const Channel* leaf = scenario.leaf ? &*scenario.leaf : nullptr;
  const Channel* survey = scenario.survey ? &*scenario.survey : nullptr;
  if (!leaf && !survey) throw std::invalid_argument("estimate: no observations");
  const double logq = std::log(static_cast<double>(q));
  std::optional<PoissonSampler> pois;
  if (!offspring.is_regular()) pois.emplace(offspring.d);

  std::vector<double> pe(trials), info(trials), chi2(trials);
  auto run_block = [&](int lo, int hi) {
    TrialWorkspace ws;
    double post[16];
    for (int t = lo; t < hi; ++t) {
      Rng rng = Rng::stream(seed, static_cast<uint64_t>(t));
      run_trial_fast(params, leaf, survey, offspring, pois ? &*pois : nullptr, k,
                     rng, ws, post);
      double mx = 0.0, h = 0.0, c = 0.0;
      for (int x = 0; x < q; ++x) {
        mx = std::max(mx, post[x]);
        if (post[x] > 0.0) h -= post[x] * std::log(post[x]);
        c += post[x] * post[x];
      }
      pe[t] = 1.0 - mx;
      info[t] = logq - h;
      chi2[t] = q * c - 1.0;
    }
  };

  if (parallel) {
#pragma omp parallel
    {
#pragma omp for schedule(dynamic, 256)
      for (int block = 0; block < (trials + 255) / 256; ++block) {
        run_block(block * 256, std::min(trials, (block + 1) * 256));
      }
    }
  } else {
    run_block(0, trials);
  }

  EstimateResult r;
  r.pe = mean_se(pe);
  r.info = mean_se(info);
  r.chi2 = mean_se(chi2);
  r.trials = trials;
  r.k = k;
  return r;
}

MajorityEmpirical majority_stats(int q, double lambda, const OffspringDist& offspring,
                                 double eta, int k, int trials, uint64_t seed,
                                 bool parallel) {
  PottsParams params(q, lambda);
  PottsParams leaf_params(q, eta);
  auto leaf_rows = potts_matrix(leaf_params);

  // conditioned runs: root forced to 0 ('+'), 1 ('-'), and 2 when q >= 3
  const int n_cond = q >= 3 ? 3 : 2;
  std::vector<std::vector<double>> s_samples(n_cond, std::vector<double>(trials));

  auto run_trial = [&](int cond, int t) {
    Rng rng = Rng::stream(mix_seed(seed, static_cast<uint64_t>(cond)),
                          static_cast<uint64_t>(t));
    TreeSample tree = sample_tree(offspring, k, rng);
    auto labels = broadcast_labels(tree, params, rng, cond);
    double s = 0.0;
    for (int v = tree.level_begin(k); v < tree.level_end(k); ++v) {
      // leaf observation through potts(eta), as a color
      double u = rng.next_unit();
      const double* row = leaf_rows.data() + static_cast<size_t>(labels[v]) * q;
      double cum = 0.0;
      int nu = q - 1;
      for (int x = 0; x < q - 1; ++x) {
        cum += row[x];
        if (u < cum) {
          nu = x;
          break;
        }
      }
      if (nu == 0) s += 1.0;
      else if (nu == 1) s -= 1.0;
    }
    s_samples[cond][t] = s;
  };

  for (int cond = 0; cond < n_cond; ++cond) {
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
      for (int t = 0; t < trials; ++t) run_trial(cond, t);
    } else {
      for (int t = 0; t < trials; ++t) run_trial(cond, t);
    }
  }

  MajorityEmpirical r;
  r.mean_plus = mean_se(s_samples[0]);
  r.var_plus = variance_se(s_samples[0]);
  r.var_minus = variance_se(s_samples[1]);
  if (n_cond == 3) {
    r.var_zero = variance_se(s_samples[2]);
  } else {
    r.var_zero = {std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
  }
  return r;
}

MajorityPrediction variance_recursion(int q, double lambda, double d, double eta,
                                      int k, bool regular) {
  MajorityPrediction out;
  const double one_r = regular ? 1.0 : 0.0;
  const double dl = d * lambda;
  const double stay = lambda + (1.0 - lambda) / q * 2.0;  // P(j in {+,-} | +) weight
  const double cross = (1.0 - lambda) / q;

  // depth-0 moments of e_{nu} with nu ~ potts(eta) row of the root color
  double var_plus = eta + 2.0 * (1.0 - eta) / q - eta * eta;
  double var_zero = q >= 3 ? 2.0 * (1.0 - eta) / q : 0.0;
  double drift = eta * eta;  // (E^+ S_j)^2 / (d lambda)^{2j}

  for (int j = 0; j < k; ++j) {
    double scale = drift * std::pow(dl * dl, j);
    double vp = d * scale * (stay - lambda * lambda * one_r) +
                d * (stay * var_plus + cross * (q - 2) * var_zero);
    double vz = d * scale * (2.0 * cross) +
                d * (2.0 * cross * var_plus +
                     (lambda + cross * (q - 2)) * var_zero);
    var_plus = vp;
    var_zero = vz;
  }
  out.mean_plus = eta * std::pow(dl, k);
  out.var_plus = var_plus;
  out.var_zero = q >= 3 ? var_zero : std::numeric_limits<double>::quiet_NaN();

  const double dl2 = d * lambda * lambda;
  if (std::abs(dl - 1.0) > 1e-12 && std::abs(dl2 - 1.0) > 1e-12) {
    double growth = eta * eta * std::pow(dl, 2 * k);
    double diff = (1.0 - lambda * one_r) / (dl - 1.0) * growth;
    double sum = (1.0 - lambda * lambda * one_r) / (dl2 - 1.0) * growth;
    out.var_plus_closed = 2.0 / q * (sum + (q - 2.0) / 2.0 * diff);
    out.var_zero_closed = q >= 3 ? 2.0 / q * (sum - diff)
                                 : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.var_plus_closed = std::numeric_limits<double>::quiet_NaN();
    out.var_zero_closed = std::numeric_limits<double>::quiet_NaN();
  }

  // second-moment ratio bounding the chi2 of the majority channel
  double e_plus = eta * std::pow(dl, k);
  double second_plus = var_plus + e_plus * e_plus;
  double second_mix = stay * second_plus + cross * (q - 2) * var_zero;
  out.chi2_ratio = (lambda * e_plus) * (lambda * e_plus) / second_mix;
  if (dl2 > 1.0) {
    double u = (dl2 - 1.0) / (dl - 1.0);
    double c_q = q == 2 ? 1.0 : 1.0 / (2.0 / q + (q - 2.0) / q * u);
    out.chi2_limit = c_q * (dl2 - 1.0) / (d - one_r);
  }
  return out;
}

}  // namespace potts
