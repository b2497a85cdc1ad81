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

#include "potts/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "potts/detail/jacobi.hpp"
#include "potts/treesim.hpp"

namespace potts {

bool valid_initializer_matrix(const std::vector<double>& f_matrix, int q,
                              double sigma_min) {
  if (static_cast<int>(f_matrix.size()) != q * q) return false;
  for (int i = 0; i < q; ++i) {
    double row = 0.0;
    for (int j = 0; j < q; ++j) {
      if (f_matrix[static_cast<size_t>(i) * q + j] < -1e-12) return false;
      row += f_matrix[static_cast<size_t>(i) * q + j];
    }
    if (std::abs(row - 1.0) > 1e-9) return false;
  }
  // sigma_min(F)^2 = smallest eigenvalue of F^T F
  std::vector<double> gram(static_cast<size_t>(q) * q, 0.0);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        gram[static_cast<size_t>(i) * q + j] +=
            f_matrix[static_cast<size_t>(k) * q + i] * f_matrix[static_cast<size_t>(k) * q + j];
  std::vector<double> eig;
  detail::jacobi_eigenvalues(gram, q, eig);
  double mn = eig[0];
  for (double e : eig) mn = std::min(mn, e);
  return mn > sigma_min * sigma_min;
}

namespace {

// appends edges of one block (same- or cross-group) via geometric skipping
template <typename Decode>
void sample_block(int64_t pair_count, double p, Rng& rng, const Decode& decode,
                  std::vector<std::pair<int32_t, int32_t>>& out) {
  if (pair_count <= 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (int64_t i = 0; i < pair_count; ++i) out.push_back(decode(i));
    return;
  }
  const double log1p = std::log1p(-p);
  double idx = -1.0;
  for (;;) {
    double u = rng.next_unit();
    idx += 1.0 + std::floor(std::log1p(-u) / log1p);
    if (idx >= static_cast<double>(pair_count)) break;
    out.push_back(decode(static_cast<int64_t>(idx)));
  }
}

}  // namespace

SbmInstance generate_sbm(int n, int q, double a, double b, uint64_t seed) {
  if (n < 1 || q < 2) throw std::invalid_argument("generate_sbm: bad n or q");
  if (a < 0 || b < 0 || a > n || b > n)
    throw std::invalid_argument("generate_sbm: edge rates outside [0, n]");
  SbmInstance g;
  g.n = n;
  g.q = q;
  g.a = a;
  g.b = b;
  g.seed = seed;

  Rng rng(mix_seed(seed, 0x5b3));
  g.labels.resize(n);
  for (int v = 0; v < n; ++v) g.labels[v] = static_cast<int8_t>(rng.next_below(q));

  std::vector<std::vector<int32_t>> groups(q);
  for (int v = 0; v < n; ++v) groups[g.labels[v]].push_back(v);

  for (int i = 0; i < q; ++i) {
    const auto& gi = groups[i];
    const int64_t si = static_cast<int64_t>(gi.size());
    // within-group pairs, triangular index decode
    sample_block(si * (si - 1) / 2, a / n, rng,
                 [&](int64_t idx) {
                   // row u has (si - 1 - u) pairs; find the row by walking
                   int64_t u = 0, skipped = 0;
                   while (skipped + (si - 1 - u) <= idx) {
                     skipped += si - 1 - u;
                     ++u;
                   }
                   int64_t v = u + 1 + (idx - skipped);
                   return std::make_pair(gi[u], gi[v]);
                 },
                 g.edges);
    for (int j = i + 1; j < q; ++j) {
      const auto& gj = groups[j];
      const int64_t sj = static_cast<int64_t>(gj.size());
      sample_block(si * sj, b / n, rng,
                   [&](int64_t idx) {
                     return std::make_pair(gi[idx / sj], gj[idx % sj]);
                   },
                   g.edges);
    }
  }
  for (auto& e : g.edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

Csr::Csr(const SbmInstance& g) {
  offset.assign(g.n + 1, 0);
  for (const auto& e : g.edges) {
    ++offset[e.first + 1];
    ++offset[e.second + 1];
  }
  for (int v = 0; v < g.n; ++v) offset[v + 1] += offset[v];
  nbr.resize(offset.back());
  rev.resize(offset.back());
  std::vector<int32_t> fill(offset.begin(), offset.end() - 1);
  for (const auto& e : g.edges) {
    int32_t su = fill[e.first]++;
    int32_t sv = fill[e.second]++;
    nbr[su] = e.second;
    nbr[sv] = e.first;
    rev[su] = sv;
    rev[sv] = su;
  }
}

SideInfo sample_side_info(const SbmInstance& g, const Channel& w, uint64_t seed) {
  if (w.q() != g.q) throw std::invalid_argument("sample_side_info: q mismatch");
  SideInfo s;
  s.like.resize(static_cast<size_t>(g.n) * g.q);
  Rng rng(mix_seed(seed, 0x51de));
  for (int v = 0; v < g.n; ++v)
    sample_observation(w, g.labels[v], rng, s.like.data() + static_cast<size_t>(v) * g.q);
  return s;
}

int default_bp_rounds(int n) {
  // log base 10: at desk-scale n the natural-log variant reaches the graph
  // diameter and the BP ball swallows the whole graph
  return static_cast<int>(std::floor(std::pow(std::log10(static_cast<double>(n)), 0.9)));
}

std::vector<int8_t> bp_side_info(const SbmInstance& g, const Csr& adj,
                                 const SideInfo& side, double lambda, int rounds) {
  const int q = g.q;
  PottsParams params(q, lambda);
  if (rounds < 0) rounds = default_bp_rounds(g.n);

  // reject an uninformative side channel: all likelihood rows constant
  bool informative = false;
  for (int v = 0; v < g.n && !informative; ++v) {
    const double* l = side.like.data() + static_cast<size_t>(v) * q;
    for (int x = 1; x < q; ++x)
      if (std::abs(l[x] - l[0]) > 1e-12) informative = true;
  }
  if (!informative)
    throw std::invalid_argument("bp_side_info: trivial side information");

  const size_t n_slots = adj.nbr.size();
  std::vector<double> cur(n_slots * q), next(n_slots * q);
  // init: normalized side likelihood of the sender
  for (int u = 0; u < g.n; ++u) {
    const double* l = side.like.data() + static_cast<size_t>(u) * q;
    double s = 0.0;
    for (int x = 0; x < q; ++x) s += l[x];
    for (int32_t slot = adj.offset[u]; slot < adj.offset[u + 1]; ++slot)
      for (int x = 0; x < q; ++x) cur[static_cast<size_t>(slot) * q + x] = l[x] / s;
  }

  const double off = (1.0 - lambda) / q;
  std::vector<int8_t> out(g.n);
  for (int round = 0; round <= rounds; ++round) {
    const bool last = round == rounds;
#pragma omp parallel for schedule(dynamic, 256)
    for (int u = 0; u < g.n; ++u) {
      const int deg = adj.degree(u);
      const double* l = side.like.data() + static_cast<size_t>(u) * q;
      // transformed incoming factors f_w(x) = sum_k m_{w->u}(k) P(k|x)
      std::vector<double> f(static_cast<size_t>(deg) * q);
      for (int e = 0; e < deg; ++e) {
        int32_t in_slot = adj.rev[adj.offset[u] + e];
        const double* m = cur.data() + static_cast<size_t>(in_slot) * q;
        for (int x = 0; x < q; ++x)
          f[static_cast<size_t>(e) * q + x] = lambda * m[x] + off;
      }
      if (last) {
        // vertex marginal over all incoming messages
        double belief[16];
        for (int x = 0; x < q; ++x) belief[x] = l[x];
        for (int e = 0; e < deg; ++e)
          for (int x = 0; x < q; ++x) belief[x] *= f[static_cast<size_t>(e) * q + x];
        int arg = 0;
        for (int x = 1; x < q; ++x)
          if (belief[x] > belief[arg]) arg = x;
        out[u] = static_cast<int8_t>(arg);
        continue;
      }
      // prefix/suffix products leave one factor out per outgoing edge
      std::vector<double> pre(static_cast<size_t>(deg + 1) * q, 1.0);
      std::vector<double> suf(static_cast<size_t>(deg + 1) * q, 1.0);
      for (int e = 0; e < deg; ++e)
        for (int x = 0; x < q; ++x)
          pre[static_cast<size_t>(e + 1) * q + x] =
              pre[static_cast<size_t>(e) * q + x] * f[static_cast<size_t>(e) * q + x];
      for (int e = deg - 1; e >= 0; --e)
        for (int x = 0; x < q; ++x)
          suf[static_cast<size_t>(e) * q + x] =
              suf[static_cast<size_t>(e + 1) * q + x] * f[static_cast<size_t>(e) * q + x];
      for (int e = 0; e < deg; ++e) {
        double* m = next.data() + static_cast<size_t>(adj.offset[u] + e) * q;
        double z = 0.0;
        for (int x = 0; x < q; ++x) {
          m[x] = l[x] * pre[static_cast<size_t>(e) * q + x] *
                 suf[static_cast<size_t>(e + 1) * q + x];
          z += m[x];
        }
        if (z <= 0.0) {
          for (int x = 0; x < q; ++x) m[x] = 1.0 / q;
        } else {
          for (int x = 0; x < q; ++x) m[x] /= z;
        }
      }
    }
    if (!last) cur.swap(next);
  }
  return out;
}

std::vector<int8_t> oracle_initializer(const std::vector<int8_t>& labels,
                                       const std::vector<double>& f_matrix,
                                       const std::vector<uint8_t>& active, Rng& rng) {
  const int n = static_cast<int>(labels.size());
  const int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(f_matrix.size()))));
  for (int i = 0; i < q; ++i) {
    double row = 0.0;
    for (int j = 0; j < q; ++j) {
      double x = f_matrix[static_cast<size_t>(i) * q + j];
      if (x < -1e-12) throw std::invalid_argument("oracle_initializer: negative entry");
      row += x;
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw std::invalid_argument("oracle_initializer: rows must sum to 1");
  }
  std::vector<int8_t> y(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!active[v]) continue;
    const double* row = f_matrix.data() + static_cast<size_t>(labels[v]) * q;
    double u = rng.next_unit();
    double cum = 0.0;
    int8_t pick = static_cast<int8_t>(q - 1);
    for (int j = 0; j < q - 1; ++j) {
      cum += row[j];
      if (u < cum) {
        pick = static_cast<int8_t>(j);
        break;
      }
    }
    y[v] = pick;
  }
  return y;
}

namespace {

// neighbor label profile of u over vertices with labels assigned
void profile(const Csr& adj, const std::vector<int8_t>& y, int u, int q, int64_t* out) {
  std::fill(out, out + q, 0);
  for (int32_t s = adj.offset[u]; s < adj.offset[u + 1]; ++s) {
    int8_t l = y[adj.nbr[s]];
    if (l >= 0) ++out[l];
  }
}

}  // namespace

VanillaResult bp_vanilla(const SbmInstance& g, const Csr& adj, const Initializer& init,
                         double lambda, int assortative_sign,
                         const VanillaConfig& config) {
  const int n = g.n, q = g.q;
  const int s = assortative_sign >= 0 ? 1 : -1;
  const int r = config.rounds > 0 ? config.rounds : default_bp_rounds(n);
  PottsParams params(q, lambda);
  VanillaResult result;
  result.reused_global_init = config.reuse_global_init;

  Rng rng(mix_seed(config.seed, 0xa129));
  // hold-out set U of size floor(sqrt(n))
  const int holdout = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < holdout; ++i) {
    int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(n - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<uint8_t> in_holdout(n, 0);
  for (int i = 0; i < holdout; ++i) in_holdout[order[i]] = 1;

  std::vector<uint8_t> active(n);
  for (int v = 0; v < n; ++v) active[v] = !in_holdout[v];
  auto y_global = init(active, mix_seed(config.seed, 0x91));

  // Anchors: per color, the qualifying hold-out vertex (enough outside
  // neighbors, strictly dominant label count) with the most neighbors.
  // Ranking by degree rather than by margin keeps the boundary-channel
  // estimate from being biased toward lopsided neighborhoods.
  const double min_nbrs = std::sqrt(std::log(static_cast<double>(n)));
  std::vector<int32_t> anchor(q, -1);
  std::vector<int64_t> anchor_deg(q, -1);
  std::vector<int64_t> prof(q);
  for (int i = 0; i < holdout; ++i) {
    int u = order[i];
    int outside = 0;
    for (int32_t sl = adj.offset[u]; sl < adj.offset[u + 1]; ++sl)
      if (!in_holdout[adj.nbr[sl]]) ++outside;
    if (outside < min_nbrs) continue;
    profile(adj, y_global, u, q, prof.data());
    int arg = 0;
    for (int x = 1; x < q; ++x)
      if (s * prof[x] > s * prof[arg]) arg = x;
    int64_t gap = std::numeric_limits<int64_t>::max();
    for (int x = 0; x < q; ++x)
      if (x != arg) gap = std::min(gap, s * (prof[arg] - prof[x]));
    if (gap <= 0) continue;  // dominance must be strict
    if (outside > anchor_deg[arg]) {
      anchor_deg[arg] = outside;
      anchor[arg] = u;
    }
  }
  for (int i = 0; i < q; ++i)
    if (anchor[i] < 0) ++result.anchor_failures;
  if (result.anchor_failures > 0) return result;

  // evaluation vertices: a deterministic sample outside the hold-out set
  std::vector<int32_t> pool;
  for (int v = 0; v < n; ++v)
    if (!in_holdout[v]) pool.push_back(v);
  const int sample = std::min<int>(config.sample_size, static_cast<int>(pool.size()));
  for (int i = 0; i < sample; ++i) {
    int j = i + static_cast<int>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  result.vertices.assign(pool.begin(), pool.begin() + sample);
  result.assigned.assign(sample, -1);

  std::vector<int> perm_buf(q);
  std::iota(perm_buf.begin(), perm_buf.end(), 0);
  std::vector<std::vector<int>> all_perms;
  do {
    all_perms.push_back(perm_buf);
  } while (std::next_permutation(perm_buf.begin(), perm_buf.end()));

  int alignment_failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : alignment_failures)
  for (int idx = 0; idx < sample; ++idx) {
    const int v = result.vertices[idx];
    // ball of radius r-1 around v; ring at distance r
    std::vector<int32_t> dist(n, -1);
    std::vector<int32_t> ball, ring;
    std::queue<int32_t> bfs;
    dist[v] = 0;
    bfs.push(v);
    ball.push_back(v);
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      if (dist[u] == r) continue;
      for (int32_t sl = adj.offset[u]; sl < adj.offset[u + 1]; ++sl) {
        int w = adj.nbr[sl];
        if (dist[w] >= 0) continue;
        dist[w] = dist[u] + 1;
        if (dist[w] <= r - 1) {
          ball.push_back(w);
          bfs.push(w);
        } else {
          ring.push_back(w);
        }
      }
    }

    std::vector<int8_t> y_v;
    if (config.reuse_global_init) {
      y_v = y_global;
    } else {
      std::vector<uint8_t> act(active);
      for (int u : ball) act[u] = 0;
      y_v = init(act, mix_seed(config.seed, 0x7000 + static_cast<uint64_t>(v)));
    }

    // align y_v against the anchors: find tau with s*N(u_i, tau^{-1}(i)) dominant
    std::vector<int64_t> aprof(static_cast<size_t>(q) * q);
    for (int i = 0; i < q; ++i)
      profile(adj, y_v, anchor[i], q, aprof.data() + static_cast<size_t>(i) * q);
    const std::vector<int>* tau = nullptr;
    for (const auto& p : all_perms) {
      bool ok = true;
      for (int i = 0; i < q && ok; ++i) {
        int64_t lead = aprof[static_cast<size_t>(i) * q + p[i]];
        for (int x = 0; x < q && ok; ++x)
          if (x != p[i] && s * lead <= s * aprof[static_cast<size_t>(i) * q + x])
            ok = false;
      }
      if (ok) {
        tau = &p;
        break;
      }
    }
    if (!tau) {
      ++alignment_failures;
      continue;
    }
    // Boundary channel estimate M[i][j] = N(u_i, tau-relabeled j) / total.
    // Anchor profiles hold only a handful of samples at desk scale, so the
    // raw frequencies contain zeros that would inject false certainties into
    // the ball BP; add-half smoothing keeps every row interior.
    std::vector<double> m(static_cast<size_t>(q) * q);
    bool degenerate = false;
    for (int i = 0; i < q; ++i) {
      double tot = 0.0;
      for (int j = 0; j < q; ++j) tot += aprof[static_cast<size_t>(i) * q + j];
      if (tot <= 0.0) degenerate = true;
      for (int j = 0; j < q; ++j)
        m[static_cast<size_t>(i) * q + j] =
            (aprof[static_cast<size_t>(i) * q + (*tau)[j]] + 0.5) / (tot + 0.5 * q);
    }
    if (degenerate) {
      ++alignment_failures;
      continue;
    }
    // relabel map: color j of y_v means tau-aligned color inv(j)
    std::vector<int> inv(q);
    for (int j = 0; j < q; ++j) inv[(*tau)[j]] = j;

    // BP on the ball: boundary likelihoods from ring observations through M
    const int bn = static_cast<int>(ball.size());
    std::vector<int32_t> local(n, -1);
    for (int i = 0; i < bn; ++i) local[ball[i]] = i;
    std::vector<double> like(static_cast<size_t>(bn) * q, 1.0);
    const auto exact_rows = potts_matrix(params);
    for (int i = 0; i < bn; ++i) {
      int u = ball[i];
      if (dist[u] != r - 1) continue;
      for (int32_t sl = adj.offset[u]; sl < adj.offset[u + 1]; ++sl) {
        int w = adj.nbr[sl];
        if (dist[w] != r) continue;
        if (config.perfect_boundary) {
          for (int x = 0; x < q; ++x)
            like[static_cast<size_t>(i) * q + x] *=
                exact_rows[static_cast<size_t>(x) * q + g.labels[w]];
          continue;
        }
        if (y_v[w] < 0) continue;
        int obs = inv[y_v[w]];
        for (int x = 0; x < q; ++x)
          like[static_cast<size_t>(i) * q + x] *= m[static_cast<size_t>(x) * q + obs];
      }
      // guard against underflow on high-degree boundary vertices
      double mx = 0.0;
      for (int x = 0; x < q; ++x)
        mx = std::max(mx, like[static_cast<size_t>(i) * q + x]);
      if (mx > 0)
        for (int x = 0; x < q; ++x) like[static_cast<size_t>(i) * q + x] /= mx;
    }

    // local CSR over the ball
    std::vector<int32_t> loff(bn + 1, 0), lnbr, lrev;
    for (int i = 0; i < bn; ++i) {
      int u = ball[i];
      for (int32_t sl = adj.offset[u]; sl < adj.offset[u + 1]; ++sl)
        if (local[adj.nbr[sl]] >= 0) ++loff[i + 1];
    }
    for (int i = 0; i < bn; ++i) loff[i + 1] += loff[i];
    lnbr.resize(loff[bn]);
    lrev.resize(loff[bn]);
    {
      std::vector<int32_t> fill(loff.begin(), loff.end() - 1);
      for (int i = 0; i < bn; ++i) {
        int u = ball[i];
        for (int32_t sl = adj.offset[u]; sl < adj.offset[u + 1]; ++sl) {
          int j = local[adj.nbr[sl]];
          if (j >= 0) lnbr[fill[i]++] = j;
        }
      }
      // reverse slots by matching (i -> j) with (j -> i)
      std::vector<int32_t> cursor(loff.begin(), loff.end() - 1);
      for (int i = 0; i < bn; ++i) {
        for (int32_t sl = loff[i]; sl < loff[i + 1]; ++sl) {
          int j = lnbr[sl];
          if (j < i) continue;
          // find the matching slot in j's list
          for (int32_t sl2 = cursor[j]; sl2 < loff[j + 1]; ++sl2) {
            if (lnbr[sl2] == i) {
              lrev[sl] = sl2;
              lrev[sl2] = sl;
              // do not advance cursor: parallel edges are impossible
              break;
            }
          }
        }
      }
    }

    // loopy sum-product, r rounds, uniform message init
    const double offdiag = (1.0 - lambda) / q;
    std::vector<double> mcur(static_cast<size_t>(loff[bn]) * q, 1.0 / q);
    std::vector<double> mnext(mcur.size());
    for (int round = 0; round < r; ++round) {
      for (int i = 0; i < bn; ++i) {
        const int deg = loff[i + 1] - loff[i];
        std::vector<double> f(static_cast<size_t>(deg) * q);
        for (int e = 0; e < deg; ++e) {
          const double* mm = mcur.data() + static_cast<size_t>(lrev[loff[i] + e]) * q;
          for (int x = 0; x < q; ++x)
            f[static_cast<size_t>(e) * q + x] = lambda * mm[x] + offdiag;
        }
        std::vector<double> pre(static_cast<size_t>(deg + 1) * q, 1.0);
        std::vector<double> suf(static_cast<size_t>(deg + 1) * q, 1.0);
        for (int e = 0; e < deg; ++e)
          for (int x = 0; x < q; ++x)
            pre[static_cast<size_t>(e + 1) * q + x] =
                pre[static_cast<size_t>(e) * q + x] * f[static_cast<size_t>(e) * q + x];
        for (int e = deg - 1; e >= 0; --e)
          for (int x = 0; x < q; ++x)
            suf[static_cast<size_t>(e) * q + x] =
                suf[static_cast<size_t>(e + 1) * q + x] * f[static_cast<size_t>(e) * q + x];
        for (int e = 0; e < deg; ++e) {
          double* out = mnext.data() + static_cast<size_t>(loff[i] + e) * q;
          double z = 0.0;
          for (int x = 0; x < q; ++x) {
            out[x] = like[static_cast<size_t>(i) * q + x] *
                     pre[static_cast<size_t>(e) * q + x] *
                     suf[static_cast<size_t>(e + 1) * q + x];
            z += out[x];
          }
          if (z <= 0.0)
            for (int x = 0; x < q; ++x) out[x] = 1.0 / q;
          else
            for (int x = 0; x < q; ++x) out[x] /= z;
        }
      }
      mcur.swap(mnext);
    }
    double belief[16];
    for (int x = 0; x < q; ++x) belief[x] = like[x];  // v is local index 0
    for (int32_t sl = loff[0]; sl < loff[1]; ++sl) {
      const double* mm = mcur.data() + static_cast<size_t>(lrev[sl]) * q;
      for (int x = 0; x < q; ++x) belief[x] *= lambda * mm[x] + offdiag;
    }
    int arg = 0;
    for (int x = 1; x < q; ++x)
      if (belief[x] > belief[arg]) arg = x;
    result.assigned[idx] = static_cast<int8_t>(arg);
  }
  result.alignment_failures = alignment_failures;
  return result;
}

double accuracy_exhaustive(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat,
                           int q) {
  if (x.size() != xhat.size()) throw std::invalid_argument("accuracy: length mismatch");
  std::vector<int64_t> conf(static_cast<size_t>(q) * q, 0);
  for (size_t v = 0; v < x.size(); ++v)
    ++conf[static_cast<size_t>(x[v]) * q + xhat[v]];
  std::vector<int> tau(q);
  std::iota(tau.begin(), tau.end(), 0);
  int64_t best = 0;
  do {
    int64_t agree = 0;
    for (int j = 0; j < q; ++j) agree += conf[static_cast<size_t>(tau[j]) * q + j];
    best = std::max(best, agree);
  } while (std::next_permutation(tau.begin(), tau.end()));
  return static_cast<double>(best) / static_cast<double>(x.size());
}

double accuracy_assignment(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat,
                           int q) {
  if (x.size() != xhat.size()) throw std::invalid_argument("accuracy: length mismatch");
  std::vector<int64_t> conf(static_cast<size_t>(q) * q, 0);
  for (size_t v = 0; v < x.size(); ++v)
    ++conf[static_cast<size_t>(x[v]) * q + xhat[v]];
  // Hungarian algorithm (potentials form) on the negated agreement matrix
  const int64_t kInf = int64_t(1) << 60;
  std::vector<int64_t> u(q + 1, 0), v(q + 1, 0);
  std::vector<int> p(q + 1, 0), way(q + 1, 0);
  for (int i = 1; i <= q; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<int64_t> minv(q + 1, kInf);
    std::vector<char> used(q + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      int64_t delta = kInf;
      for (int j = 1; j <= q; ++j) {
        if (used[j]) continue;
        int64_t cur = -conf[static_cast<size_t>(i0 - 1) * q + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= q; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  int64_t agree = 0;
  for (int j = 1; j <= q; ++j)
    if (p[j]) agree += conf[static_cast<size_t>(p[j] - 1) * q + (j - 1)];
  return static_cast<double>(agree) / static_cast<double>(x.size());
}

double accuracy(const std::vector<int8_t>& x, const std::vector<int8_t>& xhat, int q) {
  return q <= 6 ? accuracy_exhaustive(x, xhat, q) : accuracy_assignment(x, xhat, q);
}

}  // namespace potts
