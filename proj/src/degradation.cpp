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

#include <cmath>
#include <vector>

#include "potts/channel.hpp"

namespace potts {

namespace {

// Dense phase-1 simplex with Bland's rule. Decides feasibility of
//   A x = rhs, x >= 0, rhs >= 0
// by minimizing the sum of artificial variables. Returns the attained
// minimum (0 within tolerance means feasible).
double phase1_feasible(const std::vector<std::vector<double>>& a,
                       std::vector<double> rhs) {
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  constexpr double kPivTol = 1e-11;

  // tableau: structural columns | rhs; artificials tracked through `basis`
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) t[r][c] = a[r][c];
    t[r][cols] = rhs[r];
  }
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) basis[r] = cols + r;  // artificial r

  // reduced costs for phase 1: d_j = -sum_r t[r][j] while artificial r basic
  std::vector<double> d(cols, 0.0);
  double obj = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) d[c] -= t[r][c];
    obj += t[r][cols];
  }

  for (int iter = 0;; ++iter) {
    if (iter > 200000) break;  // Bland guarantees termination well before this
    int enter = -1;
    for (int c = 0; c < cols; ++c) {
      if (d[c] < -kPivTol) {
        enter = c;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < rows; ++r) {
      if (t[r][enter] > kPivTol) {
        double ratio = t[r][cols] / t[r][enter];
        if (leave < 0 || ratio < best_ratio - kPivTol ||
            (ratio < best_ratio + kPivTol && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded cannot happen in phase 1

    // pivot
    double piv = t[leave][enter];
    for (int c = 0; c <= cols; ++c) t[leave][c] /= piv;
    for (int r = 0; r < rows; ++r) {
      if (r == leave) continue;
      double f = t[r][enter];
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) t[r][c] -= f * t[leave][c];
    }
    double fd = d[enter];
    for (int c = 0; c < cols; ++c) d[c] -= fd * t[leave][c];
    obj += fd * t[leave][cols];
    basis[leave] = enter;
  }
  return obj;
}

}  // namespace

DegradationVerdict degrades_exact(const Channel& p, const Channel& q) {
  if (p.q() != q.q()) throw std::invalid_argument("degrades_exact: q mismatch");
  const int m = p.atom_count(), n = q.atom_count(), Q = p.q();
  if (static_cast<int64_t>(m) * n > 400) return DegradationVerdict::kBudgetExceeded;

  // prefix sums of the canonical atoms
  auto prefixes = [&](const Channel& ch) {
    std::vector<double> s(static_cast<size_t>(ch.atom_count()) * (Q - 1));
    for (int a = 0; a < ch.atom_count(); ++a) {
      auto pt = ch.point(a);
      double acc = 0.0;
      for (int k = 0; k < Q - 1; ++k) {
        acc += pt[k];
        s[static_cast<size_t>(a) * (Q - 1) + k] = acc;
      }
    }
    return s;
  };
  std::vector<double> sp = prefixes(p), sq = prefixes(q);

  // variables: coupling c_{ab} (m*n of them), then one surplus per inequality
  const int n_coup = m * n;
  const int n_ineq = m * (Q - 1);
  const int cols = n_coup + n_ineq;
  const int rows = m + n + n_ineq;
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  std::vector<double> rhs(rows, 0.0);

  // row marginals: sum_b c_ab = wP_a
  for (int i = 0; i < m; ++i) {
    for (int b = 0; b < n; ++b) a[i][i * n + b] = 1.0;
    rhs[i] = p.weight(i);
  }
  // column marginals: sum_a c_ab = wQ_b
  for (int b = 0; b < n; ++b) {
    for (int i = 0; i < m; ++i) a[m + b][i * n + b] = 1.0;
    rhs[m + b] = q.weight(b);
  }
  // majorization prefixes: sum_b c_ab SQ_bk - surplus = wP_a SP_ak
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < Q - 1; ++k) {
      int r = m + n + i * (Q - 1) + k;
      for (int b = 0; b < n; ++b)
        a[r][i * n + b] = sq[static_cast<size_t>(b) * (Q - 1) + k];
      a[r][n_coup + i * (Q - 1) + k] = -1.0;
      rhs[r] = p.weight(i) * sp[static_cast<size_t>(i) * (Q - 1) + k];
    }
  }

  double infeas = phase1_feasible(a, rhs);
  return infeas <= 1e-9 ? DegradationVerdict::kYes : DegradationVerdict::kNo;
}

}  // namespace potts
