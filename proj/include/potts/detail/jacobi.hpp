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

#include <cmath>
#include <vector>

namespace potts::detail {

// cyclic Jacobi sweeps on a symmetric n x n matrix (row-major, destroyed);
// eigenvalues land on the diagonal
inline void jacobi_eigenvalues(std::vector<double>& a, int n,
                               std::vector<double>& eig) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, scale = 0.0;
    for (int p = 0; p < n; ++p) {
      scale += a[p * n + p] * a[p * n + p];
      for (int r = p + 1; r < n; ++r) off += a[p * n + r] * a[p * n + r];
    }
    if (off <= 1e-30 * std::max(scale, 1e-300)) break;
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        double apr = a[p * n + r];
        if (std::abs(apr) < 1e-300) continue;
        double theta = (a[r * n + r] - a[p * n + p]) / (2.0 * apr);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k * n + p], akr = a[k * n + r];
          a[k * n + p] = c * akp - s * akr;
          a[k * n + r] = s * akp + c * akr;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p * n + k], ark = a[r * n + k];
          a[p * n + k] = c * apk - s * ark;
          a[r * n + k] = s * apk + c * ark;
        }
      }
    }
  }
  eig.resize(n);
  for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
}

}  // namespace potts::detail
