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

#include "potts/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "potts/detail/jacobi.hpp"
#include "potts/rng.hpp"

namespace potts {

namespace {

using detail::jacobi_eigenvalues;

constexpr double kPiFloor = 1e-9;

std::vector<double> floored(std::vector<double> pi) {
  double s = 0.0;
  for (double& x : pi) {
    x = std::max(x, kPiFloor);
    s += x;
  }
  for (double& x : pi) x /= s;
  return pi;
}

std::vector<double> shifted(const std::vector<double>& pi, double lambda) {
  std::vector<double> s(pi.size());
  const double c = (1.0 - lambda) / pi.size();
  for (size_t i = 0; i < pi.size(); ++i) s[i] = lambda * pi[i] + c;
  return floored(std::move(s));
}

// largest generalized eigenvalue of (A, B) with B positive definite
double max_gen_eigenvalue(std::vector<double> a, std::vector<double> b, int n) {
  // in-place Cholesky b = L L^T (lower triangle)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = b[i * n + j];
      for (int k = 0; k < j; ++k) s -= b[i * n + k] * b[j * n + k];
      if (i == j) {
        if (s <= 1e-200) throw std::runtime_error("form numerically singular");
        b[i * n + i] = std::sqrt(s);
      } else {
        b[i * n + j] = s / b[j * n + j];
      }
    }
  }
  // whiten: M = L^{-1} A L^{-T}
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = a[i * n + col];
      for (int k = 0; k < i; ++k) s -= b[i * n + k] * a[k * n + col];
      a[i * n + col] = s / b[i * n + i];
    }
  }
  for (int row = 0; row < n; ++row) {
    for (int j = 0; j < n; ++j) {
      double s = a[row * n + j];
      for (int k = 0; k < j; ++k) s -= a[row * n + k] * b[j * n + k];
      a[row * n + j] = s / b[j * n + j];
    }
  }
  std::vector<double> eig;
  jacobi_eigenvalues(a, n, eig);
  return *std::max_element(eig.begin(), eig.end());
}

// Largest value of f(shifted, v)/f(pi, v) over v in the all-ones
// complement. Coordinates are rescaled by the denominator diagonal first:
// near the simplex boundary that diagonal spans ~16 orders of magnitude and
// whitening the raw projected form loses every significant digit.
double sup_ratio(const std::vector<double>& pi, const std::vector<double>& sh,
                 FormKind which) {
  const int q = static_cast<int>(pi.size());
  const int n = q - 1;

  std::vector<double> t_den(q), t_num(q), u_den, u_num;
  if (which == FormKind::kLow) {
    for (int i = 0; i < q; ++i) {
      t_den[i] = 1.0 / pi[i] + 1.0 / (q * pi[i] * pi[i]);
      t_num[i] = 1.0 / sh[i] + 1.0 / (q * sh[i] * sh[i]);
    }
  } else {
    double sq_den = 0.0, sq_num = 0.0;
    for (int i = 0; i < q; ++i) {
      sq_den += std::sqrt(pi[i]);
      sq_num += std::sqrt(sh[i]);
    }
    u_den.resize(q);
    u_num.resize(q);
    for (int i = 0; i < q; ++i) {
      t_den[i] = sq_den * std::pow(pi[i], -1.5);
      t_num[i] = sq_num * std::pow(sh[i], -1.5);
      u_den[i] = std::pow(pi[i], -0.5);
      u_num[i] = std::pow(sh[i], -0.5);
    }
  }

  // scaled coordinates w = sqrt(t_den) v turn the denominator diagonal into I
  std::vector<double> scale(q);
  for (int i = 0; i < q; ++i) scale[i] = 1.0 / std::sqrt(t_den[i]);

  // orthonormal basis of the scaled all-ones constraint via a Householder
  // reflection sending c = scale/|scale| onto the first axis
  std::vector<double> c(scale);
  double cn = 0.0;
  for (double x : c) cn += x * x;
  cn = std::sqrt(cn);
  for (double& x : c) x /= cn;
  std::vector<double> hh(c);
  hh[0] += c[0] >= 0 ? 1.0 : -1.0;
  double hn = 0.0;
  for (double x : hh) hn += x * x;
  // basis column j (j = 0..q-2) is column j+1 of Q = I - 2 hh hh^T / |hh|^2
  auto basis_entry = [&](int i, int j) {
    return (i == j + 1 ? 1.0 : 0.0) - 2.0 * hh[i] * hh[j + 1] / hn;
  };

  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < q; ++i)
        s += basis_entry(i, j) * t_num[i] * scale[i] * scale[i] * basis_entry(i, k);
      a[j * n + k] = s;
      a[k * n + j] = s;
    }
  }
  if (which == FormKind::kLow) {
    std::vector<double> eig;
    jacobi_eigenvalues(a, n, eig);
    return *std::max_element(eig.begin(), eig.end());
  }

  std::vector<double> wn(n, 0.0), wd(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < q; ++i) {
      wn[j] += basis_entry(i, j) * scale[i] * u_num[i];
      wd[j] += basis_entry(i, j) * scale[i] * u_den[i];
    }
  }
  std::vector<double> b(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      a[j * n + k] -= wn[j] * wn[k];
      b[j * n + k] = (j == k ? 1.0 : 0.0) - wd[j] * wd[k];
    }
  }
  return max_gen_eigenvalue(std::move(a), std::move(b), n);
}

std::vector<double> softmax(const std::vector<double>& x) {
  double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> p(x.size());
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    p[i] = std::exp(x[i] - mx);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return floored(std::move(p));
}

// compact Nelder-Mead maximizer with a fixed iteration budget
std::pair<double, std::vector<double>> nelder_mead_max(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, double scale, int iters) {
  const int n = static_cast<int>(x0.size());
  std::vector<std::vector<double>> xs(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (int i = 0; i < n; ++i) xs[i + 1][i] += scale;
  for (int i = 0; i <= n; ++i) fx[i] = f(xs[i]);

  auto order = [&]() {
    std::vector<int> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return fx[a] > fx[b]; });
    std::vector<std::vector<double>> xs2(n + 1);
    std::vector<double> fx2(n + 1);
    for (int i = 0; i <= n; ++i) {
      xs2[i] = xs[idx[i]];
      fx2[i] = fx[idx[i]];
    }
    xs = std::move(xs2);
    fx = std::move(fx2);
  };

  for (int it = 0; it < iters; ++it) {
    order();
    if (std::abs(fx[0] - fx[n]) < 1e-12 * (std::abs(fx[0]) + 1e-12)) break;
    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) centroid[k] += xs[i][k] / n;
    auto reflect = [&](double t) {
      std::vector<double> x(n);
      for (int k = 0; k < n; ++k) x[k] = centroid[k] + t * (centroid[k] - xs[n][k]);
      return x;
    };
    auto xr = reflect(1.0);
    double fr = f(xr);
    if (fr > fx[0]) {
      auto xe = reflect(2.0);
      double fe = f(xe);
      if (fe > fr) {
        xs[n] = std::move(xe);
        fx[n] = fe;
      } else {
        xs[n] = std::move(xr);
        fx[n] = fr;
      }
    } else if (fr > fx[n - 1]) {
      xs[n] = std::move(xr);
      fx[n] = fr;
    } else {
      auto xc = reflect(-0.5);
      double fc = f(xc);
      if (fc > fx[n]) {
        xs[n] = std::move(xc);
        fx[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < n; ++k) xs[i][k] = 0.5 * (xs[i][k] + xs[0][k]);
          fx[i] = f(xs[i]);
        }
      }
    }
  }
  order();
  return {fx[0], xs[0]};
}

ConstantEstimate sup_over_pi(int q, double lambda, FormKind which) {
  auto objective = [&](const std::vector<double>& x) {
    auto pi = softmax(x);
    try {
      return sup_over_v(pi, lambda, which);
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts;
  starts.emplace_back(q, 0.0);  // uniform
  for (double a : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
    std::vector<double> x(q, std::log(1e-6));
    x[0] = std::log(a);
    x[1] = std::log(1.0 - a);
    starts.push_back(std::move(x));
  }
  Rng rng(mix_seed(0xc0de, static_cast<uint64_t>(q) * 1000003 +
                               static_cast<uint64_t>((lambda + 2.0) * 1e6) +
                               (which == FormKind::kLow ? 0 : 1)));
  for (int r = 0; r < 64; ++r) {
    std::vector<double> x(q);
    for (double& v : x) v = 2.0 * rng.next_gaussian();
    starts.push_back(std::move(x));
  }

  ConstantEstimate best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& x0 : starts) {
    auto [val, arg] = nelder_mead_max(objective, x0, 0.5, 60 * q);
    if (val > best.value) {
      best.value = val;
      best.arg_pi = softmax(arg);
    }
  }
  best.cap = which == FormKind::kLow ? static_cast<double>(q) * q
                                     : std::pow(static_cast<double>(q), 2.5);
  return best;
}

}  // namespace

double f_low(const std::vector<double>& pi, const std::vector<double>& v) {
  auto p = floored(pi);
  const int q = static_cast<int>(p.size());
  double s = 0.0;
  for (int i = 0; i < q; ++i) s += (1.0 / p[i] + 1.0 / (q * p[i] * p[i])) * v[i] * v[i];
  return s;
}

double f_high(const std::vector<double>& pi, const std::vector<double>& v) {
  auto p = floored(pi);
  const int q = static_cast<int>(p.size());
  double sq = 0.0, quad = 0.0, cross = 0.0;
  for (int i = 0; i < q; ++i) {
    sq += std::sqrt(p[i]);
    quad += std::pow(p[i], -1.5) * v[i] * v[i];
    cross += std::pow(p[i], -0.5) * v[i];
  }
  return sq * quad - cross * cross;
}

double sup_over_v(const std::vector<double>& pi, double lambda, FormKind which) {
  auto p = floored(pi);
  if (p.size() < 2) throw std::invalid_argument("sup_over_v: q must be >= 2");
  return sup_ratio(p, shifted(p, lambda), which);
}

ConstantEstimate c_low(int q, double lambda) {
  return sup_over_pi(q, lambda, FormKind::kLow);
}

ConstantEstimate c_high(int q, double lambda) {
  return sup_over_pi(q, lambda, FormKind::kHigh);
}

double c_small(int q, double lambda, double d) {
  if (q == 2) return 1.0;
  double dl = d * lambda;
  if (std::abs(dl - 1.0) < 1e-12)
    throw std::invalid_argument("c_small: pole at d*lambda = 1");
  double u = (d * lambda * lambda - 1.0) / (dl - 1.0);
  return 1.0 / (2.0 / q + (q - 2.0) / q * u);
}

ThresholdVerdict classify(int q, double lambda, double d,
                          const std::optional<Channel>& survey) {
  ThresholdVerdict v;
  v.q = q;
  v.lambda = lambda;
  v.d = d;
  const double dl2 = d * lambda * lambda;
  v.ks_side = std::abs(dl2 - 1.0) <= 1e-12 ? KsSide::kAt
              : dl2 < 1.0                  ? KsSide::kBelow
                                           : KsSide::kAbove;
  auto cl = c_low(q, lambda);
  auto ch = c_high(q, lambda);
  v.c_low_emp = cl.value;
  v.c_high_emp = ch.value;
  v.low_ok_cert = dl2 * cl.cap < 1.0;
  v.low_ok_emp = dl2 * cl.value < 1.0;
  v.c_small_val = std::numeric_limits<double>::quiet_NaN();
  if (v.ks_side == KsSide::kAbove) {
    v.c_small_val = c_small(q, lambda, d);
    double damping = std::exp(-v.c_small_val * (dl2 - 1.0) / 2.0);
    v.high_ok_cert = dl2 * damping * ch.cap < 1.0;
    v.high_ok_emp = dl2 * damping * ch.value < 1.0;
    if (survey) {
      double z = bhattacharyya(restrict_binary(*survey));
      v.w_high_ok_cert = dl2 * damping * ch.cap * z < 1.0;
      v.w_high_ok_emp = dl2 * damping * ch.value * z < 1.0;
    }
  } else if (survey) {
    v.w_high_ok_cert = false;
    v.w_high_ok_emp = false;
  }
  v.closed_form_low = dl2 < 1.0 / (static_cast<double>(q) * q);
  v.closed_form_high =
      dl2 > 1.0 + 56.0 * std::max(lambda, 1.0 / q) * std::log(static_cast<double>(q));
  return v;
}

double quad_ratio_bound_check(int q, double alpha, double lambda, int trials,
                              uint64_t seed) {
  Rng rng(mix_seed(seed, 0xa1fa));
  double best = 0.0;
  std::vector<double> pi(q), v(q);
  for (int t = 0; t < trials; ++t) {
    if (t % 5 == 4) {
      // structured samples: heavy two-point masses probe the boundary
      double a = 0.5 + 0.4999 * rng.next_unit();
      for (double& x : pi) x = 0.0;
      pi[0] = a;
      pi[1] = 1.0 - a;
    } else {
      double s = 0.0;
      for (double& x : pi) {
        x = -std::log(rng.next_unit() + 1e-300);
        s += x;
      }
      for (double& x : pi) x /= s;
    }
    pi = floored(std::move(pi));
    double mean = 0.0;
    for (double& x : v) {
      x = rng.next_gaussian();
      mean += x / q;
    }
    for (double& x : v) x -= mean;

    double num = 0.0, den = 0.0;
    const double c = (1.0 - lambda) / q;
    for (int i = 0; i < q; ++i) {
      double si = std::max(lambda * pi[i] + c, kPiFloor);
      num += std::pow(si, -alpha) * v[i] * v[i];
      den += std::pow(pi[i], -alpha) * v[i] * v[i];
    }
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

std::vector<ThresholdVerdict> phase_scan(int q, const std::vector<double>& lambda_grid,
                                         const std::vector<double>& d_grid) {
  if (lambda_grid.empty() || d_grid.empty())
    throw std::invalid_argument("phase_scan: empty grid");
  const int nl = static_cast<int>(lambda_grid.size());
  const int nd = static_cast<int>(d_grid.size());
  std::vector<ThresholdVerdict> rows(static_cast<size_t>(nl) * nd);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nl * nd; ++i) {
    rows[i] = classify(q, lambda_grid[i / nd], d_grid[i % nd]);
  }
  return rows;
}

std::string to_string(KsSide s) {
  switch (s) {
    case KsSide::kBelow: return "below";
    case KsSide::kAt: return "at";
    case KsSide::kAbove: return "above";
  }
  return "?";
}

}  // namespace potts
