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
#include <string>
#include <vector>

#include "potts/channel.hpp"

namespace potts {

// Low-SNR quadratic form: sum_i (1/pi_i + 1/(q pi_i^2)) v_i^2.
// pi entries are floored at 1e-9; v should live in the all-ones complement.
double f_low(const std::vector<double>& pi, const std::vector<double>& v);

// High-SNR quadratic form:
// (sum sqrt(pi)) * sum pi^{-3/2} v^2 - (sum pi^{-1/2} v)^2, nonnegative.
double f_high(const std::vector<double>& pi, const std::vector<double>& v);

enum class FormKind { kLow, kHigh };

// sup over v in the all-ones complement of
//   f(lambda*pi + (1-lambda)/q, v) / f(pi, v),
// computed exactly as the largest generalized eigenvalue of the two forms
// projected onto the complement (Cholesky whitening + Jacobi eigensolve).
double sup_over_v(const std::vector<double>& pi, double lambda, FormKind which);

struct ConstantEstimate {
  double value = 0.0;            // best value found by multistart ascent
  double cap = 0.0;              // certified upper bound (q^2 or q^(5/2))
  std::vector<double> arg_pi;    // maximizing point found
};

// Outer supremum over pi by deterministic multistart Nelder-Mead in an
// exponential parametrization; the returned value is a lower bound of the
// true constant, the cap field carries the proven upper bound.
ConstantEstimate c_low(int q, double lambda);
ConstantEstimate c_high(int q, double lambda);

// (2/q + (q-2)/q * (d lambda^2 - 1)/(d lambda - 1))^{-1}; q = 2 gives 1.
double c_small(int q, double lambda, double d);

enum class KsSide { kBelow, kAt, kAbove };

struct ThresholdVerdict {
  int q = 0;
  double lambda = 0.0;
  double d = 0.0;
  KsSide ks_side = KsSide::kBelow;
  double c_low_emp = 0.0;
  double c_high_emp = 0.0;
  double c_small_val = 1.0;       // NaN when d*lambda^2 <= 1
  bool low_ok_cert = false;       // via the q^2 cap
  bool low_ok_emp = false;        // via the optimizer value (lower bound)
  bool high_ok_cert = false;      // via the q^(5/2) cap
  bool high_ok_emp = false;
  std::optional<bool> w_high_ok_cert;  // with Z(W^R), when a survey is given
  std::optional<bool> w_high_ok_emp;
  bool closed_form_low = false;   // d lambda^2 < q^{-2}
  bool closed_form_high = false;  // d lambda^2 > 1 + 56 max(lambda, 1/q) log q
};

ThresholdVerdict classify(int q, double lambda, double d,
                          const std::optional<Channel>& survey = std::nullopt);

// Randomized search for the ratio of Lemma-style diagonal forms
//   <(lambda pi + (1-lambda)/q)^{-alpha}, v^2> / <pi^{-alpha}, v^2>;
// the returned maximum must stay below q^alpha (+1e-6 slack in tests).
double quad_ratio_bound_check(int q, double alpha, double lambda, int trials,
                              uint64_t seed = 1);

// One verdict per (lambda, d) grid point, evaluated in parallel with
// deterministic row order.
std::vector<ThresholdVerdict> phase_scan(int q, const std::vector<double>& lambda_grid,
                                         const std::vector<double>& d_grid);

std::string to_string(KsSide s);

}  // namespace potts
