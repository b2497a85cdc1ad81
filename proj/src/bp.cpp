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

#include "potts/bp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "potts/rng.hpp"

namespace potts {

std::vector<double> OffspringDist::pmf() const {
  if (kind == Kind::kRegular) {
    std::vector<double> p(static_cast<size_t>(d) + 1, 0.0);
    p[static_cast<size_t>(d)] = 1.0;
    return p;
  }
  // Poisson truncated once the remaining tail mass drops below 1e-12.
  std::vector<double> p;
  double term = std::exp(-d);
  double cum = term;
  p.push_back(term);
  for (int b = 1; b < 4096; ++b) {
    term *= d / b;
    p.push_back(term);
    cum += term;
    if (1.0 - cum < 1e-12 && b > d) break;
  }
  for (double& x : p) x /= cum;
  return p;
}

OffspringDist OffspringDist::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("offspring: want kind:d");
  std::string head = text.substr(0, colon);
  double val = std::stod(text.substr(colon + 1));
  if (head == "regular") return regular(static_cast<int>(val));
  if (head == "poisson") return poisson(val);
  throw std::invalid_argument("offspring: unknown kind " + head);
}

std::string OffspringDist::to_string() const {
  std::ostringstream os;
  if (kind == Kind::kRegular)
    os << "regular:" << static_cast<int>(d);
  else
    os << "poisson:" << d;
  return os.str();
}

Channel bp_mix(const Channel& m, const BpParams& p, int iteration) {
  if (m.q() != p.potts.q) throw std::invalid_argument("bp_mix: q mismatch");
  const uint64_t seed = mix_seed(p.seed, 0xb9 + static_cast<uint64_t>(iteration));
  const Channel base = compose_potts(m, p.potts.lambda);
  const std::vector<double> pmf = p.offspring.pmf();

  // Mixture over offspring counts: concatenate pmf-scaled star powers. A
  // vertex with no children reveals nothing, so the b = 0 term is the
  // trivial channel (the star-convolution identity).
  std::vector<double> w_mix;
  std::vector<double> pts_mix;
  Channel power = make_channel(ChannelSpec::trivial(), m.q());
  for (size_t b = 0; b < pmf.size(); ++b) {
    if (b == 1) power = base;
    if (b >= 2) power = star_fit(power, base, p.star_budget, p.cap,
                                 mix_seed(seed, b));
    if (pmf[b] <= 0.0) continue;
    for (int a = 0; a < power.atom_count(); ++a) {
      w_mix.push_back(pmf[b] * power.weight(a));
      auto pt = power.point(a);
      pts_mix.insert(pts_mix.end(), pt.begin(), pt.end());
    }
  }
  return merge_population(m.q(), w_mix, pts_mix, p.cap);
}

Channel bp_step(const Channel& m, const BpParams& p, int iteration) {
  const uint64_t seed = mix_seed(p.seed, 0xb9 + static_cast<uint64_t>(iteration));
  Channel mixed = bp_mix(m, p, iteration);
  if (p.survey) mixed = star_fit(mixed, *p.survey, p.star_budget, p.cap,
                                 mix_seed(seed, 0x5e));
  if (mixed.atom_count() > p.cap)
    mixed = resample(mixed, p.cap, mix_seed(seed, 0xf1));
  return mixed;
}

namespace {

BpTraceRow trace_row(const Channel& m) {
  BpTraceRow row;
  row.m = measures(m);
  row.phi_low = row.m.skl;
  row.phi_high = bhattacharyya(restrict_binary(m));
  row.atom_count = m.atom_count();
  return row;
}

}  // namespace

BpTrace iterate(const Channel& m0, const BpParams& p, int k_max, double tol) {
  if (k_max < 1) throw std::invalid_argument("iterate: k_max must be >= 1");
  BpTrace trace;
  Channel m = m0;
  trace.rows.push_back(trace_row(m));
  for (int k = 1; k <= k_max; ++k) {
    m = bp_step(m, p, k);
    trace.rows.push_back(trace_row(m));
    const auto& prev = trace.rows[trace.rows.size() - 2].m;
    const auto& cur = trace.rows.back().m;
    double delta = std::abs(cur.pe - prev.pe) + std::abs(cur.capacity - prev.capacity) +
                   std::abs(cur.chi2 - prev.chi2);
    if (delta < tol) {
      trace.converged = true;
      break;
    }
  }
  trace.last = m;
  return trace;
}

std::vector<PhiGap> phi_gap_trace(const Channel& m0, const Channel& mtilde0,
                                  const BpParams& p, int k_max) {
  if (!degrades_necessary(mtilde0, m0))
    std::fprintf(stderr,
                 "phi_gap_trace: initial channels are not degradation-ordered; "
                 "gaps may be negative\n");
  std::vector<PhiGap> gaps;
  Channel m = m0, mt = mtilde0;

  auto skl_gap = [](const Channel& a, const Channel& b) {
    Measures ma = measures(a), mb = measures(b);
    if (ma.skl_saturated || mb.skl_saturated)
      return std::numeric_limits<double>::quiet_NaN();
    return ma.skl - mb.skl;
  };

  // k = 0: the raw initial channels
  {
    PhiGap g;
    g.gap_low = skl_gap(m, mt);
    g.gap_high =
        bhattacharyya(restrict_binary(mt)) - bhattacharyya(restrict_binary(m));
    gaps.push_back(g);
  }

  for (int k = 1; k <= k_max; ++k) {
    const uint64_t seed = mix_seed(p.seed, 0xb9 + static_cast<uint64_t>(k));
    Channel mix_m = bp_mix(m, p, k);
    Channel mix_t = bp_mix(mt, p, k);
    PhiGap g;
    // survey contribution to Phi^L cancels between the chains (additivity);
    // evaluating before the survey convolution keeps both sides finite
    g.gap_low = skl_gap(mix_m, mix_t);
    auto finish = [&](Channel mix) {
      if (p.survey)
        mix = star_fit(mix, *p.survey, p.star_budget, p.cap, mix_seed(seed, 0x5e));
      if (mix.atom_count() > p.cap)
        mix = resample(mix, p.cap, mix_seed(seed, 0xf1));
      return mix;
    };
    m = finish(std::move(mix_m));
    mt = finish(std::move(mix_t));
    g.gap_high =
        bhattacharyya(restrict_binary(mt)) - bhattacharyya(restrict_binary(m));
    gaps.push_back(g);
  }
  return gaps;
}

ContractionCheck check_chi2_contraction(const Channel& p, double lambda) {
  ContractionCheck c;
  c.lhs = measures(compose_potts(p, lambda)).chi2;
  c.rhs = lambda * lambda * measures(p).chi2;
  c.ok = c.lhs <= c.rhs + 1e-10;
  return c;
}

SubadditivityCheck check_subadditivity(const Channel& p, const Channel& q) {
  SubadditivityCheck s;
  // exact expansion: no resampling allowed here, oversized inputs error out
  s.lhs = measures(star(p, q, uint64_t(1) << 22)).chi2;
  s.sum = measures(p).chi2 + measures(q).chi2;
  s.ratio = s.sum == 0.0 ? 1.0 : s.lhs / s.sum;
  return s;
}

std::vector<RobustProbeRow> robust_reconstruction_probe(
    int q, double lambda, const OffspringDist& offspring,
    const std::vector<double>& survey_etas, int k_max, const ChannelSpec& init,
    int cap, uint64_t seed, uint64_t star_budget) {
  std::vector<RobustProbeRow> rows;
  for (double eta : survey_etas) {
    BpParams params(PottsParams(q, lambda), offspring);
    params.cap = cap;
    params.seed = seed;
    params.star_budget = star_budget;
    params.survey = make_channel(ChannelSpec::potts(eta), q);
    Channel m = make_channel(init, q);
    RobustProbeRow row;
    row.eta = eta;
    for (int k = 1; k <= k_max; ++k) {
      m = bp_step(m, params, k);
      double c = measures(m).chi2;
      row.chi2_trace.push_back(c);
      row.sup_chi2 = std::max(row.sup_chi2, c);
      row.final_chi2 = c;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace potts
