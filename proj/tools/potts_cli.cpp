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

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "potts/bp.hpp"
#include "potts/constants.hpp"
#include "potts/io.hpp"
#include "potts/sbm.hpp"
#include "potts/treesim.hpp"

namespace {

using namespace potts;
using nlohmann::json;

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step" inclusive, or a comma-separated list
  if (text.find(':') == std::string::npos) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  }
  double lo, hi, step;
  char c1, c2;
  std::istringstream is(text);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
    throw CLI::ValidationError("grid", "want lo:hi:step with step > 0");
  std::vector<double> out;
  int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
  return out;
}

std::optional<Channel> parse_channel(const std::string& spec, int q) {
  if (spec.empty() || spec == "none") return std::nullopt;
  return make_channel(ChannelSpec::parse(spec), q);
}

json mean_se_json(const MeanSe& m) { return {{"mean", m.mean}, {"se", m.se}}; }

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

struct CommonOpts {
  int q = 2;
  double lambda = 0.5;
  std::string offspring = "regular:2";
  int cap = 100000;
  uint64_t seed = 1;
  uint64_t star_budget = kDefaultStarBudget;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_lambda = true) {
  cmd->add_option("--q", o.q, "number of colors")->required();
  if (with_lambda)
    cmd->add_option("--lambda", o.lambda, "edge correlation in [-1/(q-1), 1]")
        ->required();
  cmd->add_option("--offspring", o.offspring, "regular:<d> or poisson:<d>");
  cmd->add_option("--cap", o.cap, "population cap");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--star-budget", o.star_budget,
                  "max raw products per star expansion");
}

int cmd_evolve(const CommonOpts& o, const std::string& init,
               const std::string& survey, int k, double tol,
               const std::string& out) {
  BpParams params(PottsParams(o.q, o.lambda), OffspringDist::parse(o.offspring));
  params.cap = o.cap;
  params.seed = o.seed;
  params.star_budget = o.star_budget;
  params.survey = parse_channel(survey, o.q);
  auto m0 = make_channel(ChannelSpec::parse(init), o.q);
  auto trace = iterate(m0, params, k, tol);
  std::map<std::string, std::string> cfg = {
      {"command", "evolve"},          {"q", std::to_string(o.q)},
      {"lambda", format_double(o.lambda)}, {"offspring", o.offspring},
      {"init", init},                 {"survey", survey},
      {"k", std::to_string(k)},       {"cap", std::to_string(o.cap)},
      {"seed", std::to_string(o.seed)},
      {"star_budget", std::to_string(o.star_budget)},
      {"tol", format_double(tol)},
      {"converged", trace.converged ? "1" : "0"}};
  write_trace_csv(out, trace, cfg);
  std::cout << "wrote " << out << " (" << trace.rows.size() << " rows, "
            << (trace.converged ? "converged" : "k_max reached") << ")\n";
  return 0;
}

int cmd_phase(int q, const std::string& lambda_grid, const std::string& d_grid,
              const std::string& out) {
  auto rows = phase_scan(q, parse_grid(lambda_grid), parse_grid(d_grid));
  write_phase_csv(out, rows, {{"command", "phase"},
                              {"q", std::to_string(q)},
                              {"lambda_grid", lambda_grid},
                              {"d_grid", d_grid}});
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_constants(int q, const std::string& lambda_grid, const std::string& out) {
  auto grid = parse_grid(lambda_grid);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << config_header({{"command", "constants"},
                       {"q", std::to_string(q)},
                       {"lambda_grid", lambda_grid}});
  os << "q,lambda,cL,cL_cap,cH,cH_cap\n";
  std::vector<std::pair<ConstantEstimate, ConstantEstimate>> rows(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(grid.size()); ++i)
    rows[i] = {c_low(q, grid[i]), c_high(q, grid[i])};
  for (size_t i = 0; i < grid.size(); ++i) {
    os << q << ',' << format_double(grid[i]) << ','
       << format_double(rows[i].first.value) << ','
       << format_double(rows[i].first.cap) << ','
       << format_double(rows[i].second.value) << ','
       << format_double(rows[i].second.cap) << "\n";
  }
  std::cout << "wrote " << out << " (" << grid.size() << " rows)\n";
  return 0;
}

int cmd_mi_integral(int q, double a, double b, const std::string& eps_grid,
                    int k, int cap, uint64_t seed, uint64_t budget,
                    const std::string& out) {
  const double d = (a + (q - 1) * b) / q;
  const double lambda = (a - b) / (a + (q - 1) * b);
  auto grid = parse_grid(eps_grid);
  auto verdict = classify(q, lambda, d);
  const bool certified = verdict.low_ok_cert || verdict.high_ok_cert;

  std::vector<double> integrand(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    BpParams params(PottsParams(q, lambda), OffspringDist::poisson(d));
    params.cap = cap;
    params.seed = mix_seed(seed, i);
    params.star_budget = budget;
    params.survey = make_channel(ChannelSpec::erasure(grid[i]), q);
    auto trace = iterate(make_channel(ChannelSpec::trivial(), q), params, k);
    // the root itself is unobserved: report the capacity of the offspring
    // mixture without the final survey convolution
    integrand[i] = measures(bp_mix(trace.last, params, k + 1)).capacity;
  }
  double integral = 0.0;
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    integral += 0.5 * (integrand[i] + integrand[i + 1]) * (grid[i + 1] - grid[i]);

  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << config_header({{"command", "mi-integral"},
                       {"q", std::to_string(q)},
                       {"a", format_double(a)},
                       {"b", format_double(b)},
                       {"d", format_double(d)},
                       {"lambda", format_double(lambda)},
                       {"eps_grid", eps_grid},
                       {"k", std::to_string(k)},
                       {"cap", std::to_string(cap)},
                       {"seed", std::to_string(seed)},
                       {"certified", certified ? "1" : "0"}});
  if (!certified)
    os << "# warning=formula not certified at these parameters\n";
  os << "eps,integrand\n";
  for (size_t i = 0; i < grid.size(); ++i)
    os << format_double(grid[i]) << ',' << format_double(integrand[i]) << "\n";
  os << "# integral=" << format_double(integral) << "\n";
  std::cout << "integral " << format_double(integral)
            << (certified ? "" : " (formula not certified at these parameters)")
            << "\n";
  return 0;
}

int cmd_treesim_estimate(const CommonOpts& o, const std::string& leaf,
                         const std::string& survey, int k, int trials,
                         const std::string& out) {
  Scenario sc;
  sc.leaf = parse_channel(leaf, o.q);
  sc.survey = parse_channel(survey, o.q);
  auto off = OffspringDist::parse(o.offspring);
  auto r = estimate(sc, o.q, o.lambda, off, k, trials, o.seed);
  json j = {{"command", "treesim-estimate"},
            {"version", version()},
            {"scenario", {{"leaf", leaf}, {"survey", survey}}},
            {"q", o.q},
            {"lambda", o.lambda},
            {"offspring", o.offspring},
            {"k", k},
            {"trials", trials},
            {"seed", o.seed},
            {"I", mean_se_json(r.info)},
            {"Pe", mean_se_json(r.pe)},
            {"chi2", mean_se_json(r.chi2)}};
  write_json(out, j);
  std::cout << "Pe " << r.pe.mean << " +- " << r.pe.se << ", I " << r.info.mean
            << " +- " << r.info.se << "\n";
  return 0;
}

int cmd_treesim_majority(const CommonOpts& o, double eta, int k, int trials,
                         const std::string& out) {
  auto off = OffspringDist::parse(o.offspring);
  auto emp = majority_stats(o.q, o.lambda, off, eta, k, trials, o.seed);
  auto pred = variance_recursion(o.q, o.lambda, off.mean(), eta, k, off.is_regular());
  json j = {{"command", "treesim-majority"},
            {"version", version()},
            {"q", o.q},
            {"lambda", o.lambda},
            {"offspring", o.offspring},
            {"eta", eta},
            {"k", k},
            {"trials", trials},
            {"seed", o.seed},
            {"empirical",
             {{"mean_plus", mean_se_json(emp.mean_plus)},
              {"var_plus", mean_se_json(emp.var_plus)},
              {"var_minus", mean_se_json(emp.var_minus)},
              {"var_zero", o.q >= 3 ? mean_se_json(emp.var_zero) : json()}}},
            {"predicted",
             {{"mean_plus", pred.mean_plus},
              {"var_plus", pred.var_plus},
              {"var_zero", pred.var_zero},
              {"var_plus_closed", pred.var_plus_closed},
              {"chi2_ratio", pred.chi2_ratio},
              {"chi2_limit", pred.chi2_limit}}}};
  write_json(out, j);
  std::cout << "var_plus empirical " << emp.var_plus.mean << " predicted "
            << pred.var_plus << "\n";
  return 0;
}

int cmd_sbm_generate(int n, int q, double a, double b, uint64_t seed,
                     const std::string& graph_out, const std::string& labels_out) {
  auto g = generate_sbm(n, q, a, b, seed);
  save_sbm(graph_out, labels_out, g);
  std::cout << "wrote " << graph_out << " (" << g.edges.size() << " edges) and "
            << labels_out << "\n";
  return 0;
}

// density-evolution accuracy limit 1 - lim_k P_e for the matching tree model
double tree_prediction(int q, double lambda, double d,
                       const std::optional<Channel>& survey, int cap,
                       uint64_t budget, uint64_t seed, int k_max = 40) {
  BpParams params(PottsParams(q, lambda), OffspringDist::poisson(d));
  params.cap = cap;
  params.seed = seed;
  params.star_budget = budget;
  params.survey = survey;
  auto trace = iterate(make_channel(ChannelSpec::identity(), q), params, k_max);
  return 1.0 - trace.rows.back().m.pe;
}

int cmd_sbm_recover_side(int n, int q, double a, double b,
                         const std::string& survey, uint64_t seed, int rounds,
                         int cap, uint64_t budget, const std::string& out) {
  auto g = generate_sbm(n, q, a, b, seed);
  Csr adj(g);
  auto w = parse_channel(survey, q);
  if (!w) throw CLI::ValidationError("--survey", "side channel required");
  auto side = sample_side_info(g, *w, mix_seed(seed, 1));
  auto xhat = bp_side_info(g, adj, side, g.edge_lambda(), rounds);
  double acc = accuracy(g.labels, xhat, q);
  double pred = tree_prediction(q, g.edge_lambda(), g.mean_degree(), w, cap,
                                budget, mix_seed(seed, 2));
  json j = {{"command", "sbm-recover-side"},
            {"version", version()},
            {"params",
             {{"n", n}, {"q", q}, {"a", a}, {"b", b}, {"survey", survey},
              {"seed", seed}, {"rounds", rounds < 0 ? default_bp_rounds(n) : rounds}}},
            {"accuracy", acc},
            {"stderr", std::sqrt(acc * (1.0 - acc) / n)},
            {"tree_prediction", pred}};
  write_json(out, j);
  std::cout << "accuracy " << acc << ", tree prediction " << pred << "\n";
  return 0;
}

int cmd_sbm_recover_vanilla(int n, int q, double a, double b, double init_eta,
                            int sample, int rounds, bool reuse, uint64_t seed,
                            int cap, uint64_t budget, const std::string& out) {
  auto g = generate_sbm(n, q, a, b, seed);
  Csr adj(g);
  auto f = potts_matrix(PottsParams(q, init_eta));
  if (!valid_initializer_matrix(f, q))
    throw CLI::ValidationError("--init-eta", "initializer matrix is singular");
  Initializer init = [&](const std::vector<uint8_t>& active, uint64_t s) {
    Rng r(s);
    return oracle_initializer(g.labels, f, active, r);
  };
  VanillaConfig cfg;
  cfg.sample_size = sample;
  cfg.rounds = rounds;
  cfg.reuse_global_init = reuse;
  cfg.seed = mix_seed(seed, 3);
  auto res = bp_vanilla(g, adj, init, g.edge_lambda(), a >= b ? 1 : -1, cfg);

  std::vector<int8_t> truth, got;
  for (size_t i = 0; i < res.vertices.size(); ++i) {
    if (res.assigned[i] < 0) continue;
    truth.push_back(g.labels[res.vertices[i]]);
    got.push_back(res.assigned[i]);
  }
  double acc = truth.empty() ? 0.0 : accuracy(truth, got, q);
  double pred = tree_prediction(q, g.edge_lambda(), g.mean_degree(), std::nullopt,
                                cap, budget, mix_seed(seed, 4));
  json j = {{"command", "sbm-recover-vanilla"},
            {"version", version()},
            {"params",
             {{"n", n}, {"q", q}, {"a", a}, {"b", b}, {"init_eta", init_eta},
              {"sample", sample}, {"seed", seed},
              {"rounds", rounds < 0 ? default_bp_rounds(n) : rounds},
              {"reused_global_init", res.reused_global_init}}},
            {"evaluated", static_cast<int>(truth.size())},
            {"anchor_failures", res.anchor_failures},
            {"alignment_failures", res.alignment_failures},
            {"accuracy", acc},
            {"stderr", truth.empty()
                           ? 1.0
                           : std::sqrt(acc * (1.0 - acc) / truth.size())},
            {"tree_prediction", pred}};
  if (res.reused_global_init)
    j["note"] = "global initializer labels reused across vertices; "
                "per-ball independence is approximate";
  write_json(out, j);
  std::cout << "accuracy " << acc << " on " << truth.size()
            << " vertices, tree prediction " << pred << "\n";
  return 0;
}

int cmd_channel(const std::string& spec, int q, const std::string& out,
                const std::string& in) {
  Channel c = in.empty() ? make_channel(ChannelSpec::parse(spec), q)
                         : load_channel(in);
  if (!out.empty()) save_channel(out, c);
  auto m = measures(c);
  std::cout << "q=" << c.q() << " atoms=" << c.atom_count() << " Pe=" << m.pe
            << " C=" << m.capacity << " chi2=" << m.chi2
            << " Z(R)=" << bhattacharyya(restrict_binary(c)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density evolution and simulation for the q-ary Potts "
               "broadcasting model and the stochastic block model"};
  app.require_subcommand(1);
  // flat key=value lines, qualified by the command name: "evolve.q=3"
  app.set_config("--config", "",
                 "flat command.key=value config file; flags override");
  app.set_version_flag("--version", std::string(potts::version()));

  CommonOpts evo;
  std::string evo_init = "identity", evo_survey, evo_out = "trace.csv";
  int evo_k = 20;
  double evo_tol = 1e-7;
  auto* evolve = app.add_subcommand("evolve", "run the BP density evolution");
  add_common(evolve, evo);
  evolve->add_option("--init", evo_init, "initial channel spec");
  evolve->add_option("--survey", evo_survey, "survey channel spec");
  evolve->add_option("--k", evo_k, "max iterations");
  evolve->add_option("--tol", evo_tol, "early-stop tolerance");
  evolve->add_option("--out", evo_out, "trace CSV path");

  int ph_q = 3;
  std::string ph_lgrid = "0:1:0.1", ph_dgrid = "1:10:1", ph_out = "phase.csv";
  auto* phase = app.add_subcommand("phase", "threshold verdicts on a grid");
  phase->add_option("--q", ph_q)->required();
  phase->add_option("--lambda-grid", ph_lgrid, "lo:hi:step or comma list");
  phase->add_option("--d-grid", ph_dgrid, "lo:hi:step or comma list");
  phase->add_option("--out", ph_out);

  int co_q = 3;
  std::string co_grid = "0:1:0.05", co_out = "constants.csv";
  auto* consts = app.add_subcommand("constants", "contraction constants over lambda");
  consts->add_option("--q", co_q)->required();
  consts->add_option("--lambda-grid", co_grid);
  consts->add_option("--out", co_out);

  int mi_q = 3, mi_k = 30, mi_cap = 50000;
  double mi_a = 5.6, mi_b = 1.4;
  uint64_t mi_seed = 1, mi_budget = potts::kDefaultStarBudget;
  std::string mi_grid = "0:1:0.1", mi_out = "mi.csv";
  auto* mi = app.add_subcommand("mi-integral",
                                "mutual-information integrand over erasure strength");
  mi->add_option("--q", mi_q)->required();
  mi->add_option("--a", mi_a)->required();
  mi->add_option("--b", mi_b)->required();
  mi->add_option("--eps-grid", mi_grid);
  mi->add_option("--k", mi_k);
  mi->add_option("--cap", mi_cap);
  mi->add_option("--seed", mi_seed);
  mi->add_option("--star-budget", mi_budget);
  mi->add_option("--out", mi_out);

  auto* treesim = app.add_subcommand("treesim", "Monte Carlo tree experiments");
  treesim->require_subcommand(1);
  CommonOpts tse;
  std::string tse_leaf, tse_survey, tse_out = "estimate.json";
  int tse_k = 3, tse_trials = 10000;
  auto* ts_est = treesim->add_subcommand("estimate", "posterior functionals at depth k");
  add_common(ts_est, tse);
  ts_est->add_option("--leaf", tse_leaf, "leaf observation channel");
  ts_est->add_option("--survey", tse_survey, "survey channel on all nodes");
  ts_est->add_option("--k", tse_k);
  ts_est->add_option("--trials", tse_trials);
  ts_est->add_option("--out", tse_out);

  CommonOpts tsm;
  double tsm_eta = 0.5, tsm_d = -1.0;
  int tsm_k = 4, tsm_trials = 100000;
  std::string tsm_kind = "regular", tsm_out = "majority.json";
  auto* ts_maj = treesim->add_subcommand("majority",
                                         "majority-statistic moments vs recursion");
  add_common(ts_maj, tsm);
  ts_maj->add_option("--d", tsm_d, "offspring mean; shorthand for --offspring");
  ts_maj->add_option("--kind", tsm_kind, "regular or poisson, used with --d");
  ts_maj->add_option("--eta", tsm_eta, "leaf potts noise");
  ts_maj->add_option("--k", tsm_k);
  ts_maj->add_option("--trials", tsm_trials);
  ts_maj->add_option("--out", tsm_out);

  auto* sbm = app.add_subcommand("sbm", "stochastic block model experiments");
  sbm->require_subcommand(1);
  int sg_n = 10000, sg_q = 2;
  double sg_a = 5.6, sg_b = 1.4;
  uint64_t sg_seed = 1;
  std::string sg_graph = "graph.txt", sg_labels = "labels.txt";
  auto* sbm_gen = sbm->add_subcommand("generate", "sample a graph and labels");
  sbm_gen->add_option("--n", sg_n)->required();
  sbm_gen->add_option("--q", sg_q)->required();
  sbm_gen->add_option("--a", sg_a)->required();
  sbm_gen->add_option("--b", sg_b)->required();
  sbm_gen->add_option("--seed", sg_seed);
  sbm_gen->add_option("--graph-out", sg_graph);
  sbm_gen->add_option("--labels-out", sg_labels);

  int rs_n = 30000, rs_q = 2, rs_rounds = -1, rs_cap = 50000;
  double rs_a = 5.6, rs_b = 1.4;
  uint64_t rs_seed = 1, rs_budget = potts::kDefaultStarBudget;
  std::string rs_survey = "erasure:0.7", rs_out = "recover_side.json";
  auto* sbm_side = sbm->add_subcommand("recover-side",
                                       "BP with side information vs tree prediction");
  sbm_side->add_option("--n", rs_n)->required();
  sbm_side->add_option("--q", rs_q)->required();
  sbm_side->add_option("--a", rs_a)->required();
  sbm_side->add_option("--b", rs_b)->required();
  sbm_side->add_option("--survey", rs_survey);
  sbm_side->add_option("--seed", rs_seed);
  sbm_side->add_option("--rounds", rs_rounds);
  sbm_side->add_option("--cap", rs_cap);
  sbm_side->add_option("--star-budget", rs_budget);
  sbm_side->add_option("--out", rs_out);

  int rv_n = 30000, rv_q = 2, rv_rounds = -1, rv_sample = 2000, rv_cap = 50000;
  double rv_a = 5.6, rv_b = 1.4, rv_eta = 0.4;
  bool rv_reuse = false;
  uint64_t rv_seed = 1, rv_budget = potts::kDefaultStarBudget;
  std::string rv_out = "recover_vanilla.json";
  auto* sbm_van = sbm->add_subcommand("recover-vanilla",
                                      "anchor-aligned BP vs tree prediction");
  sbm_van->add_option("--n", rv_n)->required();
  sbm_van->add_option("--q", rv_q)->required();
  sbm_van->add_option("--a", rv_a)->required();
  sbm_van->add_option("--b", rv_b)->required();
  sbm_van->add_option("--init-eta", rv_eta, "oracle initializer potts noise");
  sbm_van->add_option("--sample", rv_sample, "vertices to evaluate");
  sbm_van->add_option("--rounds", rv_rounds);
  sbm_van->add_flag("--reuse-init", rv_reuse,
                    "reuse one global initializer labeling (documented bias)");
  sbm_van->add_option("--seed", rv_seed);
  sbm_van->add_option("--cap", rv_cap);
  sbm_van->add_option("--star-budget", rv_budget);
  sbm_van->add_option("--out", rv_out);

  std::string ch_spec = "identity", ch_out, ch_in;
  int ch_q = 3;
  auto* chan = app.add_subcommand("channel", "build or inspect a channel file");
  chan->add_option("--spec", ch_spec);
  chan->add_option("--q", ch_q);
  chan->add_option("--out", ch_out, "save JSON here");
  chan->add_option("--in", ch_in, "load JSON instead of --spec");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (*evolve) return cmd_evolve(evo, evo_init, evo_survey, evo_k, evo_tol, evo_out);
    if (*phase) return cmd_phase(ph_q, ph_lgrid, ph_dgrid, ph_out);
    if (*consts) return cmd_constants(co_q, co_grid, co_out);
    if (*mi) return cmd_mi_integral(mi_q, mi_a, mi_b, mi_grid, mi_k, mi_cap,
                                    mi_seed, mi_budget, mi_out);
    if (*ts_est) return cmd_treesim_estimate(tse, tse_leaf, tse_survey, tse_k,
                                             tse_trials, tse_out);
    if (*ts_maj) {
      if (tsm_d >= 0) tsm.offspring = tsm_kind + ":" + format_double(tsm_d);
      return cmd_treesim_majority(tsm, tsm_eta, tsm_k, tsm_trials, tsm_out);
    }
    if (*sbm_gen) return cmd_sbm_generate(sg_n, sg_q, sg_a, sg_b, sg_seed,
                                          sg_graph, sg_labels);
    if (*sbm_side) return cmd_sbm_recover_side(rs_n, rs_q, rs_a, rs_b, rs_survey,
                                               rs_seed, rs_rounds, rs_cap,
                                               rs_budget, rs_out);
    if (*sbm_van) return cmd_sbm_recover_vanilla(rv_n, rv_q, rv_a, rv_b, rv_eta,
                                                 rv_sample, rv_rounds, rv_reuse,
                                                 rv_seed, rv_cap, rv_budget, rv_out);
    if (*chan) return cmd_channel(ch_spec, ch_q, ch_out, ch_in);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
