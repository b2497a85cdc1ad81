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

#include "potts/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace potts {

const char* version() {
#ifdef POTTSDE_VERSION
  return POTTSDE_VERSION;
#else
  return "unknown";
#endif
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string config_header(const std::map<std::string, std::string>& config) {
  std::ostringstream os;
  os << "# version=" << version() << "\n";
  for (const auto& [k, v] : config) os << "# " << k << "=" << v << "\n";
  return os.str();
}

void save_channel(const std::string& path, const Channel& c) {
  nlohmann::json j;
  j["q"] = c.q();
  auto atoms = nlohmann::json::array();
  for (int a = 0; a < c.atom_count(); ++a) {
    auto pt = c.point(a);
    atoms.push_back({c.weight(a), std::vector<double>(pt.begin(), pt.end())});
  }
  j["atoms"] = std::move(atoms);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  int q = j.at("q").get<int>();
  std::vector<double> w, pts;
  for (const auto& atom : j.at("atoms")) {
    w.push_back(atom.at(0).get<double>());
    auto p = atom.at(1).get<std::vector<double>>();
    if (static_cast<int>(p.size()) != q)
      throw std::runtime_error("channel file: atom dimension mismatch");
    auto canon = canonicalize(p).probs();
    pts.insert(pts.end(), canon.begin(), canon.end());
  }
  return Channel(q, std::move(w), std::move(pts));
}

void write_trace_csv(const std::string& path, const BpTrace& trace,
                     const std::map<std::string, std::string>& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config_header(config);
  out << "k,p_e,capacity,chi2,skl,phi_H,atoms\n";
  for (size_t k = 0; k < trace.rows.size(); ++k) {
    const auto& r = trace.rows[k];
    out << k << ',' << format_double(r.m.pe) << ',' << format_double(r.m.capacity)
        << ',' << format_double(r.m.chi2) << ','
        << (r.m.skl_saturated ? "inf" : format_double(r.m.skl)) << ','
        << format_double(r.phi_high) << ',' << r.atom_count << "\n";
  }
}

void write_phase_csv(const std::string& path, const std::vector<ThresholdVerdict>& rows,
                     const std::map<std::string, std::string>& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config_header(config);
  out << "q,lambda,d,ks_side,cL_emp,cH_emp,c_small,low_ok_cert,low_ok_emp,"
         "high_ok_cert,high_ok_emp,closed_form_low,closed_form_high\n";
  for (const auto& v : rows) {
    out << v.q << ',' << format_double(v.lambda) << ',' << format_double(v.d) << ','
        << to_string(v.ks_side) << ',' << format_double(v.c_low_emp) << ','
        << format_double(v.c_high_emp) << ',' << format_double(v.c_small_val) << ','
        << v.low_ok_cert << ',' << v.low_ok_emp << ',' << v.high_ok_cert << ','
        << v.high_ok_emp << ',' << v.closed_form_low << ',' << v.closed_form_high
        << "\n";
  }
}

void save_sbm(const std::string& graph_path, const std::string& labels_path,
              const SbmInstance& g) {
  std::ofstream out(graph_path);
  if (!out) throw std::runtime_error("cannot write " + graph_path);
  out << g.n << ' ' << g.q << ' ' << format_double(g.a) << ' ' << format_double(g.b)
      << ' ' << g.seed << "\n";
  for (const auto& e : g.edges) out << e.first << ' ' << e.second << "\n";
  std::ofstream lab(labels_path);
  if (!lab) throw std::runtime_error("cannot write " + labels_path);
  for (int8_t l : g.labels) lab << static_cast<int>(l) << "\n";
}

SbmInstance load_sbm(const std::string& graph_path, const std::string& labels_path) {
  std::ifstream in(graph_path);
  if (!in) throw std::runtime_error("cannot read " + graph_path);
  SbmInstance g;
  in >> g.n >> g.q >> g.a >> g.b >> g.seed;
  if (!in) throw std::runtime_error("bad graph header in " + graph_path);
  int32_t u, v;
  while (in >> u >> v) {
    if (u < 0 || v < 0 || u >= g.n || v >= g.n)
      throw std::runtime_error("edge endpoint out of range in " + graph_path);
    g.edges.emplace_back(u, v);
  }
  std::ifstream lab(labels_path);
  if (!lab) throw std::runtime_error("cannot read " + labels_path);
  int l;
  while (lab >> l) g.labels.push_back(static_cast<int8_t>(l));
  if (static_cast<int>(g.labels.size()) != g.n)
    throw std::runtime_error("label count mismatch in " + labels_path);
  return g;
}

}  // namespace potts
