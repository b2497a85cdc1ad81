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

#include <map>
#include <string>
#include <vector>

#include "potts/bp.hpp"
#include "potts/channel.hpp"
#include "potts/constants.hpp"
#include "potts/sbm.hpp"

namespace potts {

const char* version();

// shortest exact decimal representation, stable across runs
std::string format_double(double x);

// "# key=value" header lines carrying the full run configuration
std::string config_header(const std::map<std::string, std::string>& config);

void save_channel(const std::string& path, const Channel& c);
Channel load_channel(const std::string& path);

void write_trace_csv(const std::string& path, const BpTrace& trace,
                     const std::map<std::string, std::string>& config);

void write_phase_csv(const std::string& path, const std::vector<ThresholdVerdict>& rows,
                     const std::map<std::string, std::string>& config);

void save_sbm(const std::string& graph_path, const std::string& labels_path,
              const SbmInstance& g);
SbmInstance load_sbm(const std::string& graph_path, const std::string& labels_path);

}  // namespace potts
