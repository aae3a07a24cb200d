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

#include <string>

#include "netmf/ensemble.hpp"
#include "netmf/meanfield.hpp"

namespace netmf {

// Shortest round-trip-safe decimal form of a double.
std::string format_double(double v);

// One row per (particle, time): run_id,particle,t,x[,r0,...].
void write_trajectories_csv(const std::string& path, const PathEnsemble& ensemble,
                            const std::string& run_id);

// One row per (particle, step): particle,step,dw,drift.
void write_increments_csv(const std::string& path, const PathEnsemble& ensemble);

// Rebuilds an ensemble from the two CSV files written above.
PathEnsemble read_ensemble_csv(const std::string& trajectories_path,
                               const std::string& increments_path);

void write_report_json(const std::string& path, const FixedPointReport& report);

}  // namespace netmf
