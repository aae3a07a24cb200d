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

#include <cstdint>
#include <string>
#include <vector>

#include "netmf/model.hpp"

namespace netmf {

// One experiment = one key/value config file. All keys are optional and
// default as below; flags may override on the command line.
//
//   kernel = kuramoto | sigmoid_gain | bump      kernel_gain = 1.0
//   drift = zero | decay                          drift_rate = 1.0
//   x0_mean = constant | affine                   x0_a = 0.0   x0_b = 0.0
//   j_bar sigma lambda horizon n_steps position_dim init_spread
//   seed paths tol max_iter n_list (comma separated)
struct ExperimentConfig {
    ModelParams params;
    std::string kernel_name = "kuramoto";
    double kernel_gain = 1.0;
    std::string drift_name = "zero";
    double drift_rate = 1.0;
    std::string x0_name = "constant";
    double x0_a = 0.0;
    double x0_b = 0.0;
    std::uint64_t seed = 1;
    int paths = 256;
    double tol = 1e-2;
    int max_iter = 10;
    std::vector<int> n_list = {32, 64, 128, 256};

    InteractionKernel kernel() const { return builtin_kernel(kernel_name, kernel_gain); }
    IntrinsicDrift drift() const { return builtin_drift(drift_name, drift_rate); }
    InitialLaw initial_law() const { return builtin_initial_law(x0_name, x0_a, x0_b); }
    TimeGrid grid() const { return TimeGrid::from_params(params); }

    // Canonical fixed-order key=value dump; independent of input formatting.
    std::string canonical() const;
    // FNV-1a 64 hex digest of canonical(); stable across platforms.
    std::string digest() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace netmf
