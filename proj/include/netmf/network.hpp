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
#include <vector>

#include "netmf/ensemble.hpp"
#include "netmf/model.hpp"

namespace netmf {

// One Euler-Maruyama run of the N-particle disordered network:
//   x^i_{k+1} = x^i_k + [f(r_i, t_k, x^i_k) + sum_j J_ij b(x^i_k, x^j_k)] dt
//                + lambda dW^i_k
// with the self-coupling term j == i included. The ensemble view of the run
// is its empirical measure.
struct NetworkRun {
    PathEnsemble ensemble;
    DisorderMatrix disorder;
    ModelParams params;
    TimeGrid grid;
};

struct SimulateOptions {
    int threads = 1;
    // Per-particle noise/initial-condition stream ids; defaults to identity.
    // Permuting these together with the disorder rows/columns permutes the
    // output trajectories exactly.
    std::vector<std::uint64_t> particle_streams;
};

NetworkRun simulate_network(const ModelParams& params, const InteractionKernel& kernel,
                            const IntrinsicDrift& drift, const InitialLaw& law,
                            const DisorderMatrix& disorder, const TimeGrid& grid,
                            std::uint64_t rng_seed, const SimulateOptions& opts = {});

// One disorder realization and one run per N, all derived from master_seed.
std::vector<NetworkRun> quenched_sweep(const ModelParams& params, const InteractionKernel& kernel,
                                       const IntrinsicDrift& drift, const InitialLaw& law,
                                       const std::vector<int>& n_list, std::uint64_t master_seed,
                                       int threads = 1);

// The run's ensemble re-labeled as a uniform-weight measure sample.
inline const PathEnsemble& empirical_measure(const NetworkRun& run) { return run.ensemble; }

}  // namespace netmf
