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
#include <span>
#include <vector>

#include "netmf/model.hpp"

namespace netmf {

// A finite family of discretized trajectories with their position labels and
// driving noise: the computational stand-in for a probability measure on
// path x position space. states holds n_steps+1 values per path (path-major),
// increments the raw N(0, dt) Brownian increments that drove the path, and
// drift_record (when present) the Girsanov drift d_k of the generating
// dynamics, so that dW + d_k*dt recovers the increments of the path seen
// under the reference (uncoupled) measure without re-deriving them.
struct PathEnsemble {
    int m_paths = 0;
    int n_steps = 0;
    int pos_dim = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> states;        // m_paths * (n_steps + 1)
    std::vector<double> positions;     // m_paths * pos_dim
    std::vector<double> increments;    // m_paths * n_steps
    std::vector<double> drift_record;  // m_paths * n_steps, empty means zero

    void allocate(int paths, int steps, int dim) {
        m_paths = paths;
        n_steps = steps;
        pos_dim = dim;
        states.assign(static_cast<std::size_t>(paths) * (steps + 1), 0.0);
        positions.assign(static_cast<std::size_t>(paths) * dim, 0.0);
        increments.assign(static_cast<std::size_t>(paths) * steps, 0.0);
        drift_record.clear();
    }

    double state(int path, int k) const {
        return states[static_cast<std::size_t>(path) * (n_steps + 1) + k];
    }
    double& state(int path, int k) {
        return states[static_cast<std::size_t>(path) * (n_steps + 1) + k];
    }
    std::span<const double> path(int p) const {
        return {states.data() + static_cast<std::size_t>(p) * (n_steps + 1),
                static_cast<std::size_t>(n_steps + 1)};
    }
    std::span<const double> position(int p) const {
        return {positions.data() + static_cast<std::size_t>(p) * pos_dim,
                static_cast<std::size_t>(pos_dim)};
    }
    std::span<const double> path_increments(int p) const {
        return {increments.data() + static_cast<std::size_t>(p) * n_steps,
                static_cast<std::size_t>(n_steps)};
    }
    std::span<const double> path_drift(int p) const {
        if (drift_record.empty()) return {};
        return {drift_record.data() + static_cast<std::size_t>(p) * n_steps,
                static_cast<std::size_t>(n_steps)};
    }
    bool has_drift_record() const { return !drift_record.empty(); }

    // Increments of the path under the reference measure: dW + drift*dt.
    std::vector<double> reference_increments(int p) const {
        std::vector<double> out(path_increments(p).begin(), path_increments(p).end());
        if (has_drift_record()) {
            const auto d = path_drift(p);
            for (int k = 0; k < n_steps; ++k) out[k] += d[k] * dt;
        }
        return out;
    }

    // Uniform-weight subsample (without replacement) keyed by (seed, tag).
    PathEnsemble subsample(int count, std::uint64_t seed_, std::uint64_t tag) const;
};

// Random coupling matrix J_ij, i.i.d. N(j_bar/n, sigma^2/n).
struct DisorderMatrix {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<double> entries;  // row-major n*n

    double entry(int i, int j) const { return entries[static_cast<std::size_t>(i) * n + j]; }
};

// Positions i.i.d. uniform on [0,1]^d and initial states x0(r) + spread*xi.
// Draws are keyed by (rng_seed, path index), independent of count order.
void sample_initial(const ModelParams& params, const InitialLaw& law, int count,
                    std::uint64_t rng_seed, std::vector<double>& states0,
                    std::vector<double>& positions);

DisorderMatrix sample_disorder(int n, const ModelParams& params, std::uint64_t rng_seed);

}  // namespace netmf
