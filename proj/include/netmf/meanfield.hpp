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

#include "netmf/ensemble.hpp"
#include "netmf/model.hpp"
#include "netmf/tilt.hpp"

namespace netmf {

// Result of the Picard fixed-point solve: successive-iterate Vaserstein gaps,
// the admissibility report of the run, and the final ensemble approximating
// the limit law Q (with the Girsanov drift of its own generation recorded).
struct FixedPointReport {
    int iterations = 0;
    std::vector<double> gaps;
    bool converged = false;
    AdmissibilityReport admissibility;
    PathEnsemble final_ensemble;
    int m_paths = 0;
    int n_steps = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;
};

// Drift of the limit SDE at step k = tilt.size() for a path with mean-field
// trace m (values 0..k) and raw increments dW (0..k-1):
//   O_k = m_k + sum_{j<k} Ktilde^{t_k}(t_k, t_j) * (dW_j - m_j dt),
// where the tilt covers grid points 0..k-1 and cov_row holds the covariance
// of the current point against 0..k (diagonal last).
double drift_O(std::span<const double> dW, const MeanFieldTrace& m, const TiltedState& tilt,
               std::span<const double> cov_row);

// Convenience form matching the incremental recomputation done by the path
// simulator: derives the trace, tilt and covariance row from (x_prefix, mu).
double drift_O(std::span<const double> x_prefix, std::span<const double> dW,
               const PathEnsemble& mu, const ModelParams& params,
               const InteractionKernel& kernel);

struct MeanFieldPath {
    std::vector<double> states;      // n_steps + 1
    std::vector<double> increments;  // raw dW
    std::vector<double> drifts;      // O_k
    std::vector<double> position;
};

// One Euler-Maruyama path of the non-Markovian limit SDE driven by the
// ensemble mu:
//   x_{k+1} = x_k + [f(r, t_k, x_k) + lambda O_k] dt + lambda dW_k.
// Mean-field values and covariance rows are recomputed against mu at every
// step; the per-path cost is O(n^2 M + n^3) through the incremental
// factorization. Draws are keyed by (seed, path_stream).
MeanFieldPath simulate_meanfield_path(const PathEnsemble& mu, const ModelParams& params,
                                      const InteractionKernel& kernel, const IntrinsicDrift& drift,
                                      const InitialLaw& law, const TimeGrid& grid,
                                      std::uint64_t seed, std::uint64_t path_stream,
                                      bool force = false);

// One Picard step: m_paths independent draws of the limit SDE against mu_n,
// under common random numbers (identical seeds across iterations).
PathEnsemble picard_iterate(const PathEnsemble& mu_n, int m_paths, const ModelParams& params,
                            const InteractionKernel& kernel, const IntrinsicDrift& drift,
                            const InitialLaw& law, const TimeGrid& grid, std::uint64_t iter_seed,
                            int threads = 1, bool force = false);

// Ensemble of the uncoupled diffusion dx = f dt + lambda dW (the Picard
// starting point and the reference law P).
PathEnsemble uncoupled_ensemble(int m_paths, const ModelParams& params,
                                const IntrinsicDrift& drift, const InitialLaw& law,
                                const TimeGrid& grid, std::uint64_t seed, int threads = 1);

// Picard iteration from the uncoupled law until the successive-iterate gap
// drops below tol or max_iter is reached. Non-convergence is reported, not
// thrown; an inadmissible horizon throws unless force is set.
FixedPointReport solve_fixed_point(const ModelParams& params, const InteractionKernel& kernel,
                                   const IntrinsicDrift& drift, const InitialLaw& law,
                                   const TimeGrid& grid, int m_paths, int max_iter, double tol,
                                   std::uint64_t seed, int threads = 1, bool force = false);

}  // namespace netmf
