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

#include <span>

#include "netmf/ensemble.hpp"
#include "netmf/meanfield.hpp"
#include "netmf/model.hpp"
#include "netmf/network.hpp"

namespace netmf {

// Closed-form log-density of the tilted path measure against the uncoupled
// law, evaluated on a path with its reference-measure increments dW:
//   log dQ_nu/dP = sum_j m_j dW_j - 1/2 sum_j m_j^2 dt
//                  - 1/2 log det(I + dt K) + 1/2 u^T Ktilde u,
// with m_j = m_nu(t_j, x), u_j = dW_j - m_j dt, K the grid covariance of the
// Gaussian field along x under nu, and Ktilde = K (I + dt K)^{-1}.
struct DensityEvaluation {
    double log_density = 0.0;
    double deterministic_part = 0.0;  // Girsanov exponent of the mean field
    double gaussian_part = 0.0;       // -1/2 logdet + 1/2 quadratic form
};

DensityEvaluation log_density(std::span<const double> x, std::span<const double> dW,
                              std::span<const double> r, const PathEnsemble& nu,
                              const ModelParams& params, const InteractionKernel& kernel);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    int samples = 0;
};

// Monte-Carlo estimate of Gamma_nu(mu): the mu-average of log_density, using
// each path's recorded increments (drift record included) rather than
// increments re-derived from the path.
Estimate gamma_estimate(const PathEnsemble& mu, const PathEnsemble& nu, const ModelParams& params,
                        const InteractionKernel& kernel, int threads = 1);

// Girsanov form of the relative entropy I(law | P) for an ensemble produced
// by a solver that recorded its own drift: mean over paths of
// 1/2 sum_k O_k^2 dt.
Estimate entropy_girsanov(const PathEnsemble& ensemble);

// Finite-N Radon-Nikodym exponent of a network run against the uncoupled
// product law, evaluated on the run itself (nu = its empirical measure).
double finite_n_log_rn(const NetworkRun& run, const ModelParams& params,
                       const InteractionKernel& kernel, int threads = 1);

// Rate-function value at the solver output: entropy_girsanov minus
// gamma_estimate(Q, Q), with the paired (per-path difference) standard error.
// Zero within Monte-Carlo noise at the fixed point.
Estimate h_at_fixed_point(const FixedPointReport& run, const ModelParams& params,
                          const InteractionKernel& kernel, int threads = 1);

}  // namespace netmf
