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
#include <functional>
#include <span>
#include <vector>

#include "netmf/ensemble.hpp"
#include "netmf/network.hpp"

namespace netmf {

enum class TransportMethod { exact, entropic };

struct TransportPlanResult {
    double distance = 0.0;   // sqrt of mean squared transport cost
    TransportMethod method = TransportMethod::exact;
    double plan_cost = 0.0;  // mean squared transport cost of the plan
    double epsilon = 0.0;    // entropic regularization, 0 for exact
};

// Path-space metric up to grid node t_index:
//   sqrt( max_{k <= t_index} |x_k - y_k|^2 + |r - r'|^2 ).
double path_distance(std::span<const double> xa, std::span<const double> ra,
                     std::span<const double> xb, std::span<const double> rb, int t_index);

double path_distance(const PathEnsemble& a, int pa, const PathEnsemble& b, int pb, int t_index);

// Vaserstein-2 distance between two uniform-weight ensembles. Exact mode
// solves the optimal assignment (sizes must match, at most 512); entropic
// mode runs Sinkhorn with epsilon = eps_factor * median cost, rounds the plan
// to exact marginals and reports the resulting (upper) cost estimate.
TransportPlanResult vaserstein2(const PathEnsemble& a, const PathEnsemble& b, int t_index,
                                TransportMethod method = TransportMethod::exact,
                                double eps_factor = 0.01, int max_iterations = 500);

struct ChaosRow {
    int n = 0;
    double distance = 0.0;   // run subsample vs Q subsample
    double baseline = 0.0;   // disjoint same-law Q subsamples
    double cross_cov = 0.0;  // cross-particle covariance of the observable
    double cross_se = 0.0;
};

using Observable = std::function<double(std::span<const double>, std::span<const double>)>;

// Per-N convergence diagnostics of network runs against the limit ensemble:
// subsampled Vaserstein distance with a same-law noise floor, and the average
// cross-particle covariance of the observable over random particle pairs.
std::vector<ChaosRow> chaos_diagnostics(const std::vector<NetworkRun>& runs,
                                        const PathEnsemble& q, const Observable& observable,
                                        std::uint64_t seed, int subsample_cap = 256,
                                        int n_pairs = 1000);

// Synchronization summary R = |(1/M) sum_m exp(i x^m_t)| in [0, 1].
double order_parameter(const PathEnsemble& ensemble, int t_index);

}  // namespace netmf
