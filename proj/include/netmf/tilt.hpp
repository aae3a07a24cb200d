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

namespace netmf {

// Empirical mean field seen by a tagged path x against the ensemble mu:
//   m(t_k, x) = (j_bar / lambda) * (1/M) sum_m b(x_{t_k}, Y^m_{t_k}).
double mean_field(std::span<const double> x_prefix, int t_index, const PathEnsemble& mu,
                  const ModelParams& params, const InteractionKernel& kernel);

// Row t_index of the empirical covariance of the Gaussian interaction field:
//   K(t_i, t_j, x) = (sigma^2 / lambda^2) * (1/M) sum_m b(x_i, Y^m_i) b(x_j, Y^m_j),
// returned for i = 0..t_index (diagonal entry last).
std::vector<double> covariance_row(std::span<const double> x_prefix, int t_index,
                                   const PathEnsemble& mu, const ModelParams& params,
                                   const InteractionKernel& kernel);

// Mean-field values m_j along a path prefix.
struct MeanFieldTrace {
    std::vector<double> values;
};

// Grid covariance of a centered Gaussian field together with the incrementally
// maintained Cholesky factor of I + dt*K, i.e. of the matrix whose inverse
// tilts the field by exp{-1/2 sum_j G_j^2 dt}. Every held index carries tilt
// weight dt; extend() appends one grid point in O(k^2). log_norm() maintains
//   -1/2 * log det(I + dt*K),
// the log-normalizer of the tilt, from the running pivots.
//
// Single-owner accumulator: one state per simulated path, never shared.
class TiltedState {
public:
    explicit TiltedState(double dt) : dt_(dt) {
        if (!(dt >= 0.0)) throw DomainError("TiltedState: dt must be >= 0");
    }

    int size() const { return n_; }
    double dt() const { return dt_; }
    double log_norm() const { return log_norm_; }
    double k_entry(int i, int j) const;

    // Appends grid point k = size() with covariance row (c_0..c_{k-1}, kappa)
    // against the held points. The new pivot is 1 + dt*Ktilde_kk which stays
    // near or above 1 for a psd extension; values below -1e-8 abort, small
    // negative eigen-noise is clipped.
    void extend(std::span<const double> row);

    // (I + dt*K)^{-1} rhs via two triangular solves.
    std::vector<double> solve(std::span<const double> rhs) const;

    // K * v for the held points.
    std::vector<double> apply_k(std::span<const double> v) const;

    // Row t_index of the tilted covariance Ktilde = K (I + dt*K)^{-1}.
    std::vector<double> tilted_row(int t_index) const;

    // Tilted diagonal of a pending (not yet tilted) point with covariance c
    // against the held points and raw variance kappa:
    //   kappa - dt * c^T (I + dt*K)^{-1} c.
    double pending_tilted_diag(std::span<const double> c, double kappa) const;

private:
    double dt_;
    int n_ = 0;
    std::vector<double> k_;  // packed lower triangle of K
    std::vector<double> l_;  // packed lower triangle of chol(I + dt*K)
    double log_norm_ = 0.0;
};

// Telescoping determinant residual: |log_norm + 1/2 sum_k log(1 + dt*v_k)|
// where v_k is the diagonal of the covariance tilted by the first k points,
// recomputed here by fresh dense factorizations independent of the state's
// incremental factor. Zero up to round-off for any psd covariance.
double ktilde_trace_identity(const TiltedState& state);

// E[exp(zeta^2 / 2)] for zeta ~ N(alpha, beta), beta < 1:
//   (1 - beta)^{-1/2} * exp(alpha^2 / (2 (1 - beta))).
double gaussian_quadratic_moment(double alpha, double beta);

// Fixture-driven self checks used by the `identities` CLI subcommand.
struct IdentityCheck {
    int size = 0;
    double dt = 0.0;
    double telescope_residual = 0.0;
    double loewner_min_eig = 0.0;   // min eigenvalue of K - Ktilde
    double diag_violation = 0.0;    // max over i of (Ktilde_ii - K_ii, -Ktilde_ii)
    bool pass = false;
};

struct IdentitySuiteResult {
    std::vector<IdentityCheck> checks;
    double moment_max_err = 0.0;  // two algebraic forms of the moment identity
    bool all_pass = false;
};

IdentitySuiteResult run_identity_suite(std::uint64_t seed, int n_fixtures, int max_size,
                                       bool corrupt = false);

}  // namespace netmf
