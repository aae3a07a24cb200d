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

#include "netmf/tilt.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "netmf/rng.hpp"

namespace netmf {

namespace {

constexpr double kPivotAbortTol = -1e-8;
constexpr double kPivotFloor = 1e-12;

inline std::size_t tri_off(int i) { return static_cast<std::size_t>(i) * (i + 1) / 2; }

// Dense Cholesky of a symmetric matrix given by its packed lower triangle;
// used by the identity check so that it does not share the incremental factor.
std::vector<double> dense_chol(const std::vector<double>& packed, int n) {
    std::vector<double> l(packed);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = l[tri_off(i) + j];
            for (int p = 0; p < j; ++p) s -= l[tri_off(i) + p] * l[tri_off(j) + p];
            if (i == j) {
                if (s < kPivotAbortTol) throw NumericalDegeneracy("dense_chol: pivot " + std::to_string(s));
                l[tri_off(i) + i] = std::sqrt(std::max(s, kPivotFloor));
            } else {
                l[tri_off(i) + j] = s / l[tri_off(j) + j];
            }
        }
    }
    return l;
}

void tri_solve_lower(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= l[tri_off(i) + j] * x[j];
        x[i] = s / l[tri_off(i) + i];
    }
}

void tri_solve_upper(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= l[tri_off(j) + i] * x[j];
        x[i] = s / l[tri_off(i) + i];
    }
}

}  // namespace

double mean_field(std::span<const double> x_prefix, int t_index, const PathEnsemble& mu,
                  const ModelParams& params, const InteractionKernel& kernel) {
    if (mu.m_paths < 1) throw DomainError("mean_field: empty ensemble");
    if (t_index < 0 || t_index >= static_cast<int>(x_prefix.size()) || t_index > mu.n_steps)
        throw DomainError("mean_field: t_index out of range");
    params.require_positive_lambda("mean_field");
    const double x = x_prefix[t_index];
    double sum = 0.0;
    for (int m = 0; m < mu.m_paths; ++m) sum += kernel.eval(x, mu.state(m, t_index));
    return (params.j_bar / params.lambda) * (sum / mu.m_paths);
}

std::vector<double> covariance_row(std::span<const double> x_prefix, int t_index,
                                   const PathEnsemble& mu, const ModelParams& params,
                                   const InteractionKernel& kernel) {
    if (mu.m_paths < 1) throw DomainError("covariance_row: empty ensemble");
    if (t_index < 0 || t_index >= static_cast<int>(x_prefix.size()) || t_index > mu.n_steps)
        throw DomainError("covariance_row: t_index out of range");
    params.require_positive_lambda("covariance_row");
    const int m_paths = mu.m_paths;
    const double scale = params.sigma * params.sigma / (params.lambda * params.lambda);
    std::vector<double> bt(static_cast<std::size_t>(m_paths));
    for (int m = 0; m < m_paths; ++m) bt[m] = kernel.eval(x_prefix[t_index], mu.state(m, t_index));
    std::vector<double> row(static_cast<std::size_t>(t_index) + 1, 0.0);
    for (int i = 0; i <= t_index; ++i) {
        double sum = 0.0;
        for (int m = 0; m < m_paths; ++m)
            sum += kernel.eval(x_prefix[i], mu.state(m, i)) * bt[m];
        row[i] = scale * (sum / m_paths);
    }
    return row;
}

double TiltedState::k_entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("TiltedState: index out of range");
    return j <= i ? k_[tri_off(i) + j] : k_[tri_off(j) + i];
}

void TiltedState::extend(std::span<const double> row) {
    if (static_cast<int>(row.size()) != n_ + 1)
        throw DomainError("TiltedState::extend: row length mismatch");
    // w solves L w = dt*c; the Schur pivot of I + dt*K at the new point is
    // 1 + dt*kappa - |w|^2 = 1 + dt * (tilted diagonal).
    std::vector<double> w(row.begin(), row.end() - 1);
    for (double& v : w) v *= dt_;
    tri_solve_lower(l_, n_, w);
    double wnorm2 = 0.0;
    for (const double v : w) wnorm2 += v * v;
    const double pivot = 1.0 + dt_ * row[n_] - wnorm2;
    if (pivot < kPivotAbortTol)
        throw NumericalDegeneracy("TiltedState::extend: pivot " + std::to_string(pivot) +
                                  " at index " + std::to_string(n_));
    const double clipped = std::max(pivot, kPivotFloor);
    k_.insert(k_.end(), row.begin(), row.end());
    l_.insert(l_.end(), w.begin(), w.end());
    l_.push_back(std::sqrt(clipped));
    log_norm_ -= 0.5 * std::log(clipped);
    ++n_;
}

std::vector<double> TiltedState::solve(std::span<const double> rhs) const {
    if (static_cast<int>(rhs.size()) != n_) throw DomainError("TiltedState::solve: size mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    tri_solve_lower(l_, n_, x);
    tri_solve_upper(l_, n_, x);
    return x;
}

std::vector<double> TiltedState::apply_k(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != n_) throw DomainError("TiltedState::apply_k: size mismatch");
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += k_[tri_off(i) + j] * v[j];
        for (int j = i + 1; j < n_; ++j) s += k_[tri_off(j) + i] * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> TiltedState::tilted_row(int t_index) const {
    if (t_index < 0 || t_index >= n_) throw DomainError("TiltedState::tilted_row: index out of range");
    // Ktilde = K (I + dt*K)^{-1} = (I + dt*K)^{-1} K, so a row is one solve.
    std::vector<double> col(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) col[i] = k_entry(i, t_index);
    return solve(col);
}

double TiltedState::pending_tilted_diag(std::span<const double> c, double kappa) const {
    const std::vector<double> z = solve(c);
    double dot = 0.0;
    for (int i = 0; i < n_; ++i) dot += c[i] * z[i];
    return kappa - dt_ * dot;
}

double ktilde_trace_identity(const TiltedState& state) {
    const int n = state.size();
    const double dt = state.dt();
    double sum = 0.0;
    std::vector<double> m_packed;  // packed lower triangle of I + dt*K over 0..k-1
    m_packed.reserve(tri_off(n));
    for (int k = 0; k < n; ++k) {
        std::vector<double> c(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) c[i] = state.k_entry(k, i);
        double tilted_kk = state.k_entry(k, k);
        if (k > 0) {
            const std::vector<double> l = dense_chol(m_packed, k);
            std::vector<double> z(c);
            tri_solve_lower(l, k, z);
            tri_solve_upper(l, k, z);
            double dot = 0.0;
            for (int i = 0; i < k; ++i) dot += c[i] * z[i];
            tilted_kk -= dt * dot;
        }
        sum += -0.5 * std::log(1.0 + dt * tilted_kk);
        for (int i = 0; i < k; ++i) m_packed.push_back(dt * c[i]);
        m_packed.push_back(1.0 + dt * state.k_entry(k, k));
    }
    return std::abs(state.log_norm() - sum);
}

double gaussian_quadratic_moment(double alpha, double beta) {
    if (beta >= 1.0) throw DomainError("gaussian_quadratic_moment: divergent for beta >= 1");
    return std::sqrt(1.0 / (1.0 - beta)) * std::exp(alpha * alpha / (2.0 * (1.0 - beta)));
}

IdentitySuiteResult run_identity_suite(std::uint64_t seed, int n_fixtures, int max_size,
                                       bool corrupt) {
    IdentitySuiteResult result;
    result.all_pass = true;
    for (int f = 0; f < n_fixtures; ++f) {
        const std::uint64_t fi = static_cast<std::uint64_t>(f);
        const int size = 2 + static_cast<int>(rng_u64(seed, Stream::fixture, fi, 0) %
                                              static_cast<std::uint64_t>(max_size - 1));
        const int feat = 1 + static_cast<int>(rng_u64(seed, Stream::fixture, fi, 1) %
                                              static_cast<std::uint64_t>(size + 4));
        const double scale = 0.1 + 0.9 * rng_u01(seed, Stream::fixture, fi, 2);
        const double dt = (0.25 + 0.75 * rng_u01(seed, Stream::fixture, fi, 3)) / size;

        // Gram covariance K = scale * B B^T / feat, like an M-sample empirical
        // covariance of a bounded field.
        Eigen::MatrixXd b(size, feat);
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < feat; ++j)
                b(i, j) = rng_normal(seed, Stream::fixture, fi * 1000 + i, static_cast<std::uint64_t>(j));
        Eigen::MatrixXd k = (scale / feat) * (b * b.transpose());
        if (corrupt && f == 0) k(0, 0) = -2.0 / dt;

        TiltedState state(dt);
        std::vector<double> row;
        for (int i = 0; i < size; ++i) {
            row.assign(static_cast<std::size_t>(i) + 1, 0.0);
            for (int j = 0; j <= i; ++j) row[j] = k(i, j);
            state.extend(row);
        }

        IdentityCheck check;
        check.size = size;
        check.dt = dt;
        check.telescope_residual = ktilde_trace_identity(state);

        Eigen::MatrixXd ktilde(size, size);
        for (int t = 0; t < size; ++t) {
            const std::vector<double> r = state.tilted_row(t);
            for (int i = 0; i < size; ++i) ktilde(i, t) = r[i];
        }
        const Eigen::MatrixXd sym = 0.5 * (ktilde + ktilde.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k - sym);
        check.loewner_min_eig = eig.eigenvalues().minCoeff();
        double diag_violation = 0.0;
        for (int i = 0; i < size; ++i) {
            diag_violation = std::max(diag_violation, sym(i, i) - k(i, i));
            diag_violation = std::max(diag_violation, -sym(i, i));
        }
        check.diag_violation = diag_violation;
        check.pass = check.telescope_residual < 1e-10 && check.loewner_min_eig > -1e-10 &&
                     check.diag_violation < 1e-10;
        result.all_pass = result.all_pass && check.pass;
        result.checks.push_back(check);
    }

    // The two written forms of the quadratic-moment identity must agree.
    double max_err = std::abs(gaussian_quadratic_moment(0.0, 0.0) - 1.0);
    max_err = std::max(max_err, std::abs(gaussian_quadratic_moment(0.0, 0.5) - std::sqrt(2.0)));
    for (int i = 0; i < 50; ++i) {
        const double alpha = 3.0 * (rng_u01(seed, Stream::fixture, 9000, static_cast<std::uint64_t>(i)) - 0.5);
        const double beta = 0.98 * rng_u01(seed, Stream::fixture, 9001, static_cast<std::uint64_t>(i));
        const double direct = gaussian_quadratic_moment(alpha, beta);
        const double exp_form =
            std::exp(0.5 * (alpha * alpha / (1.0 - beta) - std::log(1.0 - beta)));
        max_err = std::max(max_err, std::abs(direct - exp_form) / exp_form);
    }
    result.moment_max_err = max_err;
    result.all_pass = result.all_pass && max_err < 1e-12;
    return result;
}

}  // namespace netmf
