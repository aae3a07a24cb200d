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

// Test-only oracles. Everything here recomputes expected values through
// routes independent of the library implementation under test: dense Eigen
// factorizations, plain Monte Carlo with std:: engines, brute-force
// enumeration, and a separately coded McKean-Vlasov integrator.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "netmf/ensemble.hpp"
#include "netmf/model.hpp"
#include "netmf/rng.hpp"

namespace oracles {

// log det(I + dt * K) by dense Cholesky.
inline double dense_logdet(const Eigen::MatrixXd& k, double dt) {
    const Eigen::MatrixXd m =
        Eigen::MatrixXd::Identity(k.rows(), k.cols()) + dt * k;
    const Eigen::MatrixXd l = m.llt().matrixL();
    double s = 0.0;
    for (int i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

// K (I + dt*K)^{-1} by dense LU.
inline Eigen::MatrixXd dense_tilted(const Eigen::MatrixXd& k, double dt) {
    const Eigen::MatrixXd m =
        Eigen::MatrixXd::Identity(k.rows(), k.cols()) + dt * k;
    return m.partialPivLu().solve(k);
}

inline Eigen::MatrixXd random_gram(int n, int feat, double scale, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd b(n, feat);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < feat; ++j) b(i, j) = normal(gen);
    return (scale / feat) * (b * b.transpose());
}

// Square-root factor for sampling N(0, K) with K merely psd.
inline Eigen::MatrixXd gaussian_factor(const Eigen::MatrixXd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    Eigen::VectorXd vals = eig.eigenvalues();
    for (int i = 0; i < vals.size(); ++i) vals(i) = std::sqrt(std::max(vals(i), 0.0));
    return eig.eigenvectors() * vals.asDiagonal();
}

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// E[w(g) f(g)] / E[w(g)] for g ~ N(0, K) with tilting weight
// w(g) = exp(-1/2 sum_j weights[j] g_j^2), delta-method standard error.
inline McEstimate mc_tilted_ratio(const Eigen::MatrixXd& k, const std::vector<double>& weights,
                                  const std::function<double(const Eigen::VectorXd&)>& f,
                                  long samples, std::uint64_t seed) {
    const int n = static_cast<int>(k.rows());
    const Eigen::MatrixXd a = gaussian_factor(k);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n), g(n);
    double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) z(i) = normal(gen);
        g = a * z;
        double q = 0.0;
        for (int i = 0; i < n; ++i) q += weights[i] * g(i) * g(i);
        const double w = std::exp(-0.5 * q);
        const double x = w * f(g);
        sum_a += x;
        sum_b += w;
        sum_aa += x * x;
        sum_bb += w * w;
        sum_ab += x * w;
    }
    const double ma = sum_a / samples;
    const double mb = sum_b / samples;
    McEstimate out;
    out.value = ma / mb;
    const double var_a = sum_aa / samples - ma * ma;
    const double var_b = sum_bb / samples - mb * mb;
    const double cov = sum_ab / samples - ma * mb;
    const double var_ratio =
        (var_a - 2.0 * out.value * cov + out.value * out.value * var_b) / (mb * mb);
    out.se = std::sqrt(std::max(var_ratio, 0.0) / samples);
    return out;
}

// log E[exp(X(g))] for g ~ N(0, K), delta-method standard error.
inline McEstimate mc_log_mean_exp(const Eigen::MatrixXd& k,
                                  const std::function<double(const Eigen::VectorXd&)>& x_of_g,
                                  long samples, std::uint64_t seed) {
    const int n = static_cast<int>(k.rows());
    const Eigen::MatrixXd a = gaussian_factor(k);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n), g(n);
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) z(i) = normal(gen);
        g = a * z;
        const double e = std::exp(x_of_g(g));
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / samples;
    const double var = std::max(sum2 / samples - mean * mean, 0.0);
    McEstimate out;
    out.value = std::log(mean);
    out.se = std::sqrt(var / samples) / mean;
    return out;
}

// Plain E[exp(zeta^2/2)] Monte Carlo for zeta ~ N(alpha, beta).
inline McEstimate mc_quadratic_moment(double alpha, double beta, long samples,
                                      std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(beta);
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        const double zeta = alpha + sd * normal(gen);
        const double e = std::exp(0.5 * zeta * zeta);
        sum += e;
        sum2 += e * e;
    }
    McEstimate out;
    out.value = sum / samples;
    const double var = std::max(sum2 / samples - out.value * out.value, 0.0);
    out.se = std::sqrt(var / samples);
    return out;
}

// Brute-force Vaserstein-2 over all bijections, M <= 8.
inline double brute_force_w2(const netmf::PathEnsemble& a, const netmf::PathEnsemble& b,
                             int t_index) {
    const int m = a.m_paths;
    std::vector<double> cost(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double sup2 = 0.0;
            for (int k = 0; k <= t_index; ++k) {
                const double d = a.state(i, k) - b.state(j, k);
                sup2 = std::max(sup2, d * d);
            }
            double r2 = 0.0;
            for (int p = 0; p < a.pos_dim; ++p) {
                const double d = a.positions[static_cast<std::size_t>(i) * a.pos_dim + p] -
                                 b.positions[static_cast<std::size_t>(j) * b.pos_dim + p];
                r2 += d * d;
            }
            cost[static_cast<std::size_t>(i) * m + j] = sup2 + r2;
        }
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) perm[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < m; ++i) total += cost[static_cast<std::size_t>(i) * m + perm[i]];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / m);
}

// Classic fixed-step RK4 for the autonomous system dx/dt = field(x).
inline std::vector<double> rk4_integrate(
    std::vector<double> x, double t_end, int steps,
    const std::function<std::vector<double>(const std::vector<double>&)>& field) {
    const double h = t_end / steps;
    const int n = static_cast<int>(x.size());
    std::vector<double> k1, k2, k3, k4, tmp(static_cast<std::size_t>(n));
    for (int s = 0; s < steps; ++s) {
        k1 = field(x);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        k2 = field(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        k3 = field(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        k4 = field(tmp);
        for (int i = 0; i < n; ++i)
            x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return x;
}

// Independently coded McKean-Vlasov particle solver for sigma = 0: the
// classical dynamics dx = (f + j_bar <b(x, .)>_mu) dt + lambda dW, Picard
// iterations under common random numbers. Shares only the RNG stream layout
// with the library so that seeds align.
inline netmf::PathEnsemble mv_uncoupled(const netmf::ModelParams& p,
                                        const netmf::IntrinsicDrift& f,
                                        const netmf::InitialLaw& law, const netmf::TimeGrid& g,
                                        int m_paths, std::uint64_t seed) {
    netmf::PathEnsemble ens;
    ens.allocate(m_paths, g.n_steps, p.position_dim);
    ens.dt = g.dt;
    ens.seed = seed;
    const double sqrt_dt = std::sqrt(g.dt);
    for (int m = 0; m < m_paths; ++m) {
        for (int j = 0; j < p.position_dim; ++j)
            ens.positions[static_cast<std::size_t>(m) * p.position_dim + j] = netmf::rng_u01(
                seed, netmf::Stream::position, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j));
        const double xi =
            netmf::rng_normal(seed, netmf::Stream::initial_state, static_cast<std::uint64_t>(m), 0);
        ens.state(m, 0) = law.mean(ens.position(m)) + p.init_spread * xi;
        for (int k = 0; k < g.n_steps; ++k) {
            const double dw = sqrt_dt * netmf::rng_normal(seed, netmf::Stream::brownian,
                                                          static_cast<std::uint64_t>(m),
                                                          static_cast<std::uint64_t>(k));
            const double x = ens.state(m, k);
            ens.state(m, k + 1) = x + f.eval(ens.position(m), g.node(k), x) * g.dt + p.lambda * dw;
            ens.increments[static_cast<std::size_t>(m) * g.n_steps + k] = dw;
        }
    }
    return ens;
}

inline netmf::PathEnsemble mv_picard_solve(const netmf::ModelParams& p,
                                           const netmf::InteractionKernel& kernel,
                                           const netmf::IntrinsicDrift& f,
                                           const netmf::InitialLaw& law, const netmf::TimeGrid& g,
                                           int m_paths, int iterations, std::uint64_t seed) {
    netmf::PathEnsemble mu = mv_uncoupled(p, f, law, g, m_paths, seed);
    const double sqrt_dt = std::sqrt(g.dt);
    const double inv_m = 1.0 / m_paths;
    for (int iter = 0; iter < iterations; ++iter) {
        netmf::PathEnsemble next;
        next.allocate(m_paths, g.n_steps, p.position_dim);
        next.dt = g.dt;
        next.seed = seed;
        for (int m = 0; m < m_paths; ++m) {
            for (int j = 0; j < p.position_dim; ++j)
                next.positions[static_cast<std::size_t>(m) * p.position_dim + j] =
                    netmf::rng_u01(seed, netmf::Stream::position, static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(j));
            const double xi = netmf::rng_normal(seed, netmf::Stream::initial_state,
                                                static_cast<std::uint64_t>(m), 0);
            next.state(m, 0) = law.mean(next.position(m)) + p.init_spread * xi;
            for (int k = 0; k < g.n_steps; ++k) {
                const double x = next.state(m, k);
                double sum = 0.0;
                for (int mm = 0; mm < m_paths; ++mm) sum += kernel.eval(x, mu.state(mm, k));
                const double dw = sqrt_dt * netmf::rng_normal(seed, netmf::Stream::brownian,
                                                              static_cast<std::uint64_t>(m),
                                                              static_cast<std::uint64_t>(k));
                next.state(m, k + 1) =
                    x + (f.eval(next.position(m), g.node(k), x) + p.j_bar * (sum * inv_m)) * g.dt +
                    p.lambda * dw;
                next.increments[static_cast<std::size_t>(m) * g.n_steps + k] = dw;
            }
        }
        mu = std::move(next);
    }
    return mu;
}

}  // namespace oracles
