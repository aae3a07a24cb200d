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

#include "netmf/rate.hpp"

#include <cmath>

#include "netmf/parallel.hpp"
#include "netmf/tilt.hpp"

namespace netmf {

namespace {

Estimate mean_and_se(const std::vector<double>& values) {
    Estimate est;
    est.samples = static_cast<int>(values.size());
    if (values.empty()) return est;
    double sum = 0.0;
    for (const double v : values) sum += v;
    est.value = sum / est.samples;
    if (est.samples > 1) {
        double ss = 0.0;
        for (const double v : values) {
            const double d = v - est.value;
            ss += d * d;
        }
        est.se = std::sqrt(ss / (est.samples - 1) / est.samples);
    }
    return est;
}

}  // namespace

DensityEvaluation log_density(std::span<const double> x, std::span<const double> dW,
                              std::span<const double> r, const PathEnsemble& nu,
                              const ModelParams& params, const InteractionKernel& kernel) {
    (void)r;  // the density depends on r only through the path's own law
    params.validate();
    params.require_positive_lambda("log_density");
    if (nu.m_paths < 1) throw DomainError("log_density: empty ensemble");
    const int n = nu.n_steps;
    if (static_cast<int>(x.size()) != n + 1 || static_cast<int>(dW.size()) != n)
        throw DomainError("log_density: grid mismatch");
    const double dt = nu.dt;
    const int m_paths = nu.m_paths;
    const double inv_m = 1.0 / m_paths;
    const double mean_scale = params.j_bar / params.lambda;

    std::vector<double> m(static_cast<std::size_t>(n), 0.0);
    std::vector<double> b_rows;
    const bool tilted = params.sigma > 0.0;
    if (tilted) b_rows.assign(static_cast<std::size_t>(n) * m_paths, 0.0);
    for (int k = 0; k < n; ++k) {
        double bsum = 0.0;
        if (tilted) {
            double* bk = b_rows.data() + static_cast<std::size_t>(k) * m_paths;
            for (int mm = 0; mm < m_paths; ++mm) {
                bk[mm] = kernel.eval(x[k], nu.state(mm, k));
                bsum += bk[mm];
            }
        } else {
            for (int mm = 0; mm < m_paths; ++mm) bsum += kernel.eval(x[k], nu.state(mm, k));
        }
        m[k] = mean_scale * (bsum * inv_m);
    }

    DensityEvaluation out;
    double drift_dot = 0.0, drift_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        drift_dot += m[k] * dW[k];
        drift_sq += m[k] * m[k] * dt;
    }
    out.deterministic_part = drift_dot - 0.5 * drift_sq;

    if (tilted) {
        const double cov_scale = params.sigma * params.sigma / (params.lambda * params.lambda);
        TiltedState tilt(dt);
        std::vector<double> row;
        for (int k = 0; k < n; ++k) {
            const double* bk = b_rows.data() + static_cast<std::size_t>(k) * m_paths;
            row.assign(static_cast<std::size_t>(k) + 1, 0.0);
            for (int i = 0; i <= k; ++i) {
                const double* bi = b_rows.data() + static_cast<std::size_t>(i) * m_paths;
                double s = 0.0;
                for (int mm = 0; mm < m_paths; ++mm) s += bi[mm] * bk[mm];
                row[i] = cov_scale * (s * inv_m);
            }
            tilt.extend(row);
        }
        std::vector<double> u(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) u[k] = dW[k] - m[k] * dt;
        const std::vector<double> ku = tilt.apply_k(u);
        const std::vector<double> kt_u = tilt.solve(ku);
        double quad = 0.0;
        for (int k = 0; k < n; ++k) quad += u[k] * kt_u[k];
        out.gaussian_part = tilt.log_norm() + 0.5 * quad;
    }
    out.log_density = out.deterministic_part + out.gaussian_part;
    return out;
}

Estimate gamma_estimate(const PathEnsemble& mu, const PathEnsemble& nu, const ModelParams& params,
                        const InteractionKernel& kernel, int threads) {
    if (mu.m_paths < 1) throw DomainError("gamma_estimate: empty ensemble");
    std::vector<double> values(static_cast<std::size_t>(mu.m_paths), 0.0);
    parallel_for(mu.m_paths, threads, [&](int p) {
        const std::vector<double> dw = mu.reference_increments(p);
        values[p] = log_density(mu.path(p), dw, mu.position(p), nu, params, kernel).log_density;
    });
    return mean_and_se(values);
}

Estimate entropy_girsanov(const PathEnsemble& ensemble) {
    if (ensemble.m_paths < 1) throw DomainError("entropy_girsanov: empty ensemble");
    if (!ensemble.has_drift_record())
        throw DomainError("entropy_girsanov: ensemble carries no drift record");
    std::vector<double> values(static_cast<std::size_t>(ensemble.m_paths), 0.0);
    for (int p = 0; p < ensemble.m_paths; ++p) {
        const auto drifts = ensemble.path_drift(p);
        double s = 0.0;
        for (int k = 0; k < ensemble.n_steps; ++k) s += drifts[k] * drifts[k];
        values[p] = 0.5 * s * ensemble.dt;
    }
    return mean_and_se(values);
}

double finite_n_log_rn(const NetworkRun& run, const ModelParams& params,
                       const InteractionKernel& kernel, int threads) {
    const PathEnsemble& ens = run.ensemble;
    if (ens.m_paths < 1) throw DomainError("finite_n_log_rn: empty run");
    std::vector<double> values(static_cast<std::size_t>(ens.m_paths), 0.0);
    parallel_for(ens.m_paths, threads, [&](int i) {
        const std::vector<double> dw = ens.reference_increments(i);
        values[i] = log_density(ens.path(i), dw, ens.position(i), ens, params, kernel).log_density;
    });
    double total = 0.0;
    for (const double v : values) total += v;
    return total;
}

Estimate h_at_fixed_point(const FixedPointReport& run, const ModelParams& params,
                          const InteractionKernel& kernel, int threads) {
    const PathEnsemble& q = run.final_ensemble;
    if (q.m_paths < 1) throw DomainError("h_at_fixed_point: empty ensemble");
    if (!q.has_drift_record()) throw DomainError("h_at_fixed_point: missing drift record");
    std::vector<double> diffs(static_cast<std::size_t>(q.m_paths), 0.0);
    parallel_for(q.m_paths, threads, [&](int p) {
        const auto drifts = q.path_drift(p);
        double s = 0.0;
        for (int k = 0; k < q.n_steps; ++k) s += drifts[k] * drifts[k];
        const double entropy_term = 0.5 * s * q.dt;
        const std::vector<double> dw = q.reference_increments(p);
        const double dens = log_density(q.path(p), dw, q.position(p), q, params, kernel).log_density;
        diffs[p] = entropy_term - dens;
    });
    return mean_and_se(diffs);
}

}  // namespace netmf
