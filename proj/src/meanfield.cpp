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

#include "netmf/meanfield.hpp"

#include <cmath>
#include <string>

#include "netmf/measures.hpp"
#include "netmf/parallel.hpp"
#include "netmf/rng.hpp"

namespace netmf {

double drift_O(std::span<const double> dW, const MeanFieldTrace& m, const TiltedState& tilt,
               std::span<const double> cov_row) {
    const int k = tilt.size();
    if (static_cast<int>(m.values.size()) != k + 1 || static_cast<int>(dW.size()) < k ||
        static_cast<int>(cov_row.size()) != k + 1)
        throw DomainError("drift_O: inconsistent prefix data");
    double gaussian = 0.0;
    if (k > 0) {
        const std::vector<double> z = tilt.solve(cov_row.subspan(0, k));
        const double dt = tilt.dt();
        for (int j = 0; j < k; ++j) gaussian += z[j] * (dW[j] - m.values[j] * dt);
    }
    return m.values[k] + gaussian;
}

double drift_O(std::span<const double> x_prefix, std::span<const double> dW,
               const PathEnsemble& mu, const ModelParams& params,
               const InteractionKernel& kernel) {
    const int k = static_cast<int>(x_prefix.size()) - 1;
    if (k < 0) throw DomainError("drift_O: empty prefix");
    MeanFieldTrace trace;
    trace.values.resize(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) trace.values[j] = mean_field(x_prefix, j, mu, params, kernel);
    if (params.sigma == 0.0) return trace.values[k];
    TiltedState tilt(mu.dt);
    for (int j = 0; j < k; ++j) tilt.extend(covariance_row(x_prefix, j, mu, params, kernel));
    const std::vector<double> row = covariance_row(x_prefix, k, mu, params, kernel);
    return drift_O(dW, trace, tilt, row);
}

namespace {

// Shared per-iteration context: the frozen driving ensemble is read-only, one
// worker simulates one path.
struct PathContext {
    const PathEnsemble& mu;
    const ModelParams& params;
    const InteractionKernel& kernel;
    const IntrinsicDrift& drift;
    const InitialLaw& law;
    const TimeGrid& grid;
    std::uint64_t seed;
};

MeanFieldPath simulate_one_path(const PathContext& ctx, std::uint64_t stream) {
    const ModelParams& params = ctx.params;
    const TimeGrid& grid = ctx.grid;
    const PathEnsemble& mu = ctx.mu;
    const int n = grid.n_steps;
    const int m_paths = mu.m_paths;
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double inv_m = 1.0 / m_paths;
    const double mean_scale = params.j_bar / params.lambda;
    const double cov_scale = params.sigma * params.sigma / (params.lambda * params.lambda);
    const bool tilted = params.sigma > 0.0;

    MeanFieldPath out;
    out.states.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.increments.assign(static_cast<std::size_t>(n), 0.0);
    out.drifts.assign(static_cast<std::size_t>(n), 0.0);
    out.position.assign(static_cast<std::size_t>(params.position_dim), 0.0);

    for (int j = 0; j < params.position_dim; ++j)
        out.position[j] = rng_u01(ctx.seed, Stream::position, stream, static_cast<std::uint64_t>(j));
    const double xi = rng_normal(ctx.seed, Stream::initial_state, stream, 0);
    out.states[0] = ctx.law.mean(out.position) + params.init_spread * xi;

    // b(x_j, Y^m_j) rows for the path prefix, filled as steps are reached.
    std::vector<double> b_rows;
    std::vector<double> u;       // dW_j - m_j dt
    std::vector<double> cov_row;
    if (tilted) {
        b_rows.assign(static_cast<std::size_t>(n) * m_paths, 0.0);
        u.reserve(static_cast<std::size_t>(n));
        cov_row.reserve(static_cast<std::size_t>(n));
    }
    TiltedState tilt(dt);

    for (int k = 0; k < n; ++k) {
        const double x = out.states[k];
        double m_k;
        double gaussian = 0.0;
        if (tilted) {
            double* bk = b_rows.data() + static_cast<std::size_t>(k) * m_paths;
            double bsum = 0.0;
            for (int m = 0; m < m_paths; ++m) {
                bk[m] = ctx.kernel.eval(x, mu.state(m, k));
                bsum += bk[m];
            }
            m_k = mean_scale * (bsum * inv_m);
            cov_row.assign(static_cast<std::size_t>(k) + 1, 0.0);
            for (int i = 0; i <= k; ++i) {
                const double* bi = b_rows.data() + static_cast<std::size_t>(i) * m_paths;
                double s = 0.0;
                for (int m = 0; m < m_paths; ++m) s += bi[m] * bk[m];
                cov_row[i] = cov_scale * (s * inv_m);
            }
            if (k > 0) {
                const std::vector<double> z =
                    tilt.solve(std::span<const double>(cov_row).subspan(0, k));
                for (int j = 0; j < k; ++j) gaussian += z[j] * u[j];
            }
            tilt.extend(cov_row);
        } else {
            double bsum = 0.0;
            for (int m = 0; m < m_paths; ++m) bsum += ctx.kernel.eval(x, mu.state(m, k));
            m_k = mean_scale * (bsum * inv_m);
        }
        const double o_k = m_k + gaussian;
        const double f = ctx.drift.eval(out.position, grid.node(k), x);
        const double dw = sqrt_dt * rng_normal(ctx.seed, Stream::brownian, stream,
                                               static_cast<std::uint64_t>(k));
        const double next = x + (f + params.lambda * o_k) * dt + params.lambda * dw;
        if (!std::isfinite(next))
            throw SimulationDiverged("simulate_meanfield_path: non-finite state at path stream " +
                                         std::to_string(stream) + ", step " + std::to_string(k + 1),
                                     static_cast<int>(stream), k + 1);
        out.states[k + 1] = next;
        out.increments[k] = dw;
        out.drifts[k] = o_k;
        if (tilted) u.push_back(dw - m_k * dt);
    }
    return out;
}

void require_admissible(const ModelParams& params, const InteractionKernel& kernel, bool force) {
    const AdmissibilityReport rep = check_time_horizon(params, kernel);
    if (!rep.admissible && !force)
        throw AdmissibilityError("time-horizon condition violated: value " +
                                 std::to_string(rep.value) + " >= 1 (use force to override)");
}

}  // namespace

MeanFieldPath simulate_meanfield_path(const PathEnsemble& mu, const ModelParams& params,
                                      const InteractionKernel& kernel, const IntrinsicDrift& drift,
                                      const InitialLaw& law, const TimeGrid& grid,
                                      std::uint64_t seed, std::uint64_t path_stream, bool force) {
    params.validate();
    params.require_positive_lambda("simulate_meanfield_path");
    if (mu.m_paths < 1) throw DomainError("simulate_meanfield_path: empty driving ensemble");
    if (mu.n_steps != grid.n_steps)
        throw DomainError("simulate_meanfield_path: ensemble grid mismatch");
    require_admissible(params, kernel, force);
    const PathContext ctx{mu, params, kernel, drift, law, grid, seed};
    return simulate_one_path(ctx, path_stream);
}

PathEnsemble picard_iterate(const PathEnsemble& mu_n, int m_paths, const ModelParams& params,
                            const InteractionKernel& kernel, const IntrinsicDrift& drift,
                            const InitialLaw& law, const TimeGrid& grid, std::uint64_t iter_seed,
                            int threads, bool force) {
    params.validate();
    params.require_positive_lambda("picard_iterate");
    if (mu_n.m_paths < 1) throw DomainError("picard_iterate: empty driving ensemble");
    if (mu_n.n_steps != grid.n_steps) throw DomainError("picard_iterate: ensemble grid mismatch");
    require_admissible(params, kernel, force);

    PathEnsemble out;
    out.allocate(m_paths, grid.n_steps, params.position_dim);
    out.dt = grid.dt;
    out.seed = iter_seed;
    out.drift_record.assign(static_cast<std::size_t>(m_paths) * grid.n_steps, 0.0);
    const PathContext ctx{mu_n, params, kernel, drift, law, grid, iter_seed};
    parallel_for(m_paths, threads, [&](int p) {
        const MeanFieldPath path = simulate_one_path(ctx, static_cast<std::uint64_t>(p));
        for (int k = 0; k <= grid.n_steps; ++k) out.state(p, k) = path.states[k];
        for (int k = 0; k < grid.n_steps; ++k) {
            out.increments[static_cast<std::size_t>(p) * grid.n_steps + k] = path.increments[k];
            out.drift_record[static_cast<std::size_t>(p) * grid.n_steps + k] = path.drifts[k];
        }
        for (int j = 0; j < params.position_dim; ++j)
            out.positions[static_cast<std::size_t>(p) * params.position_dim + j] = path.position[j];
    });
    return out;
}

PathEnsemble uncoupled_ensemble(int m_paths, const ModelParams& params,
                                const IntrinsicDrift& drift, const InitialLaw& law,
                                const TimeGrid& grid, std::uint64_t seed, int threads) {
    ModelParams free_params = params;
    free_params.j_bar = 0.0;
    free_params.sigma = 0.0;
    // Any nonempty ensemble works as the (unused) driving measure.
    PathEnsemble dummy;
    dummy.allocate(1, grid.n_steps, params.position_dim);
    dummy.dt = grid.dt;
    InteractionKernel zero_kernel;
    zero_kernel.name = "zero";
    zero_kernel.eval = [](double, double) { return 0.0; };
    zero_kernel.sup_bound = 0.0;
    return picard_iterate(dummy, m_paths, free_params, zero_kernel, drift, law, grid, seed,
                          threads);
}

FixedPointReport solve_fixed_point(const ModelParams& params, const InteractionKernel& kernel,
                                   const IntrinsicDrift& drift, const InitialLaw& law,
                                   const TimeGrid& grid, int m_paths, int max_iter, double tol,
                                   std::uint64_t seed, int threads, bool force) {
    params.validate();
    params.require_positive_lambda("solve_fixed_point");
    if (m_paths < 1) throw DomainError("solve_fixed_point: m_paths must be >= 1");
    if (max_iter < 1) throw DomainError("solve_fixed_point: max_iter must be >= 1");

    FixedPointReport report;
    report.admissibility = check_time_horizon(params, kernel);
    if (!report.admissibility.admissible && !force)
        throw AdmissibilityError("time-horizon condition violated: value " +
                                 std::to_string(report.admissibility.value) +
                                 " >= 1 (use force to override)");
    report.m_paths = m_paths;
    report.n_steps = grid.n_steps;
    report.tol = tol;
    report.seed = seed;

    const TransportMethod method =
        m_paths <= 512 ? TransportMethod::exact : TransportMethod::entropic;
    PathEnsemble mu = uncoupled_ensemble(m_paths, params, drift, law, grid, seed, threads);
    for (int iter = 0; iter < max_iter; ++iter) {
        PathEnsemble next =
            picard_iterate(mu, m_paths, params, kernel, drift, law, grid, seed, threads, force);
        const double gap = vaserstein2(mu, next, grid.n_steps, method).distance;
        report.gaps.push_back(gap);
        mu = std::move(next);
        if (gap < tol) {
            report.converged = true;
            break;
        }
    }
    report.iterations = static_cast<int>(report.gaps.size());
    report.final_ensemble = std::move(mu);
    return report;
}

}  // namespace netmf
