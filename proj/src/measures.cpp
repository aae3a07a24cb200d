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

#include "netmf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netmf/rng.hpp"

namespace netmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment with dual potentials (the classic
// Jonker-Volgenant scheme, one Dijkstra pass per row). cost is n x n
// row-major; returns col4row. O(n^3).
std::vector<int> solve_assignment(const std::vector<double>& cost, int n) {
    std::vector<double> u(n, 0.0), v(n, 0.0), shortest(n, 0.0);
    std::vector<int> path(n, -1), row4col(n, -1), col4row(n, -1), remaining(n, 0);
    std::vector<char> sr(n, 0), sc(n, 0);

    for (int cur_row = 0; cur_row < n; ++cur_row) {
        std::fill(sr.begin(), sr.end(), 0);
        std::fill(sc.begin(), sc.end(), 0);
        std::fill(shortest.begin(), shortest.end(), kInf);
        for (int it = 0; it < n; ++it) remaining[it] = n - it - 1;
        int num_remaining = n;
        double min_val = 0.0;
        int sink = -1;
        int i = cur_row;
        while (sink == -1) {
            sr[i] = 1;
            int index = -1;
            double lowest = kInf;
            for (int it = 0; it < num_remaining; ++it) {
                const int j = remaining[it];
                const double r = min_val + cost[static_cast<std::size_t>(i) * n + j] - u[i] - v[j];
                if (r < shortest[j]) {
                    path[j] = i;
                    shortest[j] = r;
                }
                if (shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == -1)) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if (!(min_val < kInf)) throw DomainError("solve_assignment: infeasible");
            const int j = remaining[index];
            if (row4col[j] == -1)
                sink = j;
            else
                i = row4col[j];
            sc[j] = 1;
            remaining[index] = remaining[--num_remaining];
        }
        u[cur_row] += min_val;
        for (int k = 0; k < n; ++k)
            if (sr[k] && k != cur_row) u[k] += min_val - shortest[col4row[k]];
        for (int j = 0; j < n; ++j)
            if (sc[j]) v[j] -= min_val - shortest[j];
        int j = sink;
        while (true) {
            const int k = path[j];
            row4col[j] = k;
            std::swap(col4row[k], j);
            if (k == cur_row) break;
        }
    }
    return col4row;
}

double logsumexp(const double* vals, int n) {
    double m = -kInf;
    for (int i = 0; i < n; ++i) m = std::max(m, vals[i]);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(vals[i] - m);
    return m + std::log(s);
}

void check_compatible(const PathEnsemble& a, const PathEnsemble& b, int t_index) {
    if (a.n_steps != b.n_steps || a.pos_dim != b.pos_dim)
        throw DomainError("vaserstein2: ensembles live on different grids");
    if (t_index < 0 || t_index > a.n_steps) throw DomainError("vaserstein2: bad t_index");
    if (a.m_paths < 1 || b.m_paths < 1) throw DomainError("vaserstein2: empty ensemble");
}

}  // namespace

double path_distance(std::span<const double> xa, std::span<const double> ra,
                     std::span<const double> xb, std::span<const double> rb, int t_index) {
    if (xa.size() != xb.size() || ra.size() != rb.size())
        throw DomainError("path_distance: grid mismatch");
    if (t_index < 0 || t_index >= static_cast<int>(xa.size()))
        throw DomainError("path_distance: bad t_index");
    double sup2 = 0.0;
    for (int k = 0; k <= t_index; ++k) {
        const double d = xa[k] - xb[k];
        sup2 = std::max(sup2, d * d);
    }
    double r2 = 0.0;
    for (std::size_t j = 0; j < ra.size(); ++j) {
        const double d = ra[j] - rb[j];
        r2 += d * d;
    }
    return std::sqrt(sup2 + r2);
}

double path_distance(const PathEnsemble& a, int pa, const PathEnsemble& b, int pb, int t_index) {
    return path_distance(a.path(pa), a.position(pa), b.path(pb), b.position(pb), t_index);
}

TransportPlanResult vaserstein2(const PathEnsemble& a, const PathEnsemble& b, int t_index,
                                TransportMethod method, double eps_factor, int max_iterations) {
    check_compatible(a, b, t_index);
    const int ma = a.m_paths;
    const int mb = b.m_paths;

    std::vector<double> cost(static_cast<std::size_t>(ma) * mb);
    for (int i = 0; i < ma; ++i)
        for (int j = 0; j < mb; ++j) {
            const double d = path_distance(a, i, b, j, t_index);
            cost[static_cast<std::size_t>(i) * mb + j] = d * d;
        }

    TransportPlanResult result;
    result.method = method;

    if (method == TransportMethod::exact) {
        if (ma != mb) throw DomainError("vaserstein2: exact mode needs equal sizes");
        if (ma > 512) throw DomainError("vaserstein2: exact mode capped at 512 paths");
        const std::vector<int> col4row = solve_assignment(cost, ma);
        double total = 0.0;
        for (int i = 0; i < ma; ++i) total += cost[static_cast<std::size_t>(i) * ma + col4row[i]];
        result.plan_cost = total / ma;
        result.distance = std::sqrt(result.plan_cost);
        result.epsilon = 0.0;
        return result;
    }

    // Entropic estimate: log-domain Sinkhorn with uniform weights, then a
    // rounding pass to exact marginals so the reported cost is feasible.
    double max_c = 0.0;
    for (const double c : cost) max_c = std::max(max_c, c);
    if (max_c == 0.0) return result;  // identical supports, zero plan
    std::vector<double> sorted(cost);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double median = sorted[sorted.size() / 2];
    if (!(median > 0.0)) median = max_c;
    const double eps = eps_factor * median;
    result.epsilon = eps;

    const double log_wa = -std::log(static_cast<double>(ma));
    const double log_wb = -std::log(static_cast<double>(mb));
    std::vector<double> f(ma, 0.0), g(mb, 0.0), buf(std::max(ma, mb));
    for (int iter = 0; iter < max_iterations; ++iter) {
        for (int i = 0; i < ma; ++i) {
            for (int j = 0; j < mb; ++j)
                buf[j] = (g[j] - cost[static_cast<std::size_t>(i) * mb + j]) / eps + log_wb;
            f[i] = -eps * logsumexp(buf.data(), mb);
        }
        for (int j = 0; j < mb; ++j) {
            for (int i = 0; i < ma; ++i)
                buf[i] = (f[i] - cost[static_cast<std::size_t>(i) * mb + j]) / eps + log_wa;
            g[j] = -eps * logsumexp(buf.data(), ma);
        }
        if (iter % 10 == 9 || iter == max_iterations - 1) {
            // Column update made columns exact; check the row marginals.
            double err = 0.0;
            for (int i = 0; i < ma; ++i) {
                for (int j = 0; j < mb; ++j)
                    buf[j] = (f[i] + g[j] - cost[static_cast<std::size_t>(i) * mb + j]) / eps +
                             log_wa + log_wb;
                err += std::abs(std::exp(logsumexp(buf.data(), mb)) - 1.0 / ma);
            }
            if (err < 1e-12) break;
        }
    }

    std::vector<double> plan(static_cast<std::size_t>(ma) * mb);
    for (int i = 0; i < ma; ++i)
        for (int j = 0; j < mb; ++j)
            plan[static_cast<std::size_t>(i) * mb + j] =
                std::exp((f[i] + g[j] - cost[static_cast<std::size_t>(i) * mb + j]) / eps + log_wa +
                         log_wb);

    // Round to the uniform marginals (scale rows, then columns, then spread
    // the leftover mass as a rank-one correction).
    const double wa = 1.0 / ma;
    const double wb = 1.0 / mb;
    for (int i = 0; i < ma; ++i) {
        double row = 0.0;
        for (int j = 0; j < mb; ++j) row += plan[static_cast<std::size_t>(i) * mb + j];
        if (row > wa) {
            const double s = wa / row;
            for (int j = 0; j < mb; ++j) plan[static_cast<std::size_t>(i) * mb + j] *= s;
        }
    }
    std::vector<double> col_sums(mb, 0.0);
    for (int i = 0; i < ma; ++i)
        for (int j = 0; j < mb; ++j) col_sums[j] += plan[static_cast<std::size_t>(i) * mb + j];
    for (int j = 0; j < mb; ++j) {
        if (col_sums[j] > wb) {
            const double s = wb / col_sums[j];
            for (int i = 0; i < ma; ++i) plan[static_cast<std::size_t>(i) * mb + j] *= s;
            col_sums[j] = wb;
        }
    }
    std::vector<double> row_err(ma, 0.0);
    double missing = 0.0;
    for (int i = 0; i < ma; ++i) {
        double row = 0.0;
        for (int j = 0; j < mb; ++j) row += plan[static_cast<std::size_t>(i) * mb + j];
        row_err[i] = wa - row;
        missing += row_err[i];
    }
    if (missing > 0.0) {
        for (int i = 0; i < ma; ++i) {
            if (row_err[i] <= 0.0) continue;
            for (int j = 0; j < mb; ++j) {
                const double ce = wb - col_sums[j];
                if (ce <= 0.0) continue;
                plan[static_cast<std::size_t>(i) * mb + j] += row_err[i] * ce / missing;
            }
        }
    }

    double total = 0.0;
    for (std::size_t idx = 0; idx < plan.size(); ++idx) total += plan[idx] * cost[idx];
    result.plan_cost = total;
    result.distance = std::sqrt(std::max(total, 0.0));
    return result;
}

std::vector<ChaosRow> chaos_diagnostics(const std::vector<NetworkRun>& runs,
                                        const PathEnsemble& q, const Observable& observable,
                                        std::uint64_t seed, int subsample_cap, int n_pairs) {
    std::vector<ChaosRow> rows;
    rows.reserve(runs.size());
    for (std::size_t ri = 0; ri < runs.size(); ++ri) {
        const PathEnsemble& ens = runs[ri].ensemble;
        const int n = ens.m_paths;
        const int s = std::min({n, subsample_cap, q.m_paths});
        ChaosRow row;
        row.n = n;

        const std::uint64_t tag = 10 * ri;
        const PathEnsemble sub_run = ens.subsample(s, seed, tag);
        const PathEnsemble sub_q = q.subsample(s, seed, tag + 1);
        row.distance = vaserstein2(sub_run, sub_q, ens.n_steps).distance;

        // Same-law noise floor: disjoint halves of one 2*sb Q subsample.
        const int sb = std::min(s, q.m_paths / 2);
        if (sb >= 1) {
            const PathEnsemble pool = q.subsample(2 * sb, seed, tag + 2);
            PathEnsemble half_a = pool;
            PathEnsemble half_b = pool;
            half_a.allocate(sb, pool.n_steps, pool.pos_dim);
            half_b.allocate(sb, pool.n_steps, pool.pos_dim);
            half_a.dt = half_b.dt = pool.dt;
            for (int i = 0; i < sb; ++i) {
                for (int k = 0; k <= pool.n_steps; ++k) {
                    half_a.state(i, k) = pool.state(i, k);
                    half_b.state(i, k) = pool.state(sb + i, k);
                }
                for (int j = 0; j < pool.pos_dim; ++j) {
                    half_a.positions[static_cast<std::size_t>(i) * pool.pos_dim + j] =
                        pool.positions[static_cast<std::size_t>(i) * pool.pos_dim + j];
                    half_b.positions[static_cast<std::size_t>(i) * pool.pos_dim + j] =
                        pool.positions[static_cast<std::size_t>(sb + i) * pool.pos_dim + j];
                }
            }
            row.baseline = vaserstein2(half_a, half_b, pool.n_steps).distance;
        }

        // Cross-particle covariance of the observable over random pairs.
        std::vector<double> phi(static_cast<std::size_t>(n));
        double mean = 0.0;
        for (int i = 0; i < n; ++i) {
            phi[i] = observable(ens.path(i), ens.position(i));
            mean += phi[i];
        }
        mean /= n;
        if (n >= 2 && n_pairs > 0) {
            double sum = 0.0, sum2 = 0.0;
            for (int p = 0; p < n_pairs; ++p) {
                const std::uint64_t pi = static_cast<std::uint64_t>(p);
                const int i = static_cast<int>(rng_u64(seed, Stream::subsample, tag + 3, pi) %
                                               static_cast<std::uint64_t>(n));
                int j = static_cast<int>(rng_u64(seed, Stream::subsample, tag + 4, pi) %
                                         static_cast<std::uint64_t>(n - 1));
                if (j >= i) ++j;
                const double v = (phi[i] - mean) * (phi[j] - mean);
                sum += v;
                sum2 += v * v;
            }
            row.cross_cov = sum / n_pairs;
            const double var = std::max(sum2 / n_pairs - row.cross_cov * row.cross_cov, 0.0);
            row.cross_se = std::sqrt(var / n_pairs);
        }
        rows.push_back(row);
    }
    return rows;
}

double order_parameter(const PathEnsemble& ensemble, int t_index) {
    if (ensemble.m_paths < 1) throw DomainError("order_parameter: empty ensemble");
    if (t_index < 0 || t_index > ensemble.n_steps)
        throw DomainError("order_parameter: bad t_index");
    double c = 0.0, s = 0.0;
    for (int m = 0; m < ensemble.m_paths; ++m) {
        const double x = ensemble.state(m, t_index);
        c += std::cos(x);
        s += std::sin(x);
    }
    return std::hypot(c, s) / ensemble.m_paths;
}

}  // namespace netmf
