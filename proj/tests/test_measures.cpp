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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netmf/meanfield.hpp"
#include "netmf/measures.hpp"
#include "oracles.hpp"

using namespace netmf;

namespace {

PathEnsemble constant_paths(const std::vector<double>& levels, int n_steps, double dt,
                            const std::vector<std::vector<double>>& positions = {}) {
    PathEnsemble ens;
    const int dim = positions.empty() ? 0 : static_cast<int>(positions[0].size());
    ens.allocate(static_cast<int>(levels.size()), n_steps, dim);
    ens.dt = dt;
    for (std::size_t p = 0; p < levels.size(); ++p) {
        for (int k = 0; k <= n_steps; ++k) ens.state(static_cast<int>(p), k) = levels[p];
        for (int j = 0; j < dim; ++j)
            ens.positions[p * dim + j] = positions[p][j];
    }
    return ens;
}

PathEnsemble random_ensemble(int m, int n_steps, int dim, std::uint64_t seed) {
    PathEnsemble ens;
    ens.allocate(m, n_steps, dim);
    ens.dt = 1.0 / n_steps;
    for (int p = 0; p < m; ++p) {
        for (int k = 0; k <= n_steps; ++k)
            ens.state(p, k) = rng_normal(seed, Stream::fixture, p, k);
        for (int j = 0; j < dim; ++j)
            ens.positions[static_cast<std::size_t>(p) * dim + j] =
                rng_u01(seed, Stream::fixture, 1000 + p, j);
    }
    return ens;
}

}  // namespace

TEST_CASE("path distance examples") {
    const PathEnsemble a = constant_paths({0.0}, 4, 0.25);
    const PathEnsemble b = constant_paths({1.0}, 4, 0.25);
    CHECK(path_distance(a, 0, a, 0, 4) == 0.0);
    CHECK(path_distance(a, 0, b, 0, 4) == 1.0);

    const PathEnsemble ap = constant_paths({0.0}, 4, 0.25, {{0.0, 0.0}});
    const PathEnsemble bp = constant_paths({1.0}, 4, 0.25, {{1.0, 0.0}});
    CHECK(path_distance(ap, 0, bp, 0, 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("path distance is monotone in the horizon") {
    const PathEnsemble a = random_ensemble(1, 16, 2, 3);
    const PathEnsemble b = random_ensemble(1, 16, 2, 4);
    double prev = 0.0;
    for (int t = 0; t <= 16; ++t) {
        const double d = path_distance(a, 0, b, 0, t);
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("grid mismatch is rejected") {
    const PathEnsemble a = constant_paths({0.0}, 4, 0.25);
    const PathEnsemble b = constant_paths({0.0}, 5, 0.2);
    CHECK_THROWS_AS(vaserstein2(a, b, 4), DomainError);
}

TEST_CASE("vaserstein examples") {
    const PathEnsemble a = constant_paths({0.25, 0.5, -1.0}, 3, 0.25);
    CHECK(vaserstein2(a, a, 3).distance == 0.0);

    PathEnsemble shuffled = constant_paths({-1.0, 0.25, 0.5}, 3, 0.25);
    CHECK(vaserstein2(a, shuffled, 3).distance == doctest::Approx(0.0).epsilon(1e-12));

    const PathEnsemble s1 = constant_paths({0.3}, 3, 0.25);
    const PathEnsemble s2 = constant_paths({-0.4}, 3, 0.25);
    CHECK(vaserstein2(s1, s2, 3).distance ==
          doctest::Approx(path_distance(s1, 0, s2, 0, 3)).epsilon(1e-15));

    const PathEnsemble two_a = constant_paths({0.0, 1.0}, 3, 0.25);
    const PathEnsemble two_b = constant_paths({0.5, 0.5}, 3, 0.25);
    CHECK(vaserstein2(two_a, two_b, 3).distance == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("exact mode preconditions") {
    const PathEnsemble a = constant_paths({0.0, 1.0}, 2, 0.5);
    const PathEnsemble b = constant_paths({0.0}, 2, 0.5);
    CHECK_THROWS_AS(vaserstein2(a, b, 2, TransportMethod::exact), DomainError);
}

TEST_CASE("exact mode agrees with brute force") {
    for (int m = 2; m <= 8; ++m) {
        for (int trial = 0; trial < 4; ++trial) {
            const PathEnsemble a = random_ensemble(m, 6, 1, 100 + m * 10 + trial);
            const PathEnsemble b = random_ensemble(m, 6, 1, 200 + m * 10 + trial);
            const double exact = vaserstein2(a, b, 6).distance;
            const double brute = oracles::brute_force_w2(a, b, 6);
            REQUIRE(exact == doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("metric properties on random triples") {
    for (int trial = 0; trial < 10; ++trial) {
        const PathEnsemble a = random_ensemble(6, 5, 1, 300 + trial);
        const PathEnsemble b = random_ensemble(6, 5, 1, 400 + trial);
        const PathEnsemble c = random_ensemble(6, 5, 1, 500 + trial);
        const double ab = vaserstein2(a, b, 5).distance;
        const double ba = vaserstein2(b, a, 5).distance;
        const double bc = vaserstein2(b, c, 5).distance;
        const double ac = vaserstein2(a, c, 5).distance;
        REQUIRE(ab >= 0.0);
        REQUIRE(std::abs(ab - ba) < 1e-10);
        REQUIRE(ac <= ab + bc + 1e-10);
    }
}

TEST_CASE("entropic estimate sits above the exact value") {
    for (const int m : {4, 16, 64}) {
        for (int trial = 0; trial < 4; ++trial) {
            const PathEnsemble a = random_ensemble(m, 8, 0, 600 + m + trial);
            const PathEnsemble b = random_ensemble(m, 8, 0, 700 + m + trial);
            const auto exact = vaserstein2(a, b, 8, TransportMethod::exact);
            const auto entropic = vaserstein2(a, b, 8, TransportMethod::entropic);
            REQUIRE(entropic.plan_cost >= exact.plan_cost - 1e-9);
            REQUIRE(entropic.epsilon > 0.0);
        }
    }
}

TEST_CASE("order parameter") {
    const PathEnsemble aligned = constant_paths({0.7, 0.7, 0.7}, 2, 0.5);
    CHECK(order_parameter(aligned, 2) == doctest::Approx(1.0).epsilon(1e-12));

    const int m = 16;
    std::vector<double> phases(m);
    for (int i = 0; i < m; ++i) phases[i] = 2.0 * M_PI * i / m;
    CHECK(order_parameter(constant_paths(phases, 2, 0.5), 1) ==
          doctest::Approx(0.0).epsilon(1e-12));

    const PathEnsemble pair = constant_paths({0.0, M_PI / 2.0}, 2, 0.5);
    CHECK(order_parameter(pair, 0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("subsampling is deterministic and within range") {
    const PathEnsemble ens = random_ensemble(40, 6, 1, 800);
    const PathEnsemble a = ens.subsample(12, 5, 1);
    const PathEnsemble b = ens.subsample(12, 5, 1);
    CHECK(a.states == b.states);
    CHECK(a.m_paths == 12);
    CHECK_THROWS_AS(ens.subsample(41, 5, 1), DomainError);
}

TEST_CASE("chaos diagnostics on the uncoupled model") {
    ModelParams p;
    p.j_bar = 0.0;
    p.sigma = 0.0;
    p.lambda = 1.0;
    p.horizon = 0.5;
    p.n_steps = 16;
    p.init_spread = 1.0;
    const InteractionKernel kernel = builtin_kernel("kuramoto");
    const InitialLaw law = builtin_initial_law("constant", 0.0);
    const IntrinsicDrift drift = builtin_drift("zero");
    const TimeGrid grid = TimeGrid::from_params(p);

    const auto runs = quenched_sweep(p, kernel, drift, law, {32, 96}, 71);
    const PathEnsemble q = uncoupled_ensemble(192, p, drift, law, grid, 999);
    const Observable obs = [](std::span<const double> path, std::span<const double>) {
        return std::sin(path.back());
    };
    const auto rows = chaos_diagnostics(runs, q, obs, 17, 64, 500);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        // Same law on both sides: the distance is a noise floor of the same
        // order as the baseline, and particles are uncorrelated.
        CHECK(row.distance < 2.0 * row.baseline);
        CHECK(row.baseline > 0.0);
        CHECK(std::abs(row.cross_cov) <= 3.0 * row.cross_se);
    }
}
