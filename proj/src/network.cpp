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

#include "netmf/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "netmf/parallel.hpp"
#include "netmf/rng.hpp"

namespace netmf {

NetworkRun simulate_network(const ModelParams& params, const InteractionKernel& kernel,
                            const IntrinsicDrift& drift, const InitialLaw& law,
                            const DisorderMatrix& disorder, const TimeGrid& grid,
                            std::uint64_t rng_seed, const SimulateOptions& opts) {
    params.validate();
    const int n = disorder.n;
    if (n < 1) throw DomainError("simulate_network: empty disorder matrix");

    std::vector<std::uint64_t> streams = opts.particle_streams;
    if (streams.empty()) {
        streams.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) streams[i] = static_cast<std::uint64_t>(i);
    }
    if (static_cast<int>(streams.size()) != n)
        throw DomainError("simulate_network: particle_streams size mismatch");

    // The interaction sum runs in ascending stream order: a fixed order per
    // run, and one that permutes exactly with the particle labels.
    std::vector<int> sum_order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sum_order[i] = i;
    std::stable_sort(sum_order.begin(), sum_order.end(),
                     [&streams](int a, int b) { return streams[a] < streams[b]; });

    NetworkRun run;
    run.disorder = disorder;
    run.params = params;
    run.grid = grid;
    PathEnsemble& ens = run.ensemble;
    ens.allocate(n, grid.n_steps, params.position_dim);
    ens.dt = grid.dt;
    ens.seed = rng_seed;
    const bool record_drift = params.lambda > 0.0;
    if (record_drift)
        ens.drift_record.assign(static_cast<std::size_t>(n) * grid.n_steps, 0.0);

    // Initial conditions keyed by stream id so index permutations line up.
    const int d = params.position_dim;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j)
            ens.positions[static_cast<std::size_t>(i) * d + j] =
                rng_u01(rng_seed, Stream::position, streams[i], static_cast<std::uint64_t>(j));
        const double xi = rng_normal(rng_seed, Stream::initial_state, streams[i], 0);
        ens.state(i, 0) = law.mean(ens.position(i)) + params.init_spread * xi;
    }

    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> prev(static_cast<std::size_t>(n));
    // Each step reads the frozen step-k state vector and writes step k+1;
    // particles parallelize freely within a step.
    for (int k = 0; k < grid.n_steps; ++k) {
        for (int i = 0; i < n; ++i) prev[i] = ens.state(i, k);
        const double t = grid.node(k);
        std::atomic<int> bad_particle{-1};
        parallel_for(n, opts.threads, [&](int i) {
            const double x = prev[i];
            double coupling = 0.0;
            for (const int j : sum_order) coupling += disorder.entry(i, j) * kernel.eval(x, prev[j]);
            const double f = drift.eval(ens.position(i), t, x);
            const double dw =
                sqrt_dt * rng_normal(rng_seed, Stream::brownian, streams[i],
                                     static_cast<std::uint64_t>(k));
            const double next = x + (f + coupling) * dt + params.lambda * dw;
            ens.increments[static_cast<std::size_t>(i) * grid.n_steps + k] = dw;
            if (record_drift)
                ens.drift_record[static_cast<std::size_t>(i) * grid.n_steps + k] =
                    coupling / params.lambda;
            ens.state(i, k + 1) = next;
            if (!std::isfinite(next)) bad_particle.store(i, std::memory_order_relaxed);
        });
        const int bad = bad_particle.load();
        if (bad >= 0)
            throw SimulationDiverged("simulate_network: non-finite state at particle " +
                                         std::to_string(bad) + ", step " + std::to_string(k + 1),
                                     bad, k + 1);
    }
    return run;
}

std::vector<NetworkRun> quenched_sweep(const ModelParams& params, const InteractionKernel& kernel,
                                       const IntrinsicDrift& drift, const InitialLaw& law,
                                       const std::vector<int>& n_list, std::uint64_t master_seed,
                                       int threads) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw DomainError("quenched_sweep: n_list must increase");
    const TimeGrid grid = TimeGrid::from_params(params);
    std::vector<NetworkRun> runs;
    runs.reserve(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const std::uint64_t disorder_seed = derive_seed(master_seed, 1, i);
        const std::uint64_t noise_seed = derive_seed(master_seed, 2, i);
        const DisorderMatrix disorder = sample_disorder(n_list[i], params, disorder_seed);
        SimulateOptions opts;
        opts.threads = threads;
        runs.push_back(simulate_network(params, kernel, drift, law, disorder, grid, noise_seed, opts));
    }
    return runs;
}

}  // namespace netmf
