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

#include "netmf/model.hpp"

#include <cmath>

#include "netmf/ensemble.hpp"
#include "netmf/rng.hpp"

namespace netmf {

AdmissibilityReport check_time_horizon(const ModelParams& params, const InteractionKernel& kernel) {
    params.validate();
    params.require_positive_lambda("check_time_horizon");
    const double b = kernel.sup_bound;
    const double value =
        2.0 * params.sigma * params.sigma * b * b * params.horizon / (params.lambda * params.lambda);
    return {value, value < 1.0};
}

InteractionKernel builtin_kernel(const std::string& name, double gain) {
    InteractionKernel k;
    k.name = name;
    if (name == "kuramoto") {
        k.eval = [](double x, double y) { return std::sin(y - x); };
        k.sup_bound = 1.0;
        k.lip_x = 1.0;
        k.lip_y = 1.0;
    } else if (name == "sigmoid_gain") {
        k.eval = [gain](double, double y) { return std::tanh(gain * y); };
        k.sup_bound = 1.0;
        k.lip_x = 0.0;
        k.lip_y = gain;
    } else if (name == "bump") {
        k.eval = [](double x, double y) {
            const double d = y - x;
            return std::exp(-d * d);
        };
        k.sup_bound = 1.0;
        // max |d/dz exp(-z^2)| = sqrt(2/e) at z = 1/sqrt(2)
        k.lip_x = 0.8577638849607068;
        k.lip_y = 0.8577638849607068;
    } else {
        throw ConfigError("unknown kernel: " + name);
    }
    return k;
}

IntrinsicDrift builtin_drift(const std::string& name, double rate) {
    IntrinsicDrift d;
    d.name = name;
    if (name == "zero") {
        d.eval = [](std::span<const double>, double, double) { return 0.0; };
        d.lip = 0.0;
    } else if (name == "decay") {
        d.eval = [rate](std::span<const double>, double, double x) { return -rate * x; };
        d.lip = std::abs(rate);
    } else {
        throw ConfigError("unknown drift: " + name);
    }
    return d;
}

InitialLaw builtin_initial_law(const std::string& name, double a, double b) {
    InitialLaw law;
    law.name = name;
    if (name == "constant") {
        law.mean = [a](std::span<const double>) { return a; };
    } else if (name == "affine") {
        law.mean = [a, b](std::span<const double> r) { return r.empty() ? a : a + b * r[0]; };
    } else {
        throw ConfigError("unknown initial law: " + name);
    }
    return law;
}

void sample_initial(const ModelParams& params, const InitialLaw& law, int count,
                    std::uint64_t rng_seed, std::vector<double>& states0,
                    std::vector<double>& positions) {
    if (count < 1) throw DomainError("sample_initial: count must be >= 1");
    params.validate();
    const int d = params.position_dim;
    states0.assign(static_cast<std::size_t>(count), 0.0);
    positions.assign(static_cast<std::size_t>(count) * d, 0.0);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < d; ++j) {
            positions[static_cast<std::size_t>(i) * d + j] =
                rng_u01(rng_seed, Stream::position, static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(j));
        }
        const std::span<const double> r{positions.data() + static_cast<std::size_t>(i) * d,
                                        static_cast<std::size_t>(d)};
        const double xi = rng_normal(rng_seed, Stream::initial_state,
                                     static_cast<std::uint64_t>(i), 0);
        states0[i] = law.mean(r) + params.init_spread * xi;
    }
}

DisorderMatrix sample_disorder(int n, const ModelParams& params, std::uint64_t rng_seed) {
    if (n < 1) throw DomainError("sample_disorder: n must be >= 1");
    params.validate();
    DisorderMatrix m;
    m.n = n;
    m.seed = rng_seed;
    m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
    const double mean = params.j_bar / n;
    const double sd = params.sigma / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double z = rng_normal(rng_seed, Stream::disorder, static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(j));
            m.entries[static_cast<std::size_t>(i) * n + j] = mean + sd * z;
        }
    }
    return m;
}

PathEnsemble PathEnsemble::subsample(int count, std::uint64_t seed_, std::uint64_t tag) const {
    if (count < 0 || count > m_paths) throw DomainError("subsample: bad count");
    // Fisher-Yates prefix on an index vector, draws keyed by (seed, tag, i).
    std::vector<int> idx(static_cast<std::size_t>(m_paths));
    for (int i = 0; i < m_paths; ++i) idx[i] = i;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t span = static_cast<std::uint64_t>(m_paths - i);
        const int j =
            i + static_cast<int>(rng_u64(seed_, Stream::subsample, tag, static_cast<std::uint64_t>(i)) % span);
        std::swap(idx[i], idx[j]);
    }
    PathEnsemble out;
    out.allocate(count, n_steps, pos_dim);
    out.dt = dt;
    out.seed = seed_;
    if (has_drift_record())
        out.drift_record.assign(static_cast<std::size_t>(count) * n_steps, 0.0);
    for (int i = 0; i < count; ++i) {
        const int s = idx[i];
        for (int k = 0; k <= n_steps; ++k) out.state(i, k) = state(s, k);
        for (int j = 0; j < pos_dim; ++j)
            out.positions[static_cast<std::size_t>(i) * pos_dim + j] =
                positions[static_cast<std::size_t>(s) * pos_dim + j];
        for (int k = 0; k < n_steps; ++k) {
            out.increments[static_cast<std::size_t>(i) * n_steps + k] =
                increments[static_cast<std::size_t>(s) * n_steps + k];
            if (has_drift_record())
                out.drift_record[static_cast<std::size_t>(i) * n_steps + k] =
                    drift_record[static_cast<std::size_t>(s) * n_steps + k];
        }
    }
    return out;
}

}  // namespace netmf
