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

#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "netmf/errors.hpp"

namespace netmf {

// Scalar model constants. j_bar/sigma set the mean and std scale of the
// random couplings (each entry ~ N(j_bar/N, sigma^2/N)), lambda the noise
// amplitude, horizon the final time T. position_dim is the dimension of the
// spatial label r in [0,1]^d (0 = no labels); init_spread the std of the
// Gaussian jitter applied around the configured initial mean profile.
struct ModelParams {
    double j_bar = 0.0;
    double sigma = 0.0;
    double lambda = 1.0;
    double horizon = 1.0;
    int n_steps = 64;
    int position_dim = 0;
    double init_spread = 0.0;

    // Structural validity. lambda == 0 is allowed here so that noise-free
    // simulations run; everything that divides by lambda checks > 0 itself.
    void validate() const {
        if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
        if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
        if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
        if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
        if (position_dim < 0) throw ConfigError("position_dim must be >= 0");
        if (!(init_spread >= 0.0)) throw ConfigError("init_spread must be >= 0");
    }

    void require_positive_lambda(const char* what) const {
        if (!(lambda > 0.0)) throw DomainError(std::string(what) + " requires lambda > 0");
    }
};

// Pairwise interaction b(x, y): the impact of a particle in state y on a
// particle in state x. The bounds are declared, not computed; tests spot
// check them on random argument pairs.
struct InteractionKernel {
    std::string name;
    std::function<double(double, double)> eval;
    double sup_bound = 1.0;
    double lip_x = 0.0;
    double lip_y = 0.0;
};

// Intrinsic single-particle drift f(r, t, x), Lipschitz in x with declared
// constant.
struct IntrinsicDrift {
    std::string name;
    std::function<double(std::span<const double>, double, double)> eval;
    double lip = 0.0;
};

// Initial mean profile x0(r); initial states are x0(r) + init_spread * xi.
struct InitialLaw {
    std::string name;
    std::function<double(std::span<const double>)> mean;
};

// Uniform grid t_k = k * dt on [0, horizon].
struct TimeGrid {
    double horizon = 1.0;
    int n_steps = 1;
    double dt = 1.0;

    TimeGrid() = default;
    TimeGrid(double horizon_, int n_steps_) : horizon(horizon_), n_steps(n_steps_) {
        if (n_steps < 1 || !(horizon > 0.0)) throw ConfigError("invalid time grid");
        dt = horizon / n_steps;
    }
    static TimeGrid from_params(const ModelParams& p) { return TimeGrid(p.horizon, p.n_steps); }
    double node(int k) const { return k * dt; }
};

struct AdmissibilityReport {
    double value = 0.0;
    bool admissible = false;
};

// Time-horizon condition: 2 sigma^2 ||b||_inf^2 T / lambda^2, admissible iff
// strictly below 1.
AdmissibilityReport check_time_horizon(const ModelParams& params, const InteractionKernel& kernel);

// Builtin kernels: kuramoto b(x,y)=sin(y-x); sigmoid_gain b(x,y)=tanh(gain*y);
// bump b(x,y)=exp(-(y-x)^2). Unknown names throw ConfigError.
InteractionKernel builtin_kernel(const std::string& name, double gain = 1.0);

// Builtin drifts: zero f=0; decay f=-rate*x. Unknown names throw ConfigError.
IntrinsicDrift builtin_drift(const std::string& name, double rate = 1.0);

// Builtin initial means: constant x0(r)=a; affine x0(r)=a+b*r[0] (a when d=0).
InitialLaw builtin_initial_law(const std::string& name, double a = 0.0, double b = 0.0);

}  // namespace netmf
