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

#include <stdexcept>
#include <string>

namespace netmf {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration file, unknown kernel/drift name, invalid parameter.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Function called outside its domain (empty ensemble, mismatched grids, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Time-horizon condition violated and the caller did not force the run.
struct AdmissibilityError : Error {
    explicit AdmissibilityError(const std::string& msg) : Error(msg) {}
};

// Factorization breakdown or other unrecoverable loss of positivity.
struct NumericalDegeneracy : Error {
    explicit NumericalDegeneracy(const std::string& msg) : Error(msg) {}
};

// A simulated state became non-finite.
struct SimulationDiverged : Error {
    SimulationDiverged(const std::string& msg, int path, int step)
        : Error(msg), path_index(path), step_index(step) {}
    int path_index;
    int step_index;
};

}  // namespace netmf
