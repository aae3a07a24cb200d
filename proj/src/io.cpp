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

#include "netmf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace netmf {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectories_csv(const std::string& path, const PathEnsemble& ensemble,
                            const std::string& run_id) {
    std::ofstream out = open_out(path);
    out << "run_id,particle,t";
    out << ",x";
    for (int j = 0; j < ensemble.pos_dim; ++j) out << ",r" << j;
    out << "\n";
    for (int p = 0; p < ensemble.m_paths; ++p) {
        for (int k = 0; k <= ensemble.n_steps; ++k) {
            out << run_id << ',' << p << ',' << format_double(k * ensemble.dt) << ','
                << format_double(ensemble.state(p, k));
            for (int j = 0; j < ensemble.pos_dim; ++j)
                out << ',' << format_double(ensemble.positions[static_cast<std::size_t>(p) * ensemble.pos_dim + j]);
            out << "\n";
        }
    }
}

void write_increments_csv(const std::string& path, const PathEnsemble& ensemble) {
    std::ofstream out = open_out(path);
    out << "particle,step,dw,drift\n";
    for (int p = 0; p < ensemble.m_paths; ++p) {
        const auto dw = ensemble.path_increments(p);
        const auto drift = ensemble.path_drift(p);
        for (int k = 0; k < ensemble.n_steps; ++k) {
            out << p << ',' << k << ',' << format_double(dw[k]) << ','
                << format_double(drift.empty() ? 0.0 : drift[k]) << "\n";
        }
    }
}

PathEnsemble read_ensemble_csv(const std::string& trajectories_path,
                               const std::string& increments_path) {
    std::ifstream traj(trajectories_path);
    if (!traj) throw Error("cannot open " + trajectories_path);
    std::string line;
    if (!std::getline(traj, line)) throw Error("empty trajectories file");
    const auto header = split(line, ',');
    if (header.size() < 4 || header[0] != "run_id") throw Error("bad trajectories header");
    const int pos_dim = static_cast<int>(header.size()) - 4;

    struct Row {
        int particle;
        double t, x;
        std::vector<double> r;
    };
    std::vector<Row> rows;
    while (std::getline(traj, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (static_cast<int>(f.size()) != 4 + pos_dim) throw Error("bad trajectories row");
        Row row;
        row.particle = std::stoi(f[1]);
        row.t = std::stod(f[2]);
        row.x = std::stod(f[3]);
        for (int j = 0; j < pos_dim; ++j) row.r.push_back(std::stod(f[4 + j]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("no trajectory rows");
    int m_paths = 0;
    for (const auto& row : rows) m_paths = std::max(m_paths, row.particle + 1);
    const int rows_per_path = static_cast<int>(rows.size()) / m_paths;
    if (rows_per_path < 1 || static_cast<int>(rows.size()) != m_paths * rows_per_path)
        throw Error("ragged trajectories file");
    const int n_steps = rows_per_path - 1;

    PathEnsemble ens;
    ens.allocate(m_paths, n_steps, pos_dim);
    std::vector<int> seen(static_cast<std::size_t>(m_paths), 0);
    for (const auto& row : rows) {
        const int k = seen[row.particle]++;
        if (k > n_steps) throw Error("too many rows for particle");
        ens.state(row.particle, k) = row.x;
        if (k == 1) ens.dt = row.t;
        if (k == 0)
            for (int j = 0; j < pos_dim; ++j)
                ens.positions[static_cast<std::size_t>(row.particle) * pos_dim + j] = row.r[j];
    }
    if (n_steps >= 1 && !(ens.dt > 0.0)) throw Error("could not infer dt");

    std::ifstream inc(increments_path);
    if (!inc) throw Error("cannot open " + increments_path);
    if (!std::getline(inc, line)) throw Error("empty increments file");
    if (line != "particle,step,dw,drift") throw Error("bad increments header");
    ens.drift_record.assign(static_cast<std::size_t>(m_paths) * n_steps, 0.0);
    while (std::getline(inc, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 4) throw Error("bad increments row");
        const int p = std::stoi(f[0]);
        const int k = std::stoi(f[1]);
        if (p < 0 || p >= m_paths || k < 0 || k >= n_steps) throw Error("increment row out of range");
        ens.increments[static_cast<std::size_t>(p) * n_steps + k] = std::stod(f[2]);
        ens.drift_record[static_cast<std::size_t>(p) * n_steps + k] = std::stod(f[3]);
    }
    return ens;
}

void write_report_json(const std::string& path, const FixedPointReport& report) {
    nlohmann::ordered_json j;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["tol"] = report.tol;
    j["gaps"] = report.gaps;
    j["admissibility"] = {{"value", report.admissibility.value},
                          {"admissible", report.admissibility.admissible}};
    j["m_paths"] = report.m_paths;
    j["n_steps"] = report.n_steps;
    j["seed"] = report.seed;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace netmf
