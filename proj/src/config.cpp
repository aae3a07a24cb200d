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

#include "netmf/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace netmf {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("bad seed value for " + key + ": '" + value + "'");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "drift = " << drift_name << "\n";
    out << "drift_rate = " << fmt(drift_rate) << "\n";
    out << "horizon = " << fmt(params.horizon) << "\n";
    out << "init_spread = " << fmt(params.init_spread) << "\n";
    out << "j_bar = " << fmt(params.j_bar) << "\n";
    out << "kernel = " << kernel_name << "\n";
    out << "kernel_gain = " << fmt(kernel_gain) << "\n";
    out << "lambda = " << fmt(params.lambda) << "\n";
    out << "max_iter = " << max_iter << "\n";
    out << "n_list = ";
    for (std::size_t i = 0; i < n_list.size(); ++i) out << (i ? "," : "") << n_list[i];
    out << "\n";
    out << "n_steps = " << params.n_steps << "\n";
    out << "paths = " << paths << "\n";
    out << "position_dim = " << params.position_dim << "\n";
    out << "seed = " << seed << "\n";
    out << "sigma = " << fmt(params.sigma) << "\n";
    out << "tol = " << fmt(tol) << "\n";
    out << "x0_a = " << fmt(x0_a) << "\n";
    out << "x0_b = " << fmt(x0_b) << "\n";
    out << "x0_mean = " << x0_name << "\n";
    return out.str();
}

std::string ExperimentConfig::digest() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "kernel") cfg.kernel_name = value;
        else if (key == "kernel_gain") cfg.kernel_gain = parse_double(key, value);
        else if (key == "drift") cfg.drift_name = value;
        else if (key == "drift_rate") cfg.drift_rate = parse_double(key, value);
        else if (key == "x0_mean") cfg.x0_name = value;
        else if (key == "x0_a") cfg.x0_a = parse_double(key, value);
        else if (key == "x0_b") cfg.x0_b = parse_double(key, value);
        else if (key == "j_bar") cfg.params.j_bar = parse_double(key, value);
        else if (key == "sigma") cfg.params.sigma = parse_double(key, value);
        else if (key == "lambda") cfg.params.lambda = parse_double(key, value);
        else if (key == "horizon") cfg.params.horizon = parse_double(key, value);
        else if (key == "n_steps") cfg.params.n_steps = parse_int(key, value);
        else if (key == "position_dim") cfg.params.position_dim = parse_int(key, value);
        else if (key == "init_spread") cfg.params.init_spread = parse_double(key, value);
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "paths") cfg.paths = parse_int(key, value);
        else if (key == "tol") cfg.tol = parse_double(key, value);
        else if (key == "max_iter") cfg.max_iter = parse_int(key, value);
        else if (key == "n_list") {
            cfg.n_list.clear();
            std::istringstream vals(value);
            std::string item;
            while (std::getline(vals, item, ','))
                cfg.n_list.push_back(parse_int(key, trim(item)));
            if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty");
        } else {
            throw ConfigError("unknown config key: '" + key + "'");
        }
    }
    cfg.params.validate();
    // Fail fast on bad names.
    cfg.kernel();
    cfg.drift();
    cfg.initial_law();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace netmf
