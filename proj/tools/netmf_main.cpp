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

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "netmf/config.hpp"
#include "netmf/io.hpp"
#include "netmf/measures.hpp"
#include "netmf/meanfield.hpp"
#include "netmf/network.hpp"
#include "netmf/parallel.hpp"
#include "netmf/rate.hpp"
#include "netmf/rng.hpp"
#include "netmf/tilt.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "netmf 0.1.0";

// Exit codes: 0 success, 1 usage/config/io error, 2 admissibility refusal,
// 3 numerical degeneracy, 4 non-convergence.
enum ExitCode { kOk = 0, kError = 1, kInadmissible = 2, kDegenerate = 3, kNotConverged = 4 };

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = netmf::default_threads();
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--threads", args.threads, "worker thread count");
    cmd->add_option("--seed", args.seed, "master seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    if (with_out) cmd->add_option("--out", args.out_dir, "output directory");
}

netmf::ExperimentConfig load(const CommonArgs& args) {
    netmf::ExperimentConfig cfg = netmf::load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const netmf::ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& outputs) {
    ordered_json j;
    j["command"] = command;
    j["config_digest"] = cfg.digest();
    j["seeds"] = seeds;
    j["versions"] = kVersion;
    j["outputs"] = outputs;
    j["params"] = {{"kernel", cfg.kernel_name},     {"kernel_gain", cfg.kernel_gain},
                   {"drift", cfg.drift_name},       {"drift_rate", cfg.drift_rate},
                   {"x0_mean", cfg.x0_name},        {"x0_a", cfg.x0_a},
                   {"x0_b", cfg.x0_b},              {"j_bar", cfg.params.j_bar},
                   {"sigma", cfg.params.sigma},     {"lambda", cfg.params.lambda},
                   {"init_spread", cfg.params.init_spread},
                   {"position_dim", cfg.params.position_dim}};
    j["grid"] = {{"horizon", cfg.params.horizon},
                 {"n_steps", cfg.params.n_steps},
                 {"dt", cfg.params.horizon / cfg.params.n_steps}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw netmf::Error("cannot write manifest");
    out << j.dump(2) << "\n";
}

fs::path prepare_out(const std::string& out_dir) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    return dir;
}

std::string run_id_of(const netmf::ExperimentConfig& cfg) {
    return cfg.digest().substr(0, 12) + "-" + std::to_string(cfg.seed);
}

int cmd_check(const CommonArgs& args, bool force) {
    const netmf::ExperimentConfig cfg = load(args);
    const netmf::AdmissibilityReport rep = netmf::check_time_horizon(cfg.params, cfg.kernel());
    ordered_json j;
    j["value"] = rep.value;
    j["admissible"] = rep.admissible;
    j["forced"] = force && !rep.admissible;
    std::cout << j.dump(2) << "\n";
    if (rep.admissible) return kOk;
    if (force) {
        std::cerr << "warning: time-horizon condition violated (value " << rep.value
                  << " >= 1); forced\n";
        return kOk;
    }
    return kInadmissible;
}

int cmd_simulate(const CommonArgs& args, int n_particles) {
    const netmf::ExperimentConfig cfg = load(args);
    const fs::path dir = prepare_out(args.out_dir);
    const std::uint64_t disorder_seed = netmf::derive_seed(cfg.seed, 1, 0);
    const std::uint64_t noise_seed = netmf::derive_seed(cfg.seed, 2, 0);
    const netmf::DisorderMatrix disorder =
        netmf::sample_disorder(n_particles, cfg.params, disorder_seed);
    netmf::SimulateOptions opts;
    opts.threads = args.threads;
    const netmf::NetworkRun run =
        netmf::simulate_network(cfg.params, cfg.kernel(), cfg.drift(), cfg.initial_law(), disorder,
                                cfg.grid(), noise_seed, opts);
    netmf::write_trajectories_csv((dir / "trajectories.csv").string(), run.ensemble,
                                  run_id_of(cfg));
    netmf::write_increments_csv((dir / "increments.csv").string(), run.ensemble);
    write_manifest(dir, "simulate", cfg, {cfg.seed, disorder_seed, noise_seed},
                   {"trajectories.csv", "increments.csv", "manifest.json"});
    return kOk;
}

int cmd_solve(const CommonArgs& args, int paths, double tol, int max_iter, bool force) {
    const netmf::ExperimentConfig cfg = load(args);
    const fs::path dir = prepare_out(args.out_dir);
    const netmf::FixedPointReport report =
        netmf::solve_fixed_point(cfg.params, cfg.kernel(), cfg.drift(), cfg.initial_law(),
                                 cfg.grid(), paths > 0 ? paths : cfg.paths,
                                 max_iter > 0 ? max_iter : cfg.max_iter,
                                 tol >= 0.0 ? tol : cfg.tol, cfg.seed, args.threads, force);
    netmf::write_report_json((dir / "report.json").string(), report);
    netmf::write_trajectories_csv((dir / "ensemble.csv").string(), report.final_ensemble,
                                  run_id_of(cfg));
    netmf::write_increments_csv((dir / "increments.csv").string(), report.final_ensemble);
    write_manifest(dir, "solve", cfg, {cfg.seed},
                   {"ensemble.csv", "increments.csv", "report.json", "manifest.json"});
    return report.converged ? kOk : kNotConverged;
}

int cmd_chaos(const CommonArgs& args, std::vector<int> n_list, bool quenched, int q_paths,
              int replicates, bool force) {
    const netmf::ExperimentConfig cfg = load(args);
    const fs::path dir = prepare_out(args.out_dir);
    if (n_list.empty()) n_list = cfg.n_list;
    const netmf::InteractionKernel kernel = cfg.kernel();
    const netmf::FixedPointReport q_report =
        netmf::solve_fixed_point(cfg.params, kernel, cfg.drift(), cfg.initial_law(), cfg.grid(),
                                 q_paths, cfg.max_iter, cfg.tol, cfg.seed, args.threads, force);
    const netmf::Observable observable = [&kernel](std::span<const double> path,
                                                   std::span<const double>) {
        return kernel.eval(0.0, path.back());
    };

    const int reps = quenched ? 1 : std::max(replicates, 1);
    std::vector<netmf::ChaosRow> accum;
    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t sweep_seed = netmf::derive_seed(cfg.seed, quenched ? 100 : 200, rep);
        const std::vector<netmf::NetworkRun> runs = netmf::quenched_sweep(
            cfg.params, kernel, cfg.drift(), cfg.initial_law(), n_list, sweep_seed, args.threads);
        const std::vector<netmf::ChaosRow> rows = netmf::chaos_diagnostics(
            runs, q_report.final_ensemble, observable, netmf::derive_seed(cfg.seed, 300, rep));
        if (accum.empty()) {
            accum = rows;
        } else {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                accum[i].distance += rows[i].distance;
                accum[i].baseline += rows[i].baseline;
                accum[i].cross_cov += rows[i].cross_cov;
                accum[i].cross_se += rows[i].cross_se;
            }
        }
    }
    std::ofstream csv(dir / "chaos.csv");
    if (!csv) throw netmf::Error("cannot write chaos.csv");
    csv << "n,distance,baseline,cross_cov,se\n";
    for (auto& row : accum) {
        csv << row.n << ',' << netmf::format_double(row.distance / reps) << ','
            << netmf::format_double(row.baseline / reps) << ','
            << netmf::format_double(row.cross_cov / reps) << ','
            << netmf::format_double(row.cross_se / reps) << "\n";
    }
    csv.close();
    ordered_json j;
    j["mode"] = quenched ? "quenched" : "averaged";
    j["replicates"] = reps;
    j["n_list"] = n_list;
    j["q_paths"] = q_paths;
    j["q_converged"] = q_report.converged;
    j["q_gaps"] = q_report.gaps;
    std::ofstream summary(dir / "summary.json");
    summary << j.dump(2) << "\n";
    summary.close();
    write_manifest(dir, "chaos", cfg, {cfg.seed}, {"chaos.csv", "summary.json", "manifest.json"});
    return kOk;
}

int cmd_identities(const CommonArgs& args, int fixtures, int max_size, bool corrupt) {
    const netmf::ExperimentConfig cfg = load(args);
    const netmf::IdentitySuiteResult result =
        netmf::run_identity_suite(cfg.seed, fixtures, max_size, corrupt);
    ordered_json j;
    j["fixtures"] = result.checks.size();
    j["all_pass"] = result.all_pass;
    j["moment_max_err"] = result.moment_max_err;
    double worst_residual = 0.0, worst_eig = 0.0, worst_diag = 0.0;
    for (const auto& c : result.checks) {
        worst_residual = std::max(worst_residual, c.telescope_residual);
        worst_eig = std::min(worst_eig, c.loewner_min_eig);
        worst_diag = std::max(worst_diag, c.diag_violation);
    }
    j["max_telescope_residual"] = worst_residual;
    j["min_loewner_eig"] = worst_eig;
    j["max_diag_violation"] = worst_diag;
    std::cout << j.dump(2) << "\n";
    return result.all_pass ? kOk : kError;
}

int cmd_rate(const CommonArgs& args, const std::string& run_dir) {
    const netmf::ExperimentConfig cfg = load(args);
    const fs::path dir = prepare_out(args.out_dir);
    const fs::path run(run_dir);
    netmf::PathEnsemble q = netmf::read_ensemble_csv((run / "ensemble.csv").string(),
                                                     (run / "increments.csv").string());
    netmf::FixedPointReport report;
    report.final_ensemble = std::move(q);
    report.converged = true;
    const netmf::PathEnsemble& ens = report.final_ensemble;

    const netmf::Estimate gamma =
        netmf::gamma_estimate(ens, ens, cfg.params, cfg.kernel(), args.threads);
    const netmf::Estimate entropy = netmf::entropy_girsanov(ens);
    const netmf::Estimate h = netmf::h_at_fixed_point(report, cfg.params, cfg.kernel(), args.threads);

    ordered_json j;
    const auto pack = [&](const netmf::Estimate& e) {
        return ordered_json{{"value", e.value}, {"se", e.se}};
    };
    j["gamma"] = pack(gamma);
    j["entropy_girsanov"] = pack(entropy);
    j["h_at_fixed_point"] = pack(h);
    j["m_paths"] = ens.m_paths;
    j["n_steps"] = ens.n_steps;
    j["seeds"] = {cfg.seed};
    std::ofstream out(dir / "rate.json");
    if (!out) throw netmf::Error("cannot write rate.json");
    out << j.dump(2) << "\n";
    write_manifest(dir, "rate", cfg, {cfg.seed}, {"rate.json", "manifest.json"});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"netmf: disordered interacting diffusions and their mean-field limit"};
    app.require_subcommand(1);

    CommonArgs check_args;
    bool check_force = false;
    CLI::App* check = app.add_subcommand("check", "time-horizon admissibility report");
    add_common(check, check_args, false);
    check->add_flag("--force", check_force, "downgrade refusal to a warning");

    CommonArgs sim_args;
    int sim_n = 64;
    CLI::App* simulate = app.add_subcommand("simulate", "finite-N disordered network run");
    add_common(simulate, sim_args);
    simulate->add_option("--n", sim_n, "particle count");

    CommonArgs solve_args;
    int solve_paths = 0, solve_max_iter = 0;
    double solve_tol = -1.0;
    bool solve_force = false;
    CLI::App* solve = app.add_subcommand("solve", "fixed-point solve of the mean-field limit");
    add_common(solve, solve_args);
    solve->add_option("--paths", solve_paths, "ensemble size");
    solve->add_option("--tol", solve_tol, "convergence tolerance");
    solve->add_option("--max-iter", solve_max_iter, "iteration cap");
    solve->add_flag("--force", solve_force, "run despite an inadmissible horizon");

    CommonArgs chaos_args;
    std::vector<int> chaos_n_list;
    bool chaos_quenched = false, chaos_force = false;
    int chaos_q_paths = 512, chaos_replicates = 1;
    CLI::App* chaos = app.add_subcommand("chaos", "convergence diagnostics across N");
    add_common(chaos, chaos_args);
    chaos->add_option("--n-list", chaos_n_list, "network sizes")->delimiter(',');
    chaos->add_flag("--quenched", chaos_quenched, "fix one disorder realization per N");
    chaos->add_option("--q-paths", chaos_q_paths, "limit ensemble size");
    chaos->add_option("--replicates", chaos_replicates, "averaged-mode replicates");
    chaos->add_flag("--force", chaos_force, "run despite an inadmissible horizon");

    CommonArgs id_args;
    int id_fixtures = 20, id_max_size = 48;
    bool id_corrupt = false;
    CLI::App* identities = app.add_subcommand("identities", "tilting identity self checks");
    add_common(identities, id_args, false);
    identities->add_option("--fixtures", id_fixtures, "number of random fixtures");
    identities->add_option("--max-size", id_max_size, "largest covariance size");
    identities->add_flag("--corrupt", id_corrupt, "inject an indefinite covariance (negative test)");

    CommonArgs rate_args;
    std::string rate_run;
    CLI::App* rate = app.add_subcommand("rate", "entropy and rate-function estimates for a solve");
    add_common(rate, rate_args);
    rate->add_option("--run", rate_run, "directory of a solve output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(check_args, check_force);
        if (simulate->parsed()) return cmd_simulate(sim_args, sim_n);
        if (solve->parsed())
            return cmd_solve(solve_args, solve_paths, solve_tol, solve_max_iter, solve_force);
        if (chaos->parsed())
            return cmd_chaos(chaos_args, chaos_n_list, chaos_quenched, chaos_q_paths,
                             chaos_replicates, chaos_force);
        if (identities->parsed()) return cmd_identities(id_args, id_fixtures, id_max_size, id_corrupt);
        if (rate->parsed()) return cmd_rate(rate_args, rate_run);
    } catch (const netmf::AdmissibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInadmissible;
    } catch (const netmf::NumericalDegeneracy& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
