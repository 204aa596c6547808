#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hca/attack.hpp"
#include "hca/errors.hpp"
#include "hca/io.hpp"
#include "hca/scenarios.hpp"

namespace fs = std::filesystem;
using hca::io::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitUsage = 64;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

fs::path out_root() {
    if (const char* env = std::getenv("HCA_OUT_ROOT")) return fs::path(env);
    return fs::path("runs");
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(hca::io::read_file(path));
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& config_path, const json& resolved,
                    const std::vector<std::string>& artifacts, double wall_seconds) {
    for (const std::string& name : artifacts)
        if (!fs::exists(dir / name))
            throw hca::PreconditionError("manifest: artifact missing: " + name);
    json m;
    m["command"] = command;
    m["config_path"] = config_path;
    m["resolved_config"] = resolved;
    m["out_dir"] = dir.string();
    m["versions"] = {{"hca", kVersion}, {"result_format", 1}};
    m["artifacts"] = artifacts;
    m["wall_seconds"] = wall_seconds;
    hca::io::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

void print_attack_line(const std::string& prefix, const hca::AttackReport& rep) {
    std::cout << prefix << " success=" << (rep.success ? "true" : "false")
              << " delta_h=" << hca::io::format_double(rep.delta_h)
              << " rel_cost_gap=" << hca::io::format_double(rep.rel_cost_gap)
              << " shd=" << rep.shd_codes << "\n";
}

hca::VaccinationScmParams scm_params_from_json(const json& j) {
    hca::VaccinationScmParams p;
    if (j.is_null()) return p;
    p.wealth_mu = j.value("wealth_mu", p.wealth_mu);
    p.wealth_sigma = j.value("wealth_sigma", p.wealth_sigma);
    p.health_intercept = j.value("health_intercept", p.health_intercept);
    p.health_wealth = j.value("health_wealth", p.health_wealth);
    p.health_noise_sd = j.value("health_noise_sd", p.health_noise_sd);
    p.priority_intercept = j.value("priority_intercept", p.priority_intercept);
    p.priority_health = j.value("priority_health", p.priority_health);
    p.priority_wealth = j.value("priority_wealth", p.priority_wealth);
    p.priority_noise_sd = j.value("priority_noise_sd", p.priority_noise_sd);
    return p;
}

json scm_params_to_json(const hca::VaccinationScmParams& p) {
    return {{"wealth_mu", p.wealth_mu},
            {"wealth_sigma", p.wealth_sigma},
            {"health_intercept", p.health_intercept},
            {"health_wealth", p.health_wealth},
            {"health_noise_sd", p.health_noise_sd},
            {"priority_intercept", p.priority_intercept},
            {"priority_health", p.priority_health},
            {"priority_wealth", p.priority_wealth},
            {"priority_noise_sd", p.priority_noise_sd}};
}

struct ScenarioArgs {
    std::string name;
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int horizon = 0;
    bool horizon_given = false;
    unsigned sweep = 1;
};

int run_scenario(const ScenarioArgs& args) {
    const double t0 = now_seconds();
    const json cfg = load_config(args.config_path);
    if (cfg.contains("scenario") &&
        cfg.at("scenario").get<std::string>() != args.name)
        throw hca::ConfigError("config file names scenario \"" +
                               cfg.at("scenario").get<std::string>() +
                               "\" but the command line says \"" + args.name + "\"");

    const std::uint64_t seed =
        args.seed_given ? args.seed : cfg.value("seed", std::uint64_t{0});
    json resolved;
    resolved["scenario"] = args.name;
    resolved["seed"] = seed;
    resolved["sweep"] = args.sweep;

    std::vector<std::string> artifacts;
    fs::path dir;

    if (args.name == "vaccination" || args.name == "shortest-path") {
        const bool vac = args.name == "vaccination";
        hca::AttackConfig base = vac ? hca::vaccination_default_config()
                                     : hca::shortest_path_default_config();
        const hca::AttackConfig ac =
            hca::io::attack_config_from_json(cfg.value("attack", json()), base);
        resolved["attack"] = hca::io::attack_config_to_json(ac);

        std::size_t n_people = 25, n_spots = 10;
        hca::VaccinationScmParams params;
        hca::Graph graph;
        std::string source = "NY", target = "SF", graph_file;
        if (vac) {
            const json v = cfg.value("vaccination", json::object());
            n_people = v.value("n_people", n_people);
            n_spots = v.value("n_spots", n_spots);
            params = scm_params_from_json(v.value("scm", json()));
            resolved["vaccination"] = {{"n_people", n_people},
                                       {"n_spots", n_spots},
                                       {"scm", scm_params_to_json(params)}};
        } else {
            const json s = cfg.value("shortest_path", json::object());
            graph_file = s.value("graph_file", std::string());
            source = s.value("source", source);
            target = s.value("target", target);
            graph = graph_file.empty()
                        ? hca::na_route_fixture()
                        : hca::io::graph_from_edges_csv(hca::io::read_file(graph_file));
            resolved["shortest_path"] = {
                {"graph_file", graph_file.empty() ? "builtin" : graph_file},
                {"source", source},
                {"target", target}};
        }

        dir = args.out.empty()
                  ? out_root() / (args.name + "-seed" + std::to_string(seed))
                  : fs::path(args.out);
        for (unsigned k = 0; k < args.sweep; ++k) {
            const std::uint64_t run_seed = seed + k;
            hca::ScenarioResult res =
                vac ? hca::scenario_vaccination(n_people, n_spots, run_seed, ac, params)
                    : hca::scenario_shortest_path(graph, source, target, run_seed, ac);
            const fs::path sub =
                args.sweep == 1 ? dir : dir / ("seed" + std::to_string(run_seed));
            const std::string prefix =
                args.sweep == 1 ? "" : "seed" + std::to_string(run_seed) + "/";
            for (const std::string& f : hca::io::write_scenario_artifacts(sub, res))
                artifacts.push_back(prefix + f);
            print_attack_line("scenario=" + args.name +
                                  " seed=" + std::to_string(run_seed),
                              res.report);
        }
    } else if (args.name == "energy") {
        const json e = cfg.value("energy", json::object());
        hca::EnergyParams params;
        params.c_bat = e.value("c_bat", 300.0);
        params.c_ele = e.value("c_ele", 0.25);
        params.c_gas = e.value("c_gas", 0.25);
        params.u_gas = e.value("u_gas", 0.0);
        params.total_demand = e.value("annual_demand_kwh", 3000.0);
        const std::vector<double> variants =
            e.value("c_pv_variants", std::vector<double>{0.005, 0.001});
        params.c_pv = variants.front();
        const int horizon = args.horizon_given ? args.horizon
                                               : e.value("horizon_hours", 168);
        const std::string profiles_file = e.value("profiles_file", std::string());
        hca::EnergyProfiles profiles;
        if (!profiles_file.empty())
            profiles = hca::io::profiles_from_csv(hca::io::read_file(profiles_file));
        resolved["energy"] = {{"c_bat", params.c_bat},
                              {"c_ele", params.c_ele},
                              {"c_gas", params.c_gas},
                              {"u_gas", params.u_gas},
                              {"annual_demand_kwh", params.total_demand},
                              {"c_pv_variants", variants},
                              {"horizon_hours", horizon},
                              {"profiles_file",
                               profiles_file.empty() ? "synthesized" : profiles_file}};

        dir = args.out.empty()
                  ? out_root() / (args.name + "-t" + std::to_string(horizon))
                  : fs::path(args.out);
        hca::ScenarioResult res =
            hca::scenario_energy(params, horizon, profiles, variants);
        artifacts = hca::io::write_scenario_artifacts(dir, res);
        std::cout << "scenario=energy t=" << horizon << " variants="
                  << variants.size() << " balance_residual="
                  << hca::io::format_double(res.balance_residual) << "\n";
    } else {
        std::cerr << "unknown scenario \"" << args.name
                  << "\" (expected vaccination, shortest-path, or energy)\n";
        return kExitUsage;
    }

    write_manifest(dir, "scenario " + args.name, args.config_path, resolved,
                   artifacts, now_seconds() - t0);
    return 0;
}

struct AttackArgs {
    std::string lp_file;
    std::string lift_file;
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run_attack(const AttackArgs& args) {
    const double t0 = now_seconds();
    const hca::LinearProgram lp =
        hca::io::lp_from_json(json::parse(hca::io::read_file(args.lp_file)));
    hca::ConfounderLift lift;
    lift.c = hca::io::lift_from_json(json::parse(hca::io::read_file(args.lift_file)));

    json cfg = load_config(args.config_path);
    if (cfg.contains("attack")) cfg = cfg.at("attack");
    hca::AttackConfig ac = hca::io::attack_config_from_json(cfg, hca::AttackConfig{});
    if (args.seed_given) ac.noise.seed = args.seed;

    const hca::AttackReport rep = hca::attack(lp, lift, ac);
    const fs::path dir =
        args.out.empty()
            ? out_root() / ("attack-seed" + std::to_string(ac.noise.seed))
            : fs::path(args.out);
    hca::io::write_file_atomic(dir / "report.json",
                               hca::io::attack_report_to_json(rep).dump(2) + "\n");

    json resolved;
    resolved["lp_file"] = args.lp_file;
    resolved["lift_file"] = args.lift_file;
    resolved["seed"] = ac.noise.seed;
    resolved["attack"] = hca::io::attack_config_to_json(ac);
    write_manifest(dir, "attack", args.config_path, resolved, {"report.json"},
                   now_seconds() - t0);
    print_attack_line("attack", rep);
    return 0;
}

struct VerifyArgs {
    std::string lp_file;
    std::string out;
    double radius = 0.05;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& args) {
    const double t0 = now_seconds();
    const hca::LinearProgram lp =
        hca::io::lp_from_json(json::parse(hca::io::read_file(args.lp_file)));
    const hca::AssumptionDiagnostics diag =
        hca::verify_assumptions(lp, args.radius, args.trials, args.seed);

    json d;
    d["multiple_optima_found"] = diag.multiple_optima_found;
    d["w_with_multiple"] = diag.w_with_multiple;
    d["solution_change_found"] = diag.solution_change_found;
    d["w_with_change"] = diag.w_with_change;
    d["trials_used"] = diag.trials_used;

    const fs::path dir =
        args.out.empty()
            ? out_root() / ("verify-seed" + std::to_string(args.seed))
            : fs::path(args.out);
    hca::io::write_file_atomic(dir / "diagnostics.json", d.dump(2) + "\n");

    json resolved;
    resolved["lp_file"] = args.lp_file;
    resolved["radius"] = args.radius;
    resolved["trials"] = args.trials;
    resolved["seed"] = args.seed;
    write_manifest(dir, "verify-assumptions", "", resolved, {"diagnostics.json"},
                   now_seconds() - t0);
    std::cout << "multiple_optima="
              << (diag.multiple_optima_found ? "true" : "false")
              << " solution_change="
              << (diag.solution_change_found ? "true" : "false")
              << " trials_used=" << diag.trials_used << "\n";
    return 0;
}

struct ExportArgs {
    std::string graph_file;
    std::vector<std::string> solution_files;
    std::string out;
};

std::vector<double> solution_from_json(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object() && j.contains("x"))
        return j.at("x").get<std::vector<double>>();
    throw hca::ConfigError("solution file must be an array or {\"x\": [...]}");
}

int run_export(const ExportArgs& args) {
    if (args.solution_files.size() > 2)
        throw hca::ConfigError("export-graph styles at most two solutions "
                               "(base and adversarial)");
    const hca::Graph g =
        hca::io::graph_from_edges_csv(hca::io::read_file(args.graph_file));
    std::vector<std::vector<double>> solutions;
    for (const std::string& f : args.solution_files)
        solutions.push_back(solution_from_json(json::parse(hca::io::read_file(f))));
    const std::string dot = hca::io::graph_dot(g, solutions);
    if (args.out.empty())
        std::cout << dot;
    else
        hca::io::write_file_atomic(args.out, dot);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hidden-confounder attacks on linear programs"};
    app.require_subcommand(1);

    ScenarioArgs sa;
    CLI::App* sc = app.add_subcommand("scenario", "run a bundled scenario");
    sc->add_option("name", sa.name, "vaccination | shortest-path | energy")
        ->required();
    sc->add_option("--config", sa.config_path, "scenario config file (JSON)")
        ->check(CLI::ExistingFile);
    sc->add_option("--seed", sa.seed, "top-level RNG seed");
    sc->add_option("--out", sa.out, "output directory");
    sc->add_option("--t", sa.horizon, "energy horizon in hours");
    sc->add_option("--sweep", sa.sweep, "number of consecutive seeds to run")
        ->check(CLI::PositiveNumber);

    AttackArgs aa;
    CLI::App* at = app.add_subcommand("attack", "run an ad-hoc attack on an LP file");
    at->add_option("--lp", aa.lp_file, "LP file (JSON)")->required();
    at->add_option("--lift", aa.lift_file, "confounder lift file (JSON)")->required();
    at->add_option("--config", aa.config_path, "attack config file (JSON)")
        ->check(CLI::ExistingFile);
    at->add_option("--seed", aa.seed, "noise seed");
    at->add_option("--out", aa.out, "output directory");

    VerifyArgs va;
    CLI::App* ve = app.add_subcommand(
        "verify-assumptions", "search for tie / solution-change witnesses");
    ve->add_option("--lp", va.lp_file, "LP file (JSON)")->required();
    ve->add_option("--radius", va.radius, "perturbation ball radius");
    ve->add_option("--trials", va.trials, "random trials");
    ve->add_option("--seed", va.seed, "search seed");
    ve->add_option("--out", va.out, "output directory");

    ExportArgs ea;
    CLI::App* ex = app.add_subcommand("export-graph", "emit a styled DOT graph");
    ex->add_option("--graph", ea.graph_file, "edge list file (CSV)")->required();
    ex->add_option("--solution", ea.solution_files,
                   "solution file (JSON); repeat for base then adversarial");
    ex->add_option("--out", ea.out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    sa.seed_given = sc->count("--seed") > 0;
    sa.horizon_given = sc->count("--t") > 0;
    aa.seed_given = at->count("--seed") > 0;

    try {
        if (sc->parsed()) return run_scenario(sa);
        if (at->parsed()) return run_attack(aa);
        if (ve->parsed()) return run_verify(va);
        if (ex->parsed()) return run_export(ea);
        return kExitUsage;
    } catch (const hca::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const hca::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
