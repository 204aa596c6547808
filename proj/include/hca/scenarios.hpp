#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hca/attack.hpp"
#include "hca/problems.hpp"
#include "hca/scm.hpp"

namespace hca {

// Coefficients of the bundled vaccination SCM. The wealthy are a bit
// healthier; the sick get priority; wealth quietly enters both equations.
struct VaccinationScmParams {
    double wealth_mu = 0.0;
    double wealth_sigma = 0.5;
    double health_intercept = 0.5;
    double health_wealth = 0.3;
    double health_noise_sd = 0.15;
    double priority_intercept = 0.9;
    double priority_health = -0.8;
    double priority_wealth = 0.2;
    double priority_noise_sd = 0.1;
};

// Ground truth: wealth is endogenous but unrecorded, so sampled datasets
// expose health/priority while wealth stays recoverable per unit.
Scm vaccination_true_scm(const VaccinationScmParams& p = {});
// What the modeller can write down from the data: health and priority with a
// shared wealth-shaped noise — the hidden confounder.
Scm vaccination_modeller_scm(const VaccinationScmParams& p = {});
// Sufficiency repair: wealth promoted to an observed endogenous variable.
Scm vaccination_repaired_scm(const VaccinationScmParams& p = {});

// Stylized 12-node North-America road graph NY -> SF: the mid-US and
// via-Canada route families have near-equal toll sums while the northern
// edges carry far larger CO2 annotations.
Graph na_route_fixture();

// Edge-level story for the route example: toll and travel time share a
// route-character noise that also drives emissions.
Scm route_true_scm();
Scm route_modeller_scm();

struct SkewRow {
    std::size_t unit = 0;
    double confounder = 0.0;
    bool matched_base = false;
    bool matched_adv = false;
};

struct EnergyRow {  // comparison-table column order
    double cap_pv = 0.0;
    double cap_bat = 0.0;
    double self_gen = 0.0;
    double totex = 0.0;
    double capex = 0.0;
    double con_gas = 0.0;
    double con_ele = 0.0;
    double w_pv = 0.0;
};

struct ScenarioResult {
    std::string scenario;
    std::uint64_t seed = 0;
    AttackConfig cfg;  // as applied, defaults filled in

    AttackReport report;  // assignment / shortest-path runs
    std::vector<SkewRow> skew;
    double mean_matched_conf_base = 0.0;
    double mean_matched_conf_adv = 0.0;

    std::vector<EnergyRow> energy;  // energy runs
    double balance_residual = 0.0;  // worst per-hour supply-balance violation
    std::vector<std::vector<double>> energy_solutions;  // in-memory only

    // Snapshots of what the run consumed, so artifacts are self-contained.
    DataSet dataset;
    Graph graph;
    EnergyProfiles profiles;

    double wall_seconds = 0.0;  // recorded in the manifest, never in results
    std::vector<std::string> artifact_files;
};

AttackConfig vaccination_default_config();    // N=15, sigma=0.5, eps=0.01
AttackConfig shortest_path_default_config();  // N=20, sigma=0.25, eps=0.01

// One seed's full pipeline product, reusable by the witness sweep.
AttackProblem vaccination_problem(std::size_t n_people, std::size_t n_spots,
                                  std::uint64_t seed, AttackConfig cfg,
                                  const VaccinationScmParams& p = {});
AttackProblem shortest_path_problem(const Graph& g, const std::string& s,
                                    const std::string& t, std::uint64_t seed,
                                    AttackConfig cfg);

ScenarioResult scenario_vaccination(std::size_t n_people, std::size_t n_spots,
                                    std::uint64_t seed, AttackConfig cfg,
                                    const VaccinationScmParams& p = {});
ScenarioResult scenario_shortest_path(const Graph& g, const std::string& s,
                                      const std::string& t, std::uint64_t seed,
                                      AttackConfig cfg);
ScenarioResult scenario_shortest_path(std::uint64_t seed, AttackConfig cfg);

// Closed-form synthetic profiles: sinusoidal daily demand scaled to the
// horizon share of the annual total, and a daylight sine bump for PV.
EnergyProfiles synthesize_energy_profiles(double annual_demand_kwh, int horizon_hours);

// Solves one energy LP per c_PV variant with everything else fixed. params
// carries the annual demand; pass empty profiles to synthesize them.
ScenarioResult scenario_energy(EnergyParams params, int horizon_hours,
                               EnergyProfiles profiles,
                               const std::vector<double>& price_variants);

} // namespace hca
