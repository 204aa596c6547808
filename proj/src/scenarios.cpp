#include "hca/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "hca/errors.hpp"
#include "hca/rng.hpp"

namespace hca {

namespace {

constexpr double kHoursPerYear = 8760.0;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Equation health_equation(const VaccinationScmParams& p, const std::string& wealth,
                         bool wealth_is_noise) {
    Equation eq;
    eq.intercept = p.health_intercept;
    Term w{wealth, p.health_wealth, true};
    if (wealth_is_noise)
        eq.noises.push_back(w);
    else
        eq.parents.push_back(w);
    eq.noises.push_back(Term{"U_H", 1.0, false});
    eq.clamped = true;
    return eq;
}

Equation priority_equation(const VaccinationScmParams& p, const std::string& wealth,
                           bool wealth_is_noise) {
    Equation eq;
    eq.intercept = p.priority_intercept;
    eq.parents.push_back(Term{"H", p.priority_health, false});
    Term w{wealth, p.priority_wealth, true};
    if (wealth_is_noise)
        eq.noises.push_back(w);
    else
        eq.parents.push_back(w);
    eq.noises.push_back(Term{"U_P", 1.0, false});
    eq.clamped = true;
    return eq;
}

} // namespace

Scm vaccination_true_scm(const VaccinationScmParams& p) {
    Scm scm;
    scm.name = "vaccination-true";
    scm.exogenous = {
        {"U_W", Distribution::lognormal(p.wealth_mu, p.wealth_sigma)},
        {"U_H", Distribution::normal(0.0, p.health_noise_sd)},
        {"U_P", Distribution::normal(0.0, p.priority_noise_sd)},
    };
    EndoVar wealth;
    wealth.name = "W";
    wealth.eq.noises.push_back(Term{"U_W", 1.0, false});
    wealth.observed = false;  // recorded per unit, absent from the modeller's data
    EndoVar health{"H", health_equation(p, "W", false), true};
    EndoVar prio{"P", priority_equation(p, "W", false), true};
    scm.endogenous = {wealth, health, prio};
    return scm;
}

Scm vaccination_modeller_scm(const VaccinationScmParams& p) {
    Scm scm;
    scm.name = "vaccination-observed";
    scm.exogenous = {
        // same draw order as the true SCM, so records coincide seed-for-seed
        {"U_C", Distribution::lognormal(p.wealth_mu, p.wealth_sigma)},
        {"U_H", Distribution::normal(0.0, p.health_noise_sd)},
        {"U_P", Distribution::normal(0.0, p.priority_noise_sd)},
    };
    EndoVar health{"H", health_equation(p, "U_C", true), true};
    EndoVar prio{"P", priority_equation(p, "U_C", true), true};
    scm.endogenous = {health, prio};
    return scm;
}

Scm vaccination_repaired_scm(const VaccinationScmParams& p) {
    Scm scm = vaccination_true_scm(p);
    scm.name = "vaccination-repaired";
    scm.endogenous[0].observed = true;  // wealth measured: no hidden confounder left
    return scm;
}

Graph na_route_fixture() {
    Graph g;
    auto e = [&](const char* a, const char* b, double toll, double co2) {
        g.add_edge(a, b, toll, co2);
    };
    // mid-US chain: cheapest tolls, modest emissions
    e("NY", "PIT", 14.0, 5.0);
    e("PIT", "CHI", 14.0, 5.0);
    e("CHI", "OMA", 14.0, 5.0);
    e("OMA", "DEN", 15.0, 5.0);
    e("DEN", "SLC", 15.0, 5.0);
    e("SLC", "RNO", 14.0, 5.0);
    e("RNO", "SF", 14.0, 5.0);  // toll 100.0, co2 35
    // via-Canada chain: 0.5% pricier, far dirtier
    e("NY", "TOR", 20.0, 18.0);
    e("TOR", "WPG", 20.0, 18.0);
    e("WPG", "CGY", 20.0, 18.0);
    e("CGY", "SEA", 20.0, 18.0);
    e("SEA", "SF", 20.5, 18.0);  // toll 100.5, co2 90
    // connective filler, never competitive
    e("PIT", "TOR", 50.0, 10.0);
    e("CHI", "WPG", 60.0, 10.0);
    e("OMA", "SLC", 40.0, 8.0);
    e("DEN", "RNO", 40.0, 8.0);
    e("TOR", "CHI", 55.0, 12.0);
    e("WPG", "SEA", 70.0, 15.0);
    e("SLC", "SF", 60.0, 9.0);
    e("NY", "CHI", 45.0, 9.0);
    return g;
}

Scm route_true_scm() {
    Scm scm;
    scm.name = "route-true";
    scm.exogenous = {
        {"U_R", Distribution::lognormal(0.0, 0.4)},  // route character
        {"U_T", Distribution::normal(0.0, 1.0)},
        {"U_S", Distribution::normal(0.0, 0.5)},
    };
    EndoVar co2;
    co2.name = "CO2";
    co2.eq.intercept = 2.0;
    co2.eq.noises.push_back(Term{"U_R", 8.0, false});
    co2.observed = false;
    EndoVar toll;
    toll.name = "Toll";
    toll.eq.intercept = 12.0;
    toll.eq.parents.push_back(Term{"CO2", 0.25, false});
    toll.eq.noises.push_back(Term{"U_T", 1.0, false});
    EndoVar time;
    time.name = "Time";
    time.eq.intercept = 5.0;
    time.eq.parents.push_back(Term{"CO2", 0.1, false});
    time.eq.noises.push_back(Term{"U_S", 1.0, false});
    scm.endogenous = {co2, toll, time};
    return scm;
}

Scm route_modeller_scm() {
    Scm scm;
    scm.name = "route-observed";
    scm.exogenous = {
        {"U_R", Distribution::lognormal(0.0, 0.4)},
        {"U_T", Distribution::normal(0.0, 1.0)},
        {"U_S", Distribution::normal(0.0, 0.5)},
    };
    EndoVar toll;
    toll.name = "Toll";
    toll.eq.intercept = 12.5;  // 2.0 * 0.25 folded in
    toll.eq.noises.push_back(Term{"U_R", 2.0, false});
    toll.eq.noises.push_back(Term{"U_T", 1.0, false});
    EndoVar time;
    time.name = "Time";
    time.eq.intercept = 5.2;
    time.eq.noises.push_back(Term{"U_R", 0.8, false});
    time.eq.noises.push_back(Term{"U_S", 1.0, false});
    scm.endogenous = {toll, time};
    return scm;
}

AttackConfig vaccination_default_config() {
    AttackConfig cfg;
    cfg.epsilon = 0.01;
    cfg.steps = 40;
    cfg.noise.family = NoiseSpec::Family::StandardNormal;
    cfg.noise.sigma = 0.5;
    cfg.noise.n_samples = 15;
    cfg.direction = AttackConfig::Direction::MaximizeH;
    cfg.cost_gap_budget = 0.05;
    return cfg;
}

AttackConfig shortest_path_default_config() {
    AttackConfig cfg = vaccination_default_config();
    cfg.noise.sigma = 0.25;
    cfg.noise.n_samples = 20;
    return cfg;
}

AttackProblem vaccination_problem(std::size_t n_people, std::size_t n_spots,
                                  std::uint64_t seed, AttackConfig cfg,
                                  const VaccinationScmParams& p) {
    if (n_spots > n_people)
        throw ConfigError("vaccination: more spots than people");
    const Scm truth = vaccination_true_scm(p);

    AttackProblem prob;
    prob.dataset = sample(truth, n_people, seed);

    ParamPolicy policy;
    policy.family = Family::Assignment;
    policy.n_spots = n_spots;
    prob.param = parameterize(prob.dataset, policy);

    const AdversaryView wealth = adversary_view(truth, prob.dataset, "W");
    prob.lift = lift_confounder(wealth, prob.param.map, Family::Assignment);

    std::vector<std::vector<double>> suit(n_people, std::vector<double>(n_people));
    for (std::size_t i = 0; i < n_people; ++i)
        for (std::size_t j = 0; j < n_people; ++j)
            suit[i][j] = prob.param.w[i * n_people + j];
    prob.lp = build_assignment_lp(suit).lp;

    cfg.noise.seed = seed;
    prob.cfg = cfg;
    return prob;
}

AttackProblem shortest_path_problem(const Graph& g, const std::string& s,
                                    const std::string& t, std::uint64_t seed,
                                    AttackConfig cfg) {
    AttackProblem prob;
    prob.dataset.fields = {"toll"};
    prob.dataset.source = "route-fixture";
    prob.dataset.seed = seed;
    AdversaryView co2;
    co2.confounder = "CO2";
    for (const auto& e : g.edges) {
        prob.dataset.units.push_back({e.cost});
        co2.values.push_back(e.confounder.value_or(0.0));
    }

    ParamPolicy policy;
    policy.family = Family::ShortestPath;
    policy.cost_field = "toll";
    prob.param = parameterize(prob.dataset, policy);
    prob.lift = lift_confounder(co2, prob.param.map, Family::ShortestPath);
    prob.lp = build_shortest_path_lp(g, s, t).lp;

    cfg.noise.seed = seed;
    prob.cfg = cfg;
    return prob;
}

namespace {

// Matched = the unit's lift indices are active in the rounded code.
bool unit_active(const std::vector<double>& x, const std::vector<int>& lift_indices) {
    double s = 0.0;
    for (int j : lift_indices) s += x[j];
    return std::llround(s) >= 1;
}

void fill_skew(ScenarioResult& res, const AttackProblem& prob,
               const std::vector<double>& conf_values) {
    const std::vector<double> xb = round_binary(res.report.x_base);
    const std::vector<double> xa = round_binary(res.report.x_adv);
    double sum_b = 0.0, sum_a = 0.0;
    std::size_t n_b = 0, n_a = 0;
    for (std::size_t i = 0; i < conf_values.size(); ++i) {
        SkewRow row;
        row.unit = i;
        row.confounder = conf_values[i];
        row.matched_base = unit_active(xb, prob.param.map.lift_indices[i]);
        row.matched_adv = unit_active(xa, prob.param.map.lift_indices[i]);
        if (row.matched_base) {
            sum_b += row.confounder;
            ++n_b;
        }
        if (row.matched_adv) {
            sum_a += row.confounder;
            ++n_a;
        }
        res.skew.push_back(row);
    }
    res.mean_matched_conf_base = n_b ? sum_b / static_cast<double>(n_b) : 0.0;
    res.mean_matched_conf_adv = n_a ? sum_a / static_cast<double>(n_a) : 0.0;
}

} // namespace

ScenarioResult scenario_vaccination(std::size_t n_people, std::size_t n_spots,
                                    std::uint64_t seed, AttackConfig cfg,
                                    const VaccinationScmParams& p) {
    const double t0 = now_seconds();
    const AttackProblem prob = vaccination_problem(n_people, n_spots, seed, cfg, p);

    ScenarioResult res;
    res.scenario = "vaccination";
    res.seed = seed;
    res.cfg = prob.cfg;
    res.report = attack(prob.lp, prob.lift, prob.cfg);

    const Scm truth = vaccination_true_scm(p);
    const AdversaryView wealth = adversary_view(truth, prob.dataset, "W");
    fill_skew(res, prob, wealth.values);
    res.dataset = prob.dataset;
    res.wall_seconds = now_seconds() - t0;
    return res;
}

ScenarioResult scenario_shortest_path(const Graph& g, const std::string& s,
                                      const std::string& t, std::uint64_t seed,
                                      AttackConfig cfg) {
    const double t0 = now_seconds();
    const AttackProblem prob = shortest_path_problem(g, s, t, seed, cfg);

    ScenarioResult res;
    res.scenario = "shortest-path";
    res.seed = seed;
    res.cfg = prob.cfg;
    res.report = attack(prob.lp, prob.lift, prob.cfg);
    fill_skew(res, prob, prob.lift.c);  // per-edge confounder = lift entry
    res.dataset = prob.dataset;
    res.graph = g;
    res.wall_seconds = now_seconds() - t0;
    return res;
}

ScenarioResult scenario_shortest_path(std::uint64_t seed, AttackConfig cfg) {
    return scenario_shortest_path(na_route_fixture(), "NY", "SF", seed, cfg);
}

EnergyProfiles synthesize_energy_profiles(double annual_demand_kwh, int horizon_hours) {
    if (horizon_hours < 1) throw ConfigError("energy profiles: horizon must be >= 1");
    if (annual_demand_kwh < 0) throw ConfigError("energy profiles: negative demand");

    EnergyProfiles prof;
    prof.demand_kwh.resize(horizon_hours);
    prof.avail_pv.resize(horizon_hours);
    const double target =
        annual_demand_kwh * static_cast<double>(horizon_hours) / kHoursPerYear;
    double raw_sum = 0.0;
    for (int t = 0; t < horizon_hours; ++t) {
        const int hour = t % 24;
        // morning/evening-weighted household load shape
        const double shape =
            1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * (hour - 9) / 24.0);
        prof.demand_kwh[t] = shape;
        raw_sum += shape;
        prof.avail_pv[t] =
            hour >= 6 && hour <= 18
                ? std::max(0.0, std::sin(std::numbers::pi * (hour - 6) / 12.0))
                : 0.0;
    }
    const double scale = raw_sum > 0.0 ? target / raw_sum : 0.0;
    for (double& d : prof.demand_kwh) d *= scale;
    return prof;
}

ScenarioResult scenario_energy(EnergyParams params, int horizon_hours,
                               EnergyProfiles profiles,
                               const std::vector<double>& price_variants) {
    const double t0 = now_seconds();
    if (price_variants.empty())
        throw ConfigError("energy scenario: need at least one price variant");
    if (profiles.demand_kwh.empty())
        profiles = synthesize_energy_profiles(params.total_demand, horizon_hours);
    if (static_cast<int>(profiles.demand_kwh.size()) != horizon_hours)
        throw ConfigError("energy scenario: profile length differs from horizon");

    double profile_sum = 0.0;
    for (double d : profiles.demand_kwh) profile_sum += d;

    ScenarioResult res;
    res.scenario = "energy";
    for (double c_pv : price_variants) {
        EnergyParams variant = params;
        variant.c_pv = c_pv;
        variant.total_demand = profile_sum;
        const EnergyLp built = build_energy_lp(variant, profiles);
        const Solution sol = solve(built.lp);
        if (sol.status != SolveStatus::Optimal)
            throw SolverError("energy scenario: LP did not solve to optimality");

        const EnergyLayout& L = built.layout;
        EnergyRow row;
        row.w_pv = c_pv;
        row.cap_pv = sol.x[L.cap_pv];
        row.cap_bat = sol.x[L.cap_bat];
        row.totex = sol.objective;
        row.capex = c_pv * row.cap_pv + params.c_bat * row.cap_bat;
        for (int t = 0; t < horizon_hours; ++t) {
            row.con_gas += sol.x[L.p_gas(t)];
            row.con_ele += sol.x[L.p_ele(t)];
        }
        row.self_gen =
            profile_sum > 0.0
                ? std::max(0.0, 1.0 - (row.con_ele + row.con_gas) / profile_sum)
                : 0.0;
        res.energy.push_back(row);
        res.energy_solutions.push_back(sol.x);

        for (int t = 0; t < horizon_hours; ++t) {
            const double lhs = sol.x[L.p_ele(t)] + sol.x[L.p_pv(t)] +
                               sol.x[L.p_out(t)] - sol.x[L.p_in(t)] +
                               sol.x[L.p_gas(t)];
            res.balance_residual = std::max(
                res.balance_residual, std::abs(lhs - profiles.demand_kwh[t]));
        }
    }
    res.profiles = profiles;
    res.wall_seconds = now_seconds() - t0;
    return res;
}

} // namespace hca
