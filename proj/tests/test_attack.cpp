#include "doctest.h"

#include <cmath>

#include "hca/attack.hpp"
#include "hca/errors.hpp"
#include "hca/problems.hpp"
#include "hca/rng.hpp"
#include "hca/scenarios.hpp"

using namespace hca;

namespace {

DataSet people_dataset(const std::vector<std::pair<double, double>>& hp) {
    DataSet ds;
    ds.fields = {"H", "P"};
    ds.source = "handmade";
    for (const auto& [h, p] : hp) ds.units.push_back({h, p});
    return ds;
}

ParamPolicy la_policy(std::size_t spots) {
    ParamPolicy policy;
    policy.family = Family::Assignment;
    policy.n_spots = spots;
    return policy;
}

} // namespace

TEST_CASE("assignment parameterization follows the policy extremes") {
    const DataSet ds = people_dataset({{1.0, 0.0}, {0.0, 1.0}});
    const Parameterization par = parameterize(ds, la_policy(2));
    REQUIRE(par.w.size() == 4);
    CHECK(par.w[0] == 0.0);  // perfectly healthy, no priority
    CHECK(par.w[1] == 0.0);
    CHECK(par.w[2] == 2.0);  // sick and prioritized: maximal suitability
    CHECK(par.w[3] == 2.0);
    CHECK(check_integral(par.map, ds, par.w));
}

TEST_CASE("dummy spots carry zero weight and full-size maps stay integral") {
    const DataSet ds = sample(vaccination_true_scm(), 25, 3);
    const Parameterization par = parameterize(ds, la_policy(10));
    CHECK(par.w.size() == 625);
    for (std::size_t i = 0; i < 25; ++i)
        for (std::size_t j = 10; j < 25; ++j) CHECK(par.w[i * 25 + j] == 0.0);
    CHECK(check_integral(par.map, ds, par.w));
}

TEST_CASE("shortest-path parameterization is the identity on tolls") {
    DataSet ds;
    ds.fields = {"toll"};
    ds.source = "edges";
    ds.units = {{5.0}, {7.5}, {1.25}};
    ParamPolicy policy;
    policy.family = Family::ShortestPath;
    const Parameterization par = parameterize(ds, policy);
    CHECK(par.w == std::vector<double>({5.0, 7.5, 1.25}));
    CHECK(check_integral(par.map, ds, par.w));

    CHECK_THROWS_AS(parameterize(people_dataset({{0.5, 0.5}}), policy), ConfigError);
}

TEST_CASE("integrality check catches corruption") {
    const DataSet ds = people_dataset({{0.2, 0.3}, {0.6, 0.1}});
    Parameterization par = parameterize(ds, la_policy(2));

    std::vector<double> bad_w = par.w;
    bad_w[0] += 0.1;  // slice no longer matches any record
    CHECK_FALSE(check_integral(par.map, ds, bad_w));

    IntegralParamMap merged = par.map;
    merged.unit_indices[1] = merged.unit_indices[0];  // shared indices
    CHECK_FALSE(check_integral(merged, ds, par.w));

    IntegralParamMap out_of_range = par.map;
    out_of_range.unit_indices[0][0] = 99;
    CHECK_FALSE(check_integral(out_of_range, ds, par.w));

    CHECK_THROWS_AS(check_integral(par.map, people_dataset({{0.2, 0.3}}), par.w),
                    ConfigError);
}

TEST_CASE("confounder lift sums active units, dummies excluded") {
    const DataSet ds = people_dataset({{0.5, 0.5}, {0.5, 0.5}});
    const Parameterization par = parameterize(ds, la_policy(2));
    AdversaryView wealth;
    wealth.confounder = "W";
    wealth.values = {10.0, 20.0};
    const ConfounderLift lift = lift_confounder(wealth, par.map, Family::Assignment);
    CHECK(evaluate_h({1, 0, 0, 1}, lift) == 30.0);  // everyone matched
    CHECK(evaluate_h({0, 1, 1, 0}, lift) == 30.0);

    CHECK_THROWS_AS(lift_confounder(wealth, par.map, Family::ShortestPath), ConfigError);
}

TEST_CASE("lift agrees with explicit matched-set bookkeeping") {
    rng::Stream st = rng::Stream::from(42, 0);
    const std::size_t n = 8, spots = 3;
    std::vector<std::pair<double, double>> hp(n);
    for (auto& [h, p] : hp) {
        h = st.next_open01();
        p = st.next_open01();
    }
    const DataSet ds = people_dataset(hp);
    const Parameterization par = parameterize(ds, la_policy(spots));
    AdversaryView wealth;
    wealth.confounder = "W";
    for (std::size_t i = 0; i < n; ++i) wealth.values.push_back(st.uniform(1.0, 50.0));
    const ConfounderLift lift = lift_confounder(wealth, par.map, Family::Assignment);

    std::vector<std::vector<double>> suit(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) suit[i][j] = par.w[i * n + j];
    const Solution sol = solve(build_assignment_lp(suit).lp);
    REQUIRE(sol.status == SolveStatus::Optimal);

    double explicit_sum = 0.0;  // who sits on a real spot?
    const std::vector<double> code = round_binary(sol.x);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < spots; ++j)
            if (code[i * n + j] == 1.0) explicit_sum += wealth.values[i];
    CHECK(evaluate_h(sol.x, lift) == doctest::Approx(explicit_sum).epsilon(1e-12));
}

TEST_CASE("shortest-path lift on the diamond") {
    Graph d;
    d.add_edge("s", "a", 1.0, 1.0);
    d.add_edge("a", "t", 1.0, 1.0);
    d.add_edge("s", "b", 1.0, 3.0);
    d.add_edge("b", "t", 2.0, 4.0);
    const AttackProblem prob =
        shortest_path_problem(d, "s", "t", 0, shortest_path_default_config());
    CHECK(evaluate_h({1, 1, 0, 0}, prob.lift) == 2.0);
    CHECK(evaluate_h({0, 0, 1, 1}, prob.lift) == 7.0);
}

TEST_CASE("evaluate_h edge cases") {
    ConfounderLift lift;
    lift.c = {5.0, 7.0};
    CHECK(evaluate_h({0.0, 0.0}, lift) == 0.0);
    CHECK_THROWS_AS(evaluate_h({0.5, 0.0}, lift), DegenerateSolutionError);
    CHECK(evaluate_h({1.0, 1.0}, lift, [](double s) { return 2.0 * s; }) == 24.0);
    const double rich = evaluate_h({0.0, 1.0}, lift);
    const double poor = evaluate_h({1.0, 0.0}, lift);
    CHECK(rich - poor == 2.0);  // exactly the wealth-sum difference
}

TEST_CASE("null attack is the identity") {
    const DataSet ds = people_dataset({{0.2, 0.8}, {0.7, 0.3}, {0.4, 0.5}});
    const Parameterization par = parameterize(ds, la_policy(1));
    AdversaryView wealth;
    wealth.confounder = "W";
    wealth.values = {1.0, 2.0, 3.0};
    const ConfounderLift lift = lift_confounder(wealth, par.map, Family::Assignment);
    std::vector<std::vector<double>> suit(3, std::vector<double>(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) suit[i][j] = par.w[i * 3 + j];
    const LinearProgram lp = build_assignment_lp(suit).lp;

    AttackConfig cfg = vaccination_default_config();
    cfg.epsilon = 0.0;
    const AttackReport rep = attack(lp, lift, cfg);
    CHECK_FALSE(rep.success);
    CHECK(rep.w_hat == rep.w);
    CHECK(rep.x_adv == rep.x_base);
    CHECK(rep.delta_h == 0.0);
    CHECK(rep.perturbation_norm == 0.0);
    CHECK(rep.shd_codes == 0);
    CHECK(rep.steps_taken == 0);

    AttackConfig no_steps = vaccination_default_config();
    no_steps.steps = 0;
    const AttackReport rep2 = attack(lp, lift, no_steps);
    CHECK_FALSE(rep2.success);
    CHECK(rep2.perturbation_norm == 0.0);
}

TEST_CASE("attack flips a deterministic tie toward the wealthy worker") {
    // two identical people, one real spot: both matchings cost the same; the
    // solver deterministically seats the second worker, so the wealth goes on
    // the first and maximize-h has a genuine flip to perform
    const DataSet ds = people_dataset({{0.5, 0.5}, {0.5, 0.5}});
    const Parameterization par = parameterize(ds, la_policy(1));
    AdversaryView wealth;
    wealth.confounder = "W";
    wealth.values = {100.0, 1.0};
    const ConfounderLift lift = lift_confounder(wealth, par.map, Family::Assignment);
    std::vector<std::vector<double>> suit = {{par.w[0], par.w[1]}, {par.w[2], par.w[3]}};
    const LinearProgram lp = build_assignment_lp(suit).lp;

    const Solution base = solve(lp);
    const auto optima = enumerate_alternate_optima(lp, base, 4);
    REQUIRE(optima.size() == 2);  // the tie really is a face
    CHECK(optima[0].objective == doctest::Approx(optima[1].objective));
    CHECK(evaluate_h(optima[0].x, lift) != evaluate_h(optima[1].x, lift));
    REQUIRE(evaluate_h(base.x, lift) == 1.0);

    AttackConfig cfg = vaccination_default_config();
    cfg.noise.seed = 4;
    const AttackReport rep = attack(lp, lift, cfg);
    CHECK(rep.success);
    CHECK(rep.h_adv == 100.0);  // the wealthy unit takes the spot
    CHECK(rep.delta_h > 0.0);
    CHECK(rep.cost_adv == doctest::Approx(rep.cost_base).epsilon(1e-12));
    CHECK(rep.rel_cost_gap <= cfg.cost_gap_budget);
    CHECK(rep.perturbation_norm <=
          cfg.epsilon * static_cast<double>(rep.steps_taken) + 1e-12);
}

TEST_CASE("attack respects the minimize-h direction") {
    const DataSet ds = people_dataset({{0.5, 0.5}, {0.5, 0.5}});
    const Parameterization par = parameterize(ds, la_policy(1));
    AdversaryView wealth;
    wealth.confounder = "W";
    wealth.values = {1.0, 100.0};  // solver's base pick is the wealthy worker
    const ConfounderLift lift = lift_confounder(wealth, par.map, Family::Assignment);
    std::vector<std::vector<double>> suit = {{par.w[0], par.w[1]}, {par.w[2], par.w[3]}};
    const LinearProgram lp = build_assignment_lp(suit).lp;
    REQUIRE(evaluate_h(solve(lp).x, lift) == 100.0);

    AttackConfig cfg = vaccination_default_config();
    cfg.noise.seed = 4;
    cfg.direction = AttackConfig::Direction::MinimizeH;
    const AttackReport rep = attack(lp, lift, cfg);
    CHECK(rep.success);
    CHECK(rep.h_adv == 1.0);
    CHECK(rep.delta_h < 0.0);
}

TEST_CASE("assumption search finds tie witnesses and reports misses honestly") {
    const auto tied = build_assignment_lp({{1.0, 1.0}, {1.0, 1.0}});
    const AssumptionDiagnostics d1 = verify_assumptions(tied.lp, 0.1, 20, 8);
    CHECK(d1.multiple_optima_found);
    CHECK(d1.w_with_multiple == tied.lp.w);  // witnessed at w itself

    const auto unique = build_assignment_lp({{9, 1, 1}, {1, 9, 1}, {1, 1, 9}});
    const AssumptionDiagnostics d2 = verify_assumptions(unique.lp, 0.5, 60, 8);
    CHECK_FALSE(d2.multiple_optima_found);  // margin 16 dwarfs the 0.5-ball
    CHECK_FALSE(d2.solution_change_found);
    CHECK(d2.trials_used == 60);

    Graph close;  // two routes 0.005 apart: inside the 0.01-ball
    close.add_edge("s", "a", 1.0);
    close.add_edge("a", "t", 1.0);
    close.add_edge("s", "b", 1.0);
    close.add_edge("b", "t", 1.005);
    const auto sp = build_shortest_path_lp(close, "s", "t");
    const AssumptionDiagnostics d3 = verify_assumptions(sp.lp, 0.01, 200, 8);
    CHECK(d3.solution_change_found);
    CHECK(d3.multiple_optima_found);  // midpoint projection lands on the tie
}

TEST_CASE("witness machinery: insufficiency yields an attack, sufficiency a certificate") {
    AttackConfig cfg = vaccination_default_config();
    auto bundle = [&](std::uint64_t seed) {
        return vaccination_problem(12, 5, seed, cfg);
    };
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7};

    const WitnessOutcome found = hca_witness(vaccination_true_scm(),
                                             vaccination_modeller_scm(), bundle, seeds);
    REQUIRE(found.kind == WitnessOutcome::Kind::Witness);
    REQUIRE(found.report.has_value());
    CHECK(found.report->success);
    CHECK(found.report->shd_codes > 0);

    const WitnessOutcome cert = hca_witness(vaccination_true_scm(),
                                            vaccination_repaired_scm(), bundle, seeds);
    CHECK(cert.kind == WitnessOutcome::Kind::NoAttackCertificate);
    CHECK_FALSE(cert.report.has_value());

    auto corrupted = [&](std::uint64_t seed) {
        AttackProblem p = vaccination_problem(12, 5, seed, cfg);
        p.param.map.unit_indices[1] = p.param.map.unit_indices[0];
        return p;
    };
    CHECK_THROWS_AS(
        hca_witness(vaccination_true_scm(), vaccination_modeller_scm(), corrupted, seeds),
        PreconditionError);
}

TEST_CASE("route witness rides the fixture") {
    const Graph g = na_route_fixture();
    AttackConfig cfg = shortest_path_default_config();
    auto bundle = [&](std::uint64_t seed) {
        return shortest_path_problem(g, "NY", "SF", seed, cfg);
    };
    CHECK_FALSE(is_causally_sufficient(route_modeller_scm()));
    CHECK(is_causally_sufficient(route_true_scm()));
    const WitnessOutcome out =
        hca_witness(route_true_scm(), route_modeller_scm(), bundle, {0, 1, 2});
    REQUIRE(out.kind == WitnessOutcome::Kind::Witness);
    CHECK(out.report->h_adv > out.report->h_base);
    CHECK(out.report->rel_cost_gap <= cfg.cost_gap_budget);
}

TEST_CASE("attack config validation") {
    AttackConfig cfg = vaccination_default_config();
    cfg.epsilon = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.epsilon = 0.01;
    cfg.cost_gap_budget = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
