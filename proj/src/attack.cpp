#include "hca/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hca/errors.hpp"
#include "hca/rng.hpp"

namespace hca {

namespace {

int field_index(const DataSet& ds, const std::string& name) {
    for (std::size_t i = 0; i < ds.fields.size(); ++i)
        if (ds.fields[i] == name) return static_cast<int>(i);
    throw ConfigError("parameterize: dataset is missing required field '" + name + "'");
}

Parameterization parameterize_assignment(const DataSet& ds, const ParamPolicy& policy) {
    const std::size_t n = ds.size();
    const int hi = field_index(ds, policy.health_field);
    const int pi = field_index(ds, policy.priority_field);
    const std::size_t spots = policy.n_spots == 0 ? n : policy.n_spots;
    if (spots > n)
        throw ConfigError("parameterize: more spots than units to match");

    Parameterization out;
    out.w.assign(n * n, 0.0);
    out.map.family = Family::Assignment;
    out.map.fields = ds.fields;
    for (std::size_t i = 0; i < n; ++i) {
        const double weight = policy.alpha * (1.0 - ds.units[i][hi]) +
                              policy.beta * ds.units[i][pi];
        std::vector<int> row, lift;
        for (std::size_t j = 0; j < n; ++j) {
            const int idx = static_cast<int>(i * n + j);
            row.push_back(idx);
            if (j < spots) {
                out.w[idx] = weight;
                lift.push_back(idx);
            }
        }
        out.map.unit_indices.push_back(std::move(row));
        out.map.lift_indices.push_back(std::move(lift));
    }

    // The replicated row value is not invertible to (health, priority), so the
    // reconstruction carries the records and instead certifies that the slice
    // still matches the forward parameterization.
    const auto records = ds.units;
    const double alpha = policy.alpha;
    const double beta = policy.beta;
    out.map.inverse = [records, alpha, beta, hi, pi, spots](
                          std::size_t unit, const std::vector<double>& slice)
        -> std::optional<std::vector<double>> {
        if (unit >= records.size()) return std::nullopt;
        const std::vector<double>& rec = records[unit];
        const double expect = alpha * (1.0 - rec[hi]) + beta * rec[pi];
        for (std::size_t j = 0; j < slice.size(); ++j) {
            const double want = j < spots ? expect : 0.0;
            if (std::abs(slice[j] - want) > 1e-9) return std::nullopt;
        }
        return rec;
    };
    return out;
}

Parameterization parameterize_shortest_path(const DataSet& ds, const ParamPolicy& policy) {
    const int ci = field_index(ds, policy.cost_field);
    const std::size_t n = ds.size();

    Parameterization out;
    out.w.resize(n);
    out.map.family = Family::ShortestPath;
    out.map.fields = ds.fields;
    for (std::size_t i = 0; i < n; ++i) {
        out.w[i] = ds.units[i][ci];
        out.map.unit_indices.push_back({static_cast<int>(i)});
        out.map.lift_indices.push_back({static_cast<int>(i)});
    }

    const auto records = ds.units;
    out.map.inverse = [records, ci](std::size_t unit, const std::vector<double>& slice)
        -> std::optional<std::vector<double>> {
        if (unit >= records.size() || slice.size() != 1) return std::nullopt;
        std::vector<double> rec = records[unit];
        rec[ci] = slice[0];  // the slice genuinely determines the cost field
        return rec;
    };
    return out;
}

} // namespace

Parameterization parameterize(const DataSet& dataset, const ParamPolicy& policy) {
    if (dataset.size() == 0) throw ConfigError("parameterize: empty dataset");
    switch (policy.family) {
    case Family::Assignment: return parameterize_assignment(dataset, policy);
    case Family::ShortestPath: return parameterize_shortest_path(dataset, policy);
    }
    throw ConfigError("parameterize: unknown family");
}

bool check_integral(const IntegralParamMap& map, const DataSet& dataset,
                    const std::vector<double>& w) {
    if (map.unit_indices.size() != dataset.size())
        throw ConfigError("check_integral: map and dataset unit counts differ");
    if (!map.inverse) throw ConfigError("check_integral: map has no inverse");

    std::set<int> seen;
    for (const auto& idx : map.unit_indices) {
        for (int j : idx) {
            if (j < 0 || static_cast<std::size_t>(j) >= w.size()) return false;
            if (!seen.insert(j).second) return false;  // shared index
        }
    }
    for (std::size_t i = 0; i < map.unit_indices.size(); ++i) {
        std::vector<double> slice;
        for (int j : map.unit_indices[i]) slice.push_back(w[j]);
        const auto rec = map.inverse(i, slice);
        if (!rec || rec->size() != dataset.units[i].size()) return false;
        for (std::size_t f = 0; f < rec->size(); ++f)
            if (std::abs((*rec)[f] - dataset.units[i][f]) > 1e-9) return false;
    }
    return true;
}

ConfounderLift lift_confounder(const AdversaryView& view, const IntegralParamMap& map,
                               Family family) {
    if (family != map.family)
        throw ConfigError("lift: family does not match the parameterization");
    if (view.values.size() != map.lift_indices.size())
        throw ConfigError("lift: view is not aligned with the map's units");

    std::size_t k = 0;
    for (const auto& idx : map.unit_indices)
        for (int j : idx) k = std::max(k, static_cast<std::size_t>(j) + 1);

    ConfounderLift lift;
    lift.c.assign(k, 0.0);
    for (std::size_t i = 0; i < view.values.size(); ++i)
        for (int j : map.lift_indices[i]) lift.c[j] = view.values[i];
    return lift;
}

double evaluate_h(const std::vector<double>& x, const ConfounderLift& lift,
                  const std::function<double(double)>& f) {
    if (x.size() != lift.c.size()) throw ConfigError("evaluate_h: length mismatch");
    const std::vector<double> code = round_binary(x);
    double s = 0.0;
    for (std::size_t j = 0; j < code.size(); ++j) s += lift.c[j] * code[j];
    return f ? f(s) : s;
}

void AttackConfig::validate() const {
    if (epsilon < 0.0 || !std::isfinite(epsilon))
        throw ConfigError("epsilon: step size must be >= 0 and finite");
    if (cost_gap_budget < 0.0)
        throw ConfigError("cost_gap_budget: must be >= 0");
    noise.validate();
}

AttackReport attack(const LinearProgram& lp, const ConfounderLift& lift,
                    const AttackConfig& cfg) {
    cfg.validate();
    lp.validate();
    if (lift.c.size() != lp.num_vars())
        throw ConfigError("attack: lift length does not match the LP");

    const Solution base = solve(lp);
    if (base.status != SolveStatus::Optimal)
        throw PreconditionError("attack: base LP has no optimal solution");

    AttackReport rep;
    rep.w = lp.w;
    rep.w_hat = lp.w;
    rep.x_base = base.x;
    rep.x_adv = base.x;
    rep.cost_base = base.objective;
    rep.cost_adv = base.objective;

    const double dir = cfg.direction == AttackConfig::Direction::MaximizeH ? 1.0 : -1.0;
    auto refresh = [&](const LinearProgram& cur, const Solution& sol) {
        rep.w_hat = cur.w;
        rep.x_adv = sol.x;
        // Stealth is judged by what the returned solution is worth under the
        // costs the modeller believes in, not under the perturbed ones: for a
        // tie flip the two matchings then price out exactly equal.
        double cost = 0.0;
        for (std::size_t j = 0; j < sol.x.size(); ++j) cost += rep.w[j] * sol.x[j];
        rep.cost_adv = cost;
        rep.rel_cost_gap = std::abs(rep.cost_adv - rep.cost_base) /
                           std::max(std::abs(rep.cost_base), 1e-12);
        rep.shd_codes = shd(rep.x_base, rep.x_adv);
        rep.h_adv = evaluate_h(rep.x_adv, lift);
        rep.delta_h = rep.h_adv - rep.h_base;
        rep.perturbation_norm = 0.0;
        for (std::size_t j = 0; j < rep.w.size(); ++j)
            rep.perturbation_norm =
                std::max(rep.perturbation_norm, std::abs(rep.w_hat[j] - rep.w[j]));
        rep.success = rep.shd_codes > 0 && dir * rep.delta_h > 1e-9 &&
                      rep.rel_cost_gap <= cfg.cost_gap_budget;
    };

    if (cfg.epsilon > 0.0 && cfg.steps > 0) {
        // Code-level bookkeeping only applies once we actually perturb; a null
        // attack must stay the identity even on LPs whose optimum is fractional
        // and therefore has no binary code to evaluate.
        rep.h_base = evaluate_h(base.x, lift);
        rep.h_adv = rep.h_base;
        LinearProgram cur = lp;
        for (std::size_t step = 0; step < cfg.steps; ++step) {
            NoiseSpec step_noise = cfg.noise;
            step_noise.seed = rng::mix(cfg.noise.seed, static_cast<std::uint64_t>(step));
            const std::vector<double> g = grad_linear_functional(cur, lift.c, step_noise);
            for (std::size_t j = 0; j < cur.w.size(); ++j) {
                const double s = cfg.step_rule == AttackConfig::StepRule::Sign
                                     ? (g[j] > 0.0 ? 1.0 : g[j] < 0.0 ? -1.0 : 0.0)
                                     : g[j];
                cur.w[j] += cfg.epsilon * dir * s;
            }
            const Solution sol = solve(cur);
            rep.steps_taken = step + 1;
            if (sol.status != SolveStatus::Optimal) {
                rep.adv_status = sol.status;
                break;
            }
            refresh(cur, sol);
            if (rep.success) break;  // goal reached
        }
    }

    if (cfg.step_rule == AttackConfig::StepRule::Sign &&
        rep.perturbation_norm >
            cfg.epsilon * static_cast<double>(rep.steps_taken) + 1e-12)
        throw SolverError("attack: sign-rule perturbation exceeded its budget");
    return rep;
}

namespace {

std::vector<long long> solution_key(const std::vector<double>& x) {
    std::vector<long long> key(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) key[i] = std::llround(x[i] * 1e7);
    return key;
}

} // namespace

AssumptionDiagnostics verify_assumptions(const LinearProgram& lp, double radius,
                                         std::size_t trials, std::uint64_t seed) {
    if (!(radius > 0.0)) throw ConfigError("verify_assumptions: radius must be > 0");
    lp.validate();
    const Solution base = solve(lp);
    if (base.status != SolveStatus::Optimal)
        throw PreconditionError("verify_assumptions: LP has no optimal solution");

    AssumptionDiagnostics diag;
    std::map<std::vector<long long>, std::vector<double>> codes;
    codes[solution_key(base.x)] = base.x;

    auto note_multiple = [&](const LinearProgram& cand, const Solution& sol) {
        if (diag.multiple_optima_found) return;
        const auto alts = enumerate_alternate_optima(cand, sol, 2);
        if (alts.size() > 1) {
            diag.multiple_optima_found = true;
            diag.w_with_multiple = cand.w;
        }
        for (const auto& a : alts) codes.emplace(solution_key(a.x), a.x);
    };
    note_multiple(lp, base);  // the ball contains w itself

    LinearProgram cand = lp;
    for (std::size_t t = 0; t < trials; ++t) {
        diag.trials_used = t + 1;
        rng::Stream stream = rng::Stream::from(seed, static_cast<std::uint64_t>(t));
        for (std::size_t j = 0; j < lp.w.size(); ++j)
            cand.w[j] = lp.w[j] + stream.uniform(-radius, radius);
        const Solution sol = solve(cand);
        if (sol.status != SolveStatus::Optimal) continue;

        bool differs = false;
        for (std::size_t j = 0; j < sol.x.size(); ++j)
            if (std::abs(sol.x[j] - base.x[j]) > 1e-7) {
                differs = true;
                break;
            }
        if (differs && !diag.solution_change_found) {
            diag.solution_change_found = true;
            diag.w_with_change = cand.w;
        }
        codes.emplace(solution_key(sol.x), sol.x);
        note_multiple(cand, sol);
        if (diag.multiple_optima_found && diag.solution_change_found) return diag;
    }

    // Deterministic fallback: costs projected to equalize two observed codes
    // land exactly on a face with both optimal, if that cost is in the ball.
    if (!diag.multiple_optima_found && codes.size() > 1) {
        std::vector<std::vector<double>> xs;
        for (const auto& [key, x] : codes) xs.push_back(x);
        for (std::size_t a = 0; a < xs.size() && !diag.multiple_optima_found; ++a) {
            for (std::size_t b = a + 1; b < xs.size(); ++b) {
                std::vector<double> d(lp.w.size());
                double num = 0.0, den = 0.0;
                for (std::size_t j = 0; j < d.size(); ++j) {
                    d[j] = xs[a][j] - xs[b][j];
                    num += lp.w[j] * d[j];
                    den += d[j] * d[j];
                }
                if (den < 1e-12) continue;
                double shift_norm = 0.0;
                for (std::size_t j = 0; j < d.size(); ++j)
                    shift_norm = std::max(shift_norm, std::abs(num / den * d[j]));
                if (shift_norm > radius) continue;
                for (std::size_t j = 0; j < d.size(); ++j)
                    cand.w[j] = lp.w[j] - num / den * d[j];
                const Solution sol = solve(cand);
                if (sol.status != SolveStatus::Optimal) continue;
                note_multiple(cand, sol);
                if (diag.multiple_optima_found) break;
            }
        }
    }
    return diag;
}

WitnessOutcome hca_witness(const Scm& scm_true, const Scm& scm_observed,
                           const std::function<AttackProblem(std::uint64_t)>& bundle,
                           const std::vector<std::uint64_t>& seeds) {
    scm_true.validate();
    scm_observed.validate();
    if (!bundle) throw ConfigError("witness: no scenario bundle supplied");
    if (seeds.empty()) throw ConfigError("witness: empty seed sweep");

    {
        const AttackProblem probe = bundle(seeds.front());
        if (!check_integral(probe.param.map, probe.dataset, probe.param.w))
            throw PreconditionError(
                "witness: the scenario's parameterization is not integral");
    }

    WitnessOutcome out;
    if (is_causally_sufficient(scm_observed)) {
        out.kind = WitnessOutcome::Kind::NoAttackCertificate;
        out.note = "observed SCM is causally sufficient; no hidden confounder "
                   "exists to lift, so no HCA can be mounted against it";
        return out;
    }

    for (std::uint64_t seed : seeds) {
        const AttackProblem p = bundle(seed);
        const AttackReport rep = attack(p.lp, p.lift, p.cfg);
        if (rep.success) {
            out.kind = WitnessOutcome::Kind::Witness;
            out.report = rep;
            out.seed = seed;
            out.note = "attack succeeded: executable witness for the insufficiency "
                       "=> attackability direction";
            return out;
        }
    }
    out.kind = WitnessOutcome::Kind::NotFound;
    out.note = "no successful attack within the seed budget (not a disproof)";
    return out;
}

} // namespace hca
