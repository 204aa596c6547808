#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hca/dpo.hpp"
#include "hca/linprog.hpp"
#include "hca/scm.hpp"

namespace hca {

enum class Family { Assignment, ShortestPath };

// Unit-level decomposition of a cost vector: unit i owns the pairwise
// disjoint index set unit_indices[i], and inverse() rebuilds the unit's
// observed record from its w-slice (or refuses when the slice no longer
// matches the parameterization).
struct IntegralParamMap {
    Family family = Family::Assignment;
    std::vector<std::vector<int>> unit_indices;
    std::vector<std::vector<int>> lift_indices;  // where confounder values land
    std::vector<std::string> fields;             // reconstructed record layout
    std::function<std::optional<std::vector<double>>(std::size_t,
                                                     const std::vector<double>&)>
        inverse;
};

struct ParamPolicy {
    Family family = Family::Assignment;
    // assignment: suitability alpha*(1 - health) + beta*priority, replicated
    // over the unit's row; the matrix is squared with zero-suitability dummy
    // spots so unmatched people simply wait
    double alpha = 1.0;
    double beta = 1.0;
    std::string health_field = "H";
    std::string priority_field = "P";
    std::size_t n_spots = 0;  // 0 means every column is a real spot
    // shortest path: one cost index per edge
    std::string cost_field = "toll";
};

struct Parameterization {
    std::vector<double> w;
    IntegralParamMap map;
};

Parameterization parameterize(const DataSet& dataset, const ParamPolicy& policy);

// True iff the index sets are pairwise disjoint, in range, and every unit's
// record is reconstructed from its w-slice within 1e-9.
bool check_integral(const IntegralParamMap& map, const DataSet& dataset,
                    const std::vector<double>& w);

// c aligned with LP variables so <c, x> sums the confounder values of the
// units active in a feasible 0/1 code.
struct ConfounderLift {
    std::vector<double> c;
};

ConfounderLift lift_confounder(const AdversaryView& view, const IntegralParamMap& map,
                               Family family);

// f(<lift.c, round(x)>); f defaults to identity.
double evaluate_h(const std::vector<double>& x, const ConfounderLift& lift,
                  const std::function<double(double)>& f = nullptr);

struct AttackConfig {
    double epsilon = 0.01;   // 0 is the explicit null attack
    std::size_t steps = 40;  // 0 likewise degenerates to the null attack
    enum class StepRule { Sign, RawGradient };
    StepRule step_rule = StepRule::Sign;
    enum class Direction { MaximizeH, MinimizeH };
    Direction direction = Direction::MaximizeH;
    NoiseSpec noise;
    double cost_gap_budget = 0.05;

    void validate() const;
};

struct AttackReport {
    std::vector<double> w;
    std::vector<double> w_hat;
    std::vector<double> x_base;
    std::vector<double> x_adv;
    double cost_base = 0.0;  // <w, x_base>
    double cost_adv = 0.0;   // <w, x_adv>: adversarial solution at original costs
    double rel_cost_gap = 0.0;
    std::size_t shd_codes = 0;
    double h_base = 0.0;
    double h_adv = 0.0;
    double delta_h = 0.0;
    bool success = false;  // code changed, h moved the configured way, gap in budget
    double perturbation_norm = 0.0;  // max-norm of w_hat - w
    std::size_t steps_taken = 0;
    SolveStatus adv_status = SolveStatus::Optimal;
};

// Iterated FGSM-style cost perturbation along the smoothed-gradient of the
// confounder functional. Stops early once the attack goal (success with h
// moved in the configured direction) is reached.
AttackReport attack(const LinearProgram& lp, const ConfounderLift& lift,
                    const AttackConfig& cfg);

struct AssumptionDiagnostics {
    bool multiple_optima_found = false;     // some w_hat in the ball has |X*| > 1
    std::vector<double> w_with_multiple;    // empty when not found
    bool solution_change_found = false;     // some w_hat changes the returned x
    std::vector<double> w_with_change;
    std::size_t trials_used = 0;
};

// Bounded randomized search for witnesses of the two attack preconditions
// inside the radius-ball around lp.w. Reports found / not-found-within-budget;
// a negative result is never a disproof.
AssumptionDiagnostics verify_assumptions(const LinearProgram& lp, double radius,
                                         std::size_t trials, std::uint64_t seed);

// Everything one attack run needs, as produced by a scenario for one seed.
struct AttackProblem {
    LinearProgram lp;
    DataSet dataset;
    Parameterization param;
    ConfounderLift lift;
    AttackConfig cfg;
};

struct WitnessOutcome {
    enum class Kind { Witness, NoAttackCertificate, NotFound };
    Kind kind = Kind::NotFound;
    std::optional<AttackReport> report;  // set for Witness
    std::uint64_t seed = 0;              // seed of the successful run
    std::string note;
};

// Executable existence check behind the sufficiency<->attackability claim: a
// causally insufficient observed SCM yields a successful attack over a seed
// sweep; a sufficient one yields a certificate that there is nothing to lift.
WitnessOutcome hca_witness(const Scm& scm_true, const Scm& scm_observed,
                           const std::function<AttackProblem(std::uint64_t)>& bundle,
                           const std::vector<std::uint64_t>& seeds);

} // namespace hca
