#pragma once

#include <limits>
#include <string>
#include <vector>

namespace hca {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Solver tolerances. Feasibility and optimality are checked to 1e-8;
// solutions of totally unimodular problems are rounded to {0,1} at 1e-7.
inline constexpr double kFeasTol = 1e-8;
inline constexpr double kOptTol = 1e-8;
inline constexpr double kIntegralityTol = 1e-7;

enum class Sense { Minimize, Maximize };

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct Bound {
    double lower = 0.0;
    double upper = kInfinity;
};

// Dense LP: optimize <w, x> subject to A_ub x <= b_ub, A_eq x = b_eq and
// per-variable bounds (default [0, inf)). Labels name variables for reports.
struct LinearProgram {
    Sense sense = Sense::Minimize;
    std::vector<double> w;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    std::vector<Bound> bounds;   // empty means all-default
    std::vector<std::string> labels;

    std::size_t num_vars() const { return w.size(); }
    Bound bound(std::size_t j) const { return bounds.empty() ? Bound{} : bounds[j]; }

    // Throws ConfigError on inconsistent dimensions or inverted bounds.
    void validate() const;
};

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<double> reduced_costs;  // per original variable, minimize sign convention
    std::vector<int> basis;             // original-variable indices that are basic
};

// Deterministic two-phase simplex (dense tableau, bounded variables).
// Dantzig pricing with lowest-index tie-breaks; falls back to Bland's rule
// when degenerate pivots stall, which restores the anti-cycling guarantee.
Solution solve(const LinearProgram& lp);

// Collects up to `limit` distinct optimal vertices reachable from sol's basis
// by pivoting on zero-reduced-cost nonbasic variables. Always contains sol.
// A result longer than 1 certifies that the optimal face is not a point.
std::vector<Solution> enumerate_alternate_optima(const LinearProgram& lp,
                                                 const Solution& sol,
                                                 std::size_t limit);

// Rounds a near-binary vector to exact {0,1}. Throws DegenerateSolutionError
// if some entry is farther than kIntegralityTol from both.
std::vector<double> round_binary(const std::vector<double>& x);

// Structural Hamming distance between two 0/1 solution codes.
std::size_t shd(const std::vector<double>& x1, const std::vector<double>& x2);

// Max-norm violation of lp's constraints and bounds at x (0 when feasible).
double feasibility_residual(const LinearProgram& lp, const std::vector<double>& x);

} // namespace hca
