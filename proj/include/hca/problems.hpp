#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hca/linprog.hpp"

namespace hca {

struct Edge {
    std::string src;
    std::string dst;
    double cost = 0.0;
    std::optional<double> confounder;  // side-channel value some scenarios attach
};

struct Graph {
    std::vector<std::string> nodes;  // insertion order
    std::vector<Edge> edges;         // insertion order doubles as LP variable order

    int node_index(const std::string& name) const;
    void add_node(const std::string& name);
    void add_edge(std::string src, std::string dst, double cost,
                  std::optional<double> confounder = std::nullopt);
};

struct AssignmentLp {
    LinearProgram lp;
    // worker i owns exactly the cost-vector indices of its row
    std::vector<std::vector<int>> worker_indices;
};

struct ShortestPathLp {
    LinearProgram lp;
    std::vector<int> edge_index;  // graph edge -> cost-vector index
};

// Matches workers to jobs on a doubly-stochastic polytope; suitability is
// maximized. Requires a square matrix.
AssignmentLp build_assignment_lp(const std::vector<std::vector<double>>& suitability);

// Min-cost s-t unit flow with x per edge in [0,1].
ShortestPathLp build_shortest_path_lp(const Graph& g, const std::string& s,
                                      const std::string& t);

struct EnergyParams {
    double c_pv = 0.0;           // €/kW
    double c_bat = 0.0;          // €/kWh
    double c_ele = 0.0;          // €/kWh
    double c_gas = 0.0;          // €/kWh
    double u_gas = 0.0;          // per-hour gas ceiling, kWh
    double total_demand = 0.0;   // must equal the profile sum
};

struct EnergyProfiles {
    std::vector<double> demand_kwh;  // per hour
    std::vector<double> avail_pv;    // capacity factor in [0,1] per hour
};

struct EnergyLayout {
    int horizon = 0;
    int cap_pv = 0;
    int cap_bat = 1;
    int p_ele(int t) const { return 2 + 6 * t; }
    int p_pv(int t) const { return 3 + 6 * t; }
    int p_in(int t) const { return 4 + 6 * t; }
    int p_out(int t) const { return 5 + 6 * t; }
    int p_state(int t) const { return 6 + 6 * t; }
    int p_gas(int t) const { return 7 + 6 * t; }
};

struct EnergyLp {
    LinearProgram lp;
    EnergyLayout layout;
};

// Household capacity-expansion LP over an hourly horizon: grid electricity,
// PV sized by Cap_PV, a battery whose charge/discharge rates are capped by
// Cap_Bat, and an optional gas backstop.
EnergyLp build_energy_lp(const EnergyParams& params, const EnergyProfiles& profiles);

// Exhaustive oracles used to pin the solver down in tests.
Solution brute_force_assignment(const std::vector<std::vector<double>>& cost,
                                Sense sense = Sense::Maximize);
Solution brute_force_paths(const Graph& g, const std::string& s, const std::string& t);

} // namespace hca
