#include "hca/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hca/errors.hpp"

namespace hca {

int Graph::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == name) return static_cast<int>(i);
    return -1;
}

void Graph::add_node(const std::string& name) {
    if (node_index(name) < 0) nodes.push_back(name);
}

void Graph::add_edge(std::string src, std::string dst, double cost,
                     std::optional<double> confounder) {
    add_node(src);
    add_node(dst);
    edges.push_back(Edge{std::move(src), std::move(dst), cost, confounder});
}

AssignmentLp build_assignment_lp(const std::vector<std::vector<double>>& suitability) {
    const std::size_t n = suitability.size();
    if (n == 0) throw ConfigError("assignment: empty matrix");
    for (const auto& row : suitability)
        if (row.size() != n)
            throw ConfigError("assignment: doubly-stochastic constraints need a square matrix");

    AssignmentLp out;
    LinearProgram& lp = out.lp;
    lp.sense = Sense::Maximize;
    lp.w.resize(n * n);
    lp.bounds.assign(n * n, Bound{0.0, 1.0});
    lp.labels.resize(n * n);
    out.worker_indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const int idx = static_cast<int>(i * n + j);
            lp.w[idx] = suitability[i][j];
            lp.labels[idx] =
                "x[worker=" + std::to_string(i) + ",job=" + std::to_string(j) + "]";
            out.worker_indices[i].push_back(idx);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {  // each worker fully assigned
        std::vector<double> row(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(1.0);
    }
    for (std::size_t j = 0; j < n; ++j) {  // each job fully staffed
        std::vector<double> row(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i * n + j] = 1.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(1.0);
    }
    lp.validate();
    return out;
}

ShortestPathLp build_shortest_path_lp(const Graph& g, const std::string& s,
                                      const std::string& t) {
    const int si = g.node_index(s);
    const int ti = g.node_index(t);
    if (si < 0) throw ConfigError("shortest-path: source node '" + s + "' not in graph");
    if (ti < 0) throw ConfigError("shortest-path: target node '" + t + "' not in graph");
    if (si == ti) throw ConfigError("shortest-path: source equals target");
    for (const auto& e : g.edges)
        if (!std::isfinite(e.cost))
            throw ConfigError("shortest-path: non-finite edge cost");

    ShortestPathLp out;
    LinearProgram& lp = out.lp;
    const std::size_t m = g.edges.size();
    lp.sense = Sense::Minimize;
    lp.w.resize(m);
    lp.bounds.assign(m, Bound{0.0, 1.0});
    lp.labels.resize(m);
    out.edge_index.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
        lp.w[e] = g.edges[e].cost;
        lp.labels[e] = "x[edge=(" + g.edges[e].src + "," + g.edges[e].dst + ")]";
        out.edge_index[e] = static_cast<int>(e);
    }
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        std::vector<double> row(m, 0.0);
        for (std::size_t e = 0; e < m; ++e) {
            if (g.node_index(g.edges[e].src) == static_cast<int>(v)) row[e] += 1.0;
            if (g.node_index(g.edges[e].dst) == static_cast<int>(v)) row[e] -= 1.0;
        }
        const double rhs = v == static_cast<std::size_t>(si)   ? 1.0
                           : v == static_cast<std::size_t>(ti) ? -1.0
                                                               : 0.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(rhs);
    }
    lp.validate();
    return out;
}

EnergyLp build_energy_lp(const EnergyParams& params, const EnergyProfiles& profiles) {
    const std::size_t horizon = profiles.demand_kwh.size();
    if (horizon < 1) throw ConfigError("energy: empty demand profile");
    if (profiles.avail_pv.size() != horizon)
        throw ConfigError("energy: avail_pv length differs from demand profile");
    if (params.c_pv < 0 || params.c_bat < 0 || params.c_ele < 0 || params.c_gas < 0)
        throw ConfigError("energy: negative price");
    if (params.u_gas < 0) throw ConfigError("energy: negative gas ceiling");
    double sum_d = 0.0;
    for (double d : profiles.demand_kwh) {
        if (d < 0) throw ConfigError("energy: negative demand");
        sum_d += d;
    }
    for (double a : profiles.avail_pv)
        if (a < 0.0 || a > 1.0) throw ConfigError("energy: avail_pv outside [0,1]");
    if (std::abs(sum_d - params.total_demand) >
        1e-6 * std::max(1.0, std::abs(params.total_demand)))
        throw ConfigError("energy: demand profile sum differs from declared total");

    const int T = static_cast<int>(horizon);
    EnergyLp out;
    out.layout.horizon = T;
    const EnergyLayout& L = out.layout;
    LinearProgram& lp = out.lp;
    const std::size_t k = 2 + 6 * horizon;
    lp.sense = Sense::Minimize;
    lp.w.assign(k, 0.0);
    lp.bounds.assign(k, Bound{});
    lp.labels.assign(k, "");
    lp.labels[L.cap_pv] = "Cap_PV";
    lp.labels[L.cap_bat] = "Cap_Bat";
    lp.w[L.cap_pv] = params.c_pv;
    lp.w[L.cap_bat] = params.c_bat;
    for (int t = 0; t < T; ++t) {
        const std::string ts = "[t=" + std::to_string(t) + "]";
        lp.labels[L.p_ele(t)] = "p_Ele" + ts;
        lp.labels[L.p_pv(t)] = "p_PV" + ts;
        lp.labels[L.p_in(t)] = "p_in_Bat" + ts;
        lp.labels[L.p_out(t)] = "p_out_Bat" + ts;
        lp.labels[L.p_state(t)] = "p_S_Bat" + ts;
        lp.labels[L.p_gas(t)] = "p_Gas" + ts;
        lp.w[L.p_ele(t)] = params.c_ele;
        lp.w[L.p_gas(t)] = params.c_gas;
        lp.bounds[L.p_gas(t)] = Bound{0.0, params.u_gas};
    }

    auto zero_row = [&] { return std::vector<double>(k, 0.0); };
    for (int t = 0; t < T; ++t) {
        // supply balance
        auto bal = zero_row();
        bal[L.p_ele(t)] = 1.0;
        bal[L.p_pv(t)] = 1.0;
        bal[L.p_out(t)] = 1.0;
        bal[L.p_in(t)] = -1.0;
        bal[L.p_gas(t)] = 1.0;
        lp.a_eq.push_back(std::move(bal));
        lp.b_eq.push_back(profiles.demand_kwh[t]);

        // stored energy carried between hours, empty at the start
        auto st = zero_row();
        st[L.p_state(t)] = 1.0;
        st[L.p_in(t)] = -1.0;
        st[L.p_out(t)] = 1.0;
        if (t > 0) st[L.p_state(t - 1)] = -1.0;
        lp.a_eq.push_back(std::move(st));
        lp.b_eq.push_back(0.0);

        // PV output limited by installed capacity times availability (dt = 1h)
        auto pv = zero_row();
        pv[L.p_pv(t)] = 1.0;
        pv[L.cap_pv] = -profiles.avail_pv[t];
        lp.a_ub.push_back(std::move(pv));
        lp.b_ub.push_back(0.0);

        // charge/discharge rates capped by battery size
        auto in = zero_row();
        in[L.p_in(t)] = 1.0;
        in[L.cap_bat] = -1.0;
        lp.a_ub.push_back(std::move(in));
        lp.b_ub.push_back(0.0);
        auto outr = zero_row();
        outr[L.p_out(t)] = 1.0;
        outr[L.cap_bat] = -1.0;
        lp.a_ub.push_back(std::move(outr));
        lp.b_ub.push_back(0.0);
    }
    lp.validate();
    return out;
}

Solution brute_force_assignment(const std::vector<std::vector<double>>& cost,
                                Sense sense) {
    const std::size_t n = cost.size();
    if (n == 0) throw ConfigError("brute-force assignment: empty matrix");
    if (n > 8)
        throw PreconditionError("brute-force assignment: n > 8 refused");
    for (const auto& row : cost)
        if (row.size() != n) throw ConfigError("brute-force assignment: not square");

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best;
    double best_obj = 0.0;
    do {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += cost[i][perm[i]];
        const bool better = sense == Sense::Maximize ? obj > best_obj : obj < best_obj;
        if (best.empty() || better) {
            best = perm;
            best_obj = obj;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Solution sol;
    sol.status = SolveStatus::Optimal;
    sol.x.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sol.x[i * n + best[i]] = 1.0;
    sol.objective = best_obj;
    return sol;
}

namespace {

struct PathSearch {
    const Graph* g;
    int target;
    std::vector<std::vector<int>> adj;  // per node, edge ids sorted by (dst name, id)
    std::vector<bool> visited;
    std::vector<int> edge_stack;
    std::vector<std::string> node_stack;
    long long enumerated = 0;

    bool have_best = false;
    double best_cost = 0.0;
    std::vector<int> best_edges;
    std::vector<std::string> best_nodes;

    void dfs(int v, double cost) {
        if (v == target) {
            if (++enumerated > 1000000)
                throw PreconditionError("brute-force paths: more than 1e6 simple paths");
            if (!have_best || cost < best_cost ||
                (cost == best_cost && node_stack < best_nodes)) {
                have_best = true;
                best_cost = cost;
                best_edges = edge_stack;
                best_nodes = node_stack;
            }
            return;
        }
        visited[v] = true;
        for (int e : adj[v]) {
            const int u = g->node_index(g->edges[e].dst);
            if (visited[u]) continue;
            edge_stack.push_back(e);
            node_stack.push_back(g->nodes[u]);
            dfs(u, cost + g->edges[e].cost);
            node_stack.pop_back();
            edge_stack.pop_back();
        }
        visited[v] = false;
    }
};

} // namespace

Solution brute_force_paths(const Graph& g, const std::string& s, const std::string& t) {
    const int si = g.node_index(s);
    const int ti = g.node_index(t);
    if (si < 0 || ti < 0) throw ConfigError("brute-force paths: endpoint not in graph");
    if (si == ti) throw ConfigError("brute-force paths: source equals target");

    PathSearch ps;
    ps.g = &g;
    ps.target = ti;
    ps.adj.resize(g.nodes.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        ps.adj[g.node_index(g.edges[e].src)].push_back(static_cast<int>(e));
    for (auto& lst : ps.adj)
        std::sort(lst.begin(), lst.end(), [&](int a, int b) {
            if (g.edges[a].dst != g.edges[b].dst) return g.edges[a].dst < g.edges[b].dst;
            return a < b;
        });
    ps.visited.assign(g.nodes.size(), false);
    ps.node_stack.push_back(s);
    ps.dfs(si, 0.0);

    Solution sol;
    if (!ps.have_best) {
        sol.status = SolveStatus::Infeasible;
        return sol;
    }
    sol.status = SolveStatus::Optimal;
    sol.x.assign(g.edges.size(), 0.0);
    for (int e : ps.best_edges) sol.x[e] = 1.0;
    sol.objective = ps.best_cost;
    return sol;
}

} // namespace hca
