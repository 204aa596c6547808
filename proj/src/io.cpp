#include "hca/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hca/errors.hpp"

namespace hca::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

json bound_to_json(double v, bool upper) {
    if (v == (upper ? kInfinity : -kInfinity)) return nullptr;
    return v;
}

double bound_from_json(const json& j, bool upper) {
    if (j.is_null()) return upper ? kInfinity : -kInfinity;
    if (!j.is_number()) throw ConfigError("lp: bound must be a number or null");
    return j.get<double>();
}

std::vector<std::vector<double>> matrix_from_json(const json& j, const char* name) {
    std::vector<std::vector<double>> m;
    if (j.is_null()) return m;
    if (!j.is_array()) throw ConfigError(std::string("lp: ") + name + " must be an array");
    for (const json& row : j) m.push_back(row.get<std::vector<double>>());
    return m;
}

} // namespace

json lp_to_json(const LinearProgram& lp) {
    json j;
    j["sense"] = lp.sense == Sense::Maximize ? "maximize" : "minimize";
    j["w"] = lp.w;
    j["a_ub"] = lp.a_ub;
    j["b_ub"] = lp.b_ub;
    j["a_eq"] = lp.a_eq;
    j["b_eq"] = lp.b_eq;
    json bounds = json::array();
    for (const Bound& b : lp.bounds)
        bounds.push_back({bound_to_json(b.lower, false), bound_to_json(b.upper, true)});
    j["bounds"] = bounds;
    if (!lp.labels.empty()) j["labels"] = lp.labels;
    return j;
}

LinearProgram lp_from_json(const json& j) {
    LinearProgram lp;
    const std::string sense = j.value("sense", "minimize");
    if (sense == "maximize")
        lp.sense = Sense::Maximize;
    else if (sense == "minimize")
        lp.sense = Sense::Minimize;
    else
        throw ConfigError("lp: sense must be \"minimize\" or \"maximize\"");
    if (!j.contains("w")) throw ConfigError("lp: missing cost vector w");
    lp.w = j.at("w").get<std::vector<double>>();
    lp.a_ub = matrix_from_json(j.value("a_ub", json()), "a_ub");
    lp.b_ub = j.value("b_ub", std::vector<double>{});
    lp.a_eq = matrix_from_json(j.value("a_eq", json()), "a_eq");
    lp.b_eq = j.value("b_eq", std::vector<double>{});
    if (j.contains("bounds")) {
        for (const json& b : j.at("bounds")) {
            if (!b.is_array() || b.size() != 2)
                throw ConfigError("lp: each bound must be a [lower, upper] pair");
            lp.bounds.push_back({bound_from_json(b[0], false), bound_from_json(b[1], true)});
        }
    }
    if (j.contains("labels")) lp.labels = j.at("labels").get<std::vector<std::string>>();
    lp.validate();
    return lp;
}

namespace {

std::string step_rule_name(AttackConfig::StepRule r) {
    return r == AttackConfig::StepRule::Sign ? "sign" : "raw-gradient";
}

std::string direction_name(AttackConfig::Direction d) {
    return d == AttackConfig::Direction::MaximizeH ? "maximize-h" : "minimize-h";
}

std::string family_name(NoiseSpec::Family f) {
    return f == NoiseSpec::Family::StandardNormal ? "standard-normal" : "gumbel";
}

std::string status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

} // namespace

json attack_config_to_json(const AttackConfig& cfg) {
    json j;
    j["epsilon"] = cfg.epsilon;
    j["steps"] = cfg.steps;
    j["step_rule"] = step_rule_name(cfg.step_rule);
    j["direction"] = direction_name(cfg.direction);
    j["cost_gap_budget"] = cfg.cost_gap_budget;
    j["noise"] = {{"family", family_name(cfg.noise.family)},
                  {"sigma", cfg.noise.sigma},
                  {"n_samples", cfg.noise.n_samples},
                  {"seed", cfg.noise.seed}};
    return j;
}

namespace {

// A key the overlay would silently drop usually means a typo or the wrong
// file altogether, so refuse it instead of running with defaults.
void reject_unknown_fields(const json& j, std::initializer_list<const char*> known,
                           const std::string& prefix) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw ConfigError(prefix + item.key() + ": unknown field");
    }
}

} // namespace

AttackConfig attack_config_from_json(const json& j, AttackConfig base) {
    if (j.is_null()) return base;
    if (!j.is_object()) throw ConfigError("attack config must be an object");
    reject_unknown_fields(
        j, {"epsilon", "steps", "cost_gap_budget", "step_rule", "direction", "noise"},
        "attack.");
    base.epsilon = j.value("epsilon", base.epsilon);
    base.steps = j.value("steps", base.steps);
    base.cost_gap_budget = j.value("cost_gap_budget", base.cost_gap_budget);
    if (j.contains("step_rule")) {
        const std::string s = j.at("step_rule").get<std::string>();
        if (s == "sign")
            base.step_rule = AttackConfig::StepRule::Sign;
        else if (s == "raw-gradient")
            base.step_rule = AttackConfig::StepRule::RawGradient;
        else
            throw ConfigError("attack config: step_rule must be \"sign\" or "
                              "\"raw-gradient\", got \"" + s + "\"");
    }
    if (j.contains("direction")) {
        const std::string s = j.at("direction").get<std::string>();
        if (s == "maximize-h")
            base.direction = AttackConfig::Direction::MaximizeH;
        else if (s == "minimize-h")
            base.direction = AttackConfig::Direction::MinimizeH;
        else
            throw ConfigError("attack config: direction must be \"maximize-h\" or "
                              "\"minimize-h\", got \"" + s + "\"");
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        reject_unknown_fields(n, {"sigma", "n_samples", "seed", "family"},
                              "attack.noise.");
        base.noise.sigma = n.value("sigma", base.noise.sigma);
        base.noise.n_samples = n.value("n_samples", base.noise.n_samples);
        base.noise.seed = n.value("seed", base.noise.seed);
        if (n.contains("family")) {
            const std::string f = n.at("family").get<std::string>();
            if (f == "standard-normal")
                base.noise.family = NoiseSpec::Family::StandardNormal;
            else if (f == "gumbel")
                base.noise.family = NoiseSpec::Family::Gumbel;
            else
                throw ConfigError("attack config: noise.family must be "
                                  "\"standard-normal\" or \"gumbel\", got \"" + f + "\"");
        }
    }
    try {
        base.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("attack.") + e.what());  // field path
    }
    return base;
}

json attack_report_to_json(const AttackReport& rep) {
    json j;
    j["w"] = rep.w;
    j["w_hat"] = rep.w_hat;
    j["x_base"] = rep.x_base;
    j["x_adv"] = rep.x_adv;
    j["cost_base"] = rep.cost_base;
    j["cost_adv"] = rep.cost_adv;
    j["rel_cost_gap"] = rep.rel_cost_gap;
    j["shd_codes"] = rep.shd_codes;
    j["h_base"] = rep.h_base;
    j["h_adv"] = rep.h_adv;
    j["delta_h"] = rep.delta_h;
    j["success"] = rep.success;
    j["perturbation_norm"] = rep.perturbation_norm;
    j["steps_taken"] = rep.steps_taken;
    j["adv_status"] = status_name(rep.adv_status);
    return j;
}

json scenario_result_to_json(const ScenarioResult& res) {
    json j;
    j["scenario"] = res.scenario;
    j["seed"] = res.seed;
    j["config"] = attack_config_to_json(res.cfg);
    if (res.scenario == "energy") {
        json rows = json::array();
        for (const EnergyRow& r : res.energy)
            rows.push_back({{"cap_pv", r.cap_pv},
                            {"cap_bat", r.cap_bat},
                            {"self_gen", r.self_gen},
                            {"totex", r.totex},
                            {"capex", r.capex},
                            {"con_gas", r.con_gas},
                            {"con_ele", r.con_ele},
                            {"w_pv", r.w_pv}});
        j["energy"] = rows;
        j["balance_residual"] = res.balance_residual;
    } else {
        j["report"] = attack_report_to_json(res.report);
        j["mean_matched_confounder_base"] = res.mean_matched_conf_base;
        j["mean_matched_confounder_adv"] = res.mean_matched_conf_adv;
    }
    return j;
}

std::string csv_escape(const std::string& field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

constexpr const char* kCrLf = "\r\n";

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    out += kCrLf;
    return out;
}

} // namespace

std::string dataset_csv(const DataSet& ds) {
    std::vector<std::string> header = {"unit_id"};
    header.insert(header.end(), ds.fields.begin(), ds.fields.end());
    std::string out = csv_row(header);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i)};
        for (double v : ds.units[i]) row.push_back(format_double(v));
        out += csv_row(row);
    }
    return out;
}

std::string skew_csv(const std::vector<SkewRow>& rows) {
    std::string out =
        csv_row({"unit_id", "confounder_value", "matched_base", "matched_adv"});
    for (const SkewRow& r : rows)
        out += csv_row({std::to_string(r.unit), format_double(r.confounder),
                        r.matched_base ? "1" : "0", r.matched_adv ? "1" : "0"});
    return out;
}

std::string energy_csv(const std::vector<EnergyRow>& rows) {
    std::string out = csv_row({"Cap_PV", "Cap_Bat", "Self-Gen", "TOTEX", "CAPEX",
                               "Con_Gas", "Con_Ele", "w_PV"});
    for (const EnergyRow& r : rows)
        out += csv_row({format_double(r.cap_pv), format_double(r.cap_bat),
                        format_double(r.self_gen), format_double(r.totex),
                        format_double(r.capex), format_double(r.con_gas),
                        format_double(r.con_ele), format_double(r.w_pv)});
    return out;
}

std::string edges_csv(const Graph& g) {
    std::string out = csv_row({"src", "dst", "cost", "confounder"});
    for (const Edge& e : g.edges) {
        std::vector<std::string> row = {e.src, e.dst, format_double(e.cost)};
        row.push_back(e.confounder ? format_double(*e.confounder) : "");
        out += csv_row(row);
    }
    return out;
}

std::string profiles_csv(const EnergyProfiles& prof) {
    std::string out = csv_row({"hour", "demand_kwh", "avail_pv"});
    for (std::size_t t = 0; t < prof.demand_kwh.size(); ++t)
        out += csv_row({std::to_string(t), format_double(prof.demand_kwh[t]),
                        format_double(prof.avail_pv[t])});
    return out;
}

namespace {

// Minimal RFC-4180 field splitter for one logical record.
std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    const auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

} // namespace

Graph graph_from_edges_csv(const std::string& text) {
    Graph g;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_record(line);
        if (f.size() < 3 || f.size() > 4)
            throw ConfigError("edge list line " + std::to_string(lineno) +
                              ": expected src,dst,cost[,confounder]");
        double cost = 0.0;
        if (!parse_double(f[2], cost)) {
            if (lineno == 1) continue;  // header row
            throw ConfigError("edge list line " + std::to_string(lineno) +
                              ": cost is not a number: \"" + f[2] + "\"");
        }
        std::optional<double> conf;
        if (f.size() == 4 && !f[3].empty()) {
            double c = 0.0;
            if (!parse_double(f[3], c))
                throw ConfigError("edge list line " + std::to_string(lineno) +
                                  ": confounder is not a number: \"" + f[3] + "\"");
            conf = c;
        }
        g.add_edge(f[0], f[1], cost, conf);
    }
    if (g.edges.empty()) throw ConfigError("edge list contains no edges");
    return g;
}

EnergyProfiles profiles_from_csv(const std::string& text) {
    EnergyProfiles prof;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_record(line);
        if (f.size() != 3)
            throw ConfigError("profiles line " + std::to_string(lineno) +
                              ": expected hour,demand_kwh,avail_pv");
        double demand = 0.0, avail = 0.0;
        if (!parse_double(f[1], demand) || !parse_double(f[2], avail)) {
            if (lineno == 1) continue;  // header row
            throw ConfigError("profiles line " + std::to_string(lineno) +
                              ": demand/avail are not numbers");
        }
        prof.demand_kwh.push_back(demand);
        prof.avail_pv.push_back(avail);
    }
    if (prof.demand_kwh.empty()) throw ConfigError("profiles file contains no rows");
    return prof;
}

std::vector<double> lift_from_json(const json& j) {
    if (!j.is_object() || !j.contains("c"))
        throw ConfigError("lift file must be an object with a \"c\" array");
    return j.at("c").get<std::vector<double>>();
}

std::string graph_dot(const Graph& g,
                      const std::vector<std::vector<double>>& solutions) {
    for (const auto& sol : solutions)
        if (sol.size() != g.edges.size())
            throw ConfigError("graph export: solution length does not match edge count");

    auto active = [&](std::size_t which, std::size_t edge) {
        return which < solutions.size() && solutions[which][edge] > 0.5;
    };

    std::string out = "digraph g {\n";
    std::vector<std::string> nodes = g.nodes;
    std::sort(nodes.begin(), nodes.end());
    for (const std::string& n : nodes) out += "  \"" + n + "\";\n";
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        out += "  \"" + e.src + "\" -> \"" + e.dst + "\" [label=\"" +
               format_double(e.cost) + "\"";
        const bool in_base = active(0, i);
        const bool in_adv = active(1, i);
        if (in_base && in_adv)
            out += ", color=\"purple\", penwidth=3";
        else if (in_base)
            out += ", color=\"steelblue\", penwidth=2";
        else if (in_adv)
            out += ", color=\"crimson\", style=\"dashed\", penwidth=2";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

std::vector<std::string> write_scenario_artifacts(const fs::path& dir,
                                                  ScenarioResult& res) {
    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file_atomic(dir / name, content);
        files.push_back(name);
    };

    emit("result.json", scenario_result_to_json(res).dump(2) + "\n");
    if (res.scenario == "vaccination") {
        emit("skew.csv", skew_csv(res.skew));
        emit("dataset.csv", dataset_csv(res.dataset));
    } else if (res.scenario == "shortest-path") {
        emit("skew.csv", skew_csv(res.skew));
        emit("edges.csv", edges_csv(res.graph));
        emit("routes.dot",
             graph_dot(res.graph, {round_binary(res.report.x_base),
                                   round_binary(res.report.x_adv)}));
    } else if (res.scenario == "energy") {
        emit("comparison.csv", energy_csv(res.energy));
        emit("profiles.csv", profiles_csv(res.profiles));
    }
    res.artifact_files = files;
    return files;
}

} // namespace hca::io
