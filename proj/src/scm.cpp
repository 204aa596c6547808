#include "hca/scm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hca/errors.hpp"

namespace hca {

void Distribution::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("distribution: non-finite parameter");
    switch (kind) {
    case Kind::Constant:
        break;
    case Kind::Uniform:
        if (a > b) throw ConfigError("uniform distribution: lower > upper");
        break;
    case Kind::Normal:
    case Kind::LogNormal:
        if (b < 0) throw ConfigError("distribution: negative scale");
        break;
    }
}

double Distribution::sample(rng::Stream& stream) const {
    switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return stream.uniform(a, b);
    case Kind::Normal: return stream.normal(a, b);
    case Kind::LogNormal: return stream.lognormal(a, b);
    }
    return a;
}

bool Scm::has_variable(const std::string& var) const {
    for (const auto& v : endogenous)
        if (v.name == var) return true;
    for (const auto& u : exogenous)
        if (u.name == var) return true;
    return false;
}

void Scm::validate() const {
    std::set<std::string> endo_names, noise_names;
    for (const auto& v : endogenous)
        if (!endo_names.insert(v.name).second)
            throw ConfigError("scm: duplicate endogenous variable '" + v.name + "'");
    for (const auto& u : exogenous) {
        u.dist.validate();
        if (endo_names.count(u.name) || !noise_names.insert(u.name).second)
            throw ConfigError("scm: duplicate variable name '" + u.name + "'");
    }
    for (const auto& v : endogenous) {
        for (const auto& t : v.eq.parents) {
            if (!endo_names.count(t.var))
                throw ConfigError("scm: equation for '" + v.name +
                                  "' references unknown parent '" + t.var + "'");
            if (t.var == v.name)
                throw StructuralError("scm: '" + v.name + "' is its own parent");
        }
        for (const auto& t : v.eq.noises)
            if (!noise_names.count(t.var))
                throw ConfigError("scm: equation for '" + v.name +
                                  "' references unknown noise '" + t.var + "'");
        if (v.eq.clamped && v.eq.clamp_lo > v.eq.clamp_hi)
            throw ConfigError("scm: empty clamp interval for '" + v.name + "'");
    }
    topo_order();  // throws on cycles
}

std::vector<int> Scm::topo_order() const {
    const int n = static_cast<int>(endogenous.size());
    std::map<std::string, int> index;
    for (int i = 0; i < n; ++i) index[endogenous[i].name] = i;

    std::vector<std::vector<int>> children(n);
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i)
        for (const auto& t : endogenous[i].eq.parents) {
            const auto it = index.find(t.var);
            if (it == index.end()) continue;  // validate() reports this properly
            children[it->second].push_back(i);
            ++indeg[i];
        }

    std::vector<int> order;
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        // lowest declaration index first keeps the order deterministic
        const auto it = std::min_element(ready.begin(), ready.end());
        const int v = *it;
        ready.erase(it);
        order.push_back(v);
        for (int c : children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (static_cast<int>(order.size()) != n)
        throw StructuralError("scm: parent relation contains a cycle");
    return order;
}

double DataSet::value(std::size_t unit, const std::string& field) const {
    for (std::size_t f = 0; f < fields.size(); ++f)
        if (fields[f] == field) return units.at(unit)[f];
    throw ConfigError("dataset: unknown field '" + field + "'");
}

DataSet sample(const Scm& scm, std::size_t n, std::uint64_t seed) {
    scm.validate();
    if (n == 0) throw ConfigError("sample: need at least one unit");

    const std::vector<int> order = scm.topo_order();
    std::map<std::string, int> noise_idx, endo_idx;
    for (std::size_t i = 0; i < scm.exogenous.size(); ++i)
        noise_idx[scm.exogenous[i].name] = static_cast<int>(i);
    for (std::size_t i = 0; i < scm.endogenous.size(); ++i)
        endo_idx[scm.endogenous[i].name] = static_cast<int>(i);

    DataSet ds;
    ds.seed = seed;
    ds.source = scm.name;
    for (const auto& u : scm.exogenous) ds.noise_names.push_back(u.name);
    for (const auto& v : scm.endogenous) {
        ds.endo_names.push_back(v.name);
        if (v.observed) ds.fields.push_back(v.name);
    }

    auto term_input = [](const Term& t, double raw) {
        if (!t.log_input) return raw;
        if (raw <= 0.0)
            throw ConfigError("scm: log transform of non-positive value for '" +
                              t.var + "'");
        return std::log(raw);
    };

    for (std::size_t unit = 0; unit < n; ++unit) {
        // one independent substream per unit: order-independent and seedable
        rng::Stream stream = rng::Stream::from(seed, static_cast<std::uint64_t>(unit));
        std::vector<double> noise(scm.exogenous.size());
        for (std::size_t u = 0; u < scm.exogenous.size(); ++u)
            noise[u] = scm.exogenous[u].dist.sample(stream);

        std::vector<double> endo(scm.endogenous.size(), 0.0);
        for (int vi : order) {
            const EndoVar& v = scm.endogenous[vi];
            double val = v.eq.intercept;
            for (const auto& t : v.eq.parents)
                val += t.coef * term_input(t, endo[endo_idx.at(t.var)]);
            for (const auto& t : v.eq.noises)
                val += t.coef * term_input(t, noise[noise_idx.at(t.var)]);
            if (v.eq.clamped) val = std::clamp(val, v.eq.clamp_lo, v.eq.clamp_hi);
            endo[vi] = val;
        }

        std::vector<double> record;
        for (std::size_t vi = 0; vi < scm.endogenous.size(); ++vi)
            if (scm.endogenous[vi].observed) record.push_back(endo[vi]);
        ds.units.push_back(std::move(record));
        ds.noise_draws.push_back(std::move(noise));
        ds.endo_values.push_back(std::move(endo));
    }
    return ds;
}

std::vector<std::string> hidden_confounders(const Scm& scm) {
    std::map<std::string, std::set<std::string>> attached;
    for (const auto& v : scm.endogenous)
        for (const auto& t : v.eq.noises) attached[t.var].insert(v.name);
    std::vector<std::string> out;
    for (const auto& [noise, vars] : attached)
        if (vars.size() >= 2) out.push_back(noise);
    return out;  // std::map iteration is already sorted
}

bool is_causally_sufficient(const Scm& scm) {
    return hidden_confounders(scm).empty();
}

AdversaryView adversary_view(const Scm& scm_true, const DataSet& dataset,
                             const std::string& confounder) {
    if (dataset.source != scm_true.name)
        throw ProvenanceError("adversary view: dataset '" + dataset.source +
                              "' was not recorded by SCM '" + scm_true.name + "'");
    if (!scm_true.has_variable(confounder))
        throw ConfigError("adversary view: SCM has no variable '" + confounder + "'");

    AdversaryView view;
    view.confounder = confounder;
    for (std::size_t i = 0; i < dataset.endo_names.size(); ++i) {
        if (dataset.endo_names[i] != confounder) continue;
        for (const auto& row : dataset.endo_values) view.values.push_back(row[i]);
        return view;
    }
    for (std::size_t i = 0; i < dataset.noise_names.size(); ++i) {
        if (dataset.noise_names[i] != confounder) continue;
        for (const auto& row : dataset.noise_draws) view.values.push_back(row[i]);
        return view;
    }
    throw ProvenanceError("adversary view: dataset has no recorded draws for '" +
                          confounder + "'");
}

} // namespace hca
