#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hca/rng.hpp"

namespace hca {

struct Distribution {
    enum class Kind { Constant, Uniform, Normal, LogNormal };
    Kind kind = Kind::Constant;
    double a = 0.0;  // constant value | lower | mean | mu
    double b = 0.0;  // unused | upper | stddev | sigma

    static Distribution constant(double v) { return {Kind::Constant, v, 0.0}; }
    static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Distribution normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
    static Distribution lognormal(double mu, double sigma) {
        return {Kind::LogNormal, mu, sigma};
    }

    void validate() const;
    double sample(rng::Stream& stream) const;
};

struct ExoVar {
    std::string name;
    Distribution dist;
};

// One additive input to a linear-plus-clamp structural equation.
struct Term {
    std::string var;
    double coef = 1.0;
    bool log_input = false;
};

struct Equation {
    double intercept = 0.0;
    std::vector<Term> parents;  // endogenous inputs
    std::vector<Term> noises;   // exogenous inputs
    bool clamped = false;
    double clamp_lo = 0.0;
    double clamp_hi = 1.0;
};

struct EndoVar {
    std::string name;
    Equation eq;
    bool observed = true;
};

// Semi-Markovian SCM: noise variables may feed several structural equations,
// which is exactly what makes a hidden confounder.
struct Scm {
    std::string name;
    std::vector<ExoVar> exogenous;
    std::vector<EndoVar> endogenous;

    void validate() const;                // throws StructuralError on cycles
    std::vector<int> topo_order() const;  // indices into `endogenous`
    bool has_variable(const std::string& var) const;
};

struct DataSet {
    std::vector<std::string> fields;  // observed endogenous names
    std::vector<std::vector<double>> units;
    std::uint64_t seed = 0;
    std::string source;

    // Per-unit realizations kept so confounder projections are exact instead
    // of re-simulated.
    std::vector<std::string> noise_names;
    std::vector<std::vector<double>> noise_draws;
    std::vector<std::string> endo_names;  // all endogenous, hidden included
    std::vector<std::vector<double>> endo_values;

    std::size_t size() const { return units.size(); }
    double value(std::size_t unit, const std::string& field) const;
};

struct AdversaryView {
    std::string confounder;
    std::vector<double> values;  // aligned index-for-index with the DataSet
};

DataSet sample(const Scm& scm, std::size_t n, std::uint64_t seed);

// Noise variables feeding at least two distinct structural equations, sorted.
std::vector<std::string> hidden_confounders(const Scm& scm);
bool is_causally_sufficient(const Scm& scm);

// Ground-truth per-unit values of `confounder` as realized when `dataset`
// was sampled. The name may be an endogenous or a noise variable of the
// recording SCM.
AdversaryView adversary_view(const Scm& scm_true, const DataSet& dataset,
                             const std::string& confounder);

} // namespace hca
