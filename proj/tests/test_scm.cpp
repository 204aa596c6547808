#include "doctest.h"

#include <cmath>

#include "hca/errors.hpp"
#include "hca/scenarios.hpp"
#include "hca/scm.hpp"

using namespace hca;

namespace {

Scm chain_scm() {  // A <- U_A, B <- A + U_B: no shared noise
    Scm scm;
    scm.name = "chain";
    scm.exogenous = {{"U_A", Distribution::normal(0.0, 1.0)},
                     {"U_B", Distribution::normal(0.0, 1.0)}};
    EndoVar a;
    a.name = "A";
    a.eq.noises.push_back(Term{"U_A", 1.0, false});
    EndoVar b;
    b.name = "B";
    b.eq.parents.push_back(Term{"A", 0.5, false});
    b.eq.noises.push_back(Term{"U_B", 1.0, false});
    scm.endogenous = {a, b};
    return scm;
}

double pearson(const DataSet& ds, const std::string& f1, const std::string& f2) {
    const std::size_t n = ds.size();
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += ds.value(i, f1);
        m2 += ds.value(i, f2);
    }
    m1 /= n;
    m2 /= n;
    double c12 = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = ds.value(i, f1) - m1;
        const double d2 = ds.value(i, f2) - m2;
        c12 += d1 * d2;
        v1 += d1 * d1;
        v2 += d2 * d2;
    }
    return c12 / std::sqrt(v1 * v2);
}

} // namespace

TEST_CASE("degenerate constant noise gives constant records") {
    Scm scm;
    scm.name = "const";
    scm.exogenous = {{"U1", Distribution::constant(0.0)}};
    EndoVar v;
    v.name = "V1";
    v.eq.noises.push_back(Term{"U1", 1.0, false});
    scm.endogenous = {v};
    const DataSet ds = sample(scm, 3, 42);
    REQUIRE(ds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(ds.units[i][0] == 0.0);
}

TEST_CASE("vaccination data shows the negative health-priority correlation") {
    const DataSet ds = sample(vaccination_modeller_scm(), 1000, 7);
    CHECK(ds.fields == std::vector<std::string>({"H", "P"}));
    CHECK(pearson(ds, "H", "P") < 0.0);
}

TEST_CASE("sampling is bit-identical for a fixed seed") {
    const Scm scm = vaccination_modeller_scm();
    const DataSet a = sample(scm, 50, 99);
    const DataSet b = sample(scm, 50, 99);
    REQUIRE(a.units.size() == b.units.size());
    for (std::size_t i = 0; i < a.units.size(); ++i) {
        for (std::size_t f = 0; f < a.units[i].size(); ++f)
            CHECK(a.units[i][f] == b.units[i][f]);
        for (std::size_t u = 0; u < a.noise_draws[i].size(); ++u)
            CHECK(a.noise_draws[i][u] == b.noise_draws[i][u]);
    }
}

TEST_CASE("unit records do not depend on how many units are drawn") {
    const Scm scm = vaccination_modeller_scm();
    const DataSet small = sample(scm, 5, 123);
    const DataSet big = sample(scm, 50, 123);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t f = 0; f < small.units[i].size(); ++f)
            CHECK(small.units[i][f] == big.units[i][f]);
}

TEST_CASE("hidden confounder detection") {
    CHECK(hidden_confounders(chain_scm()).empty());
    CHECK(is_causally_sufficient(chain_scm()));

    const Scm observed = vaccination_modeller_scm();
    CHECK(hidden_confounders(observed) == std::vector<std::string>({"U_C"}));
    CHECK_FALSE(is_causally_sufficient(observed));

    CHECK(is_causally_sufficient(vaccination_true_scm()));

    Scm fan = chain_scm();  // attach one noise to three variables
    fan.exogenous.push_back({"U_X", Distribution::normal(0.0, 1.0)});
    EndoVar c;
    c.name = "C";
    c.eq.noises.push_back(Term{"U_X", 1.0, false});
    fan.endogenous.push_back(c);
    for (auto& v : fan.endogenous) v.eq.noises.push_back(Term{"U_X", 0.5, false});
    const auto hidden = hidden_confounders(fan);
    CHECK(std::find(hidden.begin(), hidden.end(), "U_X") != hidden.end());
}

TEST_CASE("adversary view exposes recorded confounder draws") {
    const Scm truth = vaccination_true_scm();
    const DataSet ds = sample(truth, 20, 5);
    CHECK(ds.fields == std::vector<std::string>({"H", "P"}));  // W unobserved

    const AdversaryView wealth = adversary_view(truth, ds, "W");
    REQUIRE(wealth.values.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(wealth.values[i] > 0.0);                       // lognormal support
        CHECK(wealth.values[i] == ds.noise_draws[i][0]);     // W <- U_W identity
    }

    CHECK_THROWS_AS(adversary_view(truth, ds, "Z"), ConfigError);
    const Scm other = vaccination_modeller_scm();
    CHECK_THROWS_AS(adversary_view(other, ds, "U_C"), ProvenanceError);
}

TEST_CASE("constant confounder projects constantly") {
    Scm scm;
    scm.name = "const-conf";
    scm.exogenous = {{"U_C", Distribution::constant(5.0)},
                     {"U_A", Distribution::normal(0.0, 1.0)},
                     {"U_B", Distribution::normal(0.0, 1.0)}};
    EndoVar a;
    a.name = "A";
    a.eq.noises = {Term{"U_C", 1.0, false}, Term{"U_A", 1.0, false}};
    EndoVar b;
    b.name = "B";
    b.eq.noises = {Term{"U_C", 1.0, false}, Term{"U_B", 1.0, false}};
    scm.endogenous = {a, b};
    const DataSet ds = sample(scm, 4, 1);
    const AdversaryView view = adversary_view(scm, ds, "U_C");
    for (double v : view.values) CHECK(v == 5.0);
}

TEST_CASE("cycles and bad references are rejected") {
    Scm cyc;
    cyc.name = "cyc";
    cyc.exogenous = {{"U", Distribution::normal(0.0, 1.0)}};
    EndoVar a, b;
    a.name = "A";
    a.eq.parents.push_back(Term{"B", 1.0, false});
    b.name = "B";
    b.eq.parents.push_back(Term{"A", 1.0, false});
    cyc.endogenous = {a, b};
    CHECK_THROWS_AS(cyc.validate(), StructuralError);

    Scm missing;
    missing.name = "missing";
    EndoVar v;
    v.name = "V";
    v.eq.noises.push_back(Term{"U_missing", 1.0, false});
    missing.endogenous = {v};
    CHECK_THROWS_AS(missing.validate(), ConfigError);

    Scm bad_dist;
    bad_dist.name = "bad";
    bad_dist.exogenous = {{"U", Distribution::normal(0.0, -1.0)}};
    EndoVar w;
    w.name = "W";
    w.eq.noises.push_back(Term{"U", 1.0, false});
    bad_dist.endogenous = {w};
    CHECK_THROWS_AS(sample(bad_dist, 1, 0), ConfigError);
}

TEST_CASE("log transform requires positive input") {
    Scm scm;
    scm.name = "log";
    scm.exogenous = {{"U", Distribution::constant(-1.0)}};
    EndoVar v;
    v.name = "V";
    v.eq.noises.push_back(Term{"U", 1.0, true});
    scm.endogenous = {v};
    CHECK_THROWS_AS(sample(scm, 1, 0), ConfigError);
}

TEST_CASE("marginalizing observability never changes remaining values") {
    const DataSet hidden = sample(vaccination_true_scm(), 30, 11);
    const DataSet repaired = sample(vaccination_repaired_scm(), 30, 11);
    REQUIRE(hidden.fields == std::vector<std::string>({"H", "P"}));
    REQUIRE(repaired.fields == std::vector<std::string>({"W", "H", "P"}));
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(hidden.value(i, "H") == repaired.value(i, "H"));
        CHECK(hidden.value(i, "P") == repaired.value(i, "P"));
    }
}

TEST_CASE("modeller view and ground truth agree record-for-record") {
    // U_C replays U_W's stream slot, so the observable margins coincide
    const DataSet truth = sample(vaccination_true_scm(), 30, 17);
    const DataSet observed = sample(vaccination_modeller_scm(), 30, 17);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(truth.value(i, "H") == observed.value(i, "H"));
        CHECK(truth.value(i, "P") == observed.value(i, "P"));
    }
}

TEST_CASE("empty sample is refused") {
    CHECK_THROWS_AS(sample(chain_scm(), 0, 1), ConfigError);
}
