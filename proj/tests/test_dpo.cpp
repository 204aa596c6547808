#include "doctest.h"

#include <cmath>

#include "hca/dpo.hpp"
#include "hca/errors.hpp"
#include "hca/problems.hpp"

using namespace hca;

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

} // namespace

TEST_CASE("zero-temperature limit reproduces the deterministic solution") {
    const auto built = build_assignment_lp({{9, 1, 1}, {1, 9, 1}, {1, 1, 9}});
    const Solution det = solve(built.lp);
    NoiseSpec noise;
    noise.sigma = 1e-12;
    noise.n_samples = 32;
    noise.seed = 5;
    const PerturbedSolution ps = perturbed_argmax(built.lp, noise);
    REQUIRE(ps.mean_x.size() == det.x.size());
    CHECK(ps.excluded == 0);
    for (std::size_t j = 0; j < det.x.size(); ++j)
        CHECK(std::abs(ps.mean_x[j] - det.x[j]) <= 1e-6);
}

TEST_CASE("tied costs smooth to the symmetric mean") {
    const auto built = build_assignment_lp({{1.0, 1.0}, {1.0, 1.0}});
    NoiseSpec noise;
    noise.sigma = 1.0;
    noise.n_samples = 10000;
    noise.seed = 21;
    const PerturbedSolution ps = perturbed_argmax(built.lp, noise);
    for (double v : ps.mean_x) CHECK(std::abs(v - 0.5) <= 0.02);
}

TEST_CASE("the smoothed solution stays inside the polytope") {
    const auto built = build_assignment_lp({{3, 1, 2}, {1, 2, 3}, {2, 3, 1}});
    NoiseSpec noise;
    noise.sigma = 2.0;
    noise.n_samples = 500;
    noise.seed = 3;
    const PerturbedSolution ps = perturbed_argmax(built.lp, noise);
    CHECK(feasibility_residual(built.lp, ps.mean_x) <= 1e-7);
}

TEST_CASE("perturbed argmax is deterministic and keeps samples on request") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec noise;
    noise.sigma = 0.5;
    noise.n_samples = 64;
    noise.seed = 77;
    const PerturbedSolution a = perturbed_argmax(built.lp, noise);
    const PerturbedSolution b = perturbed_argmax(built.lp, noise, true);
    for (std::size_t j = 0; j < a.mean_x.size(); ++j)
        CHECK(a.mean_x[j] == b.mean_x[j]);
    CHECK(a.samples.empty());
    REQUIRE(b.samples.size() == 64);
    for (const auto& s : b.samples)
        for (double v : s) CHECK(std::abs(v - std::round(v)) <= kIntegralityTol);
}

TEST_CASE("noise spec validation") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(perturbed_argmax(built.lp, bad), ConfigError);
    bad.sigma = 0.5;
    bad.n_samples = 0;
    CHECK_THROWS_AS(perturbed_argmax(built.lp, bad), ConfigError);

    LinearProgram unbounded;
    unbounded.sense = Sense::Maximize;
    unbounded.w = {1.0};
    NoiseSpec ok;
    CHECK_THROWS_AS(perturbed_argmax(unbounded, ok), PreconditionError);
}

TEST_CASE("zero functional has an exactly zero gradient") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec noise;
    noise.sigma = 0.5;
    noise.n_samples = 200;
    noise.seed = 9;
    const std::vector<double> z(4, 0.0);
    for (double g : grad_linear_functional(built.lp, z, noise)) CHECK(g == 0.0);
    for (double g : finite_diff_grad(built.lp, z, noise, 1e-2)) CHECK(g == 0.0);
}

TEST_CASE("gradient estimator is exactly linear in the functional") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec noise;
    noise.sigma = 0.5;
    noise.n_samples = 300;
    noise.seed = 13;
    const std::vector<double> c = {1.0, 5.0, 2.0, 0.5};
    std::vector<double> c3 = c;
    for (double& v : c3) v *= 3.0;
    const auto g1 = grad_linear_functional(built.lp, c, noise);
    const auto g3 = grad_linear_functional(built.lp, c3, noise);
    for (std::size_t j = 0; j < g1.size(); ++j)
        CHECK(g3[j] == doctest::Approx(3.0 * g1[j]).epsilon(1e-12));
}

TEST_CASE("gumbel noise smooths but cannot drive the score estimator") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec gumbel;
    gumbel.family = NoiseSpec::Family::Gumbel;
    gumbel.sigma = 0.5;
    gumbel.n_samples = 50;
    gumbel.seed = 31;
    CHECK_NOTHROW(perturbed_argmax(built.lp, gumbel));
    CHECK_THROWS_AS(grad_linear_functional(built.lp, {1, 0, 0, 0}, gumbel),
                    UnsupportedError);
}

TEST_CASE("finite differences recover the analytic single-variable derivative") {
    // maximize w*x on [0,1] at w=0: E[x*] = P(w + sigma z > 0), derivative
    // phi(0)/sigma at the origin
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    lp.w = {0.0};
    lp.bounds = {Bound{0.0, 1.0}};
    NoiseSpec noise;
    noise.sigma = 0.5;
    noise.n_samples = 100000;
    noise.seed = 15;
    const double analytic = (1.0 / std::sqrt(2.0 * std::numbers::pi)) / noise.sigma;
    const auto fd = finite_diff_grad(lp, {1.0}, noise, 1e-2);
    CHECK(std::abs(fd[0] - analytic) <= 0.05 * analytic);
}

TEST_CASE("score-function gradient agrees with the CRN finite-difference oracle") {
    const auto built = build_assignment_lp({{1.0, 1.3}, {1.2, 1.1}});
    NoiseSpec noise;
    noise.sigma = 0.5;
    noise.n_samples = 30000;
    noise.seed = 101;
    const std::vector<double> c = {10.0, 2.0, 3.0, 7.0};
    const auto g = grad_linear_functional(built.lp, c, noise);
    const auto fd = finite_diff_grad(built.lp, c, noise, 1e-2);
    CHECK(cosine(g, fd) >= 0.8);
}

TEST_CASE("finite differences validate the step") {
    const auto built = build_assignment_lp({{2, 1}, {1, 2}});
    NoiseSpec noise;
    CHECK_THROWS_AS(finite_diff_grad(built.lp, {1, 0, 0, 0}, noise, 0.0), ConfigError);
    CHECK_THROWS_AS(grad_linear_functional(built.lp, {1.0}, noise), ConfigError);
}
