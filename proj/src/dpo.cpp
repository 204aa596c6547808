#include "hca/dpo.hpp"

#include <cmath>

#include "hca/errors.hpp"
#include "hca/rng.hpp"

namespace hca {

namespace {

std::vector<double> draw_noise(const NoiseSpec& spec, std::size_t k, std::size_t dim) {
    rng::Stream stream = rng::Stream::from(spec.seed, static_cast<std::uint64_t>(k));
    std::vector<double> z(dim);
    for (double& v : z)
        v = spec.family == NoiseSpec::Family::StandardNormal ? stream.normal(0.0, 1.0)
                                                             : stream.gumbel();
    return z;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

void NoiseSpec::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ConfigError("noise.sigma: temperature must be > 0");
    if (n_samples < 1) throw ConfigError("noise.n_samples: need at least one sample");
}

PerturbedSolution perturbed_argmax(const LinearProgram& lp, const NoiseSpec& noise,
                                   bool keep_samples) {
    noise.validate();
    lp.validate();
    if (solve(lp).status != SolveStatus::Optimal)
        throw PreconditionError("perturbed argmax: base LP is not solvable");

    const std::size_t k = lp.num_vars();
    PerturbedSolution out;
    out.seed = noise.seed;
    out.mean_x.assign(k, 0.0);

    LinearProgram work = lp;
    std::size_t used = 0;
    for (std::size_t s = 0; s < noise.n_samples; ++s) {
        const std::vector<double> z = draw_noise(noise, s, k);
        for (std::size_t j = 0; j < k; ++j) work.w[j] = lp.w[j] + noise.sigma * z[j];
        const Solution sol = solve(work);
        if (sol.status != SolveStatus::Optimal) {
            ++out.excluded;  // cost-only perturbations cannot break feasibility,
            continue;        // so this is an unbounded-direction artifact
        }
        ++used;
        for (std::size_t j = 0; j < k; ++j) out.mean_x[j] += sol.x[j];
        if (keep_samples) out.samples.push_back(sol.x);
    }
    if (used == 0)
        throw SolverError("perturbed argmax: every perturbed instance failed");
    for (double& v : out.mean_x) v /= static_cast<double>(used);
    return out;
}

std::vector<double> grad_linear_functional(const LinearProgram& lp,
                                           const std::vector<double>& c,
                                           const NoiseSpec& noise) {
    noise.validate();
    lp.validate();
    if (noise.family != NoiseSpec::Family::StandardNormal)
        throw UnsupportedError(
            "gradient estimator: only standard-normal noise admits the "
            "score-function identity");
    if (c.size() != lp.num_vars())
        throw ConfigError("gradient estimator: functional length mismatch");

    const Solution base = solve(lp);
    if (base.status != SolveStatus::Optimal)
        throw PreconditionError("gradient estimator: base LP is not solvable");
    const double baseline = dot(c, base.x);

    const std::size_t k = lp.num_vars();
    std::vector<double> g(k, 0.0);
    LinearProgram work = lp;
    std::size_t used = 0;
    for (std::size_t s = 0; s < noise.n_samples; ++s) {
        const std::vector<double> z = draw_noise(noise, s, k);
        for (std::size_t j = 0; j < k; ++j) work.w[j] = lp.w[j] + noise.sigma * z[j];
        const Solution sol = solve(work);
        if (sol.status != SolveStatus::Optimal) continue;
        ++used;
        const double f = dot(c, sol.x) - baseline;
        for (std::size_t j = 0; j < k; ++j) g[j] += f * z[j];
    }
    if (used == 0)
        throw SolverError("gradient estimator: every perturbed instance failed");
    const double scale = 1.0 / (static_cast<double>(used) * noise.sigma);
    for (double& v : g) v *= scale;
    return g;
}

std::vector<double> finite_diff_grad(const LinearProgram& lp,
                                     const std::vector<double>& c,
                                     const NoiseSpec& noise, double h) {
    noise.validate();
    lp.validate();
    if (!(h > 0.0)) throw ConfigError("finite differences: step must be > 0");
    if (c.size() != lp.num_vars())
        throw ConfigError("finite differences: functional length mismatch");

    const std::size_t k = lp.num_vars();
    // draw once; the same z_s serves every +/-h evaluation (common random
    // numbers keep the difference from being swamped by Monte-Carlo noise)
    std::vector<std::vector<double>> zs(noise.n_samples);
    for (std::size_t s = 0; s < noise.n_samples; ++s) zs[s] = draw_noise(noise, s, k);

    LinearProgram work = lp;
    auto smoothed = [&](std::size_t coord, double shift) {
        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t s = 0; s < noise.n_samples; ++s) {
            for (std::size_t j = 0; j < k; ++j)
                work.w[j] = lp.w[j] + noise.sigma * zs[s][j];
            work.w[coord] += shift;
            const Solution sol = solve(work);
            if (sol.status != SolveStatus::Optimal) continue;
            ++used;
            acc += dot(c, sol.x);
        }
        if (used == 0)
            throw SolverError("finite differences: every perturbed instance failed");
        return acc / static_cast<double>(used);
    };

    std::vector<double> g(k);
    for (std::size_t j = 0; j < k; ++j)
        g[j] = (smoothed(j, h) - smoothed(j, -h)) / (2.0 * h);
    return g;
}

} // namespace hca
