#pragma once

#include <cstdint>
#include <vector>

#include "hca/linprog.hpp"

namespace hca {

// Noise injected into the cost vector for the perturbed optimizer. sigma is
// the temperature; epsilon is deliberately NOT used for it here since that
// symbol belongs to the attack step.
struct NoiseSpec {
    enum class Family { StandardNormal, Gumbel };
    Family family = Family::StandardNormal;
    double sigma = 0.5;
    std::size_t n_samples = 15;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PerturbedSolution {
    std::vector<double> mean_x;                // (1/N) sum of vertex solutions
    std::vector<std::vector<double>> samples;  // kept only on request
    std::uint64_t seed = 0;
    std::size_t excluded = 0;  // per-sample solver failures, skipped with a count
};

// Monte-Carlo smoothed argmax: mean vertex of LP(w + sigma * z_k) over N
// draws. Sample k draws its noise from a stream derived from (seed, k), so
// the result is independent of evaluation order.
PerturbedSolution perturbed_argmax(const LinearProgram& lp, const NoiseSpec& noise,
                                   bool keep_samples = false);

// Score-function estimate of  grad_w E_z[ <c, x*(w + sigma z)> ]  with the
// deterministic solution's functional value as baseline. Standard-normal
// noise only.
std::vector<double> grad_linear_functional(const LinearProgram& lp,
                                           const std::vector<double>& c,
                                           const NoiseSpec& noise);

// Central-difference oracle for the same smoothed functional, common random
// numbers across the +/-h evaluations of each coordinate.
std::vector<double> finite_diff_grad(const LinearProgram& lp,
                                     const std::vector<double>& c,
                                     const NoiseSpec& noise, double h);

} // namespace hca
