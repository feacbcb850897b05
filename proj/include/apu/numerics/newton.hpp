#pragma once

#include <functional>
#include <span>

#include "apu/numerics/dense.hpp"

namespace apu::numerics {

struct NewtonOptions {
    int max_iterations = 50;
    double relative_tolerance = 1e-10;
    /// Relative forward-difference step; the step is perturbation * max(|x|, x_scale).
    double jacobian_perturbation = 1e-3;
    /// Step damping halves down to this fraction of the full Newton step.
    double damping_min = 1.0 / 1024.0;
};

struct NewtonResult {
    Vector x;
    int iterations = 0;
    double residual_norm = 0.0;
};

using ResidualFn = std::function<Vector(std::span<const double>)>;

/// Damped Newton-Raphson with a forward-difference Jacobian.
///
/// Convergence is max_i |r_i| / residual_scale_i < relative_tolerance, so
/// mixed-unit residuals become commensurate through `residual_scale`
/// (all ones when empty). `x_scale` gives the typical magnitude of each
/// unknown for the finite-difference step (all ones when empty).
///
/// Throws NonConvergence, SingularJacobian or NonFiniteResidual.
NewtonResult newton_solve(const ResidualFn& residual_fn, Vector guess, const NewtonOptions& opts,
                          std::span<const double> residual_scale = {},
                          std::span<const double> x_scale = {});

/// Forward-difference Jacobian of `fn` at `x` given f(x) = `fx`.
DenseMatrix fd_jacobian(const ResidualFn& fn, std::span<const double> x, std::span<const double> fx,
                        double perturbation, std::span<const double> x_scale = {});

}  // namespace apu::numerics
