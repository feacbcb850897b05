#include "apu/numerics/newton.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "apu/error.hpp"

namespace apu::numerics {

namespace {

double scaled_norm(std::span<const double> r, std::span<const double> scale) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = scale.empty() ? 1.0 : scale[i];
        const double v = std::abs(r[i]) / s;
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, v);
    }
    return m;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

DenseMatrix fd_jacobian(const ResidualFn& fn, std::span<const double> x, std::span<const double> fx,
                        double perturbation, std::span<const double> x_scale) {
    const std::size_t n = x.size();
    DenseMatrix jac(fx.size(), n);
    Vector xp(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double typical = x_scale.empty() ? 1.0 : x_scale[j];
        const double h_raw = perturbation * std::max(std::abs(x[j]), typical);
        // make the step exactly representable relative to x_j
        const double xj = x[j];
        xp[j] = xj + h_raw;
        const double h = xp[j] - xj;
        const Vector fp = fn(xp);
        if (!all_finite(fp)) throw Error(Errc::NonFiniteResidual, "residual not finite during Jacobian evaluation");
        for (std::size_t i = 0; i < fx.size(); ++i) jac(i, j) = (fp[i] - fx[i]) / h;
        xp[j] = xj;
    }
    return jac;
}

NewtonResult newton_solve(const ResidualFn& residual_fn, Vector guess, const NewtonOptions& opts,
                          std::span<const double> residual_scale, std::span<const double> x_scale) {
    NewtonResult out;
    out.x = std::move(guess);
    Vector r = residual_fn(out.x);
    if (r.size() != out.x.size())
        throw Error(Errc::InvalidArgument, "newton_solve needs a square system");
    if (!all_finite(r)) throw Error(Errc::NonFiniteResidual, "residual not finite at initial guess");

    double norm = scaled_norm(r, residual_scale);
    out.residual_norm = norm;
    while (norm >= opts.relative_tolerance) {
        if (out.iterations >= opts.max_iterations) {
            throw Error(Errc::NonConvergence, "after " + std::to_string(out.iterations) +
                                                  " iterations, final norm " + std::to_string(norm));
        }
        const DenseMatrix jac = fd_jacobian(residual_fn, out.x, r, opts.jacobian_perturbation, x_scale);
        Vector dx;
        try {
            dx = solve_dense(jac, r);
        } catch (const Error& e) {
            if (e.code() == Errc::SingularMatrix) throw Error(Errc::SingularJacobian, e.what());
            throw;
        }

        double lambda = 1.0;
        Vector trial(out.x.size());
        Vector r_trial;
        double trial_norm = std::numeric_limits<double>::infinity();
        for (;;) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] - lambda * dx[i];
            r_trial = residual_fn(trial);
            trial_norm = all_finite(r_trial) ? scaled_norm(r_trial, residual_scale)
                                             : std::numeric_limits<double>::infinity();
            if (trial_norm < norm || lambda * 0.5 < opts.damping_min) break;
            lambda *= 0.5;
        }
        if (!std::isfinite(trial_norm))
            throw Error(Errc::NonFiniteResidual, "residual not finite along the damped Newton step");
        out.x = std::move(trial);
        r = std::move(r_trial);
        norm = trial_norm;
        ++out.iterations;
        out.residual_norm = norm;
    }
    return out;
}

}  // namespace apu::numerics
