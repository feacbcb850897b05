#include "apu/numerics/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apu/error.hpp"

namespace apu::numerics {

namespace {

const double kGamma = 2.0 - std::sqrt(2.0);
const double kD = kGamma / 2.0;
// BDF2 stage: y1 - d h f(y1) = kAg * yg - kAn * y0
const double kAg = 1.0 / (kGamma * (2.0 - kGamma));
const double kAn = (1.0 - kGamma) * (1.0 - kGamma) / (kGamma * (2.0 - kGamma));
// third-order quadrature on nodes {0, gamma, 1}
const double kBg = 1.0 / (6.0 * kGamma * (1.0 - kGamma));
const double kB1 = 0.5 - kBg * kGamma;
const double kB0 = 1.0 - kBg - kB1;

constexpr int kMaxNewtonIterations = 7;
constexpr double kNewtonTolerance = 0.03;  // in units of the error weights

class Problem {
public:
    Problem(const DerivFn& fn, std::size_t n, StepTrace& trace) : fn_(fn), n_(n), trace_(trace) {}

    void eval(double t, std::span<const double> y, std::span<double> out) {
        fn_(t, y, out);
        ++trace_.derivative_evaluations;
    }

    // throws on the first non-finite channel
    void eval_checked(double t, std::span<const double> y, std::span<double> out) {
        eval(t, y, out);
        for (std::size_t i = 0; i < n_; ++i) {
            if (!std::isfinite(out[i]))
                throw Error(Errc::NonFiniteDerivative,
                            "at t=" + std::to_string(t) + ", channel " + std::to_string(i));
        }
    }

    bool eval_finite(double t, std::span<const double> y, std::span<double> out) {
        eval(t, y, out);
        return std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
    }

    DenseMatrix jacobian(double t, std::span<const double> y, std::span<const double> fy) {
        DenseMatrix jac(n_, n_);
        Vector yp(y.begin(), y.end());
        Vector fp(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double yj = y[j];
            yp[j] = yj + std::max(1e-6 * std::abs(yj), 1e-9);
            const double h = yp[j] - yj;
            eval_checked(t, yp, fp);
            for (std::size_t i = 0; i < n_; ++i) jac(i, j) = (fp[i] - fy[i]) / h;
            yp[j] = yj;
        }
        return jac;
    }

private:
    const DerivFn& fn_;
    std::size_t n_;
    StepTrace& trace_;
};

double weighted_norm(std::span<const double> v, std::span<const double> y, std::span<const double> atol,
                     double rtol) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = atol[i] + rtol * std::abs(y[i]);
        m = std::max(m, std::abs(v[i]) / w);
    }
    return m;
}

// Simplified Newton for z - dh f(t, z) = rhs. Returns false on divergence.
bool solve_stage(Problem& prob, const LuFactorization& iter, double t, double dh, std::span<const double> rhs,
                 Vector& z, std::span<const double> atol, double rtol, int& iterations) {
    const std::size_t n = z.size();
    Vector f(n);
    Vector res(n);
    double prev = 0.0;
    for (int k = 0; k < kMaxNewtonIterations; ++k) {
        iterations = k + 1;
        if (!prob.eval_finite(t, z, f)) return false;
        for (std::size_t i = 0; i < n; ++i) res[i] = -(z[i] - dh * f[i] - rhs[i]);
        iter.solve_in_place(res);
        for (std::size_t i = 0; i < n; ++i) z[i] += res[i];
        const double dn = weighted_norm(res, z, atol, rtol);
        if (!std::isfinite(dn)) return false;
        if (dn <= kNewtonTolerance) return true;
        if (k > 0) {
            const double rate = dn / prev;
            if (rate > 0.9) return false;
            if (rate / (1.0 - rate) * dn <= kNewtonTolerance) return true;
        }
        prev = dn;
    }
    return false;
}

}  // namespace

IntegrationResult integrate_adaptive(const DerivFn& deriv_fn, Vector state0, double t0, double t1,
                                     const StepperOptions& opts, std::span<const StepObserver> observers) {
    if (!(t1 > t0)) throw Error(Errc::InvalidArgument, "integration span needs t1 > t0");
    if (!(opts.min_step > 0.0 && opts.min_step <= opts.max_step) || !(opts.relative_tolerance > 0.0))
        throw Error(Errc::InvalidArgument, "invalid stepper options");

    IntegrationResult result;
    StepTrace& trace = result.trace;
    const std::size_t n = state0.size();
    Vector atol(n);
    if (opts.absolute_tolerance.size() == 1) {
        std::fill(atol.begin(), atol.end(), opts.absolute_tolerance[0]);
    } else if (opts.absolute_tolerance.size() == n) {
        atol = opts.absolute_tolerance;
    } else {
        throw Error(Errc::InvalidArgument, "absolute_tolerance size mismatch");
    }
    const double rtol = opts.relative_tolerance;

    Problem prob(deriv_fn, n, trace);
    Vector y = std::move(state0);
    Vector f0(n), fg(n), f1(n), rhs(n), zg(n), z1(n), est(n);
    prob.eval_checked(t0, y, f0);

    double t = t0;
    double h = std::clamp(opts.initial_step, opts.min_step, opts.max_step);
    DenseMatrix jac;
    bool jac_fresh = false;
    bool have_jac = false;

    while (t < t1) {
        if (!have_jac) {
            jac = prob.jacobian(t, y, f0);
            have_jac = true;
            jac_fresh = true;
        }
        const double remaining = t1 - t;
        bool last = false;
        double step = h;
        if (remaining <= 1.1 * h) {
            step = remaining;
            last = true;
        } else if (remaining < 2.0 * h) {
            step = 0.5 * remaining;
        }

        DenseMatrix m = DenseMatrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) -= kD * step * jac(i, j);
        const LuFactorization iter(std::move(m));

        // trapezoidal stage to t + gamma h
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = y[i] + kD * step * f0[i];
            zg[i] = y[i] + kGamma * step * f0[i];
        }
        int it1 = 0, it2 = 0;
        bool ok = solve_stage(prob, iter, t + kGamma * step, kD * step, rhs, zg, atol, rtol, it1);
        if (ok) {
            // BDF2 stage to t + h
            for (std::size_t i = 0; i < n; ++i) {
                rhs[i] = kAg * zg[i] - kAn * y[i];
                z1[i] = y[i] + (zg[i] - y[i]) / kGamma;
            }
            ok = solve_stage(prob, iter, t + step, kD * step, rhs, z1, atol, rtol, it2);
        }
        if (ok) ok = prob.eval_finite(t + kGamma * step, zg, fg) && prob.eval_finite(t + step, z1, f1);

        if (!ok) {
            ++trace.rejected;
            if (!jac_fresh) {
                have_jac = false;
            } else {
                h = 0.25 * step;
            }
            if (h < opts.min_step)
                throw Error(Errc::StepUnderflow, "Newton failure at t=" + std::to_string(t) +
                                                     ", step " + std::to_string(h));
            continue;
        }

        for (std::size_t i = 0; i < n; ++i)
            est[i] = y[i] + step * (kB0 * f0[i] + kBg * fg[i] + kB1 * f1[i]) - z1[i];
        iter.solve_in_place(est);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = atol[i] + rtol * std::max(std::abs(y[i]), std::abs(z1[i]));
            err = std::max(err, std::abs(est[i]) / w);
        }

        const double factor =
            err == 0.0 ? 4.0 : std::clamp(0.9 * std::cbrt(1.0 / err), 0.2, 4.0);
        if (err <= 1.0) {
            t = last ? t1 : t + step;
            y = z1;
            f0 = f1;
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(f0[i]))
                    throw Error(Errc::NonFiniteDerivative,
                                "at t=" + std::to_string(t) + ", channel " + std::to_string(i));
            }
            ++trace.accepted;
            trace.times.push_back(t);
            for (const auto& obs : observers) obs(t, y);
            const double proposal = std::min(opts.max_step, step * factor);
            h = last ? std::max(h, proposal) : proposal;
            h = std::min(h, opts.max_step);
            trace.last_step = h;
            // keep the Jacobian while the corrector converges quickly
            jac_fresh = false;
            if (it1 > 2 || it2 > 2) have_jac = false;
        } else {
            ++trace.rejected;
            h = step * factor;
            if (h < opts.min_step)
                throw Error(Errc::StepUnderflow, "error control at t=" + std::to_string(t) +
                                                     ", step " + std::to_string(h));
            if (!jac_fresh) have_jac = false;
        }
    }
    result.state = std::move(y);
    return result;
}

}  // namespace apu::numerics
