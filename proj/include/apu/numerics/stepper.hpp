#pragma once

#include <functional>
#include <span>
#include <vector>

#include "apu/numerics/dense.hpp"

namespace apu::numerics {

struct StepperOptions {
    double relative_tolerance = 1e-6;
    /// Per-channel absolute tolerance; a single entry is broadcast to all channels.
    Vector absolute_tolerance{1e-9};
    double initial_step = 1e-6;
    double min_step = 1e-13;
    double max_step = 1e-3;
};

using DerivFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using StepObserver = std::function<void(double t, std::span<const double> y)>;

struct StepTrace {
    std::vector<double> times;  ///< end time of every accepted step
    int accepted = 0;
    int rejected = 0;
    int derivative_evaluations = 0;
    double last_step = 0.0;  ///< size of the last unclipped accepted step, reusable as initial_step
};

struct IntegrationResult {
    Vector state;
    StepTrace trace;
};

/// Adaptive TR-BDF2 integration of dy/dt = f(t, y) from t0 to t1.
///
/// One step is a trapezoidal stage to t + gamma*h followed by a BDF2 stage to
/// t + h (gamma = 2 - sqrt(2), both stages share the iteration matrix
/// I - (gamma/2) h J). The local error is the difference to the embedded
/// third-order quadrature over the three stage derivatives, filtered through
/// the iteration matrix. A step is accepted iff every channel satisfies
/// |err_i| <= atol_i + rtol * |y_i|. Observers run on every accepted step and
/// the final step is clipped so the returned state is exactly at t1.
///
/// Throws StepUnderflow or NonFiniteDerivative.
IntegrationResult integrate_adaptive(const DerivFn& deriv_fn, Vector state0, double t0, double t1,
                                     const StepperOptions& opts,
                                     std::span<const StepObserver> observers = {});

}  // namespace apu::numerics
