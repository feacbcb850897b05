#include "apu/control/regulators.hpp"

#include <algorithm>

#include "apu/error.hpp"

namespace apu::control {

namespace {

// Conditional integration: the integral only moves when the output is off
// the limit, or when the error pulls it back inside.
struct PiResult {
    double output;
    double integral;
};

PiResult pi_clamped(double base, double K_p, double integral, double K_i, double e, double dt, double lo, double hi) {
    const double trial_integral = integral + K_i * e * dt;
    const double trial = base + K_p * e + trial_integral;
    if (trial > hi && e > 0.0) return {hi, integral};
    if (trial < lo && e < 0.0) return {lo, integral};
    return {std::clamp(trial, lo, hi), trial_integral};
}

}  // namespace

GovernorOutput governor_step(const GovernorState& s, double N_meas, double dt) {
    if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "governor_step: dt must be > 0");
    const double e = (s.N_set - N_meas) / s.N_set;
    GovernorOutput out{0.0, s};
    PiResult r = pi_clamped(s.wf_ff, s.K_p, s.integral, s.K_i, e, dt, s.wf_min, s.wf_max);
    const double step = s.wf_rate * dt;
    if (s.wf_prev > 0.0 && s.wf_rate > 0.0) {
        const double lo = s.wf_prev - step, hi = s.wf_prev + step;
        if (r.output > hi) {
            r.output = hi;
            if (e > 0.0) r.integral = s.integral;
        } else if (r.output < lo) {
            r.output = lo;
            if (e < 0.0) r.integral = s.integral;
        }
        r.output = std::clamp(r.output, s.wf_min, s.wf_max);
    }
    out.wf = r.output;
    out.state.integral = r.integral;
    out.state.prev_error = e;
    out.state.wf_prev = r.output;
    return out;
}

AvrOutput avr_step(const AvrState& s, double V_rms_meas, double dt) {
    if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "avr_step: dt must be > 0");
    const double e = (s.V_set - V_rms_meas) / s.V_set;
    const PiResult r = pi_clamped(s.V_fd_ff, s.K_p, s.integral, s.K_i, e, dt, 0.0, s.V_fd_max);
    AvrOutput out{r.output, s};
    out.state.integral = r.integral;
    out.state.prev_error = e;
    return out;
}

}  // namespace apu::control
