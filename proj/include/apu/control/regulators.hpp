#pragma once

namespace apu::control {

/// PI fuel governor on normalized speed error e = (N_set - N) / N_set.
struct GovernorState {
    double integral = 0.0;     ///< kg/s, accumulated K_i * e * dt
    double prev_error = 0.0;
    double wf_prev = 0.0;      ///< kg/s, last commanded flow (rate-limit reference)
    double K_p = 0.2;          ///< kg/s per unit error
    double K_i = 1.0;          ///< kg/s per unit error per s
    double wf_min = 0.005;     ///< kg/s
    double wf_max = 0.08;      ///< kg/s
    double wf_rate = 0.05;     ///< kg/s^2
    double N_set = 36050.0;    ///< rpm
    double wf_ff = 0.0;        ///< kg/s, steady fuel at the setpoint; 0 disables
};

struct GovernorOutput {
    double wf = 0.0;
    GovernorState state;
};

/// Throws InvalidArgument for dt <= 0.
GovernorOutput governor_step(const GovernorState& state, double N_meas, double dt);

/// PI field-voltage regulator on normalized rms error e = (V_set - V) / V_set.
struct AvrState {
    double integral = 0.0;   ///< V, accumulated K_i * e * dt
    double prev_error = 0.0;
    double K_p = 100.0;      ///< V per unit error
    double K_i = 4000.0;     ///< V per unit error per s
    double V_fd_max = 300.0; ///< V
    double V_set = 230.0;    ///< V rms, phase
    double V_fd_ff = 0.0;    ///< V, steady field voltage at the operating point
};

struct AvrOutput {
    double V_fd = 0.0;
    AvrState state;
};

/// Throws InvalidArgument for dt <= 0.
AvrOutput avr_step(const AvrState& state, double V_rms_meas, double dt);

}  // namespace apu::control
