#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "apu/numerics/dense.hpp"
#include "apu/wrsg/park.hpp"

namespace apu::wrsg {

/// Nameplate and circuit constants of the wound-rotor starter/generator.
/// Rotor quantities are referred to the stator.
struct WrsgParams {
    double rated_power = 225.0;     ///< kW
    double rated_voltage = 230.0;   ///< V rms, phase
    double frequency = 400.0;       ///< Hz
    double r_s = 0.0044;            ///< ohm
    double L_ls = 19.8e-6;          ///< H
    double L_md = 0.221e-3;         ///< H
    double L_mq = 0.162e-3;         ///< H
    double r_fd = 68.9e-3;          ///< ohm
    double L_lf = 32.8e-6;          ///< H
    double r_kd = 0.0142;           ///< ohm
    double L_lkd = 34.1e-6;         ///< H
    double r_kq = 0.0031;           ///< ohm
    double L_lkq = 0.144e-3;        ///< H
    double L_s = 19.8e-6;           ///< H, zero-sequence
    int pole_pairs = 2;
    double eta_sg = 0.95;           ///< mechanical-to-electrical efficiency
    double machine_count = 2.0;     ///< identical machines sharing the shaft load

    friend bool operator==(const WrsgParams&, const WrsgParams&) = default;

    [[nodiscard]] double rated_current() const { return rated_power * 1e3 / (3.0 * rated_voltage); }
    [[nodiscard]] double rated_electrical_speed() const;
    /// Throws InvalidArgument when a resistance or inductance is not positive.
    void validate() const;
};

/// Turn-to-turn short on phase a: a fraction mu of the phase turns shorted
/// through r_f = k_rf * mu * r_s.
struct FaultParams {
    double mu = 0.0;
    double k_rf = 1e6;

    static constexpr double kOpenThreshold = 1e6;

    friend bool operator==(const FaultParams&, const FaultParams&) = default;

    [[nodiscard]] bool open() const { return mu == 0.0 || k_rf >= kOpenThreshold; }
    [[nodiscard]] double r_f(const WrsgParams& p) const { return k_rf * mu * p.r_s; }
    [[nodiscard]] double r_sa_f(const WrsgParams& p) const { return mu * p.r_s; }
    /// Leakage of the shorted sub-winding not shared with the rest of phase a.
    [[nodiscard]] double loop_leakage(const WrsgParams& p) const { return mu * (1.0 - mu) * p.L_ls; }
    /// Throws InvalidArgument outside mu in [0, 1], k_rf >= 0.
    void validate() const;
};

/// Flux/current map in the rotor frame. Channel order q, d, 0, fd, kd, kq.
struct InductanceModel {
    numerics::DenseMatrix L;          ///< 6x6
    numerics::DenseMatrix selector;   ///< 6x3, routes the stator block
    Vec3 fault_column{};              ///< qd0 image of phase a at the model angle
    double L_s = 0.0;
};

InductanceModel build_L(const WrsgParams& params, double theta);

enum class StateIndex : std::size_t { Sq, Sd, S0, Fd, Kd, Kq, SaF, Theta };
inline constexpr std::size_t kStateSize = 8;

/// Flux linkages (Wb-turns) and electrical angle. With an inductive load the
/// stator entries carry the extended flux lambda_s - L_load * i_s, which keeps
/// the machine plus load an explicit ODE.
struct WrsgState {
    std::array<double, kStateSize> x{};

    [[nodiscard]] double operator[](StateIndex i) const { return x[static_cast<std::size_t>(i)]; }
    double& operator[](StateIndex i) { return x[static_cast<std::size_t>(i)]; }
    [[nodiscard]] double theta() const { return x[7]; }
};

/// Folds the angle back into [0, 2 pi).
WrsgState wrap_angle(WrsgState s);

/// Per-phase load impedance in effect at one instant, wye with grounded neutral.
struct ElectricalLoad {
    double R = 0.0;  ///< ohm
    double L = 0.0;  ///< H
};

struct LoadStep {
    double time = 0.0;   ///< s
    double scale = 1.0;  ///< multiplies the admittance, so 0.5 halves the power at fixed voltage

    friend bool operator==(const LoadStep&, const LoadStep&) = default;
};

struct LoadModel {
    enum class Kind { ResistiveBank, SeriesRL, CubicSpeedLaw };
    Kind kind = Kind::ResistiveBank;
    double R = 0.0;               ///< ohm per phase at scale 1 (and at the anchor speed for the cubic law)
    double L = 0.0;               ///< H per phase, series-RL only
    double anchor_speed = 0.0;    ///< electrical rad/s, cubic law only
    std::vector<LoadStep> steps;  ///< strictly increasing times

    /// Resistive bank drawing `power_kw` at `phase_voltage` rms.
    static LoadModel resistive(double power_kw, double phase_voltage);

    [[nodiscard]] double scale_at(double t) const;
    [[nodiscard]] ElectricalLoad at(double t, double w_r) const;
    /// Throws InvalidArgument when R is not positive or step times do not increase.
    void validate() const;
};

/// Additive equation noise held over a control interval.
struct EquationNoise {
    Vec3 stator{};
    Vec3 rotor{};
};

struct Currents {
    Vec3 stator{};  ///< q, d, 0
    Vec3 rotor{};   ///< fd, kd, kq
    double fault = 0.0;
};

/// Solves the flux relation lambda = L (i - K1 T_c1 mu i_f) together with the
/// fault-loop closure lambda_sa_f = mu lambda_sa + L_loop i_f. An open branch
/// reduces to the 6x6 map with i_f = 0. `load_inductance` is the series load
/// inductance folded into the stator state. Throws SingularSystem.
Currents currents_from_flux(const WrsgState& state, const FaultParams& fault, const InductanceModel& model,
                            const WrsgParams& params, double load_inductance = 0.0);

/// Right-hand side of the machine plus load at speed w_r (electrical rad/s).
/// Throws SingularSystem.
WrsgState machine_derivatives(const WrsgParams& params, const WrsgState& state, double V_fd, double w_r,
                              const FaultParams& fault, const ElectricalLoad& load,
                              const EquationNoise& noise = {});

/// Instantaneous terminal quantities in phase coordinates.
struct Terminal {
    Vec3 v_abc{};
    Vec3 i_abc{};
    double i_f = 0.0;
    Currents currents;
};

Terminal terminal(const WrsgParams& params, const WrsgState& state, double V_fd, double w_r,
                  const FaultParams& fault, const ElectricalLoad& load, const EquationNoise& noise = {});

struct MechPower {
    double total = 0.0;  ///< kW drawn from the shaft by all machines
    double loss = 0.0;   ///< kW, fault-branch terms only
};

MechPower mech_power(const Vec3& v_abc, const Vec3& i_abc, double i_f, const FaultParams& fault,
                     const WrsgParams& params);

/// Healthy balanced steady state at speed w_r and field voltage V_fd.
WrsgState steady_state(const WrsgParams& params, double V_fd, double w_r, const ElectricalLoad& load,
                       double theta = 0.0);

/// Field voltage giving `phase_rms` volts at the terminals in the healthy steady state.
double field_voltage_for(const WrsgParams& params, double phase_rms, double w_r, const ElectricalLoad& load);

/// Re-expresses the extended stator flux when the series load inductance
/// changes, keeping machine flux and currents continuous.
WrsgState rebase_load(const WrsgParams& params, const WrsgState& state, const FaultParams& fault,
                      double old_inductance, double new_inductance);

}  // namespace apu::wrsg
