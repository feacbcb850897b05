#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <string_view>

#include "apu/gasgen/components.hpp"
#include "apu/gasgen/thermo.hpp"

namespace apu::gasgen {

/// Design-point description of a single-shaft turboshaft plus the anchors the
/// sizing calibrates against.
struct GasGenDesignSpec {
    double altitude = 0.0;       ///< m
    double mach = 0.0;
    double dT_isa = 5.0;         ///< K
    double shaft_power = 500.0;  ///< kW, net of accessories
    double pressure_ratio = 8.0;
    double T4 = 1200.114;        ///< K, combustor exit target for the burner efficiency
    double T8 = 755.148;         ///< K, expected exhaust temperature (checked, not imposed)
    double fuel_lhv = 43.124;    ///< MJ/kg
    double design_speed = 36050.0;  ///< rpm
    double eta_compressor = 0.85;
    double eta_turbine = 0.89;
    double accessory_power = 30.0;  ///< kW
    double W2 = 3.1442;             ///< kg/s
    double fuel_flow = 0.04830;     ///< kg/s

    double surge_margin = 23.9856;  ///< %
    double nox_severity = 0.1769;
    double ps3_ratio = 768.3194 / 802.4929;  ///< Ps3/P3
    double intake_recovery = 0.99;
    double burner_pressure_loss = 0.03;
    double exhaust_pressure_loss = 0.02;
    double ngv_cooling = 0.05;  ///< fraction of W2, returns ahead of station 41
    double rotor_cooling = 0.05;  ///< fraction of W2, returns ahead of station 5
    double overboard_bleed = 0.01;  ///< fraction of W2
    double eta_mech = 1.0;          ///< compressor drive
    double inertia = 0.06;          ///< kg m^2

    friend bool operator==(const GasGenDesignSpec&, const GasGenDesignSpec&) = default;
};

struct GasGenParams {
    CompressorMap compressor;
    TurbineMap turbine;
    double intake_recovery = 0.99;
    double burner_pressure_loss = 0.03;
    double burner_efficiency = 1.0;
    double exhaust_pressure_loss = 0.02;
    double ngv_cooling = 0.05;
    double rotor_cooling = 0.05;
    double overboard_bleed = 0.01;
    double inertia = 0.06;
    double accessory_power = 30.0;
    double eta_mech = 1.0;
    double fuel_lhv = 43.124;
    double nozzle_area = 0.0;  ///< m^2
    double ps3_area = 0.0;     ///< m^2
    double nox_P_ref = 2965.0;  ///< kPa
    double nox_T_ref = 0.0;     ///< K
    double nox_T_scale = 194.0; ///< K
    double design_speed = 36050.0;
    double design_fuel_flow = 0.0483;
    double design_shaft_power = 500.0;
    double design_exhaust_flow = 0.0;  ///< residual scale for the nozzle match
    double surge_margin_design = 23.9856;
    double max_speed_ratio = 1.2;
    double design_altitude = 0.0;
    double design_mach = 0.0;
    double design_dT_isa = 5.0;
};

struct GasGenState {
    double N = 0.0;  ///< rpm
};

struct GasGenInput {
    double wf = 0.0;  ///< kg/s
    double altitude = 0.0;
    double mach = 0.0;
    double dT_isa = 5.0;
};

enum class Station : std::size_t { S0, S1, S2, S3, S31, S4, S41, S5, S6, S8 };
inline constexpr std::size_t kStationCount = 10;

struct CycleSolution {
    std::array<GasState, kStationCount> stations{};
    double N = 0.0;
    double wf = 0.0;
    double beta = 0.0;
    double turbine_pr = 0.0;
    double corrected_speed = 0.0;
    double Ps3 = 0.0;            ///< kPa
    double P_ambient = 0.0;      ///< kPa
    double PW_turb = 0.0;        ///< kW
    double PW_cpr = 0.0;         ///< kW
    double eta_mech_cpr = 1.0;
    double PW_shaft_net = 0.0;   ///< kW
    double load_power = 0.0;     ///< kW, the Pe this point was evaluated against
    double SFC = 0.0;            ///< kg/(kW h)
    double surge_margin = 0.0;   ///< %
    bool surge = false;
    double NOx_severity = 0.0;
    double overboard_flow = 0.0;  ///< kg/s
    GasState rotor_exit;          ///< turbine rotor exit, before rotor cooling returns
    double newton_residual_norm = 0.0;
    int newton_iterations = 0;

    [[nodiscard]] const GasState& at(Station s) const { return stations[static_cast<std::size_t>(s)]; }
    GasState& at(Station s) { return stations[static_cast<std::size_t>(s)]; }
};

struct DesignResult {
    GasGenParams params;
    CycleSolution solution;
    double burner_efficiency_uncapped = 0.0;  ///< value the T4 target asked for before the cap at 1
};

/// Sizes maps, areas and calibration constants so the design point reproduces
/// the design targets. Throws CalibrationFailed when an anchor cannot be met.
DesignResult design_point_size(const GasGenDesignSpec& spec);

/// Steady cycle match at fixed spool speed N and fuel flow. Newton on
/// (compressor beta, turbine pressure ratio) against turbine flow capacity and
/// exhaust nozzle capacity, always started from the design point so the
/// result depends on the arguments only. Points the direct solve cannot reach
/// are approached by continuation from the design inputs. The shaft-power
/// surplus over `Pe` is left for the spool to absorb.
CycleSolution off_design_solve(const GasGenParams& params, const GasGenInput& u, const HealthParams& health,
                               double Pe, double N);

/// Spool acceleration dN/dt (rpm/s) for a net shaft power surplus (kW) at speed N.
double spool_acceleration(const GasGenParams& params, double surplus_kw, double N);

/// Advances the spool speed over one macro step with two forward-Euler
/// sub-steps, re-matching the cycle at each. Throws SpeedOutOfRange.
GasGenState state_update(const GasGenParams& params, const GasGenState& x, const GasGenInput& u,
                         const HealthParams& health, double Pe, double dt = 0.02);

// Output channels, ordered like the design-point report.
enum class Channel : std::size_t {
    XNHPC, PWSD, SFC, SNOx, HPCSM,
    T1, P1, T2, P2, W2,
    T3, P3, Ps3, W3,
    T4, P4, W4,
    T41, W41,
    T5, P5, W5,
    T8, P8, W8,
};
inline constexpr std::size_t kChannelCount = 25;

std::string_view channel_name(Channel c);
std::string_view channel_unit(Channel c);

struct GasGenOutputs {
    std::array<double, kChannelCount> values{};

    [[nodiscard]] double operator[](Channel c) const { return values[static_cast<std::size_t>(c)]; }
    double& operator[](Channel c) { return values[static_cast<std::size_t>(c)]; }
};

GasGenOutputs project(const CycleSolution& sol);

/// Additive Gaussian measurement noise, one standard deviation per channel in channel units.
struct OutputNoise {
    std::array<double, kChannelCount> std_dev{};
};

/// Cycle match at (x, u) projected onto the output channels. With `noise` and
/// `rng` given, independent zero-mean noise is added per channel; a zero
/// standard deviation leaves that channel untouched and draws nothing.
GasGenOutputs output(const GasGenParams& params, const GasGenState& x, const GasGenInput& u,
                     const HealthParams& health, double Pe, const OutputNoise* noise = nullptr,
                     std::mt19937_64* rng = nullptr);

/// Shaft load seen by the gas generator: fixed, or cubic in speed through an anchor.
struct LoadLaw {
    enum class Kind { Fixed, Cubic };
    Kind kind = Kind::Fixed;
    double power = 0.0;         ///< kW (at the anchor speed for the cubic law)
    double anchor_speed = 0.0;  ///< rpm

    friend bool operator==(const LoadLaw&, const LoadLaw&) = default;

    [[nodiscard]] double at(double N) const;
};

struct InitResult {
    GasGenState state;
    GasGenOutputs outputs;
    CycleSolution solution;
};

/// Steady spool speed where the net shaft power equals the load. The root is
/// bracketed by scanning outward from `N_hint` (design speed when zero) in 1 %
/// steps over (0.5, max_speed_ratio] of design, then refined by regula falsi.
/// Throws NoSteadyState.
InitResult init(const GasGenParams& params, const GasGenInput& u0, const HealthParams& health, const LoadLaw& load,
                double N_hint = 0.0);

/// Fuel flow giving net shaft power `Pe` at speed N. Throws NonConvergence.
double trim_fuel(const GasGenParams& params, double N, double Pe, const GasGenInput& u, const HealthParams& health);

/// Flight condition and shaft power for a steady off-design check.
struct OperatingPoint {
    double altitude = 0.0;
    double mach = 0.0;
    double dT_isa = 5.0;
    double shaft_power = 0.0;  ///< kW
};

/// Ten off-design points spanning the ground-to-10 km envelope, trimmed at design speed.
std::span<const OperatingPoint> reference_operating_points();

/// Mass closure |W8 - (W2 - overboard + wf)| / W8.
double mass_closure_error(const CycleSolution& sol);

/// Largest relative enthalpy imbalance over the burner and the two cooling-mix nodes.
double energy_closure_error(const GasGenParams& params, const CycleSolution& sol);

}  // namespace apu::gasgen
