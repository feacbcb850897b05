#pragma once

#include "apu/gasgen/thermo.hpp"

namespace apu::gasgen {

/// Gas-path health scalars. Healthy is exactly 1.0 on every entry.
struct HealthParams {
    double eta_c_factor = 1.0;
    double flow_c_factor = 1.0;
    double eta_t_factor = 1.0;
    double flow_t_factor = 1.0;

    friend bool operator==(const HealthParams&, const HealthParams&) = default;
};

/// Analytic compressor map anchored at the design point (beta = 0.5, unit corrected speed).
///   corrected flow  Wc  = Wc_d n^a (1 + flow_slope (beta - 0.5))
///   pressure ratio  PR  = 1 + (PR_d - 1) n^b (1 - pr_slope (beta - 0.5))
///   efficiency      eta = eta_d (1 - speed_curvature (n-1)^2 - beta_curvature (beta-0.5)^2)
/// The surge line is the beta = 0 line of the unscaled map. Surge margin is
/// (PR_surge / PR - 1) * 100 with PR_surge taken at the operating corrected
/// flow, so a flow-capacity loss moves the operating point toward the line.
struct CompressorMap {
    double corrected_flow_design = 0.0;  ///< kg/s at 288.15 K / 101.325 kPa
    double pressure_ratio_design = 0.0;
    double efficiency_design = 0.0;
    double T_in_design = 288.15;  ///< K, reference for corrected speed
    double speed_design = 0.0;    ///< rpm
    double flow_speed_exponent = 1.5;
    double pr_speed_exponent = 2.2;
    double flow_slope = 0.12;
    double pr_slope = 0.0;  ///< set by sizing from the design surge margin
    double speed_curvature = 0.4;
    double beta_curvature = 0.3;
    double beta_min = -1.0;
    double beta_max = 2.0;
};

/// Turbine capacity saturates with pressure ratio like a nozzle; efficiency
/// follows the blade-to-isentropic velocity ratio.
struct TurbineMap {
    double corrected_flow_design = 0.0;  ///< W sqrt(T)/P at design, kg/s sqrt(K)/kPa
    double pressure_ratio_design = 0.0;
    double efficiency_design = 0.0;
    double isentropic_drop_design = 0.0;  ///< kJ/kg
    double speed_design = 0.0;            ///< rpm
    double velocity_curvature = 0.5;
};

struct CompressorResult {
    GasState inlet;   ///< with map mass flow filled in
    GasState outlet;  ///< station 3
    double power = 0.0;          ///< kW
    double surge_margin = 0.0;   ///< %
    double corrected_speed = 0.0;
    bool surge = false;          ///< operating point beyond the surge line
};

/// Surge margin (%) of an operating point (corrected flow kg/s, pressure ratio).
double surge_margin(const CompressorMap& map, double corrected_flow, double pr);

/// pr_slope that puts the design point (beta = 0.5, unit speed) at `margin` percent.
double pr_slope_for_surge_margin(const CompressorMap& map, double margin);

/// Compressor operating point at (N, beta). The inlet mass flow is ignored and
/// taken from the map. Throws BetaOutOfRange.
CompressorResult compressor_calc(const GasState& inlet, double N, double beta, const CompressorMap& map,
                                 const HealthParams& health);

/// Constant-pressure combustion with a lumped burner efficiency on the lower
/// heating value (MJ/kg). Throws T4OutOfRange above 2000 K.
GasState burner_calc(const GasState& inlet, double wf, double lhv, double efficiency, double pressure_loss);

/// Adiabatic mixing of two streams at the pressure of `main`.
GasState mix(const GasState& main, const GasState& side);

struct TurbineResult {
    GasState inlet;   ///< station 41, after NGV cooling
    GasState expanded;  ///< rotor exit before rotor cooling returns
    GasState outlet;  ///< station 5
    double power = 0.0;  ///< kW
    double efficiency = 0.0;
    double corrected_flow = 0.0;  ///< actual W41 sqrt(T41)/P41
    double map_flow = 0.0;        ///< capacity from the map at this pressure ratio
};

/// Expansion through pressure ratio `pr` = P41/P5. NGV cooling mixes in ahead
/// of station 41, rotor cooling after the rotor. Throws PressureRatioBelowUnity.
TurbineResult turbine_calc(const GasState& burner_exit, const GasState& ngv_cooling, const GasState& rotor_cooling,
                           double N, double pr, const TurbineMap& map, const HealthParams& health);

/// Adiabatic exhaust duct with a fractional total-pressure loss.
GasState exhaust_calc(const GasState& inlet, double pressure_loss);

/// Mass flow through a convergent nozzle of effective area `area` (m^2) from
/// total state (Pt, Tt) to static back pressure `P_back`. Negative when the
/// back pressure exceeds Pt; limited to the choked value.
double nozzle_flow(double area, double Pt, double Tt, double far, double P_back);

/// Area (m^2) at which stream `s` has static-to-total pressure ratio `ratio` < 1.
double area_for_static_ratio(const GasState& s, double ratio);

/// Static pressure at a duct section of area `area` carrying `flow` subsonically.
/// Returns the choked static pressure when the flow exceeds capacity.
double static_pressure(const GasState& s, double area);

}  // namespace apu::gasgen
