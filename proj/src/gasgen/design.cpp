#include <cmath>
#include <limits>
#include <string>

#include "apu/error.hpp"
#include "apu/gasgen/gasgen.hpp"
#include "apu/numerics/newton.hpp"

namespace apu::gasgen {

namespace {

[[noreturn]] void calibration_failed(const std::string& what, double target, double achieved) {
    throw Error(Errc::CalibrationFailed, what + ": target " + std::to_string(target) + ", achieved " +
                                             std::to_string(achieved));
}

}  // namespace

DesignResult design_point_size(const GasGenDesignSpec& spec) {
    if (!(spec.pressure_ratio > 1.0) || !(spec.W2 > 0.0) || !(spec.fuel_flow > 0.0) || !(spec.design_speed > 0.0) ||
        !(spec.shaft_power > 0.0))
        throw Error(Errc::InvalidArgument, "design targets not strictly positive");

    DesignResult out;
    GasGenParams& p = out.params;
    p.intake_recovery = spec.intake_recovery;
    p.burner_pressure_loss = spec.burner_pressure_loss;
    p.exhaust_pressure_loss = spec.exhaust_pressure_loss;
    p.ngv_cooling = spec.ngv_cooling;
    p.rotor_cooling = spec.rotor_cooling;
    p.overboard_bleed = spec.overboard_bleed;
    p.inertia = spec.inertia;
    p.accessory_power = spec.accessory_power;
    p.eta_mech = spec.eta_mech;
    p.fuel_lhv = spec.fuel_lhv;
    p.design_speed = spec.design_speed;
    p.design_fuel_flow = spec.fuel_flow;
    p.design_shaft_power = spec.shaft_power;
    p.surge_margin_design = spec.surge_margin;
    p.design_altitude = spec.altitude;
    p.design_mach = spec.mach;
    p.design_dT_isa = spec.dT_isa;

    const Ambient amb = ambient_conditions(spec.altitude, spec.mach, spec.dT_isa, spec.intake_recovery);
    const GasState& s2 = amb.station2;

    // compressor: anchor the map at beta = 0.5, unit corrected speed
    CompressorMap& cm = p.compressor;
    cm.corrected_flow_design = spec.W2 * std::sqrt(s2.Tt / 288.15) / (s2.Pt / 101.325);
    cm.pressure_ratio_design = spec.pressure_ratio;
    cm.efficiency_design = spec.eta_compressor;
    cm.T_in_design = s2.Tt;
    cm.speed_design = spec.design_speed;
    cm.pr_slope = pr_slope_for_surge_margin(cm, spec.surge_margin);

    const HealthParams healthy;
    const CompressorResult c = compressor_calc(s2, spec.design_speed, 0.5, cm, healthy);
    const GasState& s3 = c.outlet;

    const double w2 = c.inlet.W;
    const GasState ngv{w2 * spec.ngv_cooling, s3.Tt, s3.Pt, 0.0};
    const GasState rotor{w2 * spec.rotor_cooling, s3.Tt, s3.Pt, 0.0};
    GasState s31 = s3;
    s31.W = w2 * (1.0 - spec.overboard_bleed - spec.ngv_cooling - spec.rotor_cooling);

    // burner efficiency from the T4 target; a value above one is capped
    const double w4 = s31.W + spec.fuel_flow;
    const double far4 = spec.fuel_flow / s31.W;
    const double eta_b =
        (w4 * enthalpy(spec.T4, far4) - s31.W * enthalpy(s31.Tt, s31.FAR)) / (spec.fuel_flow * spec.fuel_lhv * 1000.0);
    out.burner_efficiency_uncapped = eta_b;
    if (!(eta_b > 0.9 && eta_b < 1.01)) calibration_failed("burner efficiency", 1.0, eta_b);
    p.burner_efficiency = std::min(eta_b, 1.0);
    const GasState s4 = burner_calc(s31, spec.fuel_flow, spec.fuel_lhv, p.burner_efficiency, spec.burner_pressure_loss);

    // turbine: pressure ratio that delivers the design shaft power at the design efficiency
    const GasState s41 = mix(s4, ngv);
    const double h41 = enthalpy(s41.Tt, s41.FAR);
    const auto isentropic_drop = [&](double pr) {
        return h41 - enthalpy(isentropic_temperature(s41.Tt, 1.0 / pr, s41.FAR), s41.FAR);
    };
    const double work_needed = spec.shaft_power + spec.accessory_power + c.power / spec.eta_mech;
    const auto power_gap = [&](std::span<const double> x) -> numerics::Vector {
        if (!(x[0] > 1.0)) return {std::numeric_limits<double>::quiet_NaN()};
        return {(s41.W * spec.eta_turbine * isentropic_drop(x[0]) - work_needed) / spec.shaft_power};
    };
    numerics::NewtonOptions opts;
    opts.relative_tolerance = 1e-13;
    const numerics::Vector scale{1.0};
    const double pr_t = numerics::newton_solve(power_gap, {spec.pressure_ratio * 0.9}, opts, {}, scale).x[0];

    TurbineMap& tm = p.turbine;
    tm.pressure_ratio_design = pr_t;
    tm.efficiency_design = spec.eta_turbine;
    tm.isentropic_drop_design = isentropic_drop(pr_t);
    tm.speed_design = spec.design_speed;
    tm.corrected_flow_design = s41.W * std::sqrt(s41.Tt) / s41.Pt;

    const TurbineResult t = turbine_calc(s4, ngv, rotor, spec.design_speed, pr_t, tm, healthy);
    const GasState s8 = exhaust_calc(t.outlet, spec.exhaust_pressure_loss);

    // exhaust nozzle passes the design flow at the design back pressure
    p.nozzle_area = s8.W / nozzle_flow(1.0, s8.Pt, s8.Tt, s8.FAR, amb.P_static);
    p.design_exhaust_flow = s8.W;
    if (!(s8.Pt > amb.P_static)) calibration_failed("exhaust pressure above ambient", amb.P_static, s8.Pt);

    p.ps3_area = area_for_static_ratio(s3, spec.ps3_ratio);
    p.nox_T_ref = s3.Tt - p.nox_T_scale * std::log(spec.nox_severity / std::pow(s3.Pt / p.nox_P_ref, 0.4));

    // the matched design point must be a fixed point of the off-design solver
    const GasGenInput u{spec.fuel_flow, spec.altitude, spec.mach, spec.dT_isa};
    out.solution = off_design_solve(p, u, healthy, spec.shaft_power, spec.design_speed);
    if (out.solution.newton_iterations != 0)
        calibration_failed("design fixed point (Newton iterations)", 0.0, out.solution.newton_iterations);
    if (std::abs(out.solution.PW_shaft_net / spec.shaft_power - 1.0) > 1e-3)
        calibration_failed("shaft power", spec.shaft_power, out.solution.PW_shaft_net);
    if (std::abs(out.solution.at(Station::S8).Tt / spec.T8 - 1.0) > 5e-3)
        calibration_failed("exhaust temperature", spec.T8, out.solution.at(Station::S8).Tt);
    return out;
}

}  // namespace apu::gasgen
