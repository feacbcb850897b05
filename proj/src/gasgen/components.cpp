#include "apu/gasgen/components.hpp"

#include <cmath>
#include <string>

#include "apu/error.hpp"

namespace apu::gasgen {

namespace {

constexpr double kStdT = 288.15;
constexpr double kStdP = 101.325;

double air_part(const GasState& s) { return s.W / (1.0 + s.FAR); }

// W sqrt(R Tt) / (A Pt) as a function of Mach number
double flow_parameter(double mach, double gamma) {
    const double base = 1.0 + 0.5 * (gamma - 1.0) * mach * mach;
    return std::sqrt(gamma) * mach * std::pow(base, -0.5 * (gamma + 1.0) / (gamma - 1.0));
}

}  // namespace

double surge_margin(const CompressorMap& map, double corrected_flow, double pr) {
    // speed at which the unscaled surge line passes through this corrected flow
    const double n_surge = std::pow(corrected_flow / (map.corrected_flow_design * (1.0 - 0.5 * map.flow_slope)),
                                    1.0 / map.flow_speed_exponent);
    const double pr_surge = 1.0 + (map.pressure_ratio_design - 1.0) * std::pow(n_surge, map.pr_speed_exponent) *
                                      (1.0 + 0.5 * map.pr_slope);
    return (pr_surge / pr - 1.0) * 100.0;
}

double pr_slope_for_surge_margin(const CompressorMap& map, double margin) {
    const double n_surge = std::pow(1.0 / (1.0 - 0.5 * map.flow_slope), 1.0 / map.flow_speed_exponent);
    const double pr = map.pressure_ratio_design;
    const double lift = (pr * (1.0 + margin / 100.0) - 1.0) / ((pr - 1.0) * std::pow(n_surge, map.pr_speed_exponent));
    return 2.0 * (lift - 1.0);
}

CompressorResult compressor_calc(const GasState& inlet, double N, double beta, const CompressorMap& map,
                                 const HealthParams& health) {
    if (!(beta >= map.beta_min && beta <= map.beta_max))
        throw Error(Errc::BetaOutOfRange, "beta=" + std::to_string(beta));
    const double n = (N / map.speed_design) / std::sqrt(inlet.Tt / map.T_in_design);
    const double db = beta - 0.5;

    const double wc = map.corrected_flow_design * std::pow(n, map.flow_speed_exponent) * (1.0 + map.flow_slope * db) *
                      health.flow_c_factor;
    const double speed_pr = (map.pressure_ratio_design - 1.0) * std::pow(n, map.pr_speed_exponent);
    const double pr = 1.0 + speed_pr * (1.0 - map.pr_slope * db);
    const double eta = map.efficiency_design *
                       (1.0 - map.speed_curvature * (n - 1.0) * (n - 1.0) - map.beta_curvature * db * db) *
                       health.eta_c_factor;
    if (!(pr > 1.0) || !(eta > 0.0))
        throw Error(Errc::BetaOutOfRange, "map point outside its valid region at beta=" + std::to_string(beta));

    CompressorResult out;
    out.corrected_speed = n;
    out.inlet = inlet;
    out.inlet.W = wc * (inlet.Pt / kStdP) / std::sqrt(inlet.Tt / kStdT);

    const double h2 = enthalpy(inlet.Tt, inlet.FAR);
    const double h3s = enthalpy(isentropic_temperature(inlet.Tt, pr, inlet.FAR), inlet.FAR);
    const double h3 = h2 + (h3s - h2) / eta;
    out.outlet = GasState{out.inlet.W, temperature_from_enthalpy(h3, inlet.FAR), inlet.Pt * pr, inlet.FAR};
    out.power = out.inlet.W * (h3 - h2);

    out.surge_margin = surge_margin(map, wc, pr);
    out.surge = out.surge_margin < 0.0;
    return out;
}

GasState burner_calc(const GasState& inlet, double wf, double lhv, double efficiency, double pressure_loss) {
    const double air = air_part(inlet);
    GasState out;
    out.W = inlet.W + wf;
    out.FAR = (inlet.FAR * air + wf) / air;
    out.Pt = inlet.Pt * (1.0 - pressure_loss);
    const double h_out = (inlet.W * enthalpy(inlet.Tt, inlet.FAR) + efficiency * wf * lhv * 1000.0) / out.W;
    try {
        out.Tt = temperature_from_enthalpy(h_out, out.FAR);
    } catch (const Error&) {
        throw Error(Errc::T4OutOfRange, "combustor exit above 2000 K at wf=" + std::to_string(wf));
    }
    return out;
}

GasState mix(const GasState& main, const GasState& side) {
    GasState out;
    out.W = main.W + side.W;
    const double air = air_part(main) + air_part(side);
    const double fuel = main.W - air_part(main) + side.W - air_part(side);
    out.FAR = fuel / air;
    out.Pt = main.Pt;
    const double h = (main.W * enthalpy(main.Tt, main.FAR) + side.W * enthalpy(side.Tt, side.FAR)) / out.W;
    out.Tt = temperature_from_enthalpy(h, out.FAR);
    return out;
}

TurbineResult turbine_calc(const GasState& burner_exit, const GasState& ngv_cooling, const GasState& rotor_cooling,
                           double N, double pr, const TurbineMap& map, const HealthParams& health) {
    if (!(pr > 1.0)) throw Error(Errc::PressureRatioBelowUnity, "turbine pressure ratio " + std::to_string(pr));
    TurbineResult out;
    out.inlet = mix(burner_exit, ngv_cooling);
    const GasState& in = out.inlet;

    const double h41 = enthalpy(in.Tt, in.FAR);
    const double dh_is = h41 - enthalpy(isentropic_temperature(in.Tt, 1.0 / pr, in.FAR), in.FAR);
    const double nu = (N / map.speed_design) * std::sqrt(map.isentropic_drop_design / dh_is);
    out.efficiency = map.efficiency_design * (1.0 - map.velocity_curvature * (nu - 1.0) * (nu - 1.0)) *
                     health.eta_t_factor;
    const double dh = out.efficiency * dh_is;
    out.power = in.W * dh;
    out.expanded = GasState{in.W, temperature_from_enthalpy(h41 - dh, in.FAR), in.Pt / pr, in.FAR};
    out.outlet = mix(out.expanded, rotor_cooling);

    out.corrected_flow = in.W * std::sqrt(in.Tt) / in.Pt;
    const double pd = map.pressure_ratio_design;
    out.map_flow = map.corrected_flow_design * std::sqrt(1.0 - 1.0 / (pr * pr)) / std::sqrt(1.0 - 1.0 / (pd * pd)) *
                   health.flow_t_factor;
    return out;
}

GasState exhaust_calc(const GasState& inlet, double pressure_loss) {
    GasState out = inlet;
    out.Pt = inlet.Pt * (1.0 - pressure_loss);
    return out;
}

double nozzle_flow(double area, double Pt, double Tt, double far, double P_back) {
    const double gamma = heat_capacity_ratio(Tt, far);
    const double hi = std::max(Pt, P_back);
    const double lo = std::min(Pt, P_back);
    const double m2 = 2.0 / (gamma - 1.0) * (std::pow(hi / lo, (gamma - 1.0) / gamma) - 1.0);
    const double mach = std::min(1.0, std::sqrt(m2));
    const double w = area * hi * 1000.0 / std::sqrt(kGasConstant * 1000.0 * Tt) * flow_parameter(mach, gamma);
    return Pt >= P_back ? w : -w;
}

double area_for_static_ratio(const GasState& s, double ratio) {
    const double gamma = heat_capacity_ratio(s.Tt, s.FAR);
    const double m2 = 2.0 / (gamma - 1.0) * (std::pow(1.0 / ratio, (gamma - 1.0) / gamma) - 1.0);
    return s.W * std::sqrt(kGasConstant * 1000.0 * s.Tt) / (s.Pt * 1000.0 * flow_parameter(std::sqrt(m2), gamma));
}

double static_pressure(const GasState& s, double area) {
    const double gamma = heat_capacity_ratio(s.Tt, s.FAR);
    const double target = s.W * std::sqrt(kGasConstant * 1000.0 * s.Tt) / (area * s.Pt * 1000.0);
    double lo = 0.0, hi = 1.0;
    if (target < flow_parameter(1.0, gamma)) {
        for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (flow_parameter(mid, gamma) < target) lo = mid; else hi = mid;
        }
    }
    const double mach = 0.5 * (lo + hi);
    return s.Pt / std::pow(1.0 + 0.5 * (gamma - 1.0) * mach * mach, gamma / (gamma - 1.0));
}

}  // namespace apu::gasgen
