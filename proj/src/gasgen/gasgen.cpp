#include "apu/gasgen/gasgen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "apu/error.hpp"
#include "apu/numerics/newton.hpp"

namespace apu::gasgen {

namespace {

using numerics::Vector;

struct CycleInputs {
    Ambient ambient;
    double wf = 0.0;
    double N = 0.0;
};

// Runs the gas path at (beta, turbine PR). Fills everything except the Newton bookkeeping.
CycleSolution evaluate(const GasGenParams& p, const CycleInputs& in, const HealthParams& health, double beta,
                       double turbine_pr, Vector* residual) {
    CycleSolution sol;
    sol.N = in.N;
    sol.wf = in.wf;
    sol.beta = beta;
    sol.turbine_pr = turbine_pr;
    sol.P_ambient = in.ambient.P_static;

    const CompressorResult c = compressor_calc(in.ambient.station2, in.N, beta, p.compressor, health);
    const double w2 = c.inlet.W;
    sol.corrected_speed = c.corrected_speed;
    sol.surge_margin = c.surge_margin;
    sol.surge = c.surge;
    sol.PW_cpr = c.power;

    sol.at(Station::S0) = GasState{w2, in.ambient.T_static, in.ambient.P_static, 0.0};
    sol.at(Station::S1) = in.ambient.station1;
    sol.at(Station::S1).W = w2;
    sol.at(Station::S2) = c.inlet;
    sol.at(Station::S3) = c.outlet;

    const GasState& s3 = c.outlet;
    sol.overboard_flow = w2 * p.overboard_bleed;
    const GasState ngv{w2 * p.ngv_cooling, s3.Tt, s3.Pt, s3.FAR};
    const GasState rotor{w2 * p.rotor_cooling, s3.Tt, s3.Pt, s3.FAR};
    GasState s31 = s3;
    s31.W = w2 - sol.overboard_flow - ngv.W - rotor.W;
    sol.at(Station::S31) = s31;

    const GasState s4 = burner_calc(s31, in.wf, p.fuel_lhv, p.burner_efficiency, p.burner_pressure_loss);
    sol.at(Station::S4) = s4;

    const TurbineResult t = turbine_calc(s4, ngv, rotor, in.N, turbine_pr, p.turbine, health);
    sol.at(Station::S41) = t.inlet;
    sol.rotor_exit = t.expanded;
    sol.at(Station::S5) = t.outlet;
    sol.at(Station::S6) = t.outlet;
    sol.PW_turb = t.power;
    sol.eta_mech_cpr = p.eta_mech;
    sol.PW_shaft_net = t.power - sol.PW_cpr / p.eta_mech - p.accessory_power;

    const GasState s8 = exhaust_calc(t.outlet, p.exhaust_pressure_loss);
    sol.at(Station::S8) = s8;

    sol.SFC = 3600.0 * in.wf / (sol.PW_shaft_net + p.accessory_power);
    sol.Ps3 = static_pressure(s3, p.ps3_area);
    sol.NOx_severity = std::pow(s3.Pt / p.nox_P_ref, 0.4) * std::exp((s3.Tt - p.nox_T_ref) / p.nox_T_scale);

    if (residual) {
        const double w_noz = nozzle_flow(p.nozzle_area, s8.Pt, s8.Tt, s8.FAR, in.ambient.P_static);
        *residual = Vector{(t.corrected_flow - t.map_flow) / p.turbine.corrected_flow_design,
                           (s8.W - w_noz) / p.design_exhaust_flow};
    }
    return sol;
}

numerics::NewtonResult match(const GasGenParams& p, const CycleInputs& in, const HealthParams& health,
                             Vector guess) {
    const auto fn = [&](std::span<const double> x) -> Vector {
        Vector r;
        try {
            (void)evaluate(p, in, health, x[0], x[1], &r);
        } catch (const Error&) {
            // outside the map or the property table: let the damping back off
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return Vector{nan, nan};
        }
        return r;
    };
    numerics::NewtonOptions opts;
    opts.relative_tolerance = 1e-10;
    const Vector x_scale{1.0, p.turbine.pressure_ratio_design};
    return numerics::newton_solve(fn, std::move(guess), opts, {}, x_scale);
}

CycleInputs make_inputs(const GasGenParams& p, const GasGenInput& u, double N) {
    return CycleInputs{ambient_conditions(u.altitude, u.mach, u.dT_isa, p.intake_recovery), u.wf, N};
}

HealthParams blend(const HealthParams& h, double s) {
    return HealthParams{1.0 + s * (h.eta_c_factor - 1.0), 1.0 + s * (h.flow_c_factor - 1.0),
                        1.0 + s * (h.eta_t_factor - 1.0), 1.0 + s * (h.flow_t_factor - 1.0)};
}

void check_speed(const GasGenParams& p, double N) {
    if (!(N > 0.0 && N <= p.max_speed_ratio * p.design_speed))
        throw Error(Errc::SpeedOutOfRange, "N=" + std::to_string(N) + " rpm");
}

}  // namespace

double LoadLaw::at(double N) const {
    if (kind == Kind::Fixed) return power;
    const double r = N / anchor_speed;
    return power * r * r * r;
}

CycleSolution off_design_solve(const GasGenParams& p, const GasGenInput& u, const HealthParams& health, double Pe,
                               double N) {
    check_speed(p, N);
    if (!(u.wf >= 0.0)) throw Error(Errc::InvalidArgument, "negative fuel flow");
    const CycleInputs in = make_inputs(p, u, N);
    const Vector design_guess{0.5, p.turbine.pressure_ratio_design};

    numerics::NewtonResult res;
    try {
        res = match(p, in, health, design_guess);
    } catch (const Error& direct) {
        // continuation from the design inputs
        const GasGenInput ud{p.design_fuel_flow, p.design_altitude, p.design_mach, p.design_dT_isa};
        bool solved = false;
        for (int steps : {8, 32}) {
            try {
                Vector x = design_guess;
                int total = 0;
                for (int k = 1; k <= steps; ++k) {
                    const double s = static_cast<double>(k) / steps;
                    const GasGenInput us{ud.wf + s * (u.wf - ud.wf), ud.altitude + s * (u.altitude - ud.altitude),
                                         ud.mach + s * (u.mach - ud.mach), ud.dT_isa + s * (u.dT_isa - ud.dT_isa)};
                    const double Ns = p.design_speed + s * (N - p.design_speed);
                    const CycleInputs is = make_inputs(p, us, Ns);
                    res = match(p, is, blend(health, s), x);
                    x = res.x;
                    total += res.iterations;
                }
                res.iterations = total;
                solved = true;
                break;
            } catch (const Error&) {
            }
        }
        if (!solved) throw;
    }

    CycleSolution sol = evaluate(p, in, health, res.x[0], res.x[1], nullptr);
    sol.load_power = Pe;
    sol.newton_residual_norm = res.residual_norm;
    sol.newton_iterations = res.iterations;
    return sol;
}

double spool_acceleration(const GasGenParams& p, double surplus_kw, double N) {
    constexpr double k = (30.0 / std::numbers::pi) * (30.0 / std::numbers::pi);
    return surplus_kw * 1000.0 * k / (p.inertia * N);
}

GasGenState state_update(const GasGenParams& p, const GasGenState& x, const GasGenInput& u,
                         const HealthParams& health, double Pe, double dt) {
    constexpr int kSubSteps = 2;
    const double h = dt / kSubSteps;
    double N = x.N;
    for (int k = 0; k < kSubSteps; ++k) {
        const CycleSolution sol = off_design_solve(p, u, health, Pe, N);
        N += h * spool_acceleration(p, sol.PW_shaft_net - Pe, N);
        check_speed(p, N);
    }
    return GasGenState{N};
}

std::string_view channel_name(Channel c) {
    static constexpr std::array<std::string_view, kChannelCount> names{
        "XNHPC", "PWSD", "SFC", "SNOx", "HPCSM", "T1", "P1", "T2", "P2", "W2", "T3",  "P3", "Ps3",
        "W3",    "T4",   "P4",  "W4",   "T41",   "W41", "T5", "P5", "W5", "T8", "P8", "W8"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view channel_unit(Channel c) {
    static constexpr std::array<std::string_view, kChannelCount> units{
        "rpm", "kW", "kg/kWh", "-",  "%",  "K",    "kPa", "K",  "kPa", "kg/s", "K",  "kPa", "kPa",
        "kg/s", "K", "kPa",    "kg/s", "K", "kg/s", "K",   "kPa", "kg/s", "K",  "kPa", "kg/s"};
    return units[static_cast<std::size_t>(c)];
}

GasGenOutputs project(const CycleSolution& sol) {
    GasGenOutputs y;
    y[Channel::XNHPC] = sol.N;
    y[Channel::PWSD] = sol.PW_shaft_net;
    y[Channel::SFC] = sol.SFC;
    y[Channel::SNOx] = sol.NOx_severity;
    y[Channel::HPCSM] = sol.surge_margin;
    y[Channel::T1] = sol.at(Station::S1).Tt;
    y[Channel::P1] = sol.at(Station::S1).Pt;
    y[Channel::T2] = sol.at(Station::S2).Tt;
    y[Channel::P2] = sol.at(Station::S2).Pt;
    y[Channel::W2] = sol.at(Station::S2).W;
    y[Channel::T3] = sol.at(Station::S3).Tt;
    y[Channel::P3] = sol.at(Station::S3).Pt;
    y[Channel::Ps3] = sol.Ps3;
    y[Channel::W3] = sol.at(Station::S3).W;
    y[Channel::T4] = sol.at(Station::S4).Tt;
    y[Channel::P4] = sol.at(Station::S4).Pt;
    y[Channel::W4] = sol.at(Station::S4).W;
    y[Channel::T41] = sol.at(Station::S41).Tt;
    y[Channel::W41] = sol.at(Station::S41).W;
    y[Channel::T5] = sol.at(Station::S5).Tt;
    y[Channel::P5] = sol.at(Station::S5).Pt;
    y[Channel::W5] = sol.at(Station::S5).W;
    y[Channel::T8] = sol.at(Station::S8).Tt;
    y[Channel::P8] = sol.at(Station::S8).Pt;
    y[Channel::W8] = sol.at(Station::S8).W;
    return y;
}

GasGenOutputs output(const GasGenParams& p, const GasGenState& x, const GasGenInput& u, const HealthParams& health,
                     double Pe, const OutputNoise* noise, std::mt19937_64* rng) {
    GasGenOutputs y = project(off_design_solve(p, u, health, Pe, x.N));
    if (noise && rng) {
        for (std::size_t i = 0; i < kChannelCount; ++i) {
            if (noise->std_dev[i] > 0.0) {
                std::normal_distribution<double> nd(0.0, noise->std_dev[i]);
                y.values[i] += nd(*rng);
            }
        }
    }
    return y;
}

InitResult init(const GasGenParams& p, const GasGenInput& u0, const HealthParams& health, const LoadLaw& load,
                double N_hint) {
    const double Nd = p.design_speed;
    const double start = N_hint > 0.0 ? N_hint : Nd;
    const double lo_limit = 0.5 * Nd;
    const double hi_limit = p.max_speed_ratio * Nd;

    const auto surplus = [&](double N) {
        return off_design_solve(p, u0, health, load.at(N), N).PW_shaft_net - load.at(N);
    };

    // bracket by scanning outward
    double a = start, fa = surplus(start);
    double b = a, fb = fa;
    bool bracketed = fa == 0.0;
    for (int k = 1; k <= 70 && !bracketed; ++k) {
        for (double dir : {1.0, -1.0}) {
            const double N = start * (1.0 + dir * 0.01 * k);
            if (N <= lo_limit || N > hi_limit) continue;
            double fN;
            try {
                fN = surplus(N);
            } catch (const Error&) {
                continue;
            }
            const double prev = start * (1.0 + dir * 0.01 * (k - 1));
            double fprev;
            try {
                fprev = k == 1 ? fa : surplus(prev);
            } catch (const Error&) {
                continue;
            }
            if ((fN <= 0.0) != (fprev <= 0.0)) {
                a = prev; fa = fprev; b = N; fb = fN;
                bracketed = true;
                break;
            }
        }
    }
    if (!bracketed)
        throw Error(Errc::NoSteadyState, "net shaft power does not cross the load within the speed envelope");

    // Illinois regula falsi
    double N = a;
    double fN = fa;
    int side = 0;
    for (int k = 0; k < 200 && fa != 0.0; ++k) {
        N = (a * fb - b * fa) / (fb - fa);
        fN = surplus(N);
        if (std::abs(fN) <= 1e-10 * p.design_shaft_power || std::abs(b - a) <= 1e-13 * N) break;
        if ((fN > 0.0) == (fb > 0.0)) {
            b = N; fb = fN;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = N; fa = fN;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    if (fa == 0.0) N = a;

    InitResult out;
    out.state = GasGenState{N};
    out.solution = off_design_solve(p, u0, health, load.at(N), N);
    out.outputs = project(out.solution);
    return out;
}

double trim_fuel(const GasGenParams& p, double N, double Pe, const GasGenInput& u, const HealthParams& health) {
    const auto fn = [&](std::span<const double> x) -> Vector {
        GasGenInput ux = u;
        ux.wf = x[0];
        return Vector{(off_design_solve(p, ux, health, Pe, N).PW_shaft_net - Pe) / p.design_shaft_power};
    };
    const double guess = p.design_fuel_flow * (Pe + p.accessory_power) / (p.design_shaft_power + p.accessory_power);
    numerics::NewtonOptions opts;
    opts.relative_tolerance = 1e-11;
    const Vector x_scale{p.design_fuel_flow};
    return numerics::newton_solve(fn, Vector{guess}, opts, {}, x_scale).x[0];
}

std::span<const OperatingPoint> reference_operating_points() {
    static constexpr std::array<OperatingPoint, 10> points{{
        {0.0, 0.0, 5.0, 500.0},
        {0.0, 0.0, 5.0, 400.0},
        {0.0, 0.0, 5.0, 300.0},
        {0.0, 0.0, 5.0, 200.0},
        {0.0, 0.0, 5.0, 100.0},
        {2000.0, 0.3, 5.0, 400.0},
        {4000.0, 0.4, 5.0, 350.0},
        {6000.0, 0.5, 5.0, 300.0},
        {8000.0, 0.7, 5.0, 222.0},
        {10000.0, 0.6, 5.0, 150.0},
    }};
    return points;
}

double mass_closure_error(const CycleSolution& sol) {
    const double w8 = sol.at(Station::S8).W;
    const double expected = sol.at(Station::S2).W - sol.overboard_flow + sol.wf;
    return std::abs(w8 - expected) / w8;
}

double energy_closure_error(const GasGenParams& p, const CycleSolution& sol) {
    const auto H = [](const GasState& s) { return s.W * enthalpy(s.Tt, s.FAR); };
    const GasState& s3 = sol.at(Station::S3);
    const double w2 = sol.at(Station::S2).W;
    const GasState ngv{w2 * p.ngv_cooling, s3.Tt, s3.Pt, s3.FAR};
    const GasState rotor{w2 * p.rotor_cooling, s3.Tt, s3.Pt, s3.FAR};

    const double burner_in = H(sol.at(Station::S31)) + p.burner_efficiency * sol.wf * p.fuel_lhv * 1000.0;
    const double burner_out = H(sol.at(Station::S4));
    const double mix41_in = H(sol.at(Station::S4)) + H(ngv);
    const double mix41_out = H(sol.at(Station::S41));
    const double mix5_in = H(sol.rotor_exit) + H(rotor);
    const double mix5_out = H(sol.at(Station::S5));

    // relative to the enthalpy flux through each node
    const auto rel = [](double in, double out, double scale) { return std::abs(in - out) / scale; };
    const double scale4 = sol.at(Station::S4).W * 1000.0;  // 1 MJ/kg reference per unit flow
    double e = rel(burner_in, burner_out, std::max(std::abs(burner_out), scale4));
    e = std::max(e, rel(mix41_in, mix41_out, std::max(std::abs(mix41_out), scale4)));
    e = std::max(e, rel(mix5_in, mix5_out, std::max(std::abs(mix5_out), scale4)));
    return e;
}

}  // namespace apu::gasgen
