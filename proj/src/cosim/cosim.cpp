#include "apu/cosim/cosim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "apu/error.hpp"
#include "machine_sim.hpp"

namespace apu::cosim {

void CouplingParams::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw Error(Errc::InvalidArgument, "coupling eta must lie in (0, 1]");
    if (!(omega > 0.0)) throw Error(Errc::InvalidArgument, "coupling speed ratio must be > 0");
}

double coupling_power(const numerics::IntegralAccumulator& acc, double window_start, double dt, double eta) {
    if (!(acc.last_time() > window_start) || !(dt > 0.0))
        throw Error(Errc::EmptyWindow, "no samples after t=" + std::to_string(window_start));
    return acc.value() / (dt * eta);
}

ShaftSpeed coupling_speed(double gas_generator_rpm, double omega, int pole_pairs) {
    const double rpm = gas_generator_rpm / omega;
    return {rpm, rpm * 2.0 * std::numbers::pi / 60.0 * pole_pairs};
}

numerics::StepperOptions MachineConfig::default_stepper() {
    numerics::StepperOptions o;
    o.relative_tolerance = 1e-6;
    o.absolute_tolerance = {1e-8, 1e-8, 1e-8, 1e-8, 1e-8, 1e-8, 1e-8, 1e-6};
    o.initial_step = 1e-7;
    o.min_step = 1e-12;
    o.max_step = 5e-5;
    return o;
}

void MachineConfig::validate() const {
    params.validate();
    load.validate();
    fault.validate();
    noise.validate();
    for (std::size_t i = 0; i < faults.size(); ++i) {
        faults[i].fault.validate();
        if (i > 0 && !(faults[i].time > faults[i - 1].time))
            throw Error(Errc::InvalidArgument, "fault event times must increase strictly");
    }
    if (!(avr_dt > 0.0)) throw Error(Errc::InvalidArgument, "avr_dt must be > 0");
    if (record_every == 0) throw Error(Errc::InvalidArgument, "record_every must be >= 1");
    if (!(avr.V_fd_max > 0.0) || !(avr.V_set > 0.0)) throw Error(Errc::InvalidArgument, "invalid AVR limits");
}

void CosimConfig::validate() const {
    if (!(macro_dt > 0.0)) throw Error(Errc::InvalidArgument, "macro_dt must be > 0");
    if (!(t_end >= 0.0)) throw Error(Errc::InvalidArgument, "t_end must be >= 0");
    const double steps = t_end / macro_dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw Error(Errc::InvalidArgument, "t_end must be a whole number of macro steps");
}

EnergyAudit energy_audit(const std::vector<CouplingRecord>& coupling, double eta) {
    EnergyAudit a;
    double sum = 0.0;
    for (const auto& c : coupling) {
        AuditRecord r{c.t0, c.t1, c.energy, c.Pe * (c.t1 - c.t0) * eta, 0.0};
        r.residual = r.energy - r.transfer;
        a.records.push_back(r);
        const double ref = std::abs(c.Pe * (c.t1 - c.t0));
        const double rel = ref > 0.0 ? std::abs(r.residual) / ref : std::abs(r.residual);
        a.max_relative = std::max(a.max_relative, rel);
        sum += rel;
    }
    if (!coupling.empty()) a.mean_relative = sum / static_cast<double>(coupling.size());
    return a;
}

namespace {

std::size_t step_count(const CosimConfig& c) { return static_cast<std::size_t>(std::llround(c.t_end / c.macro_dt)); }

// boundary index at or after `time`
std::size_t boundary_at_or_after(double time, double dt) {
    return static_cast<std::size_t>(std::max(0.0, std::ceil(time / dt - 1e-9)));
}

std::vector<std::string> gas_names() {
    std::vector<std::string> n;
    for (std::size_t c = 0; c < gasgen::kChannelCount; ++c)
        n.emplace_back(gasgen::channel_name(static_cast<gasgen::Channel>(c)));
    n.insert(n.end(), {"wf", "Pe"});
    return n;
}

std::vector<std::string> gas_units() {
    std::vector<std::string> u;
    for (std::size_t c = 0; c < gasgen::kChannelCount; ++c)
        u.emplace_back(gasgen::channel_unit(static_cast<gasgen::Channel>(c)));
    u.insert(u.end(), {"kg/s", "kW"});
    return u;
}

const std::vector<std::string> kMachineSlowNames = {"Va_rms", "Vb_rms", "Vc_rms", "Ia_rms", "Ib_rms",
                                                    "Ic_rms", "Vfd",    "Psg_total", "Psg_loss"};
const std::vector<std::string> kMachineSlowUnits = {"V", "V", "V", "A", "A", "A", "V", "kW", "kW"};

template <class T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void append_machine(std::vector<double>& row, const detail::MachineSim& m, double p_total, double p_loss) {
    const auto r = m.rms();
    row.insert(row.end(), r.begin(), r.end());
    row.push_back(m.V_fd());
    row.push_back(p_total);
    row.push_back(p_loss);
}

[[noreturn]] void rethrow_at(const Error& e, std::size_t k) {
    throw Error(e.code(), "macro step " + std::to_string(k) + ": " + e.what());
}

}  // namespace

RunResult run_joint(const JointConfig& cfg) {
    cfg.cosim.validate();
    cfg.coupling.validate();
    const double dt = cfg.cosim.macro_dt;
    const std::size_t steps = step_count(cfg.cosim);
    const int pp = cfg.machine.params.pole_pairs;

    std::mt19937_64 rng(cfg.cosim.seed);
    std::mt19937_64 machine_seed_source(cfg.cosim.seed ^ 0x9e3779b97f4a7c15ULL);
    gasgen::HealthParams health = cfg.health;
    gasgen::GasGenState x{cfg.governor.N_set};
    ShaftSpeed speed = coupling_speed(x.N, cfg.coupling.omega, pp);
    detail::MachineSim machine(cfg.machine, speed.electrical, machine_seed_source());

    gasgen::GasGenInput u = cfg.ambient;
    const double Pe0 = machine.shaft_power() / cfg.coupling.eta;
    u.wf = gasgen::trim_fuel(cfg.gasgen, x.N, Pe0, u, health);
    control::GovernorState gov = cfg.governor;
    if (gov.wf_ff == 0.0) gov.wf_ff = u.wf;
    gov.wf_prev = u.wf;

    RunResult out;
    out.slow = TimeSeries(concat(gas_names(), kMachineSlowNames), concat(gas_units(), kMachineSlowUnits));
    const gasgen::OutputNoise* noise = &cfg.cosim.output_noise;
    auto record_slow = [&](double t, double Pe, double p_total, double p_loss) {
        const gasgen::GasGenOutputs y = gasgen::output(cfg.gasgen, x, u, health, Pe, noise, &rng);
        std::vector<double> row(y.values.begin(), y.values.end());
        row.push_back(u.wf);
        row.push_back(Pe);
        append_machine(row, machine, p_total, p_loss);
        out.slow.append(t, row);
    };
    record_slow(0.0, Pe0, machine.shaft_power(), 0.0);

    std::size_t next_health = 0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t0 = static_cast<double>(k - 1) * dt;
        const double t1 = static_cast<double>(k) * dt;
        try {
            while (next_health < cfg.health_events.size() &&
                   boundary_at_or_after(cfg.health_events[next_health].time, dt) <= k - 1)
                health = cfg.health_events[next_health++].health;
            const detail::MachineSim::Span span = machine.advance(t0, t1, speed.electrical);
            const double Pe = coupling_power(span.accumulator, t0, dt, cfg.coupling.eta);
            out.coupling.push_back({t0, t1, span.energy, Pe});
            x = gasgen::state_update(cfg.gasgen, x, u, health, Pe, dt);
            if (cfg.cosim.hook) x = cfg.cosim.hook(x, k);
            if (cfg.governor_enabled) {
                const control::GovernorOutput g = control::governor_step(gov, x.N, dt);
                gov = g.state;
                u.wf = g.wf;
            }
            record_slow(t1, Pe, span.energy / dt, span.loss_energy / dt);
            speed = coupling_speed(x.N, cfg.coupling.omega, pp);
        } catch (const Error& e) {
            rethrow_at(e, k);
        }
    }
    out.fast = machine.take_fast();
    out.audit = energy_audit(out.coupling, cfg.coupling.eta);
    out.gas_state = x;
    out.machine_state = machine.state();
    out.wf = u.wf;
    out.V_fd = machine.V_fd();
    return out;
}

RunResult run_generator(const GeneratorRunConfig& cfg) {
    if (!(cfg.speed_rpm > 0.0)) throw Error(Errc::InvalidArgument, "generator speed must be > 0");
    CosimConfig timing;
    timing.macro_dt = cfg.report_dt;
    timing.t_end = cfg.t_end;
    timing.validate();
    const double w_r = cfg.speed_rpm * 2.0 * std::numbers::pi / 60.0 * cfg.machine.params.pole_pairs;
    detail::MachineSim machine(cfg.machine, w_r, cfg.seed);

    RunResult out;
    out.slow = TimeSeries(kMachineSlowNames, kMachineSlowUnits);
    std::vector<double> row;
    append_machine(row, machine, machine.shaft_power(), 0.0);
    out.slow.append(0.0, row);
    const std::size_t steps = step_count(timing);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t0 = static_cast<double>(k - 1) * cfg.report_dt;
        const double t1 = static_cast<double>(k) * cfg.report_dt;
        try {
            const detail::MachineSim::Span span = machine.advance(t0, t1, w_r);
            out.coupling.push_back({t0, t1, span.energy, span.energy / cfg.report_dt});
            row.clear();
            append_machine(row, machine, span.energy / cfg.report_dt, span.loss_energy / cfg.report_dt);
            out.slow.append(t1, row);
        } catch (const Error& e) {
            rethrow_at(e, k);
        }
    }
    out.fast = machine.take_fast();
    out.audit = energy_audit(out.coupling, 1.0);
    out.machine_state = machine.state();
    out.V_fd = machine.V_fd();
    return out;
}

RunResult run_gasgen(const GasGenRunConfig& cfg) {
    cfg.cosim.validate();
    const double dt = cfg.cosim.macro_dt;
    const std::size_t steps = step_count(cfg.cosim);
    std::mt19937_64 rng(cfg.cosim.seed);
    gasgen::HealthParams health = cfg.health;
    gasgen::GasGenInput u = cfg.ambient;
    const double N_d = cfg.gasgen.design_speed;
    const double wf0 = cfg.wf0 > 0.0 ? cfg.wf0 : gasgen::trim_fuel(cfg.gasgen, N_d, cfg.load.at(N_d), u, health);
    u.wf = wf0;
    const gasgen::InitResult init = gasgen::init(cfg.gasgen, u, health, cfg.load, N_d);
    gasgen::GasGenState x = init.state;
    control::GovernorState gov = cfg.governor;
    if (gov.wf_ff == 0.0) gov.wf_ff = wf0;
    gov.wf_prev = wf0;

    RunResult out;
    out.slow = TimeSeries(gas_names(), gas_units());
    const gasgen::OutputNoise* noise = &cfg.cosim.output_noise;
    auto record = [&](double t, double Pe) {
        const gasgen::GasGenOutputs y = gasgen::output(cfg.gasgen, x, u, health, Pe, noise, &rng);
        std::vector<double> row(y.values.begin(), y.values.end());
        row.push_back(u.wf);
        row.push_back(Pe);
        out.slow.append(t, row);
    };
    record(0.0, cfg.load.at(x.N));

    std::size_t next_health = 0, next_fuel = 0;
    double fuel_scale = 1.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t1 = static_cast<double>(k) * dt;
        try {
            while (next_health < cfg.health_events.size() &&
                   boundary_at_or_after(cfg.health_events[next_health].time, dt) <= k - 1)
                health = cfg.health_events[next_health++].health;
            while (next_fuel < cfg.fuel_events.size() &&
                   boundary_at_or_after(cfg.fuel_events[next_fuel].time, dt) <= k - 1)
                fuel_scale = cfg.fuel_events[next_fuel++].scale;
            if (!cfg.governor_enabled) u.wf = wf0 * fuel_scale;
            const double Pe = cfg.load.at(x.N);
            x = gasgen::state_update(cfg.gasgen, x, u, health, Pe, dt);
            if (cfg.cosim.hook) x = cfg.cosim.hook(x, k);
            if (cfg.governor_enabled) {
                const control::GovernorOutput g = control::governor_step(gov, x.N, dt);
                gov = g.state;
                u.wf = g.wf;
            }
            record(t1, cfg.load.at(x.N));
        } catch (const Error& e) {
            rethrow_at(e, k);
        }
    }
    out.gas_state = x;
    out.wf = u.wf;
    return out;
}

}  // namespace apu::cosim
