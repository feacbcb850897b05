#include "machine_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "apu/error.hpp"

namespace apu::cosim::detail {

namespace {
constexpr double kSameTime = 1e-12;
}

std::vector<std::string> MachineSim::fast_names() {
    return {"Va", "Vb", "Vc", "Ia", "Ib", "Ic", "If", "Vfd", "Psg_total", "Psg_loss"};
}

std::vector<std::string> MachineSim::fast_units() { return {"V", "V", "V", "A", "A", "A", "A", "V", "kW", "kW"}; }

MachineSim::MachineSim(const MachineConfig& config, double w_r0, std::uint64_t seed)
    : cfg_(config), avr_(config.avr), w_r_(w_r0), rng_(seed), fast_(fast_names(), fast_units()) {
    cfg_.validate();
    if (!(w_r0 > 0.0)) throw Error(Errc::InvalidArgument, "generator speed must be > 0");
    load_ = cfg_.load.at(0.0, w_r0);
    V_fd_ = wrsg::field_voltage_for(cfg_.params, avr_.V_set, w_r0, load_);
    if (avr_.V_fd_ff == 0.0) avr_.V_fd_ff = V_fd_;
    V_fd_ = std::clamp(avr_.V_fd_ff, 0.0, avr_.V_fd_max);

    const double period = 2.0 * std::numbers::pi / w_r0;
    trackers_.assign(6, wrsg::RmsTracker(period));

    // one electrical period of healthy steady operation ahead of t = 0 fills the rms windows
    state_ = wrsg::steady_state(cfg_.params, V_fd_, w_r0, load_, -w_r0 * period);
    fault_ = wrsg::FaultParams{};
    const numerics::DerivFn f = [&](double, std::span<const double> y, std::span<double> dy) {
        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        const wrsg::WrsgState d = wrsg::machine_derivatives(cfg_.params, st, V_fd_, w_r0, fault_, load_);
        std::copy(d.x.begin(), d.x.end(), dy.begin());
    };
    const numerics::StepObserver obs = [&](double t, std::span<const double> y) {
        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        observe(t, st, w_r0, false, false);
    };
    observe(-period, state_, w_r0, false, false);
    auto res = numerics::integrate_adaptive(f, numerics::Vector(state_.x.begin(), state_.x.end()), -period, 0.0,
                                            cfg_.stepper, std::span(&obs, 1));
    std::copy(res.state.begin(), res.state.end(), state_.x.begin());
    state_ = wrsg::wrap_angle(state_);
    next_step_ = std::max(res.trace.last_step, cfg_.stepper.min_step);

    held_noise_ = wrsg::draw_equation_noise(cfg_.noise, rng_);
    const Sample s0 = sample(0.0, state_, w_r0);
    energy_ = numerics::IntegralAccumulator(0.0, s0.power.total);
    loss_ = numerics::IntegralAccumulator(0.0, s0.power.loss);
    apply_events(0.0, w_r0);
    observe(0.0, state_, w_r0, true, false);
}

MachineSim::Sample MachineSim::sample(double, const wrsg::WrsgState& s, double w_r) const {
    Sample out;
    out.terminal = wrsg::terminal(cfg_.params, s, V_fd_, w_r, fault_, load_, held_noise_);
    out.power = wrsg::mech_power(out.terminal.v_abc, out.terminal.i_abc, out.terminal.i_f, fault_, cfg_.params);
    return out;
}

void MachineSim::observe(double t, const wrsg::WrsgState& s, double w_r, bool record, bool accumulate) {
    const Sample smp = sample(t, s, w_r);
    const std::array<double, 4> v{smp.terminal.v_abc[0], smp.terminal.v_abc[1], smp.terminal.v_abc[2], V_fd_};
    const wrsg::Measurement m = wrsg::measure(v, smp.terminal.i_abc, cfg_.noise, rng_);
    for (std::size_t k = 0; k < 3; ++k) {
        trackers_[k].push(t, m.v_abc[k]);
        trackers_[3 + k].push(t, m.i_abc[k]);
    }
    last_power_ = smp.power.total;
    if (accumulate) {
        energy_.add(t, smp.power.total);
        loss_.add(t, smp.power.loss);
    }
    if (record && (accepted_++ % cfg_.record_every == 0)) {
        const double row[] = {m.v_abc[0], m.v_abc[1], m.v_abc[2], m.i_abc[0],       m.i_abc[1],
                              m.i_abc[2], smp.terminal.i_f, m.V_fd, smp.power.total, smp.power.loss};
        fast_.append(t, row);
    }
}

void MachineSim::apply_events(double t, double w_r) {
    bool changed = false;
    while (next_fault_ < cfg_.faults.size() && cfg_.faults[next_fault_].time <= t + kSameTime) {
        const wrsg::FaultParams next = cfg_.faults[next_fault_++].fault;
        if (fault_.open() && !next.open()) {
            // the shorted loop starts with no current of its own
            const wrsg::Vec3 e = wrsg::inverse_park_phase_a_row(state_.theta());
            state_[wrsg::StateIndex::SaF] = next.mu * (e[0] * state_.x[0] + e[1] * state_.x[1] + e[2] * state_.x[2]);
        }
        if (next.open()) state_[wrsg::StateIndex::SaF] = 0.0;
        fault_ = next;
        changed = true;
    }
    while (next_load_ < cfg_.load.steps.size() && cfg_.load.steps[next_load_].time <= t + kSameTime) {
        ++next_load_;
        changed = true;
    }
    const wrsg::ElectricalLoad now = cfg_.load.at(t + kSameTime, w_r);
    if (now.R != load_.R || now.L != load_.L) {
        state_ = wrsg::rebase_load(cfg_.params, state_, fault_, load_.L, now.L);
        load_ = now;
        changed = true;
    }
    if (changed) {
        const Sample s = sample(t, state_, w_r);
        energy_.add(t, s.power.total);
        loss_.add(t, s.power.loss);
        last_power_ = s.power.total;
        next_step_ = cfg_.stepper.initial_step;
    }
}

void MachineSim::regulate() {
    held_noise_ = wrsg::draw_equation_noise(cfg_.noise, rng_);
    if (!cfg_.avr_enabled || !trackers_[0].ready()) return;
    double ms = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double r = trackers_[k].rms();
        ms += r * r;
    }
    const control::AvrOutput out = control::avr_step(avr_, std::sqrt(ms / 3.0), cfg_.avr_dt);
    avr_ = out.state;
    V_fd_ = out.V_fd;
}

std::array<double, 6> MachineSim::rms() const {
    std::array<double, 6> out{};
    for (std::size_t k = 0; k < 6; ++k) out[k] = trackers_[k].rms();
    return out;
}

MachineSim::Span MachineSim::advance(double t0, double t1, double w_r) {
    if (w_r != w_r_) {
        w_r_ = w_r;
        for (auto& tr : trackers_) tr.set_window(2.0 * std::numbers::pi / w_r);
        const wrsg::ElectricalLoad now = cfg_.load.at(t0 + kSameTime, w_r);
        if (now.R != load_.R || now.L != load_.L) {
            state_ = wrsg::rebase_load(cfg_.params, state_, fault_, load_.L, now.L);
            load_ = now;
        }
    }
    energy_.reset();
    loss_.reset();

    // breakpoints: regulator ticks, fault and load events, the span end
    std::vector<double> marks;
    for (long long n = next_tick_; static_cast<double>(n) * cfg_.avr_dt < t1 - kSameTime; ++n)
        marks.push_back(static_cast<double>(n) * cfg_.avr_dt);
    for (std::size_t i = next_fault_; i < cfg_.faults.size(); ++i)
        if (cfg_.faults[i].time > t0 + kSameTime && cfg_.faults[i].time < t1 - kSameTime)
            marks.push_back(cfg_.faults[i].time);
    for (std::size_t i = next_load_; i < cfg_.load.steps.size(); ++i)
        if (cfg_.load.steps[i].time > t0 + kSameTime && cfg_.load.steps[i].time < t1 - kSameTime)
            marks.push_back(cfg_.load.steps[i].time);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end(), [](double a, double b) { return b - a < kSameTime; }),
                marks.end());
    marks.push_back(t1);

    const numerics::DerivFn f = [&](double, std::span<const double> y, std::span<double> dy) {
        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        const wrsg::WrsgState d = wrsg::machine_derivatives(cfg_.params, st, V_fd_, w_r, fault_, load_, held_noise_);
        std::copy(d.x.begin(), d.x.end(), dy.begin());
    };
    const numerics::StepObserver obs = [&](double t, std::span<const double> y) {
        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        observe(t, st, w_r, true, true);
    };

    double a = t0;
    for (double b : marks) {
        numerics::StepperOptions opts = cfg_.stepper;
        opts.initial_step = std::clamp(next_step_, opts.min_step, opts.max_step);
        auto res = numerics::integrate_adaptive(f, numerics::Vector(state_.x.begin(), state_.x.end()), a, b, opts,
                                                std::span(&obs, 1));
        std::copy(res.state.begin(), res.state.end(), state_.x.begin());
        next_step_ = res.trace.last_step;
        a = b;
        const long long tick = std::llround(b / cfg_.avr_dt);
        if (tick >= next_tick_ && std::abs(b - static_cast<double>(tick) * cfg_.avr_dt) < kSameTime) {
            regulate();
            next_tick_ = tick + 1;
        }
        apply_events(b, w_r);
    }
    state_ = wrsg::wrap_angle(state_);
    return {energy_.value(), loss_.value(), energy_};
}

}  // namespace apu::cosim::detail
