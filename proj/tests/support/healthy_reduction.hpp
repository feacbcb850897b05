#pragma once

// Healthy multi-loop model against the classic current-state dq0 oracle over
// a 0.5 s transient: from the 225 kW steady state, the load drops to 100 kW
// and the field voltage rises 10 % at t = 0.

#include <algorithm>
#include <array>
#include <cmath>

#include "apu/numerics/stepper.hpp"
#include "apu/wrsg/machine.hpp"
#include "oracles/classic_dq0.hpp"

namespace support {

struct ReductionResult {
    double max_relative_error = 0.0;  ///< worst channel, sup-norm relative to that channel's peak
    int worst_channel = -1;           ///< 0..4 currents q d fd kd kq, 5..9 fluxes
};

inline ReductionResult healthy_reduction(double duration = 0.5, double sample_dt = 1e-3, double rk4_step = 5e-7) {
    using namespace apu;
    const wrsg::WrsgParams p;
    const double w = p.rated_electrical_speed();
    const wrsg::ElectricalLoad heavy{3.0 * 230.0 * 230.0 / 225e3, 0.0};
    const wrsg::ElectricalLoad light{3.0 * 230.0 * 230.0 / 100e3, 0.0};
    const double vfd0 = wrsg::field_voltage_for(p, 230.0, w, heavy);
    const double vfd = 1.1 * vfd0;
    const wrsg::FaultParams healthy{};
    const wrsg::WrsgState x0 = wrsg::steady_state(p, vfd0, w, heavy);

    const oracle::ClassicMachine m{p.r_s, p.L_ls, p.L_md, p.L_mq, p.r_fd, p.L_lf, p.r_kd, p.L_lkd, p.r_kq, p.L_lkq};
    const wrsg::Currents c0 = wrsg::currents_from_flux(x0, healthy, wrsg::build_L(p, 0.0), p);
    oracle::Currents5 io{c0.stator[0], c0.stator[1], c0.rotor[0], c0.rotor[1], c0.rotor[2]};

    numerics::StepperOptions opts;
    opts.relative_tolerance = 1e-11;
    opts.absolute_tolerance = {1e-13};
    opts.initial_step = 1e-8;
    opts.max_step = 1e-4;
    const numerics::DerivFn f = [&](double, std::span<const double> y, std::span<double> dy) {
        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        const wrsg::WrsgState d = wrsg::machine_derivatives(p, st, vfd, w, healthy, light);
        std::copy(d.x.begin(), d.x.end(), dy.begin());
    };

    const auto n = static_cast<std::size_t>(std::llround(duration / sample_dt));
    const auto sub = static_cast<std::size_t>(std::llround(sample_dt / rk4_step));
    std::array<double, 10> peak{}, err{};
    numerics::Vector y(x0.x.begin(), x0.x.end());
    for (std::size_t k = 0; k < n; ++k) {
        auto res = numerics::integrate_adaptive(f, y, k * sample_dt, (k + 1) * sample_dt, opts);
        y = std::move(res.state);
        opts.initial_step = std::max(res.trace.last_step, 1e-9);
        for (std::size_t j = 0; j < sub; ++j) io = oracle::rk4_step(m, io, rk4_step, w, light.R, vfd);

        wrsg::WrsgState st;
        std::copy(y.begin(), y.end(), st.x.begin());
        const wrsg::Currents c = wrsg::currents_from_flux(st, healthy, wrsg::build_L(p, st.theta()), p);
        const oracle::ClassicFluxes psi = oracle::fluxes(m, io);
        const std::array<double, 10> model{c.stator[0], c.stator[1], c.rotor[0], c.rotor[1], c.rotor[2],
                                           st.x[0],     st.x[1],     st.x[3],    st.x[4],    st.x[5]};
        const std::array<double, 10> ref{io[0], io[1], io[2], io[3], io[4], psi.q, psi.d, psi.fd, psi.kd, psi.kq};
        for (std::size_t ch = 0; ch < 10; ++ch) {
            peak[ch] = std::max(peak[ch], std::abs(ref[ch]));
            err[ch] = std::max(err[ch], std::abs(model[ch] - ref[ch]));
        }
    }
    ReductionResult r;
    for (std::size_t ch = 0; ch < 10; ++ch) {
        const double rel = err[ch] / peak[ch];
        if (rel > r.max_relative_error) {
            r.max_relative_error = rel;
            r.worst_channel = static_cast<int>(ch);
        }
    }
    return r;
}

}  // namespace support
