#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "apu/control/regulators.hpp"
#include "apu/cosim/cosim.hpp"
#include "apu/error.hpp"
#include "apu/gasgen/gasgen.hpp"

using namespace apu;
using namespace apu::control;

namespace {

GovernorState design_governor() {
    GovernorState g;
    g.wf_ff = 0.0483;
    g.wf_prev = 0.0483;
    return g;
}

}  // namespace

TEST(Governor, ZeroErrorHoldsFeedForward) {
    GovernorState g = design_governor();
    for (int k = 0; k < 50; ++k) {
        const GovernorOutput o = governor_step(g, g.N_set, 0.02);
        EXPECT_EQ(o.wf, g.wf_ff);
        g = o.state;
    }
    EXPECT_EQ(g.integral, 0.0);
}

TEST(Governor, LowSpeedRaisesFuel) {
    const GovernorState g = design_governor();
    const GovernorOutput o = governor_step(g, 0.99 * g.N_set, 0.02);
    EXPECT_GT(o.wf, g.wf_ff);
    const GovernorOutput o2 = governor_step(o.state, 0.99 * g.N_set, 0.02);
    EXPECT_GT(o2.wf, o.wf);
    const GovernorOutput hi = governor_step(g, 1.01 * g.N_set, 0.02);
    EXPECT_LT(hi.wf, g.wf_ff);
}

TEST(Governor, OutputsStayWithinLimitsForRandomStreams) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> N(0.0, 80000.0), dt(1e-4, 0.1);
    GovernorState g = design_governor();
    double prev = g.wf_prev;
    for (int k = 0; k < 20000; ++k) {
        const double h = dt(rng);
        const GovernorOutput o = governor_step(g, N(rng), h);
        EXPECT_GE(o.wf, g.wf_min);
        EXPECT_LE(o.wf, g.wf_max);
        EXPECT_LE(std::abs(o.wf - prev), g.wf_rate * h * (1 + 1e-12));
        prev = o.wf;
        g = o.state;
    }
}

TEST(Governor, ZeroGainsGiveConstantOutput) {
    GovernorState g = design_governor();
    g.K_p = 0.0;
    g.K_i = 0.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> N(30000.0, 40000.0);
    for (int k = 0; k < 500; ++k) {
        const GovernorOutput o = governor_step(g, N(rng), 0.02);
        EXPECT_EQ(o.wf, g.wf_ff);
        g = o.state;
    }
}

TEST(Governor, AntiWindupRecoversOnSignChange) {
    GovernorState g = design_governor();
    g.wf_rate = 0.0;  // isolate the clamp
    for (int k = 0; k < 500; ++k) g = governor_step(g, 0.5 * g.N_set, 0.02).state;
    const GovernorOutput sat = governor_step(g, 0.5 * g.N_set, 0.02);
    EXPECT_EQ(sat.wf, g.wf_max);
    const GovernorOutput back = governor_step(sat.state, 1.001 * g.N_set, 0.02);
    EXPECT_LT(back.wf, g.wf_max);
}

TEST(Governor, RejectsNonPositiveStep) {
    EXPECT_THROW(governor_step(design_governor(), 36050.0, 0.0), Error);
}

TEST(Governor, ClosedLoopLoadStepRecovery) {
    const auto d = gasgen::design_point_size({});
    gasgen::GasGenInput u;
    u.wf = d.params.design_fuel_flow;
    const gasgen::HealthParams h;
    GovernorState g;
    g.wf_ff = u.wf;
    g.wf_prev = u.wf;
    gasgen::GasGenState x{36050.0};
    double last_outside = 0.0, peak = 0.0;
    for (int k = 1; k <= 400; ++k) {
        const double t = 0.02 * k;
        x = gasgen::state_update(d.params, x, u, h, 450.0, 0.02);  // step from 500 kW at t = 0
        const GovernorOutput o = governor_step(g, x.N, 0.02);
        g = o.state;
        u.wf = o.wf;
        peak = std::max(peak, x.N);
        if (std::abs(x.N - 36050.0) > 0.002 * 36050.0) last_outside = t;
    }
    EXPECT_GT(peak, 36050.0 * 1.002);
    EXPECT_LT(last_outside, 5.0);
    EXPECT_NEAR(x.N, 36050.0, 0.002 * 36050.0);
}

TEST(Avr, AtSetpointHoldsOutput) {
    AvrState a;
    a.V_fd_ff = 52.9;
    const AvrOutput o = avr_step(a, a.V_set, 1e-3);
    EXPECT_EQ(o.V_fd, a.V_fd_ff);
    EXPECT_EQ(o.state.integral, 0.0);
}

TEST(Avr, LowVoltageRaisesField) {
    AvrState a;
    a.V_fd_ff = 52.9;
    const AvrOutput o = avr_step(a, 220.0, 1e-3);
    EXPECT_GT(o.V_fd, a.V_fd_ff);
    EXPECT_LT(avr_step(a, 240.0, 1e-3).V_fd, a.V_fd_ff);
}

TEST(Avr, OutputsStayWithinLimitsForRandomStreams) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> v(0.0, 500.0);
    AvrState a;
    a.V_fd_ff = 52.9;
    for (int k = 0; k < 20000; ++k) {
        const AvrOutput o = avr_step(a, v(rng), 1e-3);
        EXPECT_GE(o.V_fd, 0.0);
        EXPECT_LE(o.V_fd, a.V_fd_max);
        a = o.state;
    }
}

TEST(Avr, ZeroGainsGiveConstantOutput) {
    AvrState a;
    a.K_p = 0.0;
    a.K_i = 0.0;
    a.V_fd_ff = 40.0;
    for (double v : {100.0, 230.0, 300.0}) EXPECT_EQ(avr_step(a, v, 1e-3).V_fd, 40.0);
}

TEST(Avr, AntiWindupRecoversOnSignChange) {
    AvrState a;
    a.V_fd_ff = 52.9;
    for (int k = 0; k < 5000; ++k) a = avr_step(a, 50.0, 1e-3).state;
    EXPECT_EQ(avr_step(a, 50.0, 1e-3).V_fd, a.V_fd_max);
    EXPECT_LT(avr_step(a, 231.0, 1e-3).V_fd, a.V_fd_max);
}

TEST(Avr, ClosedLoopLoadShedRecovery) {
    cosim::GeneratorRunConfig cfg;
    cfg.machine.load.steps = {{0.2, 100.0 / 225.0}};
    cfg.t_end = 1.0;
    cfg.report_dt = 0.01;
    const cosim::RunResult r = cosim::run_generator(cfg);
    const auto t = r.slow.time();
    const auto va = r.slow.column("Va_rms");
    double last_outside = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] > 0.2) peak = std::max(peak, va[k]);
        if (std::abs(va[k] - 230.0) > 2.3) last_outside = t[k];
    }
    EXPECT_GT(peak, 232.3);  // the shed does disturb the voltage
    EXPECT_LT(last_outside, 0.7);
    EXPECT_NEAR(va.back(), 230.0, 0.5);
}
