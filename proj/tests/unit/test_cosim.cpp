#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "apu/cosim/cosim.hpp"
#include "apu/error.hpp"

using namespace apu;
using namespace apu::cosim;

namespace {

const gasgen::GasGenParams& sized() {
    static const gasgen::GasGenParams p = gasgen::design_point_size({}).params;
    return p;
}

JointConfig joint(double t_end) {
    JointConfig c;
    c.gasgen = sized();
    c.cosim.t_end = t_end;
    c.machine.record_every = 4;
    return c;
}

double max_rel_change(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::max(std::abs(*hi), 1e-300);
}

}  // namespace

TEST(Coupling, ConstantPower) {
    numerics::IntegralAccumulator acc(1.0, 450.0);
    acc.add(1.01, 450.0);
    acc.add(1.02, 450.0);
    EXPECT_NEAR(coupling_power(acc, 1.0, 0.02, 1.0), 450.0, 1e-9);
    EXPECT_NEAR(coupling_power(acc, 1.0, 0.02, 0.98), 459.18367346938777, 1e-9);
}

TEST(Coupling, RippleAveragesOut) {
    const double f = 400.0;
    numerics::IntegralAccumulator acc(0.0, 450.0);
    const int n = 8 * 64;
    for (int k = 1; k <= n; ++k) {
        const double t = 0.02 * k / n;
        acc.add(t, 450.0 + 30.0 * std::sin(2 * std::numbers::pi * f * t));
    }
    EXPECT_NEAR(coupling_power(acc, 0.0, 0.02, 1.0), 450.0, 1e-9);
}

TEST(Coupling, EmptyWindow) {
    numerics::IntegralAccumulator acc(0.5, 1.0);
    try {
        (void)coupling_power(acc, 0.5, 0.02, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyWindow);
    }
}

TEST(Coupling, SpeedTransfer) {
    const ShaftSpeed s = coupling_speed(36050.0, 36050.0 / 12000.0, 2);
    EXPECT_NEAR(s.rpm, 12000.0, 1e-9);
    EXPECT_NEAR(s.electrical, 2 * std::numbers::pi * 400.0, 1e-9);
    // ratio given to 5 decimals: half an ulp of that rounding is 0.02 rpm
    EXPECT_NEAR(coupling_speed(36050.0, 3.00417, 2).rpm, 12000.0, 0.02);
    EXPECT_EQ(coupling_speed(1234.5, 1.0, 1).rpm, 1234.5);
    EXPECT_EQ(coupling_speed(0.0, 3.0, 2).rpm, 0.0);
}

TEST(Audit, IdleRunHasZeroResidual) {
    const std::vector<CouplingRecord> c{{0.0, 0.02, 0.0, 0.0}, {0.02, 0.04, 0.0, 0.0}};
    const EnergyAudit a = energy_audit(c, 1.0);
    for (const auto& r : a.records) EXPECT_EQ(r.residual, 0.0);
    EXPECT_EQ(a.max_relative, 0.0);
}

TEST(Audit, MisSetEfficiencyScalesResidualLinearly) {
    const std::vector<CouplingRecord> c{{0.0, 0.02, 9.0, 450.0}};
    const double e1 = energy_audit(c, 0.99).records[0].residual;
    const double e2 = energy_audit(c, 0.98).records[0].residual;
    EXPECT_NEAR(e1, 0.01 * 9.0, 1e-12);
    EXPECT_NEAR(e2, 2.0 * e1, 1e-12);
    EXPECT_EQ(energy_audit(c, 1.0).records[0].residual, 0.0);
}

TEST(Series, AppendAndLookup) {
    TimeSeries s({"a", "b"}, {"V", "A"});
    const double r1[] = {1.0, 2.0};
    s.append(0.0, r1);
    EXPECT_THROW(s.append(0.0, r1), Error);
    const double bad[] = {1.0};
    EXPECT_THROW(s.append(1.0, bad), Error);
    s.append(0.5, r1);
    EXPECT_EQ(s.column("b"), (std::vector<double>{2.0, 2.0}));
    try {
        (void)s.index("c");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnknownChannel);
    }
}

TEST(Joint, SteadyDesignPersists) {
    const RunResult r = run_joint(joint(5.0));
    for (const std::string& ch : r.slow.names()) {
        if (ch == "Psg_loss") continue;
        EXPECT_LT(max_rel_change(r.slow.column(ch)), 1e-3) << ch;
    }
    EXPECT_LT(r.audit.max_relative, 1e-9);
    EXPECT_EQ(r.slow.size(), 251u);
}

TEST(Joint, IdentityHookIsTransparent) {
    JointConfig a = joint(0.4);
    a.machine.load.steps = {{0.1, 0.7}};
    JointConfig b = a;
    b.cosim.hook = [](const gasgen::GasGenState& x, std::size_t) { return x; };
    const RunResult ra = run_joint(a);
    const RunResult rb = run_joint(b);
    EXPECT_TRUE(ra.slow == rb.slow);
    EXPECT_TRUE(ra.fast == rb.fast);
}

TEST(Joint, SeededNoiseIsDeterministic) {
    JointConfig a = joint(0.2);
    a.machine.noise = {0.5, 0.2, 1.0, 1.0, 99};
    a.cosim.output_noise.std_dev.fill(0.01);
    a.cosim.seed = 5;
    const RunResult r1 = run_joint(a);
    const RunResult r2 = run_joint(a);
    EXPECT_TRUE(r1.slow == r2.slow);
    EXPECT_TRUE(r1.fast == r2.fast);
    a.cosim.seed = 6;
    EXPECT_FALSE(run_joint(a).slow == r1.slow);
}

TEST(Joint, FaultSwitchIsAtomic) {
    JointConfig c = joint(0.1);
    c.machine.record_every = 1;
    c.machine.faults = {{0.0512, {0.05, 1.0}}};
    const RunResult r = run_joint(c);
    const auto t = r.fast.time();
    const auto i_f = r.fast.column("If");
    bool any_after = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= 0.0512) {
            EXPECT_EQ(i_f[k], 0.0) << t[k];
        } else if (i_f[k] != 0.0) {
            any_after = true;
        }
    }
    EXPECT_TRUE(any_after);
    EXPECT_TRUE(std::find(t.begin(), t.end(), 0.0512) != t.end());
}

TEST(Joint, HalvingMacroStepBarelyMovesMachineRms) {
    JointConfig c = joint(1.0);
    c.machine.load.steps = {{0.4, 0.7}};
    JointConfig h = c;
    h.cosim.macro_dt = 0.01;
    const RunResult a = run_joint(c);
    const RunResult b = run_joint(h);
    for (const char* ch : {"Va_rms", "Vb_rms", "Vc_rms", "Ia_rms", "Ib_rms", "Ic_rms"}) {
        const auto va = a.slow.column(ch);
        const auto vb = b.slow.column(ch);
        for (std::size_t k = 0; k < va.size(); ++k)
            EXPECT_LT(std::abs(va[k] - vb[2 * k]) / vb[2 * k], 1e-3) << ch << " at " << a.slow.time()[k];
    }
}

TEST(Joint, ErrorsCarryTheMacroStep) {
    JointConfig c = joint(2.0);
    c.governor_enabled = false;
    c.machine.load.steps = {{0.02, 0.05}};
    try {
        (void)run_joint(c);
        FAIL() << "expected an overspeed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SpeedOutOfRange);
        EXPECT_NE(std::string(e.what()).find("macro step"), std::string::npos);
    }
}

TEST(Joint, RejectsRaggedEndTime) {
    JointConfig c = joint(0.05);
    c.cosim.t_end = 0.03;
    EXPECT_THROW(run_joint(c), Error);
}

TEST(GasGenRun, FuelStepApproachesNewSpeedMonotonically) {
    GasGenRunConfig c;
    c.gasgen = sized();
    c.health = {0.99, 0.97, 0.98, 1.04};
    c.load = {gasgen::LoadLaw::Kind::Cubic, 230.0, c.gasgen.design_speed};
    c.fuel_events = {{3.0, 1.1}};
    c.cosim.t_end = 10.0;
    const RunResult r = run_gasgen(c);
    const auto t = r.slow.time();
    const auto N = r.slow.column("XNHPC");
    double prev = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < 3.0) {
            EXPECT_NEAR(N[k], N[0], 1e-6 * N[0]);
        } else if (t[k] > 3.0) {
            EXPECT_GE(N[k], prev);
        }
        prev = N[k];
    }
    EXPECT_GT(N.back(), N[0] * 1.01);
    EXPECT_LT(N.back() - N[N.size() - 2], 1e-3 * (N.back() - N[0]));
}

TEST(Generator, FixedSpeedDesignLoad) {
    GeneratorRunConfig c;
    c.t_end = 0.2;
    const RunResult r = run_generator(c);
    EXPECT_NEAR(r.slow.column("Va_rms").back(), 230.0, 0.01);
    EXPECT_NEAR(r.slow.column("Ia_rms").back(), 230.0 / c.machine.load.R, 0.01);
    EXPECT_NEAR(r.slow.column("Psg_total").back(), 2.0 * 3 * 230.0 * 230.0 / c.machine.load.R / 0.95e3, 0.01);
}
