#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "apu/error.hpp"
#include "apu/numerics/accumulator.hpp"
#include "apu/numerics/dense.hpp"
#include "apu/numerics/newton.hpp"
#include "apu/numerics/stepper.hpp"

using namespace apu;
using namespace apu::numerics;

namespace {

DenseMatrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    DenseMatrix q(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector v(n);
        for (auto& x : v) x = nd(rng);
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * q(i, k);
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q(i, k);
        }
        const double nv = norm_2(v);
        for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
    }
    return q;
}

// Q1 * diag(s) * Q2 with singular values log-spaced between 1 and 1/cond
DenseMatrix conditioned_matrix(std::size_t n, double cond, std::mt19937_64& rng) {
    const DenseMatrix q1 = random_orthogonal(n, rng);
    const DenseMatrix q2 = random_orthogonal(n, rng);
    DenseMatrix a(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::pow(cond, -static_cast<double>(k) / static_cast<double>(n - 1));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) += q1(i, k) * s * q2(k, j);
    }
    return a;
}

}  // namespace

TEST(SolveDense, IdentityReturnsRhs) {
    const Vector b{1.5, -2.0, 3.25};
    const Vector x = solve_dense(DenseMatrix::identity(3), b);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(x[i], b[i]);
}

TEST(SolveDense, Diagonal) {
    DenseMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 4.0;
    const Vector x = solve_dense(a, Vector{2.0, 8.0});
    EXPECT_DOUBLE_EQ(x[0], 1.0);
    EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveDense, RecoversKnownSolution7x7) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix a(7, 7);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 7; ++j) a(i, j) = u(rng);
        a(i, i) += 4.0;
    }
    Vector x_known(7);
    for (auto& v : x_known) v = u(rng);
    const Vector b = a.multiply(x_known);
    const Vector x = solve_dense(a, b);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(x[i], x_known[i], 1e-10);
}

TEST(SolveDense, SingularMatrixReportsPivot) {
    DenseMatrix a(3, 3);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    a(2, 2) = 1.0;
    try {
        (void)solve_dense(a, Vector{1.0, 1.0, 1.0});
        FAIL() << "expected SingularMatrix";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SingularMatrix);
        EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
    }
}

TEST(SolveDense, ResidualPropertyUpToCondition1e6) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 15);
        const double cond = std::pow(10.0, (trial % 7));
        const DenseMatrix a = conditioned_matrix(n, cond, rng);
        Vector x_known(n);
        for (auto& v : x_known) v = u(rng);
        const Vector b = a.multiply(x_known);
        const Vector x = solve_dense(a, b);
        Vector r = a.multiply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= b[i];
        EXPECT_LT(norm_2(r) / norm_2(b), 1e-12) << "n=" << n << " cond=" << cond;
    }
}

TEST(Newton, LinearOneStep) {
    const auto res = newton_solve([](std::span<const double> x) { return Vector{x[0] - 3.0}; }, {0.0}, {});
    EXPECT_NEAR(res.x[0], 3.0, 1e-9);
    EXPECT_EQ(res.iterations, 1);
}

TEST(Newton, Quadratic) {
    const auto res =
        newton_solve([](std::span<const double> x) { return Vector{x[0] * x[0] - 4.0}; }, {3.0}, {});
    EXPECT_NEAR(res.x[0], 2.0, 1e-10);
    EXPECT_LT(res.residual_norm, 1e-10);
}

TEST(Newton, AffineSystemsConvergeInOneIteration) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const NewtonOptions opts;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        DenseMatrix a(n, n);
        Vector c(n), guess(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
            a(i, i) += 3.0;
            c[i] = 5.0 * u(rng);
            guess[i] = 5.0 * u(rng);
        }
        const auto fn = [&](std::span<const double> x) {
            Vector r = a.multiply(x);
            for (std::size_t i = 0; i < n; ++i) r[i] -= c[i];
            return r;
        };
        if (norm_inf(fn(guess)) < opts.relative_tolerance) continue;
        const auto res = newton_solve(fn, guess, opts);
        EXPECT_EQ(res.iterations, 1) << "trial " << trial;
    }
}

TEST(Newton, ResidualScalingMakesMixedUnitsCommensurate) {
    // second residual lives in kPa-sized units
    const auto fn = [](std::span<const double> x) {
        return Vector{x[0] - 1.0, 1000.0 * (x[1] - 2.0) + 0.0 * x[0]};
    };
    const Vector scale{1.0, 1000.0};
    const auto res = newton_solve(fn, {0.0, 0.0}, {}, scale);
    EXPECT_NEAR(res.x[1], 2.0, 1e-9);
}

TEST(Newton, NonConvergenceReported) {
    NewtonOptions opts;
    opts.max_iterations = 20;
    try {
        (void)newton_solve([](std::span<const double> x) { return Vector{x[0] * x[0] + 1.0}; }, {0.5}, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonConvergence);
    }
}

TEST(Newton, SingularJacobian) {
    const auto fn = [](std::span<const double> x) { return Vector{x[0] + x[1] - 1.0, 2.0 * (x[0] + x[1])}; };
    try {
        (void)newton_solve(fn, {0.0, 0.0}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SingularJacobian);
    }
}

TEST(Newton, NonFiniteResidualAtGuess) {
    try {
        (void)newton_solve([](std::span<const double> x) { return Vector{std::sqrt(x[0])}; }, {-1.0}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonFiniteResidual);
    }
}

TEST(Stepper, ConstantSolutionExact) {
    StepperOptions opts;
    const auto res = integrate_adaptive(
        [](double, std::span<const double>, std::span<double> d) { d[0] = 0.0; }, {5.0}, 0.0, 1.0, opts);
    EXPECT_EQ(res.state[0], 5.0);
    EXPECT_EQ(res.trace.times.back(), 1.0);
}

TEST(Stepper, StiffExponentialAgainstClosedForm) {
    StepperOptions opts;
    opts.relative_tolerance = 1e-6;
    opts.absolute_tolerance = {1e-16};
    const auto res = integrate_adaptive(
        [](double, std::span<const double> y, std::span<double> d) { d[0] = -1000.0 * y[0]; }, {1.0}, 0.0, 0.02,
        opts);
    const double exact = std::exp(-20.0);
    EXPECT_NEAR(exact, 2.061e-9, 1e-12);
    EXPECT_LT(std::abs(res.state[0] - exact) / exact, 10.0 * opts.relative_tolerance);
}

TEST(Stepper, HalvingToleranceNeverIncreasesError) {
    double previous = std::numeric_limits<double>::infinity();
    for (double rtol = 1e-3; rtol > 1e-9; rtol *= 0.5) {
        StepperOptions opts;
        opts.relative_tolerance = rtol;
        opts.absolute_tolerance = {1e-18};
        const auto res = integrate_adaptive(
            [](double, std::span<const double> y, std::span<double> d) { d[0] = -1000.0 * y[0]; }, {1.0}, 0.0,
            0.02, opts);
        const double err = std::abs(res.state[0] - std::exp(-20.0));
        EXPECT_LE(err, previous) << "rtol=" << rtol;
        previous = err;
    }
}

TEST(Stepper, AnalyticIntegralOfCosine) {
    StepperOptions opts;
    opts.relative_tolerance = 1e-8;
    opts.absolute_tolerance = {1e-10};
    const auto res = integrate_adaptive(
        [](double t, std::span<const double>, std::span<double> d) { d[0] = std::cos(t); }, {0.0}, 0.0,
        std::numbers::pi / 2.0, opts);
    EXPECT_NEAR(res.state[0], 1.0, 1e-6);
}

TEST(Stepper, ObserversSeeEveryAcceptedStep) {
    StepperOptions opts;
    opts.max_step = 0.01;
    int calls = 0;
    double last_t = 0.0;
    const std::vector<StepObserver> obs{[&](double t, std::span<const double>) {
        ++calls;
        EXPECT_GT(t, last_t);
        last_t = t;
    }};
    const auto res = integrate_adaptive(
        [](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; }, {1.0}, 0.0, 1.0, opts,
        obs);
    EXPECT_EQ(calls, res.trace.accepted);
    EXPECT_EQ(last_t, 1.0);
    EXPECT_GE(calls, 100);
}

TEST(Stepper, StiffSystemWithLargeSteps) {
    // y0' = -1e6 (y0 - cos t), y1' = -y1 : the stiff mode must not force tiny steps
    StepperOptions opts;
    opts.relative_tolerance = 1e-5;
    opts.absolute_tolerance = {1e-8};
    opts.max_step = 1.0;
    const auto res = integrate_adaptive(
        [](double t, std::span<const double> y, std::span<double> d) {
            d[0] = -1e6 * (y[0] - std::cos(t));
            d[1] = -y[1];
        },
        {1.0, 1.0}, 0.0, 2.0, opts);
    EXPECT_NEAR(res.state[0], std::cos(2.0), 1e-5);
    EXPECT_NEAR(res.state[1], std::exp(-2.0), 1e-4);
    EXPECT_LT(res.trace.accepted, 2000);
}

TEST(Stepper, NonFiniteDerivativeAtStart) {
    try {
        (void)integrate_adaptive(
            [](double, std::span<const double>, std::span<double> d) {
                d[0] = 0.0;
                d[1] = std::numeric_limits<double>::quiet_NaN();
            },
            {0.0, 0.0}, 0.0, 1.0, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonFiniteDerivative);
        EXPECT_NE(std::string(e.what()).find("channel 1"), std::string::npos);
    }
}

TEST(Stepper, StepUnderflowOnBlowUp) {
    StepperOptions opts;
    opts.min_step = 1e-6;
    try {
        // finite-time blow-up at t = 1
        (void)integrate_adaptive(
            [](double, std::span<const double> y, std::span<double> d) { d[0] = y[0] * y[0]; }, {1.0}, 0.0, 2.0,
            opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == Errc::StepUnderflow || e.code() == Errc::NonFiniteDerivative);
    }
}

TEST(Accumulator, ConstantPowerOverMacroStep) {
    IntegralAccumulator acc(0.0, 450.0);
    acc.add(0.01, 450.0);
    acc.add(0.02, 450.0);
    EXPECT_NEAR(acc.value(), 9.0, 1e-12);
}

TEST(Accumulator, LinearRampIsExact) {
    IntegralAccumulator acc(0.0, 0.0);
    acc.add(1.0, 100.0);
    EXPECT_DOUBLE_EQ(acc.value(), 50.0);
}

TEST(Accumulator, ZeroMeanSineOverOnePeriod) {
    const double f = 400.0;
    const double period = 1.0 / f;
    IntegralAccumulator acc(0.0, 0.0);
    for (int k = 1; k <= 100; ++k) {
        const double t = period * k / 100.0;
        acc.add(t, std::sin(2.0 * std::numbers::pi * f * t));
    }
    EXPECT_LT(std::abs(acc.value()), 1e-3 * 1.0 * period);
}

TEST(Accumulator, PiecewiseLinearExactAtBreakpoints) {
    // breakpoints (0,1) (0.3,4) (0.5,-2) (1.2,0): exact area by hand
    const double exact = 0.5 * (1 + 4) * 0.3 + 0.5 * (4 - 2) * 0.2 + 0.5 * (-2 + 0) * 0.7;
    IntegralAccumulator acc(0.0, 1.0);
    acc.add(0.3, 4.0);
    acc.add(0.5, -2.0);
    acc.add(1.2, 0.0);
    EXPECT_NEAR(acc.value(), exact, 1e-15);
}

TEST(Accumulator, ResetAndTimeReversal) {
    IntegralAccumulator acc(0.0, 2.0);
    acc = accumulate(acc, 1.0, 2.0);
    acc.reset();
    EXPECT_EQ(acc.value(), 0.0);
    EXPECT_EQ(acc.last_sample(), 2.0);
    acc.add(1.0, 3.0);  // zero-width sample switches the level
    EXPECT_EQ(acc.value(), 0.0);
    try {
        acc.add(0.5, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TimeReversal);
    }
}
