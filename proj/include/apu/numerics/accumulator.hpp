#pragma once

namespace apu::numerics {

/// Running trapezoidal time integral of a sampled signal.
class IntegralAccumulator {
public:
    IntegralAccumulator() = default;
    IntegralAccumulator(double t0, double sample0) : last_time_(t0), last_sample_(sample0) {}

    /// value += 0.5 * (sample + last_sample) * (t - last_time). Throws TimeReversal when t < last_time.
    void add(double t, double sample);

    /// Clears the integral to exactly 0; the last sample is kept as the left end
    /// of the next trapezoid.
    void reset() noexcept { value_ = 0.0; }

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] double last_time() const noexcept { return last_time_; }
    [[nodiscard]] double last_sample() const noexcept { return last_sample_; }

private:
    double value_ = 0.0;
    double last_time_ = 0.0;
    double last_sample_ = 0.0;
};

[[nodiscard]] IntegralAccumulator accumulate(IntegralAccumulator acc, double t, double sample);

}  // namespace apu::numerics
