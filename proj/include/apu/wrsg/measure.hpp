#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>

#include "apu/wrsg/machine.hpp"

namespace apu::wrsg {

/// Standard deviations of the equation and measurement noise. Zero entries draw nothing.
struct NoiseConfig {
    double std_w1 = 0.0;  ///< V, stator equations
    double std_w2 = 0.0;  ///< V, rotor equations
    double std_vi = 0.0;  ///< A, current measurement
    double std_vv = 0.0;  ///< V, voltage measurement
    std::uint64_t seed = 0;

    [[nodiscard]] bool silent() const { return std_w1 == 0.0 && std_w2 == 0.0 && std_vi == 0.0 && std_vv == 0.0; }
    void validate() const;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct Measurement {
    Vec3 v_abc{};
    double V_fd = 0.0;
    Vec3 i_abc{};
};

/// Terminal voltages (phases a, b, c, then field) and phase currents plus
/// zero-mean Gaussian measurement noise.
Measurement measure(const std::array<double, 4>& v_abc_fd, const Vec3& i_abc, const NoiseConfig& noise,
                    std::mt19937_64& rng);

EquationNoise draw_equation_noise(const NoiseConfig& noise, std::mt19937_64& rng);

/// RMS over the trailing `window` seconds of (time, value) samples, trapezoidal
/// weighting, the window start interpolated linearly. Throws WindowTooShort
/// when the samples span less than the window.
double rms_window(std::span<const double> times, std::span<const double> values, double window);

/// Streaming form of rms_window for one channel. Samples covering twice the
/// window are retained so the window can be retuned to a new period.
class RmsTracker {
public:
    explicit RmsTracker(double window) : window_(window) {}

    void set_window(double window) { window_ = window; }

    /// Samples must arrive in non-decreasing time.
    void push(double t, double value);
    [[nodiscard]] bool ready() const;
    /// Throws WindowTooShort before a full window has been seen.
    [[nodiscard]] double rms() const;
    [[nodiscard]] double window() const { return window_; }

private:
    double window_;
    std::deque<double> times_;
    std::deque<double> values_;
};

}  // namespace apu::wrsg
