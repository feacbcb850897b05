#include "apu/wrsg/measure.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "apu/error.hpp"

namespace apu::wrsg {

void NoiseConfig::validate() const {
    if (!(std_w1 >= 0.0 && std_w2 >= 0.0 && std_vi >= 0.0 && std_vv >= 0.0))
        throw Error(Errc::InvalidArgument, "noise standard deviations must be >= 0");
}

namespace {
double draw(double sd, std::mt19937_64& rng) {
    if (sd == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sd)(rng);
}
}  // namespace

Measurement measure(const std::array<double, 4>& v_abc_fd, const Vec3& i_abc, const NoiseConfig& noise,
                    std::mt19937_64& rng) {
    Measurement m;
    for (std::size_t k = 0; k < 3; ++k) m.v_abc[k] = v_abc_fd[k] + draw(noise.std_vv, rng);
    m.V_fd = v_abc_fd[3] + draw(noise.std_vv, rng);
    for (std::size_t k = 0; k < 3; ++k) m.i_abc[k] = i_abc[k] + draw(noise.std_vi, rng);
    return m;
}

EquationNoise draw_equation_noise(const NoiseConfig& noise, std::mt19937_64& rng) {
    EquationNoise w;
    for (auto& v : w.stator) v = draw(noise.std_w1, rng);
    for (auto& v : w.rotor) v = draw(noise.std_w2, rng);
    return w;
}

double rms_window(std::span<const double> times, std::span<const double> values, double window) {
    if (times.size() != values.size()) throw Error(Errc::InvalidArgument, "rms_window: size mismatch");
    if (!(window > 0.0)) throw Error(Errc::InvalidArgument, "rms_window: window must be > 0");
    const std::size_t n = times.size();
    if (n < 2 || times[n - 1] - times[0] < window * (1.0 - 1e-12))
        throw Error(Errc::WindowTooShort, "samples span " + std::to_string(n < 2 ? 0.0 : times[n - 1] - times[0]) +
                                              " s, window " + std::to_string(window) + " s");
    const double start = times[n - 1] - window;
    double acc = 0.0;
    for (std::size_t i = n - 1; i > 0; --i) {
        const double t0 = times[i - 1], t1 = times[i];
        const double y1 = values[i];
        if (t0 >= start) {
            acc += 0.5 * (values[i - 1] * values[i - 1] + y1 * y1) * (t1 - t0);
            continue;
        }
        if (t1 > start) {
            const double y0 = values[i - 1] + (values[i] - values[i - 1]) * (start - t0) / (t1 - t0);
            acc += 0.5 * (y0 * y0 + y1 * y1) * (t1 - start);
        }
        break;
    }
    return std::sqrt(acc / window);
}

void RmsTracker::push(double t, double value) {
    if (!times_.empty() && t < times_.back())
        throw Error(Errc::TimeReversal, "rms sample at t=" + std::to_string(t) + " precedes " +
                                            std::to_string(times_.back()));
    times_.push_back(t);
    values_.push_back(value);
    // keep one sample at or before the retention start
    while (times_.size() > 2 && times_[1] <= t - 2.0 * window_) {
        times_.pop_front();
        values_.pop_front();
    }
}

bool RmsTracker::ready() const {
    return times_.size() >= 2 && times_.back() - times_.front() >= window_ * (1.0 - 1e-12);
}

double RmsTracker::rms() const {
    const std::vector<double> t(times_.begin(), times_.end());
    const std::vector<double> v(values_.begin(), values_.end());
    return rms_window(t, v, window_);
}

}  // namespace apu::wrsg
