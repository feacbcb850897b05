#include "apu/wrsg/park.hpp"

#include <cmath>
#include <numbers>

namespace apu::wrsg {

namespace {
constexpr double kShift = 2.0 * std::numbers::pi / 3.0;
}

Vec3 park(const Vec3& abc, double theta) {
    const double ca = std::cos(theta), cb = std::cos(theta - kShift), cc = std::cos(theta + kShift);
    const double sa = std::sin(theta), sb = std::sin(theta - kShift), sc = std::sin(theta + kShift);
    return {(2.0 / 3.0) * (ca * abc[0] + cb * abc[1] + cc * abc[2]),
            (2.0 / 3.0) * (sa * abc[0] + sb * abc[1] + sc * abc[2]),
            (abc[0] + abc[1] + abc[2]) / 3.0};
}

Vec3 inverse_park(const Vec3& qd0, double theta) {
    return {std::cos(theta) * qd0[0] + std::sin(theta) * qd0[1] + qd0[2],
            std::cos(theta - kShift) * qd0[0] + std::sin(theta - kShift) * qd0[1] + qd0[2],
            std::cos(theta + kShift) * qd0[0] + std::sin(theta + kShift) * qd0[1] + qd0[2]};
}

Vec3 park_phase_a_column(double theta) {
    return {(2.0 / 3.0) * std::cos(theta), (2.0 / 3.0) * std::sin(theta), 1.0 / 3.0};
}

Vec3 inverse_park_phase_a_row(double theta) { return {std::cos(theta), std::sin(theta), 1.0}; }

}  // namespace apu::wrsg
