#pragma once

#include <array>

namespace apu::wrsg {

using Vec3 = std::array<double, 3>;

/// Amplitude-invariant Park transform, q axis leading d, referenced to the
/// electrical rotor angle. A balanced set x_a = A cos(theta) maps to (A, 0, 0).
Vec3 park(const Vec3& abc, double theta);
Vec3 inverse_park(const Vec3& qd0, double theta);

/// First column of the forward transform: the qd0 image of a unit current in phase a alone.
Vec3 park_phase_a_column(double theta);

/// First row of the inverse transform: x_a = row . qd0.
Vec3 inverse_park_phase_a_row(double theta);

}  // namespace apu::wrsg
