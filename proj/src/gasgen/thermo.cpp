#include "apu/gasgen/thermo.hpp"

#include <array>
#include <cmath>
#include <string>

#include "apu/error.hpp"

namespace apu::gasgen {

namespace {

// cp of dry air, kJ/(kg K), in z = T/1000
constexpr std::array<double, 9> kAir{0.992313, 0.236688, -1.852148, 6.083152, -8.893933,
                                     7.097112, -3.234725, 0.794571, -0.081873};
// products correction per unit fuel mass fraction
constexpr std::array<double, 8> kProducts{-0.718874, 8.747481, -15.863157, 17.254096,
                                          -10.233795, 3.081778, -0.361112,  -0.003919};
constexpr double kReference = 298.15;

template <std::size_t N>
double poly(const std::array<double, N>& c, double z) {
    double v = 0.0;
    for (std::size_t i = N; i-- > 0;) v = v * z + c[i];
    return v;
}

// integral of the polynomial from 0 to z
template <std::size_t N>
double poly_integral(const std::array<double, N>& c, double z) {
    double v = 0.0;
    for (std::size_t i = N; i-- > 0;) v = v * z + c[i] / static_cast<double>(i + 1);
    return v * z;
}

// integral of poly(z)/z, without the c0 ln z term
template <std::size_t N>
double poly_over_z_integral(const std::array<double, N>& c, double z) {
    double v = 0.0;
    for (std::size_t i = N; i-- > 1;) v = v * z + c[i] / static_cast<double>(i);
    return v * z;
}

double fuel_fraction(double far) { return far / (1.0 + far); }

double cp_raw(double T, double far) {
    const double z = T / 1000.0;
    return poly(kAir, z) + fuel_fraction(far) * poly(kProducts, z);
}

double h_raw(double T, double far) {
    const double z = T / 1000.0;
    const double zr = kReference / 1000.0;
    const double air = poly_integral(kAir, z) - poly_integral(kAir, zr);
    const double prod = poly_integral(kProducts, z) - poly_integral(kProducts, zr);
    return 1000.0 * (air + fuel_fraction(far) * prod);
}

double phi_raw(double T, double far) {
    const double z = T / 1000.0;
    const double air = kAir[0] * std::log(z) + poly_over_z_integral(kAir, z);
    const double prod = kProducts[0] * std::log(z) + poly_over_z_integral(kProducts, z);
    return air + fuel_fraction(far) * prod;
}

void check_range(double T) {
    if (!(T >= kMinTemperature && T <= kMaxTemperature))
        throw Error(Errc::TemperatureOutOfRange, "T=" + std::to_string(T) + " K outside [200, 2000] K");
}

// Newton on a monotone function g(T) with derivative dg(T), bounded to the table
template <class G, class D>
double invert(G g, D dg, double target, double far, const char* what) {
    const double lo = g(kMinTemperature, far);
    const double hi = g(kMaxTemperature, far);
    if (!(target >= lo && target <= hi))
        throw Error(Errc::TemperatureOutOfRange, std::string(what) + " outside the 200-2000 K table");
    double a = kMinTemperature, b = kMaxTemperature;
    double T = kMinTemperature + (target - lo) / (hi - lo) * (kMaxTemperature - kMinTemperature);
    for (int k = 0; k < 60; ++k) {
        const double r = g(T, far) - target;
        if (r > 0.0) b = T; else a = T;
        double next = T - r / dg(T, far);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - T) <= 1e-13 * T) return next;
        T = next;
    }
    return T;
}

}  // namespace

double specific_heat(double T, double far) {
    check_range(T);
    return cp_raw(T, far);
}

double enthalpy(double T, double far) {
    check_range(T);
    return h_raw(T, far);
}

double temperature_from_enthalpy(double h, double far) {
    return invert(h_raw, cp_raw, h, far, "enthalpy");
}

double entropy_function(double T, double far) {
    check_range(T);
    return phi_raw(T, far);
}

double temperature_from_entropy(double phi, double far) {
    return invert(phi_raw, [](double T, double f) { return cp_raw(T, f) / T; }, phi, far, "entropy function");
}

double heat_capacity_ratio(double T, double far) {
    const double cp = specific_heat(T, far);
    return cp / (cp - kGasConstant);
}

double isentropic_temperature(double T_in, double pr, double far) {
    return temperature_from_entropy(entropy_function(T_in, far) + kGasConstant * std::log(pr), far);
}

Ambient ambient_conditions(double altitude, double mach, double dT_isa, double intake_recovery) {
    if (!(altitude >= 0.0 && altitude <= 15000.0))
        throw Error(Errc::AltitudeOutOfRange, "altitude " + std::to_string(altitude) + " m outside [0, 15000]");
    if (!(mach >= 0.0 && mach < 1.0))
        throw Error(Errc::AltitudeOutOfRange, "Mach " + std::to_string(mach) + " outside [0, 1)");

    constexpr double kT0 = 288.15, kP0 = 101.325, kLapse = 0.0065, kG = 9.80665, kRair = 287.05287;
    constexpr double kTropopause = 11000.0;
    double T_std, P;
    if (altitude <= kTropopause) {
        T_std = kT0 - kLapse * altitude;
        P = kP0 * std::pow(T_std / kT0, kG / (kRair * kLapse));
    } else {
        const double T11 = kT0 - kLapse * kTropopause;
        const double P11 = kP0 * std::pow(T11 / kT0, kG / (kRair * kLapse));
        T_std = T11;
        P = P11 * std::exp(-kG * (altitude - kTropopause) / (kRair * T11));
    }

    Ambient amb;
    amb.T_static = T_std + dT_isa;
    amb.P_static = P;
    const double Ts = amb.T_static;
    amb.velocity = mach * std::sqrt(heat_capacity_ratio(Ts, 0.0) * kGasConstant * 1000.0 * Ts);
    const double Tt = temperature_from_enthalpy(enthalpy(Ts, 0.0) + 0.5e-3 * amb.velocity * amb.velocity, 0.0);
    const double Pt = P * std::exp((entropy_function(Tt, 0.0) - entropy_function(Ts, 0.0)) / kGasConstant);

    amb.station1 = GasState{0.0, Tt, P, 0.0};
    amb.station2 = GasState{0.0, Tt, Pt * intake_recovery, 0.0};
    return amb;
}

}  // namespace apu::gasgen
