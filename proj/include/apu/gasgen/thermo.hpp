#pragma once

namespace apu::gasgen {

/// Specific gas constant of air and of lean kerosene products, kJ/(kg K).
inline constexpr double kGasConstant = 0.28705;

/// Flow state at one engine station.
struct GasState {
    double W = 0.0;    ///< mass flow, kg/s
    double Tt = 0.0;   ///< total temperature, K
    double Pt = 0.0;   ///< total pressure, kPa
    double FAR = 0.0;  ///< fuel-air ratio
};

inline constexpr double kMinTemperature = 200.0;
inline constexpr double kMaxTemperature = 2000.0;

// Working fluid: dry air plus lean kerosene combustion products. cp is a
// polynomial in T/1000 for air, with a products correction weighted by the
// fuel mass fraction FAR/(1+FAR). Because the weighting is the fuel mass
// fraction, the mass-weighted enthalpy of two streams equals the enthalpy of
// the mixture at the mixed FAR exactly.

/// Specific heat at constant pressure, kJ/(kg K).
double specific_heat(double T, double far);

/// Specific enthalpy relative to 298.15 K, kJ/kg. Throws TemperatureOutOfRange outside [200, 2000] K.
double enthalpy(double T, double far);

/// Inverse of enthalpy() by bounded Newton. Throws TemperatureOutOfRange when h lies outside the table.
double temperature_from_enthalpy(double h, double far);

/// Entropy function phi(T) = integral of cp/T dT, kJ/(kg K). Isentropic change:
/// phi(T2) - phi(T1) = R ln(P2/P1).
double entropy_function(double T, double far);

/// Inverse of entropy_function() by bounded Newton.
double temperature_from_entropy(double phi, double far);

/// cp/cv at temperature T.
double heat_capacity_ratio(double T, double far);

/// Isentropic outlet temperature for total pressure ratio `pr` from `T_in`.
double isentropic_temperature(double T_in, double pr, double far);

/// Flight and intake conditions.
struct Ambient {
    double T_static = 0.0;  ///< K
    double P_static = 0.0;  ///< kPa
    double velocity = 0.0;  ///< m/s
    GasState station1;      ///< total temperature, free-stream static pressure
    GasState station2;      ///< compressor face, after ram and intake recovery
};

/// ISA atmosphere with a temperature offset, ram rise to total conditions and
/// intake pressure recovery. Flow fields are left at zero.
/// Throws AltitudeOutOfRange outside [0, 15000] m or Mach outside [0, 1).
Ambient ambient_conditions(double altitude, double mach, double dT_isa, double intake_recovery = 0.99);

}  // namespace apu::gasgen
