#include "apu/error.hpp"

namespace apu {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::SingularJacobian: return "SingularJacobian";
        case Errc::NonFiniteResidual: return "NonFiniteResidual";
        case Errc::StepUnderflow: return "StepUnderflow";
        case Errc::NonFiniteDerivative: return "NonFiniteDerivative";
        case Errc::SingularMatrix: return "SingularMatrix";
        case Errc::TimeReversal: return "TimeReversal";
        case Errc::AltitudeOutOfRange: return "AltitudeOutOfRange";
        case Errc::TemperatureOutOfRange: return "TemperatureOutOfRange";
        case Errc::BetaOutOfRange: return "BetaOutOfRange";
        case Errc::T4OutOfRange: return "T4OutOfRange";
        case Errc::PressureRatioBelowUnity: return "PressureRatioBelowUnity";
        case Errc::CalibrationFailed: return "CalibrationFailed";
        case Errc::SpeedOutOfRange: return "SpeedOutOfRange";
        case Errc::NoSteadyState: return "NoSteadyState";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::WindowTooShort: return "WindowTooShort";
        case Errc::EmptyWindow: return "EmptyWindow";
        case Errc::SchemaError: return "SchemaError";
        case Errc::UnknownField: return "UnknownField";
        case Errc::UnknownChannel: return "UnknownChannel";
        case Errc::IoError: return "IoError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_numerical(Errc code) noexcept {
    switch (code) {
        case Errc::SchemaError:
        case Errc::UnknownField:
        case Errc::UnknownChannel:
        case Errc::IoError:
        case Errc::InvalidArgument:
        case Errc::AltitudeOutOfRange:
            return false;
        default:
            return true;
    }
}

}  // namespace apu
