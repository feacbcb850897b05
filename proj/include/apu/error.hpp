#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apu {

enum class Errc {
    // numerics
    NonConvergence,
    SingularJacobian,
    NonFiniteResidual,
    StepUnderflow,
    NonFiniteDerivative,
    SingularMatrix,
    TimeReversal,
    // gas generator
    AltitudeOutOfRange,
    TemperatureOutOfRange,
    BetaOutOfRange,
    T4OutOfRange,
    PressureRatioBelowUnity,
    CalibrationFailed,
    SpeedOutOfRange,
    NoSteadyState,
    // machine
    SingularSystem,
    WindowTooShort,
    // coupling
    EmptyWindow,
    // scenario / io
    SchemaError,
    UnknownField,
    UnknownChannel,
    IoError,
    InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

/// True for failures of the numerical machinery (CLI exit code 2); false for
/// usage, validation and I/O problems (exit code 1).
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace apu
