#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apu/cosim/cosim.hpp"

namespace apu::scenario {

/// What a scenario runs: the coupled system, the gas generator against a
/// shaft load law, or the generator at a fixed shaft speed.
enum class Mode { Joint, GasGen, Generator };

std::string_view mode_name(Mode m);

struct Ambient {
    double altitude = 0.0;  ///< m
    double mach = 0.0;
    double dT_isa = 5.0;    ///< K

    friend bool operator==(const Ambient&, const Ambient&) = default;
};

/// Generator-side electrical load, sized by power at a phase voltage.
struct ElectricalLoadSpec {
    enum class Kind { Resistive, SeriesRL, Cubic };
    Kind kind = Kind::Resistive;
    double power = 225.0;    ///< kW at `voltage` (and rated speed for the cubic law)
    double voltage = 230.0;  ///< V rms, phase
    double inductance = 0.0; ///< H per phase, series-RL only
    std::vector<wrsg::LoadStep> steps;

    friend bool operator==(const ElectricalLoadSpec&, const ElectricalLoadSpec&) = default;
};

struct GovernorGains {
    bool enabled = true;
    double kp = 0.2;
    double ki = 1.0;
    double wf_min = 0.005;   ///< kg/s
    double wf_max = 0.08;    ///< kg/s
    double wf_rate = 0.05;   ///< kg/s^2
    double speed_setpoint = 36050.0;  ///< rpm

    friend bool operator==(const GovernorGains&, const GovernorGains&) = default;
};

struct AvrGains {
    bool enabled = true;
    double kp = 100.0;
    double ki = 4000.0;
    double vfd_max = 300.0;          ///< V
    double voltage_setpoint = 230.0; ///< V rms
    double period = 1e-3;            ///< s

    friend bool operator==(const AvrGains&, const AvrGains&) = default;
};

/// Channel subsets written out; empty keeps every channel.
struct OutputSelection {
    std::vector<std::string> fast;
    std::vector<std::string> slow;

    friend bool operator==(const OutputSelection&, const OutputSelection&) = default;
};

struct Scenario {
    std::string name = "design";
    Mode mode = Mode::Joint;
    double duration = 1.0;  ///< s, a whole number of macro steps
    double macro_dt = 0.02; ///< s
    std::uint64_t seed = 0;
    std::size_t record_every = 1;

    Ambient ambient;
    gasgen::GasGenDesignSpec design;
    gasgen::HealthParams health;
    std::vector<cosim::HealthEvent> health_events;

    // gas generator alone
    gasgen::LoadLaw shaft_load{gasgen::LoadLaw::Kind::Fixed, 500.0, 36050.0};
    double fuel_flow = 0.0;  ///< kg/s, zero trims to the shaft load
    std::vector<cosim::FuelEvent> fuel_events;

    // generator
    wrsg::WrsgParams machine;
    ElectricalLoadSpec load;
    wrsg::FaultParams fault;
    std::vector<cosim::FaultEvent> fault_events;
    double generator_speed = 12000.0;  ///< rpm, generator-alone runs

    GovernorGains governor;
    AvrGains avr;
    cosim::CouplingParams coupling;

    wrsg::NoiseConfig machine_noise;
    std::map<std::string, double> output_noise;  ///< gas channel -> standard deviation
    double state_noise = 0.0;                    ///< rpm, spool-speed noise added by the state hook

    OutputSelection outputs;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws SchemaError naming the offending field.
void validate(const Scenario& s);

/// Schema-checked JSON; absent fields keep their defaults. Throws SchemaError
/// and UnknownField with a JSON-pointer path.
Scenario parse_scenario(std::string_view text);

/// Full JSON document with every field present.
std::string serialize_scenario(const Scenario& s);

/// Names of the built-in presets: "design", "fuel-step", "joint-fault".
std::vector<std::string> preset_names();

/// Throws SchemaError for an unknown name.
Scenario preset(std::string_view name);

/// Reads and parses a scenario file. Throws IoError.
Scenario load_scenario_file(const std::string& path);

cosim::JointConfig joint_config(const Scenario& s, const gasgen::GasGenParams& sized);
cosim::GasGenRunConfig gasgen_config(const Scenario& s, const gasgen::GasGenParams& sized);
cosim::GeneratorRunConfig generator_config(const Scenario& s);

/// Spool-speed noise hook drawing from its own stream seeded by `seed`;
/// empty when `std_dev` is zero.
cosim::StateProcess speed_noise_hook(double std_dev, std::uint64_t seed);

struct RunOptions {
    cosim::StateProcess hook;                   ///< applied after the scenario's own state hook
    const gasgen::GasGenParams* sized = nullptr;  ///< reuse a sizing of `s.design`
};

/// Sizes the gas generator if the mode needs it and runs the scenario. A
/// zero-length run yields series with channels but no samples.
cosim::RunResult run(const Scenario& s, const RunOptions& options = {});

/// Keeps the named channels, in the given order. Throws UnknownChannel.
cosim::TimeSeries select(const cosim::TimeSeries& series, const std::vector<std::string>& channels);

struct Tracks {
    cosim::TimeSeries fast;
    cosim::TimeSeries slow;
};

/// The run's tracks reduced to the scenario's output selection.
Tracks selected(const Scenario& s, const cosim::RunResult& r);

}  // namespace apu::scenario
