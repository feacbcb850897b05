#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "apu/control/regulators.hpp"
#include "apu/cosim/series.hpp"
#include "apu/gasgen/gasgen.hpp"
#include "apu/numerics/accumulator.hpp"
#include "apu/numerics/stepper.hpp"
#include "apu/wrsg/machine.hpp"
#include "apu/wrsg/measure.hpp"

namespace apu::cosim {

/// Power and speed transfer between the gas generator and the generator shaft.
struct CouplingParams {
    double eta = 1.0;                     ///< power-transfer efficiency
    double omega = 36050.0 / 12000.0;     ///< gas-generator rpm per generator rpm

    friend bool operator==(const CouplingParams&, const CouplingParams&) = default;

    void validate() const;
};

/// Shaft power (kW) the gas generator sees for the energy (kJ) accumulated
/// since `window_start`. Throws EmptyWindow when the accumulator has not
/// advanced past the window start.
double coupling_power(const numerics::IntegralAccumulator& acc, double window_start, double dt, double eta);

struct ShaftSpeed {
    double rpm = 0.0;         ///< generator shaft
    double electrical = 0.0;  ///< rad/s
};

ShaftSpeed coupling_speed(double gas_generator_rpm, double omega, int pole_pairs);

struct HealthEvent {
    double time = 0.0;
    gasgen::HealthParams health;

    friend bool operator==(const HealthEvent&, const HealthEvent&) = default;
};

struct FaultEvent {
    double time = 0.0;
    wrsg::FaultParams fault;

    friend bool operator==(const FaultEvent&, const FaultEvent&) = default;
};

struct FuelEvent {
    double time = 0.0;
    double scale = 1.0;  ///< multiplies the initial fuel flow

    friend bool operator==(const FuelEvent&, const FuelEvent&) = default;
};

/// Externally supplied map applied to the gas-generator state after each update.
using StateProcess = std::function<gasgen::GasGenState(const gasgen::GasGenState&, std::size_t macro_step)>;

/// Generator side of a run.
struct MachineConfig {
    wrsg::WrsgParams params;
    wrsg::LoadModel load = wrsg::LoadModel::resistive(225.0, 230.0);
    wrsg::FaultParams fault;
    std::vector<FaultEvent> faults;  ///< applied exactly at their times
    control::AvrState avr;
    bool avr_enabled = true;
    double avr_dt = 1e-3;            ///< s, regulator and equation-noise hold period
    numerics::StepperOptions stepper = default_stepper();
    wrsg::NoiseConfig noise;
    std::size_t record_every = 1;    ///< keep every n-th accepted step on the fast track

    static numerics::StepperOptions default_stepper();
    void validate() const;
};

struct CosimConfig {
    double macro_dt = 0.02;  ///< s
    double t_end = 1.0;      ///< s, a whole number of macro steps
    StateProcess hook;       ///< empty: disabled
    gasgen::OutputNoise output_noise;
    std::uint64_t seed = 0;

    void validate() const;
};

struct JointConfig {
    gasgen::GasGenParams gasgen;
    gasgen::GasGenInput ambient;  ///< flight condition; fuel flow is set by the governor
    gasgen::HealthParams health;
    std::vector<HealthEvent> health_events;  ///< applied at the first macro boundary at or after their time
    control::GovernorState governor;
    bool governor_enabled = true;
    MachineConfig machine;
    CouplingParams coupling;
    CosimConfig cosim;
};

struct GeneratorRunConfig {
    MachineConfig machine;
    double speed_rpm = 12000.0;  ///< generator shaft
    double report_dt = 0.02;     ///< s, slow-track row spacing
    double t_end = 0.5;
    std::uint64_t seed = 0;
};

struct GasGenRunConfig {
    gasgen::GasGenParams gasgen;
    gasgen::GasGenInput ambient;
    gasgen::HealthParams health;
    std::vector<HealthEvent> health_events;
    gasgen::LoadLaw load;
    double wf0 = 0.0;  ///< kg/s; zero trims to the load at design speed
    std::vector<FuelEvent> fuel_events;
    control::GovernorState governor;
    bool governor_enabled = false;
    CosimConfig cosim;
};

/// Energy handed across the coupling in one macro step.
struct CouplingRecord {
    double t0 = 0.0;
    double t1 = 0.0;
    double energy = 0.0;  ///< kJ, integral of the generator shaft power
    double Pe = 0.0;      ///< kW, power the gas generator was charged
};

struct AuditRecord {
    double t0 = 0.0;
    double t1 = 0.0;
    double energy = 0.0;    ///< kJ
    double transfer = 0.0;  ///< kJ, Pe * dt * eta
    double residual = 0.0;  ///< kJ, energy - transfer
};

struct EnergyAudit {
    std::vector<AuditRecord> records;
    double max_relative = 0.0;   ///< max |residual| / (Pe dt)
    double mean_relative = 0.0;
};

/// Per-step power balance residual with efficiency `eta`.
EnergyAudit energy_audit(const std::vector<CouplingRecord>& coupling, double eta);

struct RunResult {
    TimeSeries fast;  ///< generator waveforms at accepted integrator steps
    TimeSeries slow;  ///< gas-generator channels and generator rms values per macro step
    std::vector<CouplingRecord> coupling;
    EnergyAudit audit;
    gasgen::GasGenState gas_state;
    wrsg::WrsgState machine_state;
    double wf = 0.0;
    double V_fd = 0.0;
};

/// Joint run: per macro step the generator is integrated at held speed, its
/// shaft energy charges the gas generator, the spool is updated, the state
/// hook runs, the governor sets fuel and the new speed goes back to the
/// generator. Errors carry the macro-step index.
RunResult run_joint(const JointConfig& config);

/// Generator alone at a fixed shaft speed.
RunResult run_generator(const GeneratorRunConfig& config);

/// Gas generator alone against a shaft load law.
RunResult run_gasgen(const GasGenRunConfig& config);

}  // namespace apu::cosim
