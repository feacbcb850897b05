#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "apu/cosim/cosim.hpp"

namespace apu::cosim::detail {

/// Generator plus load and voltage regulator advanced over arbitrary spans at
/// a held shaft speed. Accepted integrator steps feed the rms trackers, the
/// shaft-energy accumulators and the fast track.
class MachineSim {
public:
    MachineSim(const MachineConfig& config, double w_r0, std::uint64_t seed);

    struct Span {
        double energy = 0.0;       ///< kJ, generator shaft power integral
        double loss_energy = 0.0;  ///< kJ, fault-branch share
        numerics::IntegralAccumulator accumulator;
    };

    Span advance(double t0, double t1, double w_r);

    /// Phase rms values (Va, Vb, Vc, Ia, Ib, Ic) over the last electrical period.
    [[nodiscard]] std::array<double, 6> rms() const;
    [[nodiscard]] double V_fd() const { return V_fd_; }
    [[nodiscard]] double shaft_power() const { return last_power_; }
    [[nodiscard]] const wrsg::WrsgState& state() const { return state_; }
    [[nodiscard]] TimeSeries take_fast() { return std::move(fast_); }

    static std::vector<std::string> fast_names();
    static std::vector<std::string> fast_units();

private:
    struct Sample {
        wrsg::Terminal terminal;
        wrsg::MechPower power;
    };

    Sample sample(double t, const wrsg::WrsgState& s, double w_r) const;
    void observe(double t, const wrsg::WrsgState& s, double w_r, bool record, bool accumulate);
    void apply_events(double t, double w_r);
    void regulate();

    MachineConfig cfg_;
    wrsg::WrsgState state_;
    wrsg::FaultParams fault_;
    wrsg::ElectricalLoad load_;
    wrsg::EquationNoise held_noise_;
    control::AvrState avr_;
    double V_fd_ = 0.0;
    double w_r_ = 0.0;
    std::mt19937_64 rng_;
    std::vector<wrsg::RmsTracker> trackers_;
    TimeSeries fast_;
    numerics::IntegralAccumulator energy_;
    numerics::IntegralAccumulator loss_;
    double last_power_ = 0.0;
    double next_step_ = 1e-7;
    std::size_t accepted_ = 0;
    std::size_t next_fault_ = 0;
    std::size_t next_load_ = 0;
    long long next_tick_ = 1;
};

}  // namespace apu::cosim::detail
