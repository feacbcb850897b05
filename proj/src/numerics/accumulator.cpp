#include "apu/numerics/accumulator.hpp"

#include <string>

#include "apu/error.hpp"

namespace apu::numerics {

void IntegralAccumulator::add(double t, double sample) {
    if (t < last_time_)
        throw Error(Errc::TimeReversal,
                    "sample at t=" + std::to_string(t) + " precedes " + std::to_string(last_time_));
    value_ += 0.5 * (sample + last_sample_) * (t - last_time_);
    last_time_ = t;
    last_sample_ = sample;
}

IntegralAccumulator accumulate(IntegralAccumulator acc, double t, double sample) {
    acc.add(t, sample);
    return acc;
}

}  // namespace apu::numerics
