#include "apu/cosim/series.hpp"

#include <algorithm>

#include "apu/error.hpp"

namespace apu::cosim {

TimeSeries::TimeSeries(std::vector<std::string> names, std::vector<std::string> units)
    : names_(std::move(names)), units_(std::move(units)) {
    if (names_.size() != units_.size()) throw Error(Errc::InvalidArgument, "channel names and units differ in count");
}

void TimeSeries::append(double t, std::span<const double> row) {
    if (row.size() != names_.size())
        throw Error(Errc::InvalidArgument, "row has " + std::to_string(row.size()) + " values for " +
                                               std::to_string(names_.size()) + " channels");
    if (!time_.empty() && !(t > time_.back()))
        throw Error(Errc::InvalidArgument, "time " + std::to_string(t) + " does not increase");
    time_.push_back(t);
    data_.insert(data_.end(), row.begin(), row.end());
}

std::size_t TimeSeries::index(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(Errc::UnknownChannel, name);
    return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> TimeSeries::column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out(time_.size());
    for (std::size_t r = 0; r < time_.size(); ++r) out[r] = at(r, c);
    return out;
}

}  // namespace apu::cosim
