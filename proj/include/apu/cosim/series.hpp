#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace apu::cosim {

/// Sampled channels on a strictly increasing time column, stored row-major.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<std::string> names, std::vector<std::string> units);

    /// Throws InvalidArgument on a width mismatch or a non-increasing time.
    void append(double t, std::span<const double> row);

    [[nodiscard]] std::size_t size() const { return time_.size(); }
    [[nodiscard]] std::size_t width() const { return names_.size(); }
    [[nodiscard]] bool empty() const { return time_.empty(); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] const std::vector<std::string>& units() const { return units_; }
    [[nodiscard]] const std::vector<double>& time() const { return time_; }
    [[nodiscard]] double at(std::size_t row, std::size_t col) const { return data_[row * names_.size() + col]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * names_.size(), names_.size()};
    }
    /// Index of a channel by name. Throws UnknownChannel.
    [[nodiscard]] std::size_t index(const std::string& name) const;
    [[nodiscard]] std::vector<double> column(const std::string& name) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<std::string> names_;
    std::vector<std::string> units_;
    std::vector<double> time_;
    std::vector<double> data_;
};

}  // namespace apu::cosim
