#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "apu/cosim/cosim.hpp"
#include "apu/gasgen/gasgen.hpp"

namespace apu::scenario {

/// Header `time_s,<channel>_<unit>,...`, one row per sample, 17 significant
/// digits so a read reproduces every value exactly.
std::string csv_text(const cosim::TimeSeries& series);

/// Throws IoError.
void write_csv(const cosim::TimeSeries& series, const std::string& path);

/// Inverse of csv_text. Throws SchemaError on malformed content.
cosim::TimeSeries parse_csv(std::string_view text);

/// Throws IoError or SchemaError.
cosim::TimeSeries read_csv(const std::string& path);

/// Slow-track rows with every fast channel linearly interpolated onto them.
cosim::TimeSeries merged_view(const cosim::TimeSeries& fast, const cosim::TimeSeries& slow);

struct RunFiles {
    std::string fast;
    std::string slow;
    std::string merged;  ///< empty unless requested
    std::string manifest;
};

/// Writes `<stem>_fast.csv`, `<stem>_slow.csv` (and `<stem>_merged.csv`) plus
/// `<stem>_manifest.json` listing the files, their channels and row counts and
/// `extra` (a JSON object text, may be empty). Tracks with no channels are skipped.
RunFiles write_run(const cosim::TimeSeries& fast, const cosim::TimeSeries& slow, const std::string& dir,
                   const std::string& stem, const std::string& extra_json = {}, bool merged = false);

struct ReportRow {
    std::string name;
    std::string description;
    std::string unit;
    double value = 0.0;
};

struct StationReport {
    std::string title;
    std::vector<ReportRow> rows;
};

/// Gas-path report in the design-point table layout. Throws NonConvergence
/// for an unconverged solution.
StationReport station_report(const gasgen::CycleSolution& solution, std::string title);

/// Phase and line voltage rms and phase current rms over the final `window`
/// seconds of a fast track (channels Va..Ic).
StationReport generator_report(const cosim::TimeSeries& fast, double window, std::string title);

/// Aligned text table with four decimals.
std::string render_text(const StationReport& report);

std::string render_json(const StationReport& report);

/// Channels plotted together: the three phases of one quantity share a plot,
/// every other channel is plotted alone. Order follows first appearance.
std::vector<std::vector<std::string>> channel_groups(const std::vector<std::string>& channels);

/// SVG 1.1 line plot of the given channels against time. Throws UnknownChannel.
std::string render_svg(const cosim::TimeSeries& series, const std::vector<std::string>& channels);

/// One `<stem>_<group>.svg` per channel group; returns the paths written.
std::vector<std::string> emit_svg(const cosim::TimeSeries& series, const std::vector<std::string>& channels,
                                  const std::string& dir, const std::string& stem);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace apu::scenario
