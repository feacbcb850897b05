#include "apu/scenario/output.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "apu/error.hpp"
#include "apu/wrsg/measure.hpp"

namespace apu::scenario {

namespace {

std::string fmt(const char* format, double x) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), format, x);
    return buf.data();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
    out << text;
    out.close();
    if (!out) throw Error(Errc::IoError, "failed writing " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

double parse_double(std::string_view field, std::size_t line) {
    const std::string s(field);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw Error(Errc::SchemaError, "csv line " + std::to_string(line) + ": expected number, found \"" + s + "\"");
    return v;
}

double interpolate(const std::vector<double>& t, const cosim::TimeSeries& s, std::size_t col, double at) {
    if (at <= t.front()) return s.at(0, col);
    if (at >= t.back()) return s.at(t.size() - 1, col);
    const std::size_t hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), at) - t.begin());
    const std::size_t lo = hi - 1;
    const double w = (at - t[lo]) / (t[hi] - t[lo]);
    return s.at(lo, col) + w * (s.at(hi, col) - s.at(lo, col));
}

nlohmann::ordered_json track_entry(const std::string& file, const cosim::TimeSeries& s) {
    nlohmann::ordered_json j;
    j["file"] = std::filesystem::path(file).filename().string();
    j["rows"] = s.size();
    j["channels"] = s.names();
    j["units"] = s.units();
    return j;
}

bool is_phase_name(const std::string& name) {
    return name.size() >= 2 && std::isupper(static_cast<unsigned char>(name[0])) &&
           (name[1] == 'a' || name[1] == 'b' || name[1] == 'c') &&
           (name.size() == 2 || !std::isalnum(static_cast<unsigned char>(name[2])));
}

std::string group_key(const std::string& name) {
    return is_phase_name(name) ? name.substr(0, 1) + "abc" + name.substr(2) : name;
}

std::string file_safe(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ? c : '_';
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

/// Indices kept for plotting: everything when short, otherwise the first, the
/// extremes of each bucket and the last sample, in time order.
std::vector<std::size_t> plot_indices(const std::vector<double>& v) {
    constexpr std::size_t kBuckets = 1500;
    std::vector<std::size_t> idx;
    if (v.size() <= 2 * kBuckets) {
        for (std::size_t i = 0; i < v.size(); ++i) idx.push_back(i);
        return idx;
    }
    idx.push_back(0);
    for (std::size_t b = 0; b < kBuckets; ++b) {
        const std::size_t lo = 1 + b * (v.size() - 2) / kBuckets;
        const std::size_t hi = 1 + (b + 1) * (v.size() - 2) / kBuckets;
        if (lo >= hi) continue;
        const auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  v.begin() + static_cast<std::ptrdiff_t>(hi));
        const std::size_t a = static_cast<std::size_t>(mn - v.begin());
        const std::size_t c = static_cast<std::size_t>(mx - v.begin());
        idx.push_back(std::min(a, c));
        if (a != c) idx.push_back(std::max(a, c));
    }
    idx.push_back(v.size() - 1);
    return idx;
}

}  // namespace

std::string csv_text(const cosim::TimeSeries& series) {
    std::string out = "time_s";
    for (std::size_t c = 0; c < series.width(); ++c) out += "," + series.names()[c] + "_" + series.units()[c];
    out += "\n";
    for (std::size_t r = 0; r < series.size(); ++r) {
        out += fmt("%.17g", series.time()[r]);
        for (double v : series.row(r)) out += "," + fmt("%.17g", v);
        out += "\n";
    }
    return out;
}

void write_csv(const cosim::TimeSeries& series, const std::string& path) { write_file(path, csv_text(series)); }

cosim::TimeSeries parse_csv(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw Error(Errc::SchemaError, "csv: missing header");
    const auto header = split(lines[0], ',');
    if (header[0] != "time_s") throw Error(Errc::SchemaError, "csv: first column must be time_s");
    std::vector<std::string> names, units;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::size_t us = header[c].rfind('_');
        if (us == std::string_view::npos)
            throw Error(Errc::SchemaError, "csv: column \"" + std::string(header[c]) + "\" has no unit");
        names.emplace_back(header[c].substr(0, us));
        units.emplace_back(header[c].substr(us + 1));
    }
    cosim::TimeSeries s(names, units);
    std::vector<double> row(names.size());
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto fields = split(lines[l], ',');
        if (fields.size() != header.size())
            throw Error(Errc::SchemaError, "csv line " + std::to_string(l + 1) + ": wrong field count");
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = parse_double(fields[c + 1], l + 1);
        s.append(parse_double(fields[0], l + 1), row);
    }
    return s;
}

cosim::TimeSeries read_csv(const std::string& path) { return parse_csv(read_file(path)); }

cosim::TimeSeries merged_view(const cosim::TimeSeries& fast, const cosim::TimeSeries& slow) {
    std::vector<std::string> names = slow.names(), units = slow.units();
    names.insert(names.end(), fast.names().begin(), fast.names().end());
    units.insert(units.end(), fast.units().begin(), fast.units().end());
    cosim::TimeSeries out(names, units);
    std::vector<double> row;
    for (std::size_t r = 0; r < slow.size(); ++r) {
        const auto s = slow.row(r);
        row.assign(s.begin(), s.end());
        for (std::size_t c = 0; c < fast.width(); ++c)
            row.push_back(fast.empty() ? std::nan("") : interpolate(fast.time(), fast, c, slow.time()[r]));
        out.append(slow.time()[r], row);
    }
    return out;
}

RunFiles write_run(const cosim::TimeSeries& fast, const cosim::TimeSeries& slow, const std::string& dir,
                   const std::string& stem, const std::string& extra_json, bool merged) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir + ": " + ec.message());
    const std::filesystem::path base(dir);
    RunFiles files;
    nlohmann::ordered_json manifest;
    manifest["stem"] = stem;
    if (fast.width() > 0) {
        files.fast = (base / (stem + "_fast.csv")).string();
        write_csv(fast, files.fast);
        manifest["fast"] = track_entry(files.fast, fast);
    }
    if (slow.width() > 0) {
        files.slow = (base / (stem + "_slow.csv")).string();
        write_csv(slow, files.slow);
        manifest["slow"] = track_entry(files.slow, slow);
    }
    if (merged && slow.width() > 0) {
        files.merged = (base / (stem + "_merged.csv")).string();
        const cosim::TimeSeries m = merged_view(fast, slow);
        write_csv(m, files.merged);
        manifest["merged"] = track_entry(files.merged, m);
    }
    if (!extra_json.empty()) {
        try {
            const nlohmann::ordered_json extra = nlohmann::ordered_json::parse(extra_json);
            for (const auto& [k, v] : extra.items()) manifest[k] = v;
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::SchemaError, std::string("manifest extra: ") + e.what());
        }
    }
    files.manifest = (base / (stem + "_manifest.json")).string();
    write_file(files.manifest, manifest.dump(2) + "\n");
    return files;
}

StationReport station_report(const gasgen::CycleSolution& solution, std::string title) {
    if (!(solution.newton_residual_norm < 1e-8) || !std::isfinite(solution.N) || solution.N <= 0.0)
        throw Error(Errc::NonConvergence, "cycle solution not converged (residual " +
                                              fmt("%.3g", solution.newton_residual_norm) + ")");
    struct Layout {
        gasgen::Channel channel;
        const char* description;
        const char* unit;
    };
    using C = gasgen::Channel;
    static const std::array<Layout, gasgen::kChannelCount> layout{{
        {C::XNHPC, "Rotor Speed", "r/min"},
        {C::PWSD, "Output Shaft Power", "kW"},
        {C::SFC, "Specific Fuel Consumption", "kg/(kW.h)"},
        {C::SNOx, "NOx Severity Factor", "/"},
        {C::HPCSM, "Compressor Stability Margin", "/"},
        {C::T1, "Inlet Total Temperature", "K"},
        {C::P1, "Inlet Total Pressure", "kPa"},
        {C::T2, "Compressor Inlet Total Temperature", "K"},
        {C::P2, "Compressor Inlet Total Pressure", "kPa"},
        {C::W2, "Compressor Inlet Flow Rate", "kg/s"},
        {C::T3, "Compressor Outlet Total Temperature", "K"},
        {C::P3, "Compressor Outlet Total Pressure", "kPa"},
        {C::Ps3, "Compressor Outlet Static Pressure", "kPa"},
        {C::W3, "Compressor Outlet Flow Rate", "kg/s"},
        {C::T4, "Combustion Chamber Outlet Total Temperature", "K"},
        {C::P4, "Combustion Chamber Outlet Total Pressure", "kPa"},
        {C::W4, "Combustion Chamber Outlet Flow Rate", "kg/s"},
        {C::T41, "Turbine Inlet Total Temperature", "K"},
        {C::W41, "Turbine Inlet Flow Rate", "kg/s"},
        {C::T5, "Turbine Outlet Total Temperature", "K"},
        {C::P5, "Turbine Outlet Total Pressure", "kPa"},
        {C::W5, "Turbine Outlet Flow Rate", "kg/s"},
        {C::T8, "Engine Outlet Total Temperature", "K"},
        {C::P8, "Engine Outlet Total Pressure", "kPa"},
        {C::W8, "Engine Outlet Flow Rate", "kg/s"},
    }};
    const gasgen::GasGenOutputs y = gasgen::project(solution);
    StationReport r{std::move(title), {}};
    for (const Layout& l : layout)
        r.rows.push_back({std::string(gasgen::channel_name(l.channel)), l.description, l.unit, y[l.channel]});
    return r;
}

StationReport generator_report(const cosim::TimeSeries& fast, double window, std::string title) {
    const std::vector<double>& t = fast.time();
    const std::array<std::vector<double>, 3> v{fast.column("Va"), fast.column("Vb"), fast.column("Vc")};
    const std::array<std::vector<double>, 3> i{fast.column("Ia"), fast.column("Ib"), fast.column("Ic")};
    auto line = [&](std::size_t a, std::size_t b) {
        std::vector<double> d(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) d[k] = v[a][k] - v[b][k];
        return wrsg::rms_window(t, d, window);
    };
    StationReport r{std::move(title), {}};
    const char* phase[] = {"A", "B", "C"};
    for (std::size_t p = 0; p < 3; ++p)
        r.rows.push_back({std::string("Phase ") + phase[p] + " Voltage", "", "V", wrsg::rms_window(t, v[p], window)});
    r.rows.push_back({"AB Line Voltage", "", "V", line(0, 1)});
    r.rows.push_back({"BC Line Voltage", "", "V", line(1, 2)});
    r.rows.push_back({"CA Line Voltage", "", "V", line(2, 0)});
    for (std::size_t p = 0; p < 3; ++p)
        r.rows.push_back({std::string("Phase ") + phase[p] + " Current", "", "A", wrsg::rms_window(t, i[p], window)});
    return r;
}

std::string render_text(const StationReport& report) {
    std::size_t wn = 9, wd = 11, wu = 4;
    bool has_description = false;
    for (const ReportRow& row : report.rows) {
        wn = std::max(wn, row.name.size());
        wd = std::max(wd, row.description.size());
        wu = std::max(wu, row.unit.size());
        has_description = has_description || !row.description.empty();
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size() + 2, ' '); };
    std::string out = report.title + "\n\n" + pad("Parameter", wn);
    if (has_description) out += pad("Description", wd);
    out += pad("Unit", wu) + "Value\n";
    for (const ReportRow& row : report.rows) {
        out += pad(row.name, wn);
        if (has_description) out += pad(row.description, wd);
        out += pad(row.unit, wu) + fmt("%.4f", row.value) + "\n";
    }
    return out;
}

std::string render_json(const StationReport& report) {
    nlohmann::ordered_json j;
    j["title"] = report.title;
    j["rows"] = nlohmann::ordered_json::array();
    for (const ReportRow& row : report.rows)
        j["rows"].push_back(
            {{"name", row.name}, {"description", row.description}, {"unit", row.unit}, {"value", row.value}});
    return j.dump(2) + "\n";
}

std::vector<std::vector<std::string>> channel_groups(const std::vector<std::string>& channels) {
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> groups;
    for (const std::string& c : channels) {
        const std::string key = group_key(c);
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            groups.push_back({c});
        } else {
            groups[static_cast<std::size_t>(it - keys.begin())].push_back(c);
        }
    }
    return groups;
}

std::string render_svg(const cosim::TimeSeries& series, const std::vector<std::string>& channels) {
    constexpr double W = 800, H = 420, left = 80, right = 20, top = 30, bottom = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    std::vector<std::vector<double>> cols;
    for (const std::string& c : channels) cols.push_back(series.column(c));
    const std::vector<double>& t = series.time();

    double t0 = t.empty() ? 0.0 : t.front(), t1 = t.empty() ? 1.0 : t.back();
    if (t1 <= t0) t1 = t0 + 1.0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : cols)
        for (double v : c)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(1.0, std::abs(hi) * 1e-3);
        lo -= pad;
        hi += pad;
    }
    const double pw = W - left - right, ph = H - top - bottom;
    auto X = [&](double x) { return left + (x - t0) / (t1 - t0) * pw; };
    auto Y = [&](double y) { return top + (hi - y) / (hi - lo) * ph; };

    const std::string unit = channels.empty() ? "" : series.units()[series.index(channels.front())];
    std::string title;
    for (const std::string& c : channels) title += (title.empty() ? "" : ", ") + c;

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"420\" "
         "viewBox=\"0 0 800 420\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"420\" fill=\"white\"/>\n";
    s += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", pw) +
         "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double tx = t0 + (t1 - t0) * k / 4.0, vy = lo + (hi - lo) * k / 4.0;
        s += "<line x1=\"" + fmt("%.2f", X(tx)) + "\" y1=\"" + fmt("%.2f", top + ph) + "\" x2=\"" + fmt("%.2f", X(tx)) +
             "\" y2=\"" + fmt("%.2f", top + ph + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.2f", X(tx)) + "\" y=\"" + fmt("%.2f", top + ph + 18) +
             "\" text-anchor=\"middle\">" + fmt("%.6g", tx) + "</text>\n";
        s += "<line x1=\"" + fmt("%.2f", left - 5) + "\" y1=\"" + fmt("%.2f", Y(vy)) + "\" x2=\"" + fmt("%.2f", left) +
             "\" y2=\"" + fmt("%.2f", Y(vy)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.2f", left - 8) + "\" y=\"" + fmt("%.2f", Y(vy) + 4) + "\" text-anchor=\"end\">" +
             fmt("%.6g", vy) + "</text>\n";
    }
    s += "<text x=\"" + fmt("%.2f", left + pw / 2) + "\" y=\"" + fmt("%.2f", H - 10) +
         "\" text-anchor=\"middle\">time [s]</text>\n";
    s += "<text transform=\"translate(16," + fmt("%.2f", top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(title + " [" + unit + "]") + "</text>\n";
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const char* color = colors[c % std::size(colors)];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1\" points=\"";
        bool first = true;
        for (std::size_t k : plot_indices(cols[c])) {
            if (!std::isfinite(cols[c][k])) continue;
            s += (first ? "" : " ") + fmt("%.2f", X(t[k])) + "," + fmt("%.2f", Y(cols[c][k]));
            first = false;
        }
        s += "\"/>\n";
        s += "<text x=\"" + fmt("%.2f", left + 10 + 90.0 * static_cast<double>(c)) + "\" y=\"" +
             fmt("%.2f", top - 10) + "\" fill=\"" + color + "\">" + xml_escape(channels[c]) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::string> emit_svg(const cosim::TimeSeries& series, const std::vector<std::string>& channels,
                                  const std::string& dir, const std::string& stem) {
    for (const std::string& c : channels) (void)series.index(c);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir + ": " + ec.message());
    std::vector<std::string> paths;
    for (const auto& group : channel_groups(channels)) {
        const std::string path =
            (std::filesystem::path(dir) / (stem + "_" + file_safe(group_key(group.front())) + ".svg")).string();
        write_file(path, render_svg(series, group));
        paths.push_back(path);
    }
    return paths;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace apu::scenario
