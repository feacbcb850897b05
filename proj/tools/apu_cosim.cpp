#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "apu/error.hpp"
#include "apu/scenario/output.hpp"
#include "apu/scenario/scenario.hpp"
#include "batch.hpp"

using namespace apu;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

/// Flags shared by every subcommand.
struct Common {
    std::string scenario_path;
    std::string preset;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::size_t runs = 1;
    std::optional<double> macro_dt;
    bool json = false;
    bool svg = true;
    CLI::Option* svg_option = nullptr;
    bool merged = false;
};

void add_common(CLI::App* sub, Common& c, bool with_runs) {
    auto* scen = sub->add_option("--scenario", c.scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
    auto* pre = sub->add_option("--preset", c.preset, "Built-in scenario: design, fuel-step, joint-fault");
    scen->excludes(pre);
    sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed override");
    sub->add_option("--macro-dt", c.macro_dt, "Macro step override, s")->check(CLI::PositiveNumber);
    sub->add_flag("--json", c.json, "Machine-readable summary on stdout");
    c.svg_option = sub->add_flag("--svg,!--no-svg", c.svg, "Quick-look SVG plots");
    sub->add_flag("--merged", c.merged, "Also write the slow grid with fast channels interpolated");
    if (with_runs) sub->add_option("--runs", c.runs, "Batch size")->check(CLI::PositiveNumber);
}

scenario::Scenario resolve(const Common& c, const std::string& default_preset, scenario::Mode mode) {
    scenario::Scenario s = !c.scenario_path.empty() ? scenario::load_scenario_file(c.scenario_path)
                                                    : scenario::preset(c.preset.empty() ? default_preset : c.preset);
    s.mode = mode;
    if (c.seed) s.seed = *c.seed;
    if (c.macro_dt) s.macro_dt = *c.macro_dt;
    return s;
}

std::string num(double x, const char* format = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

std::string hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Writes the run's tracks, manifest and plots; returns the manifest entries.
ordered_json write_outputs(const scenario::Scenario& s, const cosim::RunResult& r, const std::string& dir,
                           const std::string& stem, bool svg, bool merged) {
    const scenario::Tracks t = scenario::selected(s, r);
    ordered_json extra;
    extra["scenario"] = ordered_json::parse(scenario::serialize_scenario(s));
    extra["seed"] = s.seed;
    if (t.fast.width() > 0) extra["fast_fnv1a"] = hex(scenario::fnv1a(scenario::csv_text(t.fast)));
    extra["slow_fnv1a"] = hex(scenario::fnv1a(scenario::csv_text(t.slow)));
    if (!r.coupling.empty() && s.mode == scenario::Mode::Joint)
        extra["audit"] = {{"max_relative", r.audit.max_relative}, {"mean_relative", r.audit.mean_relative}};
    const scenario::RunFiles files = scenario::write_run(t.fast, t.slow, dir, stem, extra.dump(), merged);
    ordered_json j;
    if (!files.fast.empty()) j["fast"] = files.fast;
    j["slow"] = files.slow;
    if (!files.merged.empty()) j["merged"] = files.merged;
    j["manifest"] = files.manifest;
    if (svg) {
        ordered_json plots = ordered_json::array();
        if (!t.fast.empty())
            for (const auto& p : scenario::emit_svg(t.fast, t.fast.names(), dir, stem + "_fast")) plots.push_back(p);
        if (!t.slow.empty())
            for (const auto& p : scenario::emit_svg(t.slow, t.slow.names(), dir, stem + "_slow")) plots.push_back(p);
        j["svg"] = plots;
    }
    return j;
}

double last(const cosim::TimeSeries& s, const std::string& ch) {
    const auto col = s.column(ch);
    return col.empty() ? std::nan("") : col.back();
}

/// Runs one scenario or a batch and hands each single-run summary to `describe`.
int execute(const Common& c, const scenario::Scenario& s, const scenario::RunOptions& options,
            const std::function<ordered_json(const scenario::Scenario&, const cosim::RunResult&)>& describe,
            const std::function<std::string(const ordered_json&)>& render, const std::function<bool(const ordered_json&)>& ok) {
    if (c.runs == 1) {
        const cosim::RunResult r = scenario::run(s, options);
        ordered_json summary = describe(s, r);
        summary["files"] = write_outputs(s, r, c.out_dir, s.name, c.svg, c.merged);
        if (c.json)
            std::cout << summary.dump(2) << "\n";
        else
            std::cout << render(summary);
        return ok(summary) ? kExitOk : kExitNumerical;
    }

    const bool svg = c.svg_option->count() > 0 && c.svg;
    const int workers = batch::worker_count();
    std::vector<ordered_json> rows(c.runs);
    const batch::BatchOutcome outcome = batch::run_batch(
        s, c.runs, workers,
        [&](std::size_t k, const scenario::Scenario& run_s, const cosim::RunResult& r) {
            ordered_json row = describe(run_s, r);
            char stem[64];
            std::snprintf(stem, sizeof stem, "_run%04zu", k);
            row["files"] = write_outputs(run_s, r, c.out_dir, s.name + stem, svg, c.merged);
            rows[k] = std::move(row);
        },
        options);

    ordered_json summary;
    summary["scenario"] = s.name;
    summary["runs"] = c.runs;
    summary["workers"] = workers;
    summary["base_seed"] = s.seed;
    ordered_json runs = ordered_json::array();
    std::size_t failed = 0;
    bool all_ok = true;
    for (std::size_t k = 0; k < c.runs; ++k) {
        if (outcome.errors[k]) {
            ++failed;
            runs.push_back({{"run", k}, {"error", outcome.errors[k]->message}});
        } else {
            ordered_json row = rows[k];
            row["run"] = k;
            all_ok = all_ok && ok(row);
            runs.push_back(std::move(row));
        }
    }
    summary["failed"] = failed;

    // merged statistics over the numeric fields of the successful runs
    ordered_json stats;
    std::string csv = "run,seed";
    std::vector<std::string> keys;
    for (std::size_t k = 0; k < c.runs; ++k)
        if (!outcome.errors[k]) {
            for (const auto& [key, v] : rows[k].items())
                if (v.is_number_float()) keys.push_back(key);
            break;
        }
    for (const auto& key : keys) csv += "," + key;
    csv += "\n";
    for (std::size_t k = 0; k < c.runs; ++k) {
        if (outcome.errors[k]) continue;
        csv += std::to_string(k) + "," + std::to_string(batch::run_seed(s.seed, k));
        for (const auto& key : keys) csv += "," + num(rows[k][key].get<double>(), "%.17g");
        csv += "\n";
    }
    for (const auto& key : keys) {
        double sum = 0.0, sq = 0.0, lo = INFINITY, hi = -INFINITY;
        std::size_t n = 0;
        for (std::size_t k = 0; k < c.runs; ++k) {
            if (outcome.errors[k]) continue;
            const double v = rows[k][key].get<double>();
            sum += v;
            sq += v * v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++n;
        }
        const double mean = n ? sum / static_cast<double>(n) : std::nan("");
        const double var = n > 1 ? std::max(0.0, (sq - sum * mean) / static_cast<double>(n - 1)) : 0.0;
        stats[key] = {{"mean", mean}, {"std", std::sqrt(var)}, {"min", lo}, {"max", hi}};
    }
    summary["statistics"] = stats;
    std::filesystem::create_directories(c.out_dir);
    const std::string table = (std::filesystem::path(c.out_dir) / (s.name + "_batch.csv")).string();
    {
        std::ofstream f(table, std::ios::binary);
        if (!f) throw Error(Errc::IoError, "cannot write " + table);
        f << csv;
    }
    summary["table"] = table;
    if (c.json) {
        summary["per_run"] = runs;
        std::cout << summary.dump(2) << "\n";
    } else {
        std::cout << "batch " << s.name << ": " << c.runs << " runs on " << workers << " workers, " << failed
                  << " failed\n";
        for (const auto& [key, st] : stats.items())
            std::cout << "  " << key << ": mean " << num(st["mean"].get<double>(), "%.6g") << "  std "
                      << num(st["std"].get<double>(), "%.3g") << "  [" << num(st["min"].get<double>(), "%.6g")
                      << ", " << num(st["max"].get<double>(), "%.6g") << "]\n";
        std::cout << "  table: " << table << "\n";
    }
    if (const batch::RunError* e = outcome.first_error()) {
        std::cerr << "error: run " << e->index << ": " << e->message << "\n";
        return e->numerical ? kExitNumerical : kExitUsage;
    }
    return all_ok ? kExitOk : kExitNumerical;
}

std::string files_text(const ordered_json& summary) {
    std::string out;
    for (const auto& [k, v] : summary["files"].items()) {
        if (v.is_string()) out += "  " + k + ": " + v.get<std::string>() + "\n";
        if (v.is_array()) out += "  " + k + ": " + std::to_string(v.size()) + " files\n";
    }
    return out;
}

std::string design_title(const gasgen::GasGenDesignSpec& d) {
    return "Design point: " + num(d.altitude / 1000.0, "%g") + "km " + num(d.mach, "%g") + "Ma " +
           num(d.shaft_power, "%g") + "kW";
}

// design ---------------------------------------------------------------------

struct DesignFlags {
    Common common;
    std::optional<double> shaft_power, pressure_ratio, T4, W2, fuel_flow, design_speed, eta_c, eta_t;
};

int cmd_design(const DesignFlags& f) {
    scenario::Scenario s = resolve(f.common, "design", scenario::Mode::Joint);
    gasgen::GasGenDesignSpec& d = s.design;
    if (f.shaft_power) d.shaft_power = *f.shaft_power;
    if (f.pressure_ratio) d.pressure_ratio = *f.pressure_ratio;
    if (f.T4) d.T4 = *f.T4;
    if (f.W2) d.W2 = *f.W2;
    if (f.fuel_flow) d.fuel_flow = *f.fuel_flow;
    if (f.design_speed) d.design_speed = *f.design_speed;
    if (f.eta_c) d.eta_compressor = *f.eta_c;
    if (f.eta_t) d.eta_turbine = *f.eta_t;
    const gasgen::DesignResult r = gasgen::design_point_size(d);
    const scenario::StationReport rep = scenario::station_report(r.solution, design_title(d));
    const double mass = gasgen::mass_closure_error(r.solution);
    const double energy = gasgen::energy_closure_error(r.params, r.solution);
    if (f.common.json) {
        ordered_json j = ordered_json::parse(scenario::render_json(rep));
        j["mass_closure"] = mass;
        j["energy_closure"] = energy;
        j["burner_efficiency"] = r.params.burner_efficiency;
        j["residual_norm"] = r.solution.newton_residual_norm;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << scenario::render_text(rep) << "\nburner efficiency " << num(r.params.burner_efficiency, "%.6f")
                  << "   mass closure " << num(mass, "%.3e") << "   energy closure " << num(energy, "%.3e") << "\n";
    }
    return kExitOk;
}

// steady ---------------------------------------------------------------------

struct SteadyFlags {
    Common common;
    std::optional<double> altitude, mach, dT_isa, shaft_power;
    std::optional<std::size_t> point;
    gasgen::HealthParams health;
    bool sweep_eta_c = false;
};

int cmd_steady(const SteadyFlags& f) {
    scenario::Scenario s = resolve(f.common, "design", scenario::Mode::GasGen);
    gasgen::OperatingPoint op{s.design.altitude, s.design.mach, s.design.dT_isa, s.design.shaft_power};
    if (f.point) {
        const auto points = gasgen::reference_operating_points();
        if (*f.point >= points.size())
            throw Error(Errc::InvalidArgument, "--point must be below " + std::to_string(points.size()));
        op = points[*f.point];
    }
    if (f.altitude) op.altitude = *f.altitude;
    if (f.mach) op.mach = *f.mach;
    if (f.dT_isa) op.dT_isa = *f.dT_isa;
    if (f.shaft_power) op.shaft_power = *f.shaft_power;
    if (!(op.shaft_power > 0.0)) throw Error(Errc::InvalidArgument, "shaft power must be > 0");

    const gasgen::DesignResult d = gasgen::design_point_size(s.design);
    const double N = d.params.design_speed;
    auto solve = [&](const gasgen::HealthParams& h) {
        gasgen::GasGenInput u{0.0, op.altitude, op.mach, op.dT_isa};
        u.wf = gasgen::trim_fuel(d.params, N, op.shaft_power, u, h);
        return gasgen::off_design_solve(d.params, u, h, op.shaft_power, N);
    };
    const gasgen::CycleSolution sol = solve(f.health);
    const std::string title = "Off-design point: " + num(op.altitude / 1000.0, "%g") + "km " + num(op.mach, "%g") +
                              "Ma " + num(op.shaft_power, "%g") + "kW";
    const scenario::StationReport rep = scenario::station_report(sol, title);

    ordered_json sweep = ordered_json::array();
    if (f.sweep_eta_c)
        for (int k = 0; k <= 5; ++k) {
            gasgen::HealthParams h = f.health;
            h.eta_c_factor = 1.0 - 0.01 * k;
            const gasgen::CycleSolution p = solve(h);
            sweep.push_back({{"eta_c_factor", h.eta_c_factor},
                             {"wf", p.wf},
                             {"SFC", p.SFC},
                             {"T4", p.at(gasgen::Station::S4).Tt},
                             {"residual_norm", p.newton_residual_norm}});
        }

    const double mass = gasgen::mass_closure_error(sol);
    const double energy = gasgen::energy_closure_error(d.params, sol);
    if (f.common.json) {
        ordered_json j = ordered_json::parse(scenario::render_json(rep));
        j["residual_norm"] = sol.newton_residual_norm;
        j["mass_closure"] = mass;
        j["energy_closure"] = energy;
        if (f.sweep_eta_c) j["eta_c_sweep"] = sweep;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << scenario::render_text(rep) << "\nresidual norm " << num(sol.newton_residual_norm, "%.3e")
                  << "   mass closure " << num(mass, "%.3e") << "   energy closure " << num(energy, "%.3e") << "\n";
        if (f.sweep_eta_c) {
            std::cout << "\neta_c_factor  wf [kg/s]   SFC [kg/(kW.h)]  T4 [K]\n";
            for (const auto& row : sweep)
                std::cout << num(row["eta_c_factor"].get<double>(), "%12.2f") << "  "
                          << num(row["wf"].get<double>(), "%9.6f") << "  " << num(row["SFC"].get<double>(), "%15.6f")
                          << "  " << num(row["T4"].get<double>(), "%8.3f") << "\n";
        }
    }
    return kExitOk;
}

// transient ------------------------------------------------------------------

int cmd_transient(const Common& c) {
    const scenario::Scenario s = resolve(c, "fuel-step", scenario::Mode::GasGen);
    auto describe = [](const scenario::Scenario& sc, const cosim::RunResult& r) {
        ordered_json j;
        j["seed"] = sc.seed;
        j["rows"] = r.slow.size();
        if (r.slow.empty()) return j;
        const auto t = r.slow.time();
        const auto N = r.slow.column("XNHPC");
        j["N_initial"] = N.front();
        j["N_final"] = N.back();
        j["wf_final"] = last(r.slow, "wf");
        j["T4_final"] = last(r.slow, "T4");
        if (!sc.fuel_events.empty()) {
            const double t_step = sc.fuel_events.front().time;
            bool monotone = true;
            const double dir = N.back() >= N.front() ? 1.0 : -1.0;
            for (std::size_t k = 1; k < N.size(); ++k)
                if (t[k - 1] >= t_step && dir * (N[k] - N[k - 1]) < 0.0) monotone = false;
            j["monotone_after_step"] = monotone;
        }
        return j;
    };
    auto render = [](const ordered_json& j) {
        std::string out = "transient: " + std::to_string(j["rows"].get<std::size_t>()) + " slow rows\n";
        if (j.contains("N_initial"))
            out += "  N " + num(j["N_initial"].get<double>(), "%.2f") + " -> " + num(j["N_final"].get<double>(), "%.2f") +
                   " rpm, wf " + num(j["wf_final"].get<double>(), "%.6f") + " kg/s, T4 " +
                   num(j["T4_final"].get<double>(), "%.2f") + " K\n";
        if (j.contains("monotone_after_step"))
            out += std::string("  monotone approach after the fuel step: ") +
                   (j["monotone_after_step"].get<bool>() ? "yes" : "no") + "\n";
        return out + files_text(j);
    };
    return execute(c, s, {}, describe, render, [](const ordered_json&) { return true; });
}

// genrun ---------------------------------------------------------------------

struct GenrunFlags {
    Common common;
    std::optional<double> load_kw, duration, mu, k_rf, fault_time, speed;
};

int cmd_genrun(const GenrunFlags& f) {
    scenario::Scenario s = resolve(f.common, "design", scenario::Mode::Generator);
    if (f.load_kw) s.load.power = *f.load_kw;
    if (f.duration) s.duration = *f.duration;
    if (f.speed) s.generator_speed = *f.speed;
    if (f.mu || f.k_rf || f.fault_time) {
        wrsg::FaultParams fault{f.mu.value_or(0.05), f.k_rf.value_or(1.0)};
        if (f.fault_time && *f.fault_time > 0.0)
            s.fault_events = {{*f.fault_time, fault}};
        else
            s.fault = fault;
    }
    auto describe = [](const scenario::Scenario& sc, const cosim::RunResult& r) {
        ordered_json j;
        j["seed"] = sc.seed;
        if (r.fast.empty()) return j;
        const std::string title = (sc.load.power == sc.machine.rated_power ? "Design point: " : "Off-design point: ") +
                                  num(sc.load.power, "%g") + "kW";
        const scenario::StationReport rep = scenario::generator_report(r.fast, 10.0 / sc.machine.frequency, title);
        j["report"] = ordered_json::parse(scenario::render_json(rep));
        j["Va_rms"] = rep.rows[0].value;
        j["Vb_rms"] = rep.rows[1].value;
        j["Vc_rms"] = rep.rows[2].value;
        j["Ia_rms"] = rep.rows[6].value;
        j["Ib_rms"] = rep.rows[7].value;
        j["Ic_rms"] = rep.rows[8].value;
        const double imax = std::max({rep.rows[6].value, rep.rows[7].value, rep.rows[8].value});
        const double imin = std::min({rep.rows[6].value, rep.rows[7].value, rep.rows[8].value});
        j["current_unbalance"] = imax / imin;
        j["Psg_total"] = last(r.slow, "Psg_total");
        j["Psg_loss"] = last(r.slow, "Psg_loss");
        j["Vfd"] = last(r.slow, "Vfd");
        return j;
    };
    auto render = [](const ordered_json& j) {
        if (!j.contains("report")) return std::string("genrun: no samples\n") + files_text(j);
        scenario::StationReport rep{j["report"]["title"].get<std::string>(), {}};
        for (const auto& row : j["report"]["rows"])
            rep.rows.push_back({row["name"], row["description"], row["unit"], row["value"].get<double>()});
        return scenario::render_text(rep) + "\nP_sg total " + num(j["Psg_total"].get<double>(), "%.3f") +
               " kW   P_sg loss " + num(j["Psg_loss"].get<double>(), "%.3f") + " kW   Vfd " +
               num(j["Vfd"].get<double>(), "%.3f") + " V   current max/min " +
               num(j["current_unbalance"].get<double>(), "%.5f") + "\n" + files_text(j);
    };
    return execute(f.common, s, {}, describe, render, [](const ordered_json&) { return true; });
}

// joint ----------------------------------------------------------------------

struct JointFlags {
    Common common;
    std::string hook = "none";
    bool state_noise = false;
    double state_noise_std = 10.0;
    double audit_tolerance = 1e-9;
};

int cmd_joint(const JointFlags& f) {
    scenario::Scenario s = resolve(f.common, "joint-fault", scenario::Mode::Joint);
    if (f.state_noise) s.state_noise = f.state_noise_std;
    scenario::RunOptions options;
    if (f.hook == "identity") options.hook = [](const gasgen::GasGenState& x, std::size_t) { return x; };
    const double tol = f.audit_tolerance;
    auto describe = [](const scenario::Scenario& sc, const cosim::RunResult& r) {
        ordered_json j;
        j["seed"] = sc.seed;
        j["audit_max_relative"] = r.audit.max_relative;
        j["audit_mean_relative"] = r.audit.mean_relative;
        if (r.slow.empty()) return j;
        const auto N = r.slow.column("XNHPC");
        j["N_final"] = N.back();
        j["N_min"] = *std::min_element(N.begin(), N.end());
        j["N_max"] = *std::max_element(N.begin(), N.end());
        j["wf_final"] = last(r.slow, "wf");
        j["Pe_final"] = last(r.slow, "Pe");
        j["T4_final"] = last(r.slow, "T4");
        j["Va_rms_final"] = last(r.slow, "Va_rms");
        j["Ia_rms_final"] = last(r.slow, "Ia_rms");
        j["Psg_loss_final"] = last(r.slow, "Psg_loss");
        return j;
    };
    auto render = [tol](const ordered_json& j) {
        std::string out = "energy audit: max relative residual " + num(j["audit_max_relative"].get<double>(), "%.3e") +
                          " (tolerance " + num(tol, "%.1e") + "), mean " +
                          num(j["audit_mean_relative"].get<double>(), "%.3e") + "\n";
        if (j.contains("N_final"))
            out += "  N final " + num(j["N_final"].get<double>(), "%.2f") + " rpm [" +
                   num(j["N_min"].get<double>(), "%.2f") + ", " + num(j["N_max"].get<double>(), "%.2f") + "]  Pe " +
                   num(j["Pe_final"].get<double>(), "%.3f") + " kW  wf " + num(j["wf_final"].get<double>(), "%.6f") +
                   " kg/s  Va " + num(j["Va_rms_final"].get<double>(), "%.3f") + " V\n";
        return out + files_text(j);
    };
    auto ok = [tol](const ordered_json& j) { return j["audit_max_relative"].get<double>() <= tol; };
    const int rc = execute(f.common, s, options, describe, render, ok);
    if (rc == kExitNumerical) std::cerr << "error: energy audit above tolerance or run failed\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled gas-generator and generator simulation"};
    app.require_subcommand(1, 1);

    DesignFlags design;
    auto* d = app.add_subcommand("design", "Size the gas generator and print the design-point report");
    add_common(d, design.common, false);
    d->add_option("--shaft-power", design.shaft_power, "kW");
    d->add_option("--pressure-ratio", design.pressure_ratio);
    d->add_option("--t4", design.T4, "Combustor exit temperature, K");
    d->add_option("--w2", design.W2, "Inlet flow, kg/s");
    d->add_option("--fuel-flow", design.fuel_flow, "kg/s");
    d->add_option("--design-speed", design.design_speed, "rpm");
    d->add_option("--eta-c", design.eta_c, "Compressor efficiency");
    d->add_option("--eta-t", design.eta_t, "Turbine efficiency");

    SteadyFlags steady;
    auto* st = app.add_subcommand("steady", "Off-design cycle match at design speed");
    add_common(st, steady.common, false);
    st->add_option("--altitude", steady.altitude, "m");
    st->add_option("--mach", steady.mach);
    st->add_option("--dT-isa", steady.dT_isa, "K");
    st->add_option("--shaft-power", steady.shaft_power, "kW");
    st->add_option("--point", steady.point, "Reference operating point index 0-9 (8: 8 km, M0.7, 222 kW)");
    st->add_option("--eta-c-factor", steady.health.eta_c_factor)->capture_default_str();
    st->add_option("--flow-c-factor", steady.health.flow_c_factor)->capture_default_str();
    st->add_option("--eta-t-factor", steady.health.eta_t_factor)->capture_default_str();
    st->add_option("--flow-t-factor", steady.health.flow_t_factor)->capture_default_str();
    st->add_flag("--sweep-eta-c", steady.sweep_eta_c, "Table of SFC against compressor efficiency factor");

    Common transient;
    auto* tr = app.add_subcommand("transient", "Gas generator alone against its shaft load law");
    add_common(tr, transient, true);

    GenrunFlags genrun;
    auto* gr = app.add_subcommand("genrun", "Generator alone at a fixed shaft speed");
    add_common(gr, genrun.common, true);
    gr->add_option("--load-kw", genrun.load_kw, "Resistive load, kW")->check(CLI::PositiveNumber);
    gr->add_option("--duration", genrun.duration, "s");
    gr->add_option("--speed", genrun.speed, "Shaft speed, rpm")->check(CLI::PositiveNumber);
    gr->add_option("--mu", genrun.mu, "Shorted turn fraction");
    gr->add_option("--k-rf", genrun.k_rf, "Fault resistance factor");
    gr->add_option("--fault-time", genrun.fault_time, "s");

    JointFlags joint;
    auto* jt = app.add_subcommand("joint", "Coupled run with energy audit");
    add_common(jt, joint.common, true);
    jt->add_option("--hook", joint.hook, "State hook: none or identity")
        ->check(CLI::IsMember({"none", "identity"}))
        ->capture_default_str();
    jt->add_flag("--state-noise", joint.state_noise, "Add spool-speed noise in the state hook");
    jt->add_option("--state-noise-std", joint.state_noise_std, "rpm")->capture_default_str();
    jt->add_option("--audit-tolerance", joint.audit_tolerance, "Relative energy residual limit")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (d->parsed()) return cmd_design(design);
        if (st->parsed()) return cmd_steady(steady);
        if (tr->parsed()) return cmd_transient(transient);
        if (gr->parsed()) return cmd_genrun(genrun);
        return cmd_joint(joint);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? kExitNumerical : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
