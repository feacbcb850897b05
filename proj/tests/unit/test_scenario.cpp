#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <regex>
#include <set>

#include "apu/error.hpp"
#include "apu/scenario/output.hpp"
#include "apu/scenario/scenario.hpp"

using namespace apu;
using namespace apu::scenario;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::InvalidArgument;
}

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("apu_scenario_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

cosim::TimeSeries sample_series() {
    cosim::TimeSeries s({"Va", "Vb", "Vc", "N"}, {"V", "V", "V", "rpm"});
    const double third = 1.0 / 3.0;
    const double r0[] = {third, -1e-300, 5e300, 36050.0};
    const double r1[] = {0.1 + 0.2, std::numeric_limits<double>::denorm_min(), -0.0, 36049.999999999993};
    const double r2[] = {std::nextafter(1.0, 2.0), 2.0 / 3.0, 1e-17, 12.5};
    s.append(0.0, r0);
    s.append(0.02, r1);
    s.append(0.04, r2);
    return s;
}

const gasgen::DesignResult& design() {
    static const gasgen::DesignResult d = gasgen::design_point_size({});
    return d;
}

}  // namespace

TEST(Parse, EmptyDocumentIsTheDesignScenario) {
    const Scenario s = parse_scenario("{}");
    EXPECT_EQ(s, Scenario{});
    EXPECT_EQ(s, preset("design"));
    EXPECT_EQ(s.mode, Mode::Joint);
    EXPECT_EQ(s.design.shaft_power, 500.0);
    EXPECT_EQ(s.load.power, 225.0);
}

TEST(Parse, JointFaultPresetSchedule) {
    const Scenario s = preset("joint-fault");
    EXPECT_EQ(s.duration, 12.0);
    ASSERT_EQ(s.load.steps.size(), 1u);
    EXPECT_EQ(s.load.steps[0].time, 2.0);
    EXPECT_LT(s.load.steps[0].scale, 1.0);
    ASSERT_EQ(s.health_events.size(), 1u);
    EXPECT_EQ(s.health_events[0].time, 6.0);
    EXPECT_EQ(s.health_events[0].health, (gasgen::HealthParams{0.99, 0.97, 0.98, 1.04}));
    ASSERT_EQ(s.fault_events.size(), 1u);
    EXPECT_EQ(s.fault_events[0].time, 10.0);
    EXPECT_EQ(s.fault_events[0].fault.mu, 0.05);
}

TEST(Parse, FuelStepPreset) {
    const Scenario s = preset("fuel-step");
    EXPECT_EQ(s.mode, Mode::GasGen);
    EXPECT_EQ(s.shaft_load.kind, gasgen::LoadLaw::Kind::Cubic);
    EXPECT_EQ(s.shaft_load.power, 230.0);
    EXPECT_EQ(s.fuel_events, (std::vector<cosim::FuelEvent>{{3.0, 1.1}}));
    EXPECT_EQ(s.duration, 10.0);
    EXPECT_FALSE(s.governor.enabled);
}

TEST(Parse, UnknownPresetIsRejected) { EXPECT_EQ(code_of([] { (void)preset("nope"); }), Errc::SchemaError); }

TEST(Parse, NegativeDurationIsSchemaError) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"duration": -1})"); }), Errc::SchemaError);
    EXPECT_NE(what_of([] { (void)parse_scenario(R"({"duration": -1})"); }).find("/duration"), std::string::npos);
}

TEST(Parse, TypeMismatchNamesPathAndTypes) {
    const std::string w = what_of([] { (void)parse_scenario(R"({"machine": {"r_s": "small"}})"); });
    EXPECT_NE(w.find("SchemaError"), std::string::npos);
    EXPECT_NE(w.find("/machine/r_s"), std::string::npos);
    EXPECT_NE(w.find("expected number"), std::string::npos);
    EXPECT_NE(w.find("small"), std::string::npos);
}

TEST(Parse, UnknownFieldNamesPath) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"duratoin": 1})"); }), Errc::UnknownField);
    const std::string w = what_of([] { (void)parse_scenario(R"({"fault_events": [{"time": 0.1, "mu": 0.1, "x": 1}]})"); });
    EXPECT_NE(w.find("/fault_events/0/x"), std::string::npos);
}

TEST(Parse, MalformedJson) { EXPECT_EQ(code_of([] { (void)parse_scenario("{"); }), Errc::SchemaError); }

TEST(Parse, BadEnumeration) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"mode": "turbo"})"); }), Errc::SchemaError);
}

TEST(Parse, ScheduleOutsideDuration) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"duration": 1, "fault_events": [{"time": 2, "mu": 0.05}]})"); }),
              Errc::SchemaError);
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"load": {"steps": [{"time": 0.5}, {"time": 0.4}]}})"); }),
              Errc::SchemaError);
}

TEST(Parse, RaggedDuration) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"duration": 0.03})"); }), Errc::SchemaError);
}

TEST(Parse, OutputNoiseChannelsMustExist) {
    EXPECT_EQ(code_of([] { (void)parse_scenario(R"({"noise": {"outputs": {"T99": 1}}})"); }), Errc::SchemaError);
    const Scenario s = parse_scenario(R"({"noise": {"outputs": {"T4": 1.5}}})");
    EXPECT_EQ(s.output_noise.at("T4"), 1.5);
}

TEST(RoundTrip, Presets) {
    for (const std::string& name : preset_names()) {
        const Scenario s = preset(name);
        EXPECT_EQ(parse_scenario(serialize_scenario(s)), s) << name;
    }
}

TEST(RoundTrip, EveryFieldTouched) {
    Scenario s = preset("joint-fault");
    s.name = "custom \"quoted\"";
    s.mode = Mode::Generator;
    s.seed = 18446744073709551615ULL;
    s.macro_dt = 0.01;
    s.ambient = {1234.5, 0.3, -7.25};
    s.design.inertia = 0.1 / 3.0;
    s.shaft_load = {gasgen::LoadLaw::Kind::Cubic, 321.0, 35000.0};
    s.fuel_flow = 0.041;
    s.fuel_events = {{1.0, 1.05}, {2.0, 0.95}};
    s.machine.r_s = 0.0044 * (1.0 + 1e-15);
    s.machine.pole_pairs = 3;
    s.load.kind = ElectricalLoadSpec::Kind::SeriesRL;
    s.load.inductance = 1e-5;
    s.fault = {0.02, 3.5};
    s.governor = {false, 0.3, 2.0, 0.001, 0.09, 0.1, 36000.0};
    s.avr = {false, 90.0, 3000.0, 250.0, 231.0, 5e-4};
    s.coupling = {0.98, 3.0};
    s.machine_noise = {0.1, 0.2, 0.3, 0.4, 0};
    s.output_noise = {{"T4", 2.0}, {"XNHPC", 5.0}};
    s.state_noise = 1.5;
    s.outputs.fast = {"Va"};
    const Scenario back = parse_scenario(serialize_scenario(s));
    EXPECT_EQ(back, s);
    EXPECT_EQ(serialize_scenario(back), serialize_scenario(s));
}

TEST(Config, JointFaultMapsOntoRunConfig) {
    const Scenario s = preset("joint-fault");
    const cosim::JointConfig c = joint_config(s, design().params);
    EXPECT_EQ(c.cosim.t_end, 12.0);
    EXPECT_NEAR(c.machine.load.R, 230.0 * 230.0 * 3.0 / 225e3, 1e-12);
    EXPECT_EQ(c.machine.faults.size(), 1u);
    EXPECT_EQ(c.health_events.size(), 1u);
    EXPECT_EQ(c.governor.K_p, s.governor.kp);
    EXPECT_FALSE(static_cast<bool>(c.cosim.hook));
}

TEST(Config, SeriesRlLoadDrawsTheRequestedPower) {
    Scenario s;
    s.load.kind = ElectricalLoadSpec::Kind::SeriesRL;
    s.load.inductance = 1e-4;
    const cosim::MachineConfig m = joint_config(s, design().params).machine;
    const double X = s.machine.rated_electrical_speed() * m.load.L;
    const double P = 3.0 * 230.0 * 230.0 * m.load.R / (m.load.R * m.load.R + X * X);
    EXPECT_NEAR(P, 225e3, 1e-6);
}

TEST(Config, SpeedNoiseHookIsPureInStepAndSeed) {
    const auto hook = speed_noise_hook(10.0, 7);
    const gasgen::GasGenState x{36050.0};
    EXPECT_EQ(hook(x, 3).N, hook(x, 3).N);
    EXPECT_NE(hook(x, 3).N, hook(x, 4).N);
    EXPECT_NE(hook(x, 3).N, speed_noise_hook(10.0, 8)(x, 3).N);
    EXPECT_FALSE(static_cast<bool>(speed_noise_hook(0.0, 7)));
}

TEST(Csv, ThreeSamplesGiveFourLines) {
    const std::string text = csv_text(sample_series());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    EXPECT_EQ(text.substr(0, text.find('\n')), "time_s,Va_V,Vb_V,Vc_V,N_rpm");
}

TEST(Csv, RoundTripIsBitExact) {
    const auto dir = scratch("csv");
    const cosim::TimeSeries s = sample_series();
    const std::string path = (dir / "s.csv").string();
    write_csv(s, path);
    const cosim::TimeSeries back = read_csv(path);
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.names(), s.names());
    EXPECT_EQ(back.units(), s.units());
    for (std::size_t r = 0; r < s.size(); ++r) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.time()[r]), std::bit_cast<std::uint64_t>(s.time()[r]));
        for (std::size_t c = 0; c < s.width(); ++c)
            EXPECT_EQ(std::bit_cast<std::uint64_t>(back.at(r, c)), std::bit_cast<std::uint64_t>(s.at(r, c)));
    }
}

TEST(Csv, UnderscoredChannelNamesSplitAtTheUnit) {
    cosim::TimeSeries s({"Va_rms", "Psg_loss"}, {"V", "kW"});
    const double r[] = {1.0, 2.0};
    s.append(0.0, r);
    const cosim::TimeSeries back = parse_csv(csv_text(s));
    EXPECT_EQ(back, s);
}

TEST(Csv, EmptySeriesIsHeaderOnly) {
    const cosim::TimeSeries s({"a"}, {"V"});
    EXPECT_EQ(csv_text(s), "time_s,a_V\n");
    EXPECT_EQ(parse_csv(csv_text(s)), s);
}

TEST(Csv, MalformedInput) {
    EXPECT_EQ(code_of([] { (void)parse_csv("t,a_V\n"); }), Errc::SchemaError);
    EXPECT_EQ(code_of([] { (void)parse_csv("time_s,a_V\n0,x\n"); }), Errc::SchemaError);
    EXPECT_EQ(code_of([] { (void)parse_csv("time_s,a_V\n0,1,2\n"); }), Errc::SchemaError);
}

TEST(Csv, UnwritablePathIsIoError) {
    EXPECT_EQ(code_of([] { write_csv(sample_series(), "/nonexistent-dir/x/y.csv"); }), Errc::IoError);
    EXPECT_EQ(code_of([] { (void)read_csv("/nonexistent-dir/x/y.csv"); }), Errc::IoError);
}

TEST(Csv, RunFilesAndManifest) {
    const auto dir = scratch("run");
    const cosim::TimeSeries s = sample_series();
    cosim::TimeSeries f({"Ia"}, {"A"});
    for (int k = 0; k <= 8; ++k) {
        const double v[] = {static_cast<double>(k)};
        f.append(0.005 * k, v);
    }
    const RunFiles files = write_run(f, s, dir.string(), "x", R"({"seed": 3})", true);
    EXPECT_TRUE(std::filesystem::exists(files.fast));
    EXPECT_TRUE(std::filesystem::exists(files.slow));
    EXPECT_TRUE(std::filesystem::exists(files.merged));
    const std::string manifest = slurp(files.manifest);
    EXPECT_NE(manifest.find("\"x_fast.csv\""), std::string::npos);
    EXPECT_NE(manifest.find("\"x_slow.csv\""), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 3"), std::string::npos);
    const cosim::TimeSeries m = read_csv(files.merged);
    EXPECT_EQ(m.width(), 5u);
    EXPECT_DOUBLE_EQ(m.column("Ia")[1], 4.0);
}

TEST(Report, DesignPointRows) {
    const StationReport r = station_report(design().solution, "Design point: 0km 0Ma 500kW");
    ASSERT_EQ(r.rows.size(), 25u);
    EXPECT_EQ(r.rows[0].name, "XNHPC");
    EXPECT_EQ(r.rows[0].unit, "r/min");
    EXPECT_EQ(r.rows[1].name, "PWSD");
    EXPECT_EQ(r.rows[2].unit, "kg/(kW.h)");
    EXPECT_EQ(r.rows[24].name, "W8");
    const std::string text = render_text(r);
    EXPECT_NE(text.find("36050.0000"), std::string::npos);
    EXPECT_NE(text.find("500.0000"), std::string::npos);
    EXPECT_TRUE(std::regex_search(text, std::regex("PWSD +Output Shaft Power +kW +500\\.0000")));
    EXPECT_NE(render_json(r).find("\"Rotor Speed\""), std::string::npos);
}

TEST(Report, OffDesignUsesTheSameLayout) {
    const gasgen::OperatingPoint op = gasgen::reference_operating_points()[8];
    gasgen::GasGenInput u{0.0, op.altitude, op.mach, op.dT_isa};
    const auto& p = design().params;
    u.wf = gasgen::trim_fuel(p, p.design_speed, op.shaft_power, u, {});
    const auto sol = gasgen::off_design_solve(p, u, {}, op.shaft_power, p.design_speed);
    const StationReport r = station_report(sol, "Off-design point: 8000m 0.7Ma 222kW");
    const StationReport d = station_report(design().solution, "x");
    ASSERT_EQ(r.rows.size(), d.rows.size());
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        EXPECT_EQ(r.rows[k].name, d.rows[k].name);
        EXPECT_EQ(r.rows[k].unit, d.rows[k].unit);
    }
    EXPECT_NEAR(r.rows[1].value, 222.0, 1e-6);
}

TEST(Report, UnconvergedSolutionIsRejected) {
    gasgen::CycleSolution bad = design().solution;
    bad.newton_residual_norm = 1e-3;
    EXPECT_EQ(code_of([&] { (void)station_report(bad, "x"); }), Errc::NonConvergence);
}

TEST(Svg, ConstantChannelIsHorizontal) {
    cosim::TimeSeries s({"N"}, {"rpm"});
    for (int k = 0; k < 5; ++k) {
        const double v[] = {36050.0};
        s.append(0.1 * k, v);
    }
    const std::string svg = render_svg(s, {"N"});
    const std::smatch m = [&] {
        std::smatch out;
        std::regex_search(svg, out, std::regex("points=\"([^\"]*)\""));
        return out;
    }();
    ASSERT_FALSE(m.empty());
    std::set<std::string> ys;
    const std::string pts = m[1];
    const std::regex pt("([0-9.]+),([0-9.]+)");
    for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pt); it != std::sregex_iterator(); ++it)
        ys.insert((*it)[2]);
    EXPECT_EQ(ys.size(), 1u);
    EXPECT_NE(svg.find("time [s]"), std::string::npos);
    EXPECT_NE(svg.find("N [rpm]"), std::string::npos);
}

TEST(Svg, ThreePhasesShareOnePlot) {
    const auto groups = channel_groups({"Va", "Vb", "Vc", "Ia", "Ib", "Ic", "If", "Vfd", "Va_rms", "Vb_rms"});
    ASSERT_EQ(groups.size(), 5u);
    EXPECT_EQ(groups[0], (std::vector<std::string>{"Va", "Vb", "Vc"}));
    EXPECT_EQ(groups[1], (std::vector<std::string>{"Ia", "Ib", "Ic"}));
    EXPECT_EQ(groups[2], (std::vector<std::string>{"If"}));
    EXPECT_EQ(groups[3], (std::vector<std::string>{"Vfd"}));
    EXPECT_EQ(groups[4], (std::vector<std::string>{"Va_rms", "Vb_rms"}));
    const std::string svg = render_svg(sample_series(), {"Va", "Vb", "Vc"});
    std::size_t polylines = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
    EXPECT_EQ(polylines, 3u);
}

TEST(Svg, DeterministicFilesAndUnknownChannel) {
    const auto dir = scratch("svg");
    const auto a = emit_svg(sample_series(), {"Va", "Vb", "Vc", "N"}, (dir / "a").string(), "run");
    const auto b = emit_svg(sample_series(), {"Va", "Vb", "Vc", "N"}, (dir / "b").string(), "run");
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(slurp(a[k]), slurp(b[k]));
    EXPECT_EQ(std::filesystem::path(a[0]).filename(), "run_Vabc.svg");
    EXPECT_EQ(code_of([&] { (void)emit_svg(sample_series(), {"Q"}, dir.string(), "x"); }), Errc::UnknownChannel);
}

TEST(Run, ZeroLengthGivesHeaderOnlyCsv) {
    Scenario s = preset("fuel-step");
    s.duration = 0.0;
    s.fuel_events.clear();
    const Tracks t = selected(s, run(s));
    const std::string text = csv_text(t.slow);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    EXPECT_EQ(text.rfind("time_s,XNHPC_rpm,", 0), 0u);
}

TEST(Run, GeneratorModeAtDesignLoad) {
    Scenario s;
    s.mode = Mode::Generator;
    s.duration = 0.1;
    const cosim::RunResult r = run(s);
    const StationReport rep = generator_report(r.fast, 0.01, "Design point: 225kW");
    ASSERT_EQ(rep.rows.size(), 9u);
    EXPECT_EQ(rep.rows[0].name, "Phase A Voltage");
    EXPECT_NEAR(rep.rows[0].value, 230.0, 0.1);
    EXPECT_NEAR(rep.rows[3].value, 230.0 * std::sqrt(3.0), 0.2);
    EXPECT_NEAR(rep.rows[6].value, 225e3 / (3 * 230.0), 0.2);
}

TEST(Fnv, KnownVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}
