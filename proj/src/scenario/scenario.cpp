#include "apu/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "apu/error.hpp"

namespace apu::scenario {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& expected, const std::string& found) {
    throw Error(Errc::SchemaError, path + ": expected " + expected + ", found " + found);
}

std::string type_of(const json& j) {
    if (j.is_boolean()) return "boolean " + j.dump();
    if (j.is_number()) return "number " + j.dump();
    if (j.is_string()) return "string " + j.dump();
    return std::string(j.type_name());
}

template <class E>
struct EnumTable {
    std::vector<std::pair<E, std::string_view>> entries;

    [[nodiscard]] std::string_view name(E e) const {
        for (const auto& [v, n] : entries)
            if (v == e) return n;
        return "?";
    }
    [[nodiscard]] std::string choices() const {
        std::string s;
        for (const auto& [v, n] : entries) s += (s.empty() ? "one of " : ", ") + std::string(n);
        return s;
    }
};

const EnumTable<Mode> kModes{{{Mode::Joint, "joint"}, {Mode::GasGen, "gasgen"}, {Mode::Generator, "generator"}}};
const EnumTable<gasgen::LoadLaw::Kind> kLaws{
    {{gasgen::LoadLaw::Kind::Fixed, "fixed"}, {gasgen::LoadLaw::Kind::Cubic, "cubic"}}};
const EnumTable<ElectricalLoadSpec::Kind> kLoadKinds{{{ElectricalLoadSpec::Kind::Resistive, "resistive"},
                                                      {ElectricalLoadSpec::Kind::SeriesRL, "series_rl"},
                                                      {ElectricalLoadSpec::Kind::Cubic, "cubic"}}};

const EnumTable<Mode>& table_for(Mode*) { return kModes; }
const EnumTable<gasgen::LoadLaw::Kind>& table_for(gasgen::LoadLaw::Kind*) { return kLaws; }
const EnumTable<ElectricalLoadSpec::Kind>& table_for(ElectricalLoadSpec::Kind*) { return kLoadKinds; }

template <class T>
concept Enumerated = requires(T* p) { table_for(p); };

// Field lists shared by the reader and the writer.
template <class V> void describe(V& v, Ambient& a);
template <class V> void describe(V& v, gasgen::GasGenDesignSpec& d);
template <class V> void describe(V& v, gasgen::HealthParams& h);
template <class V> void describe(V& v, cosim::HealthEvent& e);
template <class V> void describe(V& v, gasgen::LoadLaw& l);
template <class V> void describe(V& v, cosim::FuelEvent& e);
template <class V> void describe(V& v, wrsg::WrsgParams& p);
template <class V> void describe(V& v, wrsg::LoadStep& s);
template <class V> void describe(V& v, ElectricalLoadSpec& l);
template <class V> void describe(V& v, wrsg::FaultParams& f);
template <class V> void describe(V& v, cosim::FaultEvent& e);
template <class V> void describe(V& v, GovernorGains& g);
template <class V> void describe(V& v, AvrGains& a);
template <class V> void describe(V& v, cosim::CouplingParams& c);
template <class V> void describe(V& v, OutputSelection& o);
template <class V> void describe(V& v, Scenario& s);

struct NoiseBlock {
    wrsg::NoiseConfig* machine;
    std::map<std::string, double>* outputs;
    double* state;
};
template <class V> void describe(V& v, NoiseBlock& n);

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) schema_error(path_.empty() ? "/" : path_, "object", type_of(j_));
    }

    void operator()(const char* key, double& out) {
        if (const json* f = field(key)) out = number(*f, child(key));
    }
    void operator()(const char* key, bool& out) {
        if (const json* f = field(key)) {
            if (!f->is_boolean()) schema_error(child(key), "boolean", type_of(*f));
            out = f->get<bool>();
        }
    }
    void operator()(const char* key, int& out) {
        if (const json* f = field(key)) {
            if (!f->is_number_integer()) schema_error(child(key), "integer", type_of(*f));
            out = f->get<int>();
        }
    }
    void operator()(const char* key, std::uint64_t& out) {
        if (const json* f = field(key)) out = unsigned_integer(*f, child(key));
    }
    void operator()(const char* key, std::string& out) {
        if (const json* f = field(key)) {
            if (!f->is_string()) schema_error(child(key), "string", type_of(*f));
            out = f->get<std::string>();
        }
    }
    template <Enumerated E>
    void operator()(const char* key, E& out) {
        const json* f = field(key);
        if (!f) return;
        const auto& table = table_for(static_cast<E*>(nullptr));
        if (f->is_string())
            for (const auto& [v, n] : table.entries)
                if (f->get<std::string>() == n) {
                    out = v;
                    return;
                }
        schema_error(child(key), table.choices(), type_of(*f));
    }
    void operator()(const char* key, std::vector<std::string>& out) {
        const json* f = field(key);
        if (!f) return;
        if (!f->is_array()) schema_error(child(key), "array of strings", type_of(*f));
        out.clear();
        for (std::size_t i = 0; i < f->size(); ++i) {
            if (!(*f)[i].is_string()) schema_error(child(key) + "/" + std::to_string(i), "string", type_of((*f)[i]));
            out.push_back((*f)[i].get<std::string>());
        }
    }
    void operator()(const char* key, std::map<std::string, double>& out) {
        const json* f = field(key);
        if (!f) return;
        if (!f->is_object()) schema_error(child(key), "object of numbers", type_of(*f));
        out.clear();
        for (const auto& [k, val] : f->items()) out[k] = number(val, child(key) + "/" + k);
    }
    template <class T>
    void operator()(const char* key, std::vector<T>& out) {
        const json* f = field(key);
        if (!f) return;
        if (!f->is_array()) schema_error(child(key), "array", type_of(*f));
        out.clear();
        for (std::size_t i = 0; i < f->size(); ++i) {
            T item{};
            Reader r((*f)[i], child(key) + "/" + std::to_string(i));
            describe(r, item);
            r.finish();
            out.push_back(item);
        }
    }
    template <class T>
    void operator()(const char* key, T& out) {
        if (const json* f = field(key)) {
            Reader r(*f, child(key));
            describe(r, out);
            r.finish();
        }
    }

    void size(const char* key, std::size_t& out) {
        if (const json* f = field(key)) out = static_cast<std::size_t>(unsigned_integer(*f, child(key)));
    }

    /// Throws UnknownField for any key not visited.
    void finish() const {
        for (const auto& [k, val] : j_.items())
            if (!seen_.contains(k)) throw Error(Errc::UnknownField, child(k.c_str()));
    }

private:
    const json* field(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    [[nodiscard]] std::string child(const char* key) const { return path_ + "/" + key; }

    static double number(const json& f, const std::string& path) {
        if (!f.is_number()) schema_error(path, "number", type_of(f));
        return f.get<double>();
    }
    static std::uint64_t unsigned_integer(const json& f, const std::string& path) {
        if (!f.is_number_unsigned()) schema_error(path, "non-negative integer", type_of(f));
        return f.get<std::uint64_t>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

class Writer {
public:
    explicit Writer(ordered_json& out) : out_(out) { out_ = ordered_json::object(); }

    void operator()(const char* key, double& v) { out_[key] = v; }
    void operator()(const char* key, bool& v) { out_[key] = v; }
    void operator()(const char* key, int& v) { out_[key] = v; }
    void operator()(const char* key, std::uint64_t& v) { out_[key] = v; }
    void operator()(const char* key, std::string& v) { out_[key] = v; }
    template <Enumerated E>
    void operator()(const char* key, E& v) {
        out_[key] = std::string(table_for(static_cast<E*>(nullptr)).name(v));
    }
    void operator()(const char* key, std::vector<std::string>& v) { out_[key] = v; }
    void operator()(const char* key, std::map<std::string, double>& v) {
        out_[key] = ordered_json::object();
        for (const auto& [k, val] : v) out_[key][k] = val;
    }
    template <class T>
    void operator()(const char* key, std::vector<T>& v) {
        ordered_json arr = ordered_json::array();
        for (T& item : v) {
            ordered_json o;
            Writer w(o);
            describe(w, item);
            arr.push_back(std::move(o));
        }
        out_[key] = std::move(arr);
    }
    template <class T>
    void operator()(const char* key, T& v) {
        ordered_json o;
        Writer w(o);
        describe(w, v);
        out_[key] = std::move(o);
    }
    void size(const char* key, std::size_t& v) { out_[key] = static_cast<std::uint64_t>(v); }

private:
    ordered_json& out_;
};

template <class V>
void describe(V& v, Ambient& a) {
    v("altitude", a.altitude);
    v("mach", a.mach);
    v("dT_isa", a.dT_isa);
}

template <class V>
void describe(V& v, gasgen::GasGenDesignSpec& d) {
    v("altitude", d.altitude);
    v("mach", d.mach);
    v("dT_isa", d.dT_isa);
    v("shaft_power", d.shaft_power);
    v("pressure_ratio", d.pressure_ratio);
    v("T4", d.T4);
    v("T8", d.T8);
    v("fuel_lhv", d.fuel_lhv);
    v("design_speed", d.design_speed);
    v("eta_compressor", d.eta_compressor);
    v("eta_turbine", d.eta_turbine);
    v("accessory_power", d.accessory_power);
    v("W2", d.W2);
    v("fuel_flow", d.fuel_flow);
    v("surge_margin", d.surge_margin);
    v("nox_severity", d.nox_severity);
    v("ps3_ratio", d.ps3_ratio);
    v("intake_recovery", d.intake_recovery);
    v("burner_pressure_loss", d.burner_pressure_loss);
    v("exhaust_pressure_loss", d.exhaust_pressure_loss);
    v("ngv_cooling", d.ngv_cooling);
    v("rotor_cooling", d.rotor_cooling);
    v("overboard_bleed", d.overboard_bleed);
    v("eta_mech", d.eta_mech);
    v("inertia", d.inertia);
}

template <class V>
void describe(V& v, gasgen::HealthParams& h) {
    v("eta_c", h.eta_c_factor);
    v("flow_c", h.flow_c_factor);
    v("eta_t", h.eta_t_factor);
    v("flow_t", h.flow_t_factor);
}

template <class V>
void describe(V& v, cosim::HealthEvent& e) {
    v("time", e.time);
    describe(v, e.health);
}

template <class V>
void describe(V& v, gasgen::LoadLaw& l) {
    v("law", l.kind);
    v("power", l.power);
    v("anchor_speed", l.anchor_speed);
}

template <class V>
void describe(V& v, cosim::FuelEvent& e) {
    v("time", e.time);
    v("scale", e.scale);
}

template <class V>
void describe(V& v, wrsg::WrsgParams& p) {
    v("rated_power", p.rated_power);
    v("rated_voltage", p.rated_voltage);
    v("frequency", p.frequency);
    v("r_s", p.r_s);
    v("L_ls", p.L_ls);
    v("L_md", p.L_md);
    v("L_mq", p.L_mq);
    v("r_fd", p.r_fd);
    v("L_lf", p.L_lf);
    v("r_kd", p.r_kd);
    v("L_lkd", p.L_lkd);
    v("r_kq", p.r_kq);
    v("L_lkq", p.L_lkq);
    v("L_s", p.L_s);
    v("pole_pairs", p.pole_pairs);
    v("eta_sg", p.eta_sg);
    v("machine_count", p.machine_count);
}

template <class V>
void describe(V& v, wrsg::LoadStep& s) {
    v("time", s.time);
    v("scale", s.scale);
}

template <class V>
void describe(V& v, ElectricalLoadSpec& l) {
    v("kind", l.kind);
    v("power", l.power);
    v("voltage", l.voltage);
    v("inductance", l.inductance);
    v("steps", l.steps);
}

template <class V>
void describe(V& v, wrsg::FaultParams& f) {
    v("mu", f.mu);
    v("k_rf", f.k_rf);
}

template <class V>
void describe(V& v, cosim::FaultEvent& e) {
    v("time", e.time);
    describe(v, e.fault);
}

template <class V>
void describe(V& v, GovernorGains& g) {
    v("enabled", g.enabled);
    v("kp", g.kp);
    v("ki", g.ki);
    v("wf_min", g.wf_min);
    v("wf_max", g.wf_max);
    v("wf_rate", g.wf_rate);
    v("speed_setpoint", g.speed_setpoint);
}

template <class V>
void describe(V& v, AvrGains& a) {
    v("enabled", a.enabled);
    v("kp", a.kp);
    v("ki", a.ki);
    v("vfd_max", a.vfd_max);
    v("voltage_setpoint", a.voltage_setpoint);
    v("period", a.period);
}

template <class V>
void describe(V& v, cosim::CouplingParams& c) {
    v("eta", c.eta);
    v("omega", c.omega);
}

template <class V>
void describe(V& v, NoiseBlock& n) {
    v("stator", n.machine->std_w1);
    v("rotor", n.machine->std_w2);
    v("current", n.machine->std_vi);
    v("voltage", n.machine->std_vv);
    v("state", *n.state);
    v("outputs", *n.outputs);
}

template <class V>
void describe(V& v, OutputSelection& o) {
    v("fast", o.fast);
    v("slow", o.slow);
}

template <class V>
void describe(V& v, Scenario& s) {
    v("name", s.name);
    v("mode", s.mode);
    v("duration", s.duration);
    v("macro_dt", s.macro_dt);
    v("seed", s.seed);
    v.size("record_every", s.record_every);
    v("ambient", s.ambient);
    v("design", s.design);
    v("health", s.health);
    v("health_events", s.health_events);
    v("shaft_load", s.shaft_load);
    v("fuel_flow", s.fuel_flow);
    v("fuel_events", s.fuel_events);
    v("machine", s.machine);
    v("load", s.load);
    v("fault", s.fault);
    v("fault_events", s.fault_events);
    v("generator_speed", s.generator_speed);
    v("governor", s.governor);
    v("avr", s.avr);
    v("coupling", s.coupling);
    NoiseBlock noise{&s.machine_noise, &s.output_noise, &s.state_noise};
    v("noise", noise);
    v("outputs", s.outputs);
}

void require(bool ok, const std::string& path, const std::string& expected, double found) {
    if (!ok) {
        std::ostringstream os;
        os.precision(17);
        os << found;
        schema_error(path, expected, os.str());
    }
}

void check_positive(double x, const std::string& path) { require(x > 0.0 && std::isfinite(x), path, "> 0", x); }

void check_time(double t, double duration, const std::string& path) {
    require(t >= 0.0 && t <= duration, path, "time within [0, duration]", t);
}

template <class E>
void check_schedule(const std::vector<E>& events, double duration, const std::string& path, bool strict) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i) + "/time";
        check_time(events[i].time, duration, p);
        if (i > 0) {
            const bool ordered = strict ? events[i].time > events[i - 1].time : events[i].time >= events[i - 1].time;
            require(ordered, p, strict ? "strictly increasing times" : "non-decreasing times", events[i].time);
        }
    }
}

void check_health(const gasgen::HealthParams& h, const std::string& path) {
    check_positive(h.eta_c_factor, path + "/eta_c");
    check_positive(h.flow_c_factor, path + "/flow_c");
    check_positive(h.eta_t_factor, path + "/eta_t");
    check_positive(h.flow_t_factor, path + "/flow_t");
}

void check_fault(const wrsg::FaultParams& f, const std::string& path) {
    require(f.mu >= 0.0 && f.mu < 1.0, path + "/mu", "mu in [0, 1)", f.mu);
    require(f.k_rf >= 0.0, path + "/k_rf", ">= 0", f.k_rf);
}

/// Mixes a run seed and a stream index into an independent seed.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

wrsg::LoadModel load_model(const Scenario& s) {
    const ElectricalLoadSpec& l = s.load;
    wrsg::LoadModel m = wrsg::LoadModel::resistive(l.power, l.voltage);
    if (l.kind == ElectricalLoadSpec::Kind::SeriesRL) {
        // real power `power` at `voltage` through R + jX at rated frequency
        const double X = s.machine.rated_electrical_speed() * l.inductance;
        const double Z2R = 3.0 * l.voltage * l.voltage / (l.power * 1e3);
        const double disc = Z2R * Z2R - 4.0 * X * X;
        if (disc < 0.0) schema_error("/load/inductance", "reactance below half the resistive impedance", "too large");
        m.kind = wrsg::LoadModel::Kind::SeriesRL;
        m.R = 0.5 * (Z2R + std::sqrt(disc));
        m.L = l.inductance;
    } else if (l.kind == ElectricalLoadSpec::Kind::Cubic) {
        m.kind = wrsg::LoadModel::Kind::CubicSpeedLaw;
        m.anchor_speed = s.machine.rated_electrical_speed();
    }
    m.steps = l.steps;
    return m;
}

gasgen::OutputNoise output_noise(const Scenario& s) {
    gasgen::OutputNoise n;
    for (std::size_t c = 0; c < gasgen::kChannelCount; ++c) {
        const auto it = s.output_noise.find(std::string(gasgen::channel_name(static_cast<gasgen::Channel>(c))));
        if (it != s.output_noise.end()) n.std_dev[c] = it->second;
    }
    return n;
}

cosim::MachineConfig machine_config(const Scenario& s) {
    cosim::MachineConfig m;
    m.params = s.machine;
    m.load = load_model(s);
    m.fault = s.fault;
    m.faults = s.fault_events;
    m.avr.K_p = s.avr.kp;
    m.avr.K_i = s.avr.ki;
    m.avr.V_fd_max = s.avr.vfd_max;
    m.avr.V_set = s.avr.voltage_setpoint;
    m.avr_enabled = s.avr.enabled;
    m.avr_dt = s.avr.period;
    m.noise = s.machine_noise;
    m.record_every = s.record_every;
    return m;
}

control::GovernorState governor_state(const Scenario& s) {
    control::GovernorState g;
    g.K_p = s.governor.kp;
    g.K_i = s.governor.ki;
    g.wf_min = s.governor.wf_min;
    g.wf_max = s.governor.wf_max;
    g.wf_rate = s.governor.wf_rate;
    g.N_set = s.governor.speed_setpoint;
    return g;
}

cosim::CosimConfig timing(const Scenario& s) {
    cosim::CosimConfig c;
    c.macro_dt = s.macro_dt;
    c.t_end = s.duration;
    c.hook = speed_noise_hook(s.state_noise, mix(s.seed, 1));
    c.output_noise = output_noise(s);
    c.seed = s.seed;
    return c;
}

gasgen::GasGenInput ambient_input(const Scenario& s) {
    gasgen::GasGenInput u;
    u.altitude = s.ambient.altitude;
    u.mach = s.ambient.mach;
    u.dT_isa = s.ambient.dT_isa;
    return u;
}

cosim::TimeSeries without_rows(const cosim::TimeSeries& s) { return cosim::TimeSeries(s.names(), s.units()); }

}  // namespace

std::string_view mode_name(Mode m) { return kModes.name(m); }

void validate(const Scenario& s) {
    require(s.duration >= 0.0 && std::isfinite(s.duration), "/duration", ">= 0", s.duration);
    check_positive(s.macro_dt, "/macro_dt");
    const double steps = s.duration / s.macro_dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps), "/duration",
            "a whole number of macro steps", s.duration);
    require(s.record_every >= 1, "/record_every", ">= 1", static_cast<double>(s.record_every));
    require(s.ambient.altitude >= 0.0 && s.ambient.altitude <= 11000.0, "/ambient/altitude", "altitude in [0, 11000] m",
            s.ambient.altitude);
    require(s.ambient.mach >= 0.0 && s.ambient.mach < 1.0, "/ambient/mach", "mach in [0, 1)", s.ambient.mach);
    check_positive(s.design.shaft_power, "/design/shaft_power");
    require(s.design.pressure_ratio > 1.0, "/design/pressure_ratio", "> 1", s.design.pressure_ratio);
    check_positive(s.design.W2, "/design/W2");
    check_positive(s.design.fuel_flow, "/design/fuel_flow");
    check_positive(s.design.design_speed, "/design/design_speed");
    check_positive(s.design.inertia, "/design/inertia");
    check_health(s.health, "/health");
    for (std::size_t i = 0; i < s.health_events.size(); ++i)
        check_health(s.health_events[i].health, "/health_events/" + std::to_string(i));
    check_schedule(s.health_events, s.duration, "/health_events", false);
    check_positive(s.shaft_load.power, "/shaft_load/power");
    if (s.shaft_load.kind == gasgen::LoadLaw::Kind::Cubic)
        check_positive(s.shaft_load.anchor_speed, "/shaft_load/anchor_speed");
    require(s.fuel_flow >= 0.0, "/fuel_flow", ">= 0", s.fuel_flow);
    check_schedule(s.fuel_events, s.duration, "/fuel_events", false);
    for (std::size_t i = 0; i < s.fuel_events.size(); ++i)
        check_positive(s.fuel_events[i].scale, "/fuel_events/" + std::to_string(i) + "/scale");

    try {
        s.machine.validate();
    } catch (const Error& e) {
        schema_error("/machine", "valid machine parameters", e.what());
    }
    check_positive(s.load.power, "/load/power");
    check_positive(s.load.voltage, "/load/voltage");
    require(s.load.inductance >= 0.0, "/load/inductance", ">= 0", s.load.inductance);
    check_schedule(s.load.steps, s.duration, "/load/steps", true);
    for (std::size_t i = 0; i < s.load.steps.size(); ++i)
        check_positive(s.load.steps[i].scale, "/load/steps/" + std::to_string(i) + "/scale");
    check_fault(s.fault, "/fault");
    for (std::size_t i = 0; i < s.fault_events.size(); ++i)
        check_fault(s.fault_events[i].fault, "/fault_events/" + std::to_string(i));
    check_schedule(s.fault_events, s.duration, "/fault_events", true);
    check_positive(s.generator_speed, "/generator_speed");

    check_positive(s.governor.speed_setpoint, "/governor/speed_setpoint");
    require(s.governor.kp >= 0.0, "/governor/kp", ">= 0", s.governor.kp);
    require(s.governor.ki >= 0.0, "/governor/ki", ">= 0", s.governor.ki);
    require(s.governor.wf_min >= 0.0, "/governor/wf_min", ">= 0", s.governor.wf_min);
    require(s.governor.wf_max > s.governor.wf_min, "/governor/wf_max", "> wf_min", s.governor.wf_max);
    check_positive(s.governor.wf_rate, "/governor/wf_rate");
    require(s.avr.kp >= 0.0, "/avr/kp", ">= 0", s.avr.kp);
    require(s.avr.ki >= 0.0, "/avr/ki", ">= 0", s.avr.ki);
    check_positive(s.avr.vfd_max, "/avr/vfd_max");
    check_positive(s.avr.voltage_setpoint, "/avr/voltage_setpoint");
    check_positive(s.avr.period, "/avr/period");
    require(s.coupling.eta > 0.0 && s.coupling.eta <= 1.0, "/coupling/eta", "eta in (0, 1]", s.coupling.eta);
    check_positive(s.coupling.omega, "/coupling/omega");

    require(s.machine_noise.std_w1 >= 0.0, "/noise/stator", ">= 0", s.machine_noise.std_w1);
    require(s.machine_noise.std_w2 >= 0.0, "/noise/rotor", ">= 0", s.machine_noise.std_w2);
    require(s.machine_noise.std_vi >= 0.0, "/noise/current", ">= 0", s.machine_noise.std_vi);
    require(s.machine_noise.std_vv >= 0.0, "/noise/voltage", ">= 0", s.machine_noise.std_vv);
    require(s.state_noise >= 0.0, "/noise/state", ">= 0", s.state_noise);
    for (const auto& [name, sd] : s.output_noise) {
        bool known = false;
        for (std::size_t c = 0; c < gasgen::kChannelCount; ++c)
            known = known || gasgen::channel_name(static_cast<gasgen::Channel>(c)) == name;
        if (!known) schema_error("/noise/outputs/" + name, "a gas-path channel name", "\"" + name + "\"");
        require(sd >= 0.0, "/noise/outputs/" + name, ">= 0", sd);
    }
}

Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error("/", "well-formed JSON", e.what());
    }
    Scenario s;
    Reader r(j, "");
    describe(r, s);
    r.finish();
    validate(s);
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    Scenario copy = s;
    ordered_json out;
    Writer w(out);
    describe(w, copy);
    return out.dump(2) + "\n";
}

std::vector<std::string> preset_names() { return {"design", "fuel-step", "joint-fault"}; }

Scenario preset(std::string_view name) {
    const gasgen::HealthParams degraded{0.99, 0.97, 0.98, 1.04};
    Scenario s;
    if (name == "design") return s;
    if (name == "fuel-step") {
        s.name = "fuel-step";
        s.mode = Mode::GasGen;
        s.duration = 10.0;
        s.health = degraded;
        s.shaft_load = {gasgen::LoadLaw::Kind::Cubic, 230.0, 36050.0};
        s.fuel_events = {{3.0, 1.1}};
        s.governor.enabled = false;
        s.outputs.slow = {"XNHPC", "PWSD", "wf", "T3", "P3", "T4", "T5", "HPCSM", "SFC"};
        return s;
    }
    if (name == "joint-fault") {
        s.name = "joint-fault";
        s.duration = 12.0;
        s.record_every = 10;
        s.load.steps = {{2.0, 150.0 / 225.0}};
        s.health_events = {{6.0, degraded}};
        s.fault_events = {{10.0, {0.05, 1.0}}};
        s.outputs.slow = {"XNHPC", "Pe", "wf", "T3", "P3", "T4", "HPCSM", "Va_rms", "Vb_rms", "Vc_rms",
                          "Ia_rms", "Ib_rms", "Ic_rms", "Vfd", "Psg_total", "Psg_loss"};
        return s;
    }
    schema_error("preset", "one of design, fuel-step, joint-fault", "\"" + std::string(name) + "\"");
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario(os.str());
}

cosim::JointConfig joint_config(const Scenario& s, const gasgen::GasGenParams& sized) {
    cosim::JointConfig c;
    c.gasgen = sized;
    c.ambient = ambient_input(s);
    c.health = s.health;
    c.health_events = s.health_events;
    c.governor = governor_state(s);
    c.governor_enabled = s.governor.enabled;
    c.machine = machine_config(s);
    c.coupling = s.coupling;
    c.cosim = timing(s);
    return c;
}

cosim::GasGenRunConfig gasgen_config(const Scenario& s, const gasgen::GasGenParams& sized) {
    cosim::GasGenRunConfig c;
    c.gasgen = sized;
    c.ambient = ambient_input(s);
    c.health = s.health;
    c.health_events = s.health_events;
    c.load = s.shaft_load;
    c.wf0 = s.fuel_flow;
    c.fuel_events = s.fuel_events;
    c.governor = governor_state(s);
    c.governor_enabled = s.governor.enabled;
    c.cosim = timing(s);
    return c;
}

cosim::GeneratorRunConfig generator_config(const Scenario& s) {
    cosim::GeneratorRunConfig c;
    c.machine = machine_config(s);
    c.speed_rpm = s.generator_speed;
    c.report_dt = s.macro_dt;
    c.t_end = s.duration;
    c.seed = s.seed;
    return c;
}

cosim::StateProcess speed_noise_hook(double std_dev, std::uint64_t seed) {
    if (std_dev == 0.0) return {};
    return [std_dev, seed](const gasgen::GasGenState& x, std::size_t k) {
        std::mt19937_64 rng(mix(seed, k));
        std::normal_distribution<double> n(0.0, std_dev);
        return gasgen::GasGenState{x.N + n(rng)};
    };
}

cosim::RunResult run(const Scenario& s, const RunOptions& options) {
    validate(s);
    auto compose = [&](cosim::StateProcess own) -> cosim::StateProcess {
        if (!options.hook) return own;
        if (!own) return options.hook;
        return [own, extra = options.hook](const gasgen::GasGenState& x, std::size_t k) { return extra(own(x, k), k); };
    };
    auto sized = [&] { return options.sized ? *options.sized : gasgen::design_point_size(s.design).params; };
    cosim::RunResult r;
    switch (s.mode) {
        case Mode::Joint: {
            cosim::JointConfig c = joint_config(s, sized());
            c.cosim.hook = compose(c.cosim.hook);
            r = cosim::run_joint(c);
            break;
        }
        case Mode::GasGen: {
            cosim::GasGenRunConfig c = gasgen_config(s, sized());
            c.cosim.hook = compose(c.cosim.hook);
            r = cosim::run_gasgen(c);
            break;
        }
        case Mode::Generator:
            r = cosim::run_generator(generator_config(s));
            break;
    }
    if (s.duration == 0.0) {
        r.fast = without_rows(r.fast);
        r.slow = without_rows(r.slow);
    }
    return r;
}

cosim::TimeSeries select(const cosim::TimeSeries& series, const std::vector<std::string>& channels) {
    std::vector<std::size_t> idx;
    std::vector<std::string> units;
    for (const std::string& c : channels) {
        idx.push_back(series.index(c));
        units.push_back(series.units()[idx.back()]);
    }
    cosim::TimeSeries out(channels, units);
    std::vector<double> row(idx.size());
    for (std::size_t r = 0; r < series.size(); ++r) {
        for (std::size_t k = 0; k < idx.size(); ++k) row[k] = series.at(r, idx[k]);
        out.append(series.time()[r], row);
    }
    return out;
}

Tracks selected(const Scenario& s, const cosim::RunResult& r) {
    return {s.outputs.fast.empty() ? r.fast : select(r.fast, s.outputs.fast),
            s.outputs.slow.empty() ? r.slow : select(r.slow, s.outputs.slow)};
}

}  // namespace apu::scenario
