#include "apu/wrsg/machine.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "apu/error.hpp"

namespace apu::wrsg {

using numerics::DenseMatrix;
using numerics::LuFactorization;
using numerics::Vector;

double WrsgParams::rated_electrical_speed() const { return 2.0 * std::numbers::pi * frequency; }

void WrsgParams::validate() const {
    const double positive[] = {rated_power, rated_voltage, frequency, r_s, L_ls, L_md, L_mq, r_fd,
                               L_lf,        r_kd,          L_lkd,     r_kq, L_lkq, L_s, eta_sg, machine_count};
    for (double v : positive)
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(Errc::InvalidArgument, "generator parameters must be positive and finite");
    if (pole_pairs < 1) throw Error(Errc::InvalidArgument, "pole_pairs must be >= 1");
    if (eta_sg > 1.0) throw Error(Errc::InvalidArgument, "eta_sg must lie in (0, 1]");
}

void FaultParams::validate() const {
    if (!(mu >= 0.0 && mu <= 1.0)) throw Error(Errc::InvalidArgument, "fault mu must lie in [0, 1]");
    if (!(k_rf >= 0.0)) throw Error(Errc::InvalidArgument, "fault k_rf must be >= 0");
}

InductanceModel build_L(const WrsgParams& p, double theta) {
    InductanceModel m;
    m.L = DenseMatrix(6, 6);
    DenseMatrix& L = m.L;
    L(0, 0) = -(p.L_mq + p.L_ls);
    L(0, 5) = p.L_mq;
    L(1, 1) = -(p.L_md + p.L_ls);
    L(1, 3) = p.L_md;
    L(1, 4) = p.L_md;
    L(2, 2) = -p.L_s;
    L(3, 1) = -p.L_md;
    L(3, 3) = p.L_md + p.L_lf;
    L(3, 4) = p.L_md;
    L(4, 1) = -p.L_md;
    L(4, 3) = p.L_md;
    L(4, 4) = p.L_md + p.L_lkd;
    L(5, 0) = -p.L_mq;
    L(5, 5) = p.L_mq + p.L_lkq;
    m.selector = DenseMatrix(6, 3);
    for (std::size_t k = 0; k < 3; ++k) m.selector(k, k) = 1.0;
    m.fault_column = park_phase_a_column(theta);
    m.L_s = p.L_s;
    return m;
}

WrsgState wrap_angle(WrsgState s) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double th = std::fmod(s.x[7], two_pi);
    if (th < 0.0) th += two_pi;
    if (th >= two_pi) th = 0.0;
    s.x[7] = th;
    return s;
}

LoadModel LoadModel::resistive(double power_kw, double phase_voltage) {
    LoadModel m;
    m.kind = Kind::ResistiveBank;
    m.R = 3.0 * phase_voltage * phase_voltage / (power_kw * 1e3);
    return m;
}

double LoadModel::scale_at(double t) const {
    double s = 1.0;
    for (const auto& st : steps) {
        if (st.time <= t) s = st.scale;
        else break;
    }
    return s;
}

ElectricalLoad LoadModel::at(double t, double w_r) const {
    const double s = scale_at(t);
    ElectricalLoad e;
    e.R = R / s;
    if (kind == Kind::SeriesRL) e.L = L / s;
    if (kind == Kind::CubicSpeedLaw && w_r > 0.0) {
        const double ratio = anchor_speed / w_r;
        e.R *= ratio * ratio * ratio;
    }
    return e;
}

void LoadModel::validate() const {
    if (!(R > 0.0) || !std::isfinite(R)) throw Error(Errc::InvalidArgument, "load resistance must be > 0");
    if (kind == Kind::SeriesRL && !(L >= 0.0)) throw Error(Errc::InvalidArgument, "load inductance must be >= 0");
    if (kind == Kind::CubicSpeedLaw && !(anchor_speed > 0.0))
        throw Error(Errc::InvalidArgument, "cubic load needs a positive anchor speed");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i].scale > 0.0)) throw Error(Errc::InvalidArgument, "load step scale must be > 0");
        if (i > 0 && !(steps[i].time > steps[i - 1].time))
            throw Error(Errc::InvalidArgument, "load step times must increase strictly");
    }
}

namespace {

// Unknowns (i_q, i_d, i_0, i_fd, i_kd, i_kq[, i_f]).
struct CurrentSystem {
    DenseMatrix M;
    Vector rhs;
};

CurrentSystem assemble(const WrsgState& s, const FaultParams& fault, const InductanceModel& model,
                       const WrsgParams& p, double load_inductance) {
    const bool closed = !fault.open();
    const std::size_t n = closed ? 7 : 6;
    CurrentSystem sys{DenseMatrix(n, n), Vector(n)};
    for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t c = 0; c < 6; ++c) sys.M(r, c) = model.L(r, c);
        sys.rhs[r] = s.x[r];
    }
    for (std::size_t k = 0; k < 3; ++k) sys.M(k, k) -= load_inductance;
    if (closed) {
        const double mu = fault.mu;
        const Vec3& c = model.fault_column;
        const Vec3 e = inverse_park_phase_a_row(s.theta());
        for (std::size_t r = 0; r < 6; ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 3; ++k) acc += model.L(r, k) * c[k];
            sys.M(r, 6) = -mu * acc;
        }
        double ea = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            sys.M(6, k) = mu * load_inductance * e[k];
            ea += e[k] * s.x[k];
        }
        const double leak = fault.loop_leakage(p);
        if (!(leak > 0.0))
            throw Error(Errc::SingularSystem, "fault loop has no leakage at mu=" + std::to_string(mu));
        sys.M(6, 6) = leak;
        sys.rhs[6] = s[StateIndex::SaF] - mu * ea;
    }
    return sys;
}

Vector solve_system(const DenseMatrix& M, const Vector& rhs) {
    try {
        return LuFactorization(M).solve(rhs);
    } catch (const Error& e) {
        if (e.code() == Errc::SingularMatrix) throw Error(Errc::SingularSystem, e.what());
        throw;
    }
}

Currents unpack(const Vector& x) {
    Currents c;
    c.stator = {x[0], x[1], x[2]};
    c.rotor = {x[3], x[4], x[5]};
    c.fault = x.size() > 6 ? x[6] : 0.0;
    return c;
}

Vec3 rotate(const Vec3& v, double w) { return {w * v[1], -w * v[0], 0.0}; }

}  // namespace

Currents currents_from_flux(const WrsgState& state, const FaultParams& fault, const InductanceModel& model,
                            const WrsgParams& params, double load_inductance) {
    const CurrentSystem sys = assemble(state, fault, model, params, load_inductance);
    return unpack(solve_system(sys.M, sys.rhs));
}

namespace {

struct Evaluation {
    WrsgState dxdt;
    Currents currents;
};

Evaluation evaluate(const WrsgParams& p, const WrsgState& s, double V_fd, double w_r, const FaultParams& fault,
                    const ElectricalLoad& load, const EquationNoise& noise) {
    const InductanceModel model = build_L(p, s.theta());
    const Currents cur = currents_from_flux(s, fault, model, p, load.L);
    const bool closed = !fault.open();
    Evaluation ev{{}, cur};
    WrsgState& d = ev.dxdt;

    const Vec3 turn = rotate({s.x[0], s.x[1], s.x[2]}, w_r);
    const double rs_load = p.r_s + load.R;
    const double fault_drop = closed ? fault.mu * p.r_s * cur.fault : 0.0;
    for (std::size_t k = 0; k < 3; ++k)
        d.x[k] = rs_load * cur.stator[k] - turn[k] - fault_drop * model.fault_column[k] + noise.stator[k];

    const double rotor_r[3] = {p.r_fd, p.r_kd, p.r_kq};
    for (std::size_t k = 0; k < 3; ++k) d.x[3 + k] = -rotor_r[k] * cur.rotor[k] + noise.rotor[k];
    d.x[3] += V_fd;

    if (closed) {
        const Vec3 e = inverse_park_phase_a_row(s.theta());
        const double i_a = e[0] * cur.stator[0] + e[1] * cur.stator[1] + e[2] * cur.stator[2];
        d.x[6] = fault.r_sa_f(p) * (i_a - cur.fault) - fault.r_f(p) * cur.fault;
    }
    d.x[7] = w_r;
    return ev;
}

}  // namespace

WrsgState machine_derivatives(const WrsgParams& params, const WrsgState& state, double V_fd, double w_r,
                              const FaultParams& fault, const ElectricalLoad& load, const EquationNoise& noise) {
    return evaluate(params, state, V_fd, w_r, fault, load, noise).dxdt;
}

Terminal terminal(const WrsgParams& p, const WrsgState& s, double V_fd, double w_r, const FaultParams& fault,
                  const ElectricalLoad& load, const EquationNoise& noise) {
    Terminal out;
    const double theta = s.theta();
    Vec3 v_qd0{};
    Currents cur;
    if (load.L == 0.0) {
        cur = currents_from_flux(s, fault, build_L(p, theta), p, 0.0);
        for (std::size_t k = 0; k < 3; ++k) v_qd0[k] = load.R * cur.stator[k];
    } else {
        // v = R i + W_r (L i) + L di/dt, with di/dt from differentiating the current solve
        const Evaluation ev = evaluate(p, s, V_fd, w_r, fault, load, noise);
        cur = ev.currents;
        const InductanceModel model = build_L(p, theta);
        const bool closed = !fault.open();
        const CurrentSystem sys = assemble(s, fault, model, p, load.L);
        Vector b(ev.dxdt.x.begin(), ev.dxdt.x.begin() + 6);
        if (closed) {
            const double mu = fault.mu;
            const Vec3 e = inverse_park_phase_a_row(theta);
            const Vec3 de{-w_r * std::sin(theta), w_r * std::cos(theta), 0.0};
            const Vec3 dc{-(2.0 / 3.0) * w_r * std::sin(theta), (2.0 / 3.0) * w_r * std::cos(theta), 0.0};
            double b6 = ev.dxdt.x[6];
            for (std::size_t k = 0; k < 3; ++k) b6 -= mu * (de[k] * s.x[k] + e[k] * ev.dxdt.x[k]);
            b.push_back(b6);
            // subtract dM/dt * x
            for (std::size_t r = 0; r < 6; ++r) {
                double acc = 0.0;
                for (std::size_t k = 0; k < 3; ++k) acc += model.L(r, k) * dc[k];
                b[r] += mu * acc * cur.fault;
            }
            for (std::size_t k = 0; k < 3; ++k) b[6] -= mu * load.L * de[k] * cur.stator[k];
        }
        const Vector dx = solve_system(sys.M, b);
        const Vec3 turn = rotate(cur.stator, w_r);
        for (std::size_t k = 0; k < 3; ++k)
            v_qd0[k] = load.R * cur.stator[k] + load.L * (turn[k] + dx[k]);
    }
    out.currents = cur;
    out.i_f = cur.fault;
    out.v_abc = inverse_park(v_qd0, theta);
    out.i_abc = inverse_park(cur.stator, theta);
    return out;
}

MechPower mech_power(const Vec3& v_abc, const Vec3& i_abc, double i_f, const FaultParams& fault,
                     const WrsgParams& p) {
    const double terminal_w = v_abc[0] * i_abc[0] + v_abc[1] * i_abc[1] + v_abc[2] * i_abc[2];
    double loss_w = 0.0;
    if (i_f != 0.0) {
        const double r_sa_f = fault.r_sa_f(p);
        const double i_a = i_abc[0];
        loss_w = i_f * i_f * fault.r_f(p) + (i_a - i_f) * (i_a - i_f) * r_sa_f - i_a * i_a * r_sa_f;
    }
    const double k = p.machine_count / p.eta_sg * 1e-3;
    return {k * (terminal_w + loss_w), k * loss_w};
}

namespace {

struct SteadyCurrents {
    double i_q, i_d, i_fd;
};

SteadyCurrents steady_currents(const WrsgParams& p, double V_fd, double w, const ElectricalLoad& load) {
    const double r = p.r_s + load.R;
    const double Lq = p.L_mq + p.L_ls + load.L;
    const double Ld = p.L_md + p.L_ls + load.L;
    const double i_fd = V_fd / p.r_fd;
    const double i_q = w * p.L_md * i_fd * r / (r * r + w * w * Ld * Lq);
    const double i_d = w * Lq * i_q / r;
    return {i_q, i_d, i_fd};
}

}  // namespace

WrsgState steady_state(const WrsgParams& p, double V_fd, double w_r, const ElectricalLoad& load, double theta) {
    const SteadyCurrents c = steady_currents(p, V_fd, w_r, load);
    const InductanceModel model = build_L(p, theta);
    const double i[6] = {c.i_q, c.i_d, 0.0, c.i_fd, 0.0, 0.0};
    WrsgState s;
    for (std::size_t r = 0; r < 6; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 6; ++k) acc += model.L(r, k) * i[k];
        s.x[r] = acc;
    }
    s.x[0] -= load.L * c.i_q;
    s.x[1] -= load.L * c.i_d;
    s.x[7] = theta;
    return s;
}

double field_voltage_for(const WrsgParams& p, double phase_rms, double w_r, const ElectricalLoad& load) {
    const SteadyCurrents c = steady_currents(p, 1.0, w_r, load);
    const double v_q = load.R * c.i_q + w_r * load.L * c.i_d;
    const double v_d = load.R * c.i_d - w_r * load.L * c.i_q;
    const double rms_per_volt = std::hypot(v_q, v_d) / std::sqrt(2.0);
    if (!(rms_per_volt > 0.0)) throw Error(Errc::InvalidArgument, "no terminal voltage at this speed and load");
    return phase_rms / rms_per_volt;
}

WrsgState rebase_load(const WrsgParams& p, const WrsgState& s, const FaultParams& fault, double old_inductance,
                      double new_inductance) {
    if (old_inductance == new_inductance) return s;
    const Currents c = currents_from_flux(s, fault, build_L(p, s.theta()), p, old_inductance);
    WrsgState out = s;
    for (std::size_t k = 0; k < 3; ++k) out.x[k] += (old_inductance - new_inductance) * c.stator[k];
    return out;
}

}  // namespace apu::wrsg
