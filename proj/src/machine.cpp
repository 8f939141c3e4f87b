#include "gridss/machine.hpp"

#include <cmath>
#include <numbers>

#include "gridss/errors.hpp"

namespace gridss {

void MachineParams::validate() const {
    if (!(x_d >= x_d_p && x_d_p >= x_d_pp && x_d_pp > 0.0)) {
        throw ConfigError("machine d-axis reactances must satisfy x_d >= x_d' >= x_d'' > 0");
    }
    if (!(x_q >= x_q_p && x_q_p >= x_q_pp && x_q_pp > 0.0)) {
        throw ConfigError("machine q-axis reactances must satisfy x_q >= x_q' >= x_q'' > 0");
    }
    if (t_d0_p <= 0.0 || t_q0_p <= 0.0 || t_d0_pp <= 0.0 || t_q0_pp <= 0.0) {
        throw ConfigError("machine time constants must be > 0");
    }
    if (h <= 0.0) throw ConfigError("inertia constant must be > 0");
    if (d < 0.0) throw ConfigError("damping must be >= 0");
    if (r_a < 0.0) throw ConfigError("stator resistance must be >= 0");
}

void AvrType1Params::validate() const {
    if (t_a <= 0.0 || t_e <= 0.0 || t_f <= 0.0 || t_r <= 0.0) {
        throw ConfigError("AVR time constants must be > 0");
    }
    if (!std::isfinite(k_a) || !std::isfinite(k_e) || !std::isfinite(k_f)) {
        throw ConfigError("AVR gains must be finite");
    }
}

double AvrType1Params::saturation(double v_f) const { return a_e * std::exp(b_e * std::abs(v_f)); }

std::array<double, MachineState::kCount> MachineState::to_array() const {
    return {psi_d, psi_q, e_q_p, e_d_p, e_q_pp, e_d_pp, delta, omega, v_m, v_r1, v_r2, v_f};
}

MachineState MachineState::from_array(const double* a) {
    MachineState s;
    s.psi_d = a[0];
    s.psi_q = a[1];
    s.e_q_p = a[2];
    s.e_d_p = a[3];
    s.e_q_pp = a[4];
    s.e_d_pp = a[5];
    s.delta = a[6];
    s.omega = a[7];
    s.v_m = a[8];
    s.v_r1 = a[9];
    s.v_r2 = a[10];
    s.v_f = a[11];
    return s;
}

Dq machine_terminal_current(const MachineState& s, const MachineParams& p) {
    // Stator flux relations give the machine-frame current directly.
    const double i_d = (s.e_q_pp - s.psi_d) / p.x_d_pp;
    const double i_q = (-s.e_d_pp - s.psi_q) / p.x_q_pp;
    return rotate_frame(Dq{i_d, i_q}, s.delta);
}

MachineDerivatives machine_residual(const MachineState& s, const Dq& terminal_v,
                                    const MachineParams& p, const AvrType1Params& avr,
                                    const MachineInputs& in, double frame_speed,
                                    double omega_b) {
    const Dq v = rotate_frame(terminal_v, -s.delta);  // machine frame
    const double i_d = (s.e_q_pp - s.psi_d) / p.x_d_pp;
    const double i_q = (-s.e_d_pp - s.psi_q) / p.x_q_pp;

    MachineDerivatives out;
    auto& dx = out.dx;

    dx[0] = omega_b * (p.r_a * i_d + s.omega * s.psi_q + v.d);
    dx[1] = omega_b * (p.r_a * i_q - s.omega * s.psi_d + v.q);
    dx[2] = (-s.e_q_p - (p.x_d - p.x_d_p) * i_d + s.v_f) / p.t_d0_p;
    dx[3] = (-s.e_d_p + (p.x_q - p.x_q_p) * i_q) / p.t_q0_p;
    dx[4] = (-s.e_q_pp + s.e_q_p - (p.x_d_p - p.x_d_pp) * i_d) / p.t_d0_pp;
    dx[5] = (-s.e_d_pp + s.e_d_p + (p.x_q_p - p.x_q_pp) * i_q) / p.t_q0_pp;

    out.p_e = s.psi_d * i_q - s.psi_q * i_d;
    dx[6] = omega_b * (s.omega - frame_speed);
    dx[7] = (in.mech_power - out.p_e - p.d * (s.omega - 1.0)) / (2.0 * p.h);

    const double s_e = avr.saturation(s.v_f);
    dx[8] = (terminal_v.mag() - s.v_m) / avr.t_r;
    dx[9] = (avr.k_a * (in.v_ref - s.v_m - s.v_r2 - (avr.k_f / avr.t_f) * s.v_f) - s.v_r1) /
            avr.t_a;
    dx[10] = -((avr.k_f / avr.t_f) * s.v_f + s.v_r2) / avr.t_f;
    dx[11] = -(s.v_f * (avr.k_e + s_e) - s.v_r1) / avr.t_e;

    out.terminal_current = rotate_frame(Dq{i_d, i_q}, s.delta);
    return out;
}

MachineInit machine_init_from_terminal(const Dq& terminal_v, double p, double q,
                                       const MachineParams& params, const AvrType1Params& avr,
                                       double omega_b) {
    params.validate();
    avr.validate();
    const double v_mag = terminal_v.mag();
    if (v_mag <= 0.0) throw InitError("machine terminal voltage magnitude must be > 0");

    const Dq s_power{p, q};
    const Dq i_net = conj(Dq(s_power.c() / terminal_v.c()));

    // Locate the rotor: E = v + (r_a + j x_q) i lies on the machine q axis.
    const Dq e_locator = terminal_v + Cplx(params.r_a, params.x_q) * i_net;
    if (e_locator.mag() < 1e-12) throw InitError("machine internal voltage collapsed to zero");
    const double delta = e_locator.arg() - std::numbers::pi / 2.0;

    const Dq v = rotate_frame(terminal_v, -delta);
    const Dq i = rotate_frame(i_net, -delta);

    MachineState s;
    s.delta = delta;
    s.omega = 1.0;
    s.e_d_p = (params.x_q - params.x_q_p) * i.q;
    s.e_d_pp = (params.x_q - params.x_q_pp) * i.q;
    s.e_q_pp = v.q + params.r_a * i.q + params.x_d_pp * i.d;
    s.e_q_p = s.e_q_pp + (params.x_d_p - params.x_d_pp) * i.d;
    s.v_f = s.e_q_p + (params.x_d - params.x_d_p) * i.d;
    s.psi_d = s.e_q_pp - params.x_d_pp * i.d;
    s.psi_q = -s.e_d_pp - params.x_q_pp * i.q;

    if (!std::isfinite(s.v_f)) throw InitError("machine field requirement is not finite");

    s.v_m = v_mag;
    s.v_r2 = -(avr.k_f / avr.t_f) * s.v_f;
    s.v_r1 = s.v_f * (avr.k_e + avr.saturation(s.v_f));

    MachineInputs inputs;
    inputs.mech_power = s.psi_d * i.q - s.psi_q * i.d;
    inputs.v_ref = v_mag + s.v_r1 / avr.k_a;

    (void)omega_b;
    return {s, inputs};
}

}  // namespace gridss
