#pragma once

#include <array>

#include "gridss/dq.hpp"

namespace gridss {

/// Anderson-Fouad machine constants, pu on the system base.
struct MachineParams {
    double r_a = 0.0;
    double x_d = 0.146, x_q = 0.0969;
    double x_d_p = 0.0608, x_q_p = 0.0969;
    double x_d_pp = 0.040, x_q_pp = 0.060;
    double t_d0_p = 8.96, t_q0_p = 0.31;
    double t_d0_pp = 0.040, t_q0_pp = 0.060;
    double h = 23.64;  // inertia constant, s
    double d = 2.0;    // shaft damping, pu

    void validate() const;
};

/// IEEE Type 1 voltage regulator with exponential exciter saturation.
struct AvrType1Params {
    double k_a = 20.0, t_a = 0.2;
    double k_e = 1.0, t_e = 0.314;
    double k_f = 0.063, t_f = 0.35;
    double t_r = 0.02;
    double a_e = 0.0039, b_e = 1.555;

    void validate() const;
    [[nodiscard]] double saturation(double v_f) const;
};

/// 12 dynamic states: six electrical, two shaft, four regulator.
struct MachineState {
    double psi_d = 0.0, psi_q = 0.0;
    double e_q_p = 0.0, e_d_p = 0.0;
    double e_q_pp = 0.0, e_d_pp = 0.0;
    double delta = 0.0;   // rotor angle relative to the network frame, rad
    double omega = 1.0;   // rotor speed, pu
    double v_m = 0.0;     // AVR voltage measurement
    double v_r1 = 0.0;    // regulator output
    double v_r2 = 0.0;    // rate feedback
    double v_f = 0.0;     // field voltage

    static constexpr int kCount = 12;
    [[nodiscard]] std::array<double, kCount> to_array() const;
    static MachineState from_array(const double* a);
};

/// Operating references fixed at initialization: governor input and AVR setpoint.
struct MachineInputs {
    double mech_power = 0.0;
    double v_ref = 0.0;
};

struct MachineDerivatives {
    std::array<double, MachineState::kCount> dx{};
    Dq terminal_current;  // network frame, flowing into the network
    double p_e = 0.0;     // air-gap power
};

/// Machine dynamics. `terminal_v` is in the network frame; `frame_speed` is the
/// speed of that frame in pu (the reference device's rotor speed once assembled,
/// 1.0 for a machine studied against an infinite bus).
MachineDerivatives machine_residual(const MachineState& state, const Dq& terminal_v,
                                    const MachineParams& params, const AvrType1Params& avr,
                                    const MachineInputs& inputs, double frame_speed,
                                    double omega_b);

/// Current injected into the network for a given state, network frame.
Dq machine_terminal_current(const MachineState& state, const MachineParams& params);

struct MachineInit {
    MachineState state;
    MachineInputs inputs;
};

/// Back-solve the unique machine equilibrium consistent with a terminal
/// condition (voltage phasor plus delivered p, q). The returned state zeroes
/// machine_residual at frame_speed = 1.
MachineInit machine_init_from_terminal(const Dq& terminal_v, double p, double q,
                                       const MachineParams& params, const AvrType1Params& avr,
                                       double omega_b);

}  // namespace gridss
