#pragma once

#include <array>

#include "gridss/dq.hpp"

namespace gridss {

/// The seven grid-forming gains that the sweep varies.
struct GfmGains {
    double t_a = 1.25;   // virtual inertia time constant, s
    double k_d = 250.0;  // virtual damping vs PLL frequency
    double k_q = 0.125;  // reactive power droop
    double k_pv = 0.55, k_iv = 600.0;  // voltage loop PI
    double k_pc = 0.74, k_ic = 7.45;   // current loop PI

    void validate() const;
};

/// Grid-following outer PI gains plus its fixed inner current loop.
struct GflGains {
    double k_pp = 0.0059, k_ip = 7.36;
    double k_pq = 0.0059, k_iq = 7.36;
    double k_pc = 0.74, k_ic = 1.19;

    void validate() const;
};

struct LclFilterParams {
    double l_f = 0.08, r_f = 0.003;
    double c_f = 0.074;
    double l_g = 0.2, r_g = 0.01;

    void validate() const;
};

struct PllParams {
    double omega_lp = 500.0;  // measurement low-pass corner, rad/s
    double k_p = 0.084, k_i = 4.69;

    void validate() const;
};

/// Fixed auxiliary GFM parameters not part of the swept gain set.
struct GfmFixedParams {
    double omega_f = 1000.0;  // reactive power measurement filter, rad/s
    double k_ffi = 0.0;       // grid current feedforward into the voltage loop
    double k_ffv = 0.0;       // voltage feedforward into the current loop
    double r_v = 0.0;         // virtual output impedance applied to the
    double l_v = 0.2;         // voltage reference
    double k_ad = 0.2;        // active damping gain on the high-passed
    double omega_ad = 50.0;   // capacitor voltage, rad/s
};

struct GflFixedParams {
    double k_ffv = 0.0;
};

struct GfmState {
    double dtheta_vsm = 0.0;  // virtual rotor angle relative to network frame
    double omega_vsm = 1.0;
    double q_m = 0.0;                     // filtered reactive power
    double xi_d = 0.0, xi_q = 0.0;        // voltage loop integrators
    double gamma_d = 0.0, gamma_q = 0.0;  // current loop integrators
    double v_lp_d = 0.0, v_lp_q = 0.0;    // PLL-filtered capacitor voltage
    double eps_pll = 0.0;                 // PLL integrator
    double dtheta_pll = 0.0;              // PLL angle relative to network frame
    double phi_d = 0.0, phi_q = 0.0;      // active damping low-pass states
    Dq i_cv, v_o, i_g;                    // LCL filter states, network frame

    static constexpr int kCount = 19;
    [[nodiscard]] std::array<double, kCount> to_array() const;
    static GfmState from_array(const double* a);
};

struct GflState {
    double v_lp_d = 0.0, v_lp_q = 0.0;
    double eps_pll = 0.0;
    double dtheta_pll = 0.0;
    double sigma_p = 0.0, sigma_q = 0.0;  // outer power-loop integrators
    double gamma_d = 0.0, gamma_q = 0.0;
    Dq i_cv, v_o, i_g;

    static constexpr int kCount = 14;
    [[nodiscard]] std::array<double, kCount> to_array() const;
    static GflState from_array(const double* a);
};

struct GfmSetpoints {
    double p_ref = 0.0;
    double q_ref = 0.0;
    double v_ref = 1.0;
};

struct GflSetpoints {
    double p_ref = 0.0;
    double q_ref = 0.0;
};

template <int N>
struct InverterDerivatives {
    std::array<double, N> dx{};
    Dq terminal_current;  // = grid-side filter current state
};

/// VSM grid-forming inverter: virtual swing + reactive droop outer loop,
/// cascaded voltage/current PI, averaged converter, LCL filter. Filter states
/// live in the network frame; control acts in the VSM frame.
InverterDerivatives<GfmState::kCount> gfm_residual(
    const GfmState& state, const Dq& terminal_v, const GfmGains& gains,
    const LclFilterParams& filter, const PllParams& pll, const GfmFixedParams& fixed,
    const GfmSetpoints& setpoints, double frame_speed, double omega_b);

/// Grid-following inverter: PLL, PQ outer PI loops, single current PI, LCL filter.
InverterDerivatives<GflState::kCount> gfl_residual(
    const GflState& state, const Dq& terminal_v, const GflGains& gains,
    const LclFilterParams& filter, const PllParams& pll, const GflFixedParams& fixed,
    const GflSetpoints& setpoints, double frame_speed, double omega_b);

struct GfmInit {
    GfmState state;
    GfmSetpoints setpoints;
};

struct GflInit {
    GflState state;
    GflSetpoints setpoints;
};

/// Equilibrium back-solves: state and setpoints such that the device delivers
/// exactly (p, q) into the network at terminal_v with zero derivatives.
GfmInit gfm_init(const Dq& terminal_v, double p, double q, const GfmGains& gains,
                 const LclFilterParams& filter, const PllParams& pll,
                 const GfmFixedParams& fixed, double omega_b);

GflInit gfl_init(const Dq& terminal_v, double p, double q, const GflGains& gains,
                 const LclFilterParams& filter, const PllParams& pll,
                 const GflFixedParams& fixed, double omega_b);

}  // namespace gridss
