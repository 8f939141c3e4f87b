#include "gridss/inverter.hpp"

#include <cmath>

#include "gridss/errors.hpp"

namespace gridss {

void GfmGains::validate() const {
    if (t_a <= 0.0 || k_d <= 0.0 || k_q <= 0.0 || k_pv <= 0.0 || k_iv <= 0.0 || k_pc <= 0.0 ||
        k_ic <= 0.0) {
        throw ConfigError("GFM gains must be strictly positive");
    }
}

void GflGains::validate() const {
    if (k_pp <= 0.0 || k_ip <= 0.0 || k_pq <= 0.0 || k_iq <= 0.0 || k_pc <= 0.0 || k_ic <= 0.0) {
        throw ConfigError("GFL gains must be strictly positive");
    }
}

void LclFilterParams::validate() const {
    if (l_f <= 0.0 || c_f <= 0.0 || l_g <= 0.0) {
        throw ConfigError("filter inductances and capacitance must be > 0");
    }
    if (r_f < 0.0 || r_g < 0.0) throw ConfigError("filter resistances must be >= 0");
}

void PllParams::validate() const {
    if (omega_lp <= 0.0 || k_p <= 0.0 || k_i <= 0.0) {
        throw ConfigError("PLL parameters must be > 0");
    }
}

std::array<double, GfmState::kCount> GfmState::to_array() const {
    return {dtheta_vsm, omega_vsm, q_m,   xi_d,  xi_q,  gamma_d, gamma_q, v_lp_d, v_lp_q,
            eps_pll,    dtheta_pll, phi_d, phi_q, i_cv.d, i_cv.q, v_o.d,  v_o.q,
            i_g.d,      i_g.q};
}

GfmState GfmState::from_array(const double* a) {
    GfmState s;
    s.dtheta_vsm = a[0];
    s.omega_vsm = a[1];
    s.q_m = a[2];
    s.xi_d = a[3];
    s.xi_q = a[4];
    s.gamma_d = a[5];
    s.gamma_q = a[6];
    s.v_lp_d = a[7];
    s.v_lp_q = a[8];
    s.eps_pll = a[9];
    s.dtheta_pll = a[10];
    s.phi_d = a[11];
    s.phi_q = a[12];
    s.i_cv = {a[13], a[14]};
    s.v_o = {a[15], a[16]};
    s.i_g = {a[17], a[18]};
    return s;
}

std::array<double, GflState::kCount> GflState::to_array() const {
    return {v_lp_d, v_lp_q, eps_pll, dtheta_pll, sigma_p, sigma_q, gamma_d,
            gamma_q, i_cv.d, i_cv.q, v_o.d,      v_o.q,   i_g.d,   i_g.q};
}

GflState GflState::from_array(const double* a) {
    GflState s;
    s.v_lp_d = a[0];
    s.v_lp_q = a[1];
    s.eps_pll = a[2];
    s.dtheta_pll = a[3];
    s.sigma_p = a[4];
    s.sigma_q = a[5];
    s.gamma_d = a[6];
    s.gamma_q = a[7];
    s.i_cv = {a[8], a[9]};
    s.v_o = {a[10], a[11]};
    s.i_g = {a[12], a[13]};
    return s;
}

namespace {

struct PllSignals {
    double dv_lp_d, dv_lp_q, deps, ddtheta;
    double omega_pll;
};

/// Synchronous-frame PLL with low-pass filtered input voltage; the tracked
/// frequency is 1 + k_p*err + k_i*eps in pu.
PllSignals pll_step(const Dq& v_meas, double v_lp_d, double v_lp_q, double eps,
                    double dtheta_pll, const PllParams& pll, double frame_speed,
                    double omega_b) {
    const Dq v_in_pll = rotate_frame(v_meas, -dtheta_pll);
    PllSignals out;
    out.dv_lp_d = pll.omega_lp * (v_in_pll.d - v_lp_d);
    out.dv_lp_q = pll.omega_lp * (v_in_pll.q - v_lp_q);
    const double err = std::atan2(v_lp_q, v_lp_d);
    out.deps = err;
    out.omega_pll = 1.0 + pll.k_p * err + pll.k_i * eps;
    out.ddtheta = omega_b * (out.omega_pll - frame_speed);
    return out;
}

}  // namespace

InverterDerivatives<GfmState::kCount> gfm_residual(
    const GfmState& s, const Dq& v_g, const GfmGains& g, const LclFilterParams& f,
    const PllParams& pll, const GfmFixedParams& fx, const GfmSetpoints& sp,
    double frame_speed, double omega_b) {
    const double p_e = s.v_o.d * s.i_g.d + s.v_o.q * s.i_g.q;
    const double q_e = s.v_o.q * s.i_g.d - s.v_o.d * s.i_g.q;

    const PllSignals pll_s =
        pll_step(s.v_o, s.v_lp_d, s.v_lp_q, s.eps_pll, s.dtheta_pll, pll, frame_speed, omega_b);

    // Virtual swing with PLL-referenced damping.
    const double domega_vsm =
        (sp.p_ref - p_e - g.k_d * (s.omega_vsm - pll_s.omega_pll)) / g.t_a;
    const double ddtheta_vsm = omega_b * (s.omega_vsm - frame_speed);

    // Reactive droop sets the voltage reference magnitude on the VSM d axis;
    // the virtual impedance then drops it by (r_v + j w l_v) i_g.
    const double dq_m = fx.omega_f * (q_e - s.q_m);
    const double v_hat = sp.v_ref + g.k_q * (sp.q_ref - s.q_m);

    const Dq v_oc = rotate_frame(s.v_o, -s.dtheta_vsm);
    const Dq i_cvc = rotate_frame(s.i_cv, -s.dtheta_vsm);
    const Dq i_gc = rotate_frame(s.i_g, -s.dtheta_vsm);

    const Dq v_ref_c = Dq{v_hat, 0.0} - Cplx(fx.r_v, s.omega_vsm * fx.l_v) * i_gc;
    const double e_vd = v_ref_c.d - v_oc.d;
    const double e_vq = v_ref_c.q - v_oc.q;
    const double i_ref_d =
        g.k_pv * e_vd + g.k_iv * s.xi_d - s.omega_vsm * f.c_f * v_oc.q + fx.k_ffi * i_gc.d;
    const double i_ref_q =
        g.k_pv * e_vq + g.k_iv * s.xi_q + s.omega_vsm * f.c_f * v_oc.d + fx.k_ffi * i_gc.q;

    // Active damping: subtract the high-passed capacitor voltage.
    const double dphi_d = fx.omega_ad * (v_oc.d - s.phi_d);
    const double dphi_q = fx.omega_ad * (v_oc.q - s.phi_q);

    const double e_cd = i_ref_d - i_cvc.d;
    const double e_cq = i_ref_q - i_cvc.q;
    const double v_md = g.k_pc * e_cd + g.k_ic * s.gamma_d -
                        s.omega_vsm * f.l_f * i_cvc.q + fx.k_ffv * v_oc.d -
                        fx.k_ad * (v_oc.d - s.phi_d);
    const double v_mq = g.k_pc * e_cq + g.k_ic * s.gamma_q +
                        s.omega_vsm * f.l_f * i_cvc.d + fx.k_ffv * v_oc.q -
                        fx.k_ad * (v_oc.q - s.phi_q);

    // Averaged converter: the modulated voltage is applied directly.
    const Dq v_cv = rotate_frame(Dq{v_md, v_mq}, s.dtheta_vsm);

    const Cplx z_f(f.r_f, frame_speed * f.l_f);
    const Cplx z_g(f.r_g, frame_speed * f.l_g);
    const Cplx y_c(0.0, frame_speed * f.c_f);
    const Dq di_cv = (omega_b / f.l_f) * (v_cv - s.v_o - z_f * s.i_cv);
    const Dq dv_o = (omega_b / f.c_f) * (s.i_cv - s.i_g - y_c * s.v_o);
    const Dq di_g = (omega_b / f.l_g) * (s.v_o - v_g - z_g * s.i_g);

    InverterDerivatives<GfmState::kCount> out;
    out.dx = {ddtheta_vsm, domega_vsm, dq_m,      e_vd,      e_vq,    e_cd,    e_cq,
              pll_s.dv_lp_d, pll_s.dv_lp_q, pll_s.deps, pll_s.ddtheta, dphi_d, dphi_q,
              di_cv.d,     di_cv.q,     dv_o.d,    dv_o.q,  di_g.d,  di_g.q};
    out.terminal_current = s.i_g;
    return out;
}

InverterDerivatives<GflState::kCount> gfl_residual(
    const GflState& s, const Dq& v_g, const GflGains& g, const LclFilterParams& f,
    const PllParams& pll, const GflFixedParams& fx, const GflSetpoints& sp,
    double frame_speed, double omega_b) {
    const double p_e = s.v_o.d * s.i_g.d + s.v_o.q * s.i_g.q;
    const double q_e = s.v_o.q * s.i_g.d - s.v_o.d * s.i_g.q;

    const PllSignals pll_s =
        pll_step(s.v_o, s.v_lp_d, s.v_lp_q, s.eps_pll, s.dtheta_pll, pll, frame_speed, omega_b);

    const double e_p = sp.p_ref - p_e;
    const double e_q = sp.q_ref - q_e;
    const Dq i_cvp = rotate_frame(s.i_cv, -s.dtheta_pll);
    const Dq v_op = rotate_frame(s.v_o, -s.dtheta_pll);

    const double i_ref_d = g.k_pp * e_p + g.k_ip * s.sigma_p;
    // In the PLL frame q_e ~ -v_d*i_q, so the q-axis reference takes the PI
    // output with inverted sign to keep the loop a negative feedback.
    const double i_ref_q = -(g.k_pq * e_q + g.k_iq * s.sigma_q);

    const double e_cd = i_ref_d - i_cvp.d;
    const double e_cq = i_ref_q - i_cvp.q;
    const double v_md =
        g.k_pc * e_cd + g.k_ic * s.gamma_d - pll_s.omega_pll * f.l_f * i_cvp.q + fx.k_ffv * v_op.d;
    const double v_mq =
        g.k_pc * e_cq + g.k_ic * s.gamma_q + pll_s.omega_pll * f.l_f * i_cvp.d + fx.k_ffv * v_op.q;

    const Dq v_cv = rotate_frame(Dq{v_md, v_mq}, s.dtheta_pll);

    const Cplx z_f(f.r_f, frame_speed * f.l_f);
    const Cplx z_g(f.r_g, frame_speed * f.l_g);
    const Cplx y_c(0.0, frame_speed * f.c_f);
    const Dq di_cv = (omega_b / f.l_f) * (v_cv - s.v_o - z_f * s.i_cv);
    const Dq dv_o = (omega_b / f.c_f) * (s.i_cv - s.i_g - y_c * s.v_o);
    const Dq di_g = (omega_b / f.l_g) * (s.v_o - v_g - z_g * s.i_g);

    InverterDerivatives<GflState::kCount> out;
    out.dx = {pll_s.dv_lp_d, pll_s.dv_lp_q, pll_s.deps, pll_s.ddtheta, e_p,     e_q,    e_cd,
              e_cq,          di_cv.d,       di_cv.q,    dv_o.d,        dv_o.q,  di_g.d, di_g.q};
    out.terminal_current = s.i_g;
    return out;
}

namespace {

struct FilterChain {
    Dq i_g, v_o, i_cv, v_cv;
    double p_meas, q_meas;
};

/// Steady-state LCL quantities from the terminal condition at nominal speed.
FilterChain back_solve_filter(const Dq& v_g, double p, double q, const LclFilterParams& f) {
    f.validate();
    if (v_g.mag() <= 0.0) throw InitError("terminal voltage magnitude must be > 0");
    FilterChain c;
    c.i_g = conj(Dq{Dq{p, q}.c() / v_g.c()});
    c.v_o = v_g + Cplx(f.r_g, f.l_g) * c.i_g;
    c.i_cv = c.i_g + Cplx(0.0, f.c_f) * c.v_o;
    c.v_cv = c.v_o + Cplx(f.r_f, f.l_f) * c.i_cv;
    c.p_meas = c.v_o.d * c.i_g.d + c.v_o.q * c.i_g.q;
    c.q_meas = c.v_o.q * c.i_g.d - c.v_o.d * c.i_g.q;
    if (!std::isfinite(c.v_cv.d) || !std::isfinite(c.v_cv.q)) {
        throw InitError("filter back-solve produced a non-finite converter voltage");
    }
    return c;
}

}  // namespace

GfmInit gfm_init(const Dq& terminal_v, double p, double q, const GfmGains& g,
                 const LclFilterParams& f, const PllParams& pll, const GfmFixedParams& fx,
                 double omega_b) {
    g.validate();
    pll.validate();
    (void)omega_b;
    const FilterChain c = back_solve_filter(terminal_v, p, q, f);

    GfmState s;
    // The VSM frame aligns with the voltage reference behind the virtual
    // impedance, so the stationary voltage-loop error is zero.
    const Dq e_virtual = c.v_o + Cplx(fx.r_v, fx.l_v) * c.i_g;
    s.dtheta_vsm = e_virtual.arg();
    const double v_hat = e_virtual.mag();
    s.omega_vsm = 1.0;
    s.q_m = c.q_meas;
    s.dtheta_pll = c.v_o.arg();
    s.v_lp_d = c.v_o.mag();
    s.v_lp_q = 0.0;
    s.eps_pll = 0.0;
    s.i_cv = c.i_cv;
    s.v_o = c.v_o;
    s.i_g = c.i_g;

    const Dq v_oc = rotate_frame(c.v_o, -s.dtheta_vsm);
    const Dq i_cvc = rotate_frame(c.i_cv, -s.dtheta_vsm);
    const Dq i_gc = rotate_frame(c.i_g, -s.dtheta_vsm);
    const Dq v_cvc = rotate_frame(c.v_cv, -s.dtheta_vsm);

    s.phi_d = v_oc.d;
    s.phi_q = v_oc.q;
    s.xi_d = (i_cvc.d + f.c_f * v_oc.q - fx.k_ffi * i_gc.d) / g.k_iv;
    s.xi_q = (i_cvc.q - f.c_f * v_oc.d - fx.k_ffi * i_gc.q) / g.k_iv;
    s.gamma_d = (v_cvc.d + f.l_f * i_cvc.q - fx.k_ffv * v_oc.d) / g.k_ic;
    s.gamma_q = (v_cvc.q - f.l_f * i_cvc.d - fx.k_ffv * v_oc.q) / g.k_ic;

    GfmSetpoints sp;
    sp.p_ref = c.p_meas;
    sp.q_ref = c.q_meas;
    sp.v_ref = v_hat;
    return {s, sp};
}

GflInit gfl_init(const Dq& terminal_v, double p, double q, const GflGains& g,
                 const LclFilterParams& f, const PllParams& pll, const GflFixedParams& fx,
                 double omega_b) {
    g.validate();
    pll.validate();
    (void)omega_b;
    const FilterChain c = back_solve_filter(terminal_v, p, q, f);

    GflState s;
    s.dtheta_pll = c.v_o.arg();
    s.v_lp_d = c.v_o.mag();
    s.v_lp_q = 0.0;
    s.eps_pll = 0.0;
    s.i_cv = c.i_cv;
    s.v_o = c.v_o;
    s.i_g = c.i_g;

    const Dq i_cvp = rotate_frame(c.i_cv, -s.dtheta_pll);
    const Dq v_cvp = rotate_frame(c.v_cv, -s.dtheta_pll);
    const double v_od = c.v_o.mag();

    s.sigma_p = i_cvp.d / g.k_ip;
    s.sigma_q = -i_cvp.q / g.k_iq;
    s.gamma_d = (v_cvp.d + f.l_f * i_cvp.q - fx.k_ffv * v_od) / g.k_ic;
    s.gamma_q = (v_cvp.q - f.l_f * i_cvp.d) / g.k_ic;

    GflSetpoints sp;
    sp.p_ref = c.p_meas;
    sp.q_ref = c.q_meas;
    return {s, sp};
}

}  // namespace gridss
