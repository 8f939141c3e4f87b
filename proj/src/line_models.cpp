#include "gridss/line_models.hpp"

#include <cmath>

#include "gridss/errors.hpp"

namespace gridss {

void LumpedPi::validate() const {
    if (z_pi.real() < 0.0) throw ConfigError("corrected series resistance is negative");
    if (z_pi.imag() <= 0.0) throw ConfigError("corrected series inductance must be > 0");
    if (y_pi.real() != 0.0) throw ConfigError("shunt conductance must be overwritten to 0");
    if (y_pi.imag() < 0.0) throw ConfigError("corrected shunt capacitance is negative");
}

void SegmentParams::validate() const {
    if (n_segments < 1) throw ConfigError("segment count must be >= 1");
    if (l_seg <= 0.0) throw ConfigError("segment inductance must be > 0");
    if (r_seg < 0.0 || c_seg < 0.0) throw ConfigError("segment r/c must be >= 0");
}

const char* line_model_name(LineModel m) {
    switch (m) {
        case LineModel::StatPi: return "statpi";
        case LineModel::DynPi: return "dynpi";
        case LineModel::Mssb: return "mssb";
    }
    return "statpi";
}

LineModel line_model_from_name(const std::string& name) {
    if (name == "statpi") return LineModel::StatPi;
    if (name == "dynpi") return LineModel::DynPi;
    if (name == "mssb") return LineModel::Mssb;
    throw ConfigError("unknown line model '" + name + "'");
}

int LineRealization::owned_state_count() const {
    if (algebraic || model == LineModel::StatPi) return 0;
    if (model == LineModel::DynPi) return 2;  // series current dq pair
    return 2 * seg.n_segments + 2 * (seg.n_segments - 1);
}

Cplx sinhc(const Cplx& x) {
    if (std::abs(x) < 1e-4) {
        const Cplx x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
    }
    return std::sinh(x) / x;
}

Cplx tanhc_half(const Cplx& x) {
    const Cplx h = 0.5 * x;
    if (std::abs(h) < 1e-4) {
        const Cplx h2 = h * h;
        return 1.0 - h2 / 3.0 * (1.0 - 2.0 * h2 / 5.0);
    }
    return std::tanh(h) / h;
}

LumpedPi hyperbolic_correction(const Cplx& z_km, const Cplx& y_km, double length_km) {
    if (length_km <= 0.0) throw ConfigError("line length must be > 0");
    if (z_km.imag() <= 0.0) throw ConfigError("per-km series reactance must be > 0");
    const Cplx gamma_l = std::sqrt(z_km * y_km) * length_km;
    LumpedPi pi;
    pi.z_pi = z_km * length_km * sinhc(gamma_l);
    pi.y_pi = y_km * length_km * tanhc_half(gamma_l);
    pi.y_pi = Cplx(0.0, pi.y_pi.imag());  // g_pi overwritten to 0
    return pi;
}

LumpedPi corrected_pi(const BranchSpec& branch) {
    branch.validate();
    return hyperbolic_correction(branch.z_km(), branch.y_km(), branch.length_km);
}

SegmentParams segment_params(const BranchSpec& branch, int n_segments) {
    branch.validate();
    if (n_segments < 1) throw ConfigError("segment count must be >= 1");
    SegmentParams s;
    s.n_segments = n_segments;
    s.seg_length_km = branch.length_km / n_segments;
    s.r_seg = branch.r_km * s.seg_length_km;
    s.l_seg = branch.l_km * s.seg_length_km;
    s.c_seg = branch.c_km * s.seg_length_km;
    return s;
}

LineRealization realize_branch(const BranchSpec& branch, LineModel model, int n_segments) {
    LineRealization line;
    line.pi = corrected_pi(branch);
    if (branch.transformer) {
        line.model = LineModel::StatPi;
        line.algebraic = true;
        return line;
    }
    line.model = model;
    if (model == LineModel::Mssb) line.seg = segment_params(branch, n_segments);
    return line;
}

std::pair<Dq, Dq> statpi_port_currents(const Dq& v1, const Dq& v2, const LumpedPi& pi) {
    if (pi.z_pi == Cplx(0.0, 0.0)) throw NumericError("singular line: z_pi = 0");
    const Cplx y_series = 1.0 / pi.z_pi;
    const Cplx y_half = 0.5 * pi.y_pi;
    const Dq i_in = (y_series + y_half) * v1 - y_series * v2;
    const Dq i_out = y_series * v1 - (y_series + y_half) * v2;
    return {i_in, i_out};
}

DynPiDerivatives dynpi_residual(const DynPiState& s, const Dq& i_in, const Dq& i_out,
                                const LumpedPi& pi, double omega_sys, double omega_b) {
    pi.validate();
    const double l = pi.l_pi();
    const double c_half = 0.5 * pi.c_pi();
    const Cplx z_line(pi.r_pi(), omega_sys * l);
    const Cplx y_half(0.0, omega_sys * c_half);

    DynPiDerivatives d;
    d.di = (omega_b / l) * (s.v1 - s.v2 - z_line * s.i);
    if (c_half > 0.0) {
        d.dv1 = (omega_b / c_half) * (i_in - s.i - y_half * s.v1);
        d.dv2 = (omega_b / c_half) * (s.i - i_out - y_half * s.v2);
    } else {
        d.dv1 = Dq{};
        d.dv2 = Dq{};
    }
    return d;
}

void mssb_residual(const double* states, const Dq& i_in, const Dq& i_out,
                   const SegmentParams& seg, double omega_sys, double omega_b,
                   double* derivatives) {
    seg.validate();
    const int n = seg.n_segments;
    const Cplx z_seg(seg.r_seg, omega_sys * seg.l_seg);

    auto current = [&](int k) { return Dq{states[2 * k], states[2 * k + 1]}; };
    auto voltage = [&](int k) { return Dq{states[2 * (n + k)], states[2 * (n + k) + 1]}; };
    auto store = [&](int slot, const Dq& v) {
        derivatives[2 * slot] = v.d;
        derivatives[2 * slot + 1] = v.q;
    };

    for (int k = 0; k < n; ++k) {
        const Dq di = (omega_b / seg.l_seg) * (voltage(k) - voltage(k + 1) - z_seg * current(k));
        store(k, di);
    }
    // Node k sees the segment currents on each side; node capacitance is
    // c_seg/2 at the terminals and the merged c_seg at interior nodes.
    for (int k = 0; k <= n; ++k) {
        const Dq inflow = (k == 0) ? i_in : current(k - 1);
        const Dq outflow = (k == n) ? i_out : current(k);
        const double c_node = (k == 0 || k == n) ? 0.5 * seg.c_seg : seg.c_seg;
        const Dq v = voltage(k);
        const Dq shunt{-omega_sys * c_node * v.q, omega_sys * c_node * v.d};
        if (c_node > 0.0) {
            store(n + k, (omega_b / c_node) * (inflow - outflow - shunt));
        } else {
            store(n + k, Dq{});
        }
    }
}

std::pair<Dq, Dq> dynpi_steady_port_currents(const Dq& v1, const Dq& v2, const LumpedPi& pi,
                                             double omega_sys) {
    const Cplx z_line(pi.r_pi(), omega_sys * pi.l_pi());
    const Cplx y_half(0.0, omega_sys * 0.5 * pi.c_pi());
    const Dq i = (v1 - v2) / z_line;
    return {i + y_half * v1, i - y_half * v2};
}

namespace {

TwoPortAbcd pi_abcd(const Cplx& z, const Cplx& y_total) {
    // series z with y_total/2 at each port
    const Cplx yh = 0.5 * y_total;
    TwoPortAbcd t;
    t.a = 1.0 + z * yh;
    t.b = z;
    t.c = yh * (2.0 + z * yh);
    t.d = t.a;
    return t;
}

TwoPortAbcd cascade(const TwoPortAbcd& m, const TwoPortAbcd& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
}

}  // namespace

TwoPortAbcd realization_abcd(const LineRealization& line, double omega_pu) {
    if (line.model == LineModel::Mssb) {
        const Cplx z_seg(line.seg.r_seg, omega_pu * line.seg.l_seg);
        const Cplx y_seg(0.0, omega_pu * line.seg.c_seg);
        TwoPortAbcd t = pi_abcd(z_seg, y_seg);
        TwoPortAbcd acc = t;
        for (int k = 1; k < line.seg.n_segments; ++k) acc = cascade(acc, t);
        return acc;
    }
    const Cplx z(line.pi.r_pi(), omega_pu * line.pi.l_pi());
    const Cplx y(0.0, omega_pu * line.pi.c_pi());
    return pi_abcd(z, y);
}

Cplx open_circuit_impedance(const LineRealization& line, double omega_pu) {
    const TwoPortAbcd t = realization_abcd(line, omega_pu);
    if (std::abs(t.c) == 0.0) throw NumericError("open-circuit impedance undefined: C = 0");
    return t.a / t.c;
}

Cplx telegrapher_open_circuit_impedance(const BranchSpec& branch, double omega_pu) {
    const Cplx z(branch.r_km, omega_pu * branch.l_km);
    const Cplx y(0.0, omega_pu * branch.c_km);
    const Cplx gamma = std::sqrt(z * y);
    if (std::abs(gamma) == 0.0) {
        throw NumericError("distributed open-circuit impedance undefined for c = 0");
    }
    const Cplx z_c = std::sqrt(z / y);
    const Cplx gl = gamma * branch.length_km;
    return z_c * std::cosh(gl) / std::sinh(gl);
}

}  // namespace gridss
