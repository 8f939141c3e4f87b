#include "gridss/dae.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridss/errors.hpp"
#include "gridss/inverter.hpp"
#include "gridss/machine.hpp"

namespace gridss {

int StateRegistry::add_dynamic(const std::string& owner, const std::string& name) {
    const int idx = n();
    x_.push_back({owner, name, idx});
    return idx;
}

int StateRegistry::add_algebraic(const std::string& owner, const std::string& name) {
    const int idx = m();
    y_.push_back({owner, name, idx});
    return idx;
}

int StateRegistry::find_dynamic(const std::string& owner, const std::string& name) const {
    for (const auto& s : x_) {
        if (s.owner == owner && s.name == name) return s.index;
    }
    return -1;
}

std::string StateRegistry::dynamic_label(int index) const {
    return x_.at(index).owner + "/" + x_.at(index).name;
}

std::string StateRegistry::algebraic_label(int index) const {
    return y_.at(index).owner + "/" + y_.at(index).name;
}

double DaeSystem::residual_inf_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd f(n), g(m);
    residual(x, y, f, g);
    double worst = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    if (g.size()) worst = std::max(worst, g.cwiseAbs().maxCoeff());
    return worst;
}

namespace {

struct BranchBlock {
    BranchSpec spec;
    LineRealization line;
    int from_idx = 0, to_idx = 0;  // bus array positions
    // DynPi: current pair at x[i_base..i_base+1].
    // Mssb: N current pairs at i_base, then N-1 interior voltage pairs at v_base.
    int i_base = -1;
    int v_base = -1;
};

struct BusSlot {
    bool dynamic = false;
    int index = -1;      // x index of v_d if dynamic, else y index
    double cap = 0.0;    // total incident half-shunt capacitance
    Cplx load_y;         // constant-impedance admittance at the PF voltage
    Dq load_s;           // scaled constant-power load
};

}  // namespace

/// Everything eval() needs, frozen at assembly.
struct AssembledDetail {
    NetworkCase cse;
    LineModel model = LineModel::StatPi;
    int segments = 5;
    double omega_b = 0.0;
    LoadModel load_model = LoadModel::ConstantImpedance;

    int sm_bus_idx = 0, gfm_bus_idx = 0, gfl_bus_idx = 0;
    double sm_delta = 0.0;  // pinned: the reference machine defines the frame
    int sm_x_base = 0;      // 11 states
    int gfm_x_base = 0;     // 17 states
    int gfl_x_base = 0;     // 14 states
    int omega_index = 0;    // frame speed = machine rotor speed

    std::vector<BranchBlock> branches;
    std::vector<BusSlot> bus_slots;

    MachineInit sm_init;
    GfmInit gfm_init_v;
    GflInit gfl_init_v;
    PowerFlowSolution pf;

    // u layout: [sm_pm, sm_vref, gfm_p, gfm_q, gfm_v, gfl_p, gfl_q]
    void eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
              Eigen::VectorXd& f, Eigen::VectorXd& g) const;
};

namespace {

constexpr int kSmStates = 11;  // MachineState minus the pinned angle

MachineState unpack_machine(const double* x, double delta) {
    MachineState s;
    s.psi_d = x[0];
    s.psi_q = x[1];
    s.e_q_p = x[2];
    s.e_d_p = x[3];
    s.e_q_pp = x[4];
    s.e_d_pp = x[5];
    s.omega = x[6];
    s.v_m = x[7];
    s.v_r1 = x[8];
    s.v_r2 = x[9];
    s.v_f = x[10];
    s.delta = delta;
    return s;
}

void pack_machine(const MachineState& s, double* x) {
    x[0] = s.psi_d;
    x[1] = s.psi_q;
    x[2] = s.e_q_p;
    x[3] = s.e_d_p;
    x[4] = s.e_q_pp;
    x[5] = s.e_d_pp;
    x[6] = s.omega;
    x[7] = s.v_m;
    x[8] = s.v_r1;
    x[9] = s.v_r2;
    x[10] = s.v_f;
}

}  // namespace

void AssembledDetail::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& u, Eigen::VectorXd& f,
                           Eigen::VectorXd& g) const {
    const double frame_speed = x(omega_index);
    const int nb = static_cast<int>(bus_slots.size());

    auto bus_voltage = [&](int idx) -> Dq {
        const BusSlot& b = bus_slots[idx];
        return b.dynamic ? Dq{x(b.index), x(b.index + 1)} : Dq{y(b.index), y(b.index + 1)};
    };

    std::array<Dq, 16> inj{};  // net current into each bus; 9-bus fits with room
    auto net = [&](int idx) -> Dq& { return inj[idx]; };

    // Devices
    const MachineState sm = unpack_machine(x.data() + sm_x_base, sm_delta);
    const MachineInputs sm_in{u(0), u(1)};
    const MachineDerivatives smd = machine_residual(sm, bus_voltage(sm_bus_idx),
                                                    cse.machine.params, cse.machine.avr, sm_in,
                                                    frame_speed, omega_b);
    for (int k = 0; k < 6; ++k) f(sm_x_base + k) = smd.dx[k];
    f(sm_x_base + 6) = smd.dx[7];  // omega; the angle row is identically zero here
    for (int k = 0; k < 4; ++k) f(sm_x_base + 7 + k) = smd.dx[8 + k];
    net(sm_bus_idx) += smd.terminal_current;

    const GfmState gfm = GfmState::from_array(x.data() + gfm_x_base);
    const GfmSetpoints gfm_sp{u(2), u(3), u(4)};
    const auto gfmd = gfm_residual(gfm, bus_voltage(gfm_bus_idx), cse.gfm.gains, cse.gfm.filter,
                                   cse.gfm.pll, cse.gfm.fixed, gfm_sp, frame_speed, omega_b);
    for (int k = 0; k < GfmState::kCount; ++k) f(gfm_x_base + k) = gfmd.dx[k];
    net(gfm_bus_idx) += gfmd.terminal_current;

    const GflState gfl = GflState::from_array(x.data() + gfl_x_base);
    const GflSetpoints gfl_sp{u(5), u(6)};
    const auto gfld = gfl_residual(gfl, bus_voltage(gfl_bus_idx), cse.gfl.gains, cse.gfl.filter,
                                   cse.gfl.pll, cse.gfl.fixed, gfl_sp, frame_speed, omega_b);
    for (int k = 0; k < GflState::kCount; ++k) f(gfl_x_base + k) = gfld.dx[k];
    net(gfl_bus_idx) += gfld.terminal_current;

    // Loads
    for (int b = 0; b < nb; ++b) {
        const BusSlot& slot = bus_slots[b];
        if (slot.load_s.d == 0.0 && slot.load_s.q == 0.0) continue;
        const Dq v = bus_voltage(b);
        if (load_model == LoadModel::ConstantImpedance) {
            net(b) -= slot.load_y * v;
        } else {
            net(b) -= conj(Dq{slot.load_s.c() / v.c()});
        }
    }

    // Branches
    for (const auto& br : branches) {
        const Dq v_from = bus_voltage(br.from_idx);
        const Dq v_to = bus_voltage(br.to_idx);
        if (br.line.algebraic || br.line.model == LineModel::StatPi) {
            const auto [i_in, i_out] = statpi_port_currents(v_from, v_to, br.line.pi);
            net(br.from_idx) -= i_in;
            net(br.to_idx) += i_out;
        } else if (br.line.model == LineModel::DynPi) {
            const Dq i{x(br.i_base), x(br.i_base + 1)};
            const double l = br.line.pi.l_pi();
            const Cplx z_line(br.line.pi.r_pi(), frame_speed * l);
            const Dq di = (omega_b / l) * (v_from - v_to - z_line * i);
            f(br.i_base) = di.d;
            f(br.i_base + 1) = di.q;
            net(br.from_idx) -= i;
            net(br.to_idx) += i;
        } else {
            const SegmentParams& seg = br.line.seg;
            const int ns = seg.n_segments;
            const Cplx z_seg(seg.r_seg, frame_speed * seg.l_seg);
            auto seg_current = [&](int j) { return Dq{x(br.i_base + 2 * j), x(br.i_base + 2 * j + 1)}; };
            auto node_voltage = [&](int j) -> Dq {  // node 0..ns
                if (j == 0) return v_from;
                if (j == ns) return v_to;
                return {x(br.v_base + 2 * (j - 1)), x(br.v_base + 2 * (j - 1) + 1)};
            };
            for (int j = 0; j < ns; ++j) {
                const Dq i = seg_current(j);
                const Dq di =
                    (omega_b / seg.l_seg) * (node_voltage(j) - node_voltage(j + 1) - z_seg * i);
                f(br.i_base + 2 * j) = di.d;
                f(br.i_base + 2 * j + 1) = di.q;
            }
            for (int j = 1; j < ns; ++j) {
                const Dq v = node_voltage(j);
                const Dq shunt{-frame_speed * seg.c_seg * v.q, frame_speed * seg.c_seg * v.d};
                const Dq dv = (omega_b / seg.c_seg) * (seg_current(j - 1) - seg_current(j) - shunt);
                f(br.v_base + 2 * (j - 1)) = dv.d;
                f(br.v_base + 2 * (j - 1) + 1) = dv.q;
            }
            net(br.from_idx) -= seg_current(0);
            net(br.to_idx) += seg_current(ns - 1);
        }
    }

    // Bus closures: capacitor dynamics where line charging accumulates,
    // algebraic current balance elsewhere.
    for (int b = 0; b < nb; ++b) {
        const BusSlot& slot = bus_slots[b];
        const Dq i_net = net(b);
        if (slot.dynamic) {
            const Dq v = bus_voltage(b);
            const Dq shunt{-frame_speed * slot.cap * v.q, frame_speed * slot.cap * v.d};
            const Dq dv = (omega_b / slot.cap) * (i_net - shunt);
            f(slot.index) = dv.d;
            f(slot.index + 1) = dv.q;
        } else {
            g(slot.index) = i_net.d;
            g(slot.index + 1) = i_net.q;
        }
    }
}

namespace {

/// Steady-state interior ladder solve for one Mssb branch at nominal frequency.
void mssb_steady_states(const SegmentParams& seg, const Dq& v_from, const Dq& v_to,
                        std::vector<Dq>& currents, std::vector<Dq>& interior) {
    const int ns = seg.n_segments;
    const Cplx z(seg.r_seg, seg.l_seg);
    const Cplx y(0.0, seg.c_seg);
    currents.assign(ns, Dq{});
    interior.assign(ns - 1, Dq{});
    if (ns == 1) {
        currents[0] = (v_from - v_to) / z;
        return;
    }
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(ns - 1, ns - 1);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(ns - 1);
    for (int j = 0; j < ns - 1; ++j) {
        a(j, j) = 2.0 / z + y;
        if (j > 0) a(j, j - 1) = -1.0 / z;
        if (j + 1 < ns - 1) a(j, j + 1) = -1.0 / z;
    }
    rhs(0) += v_from.c() / z;
    rhs(ns - 2) += v_to.c() / z;
    const Eigen::VectorXcd v = a.partialPivLu().solve(rhs);
    for (int j = 0; j < ns - 1; ++j) interior[j] = Dq(v(j));
    auto node = [&](int j) -> Dq {
        if (j == 0) return v_from;
        if (j == ns) return v_to;
        return interior[j - 1];
    };
    for (int j = 0; j < ns; ++j) currents[j] = (node(j) - node(j + 1)) / z;
}

}  // namespace

DaeSystem assemble(const NetworkCase& cse, LineModel model, const GfmGains& gains, int segments,
                   const NumericPolicy& policy) {
    cse.validate();
    gains.validate();
    if (segments < 1) throw ConfigError("segment count must be >= 1");

    auto detail = std::make_shared<AssembledDetail>();
    detail->cse = cse;
    detail->cse.gfm.gains = gains;
    detail->model = model;
    detail->segments = segments;
    detail->omega_b = cse.base.omega_b();
    detail->load_model = cse.load_model;
    detail->sm_bus_idx = cse.bus_index(cse.machine.bus);
    detail->gfm_bus_idx = cse.bus_index(cse.gfm.bus);
    detail->gfl_bus_idx = cse.bus_index(cse.gfl.bus);

    const PowerFlowSolution pf = solve_powerflow(cse, policy);
    detail->pf = pf;

    // Device equilibrium back-solves at the power flow terminals.
    const BusSolution& sm_pf = pf.at_bus(cse.machine.bus);
    detail->sm_init = machine_init_from_terminal(sm_pf.voltage(), sm_pf.p_inj, sm_pf.q_inj,
                                                 cse.machine.params, cse.machine.avr,
                                                 detail->omega_b);
    detail->sm_delta = detail->sm_init.state.delta;

    const BusSolution& gfm_pf = pf.at_bus(cse.gfm.bus);
    detail->gfm_init_v = gfm_init(gfm_pf.voltage(), gfm_pf.p_inj, gfm_pf.q_inj, gains,
                                  cse.gfm.filter, cse.gfm.pll, cse.gfm.fixed, detail->omega_b);

    const BusSolution& gfl_pf = pf.at_bus(cse.gfl.bus);
    detail->gfl_init_v = gfl_init(gfl_pf.voltage(), gfl_pf.p_inj, gfl_pf.q_inj, cse.gfl.gains,
                                  cse.gfl.filter, cse.gfl.pll, cse.gfl.fixed, detail->omega_b);

    DaeSystem sys;
    sys.detail = detail;
    sys.line_model = model;
    sys.segments = segments;
    sys.omega_b = detail->omega_b;
    sys.powerflow = pf;

    auto& reg = sys.registry;
    detail->sm_x_base = reg.add_dynamic("sm", "psi_d");
    reg.add_dynamic("sm", "psi_q");
    reg.add_dynamic("sm", "e_q_p");
    reg.add_dynamic("sm", "e_d_p");
    reg.add_dynamic("sm", "e_q_pp");
    reg.add_dynamic("sm", "e_d_pp");
    detail->omega_index = reg.add_dynamic("sm", "omega");
    reg.add_dynamic("sm", "v_m");
    reg.add_dynamic("sm", "v_r1");
    reg.add_dynamic("sm", "v_r2");
    reg.add_dynamic("sm", "v_f");

    static const char* gfm_names[GfmState::kCount] = {
        "dtheta_vsm", "omega_vsm", "q_m",     "xi_d",       "xi_q",  "gamma_d", "gamma_q",
        "pll_v_d",    "pll_v_q",   "pll_eps", "dtheta_pll", "phi_d", "phi_q",   "i_cv_d",
        "i_cv_q",     "v_o_d",     "v_o_q",   "i_g_d",      "i_g_q"};
    detail->gfm_x_base = reg.add_dynamic("gfm", gfm_names[0]);
    for (int k = 1; k < GfmState::kCount; ++k) reg.add_dynamic("gfm", gfm_names[k]);

    static const char* gfl_names[GflState::kCount] = {
        "pll_v_d", "pll_v_q", "pll_eps", "dtheta_pll", "sigma_p", "sigma_q", "gamma_d",
        "gamma_q", "i_cv_d",  "i_cv_q",  "v_o_d",      "v_o_q",   "i_g_d",   "i_g_q"};
    detail->gfl_x_base = reg.add_dynamic("gfl", gfl_names[0]);
    for (int k = 1; k < GflState::kCount; ++k) reg.add_dynamic("gfl", gfl_names[k]);

    // Line realizations and their states.
    const int nb = static_cast<int>(cse.buses.size());
    detail->bus_slots.assign(nb, BusSlot{});
    for (const auto& spec : cse.branches) {
        BranchBlock blk;
        blk.spec = spec;
        blk.line = realize_branch(spec, model, segments);
        blk.from_idx = cse.bus_index(spec.from_bus);
        blk.to_idx = cse.bus_index(spec.to_bus);
        const std::string owner =
            (spec.transformer ? "xfmr" : "line") + std::to_string(spec.from_bus) + "-" +
            std::to_string(spec.to_bus);
        if (!blk.line.algebraic && blk.line.model == LineModel::DynPi) {
            blk.i_base = reg.add_dynamic(owner, "i_d");
            reg.add_dynamic(owner, "i_q");
            detail->bus_slots[blk.from_idx].cap += 0.5 * blk.line.pi.c_pi();
            detail->bus_slots[blk.to_idx].cap += 0.5 * blk.line.pi.c_pi();
        } else if (!blk.line.algebraic && blk.line.model == LineModel::Mssb) {
            for (int j = 0; j < segments; ++j) {
                const std::string tag = "i" + std::to_string(j + 1);
                const int idx = reg.add_dynamic(owner, tag + "_d");
                reg.add_dynamic(owner, tag + "_q");
                if (j == 0) blk.i_base = idx;
            }
            for (int j = 1; j < segments; ++j) {
                const std::string tag = "v" + std::to_string(j + 1);
                const int idx = reg.add_dynamic(owner, tag + "_d");
                reg.add_dynamic(owner, tag + "_q");
                if (j == 1) blk.v_base = idx;
            }
            detail->bus_slots[blk.from_idx].cap += 0.5 * blk.line.seg.c_seg;
            detail->bus_slots[blk.to_idx].cap += 0.5 * blk.line.seg.c_seg;
        }
        detail->branches.push_back(blk);
    }

    // Bus voltage slots: dynamic when line charging accumulates at the bus.
    for (int b = 0; b < nb; ++b) {
        BusSlot& slot = detail->bus_slots[b];
        const std::string owner = "bus" + std::to_string(cse.buses[b].id);
        slot.dynamic = slot.cap > 0.0;
        if (slot.dynamic) {
            slot.index = reg.add_dynamic(owner, "v_d");
            reg.add_dynamic(owner, "v_q");
        } else {
            slot.index = reg.add_algebraic(owner, "v_d");
            reg.add_algebraic(owner, "v_q");
        }
        const Bus& bus = cse.buses[b];
        slot.load_s = {bus.load_p, bus.load_q};
        const double v_pf = pf.at_bus(bus.id).v_mag;
        slot.load_y = Cplx(bus.load_p, -bus.load_q) / (v_pf * v_pf);
    }

    sys.n = reg.n();
    sys.m = reg.m();

    // Equilibrium guess: device back-solves plus line ladder steady states.
    sys.x_guess = Eigen::VectorXd::Zero(sys.n);
    sys.y_guess = Eigen::VectorXd::Zero(sys.m);
    pack_machine(detail->sm_init.state, sys.x_guess.data() + detail->sm_x_base);
    {
        const auto arr = detail->gfm_init_v.state.to_array();
        for (int k = 0; k < GfmState::kCount; ++k) sys.x_guess(detail->gfm_x_base + k) = arr[k];
        const auto arl = detail->gfl_init_v.state.to_array();
        for (int k = 0; k < GflState::kCount; ++k) sys.x_guess(detail->gfl_x_base + k) = arl[k];
    }
    for (const auto& blk : detail->branches) {
        const Dq v_from = pf.at_bus(blk.spec.from_bus).voltage();
        const Dq v_to = pf.at_bus(blk.spec.to_bus).voltage();
        if (blk.line.algebraic || blk.line.model == LineModel::StatPi) continue;
        if (blk.line.model == LineModel::DynPi) {
            const Dq i = (v_from - v_to) / blk.line.pi.z_pi;
            sys.x_guess(blk.i_base) = i.d;
            sys.x_guess(blk.i_base + 1) = i.q;
        } else {
            std::vector<Dq> currents, interior;
            mssb_steady_states(blk.line.seg, v_from, v_to, currents, interior);
            for (int j = 0; j < blk.line.seg.n_segments; ++j) {
                sys.x_guess(blk.i_base + 2 * j) = currents[j].d;
                sys.x_guess(blk.i_base + 2 * j + 1) = currents[j].q;
            }
            for (int j = 0; j + 1 < blk.line.seg.n_segments; ++j) {
                sys.x_guess(blk.v_base + 2 * j) = interior[j].d;
                sys.x_guess(blk.v_base + 2 * j + 1) = interior[j].q;
            }
        }
    }
    for (int b = 0; b < nb; ++b) {
        const BusSlot& slot = detail->bus_slots[b];
        const Dq v = pf.at_bus(cse.buses[b].id).voltage();
        if (slot.dynamic) {
            sys.x_guess(slot.index) = v.d;
            sys.x_guess(slot.index + 1) = v.q;
        } else {
            sys.y_guess(slot.index) = v.d;
            sys.y_guess(slot.index + 1) = v.q;
        }
    }

    sys.u.resize(7);
    sys.u << detail->sm_init.inputs.mech_power, detail->sm_init.inputs.v_ref,
        detail->gfm_init_v.setpoints.p_ref, detail->gfm_init_v.setpoints.q_ref,
        detail->gfm_init_v.setpoints.v_ref, detail->gfl_init_v.setpoints.p_ref,
        detail->gfl_init_v.setpoints.q_ref;
    sys.u_names = {"sm.p_m", "sm.v_ref", "gfm.p_ref", "gfm.q_ref",
                   "gfm.v_ref", "gfl.p_ref", "gfl.q_ref"};

    const AssembledDetail* raw = detail.get();
    sys.eval = [raw, keep = sys.detail](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& u, Eigen::VectorXd& f,
                                        Eigen::VectorXd& g) { raw->eval(x, y, u, f, g); };
    return sys;
}

const char* equilibrium_status_name(EquilibriumStatus s) {
    switch (s) {
        case EquilibriumStatus::Converged: return "converged";
        case EquilibriumStatus::MaxIterations: return "no_equilibrium";
        case EquilibriumStatus::NumericalFailure: return "error";
    }
    return "error";
}

EquilibriumResult find_equilibrium(const DaeSystem& sys, const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& y0, const NumericPolicy& policy) {
    const int n = sys.n, m = sys.m, nz = n + m;
    Eigen::VectorXd z(nz);
    z.head(n) = x0;
    z.tail(m) = y0;

    Eigen::VectorXd f(n), g(m), r(nz);
    auto eval_stacked = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& out) {
        sys.residual(zz.head(n), zz.tail(m), f, g);
        out.head(n) = f;
        out.tail(m) = g;
    };

    EquilibriumResult result;
    eval_stacked(z, r);
    double norm = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm)) {
        result.status = EquilibriumStatus::NumericalFailure;
        result.final_residual = norm;
        return result;
    }

    int steps = 0;
    Eigen::MatrixXd jac(nz, nz);
    Eigen::VectorXd r_plus(nz), r_minus(nz), z_pert(nz), z_new(nz), r_new(nz);
    while (norm >= policy.newton_tol && steps < policy.newton_max_iter) {
        for (int j = 0; j < nz; ++j) {
            const double h = policy.fd_step * std::max(1.0, std::abs(z(j)));
            z_pert = z;
            z_pert(j) += h;
            eval_stacked(z_pert, r_plus);
            z_pert(j) = z(j) - h;
            eval_stacked(z_pert, r_minus);
            jac.col(j) = (r_plus - r_minus) / (2.0 * h);
        }
        const Eigen::VectorXd dz = jac.partialPivLu().solve(-r);
        if (!dz.allFinite()) {
            result.status = EquilibriumStatus::NumericalFailure;
            result.final_residual = norm;
            result.iterations = steps;
            return result;
        }
        double alpha = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= policy.newton_max_halvings; ++halving) {
            z_new = z + alpha * dz;
            eval_stacked(z_new, r_new);
            const double new_norm = r_new.cwiseAbs().maxCoeff();
            if (std::isfinite(new_norm) && new_norm < norm) {
                z = z_new;
                r = r_new;
                norm = new_norm;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        ++steps;
        if (!improved) break;  // stagnation: report the residual reached
    }

    result.iterations = steps;
    result.final_residual = norm;
    if (norm < policy.newton_tol) {
        result.status = EquilibriumStatus::Converged;
        result.eq.x_star = z.head(n);
        result.eq.y_star = z.tail(m);
        result.eq.residual_norm = norm;
        result.eq.newton_steps = steps;
        if (sys.detail) result.eq.powerflow = sys.detail->pf;
    } else {
        result.status = EquilibriumStatus::MaxIterations;
    }
    return result;
}

EquilibriumResult find_equilibrium(const DaeSystem& sys, const NumericPolicy& policy) {
    return find_equilibrium(sys, sys.x_guess, sys.y_guess, policy);
}

Dq equilibrium_bus_voltage(const DaeSystem& sys, const Equilibrium& eq, int bus_id) {
    if (!sys.detail) throw NumericError("bus voltages unavailable: not an assembled system");
    const auto& d = *sys.detail;
    const int idx = d.cse.bus_index(bus_id);
    const BusSlot& slot = d.bus_slots[idx];
    return slot.dynamic ? Dq{eq.x_star(slot.index), eq.x_star(slot.index + 1)}
                        : Dq{eq.y_star(slot.index), eq.y_star(slot.index + 1)};
}

Dq equilibrium_device_power(const DaeSystem& sys, const Equilibrium& eq,
                            const std::string& device) {
    if (!sys.detail) throw NumericError("device power unavailable: not an assembled system");
    const auto& d = *sys.detail;
    Dq v, i;
    if (device == "sm") {
        v = equilibrium_bus_voltage(sys, eq, d.cse.machine.bus);
        const MachineState s = unpack_machine(eq.x_star.data() + d.sm_x_base, d.sm_delta);
        i = machine_terminal_current(s, d.cse.machine.params);
    } else if (device == "gfm") {
        v = equilibrium_bus_voltage(sys, eq, d.cse.gfm.bus);
        i = {eq.x_star(d.gfm_x_base + GfmState::kCount - 2),
             eq.x_star(d.gfm_x_base + GfmState::kCount - 1)};
    } else if (device == "gfl") {
        v = equilibrium_bus_voltage(sys, eq, d.cse.gfl.bus);
        i = {eq.x_star(d.gfl_x_base + GflState::kCount - 2),
             eq.x_star(d.gfl_x_base + GflState::kCount - 1)};
    } else {
        throw ConfigError("unknown device '" + device + "'");
    }
    return apparent_power(v, i);
}

}  // namespace gridss
