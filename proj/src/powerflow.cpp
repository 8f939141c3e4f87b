#include "gridss/powerflow.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "gridss/errors.hpp"
#include "gridss/line_models.hpp"

namespace gridss {

const BusSolution& PowerFlowSolution::at_bus(int id) const {
    for (const auto& b : buses) {
        if (b.id == id) return b;
    }
    throw ConfigError("power flow solution has no bus " + std::to_string(id));
}

PowerFlowSolution solve_powerflow(const NetworkCase& cse, const NumericPolicy& policy) {
    cse.validate();
    const int nb = static_cast<int>(cse.buses.size());

    Eigen::MatrixXcd ybus = Eigen::MatrixXcd::Zero(nb, nb);
    for (const auto& br : cse.branches) {
        const LumpedPi pi = corrected_pi(br);
        const int f = cse.bus_index(br.from_bus);
        const int t = cse.bus_index(br.to_bus);
        const Cplx ys = 1.0 / pi.z_pi;
        const Cplx yh = 0.5 * pi.y_pi;
        ybus(f, f) += ys + yh;
        ybus(t, t) += ys + yh;
        ybus(f, t) -= ys;
        ybus(t, f) -= ys;
    }

    // Specified net injections (generation minus load).
    Eigen::VectorXd p_spec = Eigen::VectorXd::Zero(nb);
    Eigen::VectorXd q_spec = Eigen::VectorXd::Zero(nb);
    int slack = -1;
    std::vector<bool> is_pv(nb, false);
    for (int i = 0; i < nb; ++i) {
        const Bus& b = cse.buses[i];
        p_spec(i) -= b.load_p;
        q_spec(i) -= b.load_q;
        if (b.kind == BusKind::Reference) slack = i;
        if (b.kind == BusKind::Pv) is_pv[i] = true;
    }
    p_spec(cse.bus_index(cse.gfm.bus)) += cse.gfm_p_set;
    p_spec(cse.bus_index(cse.gfl.bus)) += cse.gfl_p_set;
    q_spec(cse.bus_index(cse.gfl.bus)) += cse.gfl_q_set;
    if (slack < 0) throw ConfigError("no reference bus");

    Eigen::VectorXd vm = Eigen::VectorXd::Ones(nb);
    Eigen::VectorXd th = Eigen::VectorXd::Zero(nb);
    for (int i = 0; i < nb; ++i) {
        if (cse.buses[i].kind != BusKind::Pq) vm(i) = cse.buses[i].voltage_setpoint;
    }

    std::vector<int> th_vars, vm_vars;
    for (int i = 0; i < nb; ++i) {
        if (i != slack) th_vars.push_back(i);
        if (i != slack && !is_pv[i]) vm_vars.push_back(i);
    }
    const int n_th = static_cast<int>(th_vars.size());
    const int n_vm = static_cast<int>(vm_vars.size());

    auto injections = [&](Eigen::VectorXd& p, Eigen::VectorXd& q) {
        for (int i = 0; i < nb; ++i) {
            double pi_acc = 0.0, qi_acc = 0.0;
            for (int k = 0; k < nb; ++k) {
                const double g = ybus(i, k).real(), b = ybus(i, k).imag();
                const double dth = th(i) - th(k);
                pi_acc += vm(k) * (g * std::cos(dth) + b * std::sin(dth));
                qi_acc += vm(k) * (g * std::sin(dth) - b * std::cos(dth));
            }
            p(i) = vm(i) * pi_acc;
            q(i) = vm(i) * qi_acc;
        }
    };

    Eigen::VectorXd p_calc(nb), q_calc(nb);
    double worst = 0.0;
    int iter = 0;
    for (; iter <= policy.powerflow_max_iter; ++iter) {
        injections(p_calc, q_calc);
        Eigen::VectorXd mismatch(n_th + n_vm);
        for (int a = 0; a < n_th; ++a) mismatch(a) = p_spec(th_vars[a]) - p_calc(th_vars[a]);
        for (int a = 0; a < n_vm; ++a) {
            mismatch(n_th + a) = q_spec(vm_vars[a]) - q_calc(vm_vars[a]);
        }
        worst = mismatch.size() ? mismatch.cwiseAbs().maxCoeff() : 0.0;
        if (worst < policy.powerflow_tol) break;
        if (iter == policy.powerflow_max_iter) {
            std::ostringstream oss;
            oss << "power flow did not converge after " << iter
                << " iterations; worst mismatch " << worst << " pu";
            throw PowerFlowError(oss.str(), worst);
        }

        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_th + n_vm, n_th + n_vm);
        for (int a = 0; a < n_th; ++a) {
            const int i = th_vars[a];
            for (int b = 0; b < n_th; ++b) {
                const int k = th_vars[b];
                if (i == k) {
                    jac(a, b) = -q_calc(i) - ybus(i, i).imag() * vm(i) * vm(i);
                } else {
                    const double dth = th(i) - th(k);
                    jac(a, b) = vm(i) * vm(k) *
                                (ybus(i, k).real() * std::sin(dth) -
                                 ybus(i, k).imag() * std::cos(dth));
                }
            }
            for (int b = 0; b < n_vm; ++b) {
                const int k = vm_vars[b];
                if (i == k) {
                    jac(a, n_th + b) = p_calc(i) / vm(i) + ybus(i, i).real() * vm(i);
                } else {
                    const double dth = th(i) - th(k);
                    jac(a, n_th + b) = vm(i) * (ybus(i, k).real() * std::cos(dth) +
                                                ybus(i, k).imag() * std::sin(dth));
                }
            }
        }
        for (int a = 0; a < n_vm; ++a) {
            const int i = vm_vars[a];
            for (int b = 0; b < n_th; ++b) {
                const int k = th_vars[b];
                if (i == k) {
                    jac(n_th + a, b) = p_calc(i) - ybus(i, i).real() * vm(i) * vm(i);
                } else {
                    const double dth = th(i) - th(k);
                    jac(n_th + a, b) = -vm(i) * vm(k) *
                                       (ybus(i, k).real() * std::cos(dth) +
                                        ybus(i, k).imag() * std::sin(dth));
                }
            }
            for (int b = 0; b < n_vm; ++b) {
                const int k = vm_vars[b];
                if (i == k) {
                    jac(n_th + a, n_th + b) = q_calc(i) / vm(i) - ybus(i, i).imag() * vm(i);
                } else {
                    const double dth = th(i) - th(k);
                    jac(n_th + a, n_th + b) = vm(i) * (ybus(i, k).real() * std::sin(dth) -
                                                       ybus(i, k).imag() * std::cos(dth));
                }
            }
        }

        const Eigen::VectorXd step = jac.partialPivLu().solve(mismatch);
        if (!step.allFinite()) {
            throw PowerFlowError("power flow Jacobian solve produced non-finite step", worst);
        }
        for (int a = 0; a < n_th; ++a) th(th_vars[a]) += step(a);
        for (int a = 0; a < n_vm; ++a) vm(vm_vars[a]) += step(n_th + a);
    }

    injections(p_calc, q_calc);
    PowerFlowSolution sol;
    sol.iterations = iter;
    sol.mismatch = worst;
    for (int i = 0; i < nb; ++i) {
        BusSolution bs;
        bs.id = cse.buses[i].id;
        bs.v_mag = vm(i);
        bs.theta = th(i);
        bs.p_inj = p_calc(i);
        bs.q_inj = q_calc(i);
        sol.buses.push_back(bs);
    }
    for (const auto& br : cse.branches) {
        const LumpedPi pi = corrected_pi(br);
        const Dq vf = sol.at_bus(br.from_bus).voltage();
        const Dq vt = sol.at_bus(br.to_bus).voltage();
        const Dq i_series = (vf - vt) / pi.z_pi;
        sol.losses_p += pi.r_pi() * (i_series.d * i_series.d + i_series.q * i_series.q);
    }
    sol.slack_p = p_calc(slack);
    sol.slack_q = q_calc(slack);
    return sol;
}

}  // namespace gridss
