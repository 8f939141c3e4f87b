#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridss/line_models.hpp"
#include "gridss/network.hpp"
#include "gridss/numeric_policy.hpp"
#include "gridss/powerflow.hpp"

namespace gridss {

/// Named slot in the global state vector: (owner, local name) -> index.
struct StateSlot {
    std::string owner;
    std::string name;
    int index = -1;
};

class StateRegistry {
public:
    int add_dynamic(const std::string& owner, const std::string& name);
    int add_algebraic(const std::string& owner, const std::string& name);

    [[nodiscard]] int n() const { return static_cast<int>(x_.size()); }
    [[nodiscard]] int m() const { return static_cast<int>(y_.size()); }
    [[nodiscard]] const std::vector<StateSlot>& dynamic_slots() const { return x_; }
    [[nodiscard]] const std::vector<StateSlot>& algebraic_slots() const { return y_; }
    [[nodiscard]] int find_dynamic(const std::string& owner, const std::string& name) const;
    [[nodiscard]] std::string dynamic_label(int index) const;
    [[nodiscard]] std::string algebraic_label(int index) const;

private:
    std::vector<StateSlot> x_;
    std::vector<StateSlot> y_;
};

struct AssembledDetail;  // defined by the assembler; opaque to generic callers

/// Stacked DAE [dx; 0] = [f(x,y,u); g(x,y,u)] with an index registry.
/// Immutable after assembly; evaluation allocates nothing shared, so instances
/// can be evaluated concurrently.
struct DaeSystem {
    int n = 0;
    int m = 0;
    StateRegistry registry;
    Eigen::VectorXd u;
    std::vector<std::string> u_names;
    std::shared_ptr<const AssembledDetail> detail;  // null for hand-built systems

    std::function<void(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& u, Eigen::VectorXd& f, Eigen::VectorXd& g)>
        eval;

    Eigen::VectorXd x_guess, y_guess;

    // Assembly provenance (empty for hand-built test systems).
    PowerFlowSolution powerflow;
    LineModel line_model = LineModel::StatPi;
    int segments = 0;
    double omega_b = 2.0 * 3.14159265358979323846 * 60.0;

    void residual(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Eigen::VectorXd& f,
                  Eigen::VectorXd& g) const {
        eval(x, y, u, f, g);
    }
    [[nodiscard]] double residual_inf_norm(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const;
};

/// Compose devices, loads and line realizations into the global DAE, run the
/// power flow, back-solve every device, and store the equilibrium guess.
DaeSystem assemble(const NetworkCase& cse, LineModel model, const GfmGains& gains,
                   int segments = 5, const NumericPolicy& policy = default_policy());

enum class EquilibriumStatus { Converged, MaxIterations, NumericalFailure };

const char* equilibrium_status_name(EquilibriumStatus s);

struct Equilibrium {
    Eigen::VectorXd x_star, y_star;
    double residual_norm = 0.0;
    int newton_steps = 0;
    PowerFlowSolution powerflow;
};

struct EquilibriumResult {
    EquilibriumStatus status = EquilibriumStatus::NumericalFailure;
    Equilibrium eq;       // valid when status == Converged
    double final_residual = 0.0;
    int iterations = 0;

    [[nodiscard]] bool converged() const { return status == EquilibriumStatus::Converged; }
};

/// Damped Newton on the stacked residual from the assembled guess (or an
/// explicit one). Non-convergence is reported, not thrown: sweeps record the
/// sample and move on.
EquilibriumResult find_equilibrium(const DaeSystem& sys,
                                   const NumericPolicy& policy = default_policy());
EquilibriumResult find_equilibrium(const DaeSystem& sys, const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& y0,
                                   const NumericPolicy& policy = default_policy());

/// Per-bus voltage phasor of an equilibrium, network frame.
Dq equilibrium_bus_voltage(const DaeSystem& sys, const Equilibrium& eq, int bus_id);

/// Terminal complex power (p, q) of a named device ("sm", "gfm", "gfl").
Dq equilibrium_device_power(const DaeSystem& sys, const Equilibrium& eq,
                            const std::string& device);

}  // namespace gridss
