#pragma once

namespace gridss {

/// Every finite-difference step and convergence tolerance used by the engine,
/// in one place. Result files echo this record so a run can be reproduced.
struct NumericPolicy {
    double powerflow_tol = 1e-10;     // infinity-norm of P/Q mismatch, pu
    int powerflow_max_iter = 40;

    double newton_tol = 1e-9;         // infinity-norm of stacked [f; g]
    int newton_max_iter = 50;
    int newton_max_halvings = 8;      // step damping on residual increase

    double fd_step = 1e-7;            // central difference: h = fd_step*max(1,|z_i|)
    double gy_condition_limit = 1e12; // above this the reduction is refused

    double zero_eig_flag = 1e-8;      // |lambda| below this raises a diagnostic
    int richardson_entries = 20;      // random Jacobian entries re-checked per run
    double richardson_rel_tol = 1e-5;

    double init_residual_tol = 1e-9;  // device back-solve self check
};

inline const NumericPolicy& default_policy() {
    static const NumericPolicy p{};
    return p;
}

}  // namespace gridss
