#pragma once

#include <vector>

#include "gridss/dq.hpp"
#include "gridss/network.hpp"
#include "gridss/numeric_policy.hpp"

namespace gridss {

struct BusSolution {
    int id = 0;
    double v_mag = 0.0;
    double theta = 0.0;  // rad
    double p_inj = 0.0;  // net injection (generation minus load)
    double q_inj = 0.0;

    [[nodiscard]] Dq voltage() const {
        return {v_mag * std::cos(theta), v_mag * std::sin(theta)};
    }
};

struct PowerFlowSolution {
    std::vector<BusSolution> buses;  // ordered as in the case
    int iterations = 0;
    double mismatch = 0.0;  // final infinity-norm
    double losses_p = 0.0;  // total series I^2 R
    double slack_p = 0.0, slack_q = 0.0;

    [[nodiscard]] const BusSolution& at_bus(int id) const;
};

/// Newton-Raphson on the nominal-frequency admittance network built from the
/// hyperbolically corrected branch pis. Bus 1 absorbs losses.
PowerFlowSolution solve_powerflow(const NetworkCase& cse,
                                  const NumericPolicy& policy = default_policy());

}  // namespace gridss
