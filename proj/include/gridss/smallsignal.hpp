#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gridss/dae.hpp"

namespace gridss {

/// Dynamics matrix after eliminating the algebraic states at an equilibrium.
struct ReducedJacobian {
    Eigen::MatrixXd j;  // n x n
    int n = 0, m = 0;
    double gy_condition = 1.0;
    std::vector<std::string> state_names;

    // Raw blocks kept for validation and diagnostics.
    Eigen::MatrixXd f_x, f_y, g_x, g_y;
};

/// Central finite differences at (x*, y*), then J = f_x - f_y gy^{-1} g_x.
/// Throws NumericError when g_y is numerically singular, naming the worst
/// conditioned algebraic constraint.
ReducedJacobian linearize(const DaeSystem& sys, const Equilibrium& eq,
                          const NumericPolicy& policy = default_policy());

struct Participant {
    std::string state;
    double factor = 0.0;
};

struct StabilityVerdict {
    std::vector<std::complex<double>> eigenvalues;
    double max_real = 0.0;
    int least_stable_index = -1;
    bool stable = false;  // max_real < 0, no hidden threshold
    std::vector<Participant> dominant;  // top participants of the least stable mode
    Eigen::MatrixXd participation;      // p(state k, mode i), rows sum to 1 per mode
    std::vector<std::string> state_names;
    bool near_zero_eigenvalue = false;  // |lambda| < policy.zero_eig_flag observed

    [[nodiscard]] std::vector<Participant> top_participants(int mode, int k) const;
};

/// Dense eigen-decomposition with left/right eigenvectors and participation
/// factors mapped back to named states.
StabilityVerdict eigensolve(const ReducedJacobian& jac,
                            const NumericPolicy& policy = default_policy());

/// Verify random stacked-Jacobian entries by step-halving Richardson
/// extrapolation. Returns the worst relative deviation observed.
double richardson_check(const DaeSystem& sys, const Equilibrium& eq, int entries,
                        unsigned long long seed, const NumericPolicy& policy = default_policy());

struct ModelOutcome {
    LineModel model = LineModel::StatPi;
    std::optional<StabilityVerdict> verdict;  // empty: equilibrium unavailable
    std::string failure;
};

struct LineModelComparison {
    std::vector<ModelOutcome> outcomes;
    /// max_real differences for the pairs (statpi-dynpi, statpi-mssb, dynpi-mssb)
    /// where both sides converged.
    std::vector<std::pair<std::string, double>> max_real_deltas;
};

/// Full pipeline for all three realizations on an identical dispatch.
LineModelComparison compare_line_models(const NetworkCase& cse, const GfmGains& gains,
                                        int segments = 5,
                                        const NumericPolicy& policy = default_policy());

}  // namespace gridss
