#include "gridss/smallsignal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridss/errors.hpp"
#include "gridss/rng.hpp"

namespace gridss {

namespace {

/// Central-difference blocks of the stacked residual at (x*, y*).
void fd_blocks(const DaeSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const NumericPolicy& policy, Eigen::MatrixXd& f_x, Eigen::MatrixXd& f_y,
               Eigen::MatrixXd& g_x, Eigen::MatrixXd& g_y) {
    const int n = sys.n, m = sys.m;
    f_x.resize(n, n);
    f_y.resize(n, m);
    g_x.resize(m, n);
    g_y.resize(m, m);
    Eigen::VectorXd f_p(n), g_p(m), f_m(n), g_m(m);
    Eigen::VectorXd xx = x, yy = y;
    for (int j = 0; j < n; ++j) {
        const double h = policy.fd_step * std::max(1.0, std::abs(x(j)));
        xx(j) = x(j) + h;
        sys.residual(xx, y, f_p, g_p);
        xx(j) = x(j) - h;
        sys.residual(xx, y, f_m, g_m);
        xx(j) = x(j);
        f_x.col(j) = (f_p - f_m) / (2.0 * h);
        if (m) g_x.col(j) = (g_p - g_m) / (2.0 * h);
    }
    for (int j = 0; j < m; ++j) {
        const double h = policy.fd_step * std::max(1.0, std::abs(y(j)));
        yy(j) = y(j) + h;
        sys.residual(x, yy, f_p, g_p);
        yy(j) = y(j) - h;
        sys.residual(x, yy, f_m, g_m);
        yy(j) = y(j);
        f_y.col(j) = (f_p - f_m) / (2.0 * h);
        g_y.col(j) = (g_p - g_m) / (2.0 * h);
    }
}

}  // namespace

ReducedJacobian linearize(const DaeSystem& sys, const Equilibrium& eq,
                          const NumericPolicy& policy) {
    ReducedJacobian out;
    out.n = sys.n;
    out.m = sys.m;
    fd_blocks(sys, eq.x_star, eq.y_star, policy, out.f_x, out.f_y, out.g_x, out.g_y);

    for (int i = 0; i < sys.n; ++i) out.state_names.push_back(sys.registry.dynamic_label(i));

    if (sys.m == 0) {
        out.j = out.f_x;
        out.gy_condition = 1.0;
    } else {
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.g_y,
                                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        out.gy_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
        if (!(out.gy_condition < policy.gy_condition_limit)) {
            const Eigen::VectorXd u_min = svd.matrixU().col(sv.size() - 1).cwiseAbs();
            int worst = 0;
            u_min.maxCoeff(&worst);
            std::ostringstream oss;
            oss << "algebraic constraints numerically singular (cond " << out.gy_condition
                << "); worst conditioned constraint: " << sys.registry.algebraic_label(worst);
            throw NumericError(oss.str());
        }
        out.j = out.f_x - out.f_y * out.g_y.partialPivLu().solve(out.g_x);
    }
    if (!out.j.allFinite()) throw NumericError("reduced Jacobian contains non-finite entries");
    return out;
}

std::vector<Participant> StabilityVerdict::top_participants(int mode, int k) const {
    std::vector<int> order(state_names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return participation(a, mode) > participation(b, mode);
    });
    std::vector<Participant> out;
    for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i) {
        out.push_back({state_names[order[i]], participation(order[i], mode)});
    }
    return out;
}

StabilityVerdict eigensolve(const ReducedJacobian& jac, const NumericPolicy& policy) {
    const int n = jac.n;
    Eigen::EigenSolver<Eigen::MatrixXd> es(jac.j, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) {
        std::ostringstream oss;
        oss << "eigensolver failed on " << n << "x" << n << " reduced Jacobian";
        if (n <= 12) oss << "; matrix:\n" << jac.j;
        throw NumericError(oss.str());
    }

    StabilityVerdict v;
    v.state_names = jac.state_names;
    v.eigenvalues.reserve(n);
    for (int i = 0; i < n; ++i) v.eigenvalues.push_back(es.eigenvalues()(i));

    const Eigen::MatrixXcd right = es.eigenvectors();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(right);
    const Eigen::MatrixXcd left = lu.inverse();
    if (!left.allFinite()) {
        throw NumericError("left eigenvectors unavailable: eigenvector matrix is singular");
    }

    v.participation.resize(n, n);
    for (int i = 0; i < n; ++i) {  // mode i
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double p = std::abs(left(i, k) * right(k, i));
            v.participation(k, i) = p;
            sum += p;
        }
        if (sum > 0.0) v.participation.col(i) /= sum;
    }

    v.max_real = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (v.eigenvalues[i].real() > v.max_real) {
            v.max_real = v.eigenvalues[i].real();
            v.least_stable_index = i;
        }
        if (std::abs(v.eigenvalues[i]) < policy.zero_eig_flag) v.near_zero_eigenvalue = true;
    }
    v.stable = v.max_real < 0.0;
    v.dominant = v.top_participants(v.least_stable_index, 5);
    return v;
}

double richardson_check(const DaeSystem& sys, const Equilibrium& eq, int entries,
                        unsigned long long seed, const NumericPolicy& policy) {
    const int n = sys.n, m = sys.m, nz = n + m;
    Eigen::VectorXd z(nz);
    z.head(n) = eq.x_star;
    z.tail(m) = eq.y_star;
    Eigen::VectorXd f(n), g(m);
    auto entry = [&](int row, const Eigen::VectorXd& zz) {
        sys.residual(zz.head(n), zz.tail(m), f, g);
        return row < n ? f(row) : g(row - n);
    };

    SplitMix64 rng(seed);
    double worst = 0.0;
    Eigen::VectorXd zz = z;
    for (int t = 0; t < entries; ++t) {
        const int row = static_cast<int>(rng.bounded(nz));
        const int col = static_cast<int>(rng.bounded(nz));
        const double h = policy.fd_step * std::max(1.0, std::abs(z(col)));
        auto central = [&](double step) {
            zz(col) = z(col) + step;
            const double plus = entry(row, zz);
            zz(col) = z(col) - step;
            const double minus = entry(row, zz);
            zz(col) = z(col);
            return (plus - minus) / (2.0 * step);
        };
        const double d_h = central(h);
        const double d_h2 = central(0.5 * h);
        const double extrapolated = (4.0 * d_h2 - d_h) / 3.0;
        const double dev = std::abs(d_h2 - extrapolated) / std::max(1.0, std::abs(extrapolated));
        worst = std::max(worst, dev);
    }
    return worst;
}

LineModelComparison compare_line_models(const NetworkCase& cse, const GfmGains& gains,
                                        int segments, const NumericPolicy& policy) {
    LineModelComparison out;
    for (const LineModel model : {LineModel::StatPi, LineModel::DynPi, LineModel::Mssb}) {
        ModelOutcome outcome;
        outcome.model = model;
        try {
            const DaeSystem sys = assemble(cse, model, gains, segments, policy);
            const EquilibriumResult er = find_equilibrium(sys, policy);
            if (!er.converged()) {
                std::ostringstream oss;
                oss << equilibrium_status_name(er.status) << " (residual " << er.final_residual
                    << " after " << er.iterations << " steps)";
                outcome.failure = oss.str();
            } else {
                outcome.verdict = eigensolve(linearize(sys, er.eq, policy), policy);
            }
        } catch (const Error& e) {
            outcome.failure = e.what();
        }
        out.outcomes.push_back(std::move(outcome));
    }

    auto real_of = [&](int a) -> std::optional<double> {
        if (!out.outcomes[a].verdict) return std::nullopt;
        return out.outcomes[a].verdict->max_real;
    };
    const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& [a, b] : pairs) {
        const auto ra = real_of(a), rb = real_of(b);
        if (ra && rb) {
            out.max_real_deltas.emplace_back(std::string(line_model_name(out.outcomes[a].model)) +
                                                 "-" + line_model_name(out.outcomes[b].model),
                                             *ra - *rb);
        }
    }
    return out;
}

}  // namespace gridss
