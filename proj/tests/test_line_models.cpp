#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "gridss/errors.hpp"
#include "gridss/line_models.hpp"
#include "gridss/rng.hpp"
#include "oracles.hpp"

using namespace gridss;

namespace {

const double kOmegaB = 2.0 * std::numbers::pi * 60.0;

BranchSpec test_line_200km() {
    BranchSpec b;
    b.from_bus = 1;
    b.to_bus = 2;
    b.r_km = 0.02;
    b.l_km = 0.30;
    b.c_km = 3.0e-4;
    b.length_km = 200.0;
    return b;
}

}  // namespace

TEST_CASE("hyperbolic correction degenerates exactly for gamma*l = 0") {
    // y = 0 gives gamma = 0: the factors must be exactly (1, 1).
    const LumpedPi pi = hyperbolic_correction(Cplx(0.0, 0.0576), Cplx(0.0, 0.0), 1.0);
    CHECK(pi.z_pi == Cplx(0.0, 0.0576));
    CHECK(pi.y_pi == Cplx(0.0, 0.0));
}

TEST_CASE("lossless quarter-wave series factor is 2/pi") {
    // Choose z = jx, y = jb with sqrt(zy)*l = j*pi/2.
    const double x = 1.0, l = 1.0;
    const double b = std::pow(std::numbers::pi / 2.0, 2) / (x * l * l);
    const Cplx gamma_l = std::sqrt(Cplx(0.0, x) * Cplx(0.0, b)) * l;
    REQUIRE(gamma_l.imag() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
    const Cplx factor = sinhc(gamma_l);
    CHECK(factor.real() == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(std::abs(factor.imag()) < 1e-12);
}

TEST_CASE("hyperbolic correction matches the series oracle") {
    SUBCASE("published test line") {
        const BranchSpec b = test_line_200km();
        const LumpedPi pi = corrected_pi(b);
        const auto oracle = oracles::corrected_pi_series(b.z_km(), b.y_km(), b.length_km);
        CHECK(std::abs(pi.z_pi - oracle.z_pi) <= 1e-10 * std::abs(oracle.z_pi));
        // Re(y) is overwritten to zero by the correction.
        CHECK(pi.y_pi.real() == 0.0);
        CHECK(std::abs(pi.y_pi.imag() - oracle.y_pi.imag()) <=
              1e-10 * std::abs(oracle.y_pi));
    }
    SUBCASE("100 random draws") {
        SplitMix64 rng(11);
        for (int t = 0; t < 100; ++t) {
            const Cplx z(0.05 * rng.uniform(), 0.05 + 0.4 * rng.uniform());
            const Cplx y(0.0, 5e-4 * rng.uniform());
            const double len = 1.0 + 399.0 * rng.uniform();
            const LumpedPi pi = hyperbolic_correction(z, y, len);
            const auto oracle = oracles::corrected_pi_series(z, y, len);
            CHECK(std::abs(pi.z_pi - oracle.z_pi) <= 1e-10 * std::abs(oracle.z_pi));
            CHECK(std::abs(pi.y_pi.imag() - oracle.y_pi.imag()) <=
                  1e-10 * std::max(1e-12, std::abs(oracle.y_pi)));
        }
    }
}

TEST_CASE("correction factors are continuous as length shrinks") {
    const BranchSpec b = test_line_200km();
    double prev_z = 0.0;
    for (const double len : {100.0, 10.0, 1.0, 0.1, 0.01}) {
        const LumpedPi pi = hyperbolic_correction(b.z_km(), b.y_km(), len);
        const double per_km = std::abs(pi.z_pi) / len;
        if (prev_z > 0.0) CHECK(per_km > prev_z);  // factor -> 1 monotonically here
        prev_z = per_km;
        CHECK(std::abs(pi.z_pi / (b.z_km() * len) - Cplx(1.0, 0.0)) < 0.2);
    }
    const LumpedPi tiny = hyperbolic_correction(b.z_km(), b.y_km(), 1e-6);
    CHECK(std::abs(tiny.z_pi / (b.z_km() * 1e-6) - Cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("statpi port currents") {
    SUBCASE("no drop, no shunt") {
        LumpedPi pi{Cplx(0.01, 0.1), Cplx(0.0, 0.0)};
        const Dq v{1.0, 0.3};
        const auto [i_in, i_out] = statpi_port_currents(v, v, pi);
        CHECK(i_in.mag() < 1e-15);
        CHECK(i_out.mag() < 1e-15);
    }
    SUBCASE("series Ohm's law") {
        LumpedPi pi{Cplx(0.0, 0.1), Cplx(0.0, 0.0)};
        const auto [i_in, i_out] = statpi_port_currents(Dq{1.0, 0.0}, Dq{0.9, 0.0}, pi);
        CHECK(i_in.d == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(i_in.q == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(i_out.d == doctest::Approx(i_in.d));
        CHECK(i_out.q == doctest::Approx(i_in.q));
    }
    SUBCASE("independent admittance-matrix oracle") {
        LumpedPi pi{Cplx(0.01, 0.1), Cplx(0.0, 0.02)};
        const Dq v1{1.02, 0.0}, v2{0.98, 0.05};
        const auto [i_in, i_out] = statpi_port_currents(v1, v2, pi);
        Cplx oi_in, oi_out;
        oracles::statpi_two_port(pi.z_pi, pi.y_pi, v1.c(), v2.c(), oi_in, oi_out);
        CHECK(std::abs(i_in.c() - oi_in) < 1e-14);
        CHECK(std::abs(i_out.c() - oi_out) < 1e-14);
    }
    SUBCASE("singular line") {
        LumpedPi pi{Cplx(0.0, 0.0), Cplx(0.0, 0.02)};
        CHECK_THROWS_AS(statpi_port_currents(Dq{1, 0}, Dq{1, 0}, pi), NumericError);
    }
}

TEST_CASE("dynpi steady state reproduces statpi") {
    const LumpedPi pi = corrected_pi(test_line_200km());
    SplitMix64 rng(23);
    for (int t = 0; t < 50; ++t) {
        const Dq v1{0.9 + 0.2 * rng.uniform(), 0.4 * rng.uniform() - 0.2};
        const Dq v2{0.9 + 0.2 * rng.uniform(), 0.4 * rng.uniform() - 0.2};
        const auto [si_in, si_out] = statpi_port_currents(v1, v2, pi);
        const auto [di_in, di_out] = dynpi_steady_port_currents(v1, v2, pi, 1.0);
        CHECK(std::abs(si_in.c() - di_in.c()) < 1e-10);
        CHECK(std::abs(si_out.c() - di_out.c()) < 1e-10);

        // And the residual at that steady state is zero.
        DynPiState s;
        s.i = (v1 - v2) / Cplx(pi.r_pi(), pi.l_pi());
        s.v1 = v1;
        s.v2 = v2;
        const auto d = dynpi_residual(s, di_in, di_out, pi, 1.0, kOmegaB);
        CHECK(d.di.mag() < 1e-10);
        CHECK(d.dv1.mag() < 1e-10);
        CHECK(d.dv2.mag() < 1e-10);
    }
}

TEST_CASE("dynpi single-term activation") {
    const LumpedPi pi = corrected_pi(test_line_200km());
    DynPiState s;  // all states zero
    const Dq i_in{1.0, 0.0};
    const auto d = dynpi_residual(s, i_in, Dq{}, pi, 1.0, kOmegaB);
    const double c_half = 0.5 * pi.c_pi();
    CHECK(d.dv1.d == doctest::Approx(kOmegaB * 1.0 / c_half).epsilon(1e-12));
    CHECK(d.dv1.q == doctest::Approx(0.0));
    CHECK(d.di.mag() == doctest::Approx(0.0));
}

TEST_CASE("dynpi driven line eigenvalues match the series RLC loop") {
    // Fixed source at port 1, port 2 open: states (i, v2). The abc-domain loop
    // is R-L-C series with L = l/w_b, C = c/(2 w_b); in dq the modes shift by
    // +-j*w_b but keep the real part -r*w_b/(2l).
    const LumpedPi pi = corrected_pi(test_line_200km());
    const double r = pi.r_pi(), l = pi.l_pi(), c_half = 0.5 * pi.c_pi();

    Eigen::MatrixXd a(4, 4);
    const Dq v1{1.0, 0.0};
    const double h = 1e-7;
    auto residual = [&](const Eigen::Vector4d& z) {
        DynPiState s;
        s.i = {z(0), z(1)};
        s.v1 = v1;
        s.v2 = {z(2), z(3)};
        const auto d = dynpi_residual(s, Dq{}, Dq{}, pi, 1.0, kOmegaB);
        return Eigen::Vector4d{d.di.d, d.di.q, d.dv2.d, d.dv2.q};
    };
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d zp = Eigen::Vector4d::Zero(), zm = Eigen::Vector4d::Zero();
        zp(j) += h;
        zm(j) -= h;
        a.col(j) = (residual(zp) - residual(zm)) / (2.0 * h);
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> es(a);

    const double sigma = -r * kOmegaB / (2.0 * l);
    const double omega_n2 = kOmegaB * kOmegaB / (l * c_half);
    const double omega_d = std::sqrt(omega_n2 - sigma * sigma);
    for (int i = 0; i < 4; ++i) {
        CHECK(es.eigenvalues()(i).real() == doctest::Approx(sigma).epsilon(1e-6));
        const double im = std::abs(es.eigenvalues()(i).imag());
        const bool matches = std::abs(im - std::abs(omega_d - kOmegaB)) < 1e-3 * omega_n2 ||
                             std::abs(im - (omega_d + kOmegaB)) < 1e-3 * omega_n2;
        CHECK(matches);
    }
}

TEST_CASE("mssb with one segment matches dynpi structure on uncorrected values") {
    const BranchSpec b = test_line_200km();
    const SegmentParams seg = segment_params(b, 1);
    CHECK(seg.r_seg == doctest::Approx(b.r_km * b.length_km));
    CHECK(seg.l_seg == doctest::Approx(b.l_km * b.length_km));
    CHECK(seg.c_seg == doctest::Approx(b.c_km * b.length_km));

    LumpedPi uncorrected{Cplx(seg.r_seg, seg.l_seg), Cplx(0.0, seg.c_seg)};
    SplitMix64 rng(5);
    for (int t = 0; t < 20; ++t) {
        double states[6];
        for (double& v : states) v = 2.0 * rng.uniform() - 1.0;
        const Dq i_in{rng.uniform(), rng.uniform()};
        const Dq i_out{rng.uniform(), rng.uniform()};

        double deriv[6];
        mssb_residual(states, i_in, i_out, seg, 1.0, kOmegaB, deriv);

        DynPiState s;
        s.i = {states[0], states[1]};
        s.v1 = {states[2], states[3]};
        s.v2 = {states[4], states[5]};
        const auto d = dynpi_residual(s, i_in, i_out, uncorrected, 1.0, kOmegaB);
        CHECK(deriv[0] == doctest::Approx(d.di.d).epsilon(1e-12));
        CHECK(deriv[1] == doctest::Approx(d.di.q).epsilon(1e-12));
        CHECK(deriv[2] == doctest::Approx(d.dv1.d).epsilon(1e-12));
        CHECK(deriv[3] == doctest::Approx(d.dv1.q).epsilon(1e-12));
        CHECK(deriv[4] == doctest::Approx(d.dv2.d).epsilon(1e-12));
        CHECK(deriv[5] == doctest::Approx(d.dv2.q).epsilon(1e-12));
    }
}

TEST_CASE("mssb zero state is an equilibrium of the unforced line") {
    const SegmentParams seg = segment_params(test_line_200km(), 5);
    double states[2 * 5 + 2 * 6] = {0.0};
    double deriv[2 * 5 + 2 * 6];
    mssb_residual(states, Dq{}, Dq{}, seg, 1.0, kOmegaB, deriv);
    for (double v : deriv) CHECK(v == 0.0);
}

TEST_CASE("mssb rejects zero segments") {
    CHECK_THROWS_AS(segment_params(test_line_200km(), 0), ConfigError);
}

TEST_CASE("mssb open-circuit impedance converges to telegrapher") {
    const BranchSpec b = test_line_200km();
    const Cplx exact = telegrapher_open_circuit_impedance(b, 1.0);
    const Cplx exact_oracle = oracles::telegrapher_zoc(b.z_km(), b.y_km(), b.length_km);
    REQUIRE(std::abs(exact - exact_oracle) < 1e-9 * std::abs(exact_oracle));

    double prev_err = std::numeric_limits<double>::infinity();
    for (const int n : {1, 2, 4, 8, 16}) {
        const LineRealization line = realize_branch(b, LineModel::Mssb, n);
        const Cplx z = open_circuit_impedance(line, 1.0);
        const double err = std::abs(z - exact) / std::abs(exact);
        CHECK(err < prev_err);
        prev_err = err;
        if (n == 16) CHECK(err < 0.01);
    }
}

TEST_CASE("mssb transfer matrix approaches the corrected pi as N grows") {
    const BranchSpec b = test_line_200km();
    const LineRealization corrected = realize_branch(b, LineModel::DynPi, 1);
    const TwoPortAbcd ref = realization_abcd(corrected, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (const int n : {1, 2, 4, 8, 16}) {
        const LineRealization line = realize_branch(b, LineModel::Mssb, n);
        const TwoPortAbcd t = realization_abcd(line, 1.0);
        const double err = std::abs(t.a - ref.a) + std::abs(t.b - ref.b) +
                           std::abs(t.c - ref.c) + std::abs(t.d - ref.d);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("passivity: random passive lines have non-positive isolated spectra") {
    SplitMix64 rng(99);
    for (int t = 0; t < 25; ++t) {
        SegmentParams seg;
        seg.n_segments = 1 + static_cast<int>(rng.bounded(4));
        seg.r_seg = 0.2 * rng.uniform();
        seg.l_seg = 0.05 + 0.5 * rng.uniform();
        seg.c_seg = 0.05 + 0.5 * rng.uniform();

        const int ns = seg.n_segments;
        const int dim = 2 * ns + 2 * (ns + 1);
        Eigen::MatrixXd a(dim, dim);
        std::vector<double> z(dim, 0.0), deriv(dim);
        const double h = 1e-6;
        for (int j = 0; j < dim; ++j) {
            std::vector<double> zp = z, zm = z;
            zp[j] += h;
            zm[j] -= h;
            std::vector<double> dp(dim), dm(dim);
            mssb_residual(zp.data(), Dq{}, Dq{}, seg, 1.0, kOmegaB, dp.data());
            mssb_residual(zm.data(), Dq{}, Dq{}, seg, 1.0, kOmegaB, dm.data());
            for (int i = 0; i < dim; ++i) a(i, j) = (dp[i] - dm[i]) / (2.0 * h);
        }
        const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
        for (int i = 0; i < dim; ++i) {
            CHECK(es.eigenvalues()(i).real() <= 1e-9);
        }
    }
}

TEST_CASE("shipped 9-bus lines reproduce the classic lumped data") {
    // The per-km values were fit so the hyperbolic correction lands on the
    // standard branch impedances exactly.
    struct Target {
        int from, to;
        double r, x, b;
    };
    const Target targets[] = {
        {1, 4, 0.0, 0.0576, 0.0},    {2, 7, 0.0, 0.0625, 0.0},   {3, 9, 0.0, 0.0586, 0.0},
        {4, 5, 0.010, 0.085, 0.176}, {4, 6, 0.017, 0.092, 0.158}, {5, 7, 0.032, 0.161, 0.306},
        {6, 9, 0.039, 0.170, 0.358}, {7, 8, 0.0085, 0.072, 0.149}, {8, 9, 0.0119, 0.1008, 0.209},
    };
    const NetworkCase c = default_case_template();
    for (const auto& t : targets) {
        bool found = false;
        for (const auto& br : c.branches) {
            if (br.from_bus != t.from || br.to_bus != t.to) continue;
            found = true;
            const LumpedPi pi = corrected_pi(br);
            CHECK(pi.z_pi.real() == doctest::Approx(t.r).epsilon(1e-12));
            CHECK(pi.z_pi.imag() == doctest::Approx(t.x).epsilon(1e-12));
            CHECK(pi.y_pi.imag() == doctest::Approx(t.b).epsilon(1e-12));
        }
        CHECK(found);
    }
}
