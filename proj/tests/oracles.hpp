#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately written against the math, not against the library code paths it
// checks: extended-precision series for the hyperbolic factors, direct complex
// circuit algebra for the two-ports, and exact distributed-line formulas.

#include <complex>

namespace oracles {

using CplxL = std::complex<long double>;

/// Taylor series of sinh(x)/x in extended precision. Converges to machine
/// epsilon long before 60 terms for |x| of a few units.
inline CplxL sinhc_series(const CplxL& x) {
    const CplxL x2 = x * x;
    CplxL term{1.0L, 0.0L};
    CplxL sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= x2 / CplxL(static_cast<long double>(2 * k) * (2 * k + 1), 0.0L);
        sum += term;
        if (std::abs(term) < 1e-30L * std::abs(sum)) break;
    }
    return sum;
}

inline CplxL cosh_series(const CplxL& x) {
    const CplxL x2 = x * x;
    CplxL term{1.0L, 0.0L};
    CplxL sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= x2 / CplxL(static_cast<long double>(2 * k - 1) * (2 * k), 0.0L);
        sum += term;
        if (std::abs(term) < 1e-30L * std::abs(sum)) break;
    }
    return sum;
}

/// tanh(x/2)/(x/2) = sinh(x/2)/x... assembled from the two series above.
inline CplxL tanhc_half_series(const CplxL& x) {
    const CplxL h = x / CplxL(2.0L, 0.0L);
    return sinhc_series(h) / cosh_series(h);
}

struct PiOracle {
    std::complex<double> z_pi;
    std::complex<double> y_pi;  // before the g := 0 overwrite
};

/// Corrected lumped parameters from the series oracles.
inline PiOracle corrected_pi_series(std::complex<double> z_km, std::complex<double> y_km,
                                    double length) {
    const CplxL z{z_km.real(), z_km.imag()};
    const CplxL y{y_km.real(), y_km.imag()};
    const CplxL l{static_cast<long double>(length), 0.0L};
    const CplxL gl = std::sqrt(z * y) * l;
    const CplxL zp = z * l * sinhc_series(gl);
    const CplxL yp = y * l * tanhc_half_series(gl);
    return {{static_cast<double>(zp.real()), static_cast<double>(zp.imag())},
            {static_cast<double>(yp.real()), static_cast<double>(yp.imag())}};
}

/// Exact open-circuit input impedance of the distributed line.
inline std::complex<double> telegrapher_zoc(std::complex<double> z_km,
                                            std::complex<double> y_km, double length) {
    const CplxL z{z_km.real(), z_km.imag()};
    const CplxL y{y_km.real(), y_km.imag()};
    const CplxL gamma = std::sqrt(z * y);
    const CplxL zc = std::sqrt(z / y);
    const CplxL gl = gamma * CplxL(static_cast<long double>(length), 0.0L);
    const CplxL zoc = zc * cosh_series(gl) / (gl == CplxL{} ? CplxL{1.0L, 0.0L}
                                                            : sinhc_series(gl) * gl);
    return {static_cast<double>(zoc.real()), static_cast<double>(zoc.imag())};
}

/// statpi port currents by direct 2x2 admittance evaluation in plain complex
/// arithmetic.
inline void statpi_two_port(std::complex<double> z_pi, std::complex<double> y_pi,
                            std::complex<double> v1, std::complex<double> v2,
                            std::complex<double>& i_in, std::complex<double>& i_out) {
    const std::complex<double> ys = 1.0 / z_pi;
    const std::complex<double> yh = 0.5 * y_pi;
    i_in = (ys + yh) * v1 - ys * v2;
    i_out = ys * v1 - (ys + yh) * v2;
}

}  // namespace oracles
