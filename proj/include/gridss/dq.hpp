#pragma once

#include <cmath>
#include <complex>

namespace gridss {

using Cplx = std::complex<double>;

/// Complex quantity in a rotating dq frame: x = d + jq.
struct Dq {
    double d = 0.0;
    double q = 0.0;

    Dq() = default;
    constexpr Dq(double d_, double q_) : d(d_), q(q_) {}
    explicit Dq(const Cplx& z) : d(z.real()), q(z.imag()) {}

    [[nodiscard]] Cplx c() const { return {d, q}; }
    [[nodiscard]] double mag() const { return std::hypot(d, q); }
    [[nodiscard]] double arg() const { return std::atan2(q, d); }

    Dq& operator+=(const Dq& o) { d += o.d; q += o.q; return *this; }
    Dq& operator-=(const Dq& o) { d -= o.d; q -= o.q; return *this; }
};

inline Dq operator+(Dq a, const Dq& b) { return a += b; }
inline Dq operator-(Dq a, const Dq& b) { return a -= b; }
inline Dq operator-(const Dq& a) { return {-a.d, -a.q}; }
inline Dq operator*(double s, const Dq& a) { return {s * a.d, s * a.q}; }
inline Dq operator*(const Dq& a, double s) { return s * a; }
inline Dq operator/(const Dq& a, double s) { return {a.d / s, a.q / s}; }

/// Complex product; dq phasors multiply like complex numbers.
inline Dq operator*(const Dq& a, const Dq& b) {
    return {a.d * b.d - a.q * b.q, a.d * b.q + a.q * b.d};
}
inline Dq operator*(const Cplx& z, const Dq& a) { return Dq(z) * a; }
inline Dq operator*(const Dq& a, const Cplx& z) { return a * Dq(z); }
inline Dq operator/(const Dq& a, const Cplx& z) { return Dq(a.c() / z); }

inline Dq conj(const Dq& a) { return {a.d, -a.q}; }

/// x * e^{j theta}: rotate a dq phasor by theta radians. Magnitude-preserving.
inline Dq rotate_frame(const Dq& x, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {x.d * c - x.q * s, x.d * s + x.q * c};
}

/// Complex power v * conj(i) as (p, q).
inline Dq apparent_power(const Dq& v, const Dq& i) { return v * conj(i); }

}  // namespace gridss
