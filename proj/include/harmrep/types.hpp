#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace harmrep {

using cplx = std::complex<double>;
using C3 = std::array<cplx, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline C3 operator+(const C3& a, const C3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline C3 operator-(const C3& a, const C3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline C3 operator*(cplx s, const C3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline C3 operator*(double s, const C3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Bilinear pairing sum a_i b_i.
inline cplx dot(const C3& a, const C3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Hermitian pairing sum conj(a_i) b_i.
inline cplx hdot(const C3& a, const C3& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

inline double norm2(const C3& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]); }
inline double norm(const C3& a) { return std::sqrt(norm2(a)); }

inline C3 conj(const C3& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }

inline C3 normalized(const C3& a) { return (1.0 / norm(a)) * a; }

inline C3 cross(const C3& a, const C3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// det of the 3x3 matrix with columns a, b, c
inline cplx det3(const C3& a, const C3& b, const C3& c) { return dot(a, cross(b, c)); }

// Unit lift with nonnegative real first coordinate whenever z0 != 0.
inline C3 sphere_lift(const C3& z) {
    C3 s = normalized(z);
    if (std::abs(s[0]) > 0.0) s = (std::conj(s[0]) / std::abs(s[0])) * s;
    return s;
}

inline C3 chart_point(cplx x, cplx y) { return {cplx(1.0), x, y}; }

// rho = (|z1|^2 - R^2 |z0|^2) / |z|^2
inline double rho(const C3& z, double R) { return (std::norm(z[1]) - R * R * std::norm(z[0])) / norm2(z); }

}  // namespace harmrep
