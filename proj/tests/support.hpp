#pragma once

#include <complex>
#include <random>
#include <vector>

#include "harmrep/harness.hpp"

namespace testsupport {

using harmrep::C3;
using harmrep::cplx;

inline C3 random_c3(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    C3 v;
    for (auto& c : v) {
        const double re = g(rng);
        c = cplx(re, g(rng));
    }
    return v;
}

// Independent evaluation: sum of c * zeta^e with std::pow, no power tables.
inline cplx naive_eval(const harmrep::HomPoly3& P, const C3& z) {
    cplx s = 0.0;
    for (const auto& [e, c] : P.coeffs()) s += c * std::pow(z[0], e[0]) * std::pow(z[1], e[1]) * std::pow(z[2], e[2]);
    return s;
}

inline cplx det3x3(const std::vector<std::vector<cplx>>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline std::vector<harmrep::HomPoly3> builtin_curves() {
    std::vector<harmrep::HomPoly3> out;
    for (const auto& n : harmrep::scenario_names()) out.push_back(harmrep::make_scenario(n).P);
    return out;
}

}  // namespace testsupport
