#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "harmrep/types.hpp"

namespace harmrep {

inline constexpr int kMaxDegree = 8;

using Exp3 = std::array<int, 3>;
using Exp6 = std::array<int, 6>;  // (zeta0, zeta1, zeta2, z0, z1, z2)

struct Term3 {
    Exp3 e;
    cplx c;
};

class HomPoly3 {
public:
    HomPoly3() = default;
    explicit HomPoly3(int degree);

    // Builds a polynomial from records; rejects mixed degrees, negative exponents,
    // duplicate exponents and degree above kMaxDegree.
    static HomPoly3 from_terms(const std::vector<Term3>& terms);

    int degree() const { return degree_; }
    const std::map<Exp3, cplx>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    // Adds c to the coefficient of e; zero results are dropped.
    void add(const Exp3& e, cplx c);

    cplx eval(const C3& z) const;
    C3 grad(const C3& z) const;

private:
    int degree_ = 0;
    std::map<Exp3, cplx> coeffs_;
};

cplx poly_eval(const HomPoly3& p, const C3& z);
C3 poly_grad(const HomPoly3& p, const C3& z);

// Polynomials in (zeta, z) for the Hefer factors.
class Poly6 {
public:
    void add(const Exp6& e, cplx c);
    const std::map<Exp6, cplx>& coeffs() const { return coeffs_; }
    cplx eval(const C3& zeta, const C3& z) const;
    int max_degree() const;

private:
    std::map<Exp6, cplx> coeffs_;
};

struct HeferTriple {
    int degree = 0;  // degree of P
    std::array<int, 3> order{0, 1, 2};
    std::array<Poly6, 3> Q;

    C3 eval(const C3& zeta, const C3& z) const;
};

// Telescoping decomposition P(zeta) - P(z) = sum_i Q^i(zeta, z)(zeta_i - z_i). The
// variables are swapped zeta -> z in the given order.
HeferTriple hefer_decompose(const HomPoly3& P, std::array<int, 3> order = {0, 1, 2});

C3 hefer_eval(const HeferTriple& H, const C3& zeta, const C3& z);

// Max scaled residuals over random complex pairs: the telescoping identity
// relative to |P(zeta)| + |P(z)| + 1, and Q(l zeta, l z) = l^(d-1) Q(zeta, z).
struct HeferCheck {
    double identity = 0.0;
    double homogeneity = 0.0;
};
HeferCheck check_hefer(const HomPoly3& P, const HeferTriple& H, int n_pairs, std::uint64_t seed = 7);

// Dense univariate polynomial, coefficients from low to high degree.
using UPoly = std::vector<cplx>;

cplx upoly_eval(const UPoly& p, cplx t);
UPoly upoly_derivative(const UPoly& p);

// Restriction of P to the parametrized line a + t b.
UPoly restrict_to_line(const HomPoly3& P, const C3& a, const C3& b);

}  // namespace harmrep
