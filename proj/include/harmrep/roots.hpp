#pragma once

#include <vector>

#include "harmrep/algebra.hpp"

namespace harmrep {

// All roots of p (low-to-high coefficients, p.back() != 0) by Aberth iteration
// followed by one Newton polish per root. Output is sorted by (real, imag).
std::vector<cplx> poly_roots(const UPoly& p);

// Drops trailing coefficients whose modulus is below rel_tol times the largest one.
UPoly trim_leading(const UPoly& p, double rel_tol);

double min_pairwise_distance(const std::vector<cplx>& pts);

}  // namespace harmrep
