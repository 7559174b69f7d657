#include "harmrep/roots.hpp"

#include <algorithm>
#include <limits>

#include "harmrep/errors.hpp"

namespace harmrep {

UPoly trim_leading(const UPoly& p, double rel_tol) {
    double mx = 0.0;
    for (const auto& c : p) mx = std::max(mx, std::abs(c));
    UPoly q = p;
    while (q.size() > 1 && std::abs(q.back()) <= rel_tol * mx) q.pop_back();
    return q;
}

double min_pairwise_distance(const std::vector<cplx>& pts) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, std::abs(pts[i] - pts[j]));
    return m;
}

std::vector<cplx> poly_roots(const UPoly& p) {
    if (p.empty() || p.back() == cplx(0.0)) throw NumericalError("roots", "leading coefficient is zero");
    const int n = static_cast<int>(p.size()) - 1;
    if (n == 0) return {};
    UPoly m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = p[i] / p.back();
    if (n == 1) return {-m[0]};

    const UPoly dm = upoly_derivative(m);
    double bound = 0.0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, std::pow(std::abs(m[i]), 1.0 / (n - i)));
    const cplx center = -m[n - 1] / static_cast<double>(n);
    const double radius = std::max(bound, 1e-3);

    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) z[k] = center + radius * std::polar(1.0, kTwoPi * k / n + 0.4);

    for (int it = 0; it < 500; ++it) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx pv = upoly_eval(m, z[k]);
            if (pv == cplx(0.0)) continue;
            const cplx ratio = pv / upoly_eval(dm, z[k]);
            cplx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            const cplx w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[k])));
        }
        if (worst < 1e-15) break;
    }
    for (auto& r : z) {
        const cplx d = upoly_eval(dm, r);
        if (d == cplx(0.0)) continue;
        const cplx cand = r - upoly_eval(m, r) / d;
        if (std::abs(upoly_eval(m, cand)) < std::abs(upoly_eval(m, r))) r = cand;
    }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-9 * (1.0 + std::abs(a) + std::abs(b))) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

}  // namespace harmrep
