#include "harmrep/algebra.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "harmrep/errors.hpp"

namespace harmrep {

namespace {

// powers[v][e] = z_v^e for e = 0..n
template <std::size_t N>
std::array<std::vector<cplx>, N> power_table(const std::array<cplx, N>& z, int n) {
    std::array<std::vector<cplx>, N> pw;
    for (std::size_t v = 0; v < N; ++v) {
        pw[v].resize(static_cast<std::size_t>(n) + 1);
        pw[v][0] = 1.0;
        for (int e = 1; e <= n; ++e) pw[v][e] = pw[v][e - 1] * z[v];
    }
    return pw;
}

std::string exp_str(const Exp3& e) {
    std::ostringstream os;
    os << "(" << e[0] << "," << e[1] << "," << e[2] << ")";
    return os.str();
}

UPoly upoly_mul(const UPoly& a, const UPoly& b) {
    UPoly r(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace

HomPoly3::HomPoly3(int degree) : degree_(degree) {
    if (degree < 0 || degree > kMaxDegree)
        throw ValidationError("algebra", "degree " + std::to_string(degree) + " outside [0, 8]");
}

HomPoly3 HomPoly3::from_terms(const std::vector<Term3>& terms) {
    if (terms.empty()) throw ValidationError("algebra", "polynomial has no terms");
    const Exp3& e0 = terms.front().e;
    HomPoly3 p(e0[0] + e0[1] + e0[2]);
    std::map<Exp3, std::size_t> seen;
    for (std::size_t n = 0; n < terms.size(); ++n) {
        const Exp3& e = terms[n].e;
        if (e[0] < 0 || e[1] < 0 || e[2] < 0)
            throw ValidationError("algebra", "negative exponent in term " + std::to_string(n));
        if (e[0] + e[1] + e[2] != p.degree_)
            throw ValidationError("algebra", "term " + std::to_string(n) + " " + exp_str(e) +
                                                 " is not of degree " + std::to_string(p.degree_));
        auto [it, fresh] = seen.emplace(e, n);
        if (!fresh)
            throw ValidationError("algebra", "duplicate exponent " + exp_str(e) + " at terms " +
                                                 std::to_string(it->second) + " and " + std::to_string(n));
        p.add(e, terms[n].c);
    }
    return p;
}

void HomPoly3::add(const Exp3& e, cplx c) {
    if (e[0] + e[1] + e[2] != degree_) throw ValidationError("algebra", "exponent " + exp_str(e) + " has wrong degree");
    cplx& slot = coeffs_[e];
    slot += c;
    if (slot == cplx(0.0)) coeffs_.erase(e);
}

cplx HomPoly3::eval(const C3& z) const {
    const auto pw = power_table(z, degree_);
    cplx s = 0.0;
    for (const auto& [e, c] : coeffs_) s += c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
    return s;
}

C3 HomPoly3::grad(const C3& z) const {
    const auto pw = power_table(z, degree_);
    C3 g{};
    for (const auto& [e, c] : coeffs_) {
        for (int v = 0; v < 3; ++v) {
            if (e[v] == 0) continue;
            cplx t = c * static_cast<double>(e[v]);
            for (int u = 0; u < 3; ++u) t *= pw[u][u == v ? e[u] - 1 : e[u]];
            g[v] += t;
        }
    }
    return g;
}

cplx poly_eval(const HomPoly3& p, const C3& z) { return p.eval(z); }
C3 poly_grad(const HomPoly3& p, const C3& z) { return p.grad(z); }

void Poly6::add(const Exp6& e, cplx c) {
    cplx& slot = coeffs_[e];
    slot += c;
    if (slot == cplx(0.0)) coeffs_.erase(e);
}

int Poly6::max_degree() const {
    int m = 0;
    for (const auto& [e, c] : coeffs_) {
        int s = 0;
        for (int v : e) s += v;
        m = std::max(m, s);
    }
    return m;
}

cplx Poly6::eval(const C3& zeta, const C3& z) const {
    const int n = std::max(max_degree(), 0);
    const std::array<cplx, 6> vars{zeta[0], zeta[1], zeta[2], z[0], z[1], z[2]};
    const auto pw = power_table(vars, n);
    cplx s = 0.0;
    for (const auto& [e, c] : coeffs_) {
        cplx t = c;
        for (int v = 0; v < 6; ++v) t *= pw[v][e[v]];
        s += t;
    }
    return s;
}

C3 HeferTriple::eval(const C3& zeta, const C3& z) const {
    return {Q[0].eval(zeta, z), Q[1].eval(zeta, z), Q[2].eval(zeta, z)};
}

HeferTriple hefer_decompose(const HomPoly3& P, std::array<int, 3> order) {
    if (P.is_zero()) throw ValidationError("algebra", "zero polynomial has no Hefer decomposition");
    {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != std::array<int, 3>{0, 1, 2}) throw ValidationError("algebra", "telescoping order is not a permutation");
    }
    HeferTriple H;
    H.degree = P.degree();
    H.order = order;
    for (const auto& [e, c] : P.coeffs()) {
        // Stage m: variables order[0..m-1] already swapped to z.
        for (int m = 0; m < 3; ++m) {
            const int a = order[m];
            if (e[a] == 0) continue;
            Exp6 base{};
            for (int q = 0; q < m; ++q) base[3 + order[q]] = e[order[q]];
            for (int q = m + 1; q < 3; ++q) base[order[q]] = e[order[q]];
            // (zeta_a^n - z_a^n)/(zeta_a - z_a) = sum_t zeta_a^t z_a^(n-1-t)
            for (int t = 0; t < e[a]; ++t) {
                Exp6 ex = base;
                ex[a] = t;
                ex[3 + a] = e[a] - 1 - t;
                H.Q[a].add(ex, c);
            }
        }
    }
    return H;
}

C3 hefer_eval(const HeferTriple& H, const C3& zeta, const C3& z) { return H.eval(zeta, z); }

HeferCheck check_hefer(const HomPoly3& P, const HeferTriple& H, int n_pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    std::uniform_real_distribution<double> mod(0.5, 2.0);
    auto draw = [&] {
        C3 v;
        for (auto& c : v) {
            const double re = g(rng);
            c = cplx(re, g(rng));
        }
        return v;
    };
    const int d = P.degree();
    HeferCheck out;
    for (int i = 0; i < n_pairs; ++i) {
        const C3 zeta = draw(), z = draw();
        const C3 q = H.eval(zeta, z);
        const cplx lhs = P.eval(zeta) - P.eval(z);
        const double scale = std::abs(P.eval(zeta)) + std::abs(P.eval(z)) + 1.0;
        out.identity = std::max(out.identity, std::abs(lhs - dot(q, zeta - z)) / scale);
        // unit-modulus and general scalings
        const double r = (i % 2 == 0) ? 1.0 : mod(rng);
        const cplx lam = std::polar(r, ph(rng));
        const C3 ql = H.eval(lam * zeta, lam * z);
        const cplx f = std::pow(lam, d - 1);
        for (int k = 0; k < 3; ++k)
            out.homogeneity = std::max(out.homogeneity, std::abs(ql[k] - f * q[k]) / (std::abs(f * q[k]) + 1.0));
    }
    return out;
}

cplx upoly_eval(const UPoly& p, cplx t) {
    cplx s = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * t + *it;
    return s;
}

UPoly upoly_derivative(const UPoly& p) {
    if (p.size() <= 1) return {cplx(0.0)};
    UPoly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
    return d;
}

UPoly restrict_to_line(const HomPoly3& P, const C3& a, const C3& b) {
    UPoly out(static_cast<std::size_t>(P.degree()) + 1, cplx(0.0));
    for (const auto& [e, c] : P.coeffs()) {
        UPoly term{c};
        for (int v = 0; v < 3; ++v)
            for (int k = 0; k < e[v]; ++k) term = upoly_mul(term, UPoly{a[v], b[v]});
        for (std::size_t i = 0; i < term.size(); ++i) out[i] += term[i];
    }
    return out;
}

}  // namespace harmrep
