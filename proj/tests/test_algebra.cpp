#include <doctest.h>

#include "harmrep/errors.hpp"
#include "harmrep/roots.hpp"
#include "support.hpp"

using namespace harmrep;
using testsupport::naive_eval;
using testsupport::random_c3;

TEST_CASE("from_terms rejects malformed records") {
    CHECK_THROWS_AS(HomPoly3::from_terms({{{1, 0, 0}, 1.0}, {{1, 1, 0}, 1.0}}), ValidationError);
    CHECK_THROWS_AS(HomPoly3::from_terms({{{-1, 2, 0}, 1.0}}), ValidationError);
    try {
        (void)HomPoly3::from_terms({{{2, 0, 0}, 1.0}, {{0, 2, 0}, 1.0}, {{2, 0, 0}, 3.0}});
        FAIL("duplicate accepted");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("duplicate exponent (2,0,0)") != std::string::npos);
        CHECK(msg.find("terms 0 and 2") != std::string::npos);
    }
}

TEST_CASE("evaluation and gradient agree with direct sums") {
    std::mt19937_64 rng(3);
    for (const auto& P : testsupport::builtin_curves()) {
        for (int t = 0; t < 50; ++t) {
            const C3 z = random_c3(rng);
            CHECK(std::abs(P.eval(z) - naive_eval(P, z)) <= 1e-13 * (1.0 + std::abs(naive_eval(P, z))));
            const C3 g = P.grad(z);
            for (int j = 0; j < 3; ++j) {
                // central difference along coordinate j
                const double h = 1e-5;
                C3 a = z, b = z;
                a[j] += h;
                b[j] -= h;
                const cplx fd = (naive_eval(P, a) - naive_eval(P, b)) / (2.0 * h);
                CHECK(std::abs(fd - g[j]) <= 1e-7 * (1.0 + std::abs(g[j])));
            }
        }
    }
}

TEST_CASE("Hefer identity and joint homogeneity on the built-in curves") {
    std::mt19937_64 rng(11);
    for (const auto& P : testsupport::builtin_curves()) {
        const HeferTriple H = hefer_decompose(P);
        const int d = P.degree();
        double worst = 0.0, worst_h = 0.0;
        for (int t = 0; t < 10000; ++t) {
            const C3 zeta = random_c3(rng), z = random_c3(rng);
            const C3 q = H.eval(zeta, z);
            const cplx lhs = naive_eval(P, zeta) - naive_eval(P, z);
            const cplx rhs = q[0] * (zeta[0] - z[0]) + q[1] * (zeta[1] - z[1]) + q[2] * (zeta[2] - z[2]);
            worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(naive_eval(P, zeta)) + std::abs(naive_eval(P, z)) + 1.0));
            const cplx lam = std::polar(t % 2 ? 1.0 : 1.7, 0.37 * t);
            const C3 ql = H.eval(lam * zeta, lam * z);
            for (int i = 0; i < 3; ++i)
                worst_h = std::max(worst_h, std::abs(ql[i] - std::pow(lam, d - 1) * q[i]) /
                                                (std::abs(std::pow(lam, d - 1) * q[i]) + 1.0));
        }
        CHECK(worst <= 1e-12);
        CHECK(worst_h <= 1e-12);
        const HeferCheck chk = check_hefer(P, H, 2000);
        CHECK(chk.identity <= 1e-12);
        CHECK(chk.homogeneity <= 1e-12);
    }
}

TEST_CASE("Hefer factors of a single power") {
    // (zeta1^2 - z1^2) = (zeta1 + z1)(zeta1 - z1), nothing else
    const HomPoly3 P = HomPoly3::from_terms({{{0, 2, 0}, 1.0}});
    const HeferTriple H = hefer_decompose(P);
    const C3 zeta{0.3, cplx(1.0, 2.0), -0.5}, z{1.1, cplx(-0.4, 0.2), 2.0};
    const C3 q = H.eval(zeta, z);
    CHECK(std::abs(q[0]) == 0.0);
    CHECK(std::abs(q[2]) == 0.0);
    CHECK(std::abs(q[1] - (zeta[1] + z[1])) <= 1e-15);
}

TEST_CASE("every telescoping order satisfies the identity") {
    const HomPoly3 P = make_scenario("fermat-mixed").P;
    std::array<int, 3> ord{0, 1, 2};
    do {
        const HeferTriple H = hefer_decompose(P, ord);
        CHECK(check_hefer(P, H, 500).identity <= 1e-12);
    } while (std::next_permutation(ord.begin(), ord.end()));
    CHECK_THROWS_AS(hefer_decompose(P, {0, 0, 2}), ValidationError);
}

TEST_CASE("restriction to a line matches pointwise evaluation") {
    std::mt19937_64 rng(9);
    for (const auto& P : testsupport::builtin_curves()) {
        const C3 a = random_c3(rng), b = random_c3(rng);
        const UPoly q = restrict_to_line(P, a, b);
        for (double t : {-1.3, 0.0, 0.4, 2.2}) {
            const cplx direct = naive_eval(P, a + cplx(t, 0.3 * t) * b);
            CHECK(std::abs(upoly_eval(q, cplx(t, 0.3 * t)) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
        }
    }
}

TEST_CASE("polynomial roots") {
    // (t - 1)(t - 2)(t - 3i)
    const std::vector<cplx> r{1.0, 2.0, cplx(0, 3)};
    UPoly p{1.0};
    for (cplx c : r) {
        UPoly n(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            n[i + 1] += p[i];
            n[i] -= c * p[i];
        }
        p = n;
    }
    const auto found = poly_roots(p);
    REQUIRE(found.size() == 3);
    for (cplx c : r) {
        double best = 1e9;
        for (cplx f : found) best = std::min(best, std::abs(f - c));
        CHECK(best <= 1e-13);
    }
    CHECK(upoly_derivative({1.0, 2.0, 3.0}) == UPoly{2.0, 6.0});
}
