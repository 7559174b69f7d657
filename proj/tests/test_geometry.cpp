#include <doctest.h>

#include <algorithm>

#include "harmrep/errors.hpp"
#include "support.hpp"

using namespace harmrep;

namespace {

CurveDomain domain_of(const std::string& name) {
    const Scenario s = make_scenario(name);
    return make_domain(s.P, s.R);
}

double nearest(const std::vector<cplx>& v, cplx z) {
    double b = 1e300;
    for (cplx c : v) b = std::min(b, std::abs(c - z));
    return b;
}

}  // namespace

TEST_CASE("component counts and their stability under refinement") {
    const std::vector<std::pair<std::string, std::size_t>> expect{
        {"line-rational", 1}, {"conic-log", 2}, {"fermat-mixed", 3}};
    for (const auto& [name, m] : expect) {
        const CurveDomain D = domain_of(name);
        for (int n : {128, 256, 512}) {
            const BoundaryTrace T = trace_boundary(D, n);
            CHECK(T.comps.size() == m);
            int covered = 0;
            for (const auto& c : T.comps) covered += c.n_cover;
            CHECK(covered == D.degree());
            CHECK(T.max_residual <= 1e-11);
            CHECK(T.max_rho <= 1e-11);
        }
    }
}

TEST_CASE("sphere lifts keep rho of the chart point") {
    const CurveDomain D = domain_of("fermat-mixed");
    const BoundaryTrace T = trace_boundary(D, 64);
    for (const auto& c : T.comps)
        for (std::size_t i = 0; i < c.size(); ++i) {
            const C3 p = chart_point(c.x[i], c.y[i]);
            CHECK(std::abs(rho(c.lift[i], D.R) - rho(p, D.R)) <= 1e-12);
            CHECK(std::abs(norm(c.lift[i]) - 1.0) <= 1e-14);
        }
}

TEST_CASE("conic fibers follow y = +-sqrt(1 - x^2)") {
    const CurveDomain D = domain_of("conic-log");
    for (cplx x : {cplx(0.3, 0.2), cplx(-1.4, 0.7), cplx(0.0, 1.9)}) {
        const Fiber f = fiber_over_x(D, x);
        REQUIRE(f.y.size() == 2);
        const cplx r = std::sqrt(1.0 - x * x);
        CHECK(nearest(f.y, r) <= 1e-13);
        CHECK(nearest(f.y, -r) <= 1e-13);
    }
}

TEST_CASE("branch points match the closed forms") {
    const auto conic = branch_points(domain_of("conic-log"));
    REQUIRE(conic.size() == 2);
    CHECK(nearest(conic, 1.0) <= 1e-8);
    CHECK(nearest(conic, -1.0) <= 1e-8);
    // Fermat cubic: double roots at the cube roots of -1
    const auto fermat = branch_points(domain_of("fermat-mixed"));
    REQUIRE(fermat.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(nearest(fermat, std::polar(1.0, kPi / 3.0 + 2.0 * kPi * k / 3.0)) <= 1e-6);
    CHECK(branch_points(domain_of("line-rational")).empty());
}

TEST_CASE("conic monodromy: each component follows one branch of sqrt(1 - x^2)") {
    const CurveDomain D = domain_of("conic-log");
    const BoundaryTrace T = trace_boundary(D, 256);
    for (const auto& c : T.comps) {
        CHECK(c.n_cover == 1);
        // outside the cut y ~ +-i x; the branch keeps a fixed sign of y / (i x)
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double s = (c.y[i] / (kI * c.x[i])).real();
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(lo * hi > 0.0);
    }
}

TEST_CASE("continuation recovers the analytic branch") {
    const CurveDomain D = domain_of("conic-log");
    std::vector<cplx> xs;
    for (int k = 0; k <= 200; ++k) xs.push_back(cplx(-1.5, 0.5) + cplx(3.0, 0.0) * (k / 200.0));
    const cplx y0 = std::sqrt(1.0 - xs[0] * xs[0]);
    const auto ys = continue_along(D, xs, y0);
    // the path stays above the cut (-1, 1) so the principal root is continuous along it
    for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(ys[k] - std::sqrt(1.0 - xs[k] * xs[k])) <= 1e-12);
}

TEST_CASE("reference points sit at radius 2R on distinct components") {
    for (const auto& name : {"conic-log", "fermat-mixed"}) {
        CurveDomain D = domain_of(name);
        const BoundaryTrace T = trace_boundary(D, 256);
        assign_reference_points(D, T);
        REQUIRE(D.reference.size() == T.comps.size());
        for (const auto& r : D.reference) {
            CHECK(std::abs(std::abs(r.x()) - 2.0 * D.R) <= 1e-12);
            CHECK(std::abs(D.P.eval(r.z)) <= 1e-10);
        }
    }
}

TEST_CASE("user reference points are validated") {
    CurveDomain D = domain_of("conic-log");
    const BoundaryTrace T = trace_boundary(D, 256);
    const cplx x = 3.0;
    const cplx y = std::sqrt(1.0 - x * x);
    CHECK_THROWS_AS(assign_reference_points(D, T, {chart_point(x, y)}), ValidationError);
    CHECK_THROWS_AS(assign_reference_points(D, T, {chart_point(x, y), chart_point(x, y)}), ValidationError);
    CHECK_THROWS_AS(assign_reference_points(D, T, {chart_point(1.0, 0.0), chart_point(x, -y)}), ValidationError);
    assign_reference_points(D, T, {chart_point(x, y), chart_point(x, -y)});
    CHECK(D.reference.size() == 2);
}

TEST_CASE("barrier lines through w") {
    const CurveDomain D = domain_of("fermat-mixed");
    const Fiber f = fiber_over_x(D, cplx(0.4, 0.3));
    const ProjectivePoint w = ProjectivePoint::chart(f.x, f.y[0]);
    const IntersectionSet S = choose_barrier(D, w, 1);
    REQUIRE(S.size() == 3);
    CHECK(barrier_failure(S, {}).empty());
    const C3 w0 = sphere_lift(w.z);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(D.P.eval(S.points[j].z)) <= 1e-12);
        CHECK(std::abs(dot(S.R_vec, S.points[j].z)) <= 1e-13);
        CHECK(std::abs(S.x[j] - S.points[j].z[1] / S.points[j].z[0]) <= 1e-15);
    }
    // points[0] is w with the plane normalization w = w0 + 0 v
    CHECK(norm(S.points[0].z - w0) <= 1e-15);
    // same seed, same line
    const IntersectionSet S2 = choose_barrier(D, w, 1);
    CHECK(norm(S2.R_vec - S.R_vec) == 0.0);
    // the R-form reading reproduces the line
    const IntersectionSet S3 = intersect_line(D, w, S.R_vec);
    for (int j = 0; j < 3; ++j) CHECK(nearest(S3.x, S.x[j]) <= 1e-10);
    CHECK_THROWS_AS(intersect_line(D, w, C3{1.0, 0.0, 0.0}), ValidationError);
}

TEST_CASE("points outside V are refused") {
    const CurveDomain D = domain_of("line-rational");
    CHECK_THROWS_AS(choose_barrier(D, ProjectivePoint::chart(2.5, 0.0), 1), ValidationError);
    CHECK_THROWS_AS(make_domain(make_scenario("line-rational").P, -1.0), ValidationError);
}

TEST_CASE("a branch point on the circle is rejected with a suggested radius") {
    const CurveDomain D = make_domain(make_scenario("conic-log").P, 1.0);
    try {
        (void)trace_boundary(D, 256);
        FAIL("trace accepted a branch point on the circle");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("radius") != std::string::npos);
    }
}
