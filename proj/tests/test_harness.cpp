#include <doctest.h>

#include "harmrep/errors.hpp"
#include "support.hpp"

using namespace harmrep;

TEST_CASE("scenario registry") {
    const auto names = scenario_names();
    CHECK(names == std::vector<std::string>{"line-rational", "conic-log", "fermat-mixed"});
    CHECK(make_scenario("line-rational").oracle.kind() == GeneratorKind::re_rational);
    CHECK(make_scenario("conic-log").oracle.kind() == GeneratorKind::log_singular);
    CHECK(make_scenario("fermat-mixed").oracle.kind() == GeneratorKind::mixture);
    CHECK(make_scenario("conic-log").paper_h_expected_to_fail);
    CHECK_THROWS_AS(make_scenario("quartic"), ValidationError);
    for (const auto& n : names) CHECK_NOTHROW(validate_scenario(make_scenario(n)));
}

TEST_CASE("oracles are harmonic and du^(1,0) matches finite differences") {
    for (const auto& n : scenario_names()) {
        const Scenario s = make_scenario(n);
        const CurveDomain D = make_domain(s.P, s.R);
        for (const auto& p : s.probes) {
            const ProjectivePoint w = resolve_probe(D, p);
            const cplx x = w.x(), y = w.y();
            CHECK(std::abs(laplacian_check(s.oracle, x, y)) <= 1e-6 * std::max(1.0, std::abs(s.oracle.u(x, y))));
            // du = dudx dx + conj(dudx dx): the x-derivative along the branch
            const double h = 1e-5;
            const cplx yp = newton_y(s.P, x + h, y + h * dy_dx(s.P, x, y));
            const cplx ym = newton_y(s.P, x - h, y - h * dy_dx(s.P, x, y));
            const cplx yi = newton_y(s.P, x + kI * h, y + kI * h * dy_dx(s.P, x, y));
            const cplx yj = newton_y(s.P, x - kI * h, y - kI * h * dy_dx(s.P, x, y));
            const double ux = (s.oracle.u(x + h, yp) - s.oracle.u(x - h, ym)) / (2.0 * h);
            const double uy = (s.oracle.u(x + kI * h, yi) - s.oracle.u(x - kI * h, yj)) / (2.0 * h);
            const cplx fd = 0.5 * cplx(ux, -uy);
            CHECK(std::abs(s.oracle.dudx(x, y) - fd) <= 1e-7 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("sampled boundary data") {
    const Scenario s = make_scenario("fermat-mixed");
    CurveDomain D = make_domain(s.P, s.R);
    const BoundaryTrace T = trace_boundary(D, 128);
    const BoundaryField F = sample_field(s.oracle, D, T);
    REQUIRE(F.comps.size() == T.comps.size());
    CHECK_NOTHROW(validate_field(F, T));
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const auto& c = T.comps[r];
        REQUIRE(F.comps[r].u.size() == c.size());
        for (std::size_t i = 0; i < c.size(); i += 11) {
            CHECK(F.comps[r].u[i] == doctest::Approx(s.oracle.u(c.x[i], c.y[i])).epsilon(1e-14));
            // p is du^(1,0) evaluated on the tangent x'(theta) = i x
            CHECK(std::abs(F.comps[r].p[i] - s.oracle.dudx(c.x[i], c.y[i]) * kI * c.x[i]) <= 1e-13);
        }
    }
    // two connector paths per non-base component
    CHECK(F.connectors.size() == 2 * (T.comps.size() - 1));
    for (const auto& cn : F.connectors) {
        CHECK(cn.x.size() == cn.dudx.size());
        // u is single-valued, so twice the real part of the integral of du^(1,0) is the change in u
        cplx sum = 0.0;
        for (std::size_t i = 0; i < cn.x.size(); ++i) sum += cn.dudx[i] * cn.dx[i];
        const auto& a = T.comps[0];
        const auto& b = T.comps[cn.target];
        const double du = s.oracle.u(b.x[0], b.y[0]) - s.oracle.u(a.x[0], a.y[0]);
        CHECK(std::abs(2.0 * sum.real() - du) <= 1e-8);
    }
}

TEST_CASE("scenario validation rejects singularities near the domain") {
    Scenario s = make_scenario("fermat-mixed");
    s.oracle.rational[0].pole = 2.0;
    CHECK_THROWS_AS(validate_scenario(s), ValidationError);

    Scenario c = make_scenario("conic-log");
    c.oracle.logs[0].l = C3{0.0, -1.0, 1.0};  // y = x meets the curve inside the disc
    CHECK_THROWS_AS(validate_scenario(c), ValidationError);

    Scenario p = make_scenario("line-rational");
    p.probes.push_back({cplx(1.8, 0.0), 0});
    CHECK_THROWS_AS(validate_scenario(p), ValidationError);

    const CurveDomain D = make_domain(make_scenario("conic-log").P, 2.0);
    CHECK_THROWS_AS(resolve_probe(D, {cplx(0.3, 0.2), 2}), ValidationError);
    CHECK_THROWS_AS(resolve_probe(D, {cplx(1.0, 0.0), 0}), ValidationError);
}

TEST_CASE("a 1x1x1 grid is grossly wrong") {
    const Scenario s = make_scenario("line-rational");
    PipelineOptions opt = scenario_options(s);
    opt.grid = GridDims{1, 1, 1};
    opt.kernel.guard = 0.0;
    const ScenarioReport r = run_scenario(s, opt);
    CHECK(r.max_abs_err > 1e-3);
    CHECK_FALSE(r.passed);
}
