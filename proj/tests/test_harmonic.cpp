#include <doctest.h>

#include "harmrep/errors.hpp"
#include "support.hpp"

using namespace harmrep;

namespace {

struct Setup {
    Scenario s;
    CurveDomain D;
    BoundaryTrace T;
    BoundaryField F;
    Periods P;
};

Setup setup(const std::string& name, int n_theta = 256) {
    Setup r;
    r.s = make_scenario(name);
    r.D = make_domain(r.s.P, r.s.R);
    r.T = trace_boundary(r.D, n_theta);
    assign_reference_points(r.D, r.T);
    r.F = sample_field(r.s.oracle, r.D, r.T);
    r.P = period_a(r.F, r.T);
    return r;
}

// Winding number of l(x, y(x)) along a traced component, by accumulated argument.
double winding(const TraceComponent& c, const C3& l) {
    double total = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const cplx a = l[0] + l[1] * c.x[i] + l[2] * c.y[i];
        const cplx b = l[0] + l[1] * c.x[j] + l[2] * c.y[j];
        total += std::arg(b / a);
    }
    return total / kTwoPi;
}

}  // namespace

TEST_CASE("periods equal the winding of the log generators") {
    for (const auto& name : scenario_names()) {
        const Setup r = setup(name);
        for (std::size_t k = 0; k < r.T.comps.size(); ++k) {
            double expect = 0.0;
            for (const auto& g : r.s.oracle.logs) expect += g.c * (winding(r.T.comps[k], g.l) - winding(r.T.comps[k], C3{1.0, 0.0, 0.0}));
            CHECK(std::abs(r.P.a[k] - expect) <= 1e-10);
            CHECK(std::abs(r.P.imag[k]) <= 1e-10);
        }
        CHECK(r.P.stokes <= 1e-10);
        CHECK_FALSE(r.P.flagged);
    }
    const Setup line = setup("line-rational");
    CHECK(std::abs(line.P.a[0]) <= 1e-12);
    const Setup conic = setup("conic-log");
    CHECK(std::abs(std::abs(conic.P.a[0]) - 1.0) <= 1e-10);
    CHECK(std::abs(conic.P.a[0] + conic.P.a[1]) <= 1e-10);
}

TEST_CASE("point-log h leaves the conic periods unmatched") {
    const Setup r = setup("conic-log");
    const CorrectionH paper = build_h(r.D, r.T, r.F, r.P, HMode::paper);
    CHECK(paper.mode == HMode::paper);
    CHECK(paper.period_residual > 0.5);
    // the point-log terms have vanishing sigma-periods, so the residual is |a_r|
    for (std::size_t k = 0; k < r.P.a.size(); ++k) CHECK(std::abs(paper.residuals[k] - std::abs(r.P.a[k])) <= 1e-10);

    const CorrectionH autoh = build_h(r.D, r.T, r.F, r.P, HMode::automatic);
    CHECK(autoh.fallback);
    CHECK(autoh.mode == HMode::robust);
    CHECK(autoh.period_residual <= 1e-8);
    CHECK(autoh.paper_residual > 0.5);
    CHECK_FALSE(autoh.note.empty());

    try {
        (void)primitive_f(r.F, paper, r.T, r.D);
        FAIL("mode paper accepted");
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("Re f") != std::string::npos);
        CHECK(msg.find("period residual") != std::string::npos);
    }
}

TEST_CASE("robust h closes f on the cubic and the connectors agree") {
    const Setup r = setup("fermat-mixed");
    const CorrectionH h = build_h(r.D, r.T, r.F, r.P, HMode::robust);
    CHECK(h.period_residual <= 1e-8);
    const PrimitiveF f = primitive_f(r.F, h, r.T, r.D);
    CHECK(f.max_re_drift <= 1e-6);
    CHECK(f.max_closure <= 1e-8);
    CHECK(f.path_spread <= 1e-8);
    // every component is reached by two independent paths
    for (std::size_t k = 1; k < r.T.comps.size(); ++k) CHECK(f.path_offsets[k].size() == 2);
    // h is harmonic away from its lines: log-terms are checked against the direct sum
    const C3 z = chart_point(cplx(0.2, 0.1), fiber_over_x(r.D, cplx(0.2, 0.1)).y[0]);
    double direct = 0.0;
    for (const auto& t : h.terms) direct += t.c * std::log(std::norm(dot(t.l, z)) / std::norm(z[0]));
    CHECK(std::abs(eval_h(h, z) - direct) <= 1e-13);
}

TEST_CASE("Re f reproduces u - h on the line") {
    const Setup r = setup("line-rational");
    const CorrectionH h = build_h(r.D, r.T, r.F, r.P, HMode::automatic);
    CHECK(h.terms.empty());
    const PrimitiveF f = primitive_f(r.F, h, r.T, r.D);
    // f = x^2 + c with Re c = 0
    const auto& c = r.T.comps[0];
    const cplx c0 = f.f[0][0] - c.x[0] * c.x[0];
    CHECK(std::abs(c0.real()) <= 1e-10);
    for (std::size_t i = 0; i < c.size(); i += 17) {
        CHECK(std::abs(f.f[0][i] - c.x[i] * c.x[i] - c0) <= 1e-10);
        CHECK(std::abs(f.eval(0, c.theta[i]) - f.f[0][i]) <= 1e-10);
    }
}

TEST_CASE("g lifts are homogeneous of degree -1") {
    const Setup r = setup("conic-log");
    const CorrectionH h = build_h(r.D, r.T, r.F, r.P, HMode::automatic);
    const PrimitiveF f = primitive_f(r.F, h, r.T, r.D);
    const auto& c = r.T.comps[1];
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    for (int i = 0; i < 10; ++i) {
        const std::size_t idx = (i * 37) % c.size();
        const C3 zeta = c.lift[idx];
        const LiftResult base = lift_g(f, r.T, r.D, 1, c.theta[idx], zeta);
        CHECK(base.distance <= 1e-12);
        for (int k = 0; k < 100; ++k) {
            const cplx lam = std::polar(1.0, ph(rng));
            const LiftResult l = lift_g(f, r.T, r.D, 1, c.theta[idx], lam * zeta);
            CHECK(std::abs(l.g * lam - base.g) <= 1e-13 * std::abs(base.g));
        }
    }
}

TEST_CASE("non-periodic boundary data is rejected") {
    Setup r = setup("line-rational", 64);
    for (std::size_t i = 0; i < r.F.comps[0].p.size() / 2; ++i) r.F.comps[0].p[i] += 1.0;
    CHECK_THROWS_AS(period_a(r.F, r.T), ValidationError);
    Setup q = setup("conic-log", 256);
    q.F.comps.pop_back();
    CHECK_THROWS_AS(validate_field(q.F, q.T), ValidationError);
}

TEST_CASE("Gauss-Legendre rule is exact to degree 2n - 1") {
    std::vector<double> x, w;
    gauss_legendre(16, x, w);
    for (int p = 0; p <= 31; ++p) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i) s += w[i] * std::pow(x[i], p);
        const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        CHECK(std::abs(s - exact) <= 1e-14);
    }
}

TEST_CASE("h mode names") {
    CHECK(parse_hmode("auto") == HMode::automatic);
    CHECK(to_string(HMode::robust) == "robust");
    CHECK_THROWS_AS(parse_hmode("Paper"), ValidationError);
}
