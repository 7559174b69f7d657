#include "harmrep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "harmrep/errors.hpp"

namespace harmrep {

GeneratorKind Oracle::kind() const {
    if (logs.empty()) return GeneratorKind::re_rational;
    if (rational.empty()) return GeneratorKind::log_singular;
    return GeneratorKind::mixture;
}

cplx Oracle::holo(cplx x, cplx y) const {
    cplx s = 0.0;
    for (const auto& t : rational) {
        cplx v = t.c * std::pow(x, t.a) * std::pow(y, t.b);
        if (t.m > 0) v /= std::pow(x - t.pole, t.m);
        s += v;
    }
    return s;
}

double Oracle::u(cplx x, cplx y) const {
    double s = holo(x, y).real();
    for (const auto& g : logs) s += g.c * std::log(std::norm(g.l[0] + g.l[1] * x + g.l[2] * y));
    return s;
}

cplx Oracle::dudx(cplx x, cplx y) const {
    const cplx yp = dy_dx(P, x, y);
    cplx F = 0.0;
    for (const auto& t : rational) {
        // d/dx and d/dy of c x^a y^b (x - p)^-m
        const cplx q = t.m > 0 ? std::pow(x - t.pole, -t.m) : cplx(1.0);
        const cplx xa = std::pow(x, t.a), yb = std::pow(y, t.b);
        cplx fx = 0.0;
        if (t.a > 0) fx += static_cast<double>(t.a) * std::pow(x, t.a - 1) * yb * q;
        if (t.m > 0) fx -= static_cast<double>(t.m) * xa * yb * q / (x - t.pole);
        const cplx fy = t.b > 0 ? static_cast<double>(t.b) * xa * std::pow(y, t.b - 1) * q : cplx(0.0);
        F += t.c * (fx + fy * yp);
    }
    cplx s = 0.5 * F;
    for (const auto& g : logs) {
        const cplx l = g.l[0] + g.l[1] * x + g.l[2] * y;
        s += g.c * (g.l[1] + g.l[2] * yp) / l;
    }
    return s;
}

std::vector<std::string> scenario_names() { return {"line-rational", "conic-log", "fermat-mixed"}; }

Scenario make_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    s.R = 2.0;
    if (name == "line-rational") {
        s.description = "line z2 = 0, u = Re(x^2)";
        s.P = HomPoly3::from_terms({{{0, 0, 1}, 1.0}});
        s.oracle.rational.push_back({1.0, 2, 0, 0.0, 0});
        s.probes = {{{0.3, 0.1}, 0}, {{-0.5, 0.4}, 0}, {{0.2, -0.7}, 0}};
        s.abs_tol = 1e-6;
    } else if (name == "conic-log") {
        s.description = "conic x^2 + y^2 = 1, u = log|y - (i + 0.02) x|^2";
        s.P = HomPoly3::from_terms({{{0, 2, 0}, 1.0}, {{0, 0, 2}, 1.0}, {{2, 0, 0}, -1.0}});
        s.oracle.logs.push_back({1.0, C3{0.0, -cplx(0.02, 1.0), 1.0}});
        s.probes = {{{0.3, 0.2}, 0}, {{-0.4, 0.5}, 1}, {{0.6, -0.3}, 1}};
        s.paper_h_expected_to_fail = true;
        s.rel_tol = 1e-3;
    } else if (name == "fermat-mixed") {
        s.description = "Fermat cubic, u = Re(1/(x - 4)) + 0.5 log|y - (e^{i pi/3} + 0.004) x|^2";
        s.P = HomPoly3::from_terms({{{3, 0, 0}, 1.0}, {{0, 3, 0}, 1.0}, {{0, 0, 3}, 1.0}});
        s.oracle.rational.push_back({1.0, 0, 0, 4.0, 1});
        const cplx eta = std::polar(1.0, kPi / 3.0) + 0.004;
        s.oracle.logs.push_back({0.5, C3{0.0, -eta, 1.0}});
        s.probes = {{{0.4, 0.3}, 0}, {{-0.3, 0.6}, 1}, {{0.1, -0.5}, 2}};
        s.rel_tol = 1e-3;
    } else {
        std::string known;
        for (const auto& n : scenario_names()) known += " " + n;
        throw ValidationError("harness", "unknown scenario '" + name + "'; known:" + known);
    }
    s.oracle.P = s.P;
    return s;
}

ProjectivePoint resolve_probe(const CurveDomain& D, const Probe& p) {
    const Fiber f = fiber_over_x(D, p.x);
    if (f.degenerate || f.branch) throw ValidationError("harness", "probe lies over a branch point");
    if (p.sheet < 0 || p.sheet >= static_cast<int>(f.y.size()))
        throw ValidationError("harness", "probe sheet " + std::to_string(p.sheet) + " out of range");
    return ProjectivePoint::chart(p.x, f.y[p.sheet]);
}

void validate_scenario(const Scenario& s) {
    const CurveDomain D = make_domain(s.P, s.R);
    for (const auto& t : s.oracle.rational)
        if (t.m > 0 && std::abs(t.pole) <= s.R * 1.05)
            throw ValidationError("harness", "rational pole of the oracle meets the closed domain");
    for (const auto& g : s.oracle.logs)
        if (!line_zeros_outside(D, g.l, 0.05))
            throw ValidationError("harness", "log generator vanishes inside the closed domain");
    for (const auto& p : s.probes) {
        const ProjectivePoint w = resolve_probe(D, p);
        if (-rho(w.z, s.R) < 0.2 * s.R) {
            std::ostringstream os;
            os << "probe x = " << p.x << " has insideMargin " << -rho(w.z, s.R) << " < " << 0.2 * s.R;
            throw ValidationError("harness", os.str());
        }
    }
}

double laplacian_check(const Oracle& o, cplx x, cplx y, double h) {
    auto at = [&](cplx dx) { return o.u(x + dx, newton_y(o.P, x + dx, y)); };
    // fourth-order five-point second differences along the real and imaginary axes
    double s = -60.0 * o.u(x, y);
    for (cplx dir : {cplx(1.0), kI}) s += 16.0 * (at(h * dir) + at(-h * dir)) - (at(2.0 * h * dir) + at(-2.0 * h * dir));
    return s / (12.0 * h * h);
}

BoundaryField sample_field(const Oracle& o, const CurveDomain& D, const BoundaryTrace& T) {
    BoundaryField F;
    for (const auto& c : T.comps) {
        ComponentSamples s;
        for (std::size_t i = 0; i < c.size(); ++i) {
            s.u.push_back(o.u(c.x[i], c.y[i]));
            s.p.push_back(o.dudx(c.x[i], c.y[i]) * kI * c.x[i]);
        }
        F.comps.push_back(std::move(s));
    }
    for (const auto& cp : default_connector_paths(D, T)) {
        Connector cn;
        cn.target = cp.target;
        cn.path = cp.path;
        cn.x = cp.x;
        cn.y = cp.y;
        cn.dx = cp.dx;
        for (std::size_t i = 0; i < cp.x.size(); ++i) cn.dudx.push_back(o.dudx(cp.x[i], cp.y[i]));
        F.connectors.push_back(std::move(cn));
    }
    return F;
}

Prepared prepare(const HomPoly3& P, double R, const FieldProvider& provider, const PipelineOptions& opt) {
    Prepared p;
    p.D = make_domain(P, R);
    p.D.rho_extension = opt.rho_extension;
    p.T = trace_boundary(p.D, opt.n_theta_trace);
    assign_reference_points(p.D, p.T, opt.reference_points);
    p.H = hefer_decompose(P, opt.order);
    p.field = provider(p.D, p.T);
    p.periods = period_a(p.field, p.T);
    p.h = build_h(p.D, p.T, p.field, p.periods, opt.hmode);
    p.F = primitive_f(p.field, p.h, p.T, p.D);
    for (double e : opt.eps) {
        p.tubes.push_back(build_tube(p.D, p.T, e, opt.grid, opt.kernel.workers));
        p.fields.push_back(lift_on_tube(p.F, p.T, p.D, p.tubes.back(), opt.kernel.workers));
    }
    return p;
}

ProbeResult reconstruct_at(const Prepared& prep, const ProjectivePoint& w, const PipelineOptions& opt) {
    BarrierThresholds th;
    th.inside_margin = opt.barrier_inside_margin;
    th.max_retries = opt.max_retries;
    ProbeResult r;
    r.S = choose_barrier(prep.D, w, opt.seed, th);
    r.M = compute_G(prep.fields, prep.tubes, r.S, prep.H, prep.D.P, opt.kernel);
    r.V = vandermonde_solve(r.S.x, r.M.extrapolated);
    r.points = reconstruct_u(prep.D, r.S, r.V, prep.h, opt.kernel.barrier, opt.prefactor);
    return r;
}

void attach_oracle(const Oracle& o, ProbeResult& pr) {
    for (auto& p : pr.points) {
        const double u = o.u(p.x, p.w[2] / p.w[0]);
        p.u_oracle = u;
        p.abs_err = std::abs(p.u_rec - u);
        p.rel_err = p.abs_err / std::max(std::abs(u), std::numeric_limits<double>::min());
    }
}

PipelineOptions scenario_options(const Scenario& s, PipelineOptions base) {
    base.barrier_inside_margin = s.barrier_inside_margin;
    return base;
}

ScenarioReport run_scenario(const Scenario& s, const PipelineOptions& opt, Prepared* keep) {
    validate_scenario(s);
    Prepared prep = prepare(
        s.P, s.R, [&](const CurveDomain& D, const BoundaryTrace& T) { return sample_field(s.oracle, D, T); }, opt);
    ScenarioReport rep;
    rep.name = s.name;
    for (const auto& probe : s.probes) {
        ProbeResult pr = reconstruct_at(prep, resolve_probe(prep.D, probe), opt);
        attach_oracle(s.oracle, pr);
        for (const auto& p : pr.points) {
            rep.max_abs_err = std::max(rep.max_abs_err, p.abs_err);
            rep.max_rel_err = std::max(rep.max_rel_err, p.rel_err);
        }
        rep.probes.push_back(std::move(pr));
    }
    rep.passed = (s.abs_tol < 0 || rep.max_abs_err <= s.abs_tol) && (s.rel_tol < 0 || rep.max_rel_err <= s.rel_tol);
    if (keep) *keep = std::move(prep);
    return rep;
}

namespace {

double rel_change(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += std::norm(a[k] - b[k]);
        den += std::norm(b[k]);
    }
    return std::sqrt(num / std::max(den, std::numeric_limits<double>::min()));
}

// Reconstruction from a single G vector with oracle errors.
std::vector<PointResult> from_moments(const Prepared& prep, const IntersectionSet& S, const std::vector<cplx>& G,
                                      const PipelineOptions& opt, const Oracle& o) {
    ProbeResult pr;
    pr.S = S;
    pr.V = vandermonde_solve(S.x, G);
    pr.points = reconstruct_u(prep.D, S, pr.V, prep.h, opt.kernel.barrier, opt.prefactor);
    attach_oracle(o, pr);
    return pr.points;
}

void push_rows(SweepResult& out, const std::string& kind, double eps, const GridDims& g, const std::string& psi,
               const std::vector<PointResult>& pts) {
    for (const auto& p : pts) out.rows.push_back({kind, eps, g, psi, p.k, p.u_rec, p.u_oracle.value_or(0.0), p.abs_err});
}

double max_err(const std::vector<PointResult>& pts) {
    double e = 0.0;
    for (const auto& p : pts) e = std::max(e, p.abs_err);
    return e;
}

}  // namespace

SweepResult convergence_study(const Scenario& s, const PipelineOptions& opt) {
    validate_scenario(s);
    const FieldProvider provider = [&](const CurveDomain& D, const BoundaryTrace& T) {
        return sample_field(s.oracle, D, T);
    };
    const Prepared prep = prepare(s.P, s.R, provider, opt);
    const ProjectivePoint w = resolve_probe(prep.D, s.probes.front());
    BarrierThresholds th;
    th.inside_margin = opt.barrier_inside_margin;
    th.max_retries = opt.max_retries;
    const IntersectionSet S = choose_barrier(prep.D, w, opt.seed, th);
    const GMoments M = compute_G(prep.fields, prep.tubes, S, prep.H, prep.D.P, opt.kernel);
    const auto kps = kernel_points(S, opt.kernel.barrier);
    const int d = S.size();
    SweepResult out;

    // pre-extrapolation error along the schedule
    std::vector<double> le, lerr;
    for (std::size_t i = 0; i < M.eps.size(); ++i) {
        const auto pts = from_moments(prep, S, M.G[i], opt, s.oracle);
        push_rows(out, "eps", M.eps[i], opt.grid, to_string(opt.kernel.psi), pts);
        le.push_back(std::log(M.eps[i]));
        lerr.push_back(std::log(std::max(max_err(pts), 1e-300)));
    }
    push_rows(out, "extrapolated", 0.0, opt.grid, to_string(opt.kernel.psi),
              from_moments(prep, S, M.extrapolated, opt, s.oracle));
    if (le.size() >= 2) {
        const double n = static_cast<double>(le.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < le.size(); ++i) {
            sx += le[i];
            sy += lerr[i];
            sxx += le[i] * le[i];
            sxy += le[i] * lerr[i];
        }
        out.eps_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    // periodic directions at the smallest epsilon
    const std::size_t last = prep.tubes.size() - 1;
    const double e_last = prep.tubes[last].eps;
    const auto& G_ref = M.G[last];
    {
        GridDims g2 = opt.grid;
        g2.n_phi *= 2;
        const TubeGrid tube = build_tube(prep.D, prep.T, e_last, g2, opt.kernel.workers);
        const TubeField tf = lift_on_tube(prep.F, prep.T, prep.D, tube, opt.kernel.workers);
        const auto G2 = compute_G_single(tf, tube, kps, prep.H, prep.D.P, d, opt.kernel);
        out.phi_saturation = rel_change(G_ref, G2);
        push_rows(out, "phi", e_last, g2, to_string(opt.kernel.psi), from_moments(prep, S, G2, opt, s.oracle));
    }
    {
        GridDims g2 = opt.grid;
        g2.n_theta = std::max(8, g2.n_theta / 2);
        const TubeGrid tube = build_tube(prep.D, prep.T, e_last, g2, opt.kernel.workers);
        const TubeField tf = lift_on_tube(prep.F, prep.T, prep.D, tube, opt.kernel.workers);
        const auto G2 = compute_G_single(tf, tube, kps, prep.H, prep.D.P, d, opt.kernel);
        push_rows(out, "theta", e_last, g2, to_string(opt.kernel.psi), from_moments(prep, S, G2, opt, s.oracle));
    }
    {
        KernelOptions ko = opt.kernel;
        ko.psi = PsiMode::trapezoid;
        const auto Gt = compute_G_single(prep.fields[last], prep.tubes[last], kps, prep.H, prep.D.P, d, ko);
        out.psi_trapezoid_gap = rel_change(Gt, G_ref);
        push_rows(out, "psi", e_last, opt.grid, "trapezoid", from_moments(prep, S, Gt, opt, s.oracle));
    }
    {
        const GridDims g1{1, 1, 1};
        std::vector<TubeGrid> tubes;
        std::vector<TubeField> fields;
        for (double e : opt.eps) {
            tubes.push_back(build_tube(prep.D, prep.T, e, g1, 1));
            fields.push_back(lift_on_tube(prep.F, prep.T, prep.D, tubes.back(), 1));
        }
        KernelOptions ko = opt.kernel;
        ko.guard = 0.0;
        const GMoments Mc = compute_G(fields, tubes, S, prep.H, prep.D.P, ko);
        const auto pts = from_moments(prep, S, Mc.extrapolated, opt, s.oracle);
        out.coarse_error = max_err(pts);
        push_rows(out, "coarse", 0.0, g1, to_string(opt.kernel.psi), pts);
    }
    return out;
}

CalibrationReport calibrate(const PipelineOptions& base) {
    const HomPoly3 line = HomPoly3::from_terms({{{0, 0, 1}, 1.0}});
    const std::vector<cplx> xs{{0.3, 0.1}, {-0.5, 0.4}, {0.2, -0.7}, {0.8, 0.3}, {-0.6, -0.5}};
    PipelineOptions opt = base;
    opt.prefactor = Prefactor::paper;

    struct Run {
        Oracle o;
        Prepared prep;
    };
    std::vector<Run> runs;
    for (int a : {1, 2}) {
        Run r;
        r.o.P = line;
        r.o.rational.push_back({1.0, a, 0, 0.0, 0});
        const Oracle& o = r.o;
        r.prep = prepare(
            line, 2.0, [&](const CurveDomain& D, const BoundaryTrace& T) { return sample_field(o, D, T); }, opt);
        runs.push_back(std::move(r));
    }

    CalibrationReport rep;
    auto errors = [&](int sign, const Run& r, std::vector<cplx>* ratios) {
        PipelineOptions o = opt;
        o.kernel.orientation = sign;
        double e = 0.0;
        for (cplx x : xs) {
            ProbeResult pr = reconstruct_at(r.prep, ProjectivePoint::chart(x, 0.0), o);
            attach_oracle(r.o, pr);
            for (const auto& p : pr.points) {
                e = std::max(e, p.abs_err);
                if (ratios) {
                    const cplx f_rec = p.kernel_lift[0] * p.v / 2.0 + p.h;
                    ratios->push_back(f_rec / r.o.holo(p.x, 0.0));
                }
            }
        }
        return e;
    };
    const double p1 = errors(1, runs[0], nullptr), p2 = errors(1, runs[1], nullptr);
    const double m1 = errors(-1, runs[0], nullptr), m2 = errors(-1, runs[1], nullptr);
    rep.err_plus = std::max(p1, p2);
    rep.err_minus = std::max(m1, m2);
    const bool plus_ok = rep.err_plus <= 1e-6, minus_ok = rep.err_minus <= 1e-6;
    if (plus_ok != minus_ok) rep.sign = plus_ok ? 1 : -1;
    else rep.sign = rep.err_plus < rep.err_minus ? 1 : -1;
    rep.err_second = rep.sign > 0 ? p2 : m2;

    std::vector<cplx> ratios;
    errors(rep.sign, runs[1], &ratios);
    cplx mean = 0.0;
    for (cplx q : ratios) mean += q;
    rep.constant = mean / static_cast<double>(ratios.size());
    for (cplx q : ratios) rep.constant_err = std::max(rep.constant_err, std::abs(q - 1.0));
    rep.matches_builtin = rep.sign == kOrientationSign;
    rep.passed = plus_ok != minus_ok && rep.constant_err <= 1e-4;
    return rep;
}

}  // namespace harmrep
