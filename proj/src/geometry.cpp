#include "harmrep/geometry.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "harmrep/errors.hpp"
#include "harmrep/roots.hpp"

namespace harmrep {

namespace {

double coeff_scale(const HomPoly3& P) {
    double s = 0.0;
    for (const auto& [e, c] : P.coeffs()) s += std::abs(c);
    return s;
}

UPoly fiber_poly(const HomPoly3& P, cplx x) { return restrict_to_line(P, chart_point(x, 0.0), C3{0.0, 0.0, 1.0}); }

std::size_t nearest_index(const std::vector<cplx>& pts, cplx p, double* best, double* second) {
    std::size_t idx = 0;
    double b = std::numeric_limits<double>::infinity(), s = b;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::abs(pts[i] - p);
        if (d < b) {
            s = b;
            b = d;
            idx = i;
        } else if (d < s) {
            s = d;
        }
    }
    if (best) *best = b;
    if (second) *second = s;
    return idx;
}

// One continuation step of several sheets from xa to xb; subdivides on ambiguity.
std::vector<cplx> match_step(const CurveDomain& D, cplx xa, const std::vector<cplx>& ya, cplx xb, int depth) {
    const Fiber fb = fiber_over_x(D, xb);
    if (fb.degenerate) throw NumericalError("geometry", "continuation crosses a degenerate fiber");
    std::vector<cplx> yb(ya.size());
    std::vector<char> used(fb.y.size(), 0);
    bool ambiguous = false;
    for (std::size_t s = 0; s < ya.size() && !ambiguous; ++s) {
        const cplx pred = ya[s] + dy_dx(D.P, xa, ya[s]) * (xb - xa);
        double best = 0.0, second = 0.0;
        const std::size_t k = nearest_index(fb.y, pred, &best, &second);
        const double step = std::abs(fb.y[k] - ya[s]);
        if (used[k] || second < 10.0 * std::max(step, 1e-300)) ambiguous = true;
        used[k] = 1;
        yb[s] = fb.y[k];
    }
    if (!ambiguous) return yb;
    if (depth > 24) throw NumericalError("geometry", "continuation cannot separate sheets (branch point on path?)");
    const cplx xm = 0.5 * (xa + xb);
    const auto ym = match_step(D, xa, ya, xm, depth + 1);
    return match_step(D, xm, ym, xb, depth + 1);
}

C3 lift_tangent(const C3& p, const C3& dp) {
    const double n = norm(p);
    const double dn = hdot(p, dp).real() / n;
    return (1.0 / n) * dp - (dn / (n * n)) * p;
}

}  // namespace

ProjectivePoint ProjectivePoint::chart(cplx x, cplx y) { return {chart_point(x, y), LiftTag::chart}; }

ProjectivePoint ProjectivePoint::sphere(const C3& z) { return {sphere_lift(z), LiftTag::sphere}; }

std::vector<ProjectivePoint> infinity_points(const HomPoly3& P) {
    const int d = P.degree();
    UPoly b(static_cast<std::size_t>(d) + 1, cplx(0.0));  // P(0, 1, t)
    bool any = false;
    for (const auto& [e, c] : P.coeffs()) {
        if (e[0] != 0) continue;
        b[e[2]] += c;
        any = true;
    }
    if (!any) throw ValidationError("geometry", "curve contains the line z0 = 0");
    UPoly bt = trim_leading(b, 0.0);
    std::vector<ProjectivePoint> out;
    for (cplx t : poly_roots(bt)) out.push_back({C3{0.0, 1.0, t}, LiftTag::chart});
    for (int k = static_cast<int>(bt.size()) - 1; k < d; ++k) out.push_back({C3{0.0, 0.0, 1.0}, LiftTag::chart});
    return out;
}

CurveDomain make_domain(const HomPoly3& P, double R) {
    if (P.is_zero() || P.degree() < 1) throw ValidationError("geometry", "curve polynomial must be nonzero of degree >= 1");
    if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("geometry", "domain radius must be positive");
    CurveDomain D;
    D.P = P;
    D.R = R;
    D.infinity = infinity_points(P);
    return D;
}

cplx dy_dx(const HomPoly3& P, cplx x, cplx y) {
    const C3 g = P.grad(chart_point(x, y));
    return -g[1] / g[2];
}

cplx newton_y(const HomPoly3& P, cplx x, cplx y) {
    for (int it = 0; it < 30; ++it) {
        const C3 p = chart_point(x, y);
        const cplx g2 = P.grad(p)[2];
        if (g2 == cplx(0.0)) break;
        const cplx dy = P.eval(p) / g2;
        y -= dy;
        if (std::abs(dy) <= 1e-16 * (1.0 + std::abs(y))) break;
    }
    return y;
}

Fiber fiber_over_x(const CurveDomain& D, cplx x) {
    Fiber f;
    f.x = x;
    f.expected = D.degree();
    const UPoly full = fiber_poly(D.P, x);
    const UPoly q = trim_leading(full, 1e-13);
    f.degenerate = static_cast<int>(q.size()) - 1 < f.expected;
    if (q.size() <= 1) {
        f.min_separation = std::numeric_limits<double>::infinity();
        return f;
    }
    f.y = poly_roots(q);
    for (auto& y : f.y) y = newton_y(D.P, x, y);
    f.min_separation = min_pairwise_distance(f.y);
    double scale = 1.0;
    for (cplx y : f.y) scale = std::max(scale, std::abs(y));
    f.branch = f.y.size() > 1 && f.min_separation < 1e-6 * scale;
    return f;
}

std::vector<cplx> continue_along(const CurveDomain& D, const std::vector<cplx>& xs, cplx y0) {
    std::vector<cplx> out;
    out.reserve(xs.size());
    if (xs.empty()) return out;
    out.push_back(newton_y(D.P, xs[0], y0));
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (D.degree() == 1) {
            out.push_back(newton_y(D.P, xs[i], out.back()));
            continue;
        }
        out.push_back(match_step(D, xs[i - 1], {out.back()}, xs[i], 0)[0]);
    }
    return out;
}

BoundaryTrace trace_boundary(const CurveDomain& D, int n_theta) {
    if (n_theta < 8) throw ValidationError("geometry", "trace.n_theta must be at least 8");
    const int d = D.degree();
    const double R = D.R;
    const double dth = kTwoPi / n_theta;
    auto xat = [&](int i) { return R * std::polar(1.0, dth * i); };

    for (cplx b : branch_points(D))
        if (std::abs(std::abs(b) - R) < 1e-6 * R) {
            std::ostringstream os;
            os << "branch point x = " << b << " lies on |x| = " << R << "; try radius " << R * 1.01;
            throw ValidationError("geometry", os.str());
        }

    const Fiber f0 = fiber_over_x(D, xat(0));
    if (f0.degenerate || static_cast<int>(f0.y.size()) != d)
        throw ValidationError("geometry", "degenerate fiber over x = R; perturb the radius");

    // sheet values at every sample, including the closing sample i = n_theta
    std::vector<std::vector<cplx>> ys(static_cast<std::size_t>(n_theta) + 1);
    ys[0] = f0.y;
    double min_sep = f0.y.size() > 1 ? f0.min_separation : std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n_theta; ++i) {
        ys[i] = match_step(D, xat(i - 1), ys[i - 1], xat(i), 0);
        if (d > 1) min_sep = std::min(min_sep, min_pairwise_distance(ys[i]));
    }
    double yscale = 1.0;
    for (cplx y : ys[0]) yscale = std::max(yscale, std::abs(y));
    if (d > 1 && min_sep < 1e-4 * yscale) {
        std::ostringstream os;
        os << "branch point within tolerance of |x| = " << R << " (min sheet separation " << min_sep
           << "); try radius " << R * 1.01;
        throw ValidationError("geometry", os.str());
    }

    BoundaryTrace T;
    T.R = R;
    T.n_theta = n_theta;
    T.min_sheet_separation = min_sep;
    T.monodromy.assign(d, -1);
    std::vector<char> hit(d, 0);
    for (int s = 0; s < d; ++s) {
        double best = 0.0;
        const std::size_t k = nearest_index(f0.y, ys[n_theta][s], &best, nullptr);
        if (hit[k] || best > 1e-8 * yscale) throw NumericalError("geometry", "monodromy is not a permutation");
        hit[k] = 1;
        T.monodromy[s] = static_cast<int>(k);
    }

    const double scale = coeff_scale(D.P);
    std::vector<char> seen(d, 0);
    for (int s0 = 0; s0 < d; ++s0) {
        if (seen[s0]) continue;
        TraceComponent c;
        c.n_per_cover = n_theta;
        for (int s = s0; !seen[s]; s = T.monodromy[s]) {
            seen[s] = 1;
            c.sheets.push_back(s);
        }
        c.n_cover = static_cast<int>(c.sheets.size());
        for (int m = 0; m < c.n_cover; ++m) {
            const int s = c.sheets[m];
            for (int i = 0; i < n_theta; ++i) {
                const cplx x = xat(i);
                const cplx y = ys[i][s];
                const C3 p = chart_point(x, y);
                const C3 dp{0.0, kI * x, dy_dx(D.P, x, y) * kI * x};
                const C3 t = lift_tangent(p, dp);
                c.theta.push_back(kTwoPi * m + dth * i);
                c.x.push_back(x);
                c.y.push_back(y);
                c.lift.push_back(sphere_lift(p));
                c.tangent.push_back(t);
                c.arc.push_back(norm(t) * dth);
                const C3 g = D.P.grad(p);
                if (norm(g) < 1e-10 * scale) throw ValidationError("geometry", "curve is singular on the boundary");
                T.max_residual = std::max(T.max_residual, std::abs(D.P.eval(c.lift.back())));
                T.max_rho = std::max(T.max_rho, std::abs(rho(c.lift.back(), R)));
            }
        }
        const int last = c.sheets.back();
        c.closure_error = std::abs(ys[n_theta][last] - ys[0][c.sheets.front()]);
        T.comps.push_back(std::move(c));
    }
    return T;
}

cplx boundary_y(const CurveDomain& D, const TraceComponent& c, double theta) {
    const double period = c.period();
    double t = std::fmod(theta, period);
    if (t < 0) t += period;
    const double dth = kTwoPi / c.n_per_cover;
    const std::size_t n = c.size();
    const std::size_t i = static_cast<std::size_t>(std::llround(t / dth)) % n;
    const cplx x = D.R * std::polar(1.0, theta);
    const cplx guess = c.y[i] + dy_dx(D.P, c.x[i], c.y[i]) * (x - c.x[i]);
    return newton_y(D.P, x, guess);
}

BoundaryLocation locate_on_boundary(const BoundaryTrace& T, cplx x, cplx y) {
    BoundaryLocation best;
    best.distance = std::numeric_limits<double>::infinity();
    double a = std::arg(x);
    if (a < 0) a += kTwoPi;
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const auto& c = T.comps[r];
        const double dth = kTwoPi / c.n_per_cover;
        for (int m = 0; m < c.n_cover; ++m) {
            const double th = kTwoPi * m + a;
            const std::size_t i = static_cast<std::size_t>(std::llround(th / dth)) % c.size();
            const double dist = std::abs(c.y[i] - y);
            if (dist < best.distance) best = {static_cast<int>(r), th, dist};
        }
    }
    return best;
}

void assign_reference_points(CurveDomain& D, const BoundaryTrace& T, const std::vector<C3>& user) {
    const int m = static_cast<int>(T.comps.size());
    D.reference.assign(m, ProjectivePoint{});
    const int steps = 64;
    if (user.empty()) {
        for (int r = 0; r < m; ++r) {
            const double th = kTwoPi * r / m;
            const cplx y0 = boundary_y(D, T.comps[r], th);
            std::vector<cplx> xs(steps + 1);
            for (int k = 0; k <= steps; ++k) xs[k] = D.R * (1.0 + static_cast<double>(k) / steps) * std::polar(1.0, th);
            const auto ys = continue_along(D, xs, y0);
            D.reference[r] = ProjectivePoint::chart(xs.back(), ys.back());
        }
        return;
    }
    if (static_cast<int>(user.size()) != m)
        throw ValidationError("geometry", "domain.reference_points needs one point per boundary component (" +
                                              std::to_string(m) + ")");
    std::vector<char> taken(m, 0);
    const double scale = coeff_scale(D.P);
    for (const C3& z : user) {
        const cplx x = z[1] / z[0], y = z[2] / z[0];
        if (std::abs(D.P.eval(chart_point(x, y))) > 1e-8 * scale * std::pow(std::max(1.0, norm(chart_point(x, y))), D.degree()))
            throw ValidationError("geometry", "reference point is not on the curve");
        if (std::abs(x) <= D.R) throw ValidationError("geometry", "reference point must satisfy |x| > R");
        std::vector<cplx> xs(steps + 1);
        for (int k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) / steps;
            xs[k] = x * ((1.0 - t) + t * D.R / std::abs(x));
        }
        const auto ys = continue_along(D, xs, y);
        const auto loc = locate_on_boundary(T, xs.back(), ys.back());
        if (loc.comp < 0 || taken[loc.comp]) throw ValidationError("geometry", "two reference points share a removed region");
        taken[loc.comp] = 1;
        D.reference[loc.comp] = ProjectivePoint::chart(x, y);
    }
}

std::vector<cplx> branch_points(const CurveDomain& D) {
    const int d = D.degree();
    if (d < 2) return {};
    int n = 0;  // formal y-degree
    for (const auto& [e, c] : D.P.coeffs()) n = std::max(n, e[2]);
    if (n < 2) return {};
    const int M = 2 * d * d + 2;
    const int S = 2 * n - 1;
    std::vector<cplx> samples(M);
    for (int k = 0; k < M; ++k) {
        const cplx x = std::polar(1.0, kTwoPi * k / M);
        UPoly f = fiber_poly(D.P, x);
        f.resize(static_cast<std::size_t>(n) + 1);
        const UPoly g = upoly_derivative(f);
        // Sylvester matrix, coefficients high to low
        std::vector<std::vector<cplx>> A(S, std::vector<cplx>(S, 0.0));
        for (int r = 0; r < n - 1; ++r)
            for (int j = 0; j <= n; ++j) A[r][r + j] = f[n - j];
        for (int r = 0; r < n; ++r)
            for (int j = 0; j <= n - 1; ++j) A[n - 1 + r][r + j] = g[n - 1 - j];
        cplx det = 1.0;
        for (int col = 0; col < S; ++col) {
            int piv = col;
            for (int r = col + 1; r < S; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            if (A[piv][col] == cplx(0.0)) {
                det = 0.0;
                break;
            }
            if (piv != col) {
                std::swap(A[piv], A[col]);
                det = -det;
            }
            det *= A[col][col];
            for (int r = col + 1; r < S; ++r) {
                const cplx fac = A[r][col] / A[col][col];
                for (int j = col; j < S; ++j) A[r][j] -= fac * A[col][j];
            }
        }
        samples[k] = det;
    }
    UPoly disc(M);
    for (int j = 0; j < M; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < M; ++k) s += samples[k] * std::polar(1.0, -kTwoPi * j * k / M);
        disc[j] = s / static_cast<double>(M);
    }
    disc = trim_leading(disc, 1e-10);
    if (disc.size() <= 1) {
        if (std::abs(disc[0]) == 0.0) throw ValidationError("geometry", "discriminant vanishes identically (singular curve)");
        return {};
    }
    // multiple roots of the discriminant come back as tight clusters
    std::vector<cplx> out;
    std::vector<int> count;
    for (cplx r : poly_roots(disc)) {
        bool merged = false;
        for (std::size_t i = 0; i < out.size() && !merged; ++i) {
            if (std::abs(r - out[i]) < 1e-5 * (1.0 + std::abs(r))) {
                out[i] = (out[i] * static_cast<double>(count[i]) + r) / static_cast<double>(count[i] + 1);
                ++count[i];
                merged = true;
            }
        }
        if (!merged) {
            out.push_back(r);
            count.push_back(1);
        }
    }
    return out;
}

IntersectionSet intersect_line_dir(const CurveDomain& D, const ProjectivePoint& w, const C3& v_in) {
    const int d = D.degree();
    IntersectionSet S;
    S.w = ProjectivePoint::sphere(w.z);
    const C3& w0 = S.w.z;
    C3 v = v_in - hdot(w0, v_in) * w0;
    if (norm(v) < 1e-12) throw ValidationError("geometry", "barrier direction is parallel to w");
    v = normalized(v);
    S.v = v;
    S.R_vec = cross(w0, v);

    UPoly line = restrict_to_line(D.P, w0, v);
    double mx = 0.0;
    for (auto c : line) mx = std::max(mx, std::abs(c));
    UPoly q = trim_leading(line, 1e-12);
    S.degree_drop = static_cast<int>(q.size()) - 1 < d;
    std::vector<cplx> tau = q.size() > 1 ? poly_roots(q) : std::vector<cplx>{};
    if (tau.empty()) tau.push_back(0.0);
    // the root nearest zero is w itself
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (std::abs(tau[i]) < std::abs(tau[i0])) i0 = i;
    std::rotate(tau.begin(), tau.begin() + static_cast<long>(i0), tau.begin() + static_cast<long>(i0) + 1);
    tau[0] = 0.0;
    S.min_root_separation = tau.size() > 1 ? min_pairwise_distance(tau) : std::numeric_limits<double>::infinity();
    if (S.degree_drop) S.min_root_separation = 0.0;

    S.inside_margin = std::numeric_limits<double>::infinity();
    const double scale = coeff_scale(D.P);
    for (cplx t : tau) {
        const C3 p = w0 + t * v;
        S.points.push_back({p, LiftTag::plane});
        S.x.push_back(p[1] / p[0]);
        S.inside_margin = std::min(S.inside_margin, -rho(p, D.R));
        S.max_residual = std::max(S.max_residual, std::abs(D.P.eval(p)) / (scale * std::pow(norm(p), d)));
    }
    S.min_x_separation = S.x.size() > 1 ? min_pairwise_distance(S.x) : std::numeric_limits<double>::infinity();
    return S;
}

IntersectionSet intersect_line(const CurveDomain& D, const ProjectivePoint& w, const C3& R_vec) {
    const C3 w0 = sphere_lift(w.z);
    if (std::abs(dot(R_vec, w0)) > 1e-12 * norm(R_vec))
        throw ValidationError("geometry", "barrier line R . zeta = 0 must pass through w");
    C3 v = cross(R_vec, conj(w0));
    if (norm(v) < 1e-12 * norm(R_vec)) throw ValidationError("geometry", "degenerate barrier vector");
    IntersectionSet S = intersect_line_dir(D, w, v);
    return S;
}

std::string barrier_failure(const IntersectionSet& S, const BarrierThresholds& th) {
    if (S.degree_drop) return "line meets the curve at infinity of the line";
    if (S.min_root_separation < th.root_separation) return "minRootSeparation";
    if (S.min_x_separation < th.x_separation) return "minXSeparation";
    if (S.inside_margin < th.inside_margin) return "insideMargin";
    if (S.max_residual > 1e-10) return "residual";
    return {};
}

IntersectionSet choose_barrier(const CurveDomain& D, const ProjectivePoint& w, std::uint64_t seed,
                               const BarrierThresholds& th) {
    const C3 w0 = sphere_lift(w.z);
    if (-rho(w0, D.R) < th.inside_margin)
        throw ValidationError("geometry", "point is not inside V with the required margin");
    std::map<std::string, int> fails;
    for (int attempt = 0; attempt < th.max_retries; ++attempt) {
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(attempt));
        std::normal_distribution<double> g(0.0, 1.0);
        C3 v;
        for (auto& c : v) {
            const double re = g(rng);
            const double im = g(rng);
            c = cplx(re, im);
        }
        IntersectionSet S = intersect_line_dir(D, w, v);
        const std::string why = barrier_failure(S, th);
        if (why.empty()) return S;
        ++fails[why];
    }
    std::ostringstream os;
    os << "no admissible barrier line after " << th.max_retries << " draws;";
    for (const auto& [k, n] : fails) os << " " << k << ":" << n;
    throw NumericalError("geometry", os.str());
}

}  // namespace harmrep
