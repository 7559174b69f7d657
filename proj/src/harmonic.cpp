#include "harmrep/harmonic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "harmrep/errors.hpp"
#include "harmrep/roots.hpp"

namespace harmrep {

namespace {

// Signed frequency of DFT index k for N samples; the Nyquist index maps to 0 weight.
int signed_freq(int k, int N) { return k <= N / 2 ? k : k - N; }

std::vector<cplx> dft(const std::vector<cplx>& v) {
    const int N = static_cast<int>(v.size());
    std::vector<cplx> out(N);
    std::vector<cplx> tw(N);
    for (int k = 0; k < N; ++k) tw[k] = std::polar(1.0, -kTwoPi * k / N);
    for (int k = 0; k < N; ++k) {
        cplx s = 0.0;
        for (int i = 0; i < N; ++i) s += v[i] * tw[(static_cast<long>(k) * i) % N];
        out[k] = s / static_cast<double>(N);
    }
    return out;
}

std::vector<cplx> pullback_dh(const CorrectionH& H, const TraceComponent& c) {
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = eval_dh(H, c.lift[i], c.tangent[i]);
    return out;
}

// Finite zeros of the linear form l on the curve must avoid the closed domain.
bool zeros_outside_impl(const CurveDomain& D, const C3& l, double margin) {
    // a point on the line and a direction spanning it
    C3 a = cross(l, C3{1.0, 0.0, 0.0});
    if (norm(a) < 1e-12 * norm(l)) a = cross(l, C3{0.0, 1.0, 0.0});
    C3 b = cross(l, conj(a));
    a = normalized(a);
    b = normalized(b);
    UPoly q = trim_leading(restrict_to_line(D.P, a, b), 1e-12);
    std::vector<C3> pts;
    if (static_cast<int>(q.size()) - 1 < D.degree()) pts.push_back(b);  // root at t = infinity
    if (q.size() > 1)
        for (cplx t : poly_roots(q)) pts.push_back(a + t * b);
    if (q.size() <= 1 && std::abs(q[0]) == 0.0) return false;  // line contained in the curve
    for (const C3& p : pts) {
        if (std::abs(p[0]) < 1e-12 * norm(p)) continue;  // at infinity
        if (rho(p, D.R) <= margin) return false;
    }
    return true;
}

}  // namespace

void validate_field(const BoundaryField& F, const BoundaryTrace& T) {
    if (F.comps.size() != T.comps.size())
        throw ValidationError("harmonic", "boundary data has " + std::to_string(F.comps.size()) + " components, trace has " +
                                              std::to_string(T.comps.size()));
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const auto& c = F.comps[r];
        if (c.u.size() != T.comps[r].size() || c.p.size() != T.comps[r].size())
            throw ValidationError("harmonic", "sample count mismatch on component " + std::to_string(r));
        // periodic data has a decaying spectrum; a jump leaves an O(1/N) tail
        const auto spec = dft(c.p);
        const int N = static_cast<int>(spec.size());
        double head = 0.0, tail = 0.0;
        for (int k = 0; k < N; ++k) {
            const int f = std::abs(signed_freq(k, N));
            if (f >= 3 * N / 8) tail = std::max(tail, std::abs(spec[k]));
            else head = std::max(head, std::abs(spec[k]));
        }
        if (tail > 1e-9 * std::max(head, 1e-300) && tail > 1e-13)
            throw ValidationError("harmonic", "p samples are not periodic on component " + std::to_string(r));
    }
    for (const auto& cn : F.connectors) {
        if (cn.target <= 0 || cn.target >= static_cast<int>(T.comps.size()))
            throw ValidationError("harmonic", "connector target out of range");
        if (cn.x.size() != cn.y.size() || cn.x.size() != cn.dx.size() || cn.x.size() != cn.dudx.size() || cn.x.empty())
            throw ValidationError("harmonic", "connector sample arrays are inconsistent");
    }
}

Periods period_a(const BoundaryField& F, const BoundaryTrace& T) {
    validate_field(F, T);
    Periods out;
    double sum = 0.0;
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const double dth = kTwoPi / T.comps[r].n_per_cover;
        cplx raw = 0.0;
        for (cplx p : F.comps[r].p) raw += p;
        raw *= dth;
        const cplx a = raw / (kTwoPi * kI);
        out.a.push_back(a.real());
        out.imag.push_back(a.imag());
        if (std::abs(a.imag()) > 1e-9) out.flagged = true;
        sum += a.real();
    }
    out.stokes = std::abs(sum);
    return out;
}

std::string to_string(HMode m) {
    switch (m) {
        case HMode::paper: return "paper";
        case HMode::robust: return "robust";
        case HMode::automatic: return "auto";
    }
    return "?";
}

HMode parse_hmode(const std::string& s) {
    if (s == "paper") return HMode::paper;
    if (s == "robust") return HMode::robust;
    if (s == "auto") return HMode::automatic;
    throw ValidationError("config", "h.mode must be one of paper, robust, auto (got '" + s + "')");
}

double eval_h(const CorrectionH& H, const C3& z) {
    double s = 0.0;
    for (const auto& t : H.terms) {
        const cplx l = dot(t.l, z);
        if (l == cplx(0.0) || z[0] == cplx(0.0)) throw NumericalError("harmonic", "h evaluated at a singular point");
        s += t.c * std::log(std::norm(l) / std::norm(z[0]));
    }
    return s;
}

cplx eval_dh(const CorrectionH& H, const C3& z, const C3& t) {
    cplx s = 0.0;
    for (const auto& term : H.terms) {
        const cplx l = dot(term.l, z);
        if (l == cplx(0.0) || z[0] == cplx(0.0)) throw NumericalError("harmonic", "dh evaluated at a singular point");
        s += term.c * (dot(term.l, t) / l - t[0] / z[0]);
    }
    return s;
}

bool line_zeros_outside(const CurveDomain& D, const C3& l, double margin) { return zeros_outside_impl(D, l, margin); }

std::vector<double> log_form_periods(const C3& l, const BoundaryTrace& T) {
    CorrectionH one;
    one.terms.push_back({1.0, l});
    std::vector<double> out;
    for (const auto& c : T.comps) {
        const auto dh = pullback_dh(one, c);
        cplx s = 0.0;
        for (cplx v : dh) s += v;
        s *= kTwoPi / c.n_per_cover;
        out.push_back((s / (kTwoPi * kI)).real());
    }
    return out;
}

std::vector<double> h_period_residuals(const CorrectionH& H, const BoundaryField& F, const BoundaryTrace& T) {
    std::vector<double> out;
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const auto& c = T.comps[r];
        const auto dh = pullback_dh(H, c);
        cplx s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) s += F.comps[r].p[i] - dh[i];
        s *= kTwoPi / c.n_per_cover;
        out.push_back(std::abs(s / (kTwoPi * kI)));
    }
    return out;
}

namespace {

void fill_residual(CorrectionH& H, const BoundaryField& F, const BoundaryTrace& T) {
    H.residuals = h_period_residuals(H, F, T);
    H.period_residual = 0.0;
    for (double r : H.residuals) H.period_residual = std::max(H.period_residual, r);
}

std::vector<C3> robust_pool(const CurveDomain& D, bool enlarged) {
    std::vector<C3> pool;
    const double margin = 0.02;
    auto consider = [&](const C3& l) {
        if (norm(l) < 1e-12) return;
        const C3 ln = normalized(l);
        for (const C3& q : pool)
            if (std::abs(std::abs(hdot(q, ln)) - 1.0) < 1e-10) return;  // same line
        if (zeros_outside_impl(D, ln, margin)) pool.push_back(ln);
    };
    for (const auto& p : D.infinity) consider(D.P.grad(p.z));
    const int K = 4;
    for (int k = 0; k < K; ++k) {
        const cplx c = 3.0 * D.R * std::polar(1.0, kTwoPi * (k + 0.5) / K);
        consider(C3{-c, 1.0, 0.0});
        consider(C3{-c, 0.0, 1.0});
    }
    if (enlarged) {
        std::vector<C3> pts;
        for (const auto& p : D.infinity) pts.push_back(p.z);
        for (const auto& p : D.reference) pts.push_back(p.z);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) consider(cross(pts[i], pts[j]));
    }
    return pool;
}

CorrectionH solve_robust(const CurveDomain& D, const BoundaryTrace& T, const BoundaryField& F, const Periods& P) {
    CorrectionH best;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto pool = robust_pool(D, attempt == 1);
        const int m = static_cast<int>(T.comps.size());
        const int S = static_cast<int>(pool.size());
        CorrectionH H;
        H.mode = HMode::robust;
        H.pool_size = S;
        if (S > 0) {
            Eigen::MatrixXd M(m, S);
            for (int s = 0; s < S; ++s) {
                const auto col = log_form_periods(pool[s], T);
                for (int r = 0; r < m; ++r) M(r, s) = col[r];
            }
            Eigen::VectorXd a(m);
            for (int r = 0; r < m; ++r) a(r) = P.a[r];
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(1e-8);
            const Eigen::VectorXd c = svd.solve(a);
            for (int s = 0; s < S; ++s)
                if (std::abs(c(s)) > 1e-14) H.terms.push_back({c(s), pool[s]});
        }
        fill_residual(H, F, T);
        if (attempt == 0 || H.period_residual < best.period_residual) best = H;
        if (H.period_residual <= 1e-8) return H;
    }
    std::ostringstream os;
    os << "robust log basis cannot match the periods (residual " << best.period_residual << ", pool " << best.pool_size
       << ")";
    throw NumericalError("harmonic", os.str());
}

}  // namespace

CorrectionH build_h(const CurveDomain& D, const BoundaryTrace& T, const BoundaryField& F, const Periods& P, HMode mode) {
    double amax = 0.0;
    for (double a : P.a) amax = std::max(amax, std::abs(a));
    if (amax <= 1e-12) {
        CorrectionH H;
        H.mode = mode == HMode::robust ? HMode::robust : HMode::paper;
        fill_residual(H, F, T);
        H.note = "all periods vanish; h = 0";
        return H;
    }
    if (mode == HMode::robust) return solve_robust(D, T, F, P);

    if (D.reference.size() != T.comps.size()) throw ValidationError("harmonic", "reference points are not assigned");
    CorrectionH H;
    H.mode = HMode::paper;
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const cplx xr = D.reference[r].x();
        H.terms.push_back({P.a[r], C3{-xr, 1.0, 0.0}});
    }
    fill_residual(H, F, T);
    H.paper_residual = H.period_residual;
    if (mode == HMode::paper || H.period_residual <= 1e-8) return H;

    CorrectionH R = solve_robust(D, T, F, P);
    R.paper_residual = H.period_residual;
    R.fallback = true;
    std::ostringstream os;
    os << "point-log h (mode paper) leaves period residual " << H.period_residual << "; switched to robust log basis";
    R.note = os.str();
    return R;
}

cplx PrimitiveF::eval(int comp, double theta) const {
    const auto& c = coef[comp];
    const int N = static_cast<int>(c.size());
    const int n = n_cover[comp];
    const cplx z = std::polar(1.0, theta / n);
    cplx s = c[0];
    cplx zp = 1.0;
    for (int k = 1; k < (N + 1) / 2; ++k) {
        zp *= z;
        s += c[k] * zp + c[N - k] * std::conj(zp);
    }
    return offsets[comp] + drift[comp] * theta + s;
}

PrimitiveF primitive_f(const BoundaryField& F, const CorrectionH& H, const BoundaryTrace& T, const CurveDomain& D,
                       const PrimitiveTolerances& tol) {
    validate_field(F, T);
    const int m = static_cast<int>(T.comps.size());
    PrimitiveF out;
    out.offsets.assign(m, 0.0);
    out.drift.assign(m, 0.0);
    out.path_offsets.assign(m, {});
    std::vector<std::vector<double>> hvals(m);

    for (int r = 0; r < m; ++r) {
        const auto& c = T.comps[r];
        const int N = static_cast<int>(c.size());
        const int n = c.n_cover;
        out.n_cover.push_back(n);
        out.n_per.push_back(c.n_per_cover);
        const auto dh = pullback_dh(H, c);
        std::vector<cplx> q(N);
        for (int i = 0; i < N; ++i) q[i] = 2.0 * (F.comps[r].p[i] - dh[i]);
        const auto qh = dft(q);
        // integral of e^{i k theta / n} is (n / i k) e^{i k theta / n}
        std::vector<cplx> ch(N, 0.0);
        cplx at0 = 0.0;
        for (int k = 0; k < N; ++k) {
            const int f = signed_freq(k, N);
            if (f == 0 || (N % 2 == 0 && k == N / 2)) continue;
            ch[k] = qh[k] * static_cast<double>(n) / (kI * static_cast<double>(f));
            at0 += ch[k];
        }
        ch[0] = -at0;  // periodic part vanishes at theta = 0
        out.coef.push_back(std::move(ch));
        out.drift[r] = qh[0];
        out.max_closure = std::max(out.max_closure, std::abs(qh[0]) * c.period());
        hvals[r].resize(N);
        for (int i = 0; i < N; ++i) hvals[r][i] = eval_h(H, c.lift[i]);
    }

    out.anchor = ProjectivePoint::chart(T.comps[0].x[0], T.comps[0].y[0]);
    out.anchor_value = F.comps[0].u[0] - hvals[0][0];
    out.offsets[0] = out.anchor_value;

    for (int r = 1; r < m; ++r) {
        std::vector<cplx> vals;
        for (const auto& cn : F.connectors) {
            if (cn.target != r) continue;
            cplx s = 0.0;
            for (std::size_t i = 0; i < cn.x.size(); ++i) {
                const C3 z = chart_point(cn.x[i], cn.y[i]);
                const C3 t{0.0, 1.0, dy_dx(D.P, cn.x[i], cn.y[i])};
                s += 2.0 * (cn.dudx[i] - eval_dh(H, z, t)) * cn.dx[i];
            }
            vals.push_back(out.anchor_value + s);
        }
        if (vals.empty()) throw ValidationError("harmonic", "no connector path reaches component " + std::to_string(r));
        out.offsets[r] = vals[0];
        for (const auto& v : vals) out.path_spread = std::max(out.path_spread, std::abs(v - vals[0]));
        out.path_offsets[r] = vals;
    }

    for (int r = 0; r < m; ++r) {
        const auto& c = T.comps[r];
        std::vector<cplx> fr(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            fr[i] = out.eval(r, c.theta[i]);
            const double target = F.comps[r].u[i] - hvals[r][i];
            out.max_re_drift = std::max(out.max_re_drift, std::abs(fr[i].real() - target));
        }
        out.f.push_back(std::move(fr));
    }

    double worst = 0.0;
    for (double v : h_period_residuals(H, F, T)) worst = std::max(worst, v);
    std::ostringstream diag;
    diag << "Re f drift " << out.max_re_drift << ", closure " << out.max_closure << ", connector spread "
         << out.path_spread << ", period residual " << worst << " (h mode " << to_string(H.mode) << ")";
    if (out.max_re_drift > tol.re_drift || out.max_closure > tol.closure || out.path_spread > tol.path_spread)
        throw NumericalError("harmonic", "holomorphization check failed: " + diag.str());
    return out;
}

LiftResult lift_g(const PrimitiveF& F, const BoundaryTrace& T, const CurveDomain& D, int comp, double theta_hint,
                  const C3& zeta) {
    if (zeta[0] == cplx(0.0)) throw NumericalError("harmonic", "lift_g at z0 = 0");
    const cplx x = zeta[1] / zeta[0];
    const cplx y = zeta[2] / zeta[0];
    double delta = std::arg(x) - theta_hint;
    delta -= kTwoPi * std::round(delta / kTwoPi);
    const double th = theta_hint + delta;
    const cplx yb = boundary_y(D, T.comps[comp], th);
    return {F.eval(comp, th) / zeta[0], th, std::abs(y - yb)};
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                nodes[i] = x;
                weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
                break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
}

namespace {

struct Piece {
    bool arc = false;
    cplx a, b;        // segment endpoints
    cplx center;      // arc
    double radius = 0, phi0 = 0, sweep = 0;

    cplx at(double t) const { return arc ? center + radius * std::polar(1.0, phi0 + sweep * t) : a + (b - a) * t; }
    cplx deriv(double t) const { return arc ? kI * sweep * radius * std::polar(1.0, phi0 + sweep * t) : b - a; }
    double length() const { return arc ? std::abs(sweep) * radius : std::abs(b - a); }
};

Piece segment(cplx a, cplx b) {
    Piece p;
    p.a = a;
    p.b = b;
    return p;
}

double seg_point_distance(cplx a, cplx b, cplx p) {
    const cplx ab = b - a;
    double t = std::norm(ab) > 0 ? ((p - a) * std::conj(ab)).real() / std::norm(ab) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * ab - p);
}

// Loop from hub around branch point b (dir = +1 counterclockwise).
std::vector<Piece> loop_pieces(cplx hub, cplx b, double radius, int dir) {
    const cplx u = (b - hub) / std::abs(b - hub);
    const cplx start = b - radius * u;
    const Piece in = segment(hub, start);
    Piece circ;
    circ.arc = true;
    circ.center = b;
    circ.radius = radius;
    circ.phi0 = std::arg(start - b);
    circ.sweep = dir * kTwoPi;
    const Piece out = segment(start, hub);
    return {in, circ, out};
}

std::vector<cplx> sample_pieces(const std::vector<Piece>& pieces, double hmax) {
    std::vector<cplx> xs;
    for (const auto& p : pieces) {
        const int n = std::max(2, static_cast<int>(std::ceil(p.length() / hmax)));
        for (int k = (xs.empty() ? 0 : 1); k <= n; ++k) xs.push_back(p.at(static_cast<double>(k) / n));
    }
    return xs;
}

}  // namespace

std::vector<ConnectorPath> default_connector_paths(const CurveDomain& D, const BoundaryTrace& T, int n_paths) {
    const int m = static_cast<int>(T.comps.size());
    std::vector<ConnectorPath> out;
    if (m <= 1) return out;
    const double R = D.R;
    std::vector<cplx> bps;
    for (cplx b : branch_points(D))
        if (std::abs(b) < R) bps.push_back(b);
    const cplx xs0 = T.comps[0].x[0];
    const cplx ys0 = T.comps[0].y[0];

    // hub candidates ranked by clearance from branch points and path segments
    struct Hub {
        cplx x;
        double score;
    };
    std::vector<Hub> hubs;
    for (double rf : {0.25, 0.45, 0.65}) {
        for (int k = 0; k < 24; ++k) {
            const cplx h = rf * R * std::polar(1.0, kTwoPi * (k + 0.5) / 24);
            double score = std::numeric_limits<double>::infinity();
            for (cplx b : bps) {
                score = std::min(score, std::abs(h - b));
                score = std::min(score, seg_point_distance(xs0, h, b));
            }
            for (std::size_t i = 0; i < bps.size(); ++i)
                for (std::size_t j = 0; j < bps.size(); ++j)
                    if (i != j) score = std::min(score, seg_point_distance(h, bps[i], bps[j]));
            hubs.push_back({h, score});
        }
    }
    std::stable_sort(hubs.begin(), hubs.end(), [](const Hub& a, const Hub& b) { return a.score > b.score; });
    std::vector<cplx> chosen;
    for (const auto& h : hubs) {
        bool far = true;
        for (cplx c : chosen) far = far && std::abs(c - h.x) > 0.3 * R;
        if (far) chosen.push_back(h.x);
        if (static_cast<int>(chosen.size()) == n_paths) break;
    }

    const double hmax = 0.02 * R;
    for (int pid = 0; pid < static_cast<int>(chosen.size()); ++pid) {
        const cplx hub = chosen[pid];
        std::vector<double> radii(bps.size());
        for (std::size_t i = 0; i < bps.size(); ++i) {
            double r = std::min(R - std::abs(bps[i]), std::abs(hub - bps[i]));
            for (std::size_t j = 0; j < bps.size(); ++j)
                if (j != i) r = std::min(r, std::abs(bps[i] - bps[j]));
            radii[i] = 0.3 * r;
        }
        const Fiber fh = fiber_over_x(D, hub);
        const int d = static_cast<int>(fh.y.size());
        auto sheet_of = [&](cplx y) {
            std::size_t k = 0;
            for (std::size_t i = 1; i < fh.y.size(); ++i)
                if (std::abs(fh.y[i] - y) < std::abs(fh.y[k] - y)) k = i;
            return static_cast<int>(k);
        };
        // sheet maps of the loop moves
        std::vector<std::vector<Piece>> moves;
        std::vector<std::string> names;
        std::vector<std::vector<int>> perm;
        for (std::size_t i = 0; i < bps.size(); ++i) {
            for (int dir : {1, -1}) {
                auto pcs = loop_pieces(hub, bps[i], radii[i], dir);
                const auto xs = sample_pieces(pcs, hmax);
                std::vector<int> pm(d);
                for (int s = 0; s < d; ++s) pm[s] = sheet_of(continue_along(D, xs, fh.y[s]).back());
                moves.push_back(pcs);
                names.push_back((dir > 0 ? "+" : "-") + std::to_string(i));
                perm.push_back(pm);
            }
        }
        const Piece in = segment(xs0, hub);
        const Piece back = segment(hub, xs0);
        const int start = sheet_of(continue_along(D, sample_pieces({in}, hmax), ys0).back());
        // landing component of each hub sheet when returning to x = R
        std::vector<int> lands(d, -1);
        for (int s = 0; s < d; ++s) {
            const cplx y = continue_along(D, sample_pieces({back}, hmax), fh.y[s]).back();
            for (int r = 0; r < m; ++r)
                if (std::abs(T.comps[r].y[0] - y) < 1e-8 * (1.0 + std::abs(y))) lands[s] = r;
        }
        // breadth-first search over loop words
        std::vector<int> prev(d, -2), via(d, -1);
        std::deque<int> queue{start};
        prev[start] = -1;
        while (!queue.empty()) {
            const int s = queue.front();
            queue.pop_front();
            for (std::size_t mv = 0; mv < moves.size(); ++mv) {
                const int t = perm[mv][s];
                if (prev[t] != -2) continue;
                prev[t] = s;
                via[t] = static_cast<int>(mv);
                queue.push_back(t);
            }
        }
        for (int r = 1; r < m; ++r) {
            int target = -1;
            for (int s = 0; s < d; ++s)
                if (lands[s] == r && prev[s] != -2) target = s;
            if (target < 0) throw NumericalError("harmonic", "no connector path reaches component " + std::to_string(r));
            std::vector<int> word;
            for (int s = target; prev[s] != -1; s = prev[s]) word.push_back(via[s]);
            std::reverse(word.begin(), word.end());
            std::vector<Piece> pcs{in};
            ConnectorPath cp;
            cp.target = r;
            cp.path = pid;
            cp.hub = hub;
            for (int mv : word) {
                pcs.insert(pcs.end(), moves[mv].begin(), moves[mv].end());
                cp.word += names[mv] + " ";
            }
            pcs.push_back(back);
            // Gauss-Legendre nodes on every sub-piece, continued in path order
            std::vector<double> gn, gw;
            gauss_legendre(16, gn, gw);
            std::vector<cplx> dense{xs0};
            std::vector<int> node_at;  // index in dense of each quadrature node
            for (const auto& p : pcs) {
                const int nsub = std::max(1, static_cast<int>(std::ceil(p.length() / (4.0 * hmax))));
                for (int sidx = 0; sidx < nsub; ++sidx) {
                    const double t0 = static_cast<double>(sidx) / nsub, t1 = static_cast<double>(sidx + 1) / nsub;
                    for (int q = 0; q < 16; ++q) {
                        const double t = t0 + (t1 - t0) * 0.5 * (gn[q] + 1.0);
                        dense.push_back(p.at(t));
                        node_at.push_back(static_cast<int>(dense.size()) - 1);
                        cp.x.push_back(p.at(t));
                        cp.dx.push_back(p.deriv(t) * (t1 - t0) * 0.5 * gw[q]);
                    }
                    dense.push_back(p.at(t1));
                }
            }
            const auto ys = continue_along(D, dense, ys0);
            for (int idx : node_at) cp.y.push_back(ys[idx]);
            const cplx yend = ys.back();
            if (std::abs(yend - T.comps[r].y[0]) > 1e-8 * (1.0 + std::abs(yend)))
                throw NumericalError("harmonic", "connector path does not land on component " + std::to_string(r));
            out.push_back(std::move(cp));
        }
    }
    return out;
}

}  // namespace harmrep
