#include "harmrep/kernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <sstream>

#include "harmrep/errors.hpp"
#include "harmrep/parallel.hpp"

namespace harmrep {

std::string to_string(PsiMode m) { return m == PsiMode::exact ? "exact" : "trapezoid"; }
std::string to_string(BarrierMode m) { return m == BarrierMode::per_point ? "per_point" : "shared"; }
std::string to_string(Prefactor m) { return m == Prefactor::derived ? "derived" : "paper"; }

std::size_t TubeGrid::node_count() const {
    std::size_t n = 0;
    for (const auto& c : comps) n += c.zeta.size();
    return n;
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat46 = Eigen::Matrix<double, 4, 6>;

Vec6 to_real(const C3& z) {
    Vec6 v;
    for (int j = 0; j < 3; ++j) {
        v(2 * j) = z[j].real();
        v(2 * j + 1) = z[j].imag();
    }
    return v;
}

C3 from_real(const Vec6& v) { return {cplx(v(0), v(1)), cplx(v(2), v(3)), cplx(v(4), v(5))}; }

// Row 1 is rho on the sphere plus kappa |P|^2, an extension that agrees with rho on the curve.
Eigen::Vector4d constraints(const HomPoly3& P, double R, double kappa, const C3& z, cplx target) {
    const cplx p = P.eval(z);
    return {norm2(z) - 1.0, std::norm(z[1]) - R * R * std::norm(z[0]) + kappa * std::norm(p), p.real() - target.real(),
            p.imag() - target.imag()};
}

Mat46 constraint_jacobian(const HomPoly3& P, double R, double kappa, const C3& z) {
    Mat46 J = Mat46::Zero();
    const C3 g = P.grad(z);
    const cplx pc = std::conj(P.eval(z));
    for (int j = 0; j < 3; ++j) {
        J(0, 2 * j) = 2.0 * z[j].real();
        J(0, 2 * j + 1) = 2.0 * z[j].imag();
        J(2, 2 * j) = g[j].real();
        J(2, 2 * j + 1) = -g[j].imag();
        J(3, 2 * j) = g[j].imag();
        J(3, 2 * j + 1) = g[j].real();
    }
    J(1, 0) = -2.0 * R * R * z[0].real();
    J(1, 1) = -2.0 * R * R * z[0].imag();
    J(1, 2) = 2.0 * z[1].real();
    J(1, 3) = 2.0 * z[1].imag();
    if (kappa != 0.0)
        for (int j = 0; j < 3; ++j) {
            J(1, 2 * j) += 2.0 * kappa * (pc * g[j]).real();
            J(1, 2 * j + 1) -= 2.0 * kappa * (pc * g[j]).imag();
        }
    return J;
}

}  // namespace

NodeSolve solve_tube_node(const CurveDomain& D, const TraceComponent& c, double theta, double phi, double eps) {
    const cplx x = D.R * std::polar(1.0, theta);
    const cplx y = boundary_y(D, c, theta);
    const C3 base = sphere_lift(chart_point(x, y));
    const C3 g = D.P.grad(base);
    const cplx target = eps * std::polar(1.0, phi);
    const C3 n = (1.0 / norm2(g)) * conj(g);
    Vec6 z = to_real(base + target * n);
    NodeSolve out;
    int extra = 0;
    int steps = 0;
    int met = -1;  // updates applied when the residual first met tolerance
    auto small = [&](const Eigen::Vector4d& r) {
        return r.head<2>().cwiseAbs().maxCoeff() < 1e-13 && std::hypot(r(2), r(3)) < 1e-12 * eps;
    };
    for (int it = 1; it <= 30; ++it) {
        const C3 zc = from_real(z);
        const Eigen::Vector4d r = constraints(D.P, D.R, D.rho_extension, zc, target);
        if (met < 0 && small(r)) met = it - 1;
        const Mat46 J = constraint_jacobian(D.P, D.R, D.rho_extension, zc);
        const Eigen::Matrix4d JJ = J * J.transpose();
        const Vec6 step = -J.transpose() * JJ.ldlt().solve(r);
        z += step;
        ++steps;
        if (step.norm() < 1e-15) {
            // one further step after the update stalls
            if (++extra >= 1) {
                out.converged = true;
                break;
            }
        }
    }
    out.zeta = from_real(z);
    const bool final_ok = small(constraints(D.P, D.R, D.rho_extension, out.zeta, target));
    if (!out.converged) out.converged = final_ok;
    out.iterations = met >= 0 ? met : steps;
    return out;
}

cplx tube_jacobian(const CurveDomain& D, const TraceComponent& c, double theta, double phi, double eps, double h_theta,
                   double h_phi) {
    auto at = [&](double th, double ph) { return solve_tube_node(D, c, th, ph, eps).zeta; };
    auto central = [](const C3& p, const C3& m, double h) { return (0.5 / h) * (p - m); };
    const C3 z = at(theta, phi);
    const C3 dth1 = central(at(theta + h_theta, phi), at(theta - h_theta, phi), h_theta);
    const C3 dth2 = central(at(theta + 0.5 * h_theta, phi), at(theta - 0.5 * h_theta, phi), 0.5 * h_theta);
    const C3 dph1 = central(at(theta, phi + h_phi), at(theta, phi - h_phi), h_phi);
    const C3 dph2 = central(at(theta, phi + 0.5 * h_phi), at(theta, phi - 0.5 * h_phi), 0.5 * h_phi);
    const C3 dth = (1.0 / 3.0) * (4.0 * dth2 - dth1);
    const C3 dph = (1.0 / 3.0) * (4.0 * dph2 - dph1);
    return det3(dth, dph, z);
}

TubeGrid build_tube(const CurveDomain& D, const BoundaryTrace& T, double eps, const GridDims& dims, int workers) {
    if (!(eps > 0.0) || eps > 0.1) throw ValidationError("kernel", "epsilon must lie in (0, 0.1]");
    if (dims.n_theta < 1 || dims.n_phi < 1 || dims.n_psi < 1) throw ValidationError("kernel", "grid sizes must be positive");
    TubeGrid G;
    G.eps = eps;
    G.dims = dims;
    const double dth = kTwoPi / dims.n_theta;
    const double dph = kTwoPi / dims.n_phi;
    std::size_t failures = 0, total = 0;
    for (const auto& c : T.comps) {
        TubeComponent tc;
        tc.n_cover = c.n_cover;
        tc.n_theta = c.n_cover * dims.n_theta;
        tc.n_phi = dims.n_phi;
        for (int i = 0; i < tc.n_theta; ++i) tc.theta.push_back(dth * i);
        for (int l = 0; l < tc.n_phi; ++l) tc.phi.push_back(dph * l);
        const std::size_t n = static_cast<std::size_t>(tc.n_theta) * tc.n_phi;
        tc.zeta.resize(n);
        tc.jac.resize(n);
        std::vector<int> iters(n, 0);
        std::vector<char> ok(n, 0);
        parallel_for(n, workers, [&](std::size_t idx) {
            const double th = tc.theta[idx / tc.n_phi];
            const double ph = tc.phi[idx % tc.n_phi];
            const NodeSolve s = solve_tube_node(D, c, th, ph, eps);
            tc.zeta[idx] = s.zeta;
            iters[idx] = s.iterations;
            ok[idx] = s.converged;
            tc.jac[idx] = tube_jacobian(D, c, th, ph, eps, dth / 8.0, dph / 8.0);
        });
        for (std::size_t idx = 0; idx < n; ++idx) {
            ++total;
            if (!ok[idx]) ++failures;
            G.max_newton_iterations = std::max(G.max_newton_iterations, iters[idx]);
            const C3& z = tc.zeta[idx];
            const cplx target = eps * std::polar(1.0, tc.phi[idx % tc.n_phi]);
            G.max_sphere_residual = std::max(G.max_sphere_residual, std::abs(norm(z) - 1.0));
            G.max_rho_residual = std::max(G.max_rho_residual, std::abs(rho(z, D.R) + D.rho_extension * std::norm(D.P.eval(z))));
            G.max_p_residual = std::max(G.max_p_residual, std::abs(D.P.eval(z) - target) / eps);
        }
        G.comps.push_back(std::move(tc));
    }
    if (failures * 1000 > total) {
        std::ostringstream os;
        os << "tube Newton failed at " << failures << " of " << total << " nodes (eps " << eps << ")";
        throw NumericalError("kernel", os.str());
    }
    return G;
}

std::vector<KernelPoint> kernel_points(const IntersectionSet& S, BarrierMode mode) {
    std::vector<KernelPoint> out;
    for (const auto& p : S.points) {
        if (mode == BarrierMode::per_point) {
            const C3 l = sphere_lift(p.z);
            out.push_back({l, conj(l)});
        } else {
            out.push_back({p.z, S.R_vec});
        }
    }
    return out;
}

cplx kernel_det(const C3& zeta, const C3& zbar, const C3& w, const HeferTriple& H, const HomPoly3& P, const C3& R) {
    const cplx p = P.eval(zeta);
    const cplx f = dot(R, zeta - w);
    const cplx b = dot(zbar, zeta - w);
    const double m = std::min({std::abs(p), std::abs(f), std::abs(b)});
    if (m < 1e-12) {
        std::ostringstream os;
        os << "kernel singular: |P| " << std::abs(p) << ", |F| " << std::abs(f) << ", |B| " << std::abs(b);
        throw NumericalError("kernel", os.str());
    }
    return det3(H.eval(zeta, w), R, zbar) / (p * f * b);
}

cplx kernel_det_literal(const C3& zeta, const C3& zbar, const C3& w, const HeferTriple& H, const HomPoly3& P,
                        const C3& R) {
    const cplx p = P.eval(zeta);
    const cplx f = dot(R, zeta - w);
    const cplx b = dot(zbar, zeta - w);
    return det3((1.0 / p) * H.eval(zeta, w), (1.0 / f) * R, (1.0 / b) * zbar);
}

HopfPoles hopf_poles(const C3& zeta0, const KernelPoint& kp) {
    const cplx r = dot(kp.R, zeta0);
    const cplx b = dot(kp.R, kp.lift);
    HopfPoles h;
    h.lambda_F = b / r;
    h.c = hdot(zeta0, kp.lift) / norm2(zeta0);
    h.min_F = std::max(0.0, std::abs(b) - std::abs(r));
    h.min_B = std::max(0.0, 1.0 - std::abs(h.c)) * norm2(zeta0);
    return h;
}

cplx psi_integral_exact(const C3& zeta0, const KernelPoint& kp, const HeferTriple& H, const HomPoly3& P) {
    const HopfPoles hp = hopf_poles(zeta0, kp);
    const int d = P.degree();
    const cplx r = dot(kp.R, zeta0);
    const cplx num = det3(H.eval(hp.lambda_F * zeta0, kp.lift), kp.R, conj(zeta0));
    const cplx p0 = P.eval(zeta0);
    // B(lambda zeta0) = |zeta0|^2 (lambda - c) / lambda on the unit circle
    const double s = norm2(zeta0);
    return -kTwoPi * kI * num * std::pow(hp.lambda_F, 1 - d) / (p0 * r * s * (hp.lambda_F - hp.c));
}

cplx psi_integral_trapezoid(const C3& zeta0, const KernelPoint& kp, const HeferTriple& H, const HomPoly3& P, int n,
                            double delta) {
    std::vector<cplx> terms(n);
    for (int m = 0; m < n; ++m) {
        const cplx lam = std::polar(1.0, kTwoPi * m / n + delta);
        const C3 z = lam * zeta0;
        terms[m] = kernel_det(z, conj(z), kp.lift, H, P, kp.R) * kI * lam * lam;
    }
    return pairwise_sum(terms) * (kTwoPi / n);
}

TubeField lift_on_tube(const PrimitiveF& F, const BoundaryTrace& T, const CurveDomain& D, const TubeGrid& tube,
                       int workers) {
    TubeField out;
    std::vector<double> worst(tube.comps.size(), 0.0);
    for (std::size_t r = 0; r < tube.comps.size(); ++r) {
        const auto& tc = tube.comps[r];
        std::vector<cplx> g(tc.zeta.size());
        std::vector<double> dist(tc.zeta.size());
        parallel_for(tc.zeta.size(), workers, [&](std::size_t idx) {
            const auto lr = lift_g(F, T, D, static_cast<int>(r), tc.theta[idx / tc.n_phi], tc.zeta[idx]);
            g[idx] = lr.g;
            dist[idx] = lr.distance;
        });
        for (double v : dist) out.max_projection = std::max(out.max_projection, v / tube.eps);
        out.g.push_back(std::move(g));
    }
    if (out.max_projection > 10.0) {
        std::ostringstream os;
        os << "tube node projects " << out.max_projection << " eps away from the boundary";
        throw NumericalError("kernel", os.str());
    }
    return out;
}

std::vector<cplx> compute_G_single(const TubeField& gf, const TubeGrid& tube, const std::vector<KernelPoint>& kps,
                                   const HeferTriple& H, const HomPoly3& P, int d, const KernelOptions& opt,
                                   double* min_F, double* min_B) {
    std::size_t total = 0;
    for (const auto& c : tube.comps) total += c.zeta.size();
    std::vector<std::vector<cplx>> contrib(d, std::vector<cplx>(total));
    std::vector<double> nodeF(total), nodeB(total);
    const double dth = kTwoPi / tube.dims.n_theta;
    std::size_t offset = 0;
    for (std::size_t r = 0; r < tube.comps.size(); ++r) {
        const auto& tc = tube.comps[r];
        const double wgt = dth * (kTwoPi / tc.n_phi);
        parallel_for(tc.zeta.size(), opt.workers, [&](std::size_t idx) {
            const C3& z0 = tc.zeta[idx];
            const cplx x = z0[1] / z0[0];
            cplx acc = 0.0;
            double mf = std::numeric_limits<double>::infinity(), mb = mf;
            for (const auto& kp : kps) {
                const HopfPoles hp = hopf_poles(z0, kp);
                mf = std::min(mf, hp.min_F);
                mb = std::min(mb, hp.min_B);
                if (opt.psi == PsiMode::exact) {
                    if (std::abs(hp.c) >= 1.0 || std::abs(hp.lambda_F) <= 1.0) {
                        std::ostringstream os;
                        os << "barrier does not separate the Hopf circle: |c| " << std::abs(hp.c) << ", |lambda_F| "
                           << std::abs(hp.lambda_F);
                        throw NumericalError("kernel", os.str());
                    }
                    acc += psi_integral_exact(z0, kp, H, P);
                } else {
                    acc += psi_integral_trapezoid(z0, kp, H, P, tube.dims.n_psi, opt.psi_shift);
                }
            }
            const cplx base = gf.g[r][idx] * tc.jac[idx] * acc * wgt;
            cplx xk = 1.0;
            for (int k = 0; k < d; ++k) {
                contrib[k][offset + idx] = base * xk;
                xk *= x;
            }
            nodeF[offset + idx] = mf;
            nodeB[offset + idx] = mb;
        });
        offset += tc.zeta.size();
    }
    const cplx pref = static_cast<double>(opt.orientation) * 2.0 / std::pow(kTwoPi * kI, 3);
    std::vector<cplx> G(d);
    for (int k = 0; k < d; ++k) G[k] = pref * pairwise_sum(contrib[k]);
    if (min_F) *min_F = *std::min_element(nodeF.begin(), nodeF.end());
    if (min_B) *min_B = *std::min_element(nodeB.begin(), nodeB.end());
    return G;
}

void extrapolate(GMoments& M, int power) {
    if (power < 1) throw ValidationError("kernel", "extrapolation power must be positive");
    const std::size_t n = M.eps.size();
    if (n == 0) return;
    const std::size_t d = M.G[0].size();
    M.extrapolated.assign(d, 0.0);
    M.err.assign(d, 0.0);
    M.cauchy.clear();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += std::norm(M.G[i][k] - M.G[i + 1][k]);
        M.cauchy.push_back(std::sqrt(s));
    }
    M.monotone = true;
    for (std::size_t i = 0; i + 1 < M.cauchy.size(); ++i)
        if (M.cauchy[i + 1] > M.cauchy[i]) M.monotone = false;
    for (std::size_t k = 0; k < d; ++k) {
        // Neville tableau evaluated at eps = 0
        std::vector<cplx> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = M.G[i][k];
        cplx prev_order = t[n - 1];
        for (std::size_t j = 1; j < n; ++j) {
            prev_order = t[n - 1];
            for (std::size_t i = n - 1; i >= j; --i) {
                const double ea = std::pow(M.eps[i - j], power), eb = std::pow(M.eps[i], power);
                t[i] = (ea * t[i] - eb * t[i - 1]) / (ea - eb);
                if (i == j) break;
            }
        }
        M.extrapolated[k] = t[n - 1];
        M.err[k] = std::abs(t[n - 1] - prev_order);
        if (!M.monotone) {
            double spread = 0.0;
            for (std::size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(M.G[i][k] - t[n - 1]));
            M.err[k] = spread;
        }
    }
}

GMoments compute_G(const std::vector<TubeField>& fields, const std::vector<TubeGrid>& tubes, const IntersectionSet& S,
                   const HeferTriple& H, const HomPoly3& P, const KernelOptions& opt) {
    if (fields.size() != tubes.size() || tubes.empty()) throw ValidationError("kernel", "tube schedule is empty");
    GMoments M;
    M.min_F = M.min_B = std::numeric_limits<double>::infinity();
    const auto kps = kernel_points(S, opt.barrier);
    for (std::size_t i = 0; i < tubes.size(); ++i) {
        if (i > 0 && !(tubes[i].eps < tubes[i - 1].eps))
            throw ValidationError("kernel", "epsilon schedule must be strictly decreasing");
        double mf = 0.0, mb = 0.0;
        M.eps.push_back(tubes[i].eps);
        M.G.push_back(compute_G_single(fields[i], tubes[i], kps, H, P, S.size(), opt, &mf, &mb));
        M.min_F = std::min(M.min_F, mf);
        M.min_B = std::min(M.min_B, mb);
        M.max_projection = std::max(M.max_projection, fields[i].max_projection);
    }
    if (M.min_F < opt.guard || M.min_B < opt.guard) {
        std::ostringstream os;
        os << "kernel proximity below guard: min|F| " << M.min_F << ", min|B| " << M.min_B;
        throw NumericalError("kernel", os.str());
    }
    extrapolate(M, opt.extrap_power);
    return M;
}

VandermondeResult vandermonde_solve(const std::vector<cplx>& x, const std::vector<cplx>& G, double min_sep) {
    const std::size_t n1 = x.size();
    if (G.size() != n1 || n1 == 0) throw ValidationError("kernel", "Vandermonde sizes disagree");
    VandermondeResult out;
    std::vector<cplx> b = G;
    const std::size_t n = n1 - 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = n; i >= k + 1; --i) b[i] -= x[k] * b[i - 1];
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t i = kk + 1; i <= n; ++i) {
            const cplx den = x[i] - x[i - kk - 1];
            if (den == cplx(0.0)) throw NumericalError("kernel", "coincident Vandermonde nodes");
            b[i] /= den;
        }
        for (std::size_t i = kk; i < n; ++i) b[i] -= b[i + 1];
    }
    out.v = b;
    double rn = 0.0, gn = 0.0;
    for (std::size_t k = 0; k < n1; ++k) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n1; ++j) s += std::pow(x[j], static_cast<int>(k)) * out.v[j];
        rn += std::norm(s - G[k]);
        gn += std::norm(G[k]);
    }
    out.residual = gn > 0 ? std::sqrt(rn / gn) : std::sqrt(rn);
    double amp = 0.0;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n1; ++j) {
        double prod = 1.0;
        for (std::size_t i = 0; i < n1; ++i) {
            if (i == j) continue;
            prod *= (1.0 + std::abs(x[i])) / std::abs(x[j] - x[i]);
            sep = std::min(sep, std::abs(x[j] - x[i]));
        }
        amp = std::max(amp, prod);
    }
    out.amplification = amp;
    out.ill_conditioned = sep < min_sep;
    return out;
}

std::vector<PointResult> reconstruct_u(const CurveDomain& D, const IntersectionSet& S, const VandermondeResult& v,
                                       const CorrectionH& H, BarrierMode mode, Prefactor pref) {
    const int d = D.degree();
    const double c = pref == Prefactor::derived ? 0.5 : 1.0 / (d + 1);
    const auto kps = kernel_points(S, mode);
    std::vector<PointResult> out;
    for (int k = 0; k < S.size(); ++k) {
        PointResult p;
        p.k = k;
        p.w = S.points[k].z;
        p.kernel_lift = kps[k].lift;
        p.x = S.x[k];
        p.v = v.v[k];
        p.h = eval_h(H, p.w);
        p.u_rec = c * (p.kernel_lift[0] * p.v).real() + p.h;
        out.push_back(p);
    }
    return out;
}

}  // namespace harmrep
