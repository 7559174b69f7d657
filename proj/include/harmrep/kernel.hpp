#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmrep/harmonic.hpp"

namespace harmrep {

// Orientation of the (theta, phi, psi) parametrization of the tube relative to the
// residue convention; fixed by calibrate on the line.
inline constexpr int kOrientationSign = -1;

struct GridDims {
    int n_theta = 256;  // per covering
    int n_phi = 32;
    int n_psi = 32;
};

// How the Hopf-phase direction is integrated: exactly by residues of the rational
// function of e^{i psi}, or by the uniform trapezoid rule with n_psi nodes.
enum class PsiMode { exact, trapezoid };

// per_point: term j uses the barrier R = conj(w_j) with the unit lift of w_j.
// shared: all terms use the line form R_vec and the plane-normalized lifts.
enum class BarrierMode { per_point, shared };

// derived: u = Re(w0 v)/2 + h.  paper: u = Re(w0 v)/(d+1) + h.
enum class Prefactor { derived, paper };

std::string to_string(PsiMode m);
std::string to_string(BarrierMode m);
std::string to_string(Prefactor m);

struct TubeComponent {
    int n_cover = 1;
    int n_theta = 0;  // total theta nodes, n_cover * dims.n_theta
    int n_phi = 0;
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<C3> zeta;  // psi = 0 section, index i * n_phi + l
    std::vector<cplx> jac; // det[d zeta/d theta, d zeta/d phi, zeta]
};

struct TubeGrid {
    double eps = 0.0;
    GridDims dims;
    std::vector<TubeComponent> comps;
    double max_sphere_residual = 0.0;
    double max_rho_residual = 0.0;
    double max_p_residual = 0.0;  // |P - eps e^{i phi}| / eps
    int max_newton_iterations = 0;

    std::size_t node_count() const;
};

struct NodeSolve {
    C3 zeta;
    int iterations = 0;  // updates until the residual met tolerance
    bool converged = false;
};

// Newton solve of the four real tube constraints from the guess built at (theta, phi).
NodeSolve solve_tube_node(const CurveDomain& D, const TraceComponent& c, double theta, double phi, double eps);

// Jacobian det[zeta_theta, zeta_phi, zeta] by Richardson-combined central differences
// with base steps (h_theta, h_phi).
cplx tube_jacobian(const CurveDomain& D, const TraceComponent& c, double theta, double phi, double eps, double h_theta,
                   double h_phi);

TubeGrid build_tube(const CurveDomain& D, const BoundaryTrace& T, double eps, const GridDims& dims, int workers = 1);

struct KernelPoint {
    C3 lift;
    C3 R;
};

std::vector<KernelPoint> kernel_points(const IntersectionSet& S, BarrierMode mode);

// det[Q(zeta, w), R, zbar] / (P(zeta) F(w, zeta) B(zeta, w)).
cplx kernel_det(const C3& zeta, const C3& zbar, const C3& w, const HeferTriple& H, const HomPoly3& P, const C3& R);

// Literal determinant of the three quotient columns.
cplx kernel_det_literal(const C3& zeta, const C3& zbar, const C3& w, const HeferTriple& H, const HomPoly3& P,
                        const C3& R);

struct HopfPoles {
    cplx lambda_F;  // zero of F along the Hopf circle through zeta0
    cplx c;         // zero of B
    double min_F;   // min over |lambda| = 1 of |F|
    double min_B;
};

HopfPoles hopf_poles(const C3& zeta0, const KernelPoint& kp);

// Integral over psi in [0, 2 pi) of K(e^{i psi} zeta0) * (e^{i psi})^2 * i e^{i psi}, i.e. the
// psi-integral of g x^k K J divided by g(zeta0) x^k D, evaluated by residues.
cplx psi_integral_exact(const C3& zeta0, const KernelPoint& kp, const HeferTriple& H, const HomPoly3& P);

// Same quantity by the trapezoid rule with n nodes shifted by delta.
cplx psi_integral_trapezoid(const C3& zeta0, const KernelPoint& kp, const HeferTriple& H, const HomPoly3& P, int n,
                            double delta = 0.0);

struct KernelOptions {
    PsiMode psi = PsiMode::exact;
    BarrierMode barrier = BarrierMode::per_point;
    int orientation = kOrientationSign;
    double psi_shift = 0.0;
    double guard = 1e-3;
    int workers = 1;
    // eps-extrapolation runs in the variable eps^power (1: polynomial in eps)
    int extrap_power = 2;
};

struct GMoments {
    std::vector<double> eps;
    std::vector<std::vector<cplx>> G;  // per epsilon, per k
    std::vector<cplx> extrapolated;
    std::vector<double> err;
    std::vector<double> cauchy;        // |G(eps_i) - G(eps_{i+1})|
    bool monotone = true;
    double min_F = 0.0;
    double min_B = 0.0;
    double max_projection = 0.0;       // max lift_g projection distance / eps
};

// g-values at the tube nodes for one epsilon; reused across probes.
struct TubeField {
    std::vector<std::vector<cplx>> g;  // per component, per node
    double max_projection = 0.0;
};

TubeField lift_on_tube(const PrimitiveF& F, const BoundaryTrace& T, const CurveDomain& D, const TubeGrid& tube,
                       int workers = 1);

// Moments for one tube.
std::vector<cplx> compute_G_single(const TubeField& gf, const TubeGrid& tube, const std::vector<KernelPoint>& kps,
                                   const HeferTriple& H, const HomPoly3& P, int d, const KernelOptions& opt,
                                   double* min_F = nullptr, double* min_B = nullptr);

GMoments compute_G(const std::vector<TubeField>& fields, const std::vector<TubeGrid>& tubes, const IntersectionSet& S,
                   const HeferTriple& H, const HomPoly3& P, const KernelOptions& opt);

// Neville extrapolation to eps = 0 through all given points in the variable eps^power;
// err from the last two orders.
void extrapolate(GMoments& M, int power = 2);

struct VandermondeResult {
    std::vector<cplx> v;
    double residual = 0.0;       // |A v - G| / |G|
    double amplification = 0.0;  // bound on error amplification
    bool ill_conditioned = false;
};

VandermondeResult vandermonde_solve(const std::vector<cplx>& x, const std::vector<cplx>& G, double min_sep = 1e-3);

struct PointResult {
    int k = 0;
    C3 w{};            // plane-normalized lift
    C3 kernel_lift{};  // lift entering the kernel term
    cplx x;
    cplx v;
    double h = 0.0;
    double u_rec = 0.0;
    std::optional<double> u_oracle;
    double abs_err = 0.0;
    double rel_err = 0.0;
};

std::vector<PointResult> reconstruct_u(const CurveDomain& D, const IntersectionSet& S, const VandermondeResult& v,
                                       const CorrectionH& H, BarrierMode mode, Prefactor pref);

}  // namespace harmrep
