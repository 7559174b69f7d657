#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harmrep/algebra.hpp"

namespace harmrep {

enum class LiftTag { chart, sphere, plane };

struct ProjectivePoint {
    C3 z{};
    LiftTag tag = LiftTag::sphere;

    static ProjectivePoint chart(cplx x, cplx y);
    static ProjectivePoint sphere(const C3& z);
    cplx x() const { return z[1] / z[0]; }
    cplx y() const { return z[2] / z[0]; }
};

struct CurveDomain {
    HomPoly3 P;
    double R = 2.0;
    std::vector<ProjectivePoint> infinity;   // z0 = 0, counted with multiplicity
    std::vector<ProjectivePoint> reference;  // one per boundary component, chart tag
    // kappa: the tube uses rho + kappa |P|^2 / |z|^(2d), equal to rho on the curve
    double rho_extension = 0.0;

    int degree() const { return P.degree(); }
};

// Validates P (nonzero, degree >= 1, z0 = 0 not a component) and R > 0.
CurveDomain make_domain(const HomPoly3& P, double R);

std::vector<ProjectivePoint> infinity_points(const HomPoly3& P);

struct Fiber {
    cplx x;
    std::vector<cplx> y;  // sorted by (real, imag)
    int expected = 0;     // d
    bool degenerate = false;
    bool branch = false;
    double min_separation = 0.0;
};

Fiber fiber_over_x(const CurveDomain& D, cplx x);

// Derivative of the local branch y(x) at the chart point (1, x, y).
cplx dy_dx(const HomPoly3& P, cplx x, cplx y);

// Newton polish of y on the fiber over x.
cplx newton_y(const HomPoly3& P, cplx x, cplx y);

// Continues the root y0 over xs[0] along the polyline xs by nearest-root matching,
// subdividing steps that would be ambiguous. Returns y at every xs[i].
std::vector<cplx> continue_along(const CurveDomain& D, const std::vector<cplx>& xs, cplx y0);

struct TraceComponent {
    int n_cover = 1;
    int n_per_cover = 0;
    std::vector<int> sheets;  // fiber indices at theta = 0 visited in order
    std::vector<double> theta;
    std::vector<cplx> x, y;
    std::vector<C3> lift, tangent;  // sphere lift and its theta derivative
    std::vector<double> arc;
    double closure_error = 0.0;

    std::size_t size() const { return theta.size(); }
    double period() const { return kTwoPi * n_cover; }
};

struct BoundaryTrace {
    double R = 0.0;
    int n_theta = 0;
    std::vector<int> monodromy;
    std::vector<TraceComponent> comps;
    double min_sheet_separation = 0.0;
    double max_residual = 0.0;  // max |P| over samples
    double max_rho = 0.0;       // max |rho| over sample lifts
};

BoundaryTrace trace_boundary(const CurveDomain& D, int n_theta);

// Curve point of the component at parameter theta (any real value), Newton-solved
// from the nearest stored sample.
cplx boundary_y(const CurveDomain& D, const TraceComponent& c, double theta);

// Index of the component and covering parameter of the boundary point (x, y), |x| = R.
struct BoundaryLocation {
    int comp = -1;
    double theta = 0.0;
    double distance = 0.0;
};
BoundaryLocation locate_on_boundary(const BoundaryTrace& T, cplx x, cplx y);

// Default reference points: continue component r's sample at theta = 2 pi r / m
// radially out to |x| = 2R. User-supplied chart points are validated and matched.
void assign_reference_points(CurveDomain& D, const BoundaryTrace& T, const std::vector<C3>& user = {});

// Branch points of the projection x (roots of the y-discriminant).
std::vector<cplx> branch_points(const CurveDomain& D);

struct IntersectionSet {
    ProjectivePoint w;
    C3 R_vec{};
    C3 v{};
    std::vector<ProjectivePoint> points;  // plane tag, points[0] = w
    std::vector<cplx> x;
    double min_root_separation = 0.0;
    double min_x_separation = 0.0;
    double inside_margin = 0.0;
    double max_residual = 0.0;
    bool degree_drop = false;

    int size() const { return static_cast<int>(points.size()); }
};

// Line through w with direction v (v is projected Hermitian-orthogonal to w).
IntersectionSet intersect_line_dir(const CurveDomain& D, const ProjectivePoint& w, const C3& v);

// Line {R_vec . zeta = 0}; requires R_vec . w = 0.
IntersectionSet intersect_line(const CurveDomain& D, const ProjectivePoint& w, const C3& R_vec);

struct BarrierThresholds {
    double root_separation = 1e-3;
    double x_separation = 1e-3;
    double inside_margin = 1e-3;
    int max_retries = 64;
};

// Empty string when admissible, otherwise the first failed condition.
std::string barrier_failure(const IntersectionSet& S, const BarrierThresholds& th);

IntersectionSet choose_barrier(const CurveDomain& D, const ProjectivePoint& w, std::uint64_t seed,
                               const BarrierThresholds& th = {});

}  // namespace harmrep
