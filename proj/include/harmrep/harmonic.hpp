#pragma once

#include <string>
#include <vector>

#include "harmrep/geometry.hpp"

namespace harmrep {

struct ComponentSamples {
    std::vector<double> u;
    std::vector<cplx> p;  // pullback of du^(1,0) along theta
};

// Path from component 0's theta = 0 point to component `target`'s theta = 0 point.
// Sum over nodes of dudx * dx approximates the integral of du^(1,0).
struct Connector {
    int target = 0;
    int path = 0;
    std::vector<cplx> x, y, dx, dudx;
};

enum class Provenance { analytic, measured };

struct BoundaryField {
    std::vector<ComponentSamples> comps;
    std::vector<Connector> connectors;
    Provenance provenance = Provenance::analytic;
};

// Sample counts against the trace and spectral periodicity of p.
void validate_field(const BoundaryField& F, const BoundaryTrace& T);

struct Periods {
    std::vector<double> a;
    std::vector<double> imag;  // imaginary parts of the raw a_r
    double stokes = 0.0;       // |sum_r a_r|
    bool flagged = false;      // some |imag| > 1e-9
};

Periods period_a(const BoundaryField& F, const BoundaryTrace& T);

struct LogTerm {
    double c = 0.0;
    C3 l{};  // linear form l(z) = l0 z0 + l1 z1 + l2 z2
};

enum class HMode { paper, robust, automatic };

std::string to_string(HMode m);
HMode parse_hmode(const std::string& s);

struct CorrectionH {
    std::vector<LogTerm> terms;
    HMode mode = HMode::paper;           // mode of the accepted terms (paper or robust)
    double period_residual = 0.0;        // max_r |period of d(u-h)|
    std::vector<double> residuals;
    double paper_residual = -1.0;        // residual of the point-log terms when they were tried
    bool fallback = false;               // automatic mode switched to robust
    int pool_size = 0;
    std::string note;
};

double eval_h(const CorrectionH& H, const C3& z);
// d^(1,0)h applied to the tangent t at z.
cplx eval_dh(const CorrectionH& H, const C3& z, const C3& t);

// Period residuals (1/2 pi i) * integral of (p - dh) per component.
std::vector<double> h_period_residuals(const CorrectionH& H, const BoundaryField& F, const BoundaryTrace& T);

CorrectionH build_h(const CurveDomain& D, const BoundaryTrace& T, const BoundaryField& F, const Periods& P, HMode mode);

// True when every finite zero of the linear form l on the curve has rho > margin.
bool line_zeros_outside(const CurveDomain& D, const C3& l, double margin);

// Periods of dlog(l/z0) per component (columns of the robust period matrix).
std::vector<double> log_form_periods(const C3& l, const BoundaryTrace& T);

struct PrimitiveF {
    ProjectivePoint anchor;
    double anchor_value = 0.0;
    std::vector<int> n_cover, n_per;
    std::vector<std::vector<cplx>> f;       // values at trace samples
    std::vector<std::vector<cplx>> coef;    // periodic part, DFT order in the covering parameter
    std::vector<cplx> drift;                // mean of 2(p - dh), zero when f closes
    std::vector<cplx> offsets;              // f_r(0)
    std::vector<std::vector<cplx>> path_offsets;
    double max_re_drift = 0.0;
    double max_closure = 0.0;
    double path_spread = 0.0;

    cplx eval(int comp, double theta) const;
};

struct PrimitiveTolerances {
    double re_drift = 1e-6;
    double closure = 1e-8;
    double path_spread = 1e-8;
};

PrimitiveF primitive_f(const BoundaryField& F, const CorrectionH& H, const BoundaryTrace& T, const CurveDomain& D,
                       const PrimitiveTolerances& tol = {});

// Fiber-constant homogeneity (-1) extension: projects the chart point of zeta to the
// boundary point over the same x near theta_hint and returns f / zeta0.
struct LiftResult {
    cplx g;
    double theta;
    double distance;
};
LiftResult lift_g(const PrimitiveF& F, const BoundaryTrace& T, const CurveDomain& D, int comp, double theta_hint,
                  const C3& zeta);

// Default connector geometry (no data): hub, loops around branch points, return.
struct ConnectorPath {
    int target = 0;
    int path = 0;
    cplx hub;
    std::vector<cplx> x, y, dx;
    std::string word;
};

std::vector<ConnectorPath> default_connector_paths(const CurveDomain& D, const BoundaryTrace& T, int n_paths = 2);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace harmrep
