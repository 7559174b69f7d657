#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harmrep/kernel.hpp"

namespace harmrep {

// c * x^a * y^b / (x - pole)^m in chart coordinates.
struct RationalTerm {
    cplx c{1.0};
    int a = 0;
    int b = 0;
    cplx pole{0.0};
    int m = 0;
};

// c * log|l(z)/z0|^2
struct LogGenerator {
    double c = 1.0;
    C3 l{};
};

enum class GeneratorKind { re_rational, log_singular, mixture };

struct Oracle {
    HomPoly3 P;
    std::vector<RationalTerm> rational;
    std::vector<LogGenerator> logs;

    GeneratorKind kind() const;
    cplx holo(cplx x, cplx y) const;  // rational part F
    double u(cplx x, cplx y) const;
    // du^(1,0) = dudx dx along the curve
    cplx dudx(cplx x, cplx y) const;
};

struct Probe {
    cplx x;
    int sheet = 0;
};

struct Scenario {
    std::string name;
    std::string description;
    HomPoly3 P;
    double R = 2.0;
    Oracle oracle;
    std::vector<Probe> probes;
    double barrier_inside_margin = 0.1;  // admissibility of companion points
    bool paper_h_expected_to_fail = false;
    double abs_tol = -1.0;  // acceptance thresholds (negative: unused)
    double rel_tol = -1.0;
};

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

// Chart point of the probe on the requested sheet of the fiber.
ProjectivePoint resolve_probe(const CurveDomain& D, const Probe& p);

// Checks that the oracle singularities avoid the closed domain and that probes keep
// insideMargin >= 0.2 R; throws ValidationError otherwise.
void validate_scenario(const Scenario& s);

// Discrete Laplacian of u in the local chart x at the point (x, y).
double laplacian_check(const Oracle& o, cplx x, cplx y, double h = 1e-2);

BoundaryField sample_field(const Oracle& o, const CurveDomain& D, const BoundaryTrace& T);

struct PipelineOptions {
    int n_theta_trace = 256;
    std::vector<double> eps{0.04, 0.02, 0.01};
    GridDims grid;
    std::uint64_t seed = 1;
    int max_retries = 64;
    HMode hmode = HMode::automatic;
    KernelOptions kernel;
    Prefactor prefactor = Prefactor::derived;
    std::array<int, 3> order{0, 1, 2};
    double barrier_inside_margin = 1e-3;
    std::vector<C3> reference_points;
    double rho_extension = 0.0;
};

using FieldProvider = std::function<BoundaryField(const CurveDomain&, const BoundaryTrace&)>;

struct Prepared {
    CurveDomain D;
    BoundaryTrace T;
    HeferTriple H;
    BoundaryField field;
    Periods periods;
    CorrectionH h;
    PrimitiveF F;
    std::vector<TubeGrid> tubes;
    std::vector<TubeField> fields;
};

// trace -> periods -> h -> f -> tubes
Prepared prepare(const HomPoly3& P, double R, const FieldProvider& provider, const PipelineOptions& opt);

struct ProbeResult {
    IntersectionSet S;
    GMoments M;
    VandermondeResult V;
    std::vector<PointResult> points;
};

ProbeResult reconstruct_at(const Prepared& prep, const ProjectivePoint& w, const PipelineOptions& opt);

struct ScenarioReport {
    std::string name;
    std::vector<ProbeResult> probes;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    bool passed = false;
};

// Fills oracle values and errors into the report points.
void attach_oracle(const Oracle& o, ProbeResult& pr);

ScenarioReport run_scenario(const Scenario& s, const PipelineOptions& opt, Prepared* keep = nullptr);

PipelineOptions scenario_options(const Scenario& s, PipelineOptions base = {});

struct SweepRow {
    std::string kind;
    double eps = 0.0;
    GridDims grid;
    std::string psi;
    int k = 0;
    double u_rec = 0.0;
    double u_oracle = 0.0;
    double abs_err = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double eps_slope = 0.0;       // log-log slope of the pre-extrapolation error
    double phi_saturation = 0.0;  // |G(n_phi) - G(2 n_phi)| / |G| at the default grid
    double psi_trapezoid_gap = 0.0;  // |trapezoid(n_psi) - exact| / |G| at the default grid
    double coarse_error = 0.0;    // 1x1x1 grid
};

SweepResult convergence_study(const Scenario& s, const PipelineOptions& opt);

struct CalibrationReport {
    int sign = 0;
    double err_plus = 0.0;     // max abs error over u = Re(x), Re(x^2) with sign +1
    double err_minus = 0.0;
    double err_second = 0.0;   // u = Re(x^2) with the selected sign
    cplx constant{0.0};        // fitted multiplier of the 1/(d+1) constant
    double constant_err = 0.0; // |constant - 1|
    bool matches_builtin = false;
    bool passed = false;
};

CalibrationReport calibrate(const PipelineOptions& base);

}  // namespace harmrep
