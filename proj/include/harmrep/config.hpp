#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harmrep/harness.hpp"

namespace harmrep {

struct RunConfig {
    std::vector<Term3> curve;  // empty when the curve comes from data.scenario
    double radius = 2.0;
    std::vector<C3> reference_points;
    int n_theta = 256;
    std::vector<double> epsilons{0.04, 0.02, 0.01};
    GridDims grid;
    PsiMode psi = PsiMode::exact;
    int extrapolation_power = 2;
    std::uint64_t seed = 1;
    int max_retries = 64;
    BarrierMode barrier_kernel = BarrierMode::per_point;
    std::optional<double> min_inside_margin;  // scenario or 1e-3 when absent
    HMode hmode = HMode::automatic;
    Prefactor prefactor = Prefactor::derived;
    std::string scenario;
    std::vector<std::string> boundary_files;
    std::string connector_file;
    std::string out = "out";

    std::string canonical;  // normalized JSON with defaults filled
    std::uint64_t fingerprint = 0;
};

// Strict JSON: unknown keys, wrong types and violated preconditions raise
// ValidationError naming the field path (or line and column for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Recomputes canonical and fingerprint after fields were changed in place.
void canonicalize(RunConfig& c);

// FNV-1a over the canonical text.
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

HomPoly3 config_curve(const RunConfig& c);
PipelineOptions config_options(const RunConfig& c, int workers);

// Oracle of data.scenario, if any.
std::optional<Scenario> config_scenario(const RunConfig& c);

// Boundary data from data.scenario (analytic) or from the CSV files.
FieldProvider config_field(const RunConfig& c);

// CSV readers and writers for boundary and connector samples.
BoundaryField read_boundary_csv(const std::vector<std::string>& component_files, const std::string& connector_file);
void write_boundary_csv(const BoundaryField& F, const BoundaryTrace& T, const std::string& dir);

}  // namespace harmrep
