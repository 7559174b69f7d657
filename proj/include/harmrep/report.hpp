#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmrep/config.hpp"

namespace harmrep {

struct ReportMeta {
    std::string fingerprint;
    std::string config;  // canonical config JSON text
    std::string scenario;
    std::optional<bool> passed;
    double abs_tol = -1.0;
    double rel_tol = -1.0;
};

// Self-contained reconstruction report; byte-stable for fixed inputs.
std::string report_json(const ReportMeta& meta, const Prepared& prep, const std::vector<ProbeResult>& probes);

// epsilon,k,G_re,G_im,err_est per probe.
std::string convergence_csv(const std::vector<ProbeResult>& probes);

std::string sweep_csv(const SweepResult& s);

std::string trace_csv(const BoundaryTrace& T);

std::string hefer_table(const HeferTriple& H);

void write_text(const std::string& path, const std::string& text);

}  // namespace harmrep
