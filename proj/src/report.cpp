#include "harmrep/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "harmrep/errors.hpp"

namespace harmrep {

using json = nlohmann::json;

namespace {

json cj(cplx c) { return json::array({c.real(), c.imag()}); }

json c3j(const C3& z) { return json::array({cj(z[0]), cj(z[1]), cj(z[2])}); }

json cvec(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx c : v) a.push_back(cj(c));
    return a;
}

// Infinities (no separation to measure) are emitted as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string g17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json probe_diagnostics(const ProbeResult& pr) {
    json d;
    d["w"] = c3j(pr.S.w.z);
    d["R_vec"] = c3j(pr.S.R_vec);
    d["x_values"] = cvec(pr.S.x);
    d["min_root_separation"] = num(pr.S.min_root_separation);
    d["min_x_separation"] = num(pr.S.min_x_separation);
    d["inside_margin"] = num(pr.S.inside_margin);
    d["intersection_residual"] = pr.S.max_residual;
    json G = json::array();
    for (std::size_t i = 0; i < pr.M.eps.size(); ++i) G.push_back({{"epsilon", pr.M.eps[i]}, {"G", cvec(pr.M.G[i])}});
    d["moments"] = G;
    d["extrapolated"] = cvec(pr.M.extrapolated);
    d["extrapolation_error"] = pr.M.err;
    d["cauchy"] = pr.M.cauchy;
    d["monotone"] = pr.M.monotone;
    d["min_F"] = pr.M.min_F;
    d["min_B"] = pr.M.min_B;
    d["max_projection"] = pr.M.max_projection;
    d["vandermonde_residual"] = pr.V.residual;
    d["vandermonde_amplification"] = pr.V.amplification;
    d["ill_conditioned"] = pr.V.ill_conditioned;
    return d;
}

}  // namespace

std::string report_json(const ReportMeta& meta, const Prepared& prep, const std::vector<ProbeResult>& probes) {
    json r;
    r["fingerprint"] = meta.fingerprint;
    r["config"] = meta.config.empty() ? json(nullptr) : json::parse(meta.config);
    if (!meta.scenario.empty()) r["scenario"] = meta.scenario;

    json pts = json::array();
    double max_abs = 0.0, max_rel = 0.0;
    bool have_oracle = false;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (const auto& p : probes[i].points) {
            json e;
            e["probe"] = i;
            e["k"] = p.k;
            e["w"] = c3j(p.w);
            e["x"] = cj(p.x);
            e["y"] = cj(p.w[2] / p.w[0]);
            e["u_rec"] = p.u_rec;
            e["h"] = p.h;
            e["v"] = cj(p.v);
            if (p.u_oracle) {
                have_oracle = true;
                e["u_oracle"] = *p.u_oracle;
                e["abs_err"] = p.abs_err;
                e["rel_err"] = p.rel_err;
                max_abs = std::max(max_abs, p.abs_err);
                max_rel = std::max(max_rel, p.rel_err);
            }
            pts.push_back(e);
        }
    }
    r["points"] = pts;
    if (have_oracle) r["errors"] = {{"max_abs_err", max_abs}, {"max_rel_err", max_rel}};
    if (meta.passed) {
        json a{{"passed", *meta.passed}};
        if (meta.abs_tol >= 0) a["abs_tol"] = meta.abs_tol;
        if (meta.rel_tol >= 0) a["rel_tol"] = meta.rel_tol;
        r["acceptance"] = a;
    }

    json d;
    {
        json t;
        t["components"] = prep.T.comps.size();
        json cov = json::array();
        for (const auto& c : prep.T.comps) cov.push_back(c.n_cover);
        t["n_cover"] = cov;
        t["monodromy"] = prep.T.monodromy;
        t["n_theta"] = prep.T.n_theta;
        t["min_sheet_separation"] = num(prep.T.min_sheet_separation);
        t["max_residual"] = prep.T.max_residual;
        t["max_rho"] = prep.T.max_rho;
        d["trace"] = t;
    }
    d["periods"] = {{"a", prep.periods.a},
                    {"imag", prep.periods.imag},
                    {"stokes", prep.periods.stokes},
                    {"flagged", prep.periods.flagged}};
    {
        json h;
        h["mode"] = to_string(prep.h.mode);
        h["period_residual"] = prep.h.period_residual;
        h["residuals"] = prep.h.residuals;
        h["paper_residual"] = prep.h.paper_residual < 0 ? json(nullptr) : json(prep.h.paper_residual);
        h["fallback"] = prep.h.fallback;
        h["pool_size"] = prep.h.pool_size;
        h["note"] = prep.h.note;
        json terms = json::array();
        for (const auto& t : prep.h.terms) terms.push_back({{"c", t.c}, {"l", c3j(t.l)}});
        h["terms"] = terms;
        d["h"] = h;
    }
    d["primitive"] = {{"max_re_drift", prep.F.max_re_drift},
                      {"max_closure", prep.F.max_closure},
                      {"connector_spread", prep.F.path_spread}};
    json tubes = json::array();
    for (std::size_t i = 0; i < prep.tubes.size(); ++i) {
        const auto& t = prep.tubes[i];
        tubes.push_back({{"epsilon", t.eps},
                         {"nodes", t.node_count()},
                         {"grid", {t.dims.n_theta, t.dims.n_phi, t.dims.n_psi}},
                         {"max_sphere_residual", t.max_sphere_residual},
                         {"max_rho_residual", t.max_rho_residual},
                         {"max_p_residual", t.max_p_residual},
                         {"max_newton_iterations", t.max_newton_iterations},
                         {"max_projection", prep.fields[i].max_projection}});
    }
    d["tubes"] = tubes;
    json pd = json::array();
    for (const auto& pr : probes) pd.push_back(probe_diagnostics(pr));
    d["probes"] = pd;
    r["diagnostics"] = d;
    return r.dump(2) + "\n";
}

std::string convergence_csv(const std::vector<ProbeResult>& probes) {
    std::ostringstream os;
    os << "probe,epsilon,k,G_re,G_im,err_est\n";
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto& M = probes[p].M;
        for (std::size_t i = 0; i < M.eps.size(); ++i)
            for (std::size_t k = 0; k < M.G[i].size(); ++k)
                os << p << ',' << g17(M.eps[i]) << ',' << k << ',' << g17(M.G[i][k].real()) << ','
                   << g17(M.G[i][k].imag()) << ",\n";
        for (std::size_t k = 0; k < M.extrapolated.size(); ++k)
            os << p << ",0," << k << ',' << g17(M.extrapolated[k].real()) << ',' << g17(M.extrapolated[k].imag())
               << ',' << g17(M.err[k]) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const SweepResult& s) {
    std::ostringstream os;
    os << "kind,epsilon,n_theta,n_phi,n_psi,psi,k,u_rec,u_oracle,abs_err\n";
    for (const auto& r : s.rows)
        os << r.kind << ',' << g17(r.eps) << ',' << r.grid.n_theta << ',' << r.grid.n_phi << ',' << r.grid.n_psi << ','
           << r.psi << ',' << r.k << ',' << g17(r.u_rec) << ',' << g17(r.u_oracle) << ',' << g17(r.abs_err) << '\n';
    return os.str();
}

std::string trace_csv(const BoundaryTrace& T) {
    std::ostringstream os;
    os << "component,theta,x_re,x_im,y_re,y_im\n";
    for (std::size_t r = 0; r < T.comps.size(); ++r) {
        const auto& c = T.comps[r];
        for (std::size_t i = 0; i < c.size(); ++i)
            os << r << ',' << g17(c.theta[i]) << ',' << g17(c.x[i].real()) << ',' << g17(c.x[i].imag()) << ','
               << g17(c.y[i].real()) << ',' << g17(c.y[i].imag()) << '\n';
    }
    return os.str();
}

std::string hefer_table(const HeferTriple& H) {
    std::ostringstream os;
    os << "# swap order " << H.order[0] << ' ' << H.order[1] << ' ' << H.order[2] << "\n";
    os << "i  zeta0 zeta1 zeta2  z0 z1 z2  coefficient\n";
    for (int i = 0; i < 3; ++i)
        for (const auto& [e, c] : H.Q[i].coeffs())
            os << i << "  " << e[0] << ' ' << e[1] << ' ' << e[2] << "  " << e[3] << ' ' << e[4] << ' ' << e[5] << "  "
               << g17(c.real()) << (c.imag() < 0 ? " - " : " + ") << g17(std::abs(c.imag())) << "i\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("io", "cannot write " + path);
    out << text;
}

}  // namespace harmrep
