#include "harmrep/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmrep/config.hpp"
#include "harmrep/errors.hpp"
#include "harmrep/report.hpp"

namespace harmrep {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("cli", what + ": not a number '" + s + "'");
}

Probe parse_point(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2 && parts.size() != 3) throw ValidationError("cli", "--point expects x_re,x_im[,sheet]");
    Probe p;
    p.x = {to_double(parts[0], "--point"), to_double(parts[1], "--point")};
    if (parts.size() == 3) p.sheet = static_cast<int>(to_double(parts[2], "--point"));
    return p;
}

GridDims parse_grid(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 3) throw ValidationError("cli", "--grid expects NthetaxNphixNpsi");
    int v[3];
    for (int k = 0; k < 3; ++k) {
        const double d = to_double(parts[k], "--grid");
        if (d < 1 || d > 4096 || d != static_cast<int>(d)) throw ValidationError("cli", "--grid sizes must lie in [1, 4096]");
        v[k] = static_cast<int>(d);
    }
    return {v[0], v[1], v[2]};
}

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) {
        const double e = to_double(p, "--epsilons");
        if (!(e > 0.0) || e > 0.1) throw ValidationError("cli", "--epsilons values must lie in (0, 0.1]");
        if (!out.empty() && !(e < out.back())) throw ValidationError("cli", "--epsilons must be strictly decreasing");
        out.push_back(e);
    }
    if (out.empty()) throw ValidationError("cli", "--epsilons is empty");
    return out;
}

struct Overrides {
    std::string epsilons, grid, hmode, psi;
    std::int64_t seed = -1;

    void add(CLI::App* a) {
        a->add_option("--epsilons", epsilons, "decreasing epsilon schedule, comma separated");
        a->add_option("--grid", grid, "tube grid NthetaxNphixNpsi");
        a->add_option("--seed", seed, "barrier seed")->check(CLI::NonNegativeNumber);
        a->add_option("--h-mode", hmode, "paper, robust or auto")->check(CLI::IsMember({"paper", "robust", "auto"}));
        a->add_option("--psi", psi, "exact or trapezoid")->check(CLI::IsMember({"exact", "trapezoid"}));
    }

    void apply(RunConfig& c) const {
        if (!epsilons.empty()) c.epsilons = parse_eps(epsilons);
        if (!grid.empty()) c.grid = parse_grid(grid);
        if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
        if (!hmode.empty()) c.hmode = parse_hmode(hmode);
        if (!psi.empty()) c.psi = psi == "exact" ? PsiMode::exact : PsiMode::trapezoid;
        canonicalize(c);
    }
};

std::string cstr(cplx c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", c.real(), c.imag());
    return buf;
}

void print_points(const std::vector<ProbeResult>& probes) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (const auto& p : probes[i].points) {
            std::printf("probe %zu  k %d  x %-26s u_rec % .12f", i, p.k, cstr(p.x).c_str(), p.u_rec);
            if (p.u_oracle) std::printf("  u % .12f  abs %.2e  rel %.2e", *p.u_oracle, p.abs_err, p.rel_err);
            std::printf("\n");
        }
    }
}

ReportMeta meta_of(const RunConfig& c) {
    ReportMeta m;
    m.fingerprint = hex64(c.fingerprint);
    m.config = c.canonical;
    m.scenario = c.scenario;
    return m;
}

int run_reconstruct(const RunConfig& cfg, std::vector<Probe> points, int workers, const std::string& out_path,
                    const std::string& conv_path) {
    const auto scen = config_scenario(cfg);
    if (points.empty()) {
        if (!scen) throw ValidationError("cli", "no --point given and no scenario probes");
        points = scen->probes;
    }
    const PipelineOptions opt = config_options(cfg, workers);
    const Prepared prep = prepare(config_curve(cfg), cfg.radius, config_field(cfg), opt);
    std::vector<ProbeResult> results;
    for (const auto& p : points) {
        ProbeResult pr = reconstruct_at(prep, resolve_probe(prep.D, p), opt);
        if (scen) attach_oracle(scen->oracle, pr);
        results.push_back(std::move(pr));
    }
    ReportMeta meta = meta_of(cfg);
    int status = 0;
    if (scen) {
        double ma = 0.0, mr = 0.0;
        for (const auto& pr : results)
            for (const auto& p : pr.points) {
                ma = std::max(ma, p.abs_err);
                mr = std::max(mr, p.rel_err);
            }
        const bool ok = (scen->abs_tol < 0 || ma <= scen->abs_tol) && (scen->rel_tol < 0 || mr <= scen->rel_tol);
        meta.passed = ok;
        meta.abs_tol = scen->abs_tol;
        meta.rel_tol = scen->rel_tol;
        if (!ok) status = static_cast<int>(ExitCode::numerical);
    }
    write_text(out_path, report_json(meta, prep, results));
    if (!conv_path.empty()) write_text(conv_path, convergence_csv(results));
    print_points(results);
    if (!prep.h.note.empty()) std::printf("h: %s\n", prep.h.note.c_str());
    std::printf("report %s (fingerprint %s)\n", out_path.c_str(), meta.fingerprint.c_str());
    if (meta.passed) std::printf("acceptance: %s\n", *meta.passed ? "pass" : "FAIL");
    return status;
}

RunConfig scenario_config(const std::string& name) {
    nlohmann::json j;
    j["data"]["scenario"] = name;
    return parse_config(j.dump());
}

}  // namespace

int dispatch(int argc, char** argv) {
    CLI::App app{"Reconstruction of harmonic functions on plane algebraic curves from boundary data"};
    app.require_subcommand(1);
    int workers = 1;
    app.add_option("--workers", workers, "worker threads for tube stages")->check(CLI::Range(1, 256));
    std::function<int()> action;

    // hefer
    auto* hefer = app.add_subcommand("hefer", "print the Hefer factors Q^i and check the identity");
    std::string hefer_cfg;
    int hefer_pairs = 10000;
    hefer->add_option("--config", hefer_cfg, "config file")->required();
    hefer->add_option("--pairs", hefer_pairs, "random pairs for the identity check")->check(CLI::Range(1, 10000000));
    hefer->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(hefer_cfg);
            const HomPoly3 P = config_curve(cfg);
            const HeferTriple H = hefer_decompose(P);
            std::fputs(hefer_table(H).c_str(), stdout);
            const HeferCheck chk = check_hefer(P, H, hefer_pairs);
            std::printf("identity residual %.3e  homogeneity residual %.3e  (%d pairs)\n", chk.identity,
                        chk.homogeneity, hefer_pairs);
            return chk.identity <= 1e-12 && chk.homogeneity <= 1e-12 ? 0 : static_cast<int>(ExitCode::numerical);
        };
    });

    // trace
    auto* trace = app.add_subcommand("trace", "trace the boundary circle and report the monodromy");
    std::string trace_cfg, trace_csv_path;
    trace->add_option("--config", trace_cfg, "config file")->required();
    trace->add_option("--csv", trace_csv_path, "write the traced samples");
    trace->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(trace_cfg);
            CurveDomain D = make_domain(config_curve(cfg), cfg.radius);
            const BoundaryTrace T = trace_boundary(D, cfg.n_theta);
            assign_reference_points(D, T, cfg.reference_points);
            std::printf("degree %d  radius %g  components %zu\n", D.degree(), D.R, T.comps.size());
            std::printf("monodromy");
            for (int s : T.monodromy) std::printf(" %d", s);
            std::printf("\n");
            for (std::size_t r = 0; r < T.comps.size(); ++r)
                std::printf("component %zu  n_cover %d  reference x %s  closure %.2e\n", r, T.comps[r].n_cover,
                            cstr(D.reference[r].x()).c_str(), T.comps[r].closure_error);
            std::printf("min sheet separation %.3e  max |P| %.2e  max |rho| %.2e\n", T.min_sheet_separation,
                        T.max_residual, T.max_rho);
            if (!trace_csv_path.empty()) write_text(trace_csv_path, trace_csv(T));
            return 0;
        };
    });

    // periods
    auto* periods = app.add_subcommand("periods", "periods a_r, correction h and the primitive f");
    std::string periods_cfg;
    periods->add_option("--config", periods_cfg, "config file")->required();
    periods->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(periods_cfg);
            CurveDomain D = make_domain(config_curve(cfg), cfg.radius);
            const BoundaryTrace T = trace_boundary(D, cfg.n_theta);
            assign_reference_points(D, T, cfg.reference_points);
            const BoundaryField F = config_field(cfg)(D, T);
            const Periods per = period_a(F, T);
            for (std::size_t r = 0; r < per.a.size(); ++r)
                std::printf("a_%zu = % .12f  (imag % .2e)\n", r, per.a[r], per.imag[r]);
            std::printf("stokes |sum a_r| %.2e%s\n", per.stokes, per.flagged ? "  [flagged: complex periods]" : "");
            const CorrectionH h = build_h(D, T, F, per, cfg.hmode);
            std::printf("h mode %s  period residual %.3e  terms %zu\n", to_string(h.mode).c_str(), h.period_residual,
                        h.terms.size());
            if (!h.note.empty()) std::printf("h: %s\n", h.note.c_str());
            const PrimitiveF f = primitive_f(F, h, T, D);
            std::printf("primitive: Re f drift %.2e  closure %.2e  connector spread %.2e\n", f.max_re_drift,
                        f.max_closure, f.path_spread);
            return 0;
        };
    });

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "reconstruct u at points of the curve");
    std::string rec_cfg, rec_out, rec_conv;
    std::vector<std::string> rec_points;
    Overrides rec_over;
    rec->add_option("--config", rec_cfg, "config file")->required();
    rec->add_option("--point", rec_points, "x_re,x_im[,sheet]; repeatable");
    rec->add_option("--out", rec_out, "report path (default <io.out>/report.json)");
    rec->add_option("--convergence", rec_conv, "convergence CSV path (default next to the report)");
    rec_over.add(rec);
    rec->callback([&] {
        action = [&] {
            RunConfig cfg = load_config(rec_cfg);
            rec_over.apply(cfg);
            std::vector<Probe> pts;
            for (const auto& s : rec_points) pts.push_back(parse_point(s));
            const std::string out = rec_out.empty() ? cfg.out + "/report.json" : rec_out;
            std::string conv = rec_conv;
            if (conv.empty()) {
                const auto parent = std::filesystem::path(out).parent_path();
                conv = (parent.empty() ? std::filesystem::path("convergence.csv") : parent / "convergence.csv").string();
            }
            return run_reconstruct(cfg, pts, workers, out, conv);
        };
    });

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "orientation sign and constant check on the line");
    std::string cal_out = "out/calibration.json";
    cal->add_option("--out", cal_out, "calibration record");
    cal->callback([&] {
        action = [&] {
            PipelineOptions base;
            base.kernel.workers = workers;
            const CalibrationReport c = calibrate(base);
            nlohmann::json j;
            j["sign"] = c.sign;
            j["builtin_sign"] = kOrientationSign;
            j["err_plus"] = c.err_plus;
            j["err_minus"] = c.err_minus;
            j["err_second"] = c.err_second;
            j["constant"] = {c.constant.real(), c.constant.imag()};
            j["constant_err"] = c.constant_err;
            j["matches_builtin"] = c.matches_builtin;
            j["passed"] = c.passed;
            write_text(cal_out, j.dump(2) + "\n");
            std::printf("sign +1: max err %.3e\nsign -1: max err %.3e\n", c.err_plus, c.err_minus);
            std::printf("selected sign %+d (built in %+d)\n", c.sign, kOrientationSign);
            std::printf("constant %s  |constant - 1| %.3e\n", cstr(c.constant).c_str(), c.constant_err);
            std::printf("calibration %s, written to %s\n", c.passed && c.matches_builtin ? "pass" : "FAIL",
                        cal_out.c_str());
            return c.passed && c.matches_builtin ? 0 : static_cast<int>(ExitCode::convention);
        };
    });

    // scenario
    auto* scen = app.add_subcommand("scenario", "built-in scenarios with exact oracles");
    scen->require_subcommand(1);
    std::string out_dir = "out";
    scen->add_option("--out-dir", out_dir, "output root")->capture_default_str();

    auto* s_list = scen->add_subcommand("list", "list the registry");
    s_list->callback([&] {
        action = [&] {
            for (const auto& n : scenario_names()) std::printf("%-14s %s\n", n.c_str(), make_scenario(n).description.c_str());
            return 0;
        };
    });

    auto* s_run = scen->add_subcommand("run", "run a scenario end to end");
    std::string run_name;
    Overrides run_over;
    s_run->add_option("name", run_name, "scenario name")->required();
    run_over.add(s_run);
    s_run->callback([&] {
        action = [&] {
            RunConfig cfg = scenario_config(run_name);
            cfg.out = out_dir + "/" + run_name;
            run_over.apply(cfg);
            return run_reconstruct(cfg, {}, workers, cfg.out + "/report.json", cfg.out + "/convergence.csv");
        };
    });

    auto* s_sweep = scen->add_subcommand("sweep", "convergence study");
    std::string sweep_name;
    Overrides sweep_over;
    s_sweep->add_option("name", sweep_name, "scenario name")->required();
    sweep_over.add(s_sweep);
    s_sweep->callback([&] {
        action = [&] {
            RunConfig cfg = scenario_config(sweep_name);
            cfg.out = out_dir + "/" + sweep_name;
            sweep_over.apply(cfg);
            const Scenario s = make_scenario(sweep_name);
            const SweepResult r = convergence_study(s, config_options(cfg, workers));
            write_text(cfg.out + "/sweep.csv", sweep_csv(r));
            std::printf("eps slope %.3f  phi saturation %.2e  psi trapezoid gap %.2e  coarse error %.2e\n",
                        r.eps_slope, r.phi_saturation, r.psi_trapezoid_gap, r.coarse_error);
            std::printf("sweep %s/sweep.csv\n", cfg.out.c_str());
            const bool ok = r.eps_slope >= 0.7 && std::abs(r.eps_slope - std::round(r.eps_slope)) <= 0.3 &&
                            r.phi_saturation <= 1e-8 && r.coarse_error > 1e-3;
            return ok ? 0 : static_cast<int>(ExitCode::numerical);
        };
    });

    auto* s_export = scen->add_subcommand("export", "write scenario boundary data as CSV plus a config using it");
    std::string export_name;
    s_export->add_option("name", export_name, "scenario name")->required();
    s_export->callback([&] {
        action = [&] {
            const Scenario s = make_scenario(export_name);
            const std::string dir = out_dir + "/" + export_name + "/data";
            CurveDomain D = make_domain(s.P, s.R);
            const BoundaryTrace T = trace_boundary(D, 256);
            const BoundaryField F = sample_field(s.oracle, D, T);
            write_boundary_csv(F, T, dir);
            nlohmann::json j;
            for (const auto& [e, c] : s.P.coeffs())
                j["curve"]["coefficients"].push_back(
                    {{"exponent", {e[0], e[1], e[2]}}, {"coefficient", {c.real(), c.imag()}}});
            j["domain"]["radius"] = s.R;
            j["barrier"]["min_inside_margin"] = s.barrier_inside_margin;
            for (std::size_t r = 0; r < T.comps.size(); ++r)
                j["data"]["boundary"].push_back(dir + "/boundary_" + std::to_string(r) + ".csv");
            j["data"]["connectors"] = dir + "/connectors.csv";
            j["io"]["out"] = out_dir + "/" + export_name + "/from-data";
            write_text(dir + "/config.json", j.dump(2) + "\n");
            std::printf("wrote %s/config.json\n", dir.c_str());
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return static_cast<int>(ExitCode::validation);
    }
    try {
        return action ? action() : 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::numerical);
    }
}

}  // namespace harmrep
