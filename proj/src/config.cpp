#include "harmrep/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "harmrep/errors.hpp"

namespace harmrep {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config", path + ": " + what);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long long get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

// A complex value is a number or a [re, im] pair.
cplx get_complex(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(path, "expected a number or a [re, im] pair");
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string enum_choice(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    const std::string s = get_string(j, path);
    if (!allowed.count(s)) {
        std::string opts;
        for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
        fail(path, "must be one of " + opts + " (got '" + s + "')");
    }
    return s;
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config", "syntax error at " + line_col(text, e.byte) + ": " + e.what());
    }
    check_keys(root, "", {"curve", "domain", "trace", "quad", "barrier", "h", "reconstruct", "data", "io"});
    RunConfig c;

    if (root.contains("curve")) {
        const json& cv = root["curve"];
        check_keys(cv, "curve", {"coefficients"});
        if (!cv.contains("coefficients") || !cv["coefficients"].is_array() || cv["coefficients"].empty())
            fail("curve.coefficients", "expected a nonempty array of records");
        for (std::size_t i = 0; i < cv["coefficients"].size(); ++i) {
            const std::string p = "curve.coefficients[" + std::to_string(i) + "]";
            const json& r = cv["coefficients"][i];
            check_keys(r, p, {"exponent", "coefficient"});
            if (!r.contains("exponent") || !r["exponent"].is_array() || r["exponent"].size() != 3)
                fail(p + ".exponent", "expected three integers");
            Term3 t;
            for (int k = 0; k < 3; ++k) {
                const long long e = get_int(r["exponent"][k], p + ".exponent");
                if (e < 0) fail(p + ".exponent", "negative exponent");
                if (e > kMaxDegree) fail(p + ".exponent", "exponent above the maximum degree");
                t.e[k] = static_cast<int>(e);
            }
            if (!r.contains("coefficient")) fail(p, "missing coefficient");
            t.c = get_complex(r["coefficient"], p + ".coefficient");
            for (std::size_t q = 0; q < c.curve.size(); ++q)
                if (c.curve[q].e == t.e)
                    fail("curve.coefficients", "duplicate exponent (" + std::to_string(t.e[0]) + "," +
                                                   std::to_string(t.e[1]) + "," + std::to_string(t.e[2]) +
                                                   ") at records [" + std::to_string(q) + "] and [" +
                                                   std::to_string(i) + "]");
            c.curve.push_back(t);
        }
        try {
            (void)HomPoly3::from_terms(c.curve);
        } catch (const Error& e) {
            fail("curve.coefficients", e.what());
        }
    }

    bool has_radius = false;
    if (root.contains("domain")) {
        const json& d = root["domain"];
        check_keys(d, "domain", {"radius", "reference_points"});
        if (d.contains("radius")) {
            c.radius = get_number(d["radius"], "domain.radius");
            has_radius = true;
            if (!(c.radius > 0.0)) fail("domain.radius", "must be positive");
        }
        if (d.contains("reference_points")) {
            const json& rp = d["reference_points"];
            if (!rp.is_array()) fail("domain.reference_points", "expected an array");
            for (std::size_t i = 0; i < rp.size(); ++i) {
                const std::string p = "domain.reference_points[" + std::to_string(i) + "]";
                check_keys(rp[i], p, {"x", "y"});
                if (!rp[i].contains("x") || !rp[i].contains("y")) fail(p, "needs x and y");
                c.reference_points.push_back(
                    chart_point(get_complex(rp[i]["x"], p + ".x"), get_complex(rp[i]["y"], p + ".y")));
            }
        }
    }

    if (root.contains("trace")) {
        const json& t = root["trace"];
        check_keys(t, "trace", {"n_theta"});
        if (t.contains("n_theta")) {
            const long long n = get_int(t["n_theta"], "trace.n_theta");
            if (n < 8 || n > (1 << 16)) fail("trace.n_theta", "must lie in [8, 65536]");
            c.n_theta = static_cast<int>(n);
        }
    }

    if (root.contains("quad")) {
        const json& q = root["quad"];
        check_keys(q, "quad", {"epsilons", "grid", "psi", "extrapolation_power"});
        if (q.contains("epsilons")) {
            if (!q["epsilons"].is_array() || q["epsilons"].empty()) fail("quad.epsilons", "expected a nonempty array");
            c.epsilons.clear();
            for (std::size_t i = 0; i < q["epsilons"].size(); ++i) {
                const std::string p = "quad.epsilons[" + std::to_string(i) + "]";
                const double e = get_number(q["epsilons"][i], p);
                if (!(e > 0.0) || e > 0.1) fail(p, "must lie in (0, 0.1]");
                if (!c.epsilons.empty() && !(e < c.epsilons.back())) fail(p, "schedule must be strictly decreasing");
                c.epsilons.push_back(e);
            }
        }
        if (q.contains("grid")) {
            const json& g = q["grid"];
            if (!g.is_array() || g.size() != 3) fail("quad.grid", "expected [n_theta, n_phi, n_psi]");
            int v[3];
            for (int k = 0; k < 3; ++k) {
                const long long n = get_int(g[k], "quad.grid");
                if (n < 1 || n > 4096) fail("quad.grid", "sizes must lie in [1, 4096]");
                v[k] = static_cast<int>(n);
            }
            c.grid = {v[0], v[1], v[2]};
        }
        if (q.contains("psi"))
            c.psi = enum_choice(q["psi"], "quad.psi", {"exact", "trapezoid"}) == "exact" ? PsiMode::exact
                                                                                        : PsiMode::trapezoid;
        if (q.contains("extrapolation_power")) {
            const long long p = get_int(q["extrapolation_power"], "quad.extrapolation_power");
            if (p < 1 || p > 4) fail("quad.extrapolation_power", "must lie in [1, 4]");
            c.extrapolation_power = static_cast<int>(p);
        }
    }

    if (root.contains("barrier")) {
        const json& b = root["barrier"];
        check_keys(b, "barrier", {"seed", "max_retries", "kernel", "min_inside_margin"});
        if (b.contains("seed")) {
            if (!b["seed"].is_number_unsigned()) fail("barrier.seed", "expected a nonnegative integer");
            c.seed = b["seed"].get<std::uint64_t>();
        }
        if (b.contains("max_retries")) {
            const long long n = get_int(b["max_retries"], "barrier.max_retries");
            if (n < 1 || n > 100000) fail("barrier.max_retries", "must lie in [1, 100000]");
            c.max_retries = static_cast<int>(n);
        }
        if (b.contains("kernel"))
            c.barrier_kernel = enum_choice(b["kernel"], "barrier.kernel", {"per_point", "shared"}) == "per_point"
                                   ? BarrierMode::per_point
                                   : BarrierMode::shared;
        if (b.contains("min_inside_margin")) {
            const double m = get_number(b["min_inside_margin"], "barrier.min_inside_margin");
            if (!(m > 0.0)) fail("barrier.min_inside_margin", "must be positive");
            c.min_inside_margin = m;
        }
    }

    if (root.contains("h")) {
        const json& h = root["h"];
        check_keys(h, "h", {"mode"});
        if (h.contains("mode")) c.hmode = parse_hmode(enum_choice(h["mode"], "h.mode", {"paper", "robust", "auto"}));
    }

    if (root.contains("reconstruct")) {
        const json& r = root["reconstruct"];
        check_keys(r, "reconstruct", {"prefactor"});
        if (r.contains("prefactor"))
            c.prefactor = enum_choice(r["prefactor"], "reconstruct.prefactor", {"derived", "paper"}) == "derived"
                              ? Prefactor::derived
                              : Prefactor::paper;
    }

    if (root.contains("data")) {
        const json& d = root["data"];
        check_keys(d, "data", {"scenario", "boundary", "connectors"});
        if (d.contains("scenario")) {
            c.scenario = get_string(d["scenario"], "data.scenario");
            const auto names = scenario_names();
            if (std::find(names.begin(), names.end(), c.scenario) == names.end())
                fail("data.scenario", "unknown scenario '" + c.scenario + "'");
        }
        if (d.contains("boundary")) {
            if (!d["boundary"].is_array() || d["boundary"].empty()) fail("data.boundary", "expected a nonempty array");
            for (std::size_t i = 0; i < d["boundary"].size(); ++i)
                c.boundary_files.push_back(get_string(d["boundary"][i], "data.boundary[" + std::to_string(i) + "]"));
        }
        if (d.contains("connectors")) c.connector_file = get_string(d["connectors"], "data.connectors");
        if (!c.scenario.empty() && !c.boundary_files.empty())
            fail("data", "give either scenario or boundary files, not both");
        if (!c.connector_file.empty() && c.boundary_files.empty()) fail("data.connectors", "requires data.boundary");
    }

    if (root.contains("io")) {
        const json& io = root["io"];
        check_keys(io, "io", {"out"});
        if (io.contains("out")) c.out = get_string(io["out"], "io.out");
    }

    if (c.curve.empty() && c.scenario.empty()) fail("curve", "required unless data.scenario is given");
    if (!has_radius && c.scenario.empty()) fail("domain.radius", "required");
    if (!c.scenario.empty()) {
        const Scenario s = make_scenario(c.scenario);
        if (c.curve.empty()) {
            for (const auto& [e, v] : s.P.coeffs()) c.curve.push_back({e, v});
        } else if (HomPoly3::from_terms(c.curve).coeffs() != s.P.coeffs()) {
            fail("curve", "does not match the curve of scenario '" + c.scenario + "'");
        }
        if (!has_radius) c.radius = s.R;
        else if (c.radius != s.R) fail("domain.radius", "does not match scenario '" + c.scenario + "'");
    }

    canonicalize(c);
    return c;
}

void canonicalize(RunConfig& c) {
    // every field, defaults included, keys sorted
    json canon;
    json coeffs = json::array();
    const HomPoly3 P = HomPoly3::from_terms(c.curve);
    for (const auto& [e, v] : P.coeffs())
        coeffs.push_back({{"exponent", {e[0], e[1], e[2]}}, {"coefficient", complex_json(v)}});
    canon["curve"]["coefficients"] = coeffs;
    canon["domain"]["radius"] = c.radius;
    json refs = json::array();
    for (const C3& z : c.reference_points) refs.push_back({{"x", complex_json(z[1])}, {"y", complex_json(z[2])}});
    canon["domain"]["reference_points"] = refs;
    canon["trace"]["n_theta"] = c.n_theta;
    canon["quad"]["epsilons"] = c.epsilons;
    canon["quad"]["grid"] = {c.grid.n_theta, c.grid.n_phi, c.grid.n_psi};
    canon["quad"]["psi"] = to_string(c.psi);
    canon["quad"]["extrapolation_power"] = c.extrapolation_power;
    canon["barrier"]["seed"] = c.seed;
    canon["barrier"]["max_retries"] = c.max_retries;
    canon["barrier"]["kernel"] = to_string(c.barrier_kernel);
    canon["barrier"]["min_inside_margin"] = c.min_inside_margin ? json(*c.min_inside_margin) : json(nullptr);
    canon["h"]["mode"] = to_string(c.hmode);
    canon["reconstruct"]["prefactor"] = to_string(c.prefactor);
    canon["data"]["scenario"] = c.scenario;
    canon["data"]["boundary"] = c.boundary_files;
    canon["data"]["connectors"] = c.connector_file;
    canon["io"]["out"] = c.out;
    c.canonical = canon.dump();
    c.fingerprint = fnv1a(c.canonical);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

HomPoly3 config_curve(const RunConfig& c) { return HomPoly3::from_terms(c.curve); }

std::optional<Scenario> config_scenario(const RunConfig& c) {
    if (c.scenario.empty()) return std::nullopt;
    return make_scenario(c.scenario);
}

PipelineOptions config_options(const RunConfig& c, int workers) {
    PipelineOptions o;
    o.n_theta_trace = c.n_theta;
    o.eps = c.epsilons;
    o.grid = c.grid;
    o.seed = c.seed;
    o.max_retries = c.max_retries;
    o.hmode = c.hmode;
    o.kernel.psi = c.psi;
    o.kernel.barrier = c.barrier_kernel;
    o.kernel.workers = workers;
    o.kernel.extrap_power = c.extrapolation_power;
    o.prefactor = c.prefactor;
    o.reference_points = c.reference_points;
    if (c.min_inside_margin) {
        o.barrier_inside_margin = *c.min_inside_margin;
    } else if (auto s = config_scenario(c)) {
        o.barrier_inside_margin = s->barrier_inside_margin;
    }
    return o;
}

namespace {

std::vector<std::vector<double>> read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("data", "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("data", path + ": empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
    }
    if (cols != header) {
        std::string h;
        for (const auto& s : header) h += (h.empty() ? "" : ",") + s;
        throw ValidationError("data", path + ": header must be " + h);
    }
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ValidationError("data", path + ":" + std::to_string(lineno) + ": not a number '" + cell + "'");
            }
        }
        if (row.size() != header.size())
            throw ValidationError("data", path + ":" + std::to_string(lineno) + ": expected " +
                                              std::to_string(header.size()) + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

const std::vector<std::string> kBoundaryHeader{"theta", "u", "p_re", "p_im"};
const std::vector<std::string> kConnectorHeader{"target", "path",  "x_re",  "x_im",    "y_re",
                                                "y_im",   "dx_re", "dx_im", "dudx_re", "dudx_im"};

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

BoundaryField read_boundary_csv(const std::vector<std::string>& component_files, const std::string& connector_file) {
    BoundaryField F;
    F.provenance = Provenance::measured;
    for (const auto& path : component_files) {
        ComponentSamples s;
        for (const auto& r : read_csv(path, kBoundaryHeader)) {
            s.u.push_back(r[1]);
            s.p.push_back({r[2], r[3]});
        }
        F.comps.push_back(std::move(s));
    }
    if (!connector_file.empty()) {
        std::map<std::pair<int, int>, Connector> by_key;
        for (const auto& r : read_csv(connector_file, kConnectorHeader)) {
            const int target = static_cast<int>(r[0]), path = static_cast<int>(r[1]);
            Connector& cn = by_key[{path, target}];
            cn.target = target;
            cn.path = path;
            cn.x.push_back({r[2], r[3]});
            cn.y.push_back({r[4], r[5]});
            cn.dx.push_back({r[6], r[7]});
            cn.dudx.push_back({r[8], r[9]});
        }
        for (auto& [k, cn] : by_key) F.connectors.push_back(std::move(cn));
    }
    return F;
}

void write_boundary_csv(const BoundaryField& F, const BoundaryTrace& T, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t r = 0; r < F.comps.size(); ++r) {
        std::ofstream out(dir + "/boundary_" + std::to_string(r) + ".csv");
        out << "theta,u,p_re,p_im\n";
        for (std::size_t i = 0; i < F.comps[r].u.size(); ++i)
            out << fmt17(T.comps[r].theta[i]) << ',' << fmt17(F.comps[r].u[i]) << ',' << fmt17(F.comps[r].p[i].real())
                << ',' << fmt17(F.comps[r].p[i].imag()) << '\n';
    }
    std::ofstream out(dir + "/connectors.csv");
    out << "target,path,x_re,x_im,y_re,y_im,dx_re,dx_im,dudx_re,dudx_im\n";
    for (const auto& cn : F.connectors)
        for (std::size_t i = 0; i < cn.x.size(); ++i)
            out << cn.target << ',' << cn.path << ',' << fmt17(cn.x[i].real()) << ',' << fmt17(cn.x[i].imag()) << ','
                << fmt17(cn.y[i].real()) << ',' << fmt17(cn.y[i].imag()) << ',' << fmt17(cn.dx[i].real()) << ','
                << fmt17(cn.dx[i].imag()) << ',' << fmt17(cn.dudx[i].real()) << ',' << fmt17(cn.dudx[i].imag())
                << '\n';
}

FieldProvider config_field(const RunConfig& c) {
    if (auto s = config_scenario(c)) {
        const Oracle o = s->oracle;
        return [o](const CurveDomain& D, const BoundaryTrace& T) { return sample_field(o, D, T); };
    }
    if (c.boundary_files.empty()) throw ValidationError("config", "data: no boundary data (set data.scenario or data.boundary)");
    const auto files = c.boundary_files;
    const auto conn = c.connector_file;
    return [files, conn](const CurveDomain&, const BoundaryTrace& T) {
        BoundaryField F = read_boundary_csv(files, conn);
        if (F.comps.size() != T.comps.size())
            throw ValidationError("data", "expected " + std::to_string(T.comps.size()) + " boundary files, got " +
                                              std::to_string(F.comps.size()));
        // samples must sit on the trace grid
        for (std::size_t r = 0; r < T.comps.size(); ++r) {
            if (F.comps[r].u.size() != T.comps[r].size())
                throw ValidationError("data", "component " + std::to_string(r) + " needs " +
                                                  std::to_string(T.comps[r].size()) + " samples");
        }
        for (std::size_t r = 0; r < files.size(); ++r) {
            const auto rows = read_csv(files[r], kBoundaryHeader);
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (std::abs(rows[i][0] - T.comps[r].theta[i]) > 1e-9)
                    throw ValidationError("data", files[r] + ": theta column does not match the trace grid");
        }
        return F;
    };
}

}  // namespace harmrep
