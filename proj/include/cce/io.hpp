#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "continuation.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "profile.hpp"
#include "solver.hpp"
#include "systems.hpp"
#include "verification.hpp"

namespace cce {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Contraction constants of the uniqueness argument; reported, never used as gates.
inline constexpr double kContractionEta0 = 1.0 - 3e-8;
inline constexpr double kContractionC4 = 3e7;

// ---------------------------------------------------------------- numbers

// Shortest decimal that parses back to the same double; -0 prints as 0.
inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::string join_numbers(const std::vector<double>& v, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_number(v[i]);
    }
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto k = s.find(sep, start);
        out.emplace_back(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
        if (k == std::string_view::npos) break;
        start = k + 1;
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r";
    auto a = s.find_first_not_of(ws);
    if (a == std::string_view::npos) return {};
    auto b = s.find_last_not_of(ws);
    return std::string(s.substr(a, b - a + 1));
}

// FNV-1a, used only to fingerprint configs in provenance records
inline std::string fnv1a_hex(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    auto res = std::to_chars(buf, buf + 16, h, 16);
    std::string hex(buf, res.ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

// ---------------------------------------------------------------- files

// Whole-file write via a sibling temp file and rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), std::streamsize(content.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw io_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw io_error("cannot move output into place at " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- config

inline SystemKind parse_system_kind(std::string_view s) {
    if (s == "gberger") return SystemKind::GeneralizedBerger;
    if (s == "su") return SystemKind::SUInvariant;
    if (s == "sp") return SystemKind::SpInvariant;
    throw usage_error("unknown system '" + std::string(s) + "' (expected gberger, su or sp)");
}

inline SeedMode parse_seed_mode(std::string_view s) {
    if (s == "smoothstep") return SeedMode::Smoothstep;
    if (s == "cosine") return SeedMode::Cosine;
    throw usage_error("unknown seed mode '" + std::string(s) + "' (expected smoothstep or cosine)");
}

struct RunConfig {
    SystemKind system = SystemKind::SUInvariant;
    int n = 3;
    std::vector<double> phi0;
    int grid = 128;
    double tol = 1e-10;
    SeedMode seed = SeedMode::Smoothstep;
    std::string out = ".";
    std::optional<double> sweep_end;
    double sweep_step = 0.05;
    double sweep_min_step = 1e-4;
    double sweep_max_step = 0.2;
    double event_tol = 1e-6;
    std::string source;  // text the config was parsed from, for the provenance hash

    BoundaryData boundary_data() const { return BoundaryData{system, n, phi0}; }

    SolveOptions solve_options() const {
        SolveOptions o;
        o.nodes = grid;
        o.tol = tol;
        o.seed = seed;
        return o;
    }

    SweepPlan sweep_plan() const {
        SweepPlan p;
        p.kind = system;
        p.n = n;
        p.end = sweep_end.value_or(1.0);
        p.initial_step = sweep_step;
        p.min_step = sweep_min_step;
        p.max_step = sweep_max_step;
        p.event_tol = event_tol;
        return p;
    }

    std::string hash() const { return fnv1a_hex(source); }

    // Re-checks the fields a command line override may have changed.
    void validate() const {
        validate_dimension(system, n);
        if (grid < 8) throw usage_error("grid must be at least 8");
        if (!(tol > 0.0)) throw usage_error("tol must be positive");
        if (!phi0.empty()) boundary_data().validate();
        if (sweep_end) sweep_plan().validate();
    }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& key, int line, const std::string& what) {
    throw parse_error("config line " + std::to_string(line) + ", key '" + key + "': " + what);
}

inline double config_number(const std::string& key, const std::string& v, int line) {
    auto d = parse_number(v);
    if (!d || !std::isfinite(*d)) config_fail(key, line, "expected a number, got '" + v + "'");
    return *d;
}

inline int config_int(const std::string& key, const std::string& v, int line) {
    int out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) config_fail(key, line, "expected an integer, got '" + v + "'");
    return out;
}

inline double config_positive(const std::string& key, const std::string& v, int line) {
    double d = config_number(key, v, line);
    if (!(d > 0.0)) config_fail(key, line, "must be positive");
    return d;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.source = text;
    std::map<std::string, int> seen;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        auto hash = raw.find('#');
        std::string body = trim(raw.substr(0, hash));
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) throw parse_error("config line " + std::to_string(line) + ": expected 'key = value'");
        std::string key = trim(body.substr(0, eq)), val = trim(body.substr(eq + 1));
        if (key.empty()) throw parse_error("config line " + std::to_string(line) + ": empty key");
        if (seen.count(key)) detail::config_fail(key, line, "duplicate key (first set on line " + std::to_string(seen[key]) + ")");
        seen[key] = line;
        if (val.empty()) detail::config_fail(key, line, "missing value");
        try {
            if (key == "system") cfg.system = parse_system_kind(val);
            else if (key == "n") cfg.n = detail::config_int(key, val, line);
            else if (key == "phi0") {
                cfg.phi0.clear();
                for (const auto& part : split(val, ',')) {
                    double d = detail::config_number(key, trim(part), line);
                    if (!(d > 0.0)) detail::config_fail(key, line, "boundary ratios must be strictly positive");
                    cfg.phi0.push_back(d);
                }
            } else if (key == "grid") cfg.grid = detail::config_int(key, val, line);
            else if (key == "tol") cfg.tol = detail::config_positive(key, val, line);
            else if (key == "seed") cfg.seed = parse_seed_mode(val);
            else if (key == "out") cfg.out = val;
            else if (key == "sweep_start") {
                if (detail::config_number(key, val, line) != 1.0) detail::config_fail(key, line, "sweeps start at round data (1)");
            } else if (key == "sweep_end") cfg.sweep_end = detail::config_positive(key, val, line);
            else if (key == "sweep_step") cfg.sweep_step = detail::config_positive(key, val, line);
            else if (key == "sweep_min_step") cfg.sweep_min_step = detail::config_positive(key, val, line);
            else if (key == "sweep_max_step") cfg.sweep_max_step = detail::config_positive(key, val, line);
            else if (key == "event_tol") cfg.event_tol = detail::config_positive(key, val, line);
            else detail::config_fail(key, line, "unknown key");
        } catch (const parse_error&) {
            throw;
        } catch (const usage_error& e) {
            detail::config_fail(key, line, e.what());
        }
    }
    for (const char* req : {"system", "n"})
        if (!seen.count(req)) throw parse_error(std::string("config is missing required key '") + req + "'");
    if (!seen.count("phi0") && !seen.count("sweep_end")) throw parse_error("config is missing required key 'phi0'");
    auto at = [&](const char* k) { return seen.count(k) ? seen[k] : 0; };
    try {
        validate_dimension(cfg.system, cfg.n);
    } catch (const usage_error& e) {
        detail::config_fail("n", at("n"), e.what());
    }
    if (cfg.grid < 8) detail::config_fail("grid", at("grid"), "must be at least 8");
    if (!cfg.phi0.empty() && int(cfg.phi0.size()) != nonlocal_count(cfg.system))
        detail::config_fail("phi0", at("phi0"), "expected " + std::to_string(nonlocal_count(cfg.system)) + " values for " + to_string(cfg.system));
    if (cfg.sweep_max_step < cfg.sweep_min_step) detail::config_fail("sweep_max_step", at("sweep_max_step"), "must be at least sweep_min_step");
    return cfg;
}

// ---------------------------------------------------------------- profile CSV

inline std::vector<std::string> profile_columns(SystemKind kind) {
    const int m = unknown_count(kind);
    std::vector<std::string> c{"x"};
    for (int i = 1; i <= m; ++i) c.push_back("y" + std::to_string(i));
    for (int i = 1; i <= m; ++i) c.push_back("dy" + std::to_string(i));
    c.push_back("K");
    for (int i = 1; i < m; ++i) c.push_back("phi" + std::to_string(i));
    c.push_back("Phi");
    for (int i = 1; i <= m; ++i) c.push_back("I" + std::to_string(i));
    c.push_back("max_radial_curvature");
    return c;
}

inline std::string profile_csv(const SolutionProfile& p, bool certified) {
    const int m = p.unknowns();
    Family f = p.bd.family();
    std::string s;
    auto cols = profile_columns(p.bd.kind);
    for (std::size_t c = 0; c < cols.size(); ++c) s += (c ? "," : "") + cols[c];
    s += '\n';
    for (int j = 0; j < p.nodes(); ++j) {
        auto st = p.node_state(j);
        auto ms = metric_sample(p.bd.kind, p.bd.n, st);
        std::vector<double> row{st.x};
        for (int i = 0; i < m; ++i) row.push_back(st.y[i]);
        for (int i = 0; i < m; ++i) row.push_back(st.yp[i]);
        row.push_back(std::exp(st.y[0]));
        for (int i = 1; i < m; ++i) row.push_back(std::exp(st.y[i]));
        row.push_back(constraint_raw(f, st.x, st.y.data(), st.yp.data()));
        for (double v : ms.I) row.push_back(v);
        double mk = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) mk = std::max(mk, radial_sectional(ms, i));
        row.push_back(mk);
        s += join_numbers(row) + '\n';
    }
    auto meta = [&](const std::string& k, const std::string& v) { s += "# " + k + "=" + v + '\n'; };
    meta("schema_version", std::to_string(kSchemaVersion));
    meta("system", to_string(p.bd.kind));
    meta("n", std::to_string(p.bd.n));
    meta("phi0", join_numbers(p.bd.phi0));
    meta("log_k0", format_number(p.log_k0));
    meta("origin_free", join_numbers(p.free.coeffs));
    meta("infinity_free", join_numbers(p.infinity_free));
    meta("stages", std::to_string(p.stages));
    meta("origin_order", std::to_string(p.origin_order));
    meta("infinity_order", std::to_string(p.infinity_order));
    meta("tol", format_number(p.tol));
    meta("residual_norm", format_number(p.residual_norm));
    meta("converged", p.converged ? "true" : "false");
    meta("certified", certified ? "true" : "false");
    return s;
}

namespace detail {

// y'' at the collocation points of [x0, x1] from the quintic Hermite interpolant of (y, y', y'') at both ends
inline std::vector<double> hermite_ypp(double h, const double a[3], const double b[3], const std::vector<double>& tau) {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> r;
    for (int k = 0; k < 6; ++k) {
        A(0, k) = k == 0;
        A(1, k) = k == 1;
        A(2, k) = k == 2 ? 2.0 : 0.0;
        A(3, k) = 1.0;
        A(4, k) = k;
        A(5, k) = k * (k - 1.0);
    }
    r << a[0], h * a[1], h * h * a[2], b[0], h * b[1], h * h * b[2];
    Eigen::Matrix<double, 6, 1> c = A.partialPivLu().solve(r);
    std::vector<double> out;
    for (double t : tau) {
        double v = 0.0;
        for (int k = 2; k < 6; ++k) v += k * (k - 1.0) * c(k) * std::pow(t, k - 2);
        out.push_back(v / (h * h));
    }
    return out;
}

}  // namespace detail

// Rebuilds a profile from its CSV export. Node values are exact; the
// collocation stage values are re-interpolated.
inline SolutionProfile parse_profile_csv(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    std::map<std::string, std::string> meta;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        if (raw[0] == '#') {
            auto eq = raw.find('=');
            if (eq == std::string::npos) continue;
            meta[trim(raw.substr(1, eq - 1))] = trim(raw.substr(eq + 1));
            continue;
        }
        if (header.empty()) {
            header = split(raw, ',');
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(raw, ',')) {
            auto d = parse_number(cell);
            if (!d) throw parse_error("profile line " + std::to_string(line) + ": bad number '" + cell + "'");
            row.push_back(*d);
        }
        if (row.size() != header.size()) throw parse_error("profile line " + std::to_string(line) + ": column count differs from header");
        rows.push_back(std::move(row));
    }
    auto need = [&](const char* k) -> const std::string& {
        auto it = meta.find(k);
        if (it == meta.end()) throw parse_error(std::string("profile is missing metadata '") + k + "'");
        return it->second;
    };
    auto numbers = [&](const char* k) {
        std::vector<double> v;
        const std::string& s = need(k);
        if (s.empty()) return v;
        for (const auto& part : split(s, ',')) {
            auto d = parse_number(part);
            if (!d) throw parse_error(std::string("profile metadata '") + k + "' is not numeric");
            v.push_back(*d);
        }
        return v;
    };
    auto integer = [&](const char* k) {
        auto d = parse_number(need(k));
        if (!d || *d != std::floor(*d)) throw parse_error(std::string("profile metadata '") + k + "' is not an integer");
        return int(*d);
    };
    if (integer("schema_version") != kSchemaVersion) throw parse_error("unsupported profile schema version");
    SolutionProfile p;
    p.bd = BoundaryData{parse_system_kind(need("system")), integer("n"), numbers("phi0")};
    p.bd.validate();
    if (header != profile_columns(p.bd.kind)) throw parse_error("profile header does not match the " + to_string(p.bd.kind) + " column layout");
    if (rows.size() < 3) throw parse_error("profile needs at least 3 nodes");
    p.log_k0 = numbers("log_k0").at(0);
    p.free.coeffs = numbers("origin_free");
    p.infinity_free = numbers("infinity_free");
    p.stages = integer("stages");
    p.origin_order = integer("origin_order");
    p.infinity_order = integer("infinity_order");
    p.tol = numbers("tol").at(0);
    p.residual_norm = numbers("residual_norm").at(0);
    p.converged = need("converged") == "true";
    if (int(p.free.coeffs.size()) != nonlocal_count(p.bd.kind) || int(p.infinity_free.size()) != nonlocal_count(p.bd.kind))
        throw parse_error("profile free parameter count does not match the family");
    const int m = unknown_count(p.bd.kind), N = int(rows.size());
    p.mesh.nodes.resize(N);
    p.y.resize(N, m);
    p.yp.resize(N, m);
    for (int j = 0; j < N; ++j) {
        p.mesh.nodes[j] = rows[j][0];
        for (int i = 0; i < m; ++i) {
            p.y(j, i) = rows[j][1 + i];
            p.yp(j, i) = rows[j][1 + m + i];
        }
    }
    try {
        p.mesh.validate();
    } catch (const usage_error& e) {
        throw parse_error(std::string("profile mesh invalid: ") + e.what());
    }
    fill_node_second_derivatives(p);
    CollocationScheme cs(p.stages);
    p.w.resize((N - 1) * p.stages, m);
    for (int j = 0; j + 1 < N; ++j) {
        const double h = p.mesh.nodes[j + 1] - p.mesh.nodes[j];
        for (int i = 0; i < m; ++i) {
            const double a[3] = {p.y(j, i), p.yp(j, i), p.ypp(j, i)};
            const double b[3] = {p.y(j + 1, i), p.yp(j + 1, i), p.ypp(j + 1, i)};
            auto w = detail::hermite_ypp(h, a, b, cs.tau);
            for (int l = 0; l < p.stages; ++l) p.w(j * p.stages + l, i) = w[l];
        }
    }
    return p;
}

// ---------------------------------------------------------------- trace CSV

inline std::string trace_csv(const ContinuationTrace& tr) {
    const int a = nonlocal_count(tr.plan.kind);
    std::string s = "lambda,K0";
    for (int i = 1; i <= a; ++i) s += ",a" + std::to_string(i + 1);
    s += ",max_curvature,witness_plane,witness_x,iterations\n";
    for (const auto& r : tr.records) {
        std::vector<double> lead{r.lambda, r.K0};
        lead.insert(lead.end(), r.free.begin(), r.free.end());
        s += join_numbers(lead) + "," + format_number(r.max_curvature) + "," + r.witness_plane + "," + format_number(r.witness_x) + "," +
             std::to_string(r.iterations) + "\n";
    }
    s += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    s += "# system=" + to_string(tr.plan.kind) + "\n";
    s += "# n=" + std::to_string(tr.plan.n) + "\n";
    s += "# stop_reason=" + to_string(tr.stop) + "\n";
    return s;
}

// ---------------------------------------------------------------- JSON

using Json = nlohmann::json;  // std::map backed: keys come out sorted

inline Json provenance_json(const std::string& config_hash) {
    return Json{{"config_hash", config_hash}, {"tool_version", kToolVersion}};
}

inline Json numbers_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double d : v) a.push_back(format_number(d));
    return a;
}

inline Json check_json(const CheckRecord& r) {
    return Json{{"anchor", r.anchor},
                {"applicable", r.applicable},
                {"informational", r.informational},
                {"margin", format_number(r.margin)},
                {"name", r.name},
                {"pass", r.pass},
                {"threshold", format_number(r.threshold)}};
}

inline Json boundary_json(const BoundaryData& bd) {
    return Json{{"n", std::to_string(bd.n)}, {"phi0", numbers_json(bd.phi0)}, {"system", to_string(bd.kind)}};
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json report_json(const VerificationReport& rep, const std::optional<BoundaryData>& bd, const std::string& config_hash) {
    Json checks = Json::array();
    for (const auto& r : rep.records) checks.push_back(check_json(r));
    Json j{{"schema_version", std::to_string(kSchemaVersion)},
           {"certified", rep.all_pass()},
           {"checks", checks},
           {"provenance", provenance_json(config_hash)},
           {"reference_constants", Json{{"contraction_c4", format_number(kContractionC4)}, {"contraction_eta0", format_number(kContractionEta0)}}}};
    if (bd) j["boundary_data"] = boundary_json(*bd);
    return j;
}

inline Json solve_json(const SolutionProfile& p, const SolveReport& sr, const VerificationReport& rep, const std::string& config_hash) {
    Json j = report_json(rep, p.bd, config_hash);
    j["solver"] = Json{{"converged", sr.converged},
                       {"iterations", std::to_string(sr.iterations)},
                       {"K0", format_number(p.K0())},
                       {"message", sr.message},
                       {"nodes", std::to_string(p.nodes())},
                       {"origin_free", numbers_json(p.free.coeffs)},
                       {"infinity_free", numbers_json(p.infinity_free)},
                       {"refinements", std::to_string(sr.refinements)},
                       {"residual_norm", format_number(sr.residual_norm)}};
    return j;
}

inline Json event_json(const EventRecord& ev, const ContinuationTrace& tr, const std::string& config_hash) {
    return Json{{"schema_version", std::to_string(kSchemaVersion)},
                {"annotation", ev.annotation},
                {"bracket_width", format_number(ev.bracket_width)},
                {"certified", ev.certified},
                {"lambda_event", format_number(ev.lambda_event)},
                {"lambda_no_event", format_number(ev.lambda_no_event)},
                {"lambda_with_event", format_number(ev.lambda_with_event)},
                {"n", std::to_string(tr.plan.n)},
                {"provenance", provenance_json(config_hash)},
                {"system", to_string(tr.plan.kind)},
                {"witness_plane", ev.witness.plane_id()},
                {"witness_value", format_number(ev.witness.value)},
                {"witness_x", format_number(ev.witness.x)}};
}

inline Json variation_json(const VariationLedger& led) {
    Json z = Json::array();
    for (const auto& r : led.z) {
        Json iv = Json::array();
        for (auto [a, b] : r.intervals) iv.push_back(numbers_json({a, b}));
        z.push_back(Json{{"intervals", iv}, {"variation", format_number(r.variation)}});
    }
    return Json{{"forces_zero", led.forces_zero},
                {"inequalities_hold", led.inequalities_hold},
                {"inequality_residuals", numbers_json(led.inequality_residuals)},
                {"max_variation", format_number(led.max_variation)},
                {"z", z}};
}

}  // namespace cce
