// Command-line driver: solve, sweep, verify and export.
//
// Exit codes: 0 success, 1 solver failure, 2 converged but flagged
// (or sweep stopped on min-step), 3 configuration or I/O error.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cce/cce.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kSolverFailure = 1, kFlagged = 2, kIoError = 3 };

struct Overrides {
    std::string config;
    std::string out;
    int grid = 0;
    double tol = 0.0;
    bool quiet = false;
};

cce::RunConfig load_config(const Overrides& o) {
    if (o.config.empty()) throw cce::usage_error("--config is required");
    cce::RunConfig cfg = cce::parse_config(cce::read_file(o.config));
    if (!o.out.empty()) cfg.out = o.out;
    if (o.grid > 0) cfg.grid = o.grid;
    if (o.tol > 0.0) cfg.tol = o.tol;
    cfg.validate();
    return cfg;
}

fs::path output_dir(const std::string& dir) {
    fs::path p(dir.empty() ? "." : dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw cce::io_error("cannot create output directory " + p.string());
    return p;
}

int run_solve(const Overrides& o) {
    cce::RunConfig cfg = load_config(o);
    if (cfg.phi0.empty()) throw cce::usage_error("solve needs phi0");
    fs::path dir = output_dir(cfg.out);
    auto bd = cfg.boundary_data();
    spdlog::info("solving {} n={} phi0=[{}] on {} nodes", cce::to_string(bd.kind), bd.n, cce::join_numbers(bd.phi0), cfg.grid);
    auto [p, sr] = cce::solve_bvp(bd, cfg.solve_options());
    spdlog::info("newton: {} after {} iterations, sup|F| = {:.3e}, {:.2f} s", sr.message, sr.iterations, sr.residual_norm, sr.wall_time);
    cce::VerificationReport rep = cce::verify_profile(p);
    for (const auto& r : rep.records)
        if (r.applicable && !r.informational && !r.pass) spdlog::warn("check {} failed: {} (margin {:.3e})", r.name, r.anchor, r.margin);
    cce::write_file_atomic(dir / "profile.csv", cce::profile_csv(p, rep.all_pass()));
    cce::write_file_atomic(dir / "report.json", cce::dump_json(cce::solve_json(p, sr, rep, cfg.hash())));
    if (!p.converged) return kSolverFailure;
    if (!rep.all_pass()) return kFlagged;
    spdlog::info("K(0) = {}", cce::format_number(p.K0()));
    return kOk;
}

int thread_budget() {
    const char* s = std::getenv("CCE_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

int run_sweep(const Overrides& o) {
    cce::RunConfig cfg = load_config(o);
    if (!cfg.sweep_end) throw cce::usage_error("sweep needs sweep_end");
    fs::path dir = output_dir(cfg.out);
    cce::SweepPlan plan = cfg.sweep_plan();
    cce::SolveOptions opt = cfg.solve_options();
    spdlog::info("sweep {} n={} lambda 1 -> {}", cce::to_string(plan.kind), plan.n, cce::format_number(plan.end));
    cce::ContinuationTrace tr = cce::sweep(plan, opt);
    spdlog::info("sweep stopped: {} after {} solves", cce::to_string(tr.stop), tr.records.size());
    cce::write_file_atomic(dir / "trace.csv", cce::trace_csv(tr));
    if (tr.event) {
        // bracket at the configured grid and at twice that, to expose mesh sensitivity
        cce::SolveOptions fine = opt;
        fine.nodes = 2 * opt.nodes;
        auto coarse_run = [&] { return cce::bisect_event(tr, plan.event_tol, opt); };
        auto fine_run = [&] { return cce::bisect_event(tr, plan.event_tol, fine); };
        cce::EventRecord ev, ev2;
        if (thread_budget() >= 2) {
            auto f = std::async(std::launch::async, fine_run);
            ev = coarse_run();
            ev2 = f.get();
        } else {
            ev = coarse_run();
            ev2 = fine_run();
        }
        const double shift = std::abs(ev.lambda_event - ev2.lambda_event);
        if (shift > 1e-4) {
            ev.certified = false;
            ev.annotation += (ev.annotation.empty() ? "" : "; ") + std::string("bracket moved under mesh doubling");
        }
        auto j = cce::event_json(ev, tr, cfg.hash());
        j["mesh_doubling_shift"] = cce::format_number(shift);
        cce::write_file_atomic(dir / "event.json", cce::dump_json(j));
        spdlog::info("event in [{}, {}] on {}", cce::format_number(ev.lambda_with_event), cce::format_number(ev.lambda_no_event), ev.witness.plane_id());
    }
    return tr.stop == cce::StopReason::MinStep ? kFlagged : kOk;
}

int run_verify(const Overrides& o, const std::string& first, const std::string& second) {
    cce::SolutionProfile p = cce::parse_profile_csv(cce::read_file(first));
    cce::VerificationReport rep = cce::verify_profile(p);
    cce::Json j = cce::report_json(rep, p.bd, cce::fnv1a_hex(cce::read_file(first)));
    bool agree = true;
    if (!second.empty()) {
        cce::SolutionProfile q = cce::parse_profile_csv(cce::read_file(second));
        auto led = cce::uniqueness_diagnostic(p, q);
        j["uniqueness"] = cce::variation_json(led);
        agree = led.forces_zero;
        spdlog::info("max variation of the difference: {:.3e}", led.max_variation);
    }
    for (const auto& r : rep.records)
        if (r.applicable && !r.informational) spdlog::info("{:<28} {} margin {:.3e}", r.name, r.pass ? "pass" : "FAIL", r.margin);
    if (!o.out.empty()) cce::write_file_atomic(output_dir(o.out) / "verify.json", cce::dump_json(j));
    else std::cout << cce::dump_json(j);
    if (!p.converged) return kSolverFailure;
    return rep.all_pass() && agree ? kOk : kFlagged;
}

// Profile CSV to a self-contained JSON record.
int run_export(const Overrides& o, const std::string& csv) {
    std::string text = cce::read_file(csv);
    cce::SolutionProfile p = cce::parse_profile_csv(text);
    cce::VerificationReport rep = cce::verify_profile(p);
    cce::Json j = cce::report_json(rep, p.bd, cce::fnv1a_hex(text));
    cce::Json cols = cce::Json::object();
    auto names = cce::profile_columns(p.bd.kind);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    std::vector<cce::Json> data(names.size(), cce::Json::array());
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = cce::split(line, ',');
        for (std::size_t c = 0; c < names.size() && c < cells.size(); ++c) data[c].push_back(cells[c]);
    }
    for (std::size_t c = 0; c < names.size(); ++c) cols[names[c]] = data[c];
    j["columns"] = cols;
    j["origin_free"] = cce::numbers_json(p.free.coeffs);
    j["infinity_free"] = cce::numbers_json(p.infinity_free);
    j["K0"] = cce::format_number(p.K0());
    fs::path out = o.out.empty() ? fs::path(csv).replace_extension(".json") : output_dir(o.out) / fs::path(csv).filename().replace_extension(".json");
    cce::write_file_atomic(out, cce::dump_json(j));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver for cohomogeneity-one conformally compact Einstein metrics"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--out", o.out, "output directory");
    app.add_option("--grid", o.grid, "number of mesh nodes (overrides config)");
    app.add_option("--tol", o.tol, "Newton tolerance (overrides config)");
    app.add_flag("--quiet", o.quiet, "only log warnings and errors");
    app.add_option("--config", o.config, "run configuration file");

    auto* solve = app.add_subcommand("solve", "solve one boundary value problem");
    auto* sweep = app.add_subcommand("sweep", "continue from round data and watch curvature signs");
    auto* verify = app.add_subcommand("verify", "check a profile CSV, optionally against a second one");
    std::string first, second;
    verify->add_option("profile", first, "profile CSV")->required();
    verify->add_option("other", second, "second profile CSV for the uniqueness diagnostic");
    auto* exp = app.add_subcommand("export", "convert a profile CSV to JSON");
    std::string csv;
    exp->add_option("profile", csv, "profile CSV")->required();
    for (auto* sub : {solve, sweep, verify, exp}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kIoError;
    }

    auto logger = spdlog::stderr_color_mt("cce");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%^%l%$: %v");
    spdlog::set_level(o.quiet ? spdlog::level::warn : spdlog::level::info);

    try {
        if (*solve) return run_solve(o);
        if (*sweep) return run_sweep(o);
        if (*verify) return run_verify(o, first, second);
        if (*exp) return run_export(o, csv);
    } catch (const cce::io_error& e) {
        spdlog::error("{}", e.what());
        return kIoError;
    } catch (const cce::usage_error& e) {
        spdlog::error("{}", e.what());
        return kIoError;
    } catch (const cce::infeasible_state& e) {
        spdlog::error("solver left the admissible region: {}", e.what());
        return kSolverFailure;
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return kSolverFailure;
    }
    return kIoError;
}
