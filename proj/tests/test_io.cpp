#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "cce/io.hpp"

using namespace cce;
namespace fs = std::filesystem;

namespace {

const SolutionProfile& su5() {
    static SolutionProfile p = solve_bvp({SystemKind::SUInvariant, 5, {0.8}}).first;
    return p;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const parse_error& e) {
        return e.what();
    }
    return "";
}

fs::path temp_dir() {
    auto d = fs::temp_directory_path() / ("cce_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                          ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
    auto cfg = parse_config("system = su\nn = 5\nphi0 = 0.8\n");
    EXPECT_EQ(cfg.system, SystemKind::SUInvariant);
    EXPECT_EQ(cfg.n, 5);
    EXPECT_EQ(cfg.grid, 128);
    EXPECT_EQ(cfg.tol, 1e-10);
    ASSERT_EQ(cfg.phi0.size(), 1u);
    EXPECT_EQ(cfg.phi0[0], 0.8);
    EXPECT_EQ(cfg.seed, SeedMode::Smoothstep);
}

TEST(Config, CommentsListsAndSweepKeys) {
    auto cfg = parse_config("# header\nsystem = gberger   # trailing\nn=3\nphi0 = 0.95, 1.02\nsweep_end = 0.5\nevent_tol = 1e-7\nseed = cosine\n");
    EXPECT_EQ(cfg.phi0, (std::vector<double>{0.95, 1.02}));
    EXPECT_EQ(*cfg.sweep_end, 0.5);
    EXPECT_EQ(cfg.event_tol, 1e-7);
    EXPECT_EQ(cfg.seed, SeedMode::Cosine);
    EXPECT_NO_THROW(parse_config("system = su\nn = 3\nsweep_end = 0.3\n"));
}

TEST(Config, ErrorsNameKeyAndLine) {
    auto e = error_of("system = su\nn = 4\nphi0 = 0.8\n");
    EXPECT_NE(e.find("n must be odd"), std::string::npos) << e;
    EXPECT_NE(e.find("'n'"), std::string::npos) << e;
    EXPECT_NE(e.find("line 2"), std::string::npos) << e;
    e = error_of("system = su\nn = 5\nphi0 = -1\n");
    EXPECT_NE(e.find("positive"), std::string::npos) << e;
    EXPECT_NE(e.find("'phi0'"), std::string::npos) << e;
    e = error_of("system = su\nn = 5\nphi0 = 0.8\ncolour = blue\n");
    EXPECT_NE(e.find("unknown key"), std::string::npos) << e;
    EXPECT_NE(e.find("line 4"), std::string::npos) << e;
    EXPECT_NE(error_of("system = su\nphi0 = 0.8\n").find("'n'"), std::string::npos);
    EXPECT_NE(error_of("system = su\nn = five\nphi0 = 0.8\n").find("integer"), std::string::npos);
    EXPECT_NE(error_of("system = su\nn = 5\nphi0 = 0.8, 0.9\n").find("expected 1"), std::string::npos);
    EXPECT_NE(error_of("system = so\nn = 5\nphi0 = 0.8\n").find("unknown system"), std::string::npos);
    EXPECT_NE(error_of("system = su\nn = 5\nn = 7\nphi0 = 0.8\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of("system = su\nn = 5\nphi0 = 0.8\ntol = 0\n").find("'tol'"), std::string::npos);
    EXPECT_NE(error_of("system su\n").find("line 1"), std::string::npos);
}

TEST(Numbers, ShortestRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, int(rng() % 40) - 20);
        auto s = format_number(v);
        EXPECT_LE(s.size(), 24u);
        EXPECT_EQ(*parse_number(s), v);
    }
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_FALSE(parse_number("1.0x"));
    EXPECT_FALSE(parse_number(""));
}

TEST(ProfileCsv, RoundTripIsBitExact) {
    const auto& p = su5();
    auto text = profile_csv(p, true);
    auto q = parse_profile_csv(text);
    EXPECT_EQ(q.bd.kind, p.bd.kind);
    EXPECT_EQ(q.bd.phi0, p.bd.phi0);
    EXPECT_EQ(q.mesh.nodes, p.mesh.nodes);
    EXPECT_TRUE(q.y == p.y);
    EXPECT_TRUE(q.yp == p.yp);
    EXPECT_EQ(q.log_k0, p.log_k0);
    EXPECT_EQ(q.free.coeffs, p.free.coeffs);
    EXPECT_EQ(q.infinity_free, p.infinity_free);
    EXPECT_EQ(q.converged, p.converged);
    // exporting the parsed profile reproduces the file
    EXPECT_EQ(profile_csv(q, true), text);
    // the rebuilt stage values interpolate closely between nodes
    for (double x : {0.2, 0.5, 0.8}) EXPECT_NEAR(profile_state_at(q, x).y[0], profile_state_at(p, x).y[0], 1e-9);
    EXPECT_TRUE(verify_profile(q).all_pass());
}

TEST(ProfileCsv, LayoutAndZeroProfile) {
    SolutionProfile z = seed_profile(round_data(SystemKind::SUInvariant, 5), make_mesh(3, 0.1, 0.85), 3);
    auto text = profile_csv(z, true);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x,y1,y2,dy1,dy2,K,phi1,Phi,I1,I2,max_radial_curvature");
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        auto cells = split(line, ',');
        ASSERT_EQ(cells.size(), 11u);
        EXPECT_EQ(cells[7], "0");
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(text.find("# certified=true"), std::string::npos);
}

TEST(ProfileCsv, MalformedInputs) {
    auto text = profile_csv(su5(), true);
    EXPECT_THROW(parse_profile_csv(text.substr(0, text.find("# schema_version"))), parse_error);
    std::string bad = text;
    bad.replace(bad.find('\n') + 1, 3, "abc");
    EXPECT_THROW(parse_profile_csv(bad), parse_error);
    std::string wrong_system = text;
    wrong_system.replace(wrong_system.find("system=su"), 9, "system=sp");
    EXPECT_THROW(parse_profile_csv(wrong_system), std::exception);
}

TEST(TraceCsv, RowsAndStopReason) {
    ContinuationTrace tr;
    tr.plan.kind = SystemKind::SUInvariant;
    tr.plan.n = 3;
    tr.records.push_back({1.0, 1.0, {0.0}, -1.0, "radial-1", 0.1, 0});
    tr.records.push_back({0.95, 0.999, {0.01}, -0.98, "tangential-1-2", 0.85, 3});
    tr.stop = StopReason::PathEnd;
    auto text = trace_csv(tr);
    EXPECT_EQ(text.substr(0, text.find('\n')), "lambda,K0,a2,max_curvature,witness_plane,witness_x,iterations");
    EXPECT_NE(text.find("0.95,0.999,0.01,-0.98,tangential-1-2,0.85,3\n"), std::string::npos);
    EXPECT_NE(text.find("# stop_reason=path-end\n"), std::string::npos);
}

TEST(Json, SortedKeysStringsAndSchema) {
    VerificationReport empty;
    auto j = report_json(empty, std::nullopt, "abc");
    EXPECT_EQ(j["checks"].size(), 0u);
    EXPECT_EQ(j["schema_version"], "1");
    auto full = report_json(verify_profile(su5()), su5().bd, "abc");
    for (const auto& c : full["checks"]) {
        EXPECT_TRUE(c["margin"].is_string());
        EXPECT_FALSE(c["anchor"].get<std::string>().empty());
    }
    std::string text = dump_json(full);
    EXPECT_LT(text.find("\"boundary_data\""), text.find("\"certified\""));
    EXPECT_LT(text.find("\"certified\""), text.find("\"checks\""));
    EXPECT_EQ(text.find("timestamp"), std::string::npos);
    EXPECT_EQ(dump_json(report_json(verify_profile(su5()), su5().bd, "abc")), text);
}

TEST(Json, EventRecord) {
    ContinuationTrace tr;
    EventRecord ev;
    ev.lambda_no_event = 0.64;
    ev.lambda_with_event = 0.6399;
    ev.witness = CurvatureSample{0.85, PlaneKind::Tangential, 0, 2, 1e-9};
    auto j = event_json(ev, tr, "h");
    EXPECT_EQ(j["witness_plane"], "tangential-1-3");
    EXPECT_EQ(j["lambda_no_event"], "0.64");
    EXPECT_EQ(j["provenance"]["config_hash"], "h");
}

TEST(Files, AtomicWriteAndErrors) {
    auto d = temp_dir();
    write_file_atomic(d / "a.txt", "hello\n");
    EXPECT_EQ(read_file(d / "a.txt"), "hello\n");
    write_file_atomic(d / "a.txt", "bye\n");
    EXPECT_EQ(read_file(d / "a.txt"), "bye\n");
    EXPECT_FALSE(fs::exists(d / "a.txt.tmp"));
    EXPECT_THROW(write_file_atomic("/dev/null/impossible/a.txt", "x"), io_error);
    EXPECT_THROW(read_file(d / "missing.txt"), io_error);
    fs::remove_all(d);
}

TEST(Files, ConfigHashIsStable) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(parse_config("system = su\nn = 5\nphi0 = 0.8\n").hash(), parse_config("system = su\nn = 5\nphi0 = 0.8\n").hash());
}
