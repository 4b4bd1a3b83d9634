#include <random>

#include <gtest/gtest.h>

#include "cce/systems.hpp"
#include "oracles.hpp"

using namespace cce;

namespace {

StateVector random_state(std::mt19937& rng, int m, double x) {
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    StateVector s;
    s.x = x;
    for (int i = 0; i < m; ++i) {
        s.y.push_back(u(rng));
        s.yp.push_back(3 * u(rng));
        s.ypp.push_back(10 * u(rng));
    }
    return s;
}

oracle::State as_oracle(const StateVector& s) { return {s.x, s.y, s.yp, s.ypp}; }

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Systems, DimensionRules) {
    EXPECT_NO_THROW(validate_dimension(SystemKind::GeneralizedBerger, 3));
    EXPECT_THROW(validate_dimension(SystemKind::GeneralizedBerger, 5), usage_error);
    EXPECT_NO_THROW(validate_dimension(SystemKind::SUInvariant, 7));
    EXPECT_THROW(validate_dimension(SystemKind::SUInvariant, 4), usage_error);
    EXPECT_THROW(validate_dimension(SystemKind::SUInvariant, 1), usage_error);
    EXPECT_NO_THROW(validate_dimension(SystemKind::SpInvariant, 7));
    EXPECT_THROW(validate_dimension(SystemKind::SpInvariant, 5), usage_error);
    EXPECT_EQ(unknown_count(SystemKind::SpInvariant), 4);
}

TEST(Systems, BoundaryDataValidation) {
    EXPECT_THROW((BoundaryData{SystemKind::SUInvariant, 5, {-1.0}}.validate()), usage_error);
    EXPECT_THROW((BoundaryData{SystemKind::SUInvariant, 5, {0.5, 0.5}}.validate()), usage_error);
    EXPECT_TRUE(round_data(SystemKind::SpInvariant, 7).is_round());
    EXPECT_TRUE((BoundaryData{SystemKind::SUInvariant, 3, {3.9}}.in_admissible_window()));
    EXPECT_FALSE((BoundaryData{SystemKind::SUInvariant, 3, {4.1}}.in_admissible_window()));
}

TEST(Systems, ZeroProfileIsExactSolution) {
    for (auto [kind, n] : std::vector<std::pair<SystemKind, int>>{{SystemKind::GeneralizedBerger, 3}, {SystemKind::SUInvariant, 5}, {SystemKind::SpInvariant, 7}}) {
        for (double x : {0.0, 1e-4, 0.3, 0.9, 1.0}) {
            auto r = residual(make_family(kind, n), zero_state(kind, x));
            for (double e : r.evo) EXPECT_EQ(e, 0.0);
            EXPECT_EQ(r.constraint, 0.0);
            EXPECT_EQ(r.trace, 0.0);
        }
    }
}

TEST(Systems, GeneralizedBergerMatchesTranscription) {
    std::mt19937 rng(1);
    for (int t = 0; t < 50; ++t) {
        auto s = random_state(rng, 3, 0.05 + 0.9 * (t / 50.0));
        auto r = residual_gberger(s);
        auto o = oracle::gberger(as_oracle(s));
        for (int i = 0; i < 3; ++i) EXPECT_LT(rel(r.evo[i], o[i]), 1e-11);
        EXPECT_LT(rel(r.trace, o[3]), 1e-11);
        EXPECT_LT(rel(r.constraint, o[4]), 1e-11);
    }
}

TEST(Systems, SuMatchesTranscription) {
    std::mt19937 rng(2);
    for (int n : {3, 5, 7, 9}) {
        for (int t = 0; t < 30; ++t) {
            auto s = random_state(rng, 2, 0.05 + 0.9 * (t / 30.0));
            auto r = residual_su(n, s);
            auto o = oracle::su(n, as_oracle(s));
            EXPECT_LT(rel(r.evo[0], o[0]), 1e-11);
            EXPECT_LT(rel(r.evo[1], o[1]), 1e-11);
            EXPECT_LT(rel(r.trace, o[2]), 1e-11);
            EXPECT_LT(rel(r.constraint, o[3]), 1e-11);
        }
    }
}

TEST(Systems, SpMatchesTranscription) {
    std::mt19937 rng(3);
    for (int n : {3, 7, 11}) {
        for (int t = 0; t < 30; ++t) {
            auto s = random_state(rng, 4, 0.05 + 0.9 * (t / 30.0));
            auto r = residual_sp(n, s);
            auto o = oracle::sp(n, as_oracle(s));
            for (int i = 0; i < 4; ++i) EXPECT_LT(rel(r.evo[i], o[i]), 1e-11);
            EXPECT_LT(rel(r.trace, o[4]), 1e-11);
            EXPECT_LT(rel(r.constraint, o[5]), 1e-10);
        }
    }
}

TEST(Systems, MultipliedFormIsScaledRawForm) {
    std::mt19937 rng(4);
    Family f = make_family(SystemKind::SUInvariant, 5);
    auto s = random_state(rng, 2, 0.37);
    double raw[2], mult[2];
    evolution_raw(f, s.x, s.y.data(), s.yp.data(), s.ypp.data(), raw);
    evolution_multiplied(f, s.x, s.y.data(), s.yp.data(), s.ypp.data(), mult);
    const double scale = s.x * std::pow(1 - s.x * s.x, 2);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(mult[i], scale * raw[i], 1e-12 * std::abs(scale * raw[i]) + 1e-14);
    EXPECT_NEAR(constraint_multiplied(f, s.x, s.y.data(), s.yp.data()), scale * constraint_raw(f, s.x, s.y.data(), s.yp.data()), 1e-12);
}

TEST(Systems, JacobianMatchesFiniteDifferences) {
    std::mt19937 rng(5);
    for (auto [kind, n] : std::vector<std::pair<SystemKind, int>>{{SystemKind::GeneralizedBerger, 3}, {SystemKind::SUInvariant, 5}, {SystemKind::SpInvariant, 7}}) {
        const int m = unknown_count(kind);
        auto s = random_state(rng, m, 0.42);
        auto J = jacobian_state(kind, n, s);
        Family f = make_family(kind, n);
        for (int c = 0; c < 3 * m; ++c) {
            auto bump = [&](double h) {
                StateVector t = s;
                auto& v = c < m ? t.y[c] : c < 2 * m ? t.yp[c - m] : t.ypp[c - 2 * m];
                v += h;
                auto r = residual(f, t);
                r.evo.push_back(r.constraint);
                return r.evo;
            };
            const double h = 1e-6;
            auto a = bump(h), b = bump(-h);
            for (int r = 0; r <= m; ++r) EXPECT_NEAR(J(r, c), (a[r] - b[r]) / (2 * h), 1e-5 * std::max(1.0, std::abs(J(r, c))));
        }
    }
}

TEST(Systems, UpsilonRoundValue) {
    EXPECT_DOUBLE_EQ(upsilon(1.0, 1.0, 1.0), 3.0);
    EXPECT_THROW(upsilon(0.0, 1.0, 1.0), domain_error);
    // Upsilon scales like K^{-1/3}
    EXPECT_NEAR(upsilon(8.0, 0.7, 1.3), upsilon(1.0, 0.7, 1.3) / 2.0, 1e-14);
}

TEST(Systems, GeneralizedBergerClosedFormSlope) {
    // on an exact solution of the first integral the closed form recovers y1'
    std::mt19937 rng(6);
    for (int t = 0; t < 20; ++t) {
        auto s = random_state(rng, 3, 0.1 + 0.04 * t);
        const double ups = upsilon(std::exp(s.y[0]), std::exp(s.y[1]), std::exp(s.y[2]));
        double y1p = 0.0;
        try {
            y1p = y1prime_closed_form_gb(s.x, s.yp[1], s.yp[2], ups);
        } catch (const infeasible_state&) {
            continue;
        }
        s.yp[0] = y1p;
        EXPECT_NEAR(constraint_gberger(s), 0.0, 1e-8 * (1 + 1 / std::pow(1 - s.x * s.x, 2)));
    }
    EXPECT_THROW(y1prime_closed_form_gb(0.0, 0.0, 0.0, 3.0), domain_error);
}

TEST(Systems, StateSizeChecked) {
    StateVector s = zero_state(SystemKind::SUInvariant, 0.5);
    EXPECT_THROW(residual_gberger(s), usage_error);
    s.x = 1.5;
    EXPECT_THROW(residual_su(5, s), domain_error);
}
