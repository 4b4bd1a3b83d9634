#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expansions.hpp"
#include "geometry.hpp"
#include "profile.hpp"
#include "systems.hpp"

namespace cce {

inline constexpr double kSignSlack = 1e-9;

struct CheckRecord {
    std::string name;
    std::string anchor;  // the property being checked, in words
    double margin = 0.0;     // measured quantity
    double threshold = 0.0;  // pass boundary for the measured quantity
    bool pass = true;
    bool applicable = true;
    bool informational = false;
};

struct VerificationReport {
    std::vector<CheckRecord> records;

    bool all_pass() const {
        return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return !r.applicable || r.informational || r.pass; });
    }
    const CheckRecord* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.name == name) return &r;
        return nullptr;
    }
    void append(std::vector<CheckRecord> more) { records.insert(records.end(), more.begin(), more.end()); }
};

namespace detail {

inline CheckRecord not_applicable(std::string name, std::string anchor) {
    CheckRecord r{std::move(name), std::move(anchor)};
    r.applicable = false;
    return r;
}

// amount by which f leaves its majority sign; 0 for single-signed f
inline double sign_excursion(const std::vector<double>& f) {
    double lo = 0.0, hi = 0.0;
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return std::min(hi, -lo);
}

inline bool gberger_monotone_hypothesis(const BoundaryData& bd) {
    const double p1 = bd.phi0[0], p2 = bd.phi0[1];
    return p1 < 1.0 && p1 * p2 < 1.0 && 1.0 < p1 + p1 * p2;
}

inline std::vector<int> interior_nodes(const SolutionProfile& p) {
    std::vector<int> idx;
    for (int j = 0; j < p.nodes(); ++j)
        if (p.mesh.nodes[j] > 0.0 && p.mesh.nodes[j] < 1.0) idx.push_back(j);
    return idx;
}

}  // namespace detail

inline std::vector<CheckRecord> check_monotonicity(const SolutionProfile& p) {
    std::vector<CheckRecord> out;
    const auto nodes = detail::interior_nodes(p);
    {
        CheckRecord r{"monotonicity.y1", "K increases toward the center: y1' > 0"};
        double mn = std::numeric_limits<double>::infinity();
        for (int j : nodes) mn = std::min(mn, p.yp(j, 0));
        r.margin = mn;
        r.threshold = -kSignSlack;
        r.pass = mn > -kSignSlack;
        out.push_back(r);
    }
    const BoundaryData& bd = p.bd;
    switch (bd.kind) {
        case SystemKind::SUInvariant: {
            CheckRecord r{"monotonicity.y2", "phi is monotone from phi(0) to 1"};
            const double s = bd.phi0[0] < 1.0 ? 1.0 : (bd.phi0[0] > 1.0 ? -1.0 : 0.0);
            double worst = -std::numeric_limits<double>::infinity();
            for (int j : nodes) worst = std::max(worst, s == 0.0 ? std::abs(p.yp(j, 1)) - kSignSlack : -s * p.yp(j, 1) - kSignSlack);
            r.margin = worst + kSignSlack;
            r.threshold = kSignSlack;
            r.pass = worst < 0.0;
            out.push_back(r);
            break;
        }
        case SystemKind::GeneralizedBerger: {
            const char* names[3] = {"monotonicity.y2", "monotonicity.y3", "monotonicity.y2_plus_y3"};
            const std::string anchor = "phi_1, phi_2 and phi_1 phi_2 are monotone";
            if (!detail::gberger_monotone_hypothesis(bd)) {
                for (auto* nm : names) out.push_back(detail::not_applicable(nm, anchor));
                break;
            }
            for (int c = 0; c < 3; ++c) {
                std::vector<double> f;
                for (int j : nodes) f.push_back(c == 0 ? p.yp(j, 1) : c == 1 ? p.yp(j, 2) : p.yp(j, 1) + p.yp(j, 2));
                CheckRecord r{names[c], anchor};
                r.margin = detail::sign_excursion(f);
                r.threshold = kSignSlack;
                r.pass = r.margin <= kSignSlack;
                out.push_back(r);
            }
            break;
        }
        case SystemKind::SpInvariant: break;
    }
    return out;
}

inline double constraint_sup_norm(const SolutionProfile& p) {
    Family f = p.bd.family();
    double s = 0.0;
    for (int j : detail::interior_nodes(p)) {
        auto st = p.node_state(j);
        s = std::max(s, std::abs(constraint_raw(f, st.x, st.y.data(), st.yp.data())));
    }
    return s;
}

inline CheckRecord check_constraint_drift(const SolutionProfile& p) {
    CheckRecord r{"constraint.drift", "the first integral vanishes along the solution"};
    r.margin = constraint_sup_norm(p);
    r.threshold = 10.0 * p.tol;
    r.pass = r.margin <= r.threshold;
    return r;
}

// Closed forms for y_i''(0) written directly in K(0) and phi(0).
inline std::vector<double> origin_second_derivatives_closed_form(const BoundaryData& bd, double K0) {
    const double n = bd.n;
    switch (bd.kind) {
        case SystemKind::GeneralizedBerger: {
            const double p1 = bd.phi0[0], p2 = bd.phi0[1];
            auto pw = [](double v, double e) { return std::pow(v, e); };
            const double k = pw(K0, -1.0 / 3.0);
            const double d1 = 4.0 * (3.0 - upsilon(K0, p1, p2));
            const double d2 = 32.0 * k * (pw(p1, 2.0 / 3) * pw(p2, 1.0 / 3) - pw(p1, -1.0 / 3) * pw(p2, 1.0 / 3) - pw(p1, 2.0 / 3) * pw(p2, -2.0 / 3) + pw(p1, -4.0 / 3) * pw(p2, -2.0 / 3));
            const double d3 = 32.0 * k * (pw(p1, -1.0 / 3) * pw(p2, 1.0 / 3) - pw(p1, -1.0 / 3) * pw(p2, -2.0 / 3) - pw(p1, 2.0 / 3) * pw(p2, 4.0 / 3) + pw(p1, 2.0 / 3) * pw(p2, -2.0 / 3));
            return {d1, d2, d3};
        }
        case SystemKind::SUInvariant: {
            const double phi = bd.phi0[0];
            const double B = n - (n + 1.0) * std::pow(phi * K0, -1.0 / n) + std::pow(K0, -1.0 / n) * std::pow(phi, -(n + 1.0) / n);
            const double d2 = 8.0 * (n + 1.0) / (n - 2.0) * std::pow(K0, -1.0 / n) * std::pow(phi, -(n + 1.0) / n) * (1.0 - phi);
            return {4.0 * B, d2};
        }
        case SystemKind::SpInvariant: {
            // leading balance y_i''(0) = S_i(0) / (alpha_i - 1)
            Family f = bd.family();
            std::vector<double> y{std::log(K0)}, S(4);
            for (double v : bd.phi0) y.push_back(std::log(v));
            sources(f, y.data(), S.data());
            std::vector<double> d(4);
            for (int i = 0; i < 4; ++i) d[i] = S[i] / (f.alpha(i) - 1.0);
            return d;
        }
    }
    return {};
}

inline std::vector<CheckRecord> check_origin_identities(const SolutionProfile& p) {
    auto sc = p.origin_series();
    auto closed = origin_second_derivatives_closed_form(p.bd, p.K0());
    std::vector<CheckRecord> out;
    for (std::size_t i = 0; i < closed.size(); ++i) {
        CheckRecord r{"origin.y" + std::to_string(i + 1) + "pp", i == 0 && p.bd.kind == SystemKind::GeneralizedBerger
                                                                   ? "y1''(0) = 4 (3 - Upsilon(0))"
                                                                   : "closed form of y''(0) from the boundary data"};
        const double series = 2.0 * sc.table[i][2];
        const double diff = std::abs(series - closed[i]);
        r.margin = closed[i] == 0.0 ? diff : diff / std::abs(closed[i]);
        r.threshold = 1e-6;
        r.pass = diff <= 1e-6 * std::abs(closed[i]) + 1e-14;
        out.push_back(r);
    }
    return out;
}

inline std::vector<CheckRecord> check_apriori_bounds(const SolutionProfile& p) {
    std::vector<CheckRecord> out;
    const auto nodes = detail::interior_nodes(p);
    const double n = p.bd.n;
    {
        CheckRecord r{"apriori.y1_slope", "y1' < 4n x / (1 - x^2)"};
        double worst = -std::numeric_limits<double>::infinity();
        for (int j : nodes) {
            const double x = p.mesh.nodes[j];
            worst = std::max(worst, p.yp(j, 0) * (1.0 - x * x) / (4.0 * n * x));
        }
        r.margin = worst;
        r.threshold = 1.0;
        r.pass = worst < 1.0;
        out.push_back(r);
    }
    const std::string anchor = "phi_i stays between phi_i(0) and 1";
    bool applicable = p.bd.kind == SystemKind::SUInvariant ||
                      (p.bd.kind == SystemKind::GeneralizedBerger && detail::gberger_monotone_hypothesis(p.bd));
    if (!applicable) {
        out.push_back(detail::not_applicable("apriori.ratio_range", anchor));
        return out;
    }
    CheckRecord r{"apriori.ratio_range", anchor};
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.bd.phi0.size(); ++i) {
        const double lo = std::min(p.bd.phi0[i], 1.0), hi = std::max(p.bd.phi0[i], 1.0);
        for (int j : nodes) {
            const double phi = std::exp(p.y(j, int(i) + 1));
            worst = std::max({worst, lo - phi, phi - hi});
        }
    }
    r.margin = worst;
    r.threshold = kSignSlack;
    r.pass = worst <= kSignSlack;
    out.push_back(r);
    return out;
}

inline CheckRecord check_radial_trace(const MetricProfile& mp) {
    CheckRecord r{"curvature.radial_trace", "Ric(d/dr, d/dr) = -n"};
    for (const auto& s : mp.samples) r.margin = std::max(r.margin, std::abs(radial_trace(s, mp.multiplicity) + mp.n));
    r.threshold = 1e-8;
    r.pass = r.margin <= r.threshold;
    return r;
}

// Radial plus tangential plane curvatures through each slice direction sum to -n.
inline CheckRecord check_tangential_trace(const MetricProfile& mp) {
    const std::string anchor = "Ric(e_i, e_i) = -n via the Gauss equation";
    if (mp.kind == SystemKind::SpInvariant) return detail::not_applicable("curvature.tangential_trace", anchor);
    auto sc = slice_structure(mp.kind, mp.n);
    CheckRecord r{"curvature.tangential_trace", anchor};
    for (const auto& s : mp.samples) {
        auto planes = plane_curvatures(mp.kind, mp.n, s, &sc);
        for (int i = 0; i < mp.n; ++i) {
            double sum = radial_sectional(s, direction_of_coordinate(mp.kind, i));
            for (const auto& q : planes)
                if (q.plane == PlaneKind::Tangential && (q.i == i || q.j == i)) sum += q.value;
            r.margin = std::max(r.margin, std::abs(sum + mp.n));
        }
    }
    r.threshold = 1e-6;
    r.pass = r.margin <= r.threshold;
    return r;
}

inline CheckRecord check_k0_window(const SolutionProfile& p) {
    auto b = k0_bounds_check(p.bd, p.K0());
    CheckRecord r{"k0.window", "lower bound < K(0) < 1"};
    r.margin = p.K0();
    r.threshold = b.lower;
    r.pass = b.ok();
    return r;
}

inline double max_plane_curvature(const MetricProfile& mp) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& s : curvature_samples(mp)) m = std::max(m, s.value);
    return m;
}

inline CheckRecord check_weyl_bound(const MetricProfile& mp) {
    const std::string anchor = "|W| <= 2 sqrt(6) for nonpositive curvature";
    if (mp.n != 3 || mp.kind == SystemKind::SpInvariant) return detail::not_applicable("weyl.mixed_bound", anchor);
    if (max_plane_curvature(mp) > 0.0) return detail::not_applicable("weyl.mixed_bound", anchor);
    CheckRecord r{"weyl.mixed_bound", anchor};
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& s : mp.samples)
        for (const auto& pm : perms) r.margin = std::max(r.margin, weyl_mixed_n3(mp.kind, mp.n, s, pm[0], pm[1], pm[2]));
    r.threshold = 2.0 * std::sqrt(6.0) + 1e-8;
    r.pass = r.margin <= r.threshold;
    return r;
}

inline CheckRecord pinching_report(const MetricProfile& mp) {
    CheckRecord r{"curvature.pinching", "max |K + 1| over monitored planes"};
    for (const auto& s : curvature_samples(mp)) r.margin = std::max(r.margin, std::abs(s.value + 1.0));
    r.informational = true;
    return r;
}

inline VerificationReport verify_profile(const SolutionProfile& p) {
    VerificationReport rep;
    CheckRecord conv{"solver.converged", "Newton residual and first integral within tolerance"};
    conv.margin = p.residual_norm;
    conv.threshold = p.tol;
    conv.pass = p.converged;
    rep.records.push_back(conv);
    rep.append(check_monotonicity(p));
    rep.records.push_back(check_constraint_drift(p));
    rep.append(check_origin_identities(p));
    rep.append(check_apriori_bounds(p));
    MetricProfile mp = reconstruct_metric(p);
    rep.records.push_back(check_radial_trace(mp));
    rep.records.push_back(check_tangential_trace(mp));
    rep.records.push_back(check_k0_window(p));
    rep.records.push_back(check_weyl_bound(mp));
    rep.records.push_back(pinching_report(mp));
    return rep;
}

struct VariationRecord {
    std::vector<std::pair<double, double>> intervals;  // monotone pieces of z_i, covering [0,1]
    double variation = 0.0;
};

struct VariationLedger {
    std::vector<VariationRecord> z;
    std::vector<double> inequality_residuals;  // lhs - rhs of the contraction inequalities (gberger)
    double max_variation = 0.0;
    bool inequalities_hold = true;
    bool forces_zero = true;  // all variations below kVariationTolerance
};

inline constexpr double kVariationTolerance = 1e-7;

inline std::vector<double> variation_sample_points(const SolutionProfile& p) {
    std::vector<double> xs{0.0};
    const int extra = 8;
    for (int k = 1; k < extra; ++k) xs.push_back(p.mesh.left() * k / extra);
    for (double x : p.mesh.nodes) xs.push_back(x);
    for (int k = 1; k < extra; ++k) xs.push_back(p.mesh.right() + (1.0 - p.mesh.right()) * k / extra);
    xs.push_back(1.0);
    return xs;
}

inline VariationLedger uniqueness_diagnostic(const SolutionProfile& p1, const SolutionProfile& p2) {
    if (p1.bd.kind != p2.bd.kind || p1.bd.n != p2.bd.n || p1.bd.phi0 != p2.bd.phi0)
        throw usage_error("uniqueness diagnostic needs two solutions of the same boundary data");
    const int m = p1.unknowns();
    const auto xs = variation_sample_points(p1);
    auto o1 = p1.origin_series(), i1 = p1.infinity_series(), o2 = p2.origin_series(), i2 = p2.infinity_series();
    std::vector<std::vector<double>> z(m), dz(m);
    for (double x : xs) {
        auto a = profile_state_at(p1, x, &o1, &i1);
        auto b = profile_state_at(p2, x, &o2, &i2);
        for (int i = 0; i < m; ++i) {
            z[i].push_back(a.y[i] - b.y[i]);
            dz[i].push_back(a.yp[i] - b.yp[i]);
        }
    }
    VariationLedger led;
    for (int i = 0; i < m; ++i) {
        VariationRecord rec;
        double start = 0.0;
        int sign = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double d = dz[i][k];
            const int s = d > kSignSlack ? 1 : (d < -kSignSlack ? -1 : 0);
            if (s != 0 && sign != 0 && s != sign) {
                rec.intervals.emplace_back(start, xs[k]);
                start = xs[k];
            }
            if (s != 0) sign = s;
            if (k > 0) rec.variation += std::abs(z[i][k] - z[i][k - 1]);
        }
        rec.intervals.emplace_back(start, 1.0);
        led.max_variation = std::max(led.max_variation, rec.variation);
        led.z.push_back(std::move(rec));
    }
    if (p1.bd.kind == SystemKind::GeneralizedBerger) {
        const double V1 = led.z[0].variation, V2 = led.z[1].variation, V3 = led.z[2].variation;
        led.inequality_residuals = {V2 - 0.5 * V1 - 0.25 * V3, V3 - 0.5 * V1 - 0.25 * V2, V1 - (V2 + V3) / 3.0};
        for (double r : led.inequality_residuals)
            if (r > kVariationTolerance) led.inequalities_hold = false;
    }
    led.forces_zero = led.max_variation <= kVariationTolerance;
    return led;
}

}  // namespace cce
