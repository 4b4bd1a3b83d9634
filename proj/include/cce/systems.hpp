#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dual.hpp"
#include "errors.hpp"

namespace cce {

enum class SystemKind { GeneralizedBerger, SUInvariant, SpInvariant };

inline std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::GeneralizedBerger: return "gberger";
        case SystemKind::SUInvariant: return "su";
        case SystemKind::SpInvariant: return "sp";
    }
    return "?";
}

inline int unknown_count(SystemKind k) {
    switch (k) {
        case SystemKind::GeneralizedBerger: return 3;
        case SystemKind::SUInvariant: return 2;
        case SystemKind::SpInvariant: return 4;
    }
    return 0;
}

// number of free coefficients at order x^n in the origin expansion
inline int nonlocal_count(SystemKind k) { return unknown_count(k) - 1; }

inline void validate_dimension(SystemKind k, int n) {
    switch (k) {
        case SystemKind::GeneralizedBerger:
            if (n != 3) throw usage_error("gberger requires n = 3");
            return;
        case SystemKind::SUInvariant:
            if (n < 3 || n % 2 == 0) throw usage_error("n must be odd and at least 3 for su");
            return;
        case SystemKind::SpInvariant:
            if (n < 3 || n % 4 != 3) throw usage_error("n must satisfy n = 3 mod 4 for sp");
            return;
    }
}

// Coefficient data shared by the three reduced systems. Every evolution
// equation has the shape
//   y_i'' - (alpha_i + beta_i x^2) / (x (1 - x^2)) y_i' + Q_i(y') + S_i(y) / (1 - x^2)^2 = 0
// and the first integral is
//   P(y') - 4n (1 + x^2) / (x (1 - x^2)) y_1' + kappa S_1(y) / (1 - x^2)^2.
struct Family {
    SystemKind kind = SystemKind::SUInvariant;
    int n = 3;
    int m = 2;

    double alpha(int i) const { return i == 0 ? 2.0 * n - 1.0 : n - 1.0; }
    double beta(int i) const { return i == 0 ? 2.0 * n + 1.0 : n + 1.0; }
    double kappa() const { return 2.0 * n / (n - 1.0); }

    // how many slice directions share the metric component I_i
    std::vector<int> multiplicity() const {
        switch (kind) {
            case SystemKind::GeneralizedBerger: return {1, 1, 1};
            case SystemKind::SUInvariant: return {1, n - 1};
            case SystemKind::SpInvariant: return {1, 1, 1, n - 3};
        }
        return {};
    }
};

inline Family make_family(SystemKind kind, int n) {
    validate_dimension(kind, n);
    Family f;
    f.kind = kind;
    f.n = n;
    f.m = unknown_count(kind);
    return f;
}

// Source numerators S_i(y).
template <class T>
void sources(const Family& f, const T* y, T* S) {
    using std::exp;
    const double n = f.n;
    switch (f.kind) {
        case SystemKind::GeneralizedBerger: {
            auto e = [&](double a, double b, double c) { return exp((y[0] * a + y[1] * b + y[2] * c) * (1.0 / 3.0)); };
            T e_m121 = e(-1, 2, 1), e_m1m11 = e(-1, -1, 1), e_m1m1m2 = e(-1, -1, -2);
            T e_m1m4m2 = e(-1, -4, -2), e_m12m2 = e(-1, 2, -2), e_m124 = e(-1, 2, 4);
            T ups = 2.0 * e_m121 + 2.0 * e_m1m11 + 2.0 * e_m1m1m2 - e_m1m4m2 - e_m12m2 - e_m124;
            S[0] = (3.0 - ups) * 16.0;
            S[1] = (e_m121 - e_m1m11 - e_m12m2 + e_m1m4m2) * 32.0;
            S[2] = (e_m1m11 - e_m1m1m2 - e_m124 + e_m12m2) * 32.0;
            return;
        }
        case SystemKind::SUInvariant: {
            T a = exp((y[0] + y[1]) * (-1.0 / n));
            T b = exp((y[0] + y[1] * (n + 1.0)) * (-1.0 / n));
            S[0] = (n - (n + 1.0) * a + b) * (8.0 * (n - 1.0));
            S[1] = (b - a) * (8.0 * (n + 1.0));
            return;
        }
        case SystemKind::SpInvariant: {
            T w = exp((y[1] + y[2] + y[3] - y[0]) * (1.0 / n));
            T t1 = exp(y[1]), t2 = exp(y[2]), t3 = exp(y[3]);
            T inv = exp(-(y[1] + y[2] + y[3]));
            T quad = (2.0 * (t1 * t2) + 2.0 * (t1 * t3) + 2.0 * (t2 * t3) - t1 * t1 - t2 * t2 - t3 * t3) * inv;
            T br1 = (n - 3.0) * (n + 5.0) - (t1 + t2 + t3) * (n - 3.0) + 2.0 * quad;
            S[0] = (n * (n - 1.0) - w * br1) * 8.0;
            auto bt = [&](const T& ta, const T& tb, const T& tc) {
                T d = tb - tc;
                return ta * (n - 1.0) + 2.0 * tb + 2.0 * tc - (n + 5.0) + 2.0 * ((ta * ta - d * d) * inv);
            };
            S[1] = -8.0 * (w * bt(t1, t2, t3));
            S[2] = -8.0 * (w * bt(t2, t1, t3));
            S[3] = -8.0 * (w * bt(t3, t1, t2));
            return;
        }
    }
}

template <class T>
T sp_quadratic(double n, const T* yp) {
    T s = yp[1] + yp[2] + yp[3];
    T a = yp[1] * n - s;
    T b = yp[2] * n - s;
    T c = yp[3] * n - s;
    return a * a + b * b + c * c + (n - 3.0) * (s * s);
}

// quadratic part P(y') of the first integral
template <class T>
T constraint_quadratic(const Family& f, const T* yp) {
    switch (f.kind) {
        case SystemKind::GeneralizedBerger:
            return yp[0] * yp[0] - (yp[1] * yp[1] + yp[1] * yp[2] + yp[2] * yp[2]);
        case SystemKind::SUInvariant:
            return yp[0] * yp[0] - yp[1] * yp[1];
        case SystemKind::SpInvariant:
            return yp[0] * yp[0] - sp_quadratic(double(f.n), yp) * (1.0 / (f.n * (f.n - 1.0)));
    }
    return T(0.0);
}

// quadratic part of the radial trace equation
template <class T>
T trace_quadratic(const Family& f, const T* yp) {
    const double n = f.n;
    switch (f.kind) {
        case SystemKind::GeneralizedBerger:
            return yp[0] * yp[0] * (1.0 / 6.0) + (yp[1] * yp[1] + yp[1] * yp[2] + yp[2] * yp[2]) * (1.0 / 3.0);
        case SystemKind::SUInvariant:
            return (yp[0] * yp[0] + (n - 1.0) * (yp[1] * yp[1])) * (1.0 / (2.0 * n));
        case SystemKind::SpInvariant:
            return (n * (yp[0] * yp[0]) + sp_quadratic(n, yp)) * (1.0 / (2.0 * n * n));
    }
    return T(0.0);
}

template <class T>
T quadratic_term(int i, const T* yp) {
    return i == 0 ? yp[0] * yp[0] * 0.5 : yp[0] * yp[i] * 0.5;
}

// Evolution equations multiplied through by x (1 - x^2)^2; regular at both ends.
// X may differ from T (e.g. a series in x with scalar coefficients of type T).
template <class X, class T>
void evolution_multiplied(const Family& f, const X& x, const T* y, const T* yp, const T* ypp, T* out) {
    T S[4];
    sources(f, y, S);
    X w = 1.0 - x * x;
    X xw2 = x * (w * w);
    for (int i = 0; i < f.m; ++i) {
        out[i] = xw2 * (ypp[i] + quadratic_term(i, yp)) - (f.alpha(i) + f.beta(i) * (x * x)) * w * yp[i] + x * S[i];
    }
}

template <class X, class T>
T constraint_multiplied(const Family& f, const X& x, const T* y, const T* yp) {
    T S[4];
    sources(f, y, S);
    X w = 1.0 - x * x;
    return x * (w * w) * constraint_quadratic(f, yp) - (4.0 * f.n) * ((1.0 + x * x) * w) * yp[0] + f.kappa() * (x * S[0]);
}

template <class X, class T>
T trace_multiplied(const Family& f, const X& x, const T* yp, const T* ypp) {
    X w = 1.0 - x * x;
    return x * (w * w) * (ypp[0] + trace_quadratic(f, yp)) - (1.0 + 3.0 * (x * x)) * w * yp[0];
}

// Raw (divided) forms for interior points.
template <class T>
void evolution_raw(const Family& f, double x, const T* y, const T* yp, const T* ypp, T* out) {
    T S[4];
    sources(f, y, S);
    const double w = 1.0 - x * x;
    const double inv_w2 = 1.0 / (w * w);
    for (int i = 0; i < f.m; ++i) {
        out[i] = ypp[i] - yp[i] * ((f.alpha(i) + f.beta(i) * x * x) / (x * w)) + quadratic_term(i, yp) + S[i] * inv_w2;
    }
}

template <class T>
T constraint_raw(const Family& f, double x, const T* y, const T* yp) {
    T S[4];
    sources(f, y, S);
    const double w = 1.0 - x * x;
    return constraint_quadratic(f, yp) - yp[0] * (4.0 * f.n * (1.0 + x * x) / (x * w)) + S[0] * (f.kappa() / (w * w));
}

template <class T>
T trace_raw(const Family& f, double x, const T* yp, const T* ypp) {
    const double w = 1.0 - x * x;
    return ypp[0] - yp[0] * ((1.0 + 3.0 * x * x) / (x * w)) + trace_quadratic(f, yp);
}

// Radius around each endpoint inside which the evaluators switch to the
// multiplied-through forms.
inline constexpr double kEndpointSwitch = 1e-3;

inline bool use_regularized(double x) { return x < kEndpointSwitch || x > 1.0 - kEndpointSwitch; }

// The problem instance: ratios at conformal infinity (x = 0).
struct BoundaryData {
    SystemKind kind = SystemKind::SUInvariant;
    int n = 3;
    std::vector<double> phi0;

    Family family() const { return make_family(kind, n); }

    void validate() const {
        validate_dimension(kind, n);
        if (int(phi0.size()) != nonlocal_count(kind))
            throw usage_error("expected " + std::to_string(nonlocal_count(kind)) + " boundary ratios for " + to_string(kind));
        for (double p : phi0)
            if (!(p > 0.0) || !std::isfinite(p)) throw usage_error("boundary ratios must be strictly positive");
    }

    // y_i(0) for i >= 2
    std::vector<double> log_ratios() const {
        std::vector<double> r;
        for (double p : phi0) r.push_back(std::log(p));
        return r;
    }

    bool is_round() const {
        for (double p : phi0)
            if (p != 1.0) return false;
        return true;
    }

    // the SU existence window 1/(n+1) < phi(0) < n+1; other families have no window
    bool in_admissible_window() const {
        if (kind != SystemKind::SUInvariant) return true;
        return phi0[0] > 1.0 / (n + 1.0) && phi0[0] < n + 1.0;
    }
};

inline BoundaryData round_data(SystemKind kind, int n) {
    return BoundaryData{kind, n, std::vector<double>(nonlocal_count(kind), 1.0)};
}

struct StateVector {
    double x = 0.5;
    std::vector<double> y, yp, ypp;
};

inline StateVector zero_state(SystemKind k, double x) {
    int m = unknown_count(k);
    return StateVector{x, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
}

struct ResidualVector {
    std::vector<double> evo;
    double constraint = 0.0;
    double trace = 0.0;  // radial trace equation, not part of the solved system
};

inline void check_state(const Family& f, const StateVector& s) {
    if (int(s.y.size()) != f.m || int(s.yp.size()) != f.m || int(s.ypp.size()) != f.m)
        throw usage_error("state size does not match the system's unknown count");
    if (!(s.x >= 0.0 && s.x <= 1.0)) throw domain_error("x outside [0,1]");
}

inline ResidualVector residual(const Family& f, const StateVector& s) {
    check_state(f, s);
    ResidualVector r;
    r.evo.resize(f.m);
    if (use_regularized(s.x)) {
        evolution_multiplied(f, s.x, s.y.data(), s.yp.data(), s.ypp.data(), r.evo.data());
        r.constraint = constraint_multiplied(f, s.x, s.y.data(), s.yp.data());
        r.trace = trace_multiplied(f, s.x, s.yp.data(), s.ypp.data());
    } else {
        evolution_raw(f, s.x, s.y.data(), s.yp.data(), s.ypp.data(), r.evo.data());
        r.constraint = constraint_raw(f, s.x, s.y.data(), s.yp.data());
        r.trace = trace_raw(f, s.x, s.yp.data(), s.ypp.data());
    }
    return r;
}

inline ResidualVector residual_gberger(const StateVector& s) {
    return residual(make_family(SystemKind::GeneralizedBerger, 3), s);
}
inline double constraint_gberger(const StateVector& s) { return residual_gberger(s).constraint; }

inline ResidualVector residual_su(int n, const StateVector& s) {
    return residual(make_family(SystemKind::SUInvariant, n), s);
}
inline double constraint_su(int n, const StateVector& s) { return residual_su(n, s).constraint; }

inline ResidualVector residual_sp(int n, const StateVector& s) {
    return residual(make_family(SystemKind::SpInvariant, n), s);
}
inline double constraint_sp(int n, const StateVector& s) { return residual_sp(n, s).constraint; }

inline double upsilon(double K, double phi1, double phi2) {
    if (!(K > 0.0 && phi1 > 0.0 && phi2 > 0.0)) throw domain_error("upsilon requires positive arguments");
    const double c = 1.0 / 3.0;
    double br = 2.0 * std::cbrt(phi1 * phi1 * phi2) + 2.0 * std::cbrt(phi2 / phi1) + 2.0 / std::cbrt(phi1 * phi2 * phi2) -
                std::pow(phi1, -4.0 * c) * std::pow(phi2, -2.0 * c) - std::pow(phi1, 2.0 * c) * std::pow(phi2, -2.0 * c) -
                std::pow(phi1, 2.0 * c) * std::pow(phi2, 4.0 * c);
    return br / std::cbrt(K);
}

// y_1' from the generalized Berger first integral, minus-root branch.
inline double y1prime_closed_form_gb(double x, double yp2, double yp3, double ups) {
    if (!(x > 0.0 && x < 1.0)) throw domain_error("closed form needs x in (0,1)");
    const double x2 = x * x, w = 1.0 - x2;
    const double rad = (1.0 + x2) * (1.0 + x2) + x2 * w * w * (yp2 * yp2 + yp2 * yp3 + yp3 * yp3) / 36.0 - 4.0 / 3.0 * x2 * (3.0 - ups);
    if (rad < 0.0) throw infeasible_state("negative radicand in the y1' closed form (3 - Upsilon > 0 violated)");
    // 1+x^2 - sqrt(rad) written without cancellation
    const double b = 1.0 + x2;
    const double num = b * b - rad;
    return 6.0 / (x * w) * num / (b + std::sqrt(rad));
}

// Partials of (evo_1..evo_m, constraint) with respect to (y, y', y'').
// Rows: m evolution residuals then the constraint; columns: y_1..y_m, y'_1..y'_m, y''_1..y''_m.
inline Eigen::MatrixXd jacobian_state(SystemKind kind, int n, const StateVector& s) {
    Family f = make_family(kind, n);
    check_state(f, s);
    using D = Dual<double, 12>;
    const int m = f.m;
    D y[4], yp[4], ypp[4], evo[4];
    for (int i = 0; i < m; ++i) {
        y[i] = D::variable(s.y[i], i);
        yp[i] = D::variable(s.yp[i], m + i);
        ypp[i] = D::variable(s.ypp[i], 2 * m + i);
    }
    D con;
    if (use_regularized(s.x)) {
        evolution_multiplied(f, s.x, y, yp, ypp, evo);
        con = constraint_multiplied(f, s.x, y, yp);
    } else {
        evolution_raw(f, s.x, y, yp, ypp, evo);
        con = constraint_raw(f, s.x, y, yp);
    }
    Eigen::MatrixXd J(m + 1, 3 * m);
    for (int c = 0; c < 3 * m; ++c) {
        for (int i = 0; i < m; ++i) J(i, c) = evo[i].d[c];
        J(m, c) = con.d[c];
    }
    return J;
}

}  // namespace cce
