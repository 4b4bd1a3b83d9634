#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "systems.hpp"
#include "tps.hpp"

namespace cce {

// Free coefficients of the origin expansion at order x^n (the nonlocal term),
// one per ratio unknown y_2..y_m.
struct NonlocalParams {
    std::vector<double> coeffs;
};

enum class Endpoint { Origin, Infinity };

inline constexpr double kTrustRadius = 0.15;
inline constexpr int kDefaultSeriesOrder = 30;

struct SeriesCoefficients {
    Endpoint endpoint = Endpoint::Origin;
    Family family;
    int order = 0;
    // table[i][k]: coefficient of x^k (origin) or (1-x)^k (infinity) in y_i
    std::vector<std::vector<double>> table;
    NonlocalParams free;                // origin only
    double log_k0 = 0.0;                // origin only: y_1(0)
    std::vector<double> infinity_free;  // infinity only: (1-x)^2 coefficients of y_2..y_m
    // equation residuals at the resonant orders; nonzero would signal a log term
    std::vector<double> obstruction;
};

namespace detail {

// Order-by-order solution of the origin expansion. T is double or a Dual
// carrying sensitivities to (log K(0), a_2, ..., a_m).
template <class T>
std::vector<std::vector<T>> origin_table(const Family& f, const std::vector<double>& log_phi0, const T& log_k0,
                                         const std::vector<T>& a, int order, std::vector<T>* obstruction) {
    const int m = f.m, n = f.n;
    std::vector<std::vector<T>> c(m, std::vector<T>(order + 1, T(0.0)));
    c[0][0] = log_k0;
    for (int i = 1; i < m; ++i) c[i][0] = T(log_phi0[i - 1]);
    if (obstruction) obstruction->assign(m, T(0.0));

    for (int k = 1; k <= order; ++k) {
        Tps<T> x = Tps<T>::variable(k, T(0.0));
        Tps<T> y[4], yp[4], ypp[4], out[4];
        for (int i = 0; i < m; ++i) {
            y[i] = Tps<T>(k);
            for (int j = 0; j < k; ++j) y[i][j] = c[i][j];
            yp[i] = y[i].derivative();
            ypp[i] = yp[i].derivative();
        }
        evolution_multiplied(f, x, y, yp, ypp, out);
        for (int i = 0; i < m; ++i) {
            const T r = out[i][k - 1];
            const double iota = double(k) * (k - 1) - f.alpha(i) * k;
            if (i == 0 && k == 2 * n) {
                // resonant for the y_1 equation; fixed by the first integral instead
                Tps<T> phi = constraint_multiplied(f, x, y, yp);
                c[0][k] = phi[k - 1] * (1.0 / (4.0 * n * k));
                if (obstruction) (*obstruction)[0] = r;
            } else if (i > 0 && k == n) {
                c[i][k] = a[i - 1];
                if (obstruction) (*obstruction)[i] = r;
            } else {
                c[i][k] = r * (-1.0 / iota);
            }
        }
    }
    return c;
}

template <class T>
double jacobian_diag_at_zero(const Family& f, int i) {
    using D = Dual<double, 4>;
    D y[4], S[4];
    for (int j = 0; j < f.m; ++j) y[j] = D::variable(0.0, j);
    sources(f, y, S);
    return S[i].d[i];
}

// Expansion in s = 1 - x with y_i(1) = y_i'(1) = 0.
template <class T>
std::vector<std::vector<T>> infinity_table(const Family& f, const std::vector<T>& b, int order, std::vector<T>* obstruction) {
    const int m = f.m;
    std::vector<std::vector<T>> d(m, std::vector<T>(order + 1, T(0.0)));
    if (obstruction) obstruction->assign(m, T(0.0));
    double J[4];
    for (int i = 0; i < m; ++i) J[i] = jacobian_diag_at_zero<T>(f, i);

    for (int k = 2; k <= order; ++k) {
        Tps<T> x(k, T(1.0));
        x[1] = T(-1.0);
        Tps<T> y[4], yp[4], ypp[4], out[4];
        for (int i = 0; i < m; ++i) {
            y[i] = Tps<T>(k);
            for (int j = 0; j < k; ++j) y[i][j] = d[i][j];
            Tps<T> ys = y[i].derivative();
            yp[i] = -ys;
            ypp[i] = ys.derivative();
        }
        evolution_multiplied(f, x, y, yp, ypp, out);
        for (int i = 0; i < m; ++i) {
            const T r = out[i][k];
            const double M = 4.0 * k * (k - 1) + 2.0 * (f.alpha(i) + f.beta(i)) * k + J[i];
            if (i > 0 && k == 2) {
                d[i][k] = b[i - 1];
                if (obstruction) (*obstruction)[i] = r;
            } else {
                d[i][k] = r * (-1.0 / M);
            }
        }
    }
    return d;
}

// Values and first two x-derivatives of a coefficient table at offset t from
// its endpoint (t = x at the origin, t = 1 - x at infinity).
template <class T>
void horner(const std::vector<T>& c, double t, bool reflected, T& v, T& dv, T& ddv) {
    const int K = int(c.size()) - 1;
    v = T(0.0);
    dv = T(0.0);
    ddv = T(0.0);
    for (int k = K; k >= 0; --k) {
        ddv = ddv * t + dv * 2.0;
        dv = dv * t + v;
        v = v * t + c[k];
    }
    if (reflected) dv = -dv;
}

inline double distance_to(Endpoint e, double x) { return e == Endpoint::Origin ? x : 1.0 - x; }

}  // namespace detail

inline SeriesCoefficients fg_series_origin(const BoundaryData& bd, const NonlocalParams& free, int order, double log_k0 = 0.0) {
    bd.validate();
    Family f = bd.family();
    if (order < f.n + 2) throw usage_error("origin series order must be at least n+2");
    if (int(free.coeffs.size()) != nonlocal_count(bd.kind)) throw usage_error("nonlocal parameter count mismatch");
    std::vector<double> obs;
    SeriesCoefficients sc;
    sc.endpoint = Endpoint::Origin;
    sc.family = f;
    sc.order = order;
    sc.table = detail::origin_table<double>(f, bd.log_ratios(), log_k0, free.coeffs, order, &obs);
    sc.free = free;
    sc.log_k0 = log_k0;
    sc.obstruction = obs;
    return sc;
}

inline SeriesCoefficients series_infinity(SystemKind kind, int n, int order, const std::vector<double>& free_values) {
    Family f = make_family(kind, n);
    if (order < 3) throw usage_error("infinity series order must be at least 3");
    if (int(free_values.size()) != f.m - 1) throw usage_error("infinity parameter count mismatch");
    std::vector<double> obs;
    SeriesCoefficients sc;
    sc.endpoint = Endpoint::Infinity;
    sc.family = f;
    sc.order = order;
    sc.table = detail::infinity_table<double>(f, free_values, order, &obs);
    sc.infinity_free = free_values;
    sc.obstruction = obs;
    return sc;
}

inline StateVector evaluate_series(const SeriesCoefficients& sc, double x) {
    const double t = detail::distance_to(sc.endpoint, x);
    if (!(t >= 0.0) || t > kTrustRadius + 1e-12) throw domain_error("x outside the series trust radius");
    StateVector s;
    s.x = x;
    const int m = int(sc.table.size());
    s.y.resize(m);
    s.yp.resize(m);
    s.ypp.resize(m);
    for (int i = 0; i < m; ++i) detail::horner(sc.table[i], t, sc.endpoint == Endpoint::Infinity, s.y[i], s.yp[i], s.ypp[i]);
    return s;
}

}  // namespace cce
