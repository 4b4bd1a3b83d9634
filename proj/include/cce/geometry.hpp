#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "profile.hpp"
#include "systems.hpp"

namespace cce {

// Number of distinct slice-metric functions I_i for a family.
inline int direction_count(SystemKind k) { return unknown_count(k); }

inline std::vector<int> multiplicities(SystemKind k, int n) {
    switch (k) {
        case SystemKind::GeneralizedBerger: return {1, 1, 1};
        case SystemKind::SUInvariant: return {1, n - 1};
        case SystemKind::SpInvariant: return {1, 1, 1, n - 3};
    }
    return {};
}

// Linear map from y to log I.
inline Eigen::MatrixXd log_metric_map(SystemKind kind, int n) {
    const int m = unknown_count(kind);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    switch (kind) {
        case SystemKind::GeneralizedBerger:
            L << 1, -2, -1, 1, 1, -1, 1, 1, 2;
            L /= 3.0;
            break;
        case SystemKind::SUInvariant:
            L << 1, 1.0 - n, 1, 1;
            L /= double(n);
            break;
        case SystemKind::SpInvariant:
            // I_4 = (K / (t1 t2 t3))^(1/n), I_i = t_i I_4
            for (int r = 0; r < 4; ++r) {
                L(r, 0) = 1.0 / n;
                for (int c = 1; c < 4; ++c) L(r, c) = -1.0 / n;
            }
            for (int r = 0; r < 3; ++r) L(r, r + 1) += 1.0;
            break;
    }
    return L;
}

struct MetricSample {
    double x = 0.5;
    std::vector<double> I, dlogI, ddlogI;  // x-derivatives of log I
    std::vector<double> a;                 // warped radii
    std::vector<double> ar_over_a;         // (da/dr)/a
    std::vector<double> arr_over_a;        // (d^2a/dr^2)/a
};

struct MetricProfile {
    SystemKind kind = SystemKind::SUInvariant;
    int n = 3;
    std::vector<int> multiplicity;
    std::vector<MetricSample> samples;
};

inline MetricSample metric_sample(SystemKind kind, int n, const StateVector& s) {
    if (!(s.x > 0.0 && s.x < 1.0)) throw domain_error("metric sample requires x in (0,1)");
    const int m = unknown_count(kind);
    Eigen::MatrixXd L = log_metric_map(kind, n);
    Eigen::Map<const Eigen::VectorXd> y(s.y.data(), m), yp(s.yp.data(), m), ypp(s.ypp.data(), m);
    Eigen::VectorXd l = L * y, dl = L * yp, ddl = L * ypp;
    const double x = s.x, w = 1.0 - x * x;
    MetricSample ms;
    ms.x = x;
    for (int i = 0; i < m; ++i) {
        const double I = std::exp(l(i));
        if (!std::isfinite(I) || !(I > 0.0) || !std::isfinite(dl(i)) || !std::isfinite(ddl(i)))
            throw infeasible_state("non-finite slice metric");
        const double f1 = -1.0 / x - 2.0 * x / w + 0.5 * dl(i);
        const double f2 = 1.0 / (x * x) - 2.0 * (1.0 + x * x) / (w * w) + 0.5 * ddl(i);
        ms.I.push_back(I);
        ms.dlogI.push_back(dl(i));
        ms.ddlogI.push_back(ddl(i));
        ms.a.push_back(w / (2.0 * x) * std::sqrt(I));
        ms.ar_over_a.push_back(-x * f1);
        ms.arr_over_a.push_back(x * f1 + x * x * (f2 + f1 * f1));
    }
    return ms;
}

inline MetricProfile reconstruct_metric(const SolutionProfile& p) {
    if (p.unknowns() != unknown_count(p.bd.kind) || p.ypp.rows() != p.nodes()) throw usage_error("profile dimensions invalid");
    MetricProfile mp;
    mp.kind = p.bd.kind;
    mp.n = p.bd.n;
    mp.multiplicity = multiplicities(mp.kind, mp.n);
    for (int j = 0; j < p.nodes(); ++j) mp.samples.push_back(metric_sample(mp.kind, mp.n, p.node_state(j)));
    return mp;
}

// Sectional curvature of the plane spanned by d/dr and the i-th slice direction.
inline double radial_sectional(const MetricSample& s, int i) { return -s.arr_over_a.at(i); }

inline const MetricSample& sample_at(const MetricProfile& mp, double x) {
    for (const auto& s : mp.samples)
        if (std::abs(s.x - x) <= 1e-12) return s;
    throw usage_error("no metric sample at the requested x");
}

inline double radial_sectional(const MetricProfile& mp, int i, double x) { return radial_sectional(sample_at(mp, x), i); }

inline double radial_trace(const MetricSample& s, const std::vector<int>& mult) {
    double t = 0.0;
    for (std::size_t i = 0; i < mult.size(); ++i) t += mult[i] * radial_sectional(s, int(i));
    return t;
}

// Coordinate Ricci of the SU-invariant slice at the base point.
inline std::vector<double> ricci_su(double I1, double I2, int n) {
    if (!(I1 > 0.0 && I2 > 0.0)) throw usage_error("ricci_su requires positive inputs");
    validate_dimension(SystemKind::SUInvariant, n);
    const double t = I1 / I2;
    std::vector<double> r(n, (n + 1.0) - 2.0 * t);
    r[0] = (n - 1.0) * t * t;
    return r;
}

// The four distinct entries of the Sp-invariant slice Ricci.
inline std::array<double, 4> ricci_sp(double t1, double t2, double t3, int n) {
    if (!(t1 > 0.0 && t2 > 0.0 && t3 > 0.0)) throw usage_error("ricci_sp requires positive inputs");
    validate_dimension(SystemKind::SpInvariant, n);
    auto e = [n](double a, double b, double c) { return 4.0 * n * a * a + 2.0 * (a * a - (b - c) * (b - c)) / (b * c); };
    return {e(t1, t2, t3), e(t2, t1, t3), e(t3, t1, t2), 4.0 * n + 8.0 - 2.0 * (t1 + t2 + t3)};
}

// C_ij^p = Z_i^q d_j X_q^p at the base point, plus first derivatives, for
// the Killing frame of the transitive SU(k+1) action on S^(2k+1).
struct StructureConstants {
    int dim = 0;
    std::vector<double> C, T;    // [i][j][p]
    std::vector<double> dC, dT;  // [m][i][j][p]: derivative along theta^m

    explicit StructureConstants(int d = 0) : dim(d), C(d * d * d, 0.0), T(d * d * d, 0.0), dC(d * d * d * d, 0.0), dT(d * d * d * d, 0.0) {}

    double& c(int i, int j, int p) { return C[(i * dim + j) * dim + p]; }
    double c(int i, int j, int p) const { return C[(i * dim + j) * dim + p]; }
    double& t(int i, int j, int p) { return T[(i * dim + j) * dim + p]; }
    double t(int i, int j, int p) const { return T[(i * dim + j) * dim + p]; }
    double& dc(int m, int i, int j, int p) { return dC[((m * dim + i) * dim + j) * dim + p]; }
    double dc(int m, int i, int j, int p) const { return dC[((m * dim + i) * dim + j) * dim + p]; }
    double& dt(int m, int i, int j, int p) { return dT[((m * dim + i) * dim + j) * dim + p]; }
    double dt(int m, int i, int j, int p) const { return dT[((m * dim + i) * dim + j) * dim + p]; }

    void antisymmetrize() {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int p = 0; p < dim; ++p) {
                    t(i, j, p) = c(i, j, p) - c(j, i, p);
                    for (int m = 0; m < dim; ++m) dt(m, i, j, p) = dc(m, i, j, p) - dc(m, j, i, p);
                }
    }
};

// Killing fields Y_a(z) = z v_a^T on S^(2k+1) in C^(k+1), with coordinates
// theta = (Im z_1, Re z_2, Im z_2, ...) around (1, 0, ..., 0).
inline StructureConstants su_structure_constants(int k) {
    if (k < 1) throw usage_error("SU structure constants need k >= 1");
    using cd = std::complex<double>;
    const int d = 2 * k + 1, N = k + 1;
    const cd I(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> v(d, Eigen::MatrixXcd::Zero(N, N));
    v[0](0, 0) = double(k) * I;
    for (int c = 1; c < N; ++c) v[0](c, c) = -I;
    for (int j = 1; j <= k; ++j) {
        v[2 * j - 1](0, j) = 1.0;
        v[2 * j - 1](j, 0) = -1.0;
        v[2 * j](0, j) = I;
        v[2 * j](j, 0) = I;
    }
    auto comp = [&](const Eigen::RowVectorXcd& w, int p) {
        if (p == 0) return w(0).imag();
        const int c = (p + 1) / 2;
        return p % 2 ? w(c).real() : w(c).imag();
    };
    auto unit = [&](int b) {
        Eigen::RowVectorXcd z = Eigen::RowVectorXcd::Zero(N);
        if (b == 0) z(0) = I;
        else z((b + 1) / 2) = b % 2 ? cd(1.0) : I;
        return z;
    };
    Eigen::RowVectorXcd e = Eigen::RowVectorXcd::Zero(N);
    e(0) = 1.0;
    // X_a^p(theta) = A_a^p sqrt(1 - |theta|^2) + B_a^p(theta)
    Eigen::MatrixXd A(d, d);
    std::vector<Eigen::MatrixXd> B(d, Eigen::MatrixXd(d, d));  // B[b](a,p) = d_b X_a^p
    for (int a = 0; a < d; ++a) {
        Eigen::RowVectorXcd w = e * v[a].transpose();
        for (int p = 0; p < d; ++p) A(a, p) = comp(w, p);
        for (int b = 0; b < d; ++b) {
            Eigen::RowVectorXcd wb = unit(b) * v[a].transpose();
            for (int p = 0; p < d; ++p) B[b](a, p) = comp(wb, p);
        }
    }
    Eigen::MatrixXd Z = A.inverse();
    StructureConstants sc(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int p = 0; p < d; ++p) {
                double s = 0.0;
                for (int q = 0; q < d; ++q) s += Z(i, q) * B[j](q, p);
                sc.c(i, j, p) = s;
            }
    for (int m = 0; m < d; ++m) {
        Eigen::MatrixXd dZ = -Z * B[m] * Z;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int p = 0; p < d; ++p) {
                    double s = 0.0;
                    for (int q = 0; q < d; ++q) s += dZ(i, q) * B[j](q, p);
                    if (i == p && m == j) s -= 1.0;  // Z d_m d_j X with d^2 sqrt(1-|theta|^2) = -delta at 0
                    sc.dc(m, i, j, p) = s;
                }
    }
    sc.antisymmetrize();
    return sc;
}

// The published C-table for S^5 = SU(3)/SU(2); derivative data from the Killing fields.
inline StructureConstants su3_published_table() {
    StructureConstants sc = su_structure_constants(2);
    std::fill(sc.C.begin(), sc.C.end(), 0.0);
    auto set = [&](int i, int j, int p, double v) { sc.c(i - 1, j - 1, p - 1) = v; };
    set(1, 2, 3, -0.5);
    set(1, 3, 2, 0.5);
    set(1, 4, 5, -0.5);
    set(1, 5, 4, 0.5);
    set(2, 1, 3, 1.0);
    set(2, 3, 1, -1.0);
    set(3, 1, 2, -1.0);
    set(3, 2, 1, 1.0);
    set(4, 1, 5, 1.0);
    set(5, 1, 4, -1.0);
    set(5, 4, 1, 1.0);
    set(4, 5, 1, -1.0);
    for (int i = 0; i < sc.dim; ++i)
        for (int j = 0; j < sc.dim; ++j)
            for (int p = 0; p < sc.dim; ++p) sc.t(i, j, p) = sc.c(i, j, p) - sc.c(j, i, p);
    return sc;
}

struct SliceCurvature {
    int dim = 0;
    Eigen::MatrixXd ricci;        // contraction of the coordinate Riemann tensor
    Eigen::MatrixXd ricci_paper;  // the closed Ricci display in (C, T, dT)
    Eigen::MatrixXd sectional;    // coordinate planes (i, j)
    double hessian_asymmetry = 0.0;
};

namespace detail {

inline void check_structure(const StructureConstants& sc) {
    const int d = sc.dim;
    if (d < 2 || int(sc.C.size()) != d * d * d || int(sc.dC.size()) != d * d * d * d) throw usage_error("structure constant arrays malformed");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int p = 0; p < d; ++p) {
                if (std::abs(sc.t(i, j, p) + sc.t(j, i, p)) > 1e-12) throw usage_error("T is not antisymmetric in its lower indices");
                for (int m = 0; m < d; ++m)
                    if (std::abs(sc.dt(m, i, j, p) + sc.dt(m, j, i, p)) > 1e-12) throw usage_error("dT is not antisymmetric");
            }
}

// Ricci display in terms of (C, T, dT) with g = diag(h), evaluated term by term.
inline Eigen::MatrixXd ricci_structure_display(const StructureConstants& sc, const std::vector<double>& h) {
    const int d = sc.dim;
    auto g = [&](int a, int b) { return a == b ? h[a] : 0.0; };
    auto gi = [&](int a, int b) { return a == b ? 1.0 / h[a] : 0.0; };
    auto C = [&](int i, int j, int p) { return sc.c(i, j, p); };
    auto T = [&](int i, int j, int p) { return sc.t(i, j, p); };
    auto dT = [&](int m, int i, int j, int p) { return sc.dt(m, i, j, p); };
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
    // U_i^{q m} = g^{pq}(dT_p T_iq^m + C_ip^s T_sq^m + C_pq^s T_is^m - C_ps^m T_iq^s)
    auto U = [&](int i, int q, int m) {
        const int p = q;  // g^{pq} diagonal
        double s = dT(p, i, q, m);
        for (int t = 0; t < d; ++t) s += C(i, p, t) * T(t, q, m) + C(p, q, t) * T(i, t, m) - C(p, t, m) * T(i, q, t);
        return gi(p, q) * s;
    };
    std::vector<double> trT(d, 0.0);  // T_ps^p
    for (int s = 0; s < d; ++s)
        for (int p = 0; p < d; ++p) trT[s] += T(p, s, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double r = 0.0;
            for (int p = 0; p < d; ++p) {
                r += 0.5 * dT(p, i, j, p);
                for (int q = 0; q < d; ++q) r += 0.5 * (C(i, p, q) * T(q, j, p) + C(q, j, p) * T(i, p, q) + C(q, p, p) * T(j, i, q));
            }
            for (int q = 0; q < d; ++q)
                for (int m = 0; m < d; ++m) r += -0.5 * U(i, q, m) * g(m, j) - 0.5 * U(j, q, m) * g(m, i);
            for (int p = 0; p < d; ++p)
                for (int s = 0; s < d; ++s) {
                    r += 0.25 * T(p, i, s) * T(s, j, p);
                    const int q = p;
                    for (int m = 0; m < d; ++m) {
                        r -= 0.25 * gi(p, q) * T(p, i, s) * T(s, q, m) * g(m, j);
                        r -= 0.25 * gi(p, q) * T(p, j, s) * T(s, q, m) * g(m, i);
                        r += 0.25 * gi(p, q) * T(p, j, s) * T(i, q, m) * g(s, m);
                        r += 0.25 * gi(p, q) * T(p, i, s) * T(j, q, m) * g(s, m);
                    }
                }
            for (int s = 0; s < d; ++s) {
                const int q = s;
                for (int m = 0; m < d; ++m) r -= 0.5 * gi(s, q) * trT[s] * (T(i, q, m) * g(m, j) + T(j, q, m) * g(m, i));
            }
            // -1/4 g^{pl}(T_jl^m g_ms + T_sl^m g_mj) g^{sq}(T_pq^m g_mi + T_iq^m g_mp)
            for (int p = 0; p < d; ++p) {
                const int l = p;
                for (int s = 0; s < d; ++s) {
                    const int q = s;
                    const double left = T(j, l, s) * g(s, s) + T(s, l, j) * g(j, j);
                    const double right = T(p, q, i) * g(i, i) + T(i, q, p) * g(p, p);
                    r -= 0.25 * gi(p, l) * left * gi(s, q) * right;
                }
            }
            R(i, j) = r;
        }
    return R;
}

}  // namespace detail

// Curvature of the invariant metric equal to diag(h) at the base point.
// The metric's derivatives follow from the Killing equation
// d_q g_ij = -C_qi^m g_mj - C_qj^m g_mi, differentiated once more for d^2 g.
inline SliceCurvature riemann_from_structure(const StructureConstants& sc, const std::vector<double>& h) {
    detail::check_structure(sc);
    const int d = sc.dim;
    if (int(h.size()) != d) throw usage_error("slice metric size does not match the structure constants");
    for (double v : h)
        if (!(v > 0.0)) throw usage_error("slice metric must be positive");
    auto idx3 = [d](int a, int b, int c) { return (a * d + b) * d + c; };
    auto idx4 = [d](int a, int b, int c, int e) { return ((a * d + b) * d + c) * d + e; };
    std::vector<double> dg(d * d * d), ddg(d * d * d * d);
    for (int q = 0; q < d; ++q)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) dg[idx3(q, i, j)] = -sc.c(q, i, j) * h[j] - sc.c(q, j, i) * h[i];
    for (int t = 0; t < d; ++t)
        for (int q = 0; q < d; ++q)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = -sc.dc(t, q, i, j) * h[j] - sc.dc(t, q, j, i) * h[i];
                    for (int m = 0; m < d; ++m) s -= sc.c(q, i, m) * dg[idx3(t, m, j)] + sc.c(q, j, m) * dg[idx3(t, m, i)];
                    ddg[idx4(t, q, i, j)] = s;
                }
    SliceCurvature out;
    out.dim = d;
    for (int t = 0; t < d; ++t)
        for (int q = 0; q < d; ++q)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    out.hessian_asymmetry = std::max(out.hessian_asymmetry, std::abs(ddg[idx4(t, q, i, j)] - ddg[idx4(q, t, i, j)]));

    // Gamma^k_ij and d_m Gamma^k_ij
    std::vector<double> G(d * d * d), dG(d * d * d * d);
    auto S = [&](int i, int j, int l) { return dg[idx3(i, j, l)] + dg[idx3(j, i, l)] - dg[idx3(l, i, j)]; };
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) G[idx3(k, i, j)] = 0.5 * S(i, j, k) / h[k];
    for (int m = 0; m < d; ++m)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0.5 * (ddg[idx4(m, i, j, k)] + ddg[idx4(m, j, i, k)] - ddg[idx4(m, k, i, j)]) / h[k];
                    for (int l = 0; l < d; ++l) s -= 0.5 * dg[idx3(m, k, l)] / (h[k] * h[l]) * S(i, j, l);
                    dG[idx4(m, k, i, j)] = s;
                }
    // R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    auto Riem = [&](int l, int i, int j, int k) {
        double r = dG[idx4(i, l, j, k)] - dG[idx4(j, l, i, k)];
        for (int m = 0; m < d; ++m) r += G[idx3(l, i, m)] * G[idx3(m, j, k)] - G[idx3(l, j, m)] * G[idx3(m, i, k)];
        return r;
    };
    out.ricci = Eigen::MatrixXd::Zero(d, d);
    out.sectional = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i) out.ricci(j, k) += Riem(i, i, j, k);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) out.sectional(i, j) = Riem(i, i, j, j) / h[j];
    out.ricci_paper = detail::ricci_structure_display(sc, h);
    return out;
}

// Structure constants of the slice for a family; the generalized Berger
// slice is SU(2) acting on S^3.
inline StructureConstants slice_structure(SystemKind kind, int n) {
    switch (kind) {
        case SystemKind::GeneralizedBerger: return su_structure_constants(1);
        case SystemKind::SUInvariant: return su_structure_constants((n - 1) / 2);
        case SystemKind::SpInvariant: break;
    }
    throw usage_error("tangential slice curvature is not available for the sp family");
}

// which distinct I_i sits on slice coordinate c
inline int direction_of_coordinate(SystemKind kind, int c) {
    switch (kind) {
        case SystemKind::GeneralizedBerger: return c;
        case SystemKind::SUInvariant: return c == 0 ? 0 : 1;
        case SystemKind::SpInvariant: return c < 3 ? c : 3;
    }
    return 0;
}

inline std::vector<double> slice_metric_diagonal(SystemKind kind, int n, const MetricSample& s) {
    std::vector<double> h(n);
    for (int c = 0; c < n; ++c) h[c] = s.I[direction_of_coordinate(kind, c)];
    return h;
}

// Ambient curvature of the tangential coordinate plane (i, j) by the Gauss
// equation; `intrinsic` is the slice curvature of h-bar (before the sinh^2 r scale).
inline double gauss_tangential(const MetricSample& s, double intrinsic, int di, int dj) {
    const double x = s.x, w = 1.0 - x * x;
    return 4.0 * x * x / (w * w) * intrinsic - s.ar_over_a.at(di) * s.ar_over_a.at(dj);
}

enum class PlaneKind { Radial, Tangential };

struct CurvatureSample {
    double x = 0.0;
    PlaneKind plane = PlaneKind::Radial;
    int i = 0, j = -1;  // radial: distinct direction i; tangential: slice coordinates (i, j)
    double value = 0.0;

    std::string plane_id() const {
        return plane == PlaneKind::Radial ? "radial-" + std::to_string(i + 1)
                                          : "tangential-" + std::to_string(i + 1) + "-" + std::to_string(j + 1);
    }
};

// All monitored plane curvatures at one sample: radial planes, then
// tangential coordinate planes when slice curvature is available.
inline std::vector<CurvatureSample> plane_curvatures(SystemKind kind, int n, const MetricSample& s,
                                                     const StructureConstants* sc = nullptr) {
    std::vector<CurvatureSample> out;
    for (int i = 0; i < int(s.I.size()); ++i) out.push_back({s.x, PlaneKind::Radial, i, -1, radial_sectional(s, i)});
    if (!sc) return out;
    SliceCurvature cur = riemann_from_structure(*sc, slice_metric_diagonal(kind, n, s));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = gauss_tangential(s, cur.sectional(i, j), direction_of_coordinate(kind, i), direction_of_coordinate(kind, j));
            out.push_back({s.x, PlaneKind::Tangential, i, j, v});
        }
    return out;
}

inline std::vector<CurvatureSample> curvature_samples(const MetricProfile& mp) {
    std::optional<StructureConstants> sc;
    if (mp.kind != SystemKind::SpInvariant) sc = slice_structure(mp.kind, mp.n);
    std::vector<CurvatureSample> out;
    for (const auto& s : mp.samples) {
        auto v = plane_curvatures(mp.kind, mp.n, s, sc ? &*sc : nullptr);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

// Mixed Weyl component for n = 3; i, p, q index the three slice directions.
inline double weyl_mixed_n3(SystemKind kind, int n, const MetricSample& s, int i, int p, int q) {
    if (n != 3 || kind == SystemKind::SpInvariant) throw usage_error("weyl_mixed_n3 requires an n = 3 gberger or su family");
    if (i == p || p == q || i == q || std::min({i, p, q}) < 0 || std::max({i, p, q}) > 2)
        throw usage_error("(i, p, q) must be a permutation of the three directions");
    auto L = [&](int c) { return std::log(s.I[direction_of_coordinate(kind, c)]); };
    auto dL = [&](int c) { return s.dlogI[direction_of_coordinate(kind, c)]; };
    const double u = 0.5 * (L(i) - L(p)), du = 0.5 * (dL(i) - dL(p));
    const double e3 = std::exp(-0.5 * L(i) - 0.5 * L(p) + L(q)), de3 = -0.5 * dL(i) - 0.5 * dL(p) + dL(q);
    const double dbracket = (std::exp(u) - std::exp(-u)) * du - e3 * de3;
    const double x = s.x;
    return 2.0 * x * x / (1.0 - x * x) * std::exp(-0.5 * L(q)) * std::abs(dbracket);
}

inline double weyl_mixed_n3(const MetricProfile& mp, int i, int p, int q, double x) {
    return weyl_mixed_n3(mp.kind, mp.n, sample_at(mp, x), i, p, q);
}

struct K0BoundsReport {
    double K0 = 1.0;
    double lower = 0.0;
    bool lower_applicable = false;
    bool above_lower = true;
    bool below_upper = true;
    bool round_equality = false;  // round data: K0 = 1 is exact
    bool ok() const { return (round_equality || (above_lower && below_upper)); }
};

// Lower bounds come from positivity of the y_1 source at x = 0.
inline double k0_lower_bound(const BoundaryData& bd, bool* applicable = nullptr) {
    bd.validate();
    const double n = bd.n;
    bool app = true;
    double lb = 0.0;
    switch (bd.kind) {
        case SystemKind::GeneralizedBerger: lb = std::pow(upsilon(1.0, bd.phi0[0], bd.phi0[1]) / 3.0, 3); break;
        case SystemKind::SUInvariant: {
            const double phi = bd.phi0[0];
            app = phi > 1.0 / (n + 1.0);
            lb = app ? std::pow(((n + 1.0) * phi - 1.0) / (n * std::pow(phi, (n + 1.0) / n)), n) : 0.0;
            break;
        }
        case SystemKind::SpInvariant: {
            const double t1 = bd.phi0[0], t2 = bd.phi0[1], t3 = bd.phi0[2];
            const double quad = (2 * t1 * t2 + 2 * t1 * t3 + 2 * t2 * t3 - t1 * t1 - t2 * t2 - t3 * t3) / (t1 * t2 * t3);
            const double br = (n - 3) * (n + 5) - (t1 + t2 + t3) * (n - 3) + 2 * quad;
            app = br > 0.0;
            lb = app ? t1 * t2 * t3 * std::pow(br / (n * (n - 1)), n) : 0.0;
            break;
        }
    }
    if (applicable) *applicable = app;
    return lb;
}

inline K0BoundsReport k0_bounds_check(const BoundaryData& bd, double K0) {
    K0BoundsReport r;
    r.K0 = K0;
    r.lower = k0_lower_bound(bd, &r.lower_applicable);
    if (bd.is_round()) {
        r.round_equality = std::abs(K0 - 1.0) <= 1e-10;
        r.above_lower = r.below_upper = r.round_equality;
        return r;
    }
    r.above_lower = !r.lower_applicable || K0 > r.lower;
    r.below_upper = K0 < 1.0;
    return r;
}

}  // namespace cce
