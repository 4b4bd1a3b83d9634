#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "expansions.hpp"
#include "systems.hpp"

namespace cce {

// Piecewise polynomial with y'' interpolating k Gauss-Legendre points per
// interval. Nodal values converge at order 2k.
struct CollocationScheme {
    int k = 3;
    std::vector<double> tau;                // Gauss points on [0,1]
    std::vector<std::vector<double>> poly;  // Lagrange basis, monomial coefficients in t

    explicit CollocationScheme(int stages = 3) : k(stages) {
        if (k < 1 || k > 8) throw usage_error("collocation stage count must be in [1,8]");
        Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(k, k);
        for (int j = 1; j < k; ++j) {
            double b = j / std::sqrt(4.0 * j * j - 1.0);
            Jm(j, j - 1) = b;
            Jm(j - 1, j) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Jm);
        tau.resize(k);
        for (int j = 0; j < k; ++j) tau[j] = 0.5 * (es.eigenvalues()(j) + 1.0);
        std::sort(tau.begin(), tau.end());
        Eigen::MatrixXd V(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) V(r, c) = std::pow(tau[r], c);
        Eigen::MatrixXd C = V.inverse();  // column l holds the coefficients of L_l
        poly.assign(k, std::vector<double>(k));
        for (int l = 0; l < k; ++l)
            for (int p = 0; p < k; ++p) poly[l][p] = C(p, l);
    }

    double L(int l, double t) const {
        double s = 0.0;
        for (int p = k - 1; p >= 0; --p) s = s * t + poly[l][p];
        return s;
    }
    // int_0^t L_l
    double I1(int l, double t) const {
        double s = 0.0;
        for (int p = k - 1; p >= 0; --p) s = s * t + poly[l][p] / (p + 1);
        return s * t;
    }
    // int_0^t int_0^u L_l
    double I2(int l, double t) const {
        double s = 0.0;
        for (int p = k - 1; p >= 0; --p) s = s * t + poly[l][p] / ((p + 1.0) * (p + 2.0));
        return s * t * t;
    }
};

enum class Grading { Uniform, EndpointClustered };

struct Mesh {
    std::vector<double> nodes;
    Grading grading = Grading::Uniform;

    int size() const { return int(nodes.size()); }
    double left() const { return nodes.front(); }
    double right() const { return nodes.back(); }

    void validate() const {
        if (nodes.size() < 3) throw usage_error("mesh needs at least 3 nodes");
        for (std::size_t j = 1; j < nodes.size(); ++j)
            if (!(nodes[j] > nodes[j - 1])) throw usage_error("mesh nodes must be strictly increasing");
        if (!(left() > 0.0 && right() < 1.0)) throw usage_error("mesh must lie inside (0,1)");
        if (left() > kTrustRadius + 1e-12 || 1.0 - right() > kTrustRadius + 1e-12)
            throw usage_error("mesh endpoints must lie within the series trust radii");
    }
};

// Node density rises by the factor `stretch` toward both ends; stretch == 1 gives a uniform mesh.
inline Mesh make_mesh(int nodes, double x_left, double x_right, double stretch = 3.0) {
    if (nodes < 3) throw usage_error("mesh needs at least 3 nodes");
    if (!(stretch >= 1.0)) throw usage_error("mesh stretch must be at least 1");
    if (!(x_right > x_left)) throw usage_error("mesh requires x_left < x_right");
    Mesh m;
    m.nodes.resize(nodes);
    const int M = nodes - 1;
    m.grading = stretch == 1.0 ? Grading::Uniform : Grading::EndpointClustered;
    std::vector<double> widths(M);
    double total = 0.0;
    for (int j = 0; j < M; ++j) {
        const double xi = (j + 0.5) / M;
        const double density = 1.0 + (stretch - 1.0) * (std::pow(xi, 4) + std::pow(1.0 - xi, 4));
        widths[j] = 1.0 / density;
        total += widths[j];
    }
    double x = x_left;
    m.nodes[0] = x_left;
    for (int j = 0; j < M; ++j) {
        x += widths[j] * (x_right - x_left) / total;
        m.nodes[j + 1] = x;
    }
    m.nodes[M] = x_right;
    return m;
}

struct SolutionProfile {
    BoundaryData bd;
    Mesh mesh;
    int stages = 3;
    Eigen::MatrixXd y, yp, ypp;  // nodes x unknowns; ypp from the evolution equations
    Eigen::MatrixXd w;           // (intervals * stages) x unknowns: y'' at collocation points
    double log_k0 = 0.0;
    NonlocalParams free;
    std::vector<double> infinity_free;
    int origin_order = kDefaultSeriesOrder;
    int infinity_order = kDefaultSeriesOrder;
    bool converged = false;
    double residual_norm = 0.0;
    double tol = 1e-10;

    int nodes() const { return mesh.size(); }
    int unknowns() const { return int(y.cols()); }
    double K0() const { return std::exp(log_k0); }

    SeriesCoefficients origin_series() const { return fg_series_origin(bd, free, origin_order, log_k0); }
    SeriesCoefficients infinity_series() const { return series_infinity(bd.kind, bd.n, infinity_order, infinity_free); }

    StateVector node_state(int j) const {
        StateVector s;
        s.x = mesh.nodes[j];
        for (int i = 0; i < unknowns(); ++i) {
            s.y.push_back(y(j, i));
            s.yp.push_back(yp(j, i));
            s.ypp.push_back(ypp(j, i));
        }
        return s;
    }
};

// y'' solved from the evolution equations at a point where (y, y') are known.
inline std::vector<double> ypp_from_equations(const Family& f, double x, const std::vector<double>& y, const std::vector<double>& yp) {
    std::vector<double> zero(f.m, 0.0), out(f.m);
    evolution_raw(f, x, y.data(), yp.data(), zero.data(), out.data());
    for (auto& v : out) v = -v;
    return out;
}

inline void fill_node_second_derivatives(SolutionProfile& p) {
    Family f = p.bd.family();
    const int m = f.m;
    p.ypp.resize(p.nodes(), m);
    for (int j = 0; j < p.nodes(); ++j) {
        std::vector<double> y(m), yp(m);
        for (int i = 0; i < m; ++i) {
            y[i] = p.y(j, i);
            yp[i] = p.yp(j, i);
        }
        auto a = ypp_from_equations(f, p.mesh.nodes[j], y, yp);
        for (int i = 0; i < m; ++i) p.ypp(j, i) = a[i];
    }
}

// Evaluate the discrete solution anywhere in [0,1]: collocation polynomial
// on the mesh, endpoint series outside it.
inline StateVector profile_state_at(const SolutionProfile& p, double x, const SeriesCoefficients* origin = nullptr,
                                    const SeriesCoefficients* infinity = nullptr) {
    if (x < p.mesh.left()) {
        if (origin) return evaluate_series(*origin, x);
        return evaluate_series(p.origin_series(), x);
    }
    if (x > p.mesh.right()) {
        if (infinity) return evaluate_series(*infinity, x);
        return evaluate_series(p.infinity_series(), x);
    }
    const auto& nd = p.mesh.nodes;
    int j = int(std::upper_bound(nd.begin(), nd.end(), x) - nd.begin()) - 1;
    j = std::clamp(j, 0, p.nodes() - 2);
    const double h = nd[j + 1] - nd[j];
    const double t = (x - nd[j]) / h;
    CollocationScheme cs(p.stages);
    const int m = p.unknowns();
    StateVector s;
    s.x = x;
    s.y.assign(m, 0.0);
    s.yp.assign(m, 0.0);
    s.ypp.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double v = p.y(j, i) + h * p.yp(j, i) * t, d = p.yp(j, i), dd = 0.0;
        for (int l = 0; l < p.stages; ++l) {
            const double wl = p.w(j * p.stages + l, i);
            v += h * h * wl * cs.I2(l, t);
            d += h * wl * cs.I1(l, t);
            dd += wl * cs.L(l, t);
        }
        s.y[i] = v;
        s.yp[i] = d;
        s.ypp[i] = dd;
    }
    return s;
}

}  // namespace cce
