#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dual.hpp"
#include "errors.hpp"
#include "expansions.hpp"
#include "profile.hpp"
#include "systems.hpp"

namespace cce {

enum class SeedMode { Smoothstep, Cosine };

inline std::string to_string(SeedMode s) { return s == SeedMode::Smoothstep ? "smoothstep" : "cosine"; }

struct SolveOptions {
    int nodes = 128;
    double x_left = 0.1;
    double x_right = 0.85;
    double stretch = 3.0;
    int stages = 3;
    int origin_order = kDefaultSeriesOrder;
    int infinity_order = kDefaultSeriesOrder;
    double tol = 1e-10;
    int max_iter = 60;
    // interval split threshold for the between-collocation-point residual; <= 0 disables refinement
    double refine_target = 1e-4;
    int max_refinements = 2;
    SeedMode seed = SeedMode::Smoothstep;
    bool homotopy_retry = true;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double residual_norm = std::numeric_limits<double>::infinity();
    std::vector<double> residual_history;  // 2-norm after each accepted step (index 0: initial guess)
    std::vector<double> damping_history;
    int refinements = 0;
    double constraint_drift = std::numeric_limits<double>::infinity();
    double wall_time = 0.0;
    bool homotopy_used = false;
    std::string message;
};

namespace detail {

inline double smooth_blend(SeedMode mode, double x) {
    if (mode == SeedMode::Smoothstep) return 1.0 - x * x * (3.0 - 2.0 * x);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}
inline double smooth_blend_dd(SeedMode mode, double x) {
    if (mode == SeedMode::Smoothstep) return -6.0 + 12.0 * x;
    return -0.5 * std::numbers::pi * std::numbers::pi * std::cos(std::numbers::pi * x);
}
inline double smooth_blend_d(SeedMode mode, double x) {
    if (mode == SeedMode::Smoothstep) return -6.0 * x + 6.0 * x * x;
    return -0.5 * std::numbers::pi * std::sin(std::numbers::pi * x);
}

}  // namespace detail

// Initial guess: zero profile with the log boundary offsets blended smoothly to 0 at x = 1.
inline SolutionProfile seed_profile(const BoundaryData& bd, const Mesh& mesh, int stages = 3, SeedMode mode = SeedMode::Smoothstep) {
    bd.validate();
    mesh.validate();
    Family f = bd.family();
    const int m = f.m, N = mesh.size();
    CollocationScheme cs(stages);
    SolutionProfile p;
    p.bd = bd;
    p.mesh = mesh;
    p.stages = stages;
    p.y = Eigen::MatrixXd::Zero(N, m);
    p.yp = Eigen::MatrixXd::Zero(N, m);
    p.ypp = Eigen::MatrixXd::Zero(N, m);
    p.w = Eigen::MatrixXd::Zero((N - 1) * stages, m);
    auto lr = bd.log_ratios();
    for (int i = 1; i < m; ++i) {
        const double L = lr[i - 1];
        for (int j = 0; j < N; ++j) {
            const double x = mesh.nodes[j];
            p.y(j, i) = L * detail::smooth_blend(mode, x);
            p.yp(j, i) = L * detail::smooth_blend_d(mode, x);
            p.ypp(j, i) = L * detail::smooth_blend_dd(mode, x);
        }
        for (int j = 0; j + 1 < N; ++j) {
            const double h = mesh.nodes[j + 1] - mesh.nodes[j];
            for (int l = 0; l < stages; ++l) p.w(j * stages + l, i) = L * detail::smooth_blend_dd(mode, mesh.nodes[j] + h * cs.tau[l]);
        }
    }
    p.log_k0 = 0.0;
    p.free.coeffs.assign(m - 1, 0.0);
    p.infinity_free.assign(m - 1, 0.0);
    for (int i = 1; i < m; ++i) p.infinity_free[i - 1] = 0.5 * lr[i - 1] * detail::smooth_blend_dd(mode, 1.0);
    return p;
}

// Discrete system: node values and slopes, stage second derivatives, and the
// endpoint series parameters (log K(0), a_2..a_m, b_2..b_m).
class CollocationSystem {
public:
    CollocationSystem(const BoundaryData& bd, const Mesh& mesh, int stages, int origin_order, int infinity_order)
        : bd_(bd), f_(bd.family()), mesh_(mesh), cs_(stages), origin_order_(origin_order), infinity_order_(infinity_order) {
        bd_.validate();
        mesh_.validate();
        m_ = f_.m;
        N_ = mesh_.size();
        block_ = 2 * m_ + stages * m_;
        interior_ = N_ * 2 * m_ + (N_ - 1) * stages * m_;
        size_ = interior_ + 2 * m_ - 1;
        anchor_ = N_ - 1;
        log_phi0_ = bd_.log_ratios();
    }

    int size() const { return size_; }
    int residual_count() const { return (2 * m_ - 1) + (N_ - 1) * (cs_.k * m_ + 2 * m_) + (2 * m_ - 1) + 1; }
    int anchor_node() const { return anchor_; }

    int y_index(int j, int i) const { return j * block_ + i; }
    int yp_index(int j, int i) const { return j * block_ + m_ + i; }
    int w_index(int j, int l, int i) const { return j * block_ + 2 * m_ + l * m_ + i; }
    int origin_param(int q) const { return interior_ + q; }              // q = 0: log K(0); q >= 1: a
    int infinity_param(int q) const { return interior_ + m_ + q; }       // b_{q+2}

    Eigen::VectorXd pack(const SolutionProfile& p) const {
        Eigen::VectorXd u(size_);
        for (int j = 0; j < N_; ++j)
            for (int i = 0; i < m_; ++i) {
                u(y_index(j, i)) = p.y(j, i);
                u(yp_index(j, i)) = p.yp(j, i);
            }
        for (int j = 0; j + 1 < N_; ++j)
            for (int l = 0; l < cs_.k; ++l)
                for (int i = 0; i < m_; ++i) u(w_index(j, l, i)) = p.w(j * cs_.k + l, i);
        u(origin_param(0)) = p.log_k0;
        for (int q = 1; q < m_; ++q) u(origin_param(q)) = p.free.coeffs[q - 1];
        for (int q = 0; q + 1 < m_; ++q) u(infinity_param(q)) = p.infinity_free[q];
        return u;
    }

    SolutionProfile unpack(const Eigen::VectorXd& u) const {
        SolutionProfile p;
        p.bd = bd_;
        p.mesh = mesh_;
        p.stages = cs_.k;
        p.origin_order = origin_order_;
        p.infinity_order = infinity_order_;
        p.y.resize(N_, m_);
        p.yp.resize(N_, m_);
        p.w.resize((N_ - 1) * cs_.k, m_);
        for (int j = 0; j < N_; ++j)
            for (int i = 0; i < m_; ++i) {
                p.y(j, i) = u(y_index(j, i));
                p.yp(j, i) = u(yp_index(j, i));
            }
        for (int j = 0; j + 1 < N_; ++j)
            for (int l = 0; l < cs_.k; ++l)
                for (int i = 0; i < m_; ++i) p.w(j * cs_.k + l, i) = u(w_index(j, l, i));
        p.log_k0 = u(origin_param(0));
        p.free.coeffs.resize(m_ - 1);
        p.infinity_free.resize(m_ - 1);
        for (int q = 1; q < m_; ++q) p.free.coeffs[q - 1] = u(origin_param(q));
        for (int q = 0; q + 1 < m_; ++q) p.infinity_free[q] = u(infinity_param(q));
        fill_node_second_derivatives(p);
        return p;
    }

    // Residual F(u); the Jacobian is assembled when J is non-null.
    void evaluate(const Eigen::VectorXd& u, Eigen::VectorXd& F, Eigen::SparseMatrix<double>* J) const {
        F.setZero(residual_count());
        std::vector<Eigen::Triplet<double>> trip;
        if (J) trip.reserve(std::size_t(N_) * block_ * (3 * m_ + 4));
        int row = 0;
        auto add = [&](int r, int c, double v) {
            if (J && v != 0.0) trip.emplace_back(r, c, v);
        };

        match_origin(u, F, row, J ? &trip : nullptr);

        using D = Dual<double, 12>;
        const int k = cs_.k;
        for (int j = 0; j + 1 < N_; ++j) {
            const double h = mesh_.nodes[j + 1] - mesh_.nodes[j];
            for (int l = 0; l < k; ++l) {
                const double t = cs_.tau[l];
                const double x = mesh_.nodes[j] + h * t;
                D y[4], yp[4], ypp[4], E[4];
                for (int i = 0; i < m_; ++i) {
                    double v = u(y_index(j, i)) + h * t * u(yp_index(j, i));
                    double d = u(yp_index(j, i));
                    for (int q = 0; q < k; ++q) {
                        v += h * h * cs_.I2(q, t) * u(w_index(j, q, i));
                        d += h * cs_.I1(q, t) * u(w_index(j, q, i));
                    }
                    y[i] = D::variable(v, i);
                    yp[i] = D::variable(d, m_ + i);
                    ypp[i] = D::variable(u(w_index(j, l, i)), 2 * m_ + i);
                }
                evolution_raw(f_, x, y, yp, ypp, E);
                for (int i = 0; i < m_; ++i, ++row) {
                    F(row) = E[i].v;
                    if (!J) continue;
                    for (int c = 0; c < m_; ++c) {
                        const double dy = E[i].d[c], dyp = E[i].d[m_ + c], dypp = E[i].d[2 * m_ + c];
                        add(row, y_index(j, c), dy);
                        add(row, yp_index(j, c), dy * h * t + dyp);
                        for (int q = 0; q < k; ++q) {
                            double g = dy * h * h * cs_.I2(q, t) + dyp * h * cs_.I1(q, t);
                            if (q == l) g += dypp;
                            add(row, w_index(j, q, c), g);
                        }
                    }
                }
            }
            for (int i = 0; i < m_; ++i, ++row) {
                double v = u(y_index(j + 1, i)) - u(y_index(j, i)) - h * u(yp_index(j, i));
                for (int q = 0; q < k; ++q) v -= h * h * cs_.I2(q, 1.0) * u(w_index(j, q, i));
                F(row) = v;
                add(row, y_index(j + 1, i), 1.0);
                add(row, y_index(j, i), -1.0);
                add(row, yp_index(j, i), -h);
                for (int q = 0; q < k; ++q) add(row, w_index(j, q, i), -h * h * cs_.I2(q, 1.0));
            }
            for (int i = 0; i < m_; ++i, ++row) {
                double v = u(yp_index(j + 1, i)) - u(yp_index(j, i));
                for (int q = 0; q < k; ++q) v -= h * cs_.I1(q, 1.0) * u(w_index(j, q, i));
                F(row) = v;
                add(row, yp_index(j + 1, i), 1.0);
                add(row, yp_index(j, i), -1.0);
                for (int q = 0; q < k; ++q) add(row, w_index(j, q, i), -h * cs_.I1(q, 1.0));
            }
        }

        match_infinity(u, F, row, J ? &trip : nullptr);

        // first integral at the last node; its error mode decays toward the origin
        {
            using D2 = Dual<double, 8>;
            D2 y[4], yp[4];
            for (int i = 0; i < m_; ++i) {
                y[i] = D2::variable(u(y_index(anchor_, i)), i);
                yp[i] = D2::variable(u(yp_index(anchor_, i)), m_ + i);
            }
            D2 phi = constraint_raw(f_, mesh_.nodes[anchor_], y, yp);
            F(row) = phi.v;
            for (int i = 0; i < m_; ++i) {
                add(row, y_index(anchor_, i), phi.d[i]);
                add(row, yp_index(anchor_, i), phi.d[m_ + i]);
            }
            ++row;
        }
        if (row != residual_count()) throw internal_error("collocation row count mismatch");
        if (J) {
            J->resize(residual_count(), size_);
            J->setFromTriplets(trip.begin(), trip.end());
        }
    }

private:
    using P = Dual<double, 4>;

    void match_origin(const Eigen::VectorXd& u, Eigen::VectorXd& F, int& row, std::vector<Eigen::Triplet<double>>* trip) const {
        P lk = P::variable(u(origin_param(0)), 0);
        std::vector<P> a(m_ - 1);
        for (int q = 1; q < m_; ++q) a[q - 1] = P::variable(u(origin_param(q)), q);
        auto tab = detail::origin_table<P>(f_, log_phi0_, lk, a, origin_order_, nullptr);
        const double xl = mesh_.left();
        for (int i = 0; i < m_; ++i) {
            P v, dv, ddv;
            detail::horner(tab[i], xl, false, v, dv, ddv);
            F(row) = u(y_index(0, i)) - v.v;
            if (trip) {
                trip->emplace_back(row, y_index(0, i), 1.0);
                for (int q = 0; q < m_; ++q) trip->emplace_back(row, origin_param(q), -v.d[q]);
            }
            ++row;
            if (i == 0) continue;  // y_1' follows from the first integral
            // derivative rows are appended after all value rows below
        }
        for (int i = 1; i < m_; ++i) {
            P v, dv, ddv;
            detail::horner(tab[i], xl, false, v, dv, ddv);
            F(row) = u(yp_index(0, i)) - dv.v;
            if (trip) {
                trip->emplace_back(row, yp_index(0, i), 1.0);
                for (int q = 0; q < m_; ++q) trip->emplace_back(row, origin_param(q), -dv.d[q]);
            }
            ++row;
        }
    }

    void match_infinity(const Eigen::VectorXd& u, Eigen::VectorXd& F, int& row, std::vector<Eigen::Triplet<double>>* trip) const {
        std::vector<P> b(m_ - 1);
        for (int q = 0; q + 1 < m_; ++q) b[q] = P::variable(u(infinity_param(q)), q);
        auto tab = detail::infinity_table<P>(f_, b, infinity_order_, nullptr);
        const double s = 1.0 - mesh_.right();
        const int jr = N_ - 1;
        std::vector<P> val(m_), der(m_);
        for (int i = 0; i < m_; ++i) {
            P ddv;
            detail::horner(tab[i], s, true, val[i], der[i], ddv);
        }
        for (int i = 0; i < m_; ++i, ++row) {
            F(row) = u(y_index(jr, i)) - val[i].v;
            if (trip) {
                trip->emplace_back(row, y_index(jr, i), 1.0);
                for (int q = 0; q + 1 < m_; ++q) trip->emplace_back(row, infinity_param(q), -val[i].d[q]);
            }
        }
        for (int i = 1; i < m_; ++i, ++row) {
            F(row) = u(yp_index(jr, i)) - der[i].v;
            if (trip) {
                trip->emplace_back(row, yp_index(jr, i), 1.0);
                for (int q = 0; q + 1 < m_; ++q) trip->emplace_back(row, infinity_param(q), -der[i].d[q]);
            }
        }
    }

    BoundaryData bd_;
    Family f_;
    Mesh mesh_;
    CollocationScheme cs_;
    int origin_order_, infinity_order_;
    int m_ = 0, N_ = 0, block_ = 0, interior_ = 0, size_ = 0, anchor_ = 0;
    std::vector<double> log_phi0_;
};

inline std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>> assemble_collocation(const BoundaryData& bd, const Mesh& mesh,
                                                                                    const SolutionProfile& guess) {
    if (guess.nodes() != mesh.size() || guess.unknowns() != unknown_count(bd.kind) ||
        guess.w.rows() != (mesh.size() - 1) * guess.stages)
        throw usage_error("guess dimensions do not match the mesh");
    CollocationSystem sys(bd, mesh, guess.stages, guess.origin_order, guess.infinity_order);
    Eigen::VectorXd F;
    Eigen::SparseMatrix<double> J;
    sys.evaluate(sys.pack(guess), F, &J);
    return {F, J};
}

// sup over mesh nodes of |Phi|
inline double constraint_sup(const SolutionProfile& p) {
    Family f = p.bd.family();
    double s = 0.0;
    for (int j = 0; j < p.nodes(); ++j) {
        auto st = p.node_state(j);
        s = std::max(s, std::abs(constraint_raw(f, st.x, st.y.data(), st.yp.data())));
    }
    return s;
}

inline std::pair<SolutionProfile, SolveReport> newton_solve(const BoundaryData& bd, const Mesh& mesh, const SolutionProfile& guess,
                                                            double tol, int max_iter) {
    if (!(tol > 0.0)) throw usage_error("tol must be positive");
    auto t0 = std::chrono::steady_clock::now();
    CollocationSystem sys(bd, mesh, guess.stages, guess.origin_order, guess.infinity_order);
    if (sys.size() != sys.residual_count()) throw internal_error("collocation system is not square");
    SolveReport rep;
    Eigen::VectorXd u = sys.pack(guess), F, Fn, u_new;
    Eigen::SparseMatrix<double> J;
    auto finite = [](const Eigen::VectorXd& v) { return v.allFinite(); };
    auto safe_eval = [&](const Eigen::VectorXd& uu, Eigen::VectorXd& FF, Eigen::SparseMatrix<double>* JJ) {
        try {
            sys.evaluate(uu, FF, JJ);
            return finite(FF);
        } catch (const std::exception&) {
            return false;
        }
    };
    auto finish = [&](bool ok, const std::string& msg) {
        SolutionProfile p = sys.unpack(u);
        p.tol = tol;
        p.residual_norm = rep.residual_norm;
        rep.constraint_drift = p.y.allFinite() ? constraint_sup(p) : std::numeric_limits<double>::infinity();
        p.converged = ok && rep.constraint_drift <= 10.0 * tol;
        rep.converged = p.converged;
        rep.message = ok && !p.converged ? "residual converged but constraint drift exceeds 10*tol" : msg;
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::make_pair(std::move(p), rep);
    };

    if (!safe_eval(u, F, nullptr)) {
        rep.residual_norm = std::numeric_limits<double>::infinity();
        return finish(false, "initial guess is not evaluable");
    }
    rep.residual_norm = F.lpNorm<Eigen::Infinity>();
    rep.residual_history.push_back(F.norm());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    const double min_damping = std::ldexp(1.0, -20);
    for (int it = 0; it < max_iter; ++it) {
        if (rep.residual_norm <= tol) return finish(true, "converged");
        sys.evaluate(u, F, &J);
        J.makeCompressed();
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) return finish(false, "singular linearization");
        Eigen::VectorXd du = lu.solve(-F);
        if (lu.info() != Eigen::Success || !du.allFinite()) return finish(false, "singular linearization");
        const double f0 = 0.5 * F.squaredNorm();
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= min_damping) {
            u_new = u + lambda * du;
            if (safe_eval(u_new, Fn, nullptr) && 0.5 * Fn.squaredNorm() <= (1.0 - 2e-4 * lambda) * f0) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return finish(false, "line search failed at minimum damping");
        u = u_new;
        F = Fn;
        rep.iterations = it + 1;
        rep.damping_history.push_back(lambda);
        rep.residual_history.push_back(F.norm());
        rep.residual_norm = F.lpNorm<Eigen::Infinity>();
    }
    if (rep.residual_norm <= tol) return finish(true, "converged");
    return finish(false, "maximum iterations exceeded");
}

// Same solution sampled on a new mesh (used for warm starts and refinement).
inline SolutionProfile interpolate_profile(const SolutionProfile& src, const Mesh& mesh, int stages = -1) {
    if (stages < 0) stages = src.stages;
    mesh.validate();
    const int m = src.unknowns(), N = mesh.size();
    auto os = src.origin_series();
    auto is = src.infinity_series();
    CollocationScheme cs(stages);
    SolutionProfile p = src;
    p.mesh = mesh;
    p.stages = stages;
    p.y.resize(N, m);
    p.yp.resize(N, m);
    p.ypp.resize(N, m);
    p.w.resize((N - 1) * stages, m);
    for (int j = 0; j < N; ++j) {
        auto s = profile_state_at(src, mesh.nodes[j], &os, &is);
        for (int i = 0; i < m; ++i) {
            p.y(j, i) = s.y[i];
            p.yp(j, i) = s.yp[i];
            p.ypp(j, i) = s.ypp[i];
        }
    }
    for (int j = 0; j + 1 < N; ++j) {
        const double h = mesh.nodes[j + 1] - mesh.nodes[j];
        for (int l = 0; l < stages; ++l) {
            auto s = profile_state_at(src, mesh.nodes[j] + h * cs.tau[l], &os, &is);
            for (int i = 0; i < m; ++i) p.w(j * stages + l, i) = s.ypp[i];
        }
    }
    p.converged = false;
    return p;
}

// max |evolution residual| of the collocation polynomial on interval j, sampled away from the collocation points
inline double interval_defect(const SolutionProfile& p, int j) {
    Family f = p.bd.family();
    CollocationScheme cs(p.stages);
    std::vector<double> ts{0.0, 1.0};
    for (int l = 0; l + 1 < cs.k; ++l) ts.push_back(0.5 * (cs.tau[l] + cs.tau[l + 1]));
    if (cs.k == 1) ts.push_back(0.25);
    const double h = p.mesh.nodes[j + 1] - p.mesh.nodes[j];
    double worst = 0.0;
    std::vector<double> E(f.m);
    for (double t : ts) {
        auto s = profile_state_at(p, p.mesh.nodes[j] + h * t);
        evolution_raw(f, s.x, s.y.data(), s.yp.data(), s.ypp.data(), E.data());
        for (double e : E) worst = std::max(worst, std::abs(e));
    }
    return worst;
}

inline Mesh refine_mesh(const SolutionProfile& profile, double target) {
    const Mesh& old = profile.mesh;
    Mesh out;
    out.grading = old.grading;
    out.nodes.push_back(old.nodes[0]);
    for (int j = 0; j + 1 < old.size(); ++j) {
        if (interval_defect(profile, j) > target) out.nodes.push_back(0.5 * (old.nodes[j] + old.nodes[j + 1]));
        out.nodes.push_back(old.nodes[j + 1]);
    }
    return out;
}

inline std::pair<SolutionProfile, SolveReport> solve_from(const BoundaryData& bd, const SolutionProfile& start, const SolveOptions& opt) {
    auto [p, rep] = newton_solve(bd, start.mesh, start, opt.tol, opt.max_iter);
    int refinements = 0;
    while (p.converged && opt.refine_target > 0.0 && refinements < opt.max_refinements) {
        Mesh nm = refine_mesh(p, opt.refine_target);
        if (nm.size() == p.mesh.size()) break;
        auto [p2, rep2] = newton_solve(bd, nm, interpolate_profile(p, nm), opt.tol, opt.max_iter);
        ++refinements;
        rep2.iterations += rep.iterations;
        rep2.wall_time += rep.wall_time;
        p = std::move(p2);
        rep = std::move(rep2);
        if (!p.converged) break;
    }
    rep.refinements = refinements;
    return {std::move(p), std::move(rep)};
}

inline SolutionProfile seed_for(const BoundaryData& bd, const SolveOptions& opt) {
    Mesh mesh = make_mesh(opt.nodes, opt.x_left, opt.x_right, opt.stretch);
    SolutionProfile s = seed_profile(bd, mesh, opt.stages, opt.seed);
    s.origin_order = opt.origin_order;
    s.infinity_order = opt.infinity_order;
    return s;
}

// Top-level driver. If `warm` is given it is interpolated onto the requested mesh and used as the initial guess.
inline std::pair<SolutionProfile, SolveReport> solve_bvp(const BoundaryData& bd, const SolveOptions& opt = {},
                                                         const SolutionProfile* warm = nullptr) {
    bd.validate();
    auto t0 = std::chrono::steady_clock::now();
    SolutionProfile start = seed_for(bd, opt);
    if (warm) {
        SolutionProfile w = *warm;
        w.bd = bd;
        start = interpolate_profile(w, start.mesh, opt.stages);
        start.bd = bd;
        start.origin_order = opt.origin_order;
        start.infinity_order = opt.infinity_order;
    }
    auto res = solve_from(bd, start, opt);
    if (!res.first.converged && opt.homotopy_retry && !bd.is_round()) {
        BoundaryData half = bd;
        for (auto& v : half.phi0) v = std::sqrt(v);
        SolveOptions o2 = opt;
        o2.homotopy_retry = false;
        auto mid = solve_from(half, seed_for(half, o2), o2);
        if (mid.first.converged) {
            SolutionProfile s2 = mid.first;
            s2.bd = bd;
            auto res2 = solve_from(bd, s2, o2);
            res2.second.homotopy_used = true;
            res2.second.iterations += res.second.iterations + mid.second.iterations;
            res = std::move(res2);
        }
    }
    res.second.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cce
