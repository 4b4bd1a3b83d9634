#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "profile.hpp"
#include "solver.hpp"
#include "systems.hpp"

namespace cce {

enum class StopReason { PathEnd, Event, MinStep };

inline std::string to_string(StopReason s) {
    switch (s) {
        case StopReason::PathEnd: return "path-end";
        case StopReason::Event: return "event";
        case StopReason::MinStep: return "min-step";
    }
    return "?";
}

// Boundary ratios along the path are phi_i = lambda^e_i (e_i = 1 by default).
struct SweepPlan {
    SystemKind kind = SystemKind::SUInvariant;
    int n = 3;
    std::vector<double> exponents;
    double start = 1.0;
    double end = 0.5;
    double initial_step = 0.05;
    double min_step = 1e-4;
    double max_step = 0.2;
    double event_tol = 1e-6;

    void validate() const {
        validate_dimension(kind, n);
        if (start != 1.0) throw usage_error("sweep must start at lambda = 1");
        if (!(end > 0.0) || !std::isfinite(end)) throw usage_error("sweep end must be positive");
        if (!(initial_step > 0.0 && min_step > 0.0 && max_step >= min_step)) throw usage_error("sweep steps must be positive with max_step >= min_step");
        if (!(event_tol > 0.0)) throw usage_error("event tolerance must be positive");
        if (!exponents.empty() && int(exponents.size()) != nonlocal_count(kind)) throw usage_error("one path exponent per boundary ratio");
    }

    BoundaryData data_at(double lambda) const {
        BoundaryData bd{kind, n, std::vector<double>(nonlocal_count(kind), 1.0)};
        for (std::size_t i = 0; i < bd.phi0.size(); ++i) {
            const double e = exponents.empty() ? 1.0 : exponents[i];
            bd.phi0[i] = lambda == 1.0 ? 1.0 : std::pow(lambda, e);
        }
        return bd;
    }
};

struct TraceRecord {
    double lambda = 1.0;
    double K0 = 1.0;
    std::vector<double> free;  // origin nonlocal parameters
    double max_curvature = -1.0;
    std::string witness_plane;
    double witness_x = 0.0;
    int iterations = 0;
};

struct EventRecord {
    double lambda_event = 0.0;
    double lambda_no_event = 0.0;  // last lambda with all monitored curvatures negative
    double lambda_with_event = 0.0;
    CurvatureSample witness;
    double bracket_width = 0.0;
    bool certified = true;
    std::string annotation;
};

struct ContinuationTrace {
    SweepPlan plan;
    std::vector<TraceRecord> records;
    StopReason stop = StopReason::PathEnd;
    std::optional<EventRecord> event;
    std::optional<SolutionProfile> last_clean;  // profile at the last no-event lambda
    std::optional<SolutionProfile> event_profile;
};

// One solve along the path, with its curvature summary.
struct ProbeResult {
    bool converged = false;
    std::optional<CurvatureSample> event;
    CurvatureSample maximum;
    int iterations = 0;
    std::optional<SolutionProfile> profile;
};

using Probe = std::function<ProbeResult(double lambda, const SolutionProfile* warm)>;

inline CurvatureSample max_curvature_sample(const SolutionProfile& p) {
    auto samples = curvature_samples(reconstruct_metric(p));
    CurvatureSample best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        if (s.value > best.value) best = s;
    return best;
}

// First node (in x) at which some monitored plane has nonnegative curvature.
inline std::optional<CurvatureSample> detect_curvature_event(const SolutionProfile& p) {
    auto samples = curvature_samples(reconstruct_metric(p));
    std::optional<CurvatureSample> hit;
    for (const auto& s : samples) {
        if (s.value < 0.0) continue;
        if (!hit || s.x < hit->x || (s.x == hit->x && s.value > hit->value)) hit = s;
    }
    return hit;
}

inline Probe make_solver_probe(const SweepPlan& plan, const SolveOptions& opt) {
    return [plan, opt](double lambda, const SolutionProfile* warm) {
        ProbeResult r;
        auto [p, rep] = solve_bvp(plan.data_at(lambda), opt, warm);
        r.converged = p.converged;
        r.iterations = rep.iterations;
        if (p.converged) {
            r.maximum = max_curvature_sample(p);
            r.event = detect_curvature_event(p);
            r.profile = std::move(p);
        }
        return r;
    };
}

inline TraceRecord make_record(double lambda, const ProbeResult& r) {
    TraceRecord t;
    t.lambda = lambda;
    t.max_curvature = r.maximum.value;
    t.witness_plane = r.maximum.plane_id();
    t.witness_x = r.maximum.x;
    t.iterations = r.iterations;
    if (r.profile) {
        t.K0 = r.profile->K0();
        t.free = r.profile->free.coeffs;
    }
    return t;
}

inline ContinuationTrace sweep(const SweepPlan& plan, const Probe& probe) {
    plan.validate();
    ContinuationTrace tr;
    tr.plan = plan;
    double lambda = plan.start;
    ProbeResult first = probe(lambda, nullptr);
    if (!first.converged) throw internal_error("solve at round data failed");
    tr.records.push_back(make_record(lambda, first));
    if (first.event) {
        tr.stop = StopReason::Event;
        tr.event_profile = first.profile;
        return tr;
    }
    tr.last_clean = first.profile;
    const double dir = plan.end >= plan.start ? 1.0 : -1.0;
    double step = plan.initial_step;
    int streak = 0;
    while (true) {
        const double remaining = std::abs(plan.end - lambda);
        if (remaining <= 1e-14) {
            tr.stop = StopReason::PathEnd;
            return tr;
        }
        const double next = remaining <= step ? plan.end : lambda + dir * step;
        ProbeResult r = probe(next, tr.last_clean ? &*tr.last_clean : nullptr);
        if (!r.converged) {
            step *= 0.5;
            streak = 0;
            if (step < plan.min_step) {
                tr.stop = StopReason::MinStep;
                return tr;
            }
            continue;
        }
        tr.records.push_back(make_record(next, r));
        if (r.event) {
            tr.stop = StopReason::Event;
            tr.event_profile = std::move(r.profile);
            EventRecord ev;
            ev.lambda_no_event = lambda;
            ev.lambda_with_event = next;
            ev.witness = *r.event;
            ev.bracket_width = std::abs(next - lambda);
            ev.lambda_event = 0.5 * (lambda + next);
            tr.event = ev;
            return tr;
        }
        tr.last_clean = std::move(r.profile);
        lambda = next;
        if (++streak >= 3) {
            step = std::min(step * 1.5, plan.max_step);
            streak = 0;
        }
    }
}

inline ContinuationTrace sweep(const SweepPlan& plan, const SolveOptions& opt = {}) { return sweep(plan, make_solver_probe(plan, opt)); }

// Shrinks the trace's event bracket to tol_lambda by re-solving midpoints.
inline EventRecord bisect_event(const ContinuationTrace& trace, double tol_lambda, const Probe& probe) {
    if (!trace.event) throw usage_error("trace holds no event bracket");
    if (!(tol_lambda > 0.0)) throw usage_error("bisection tolerance must be positive");
    EventRecord ev = *trace.event;
    std::optional<SolutionProfile> clean = trace.last_clean;
    while (std::abs(ev.lambda_with_event - ev.lambda_no_event) > tol_lambda) {
        const double mid = 0.5 * (ev.lambda_no_event + ev.lambda_with_event);
        ProbeResult r = probe(mid, clean ? &*clean : nullptr);
        if (!r.converged) {
            ev.certified = false;
            ev.annotation = "solver failure at lambda = " + std::to_string(mid);
            break;
        }
        if (r.event) {
            ev.lambda_with_event = mid;
            ev.witness = *r.event;
        } else {
            ev.lambda_no_event = mid;
            clean = std::move(r.profile);
        }
    }
    ev.bracket_width = std::abs(ev.lambda_with_event - ev.lambda_no_event);
    ev.lambda_event = 0.5 * (ev.lambda_no_event + ev.lambda_with_event);
    return ev;
}

inline EventRecord bisect_event(const ContinuationTrace& trace, double tol_lambda, const SolveOptions& opt = {}) {
    return bisect_event(trace, tol_lambda, make_solver_probe(trace.plan, opt));
}

}  // namespace cce
