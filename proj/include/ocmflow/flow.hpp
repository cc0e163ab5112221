#pragma once

// Advances the support function under
//   dh/dt = (1/f) sigma_k phi(h) h eta(t) - h,
//   eta(t) = int h f / phi(h) dx / int h sigma_k dx,
// with classical RK4, eta recomputed inside every stage, adaptive step size
// (per-step relative-change cap, an explicit-diffusion stability ceiling, and
// guard-rejection with halving), and stationarity detection.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "ocmflow/convex_geometry.hpp"
#include "ocmflow/diagnostics.hpp"
#include "ocmflow/grid.hpp"
#include "ocmflow/orlicz.hpp"

namespace ocmflow {

struct FlowConfig {
    int k = 1;
    OrliczModel model;
    ScalarField f;
    double dt0 = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.25;
    double step_cap_delta = 1e-3;   // max per-step relative change of h
    double tol_stationary = 1e-9;   // stop when sup|dh/dt| / sup h <= tol
    double t_max = std::numeric_limits<double>::infinity();
    long step_max = 5'000'000;
};

struct FlowState {
    ScalarField h;
    double t = 0.0;
    long step = 0;
    double dt = 0.0;   // next proposed step size
};

enum class TerminationReason { converged, budget_exhausted, convexity_lost };

inline const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::converged: return "converged";
        case TerminationReason::budget_exhausted: return "budget-exhausted";
        default: return "convexity-lost";
    }
}

struct ConvexityLost : std::runtime_error {
    std::size_t node;
    double t;
    double value;
    ConvexityLost(const std::string& what, std::size_t node_, double t_, double value_)
        : std::runtime_error(what), node(node_), t(t_), value(value_) {}
};

struct RunResult {
    FlowState state;
    TerminationReason reason = TerminationReason::converged;
    std::string detail;
};

struct FlowObservers {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(const FlowState&, const ScalarField& rhs)> on_state;
};

namespace detail {

struct GuardViolation {
    enum class Kind { nonpositive_h, nonconvex, nonpositive_volume } kind;
    std::size_t node = 0;
    double value = 0.0;

    std::string describe() const {
        switch (kind) {
            case Kind::nonpositive_h: return "support function non-positive";
            case Kind::nonconvex: return "principal radii matrix not positive definite";
            default: return "mixed volume non-positive";
        }
    }
};

struct RhsEval {
    CurvatureBundle bundle;
    EtaParts eta;
    ScalarField rhs;
};

inline RhsEval eval_rhs(const ScalarField& h, const FlowConfig& cfg) {
    for (std::size_t i = 0; i < h.size(); ++i)
        if (!(h.values[i] > 0.0))
            throw GuardViolation{GuardViolation::Kind::nonpositive_h, i, h.values[i]};
    RhsEval ev;
    ev.bundle = curvature_bundle(h, cfg.k);
    ev.eta = eta_parts(h, cfg.f, cfg.model, ev.bundle.sigma_k);
    if (!(ev.eta.denominator > 0.0))
        throw GuardViolation{GuardViolation::Kind::nonpositive_volume, 0,
                             ev.eta.denominator};
    double eta = ev.eta.value();
    ev.rhs = ScalarField(h.grid);
    for (std::size_t i = 0; i < h.size(); ++i) {
        double hv = h.values[i];
        ev.rhs.values[i] =
            ev.bundle.sigma_k.values[i] * phi(cfg.model, hv) * hv * eta / cfg.f.values[i] -
            hv;
    }
    return ev;
}

// explicit-diffusion stability ceiling for RK4 from the current state:
// the linearized speed is N eta sigma_k^{ij} acting through grad_ij, bounded
// by the grid's spectral bound times the largest pointwise coefficient
inline double stability_dt(const ScalarField& h, const FlowConfig& cfg,
                           const RhsEval& ev) {
    double eta = ev.eta.value();
    double coef = 0.0, zeroth = 0.0;
    const int d = h.grid->dim;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double hv = h.values[i];
        double N = phi(cfg.model, hv) * hv / cfg.f.values[i];
        double smax;  // largest eigenvalue of sigma_k^{ij}
        if (d == 1)
            smax = 1.0;
        else if (cfg.k == 1)
            smax = 0.5;
        else
            smax = std::max(std::abs(ev.bundle.radii_lo[i]),
                            std::abs(ev.bundle.radii_hi[i]));
        coef = std::max(coef, N * smax);
        double dNdh = (phi(cfg.model, hv) + hv * phi_prime(cfg.model, hv)) / cfg.f.values[i];
        zeroth = std::max(zeroth,
                          std::abs(ev.bundle.sigma_k.values[i] * eta * dNdh) + 1.0);
    }
    double lam = coef * eta * h.grid->laplacian_spectral_bound + zeroth;
    return 1.8 / lam;  // RK4 real-axis limit 2.785 with a safety margin
}

}  // namespace detail

// eta as a standalone operation
inline double eta(const ScalarField& h, const ScalarField& f, const OrliczModel& model,
                  int k) {
    CurvatureBundle cb = curvature_bundle(h, k);
    EtaParts parts = eta_parts(h, f, model, cb.sigma_k);
    if (!(parts.denominator > 0.0))
        throw std::domain_error("eta: non-positive mixed volume (state left the convex cone)");
    return parts.value();
}

inline ScalarField flow_rhs(const ScalarField& h, const FlowConfig& cfg) {
    try {
        return detail::eval_rhs(h, cfg).rhs;
    } catch (const detail::GuardViolation& g) {
        throw std::domain_error("flow_rhs: " + g.describe());
    }
}

namespace detail {

// one guarded RK4 step; eval0 is the rhs evaluation at state.h
inline FlowState step_impl(const FlowState& state, const FlowConfig& cfg,
                           const RhsEval& eval0) {
    const ScalarField& h = state.h;
    double dt = state.dt > 0.0 ? state.dt : cfg.dt0;
    dt = std::min(dt, cfg.dt_max);
    dt = std::min(dt, stability_dt(h, cfg, eval0));
    dt = std::max(dt, cfg.dt_min);

    GuardViolation last{GuardViolation::Kind::nonconvex, 0, 0.0};
    for (int attempt = 0; attempt <= 20; ++attempt) {
        try {
            ScalarField h2 = axpy(0.5 * dt, eval0.rhs, h);
            RhsEval e2 = eval_rhs(h2, cfg);
            ScalarField h3 = axpy(0.5 * dt, e2.rhs, h);
            RhsEval e3 = eval_rhs(h3, cfg);
            ScalarField h4 = axpy(dt, e3.rhs, h);
            RhsEval e4 = eval_rhs(h4, cfg);

            ScalarField hn(h.grid);
            double rel_change = 0.0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                double incr = dt / 6.0 *
                              (eval0.rhs.values[i] + 2.0 * e2.rhs.values[i] +
                               2.0 * e3.rhs.values[i] + e4.rhs.values[i]);
                hn.values[i] = h.values[i] + incr;
                rel_change = std::max(rel_change, std::abs(incr) / h.values[i]);
            }

            if (rel_change > cfg.step_cap_delta) {
                if (dt <= cfg.dt_min)
                    throw ConvexityLost(
                        "step: relative change exceeds step_cap_delta at dt_min", 0,
                        state.t, rel_change);
                dt = std::max(0.5 * dt, cfg.dt_min);
                continue;
            }
            // hard guards on the tentative state
            for (std::size_t i = 0; i < h.size(); ++i)
                if (!(hn.values[i] > 0.0))
                    throw GuardViolation{GuardViolation::Kind::nonpositive_h, i,
                                         hn.values[i]};
            CurvatureBundle cb = curvature_bundle(hn, cfg.k);
            if (!(cb.min_radius > 0.0)) {
                ConvexityMargin m = convexity_margin(cb, hn);
                throw GuardViolation{GuardViolation::Kind::nonconvex, m.min_radius_node,
                                     cb.min_radius};
            }

            FlowState out;
            out.h = std::move(hn);
            out.t = state.t + dt;
            out.step = state.step + 1;
            out.dt = std::min(dt * 1.25, cfg.dt_max);
            return out;
        } catch (const GuardViolation& g) {
            last = g;
            if (dt <= cfg.dt_min) break;
            dt = std::max(0.5 * dt, cfg.dt_min);
        }
    }
    throw ConvexityLost("step: " + last.describe() + " persists at dt_min (node " +
                            std::to_string(last.node) + ")",
                        last.node, state.t, last.value);
}

}  // namespace detail

inline FlowState step(const FlowState& state, const FlowConfig& cfg) {
    try {
        detail::RhsEval ev = detail::eval_rhs(state.h, cfg);
        return detail::step_impl(state, cfg, ev);
    } catch (const detail::GuardViolation& g) {
        throw ConvexityLost("step: " + g.describe() + " at node " + std::to_string(g.node),
                            g.node, state.t, g.value);
    }
}

inline void validate_config(const FlowConfig& cfg, const ScalarField& h0) {
    if (!h0.grid) throw std::invalid_argument("run: initial field has no grid");
    if (cfg.f.grid.get() != h0.grid.get())
        throw std::invalid_argument("run: f and h0 live on different grids");
    if (cfg.k < 1 || cfg.k > h0.grid->dim)
        throw std::invalid_argument("run: need 1 <= k <= n-1");
    for (double v : cfg.f.values)
        if (!(v > 0.0)) throw std::invalid_argument("run: f must be strictly positive");
    if (!(cfg.dt_min <= cfg.dt0 && cfg.dt0 <= cfg.dt_max))
        throw std::invalid_argument("run: need dt_min <= dt0 <= dt_max");
    if (!(cfg.step_cap_delta > 0.0) || !(cfg.tol_stationary > 0.0))
        throw std::invalid_argument("run: step_cap_delta and tol_stationary must be positive");
}

inline RunResult run(const FlowConfig& cfg, const ScalarField& h0,
                     const FlowObservers& obs = {}) {
    validate_config(cfg, h0);
    RunResult result;
    FlowState state;
    state.h = h0;
    state.t = 0.0;
    state.step = 0;
    state.dt = cfg.dt0;

    while (true) {
        detail::RhsEval ev;
        try {
            ev = detail::eval_rhs(state.h, cfg);
        } catch (const detail::GuardViolation& g) {
            result.state = state;
            result.reason = TerminationReason::convexity_lost;
            result.detail = g.describe() + " at node " + std::to_string(g.node);
            return result;
        }
        {
            CurvatureBundle& cb = ev.bundle;
            if (!(cb.min_radius > 0.0)) {
                result.state = state;
                result.reason = TerminationReason::convexity_lost;
                result.detail = "principal radii matrix not positive definite";
                return result;
            }
        }

        if (obs.on_record) {
            DiagnosticsRecord rec =
                make_record(state.h, cfg.f, cfg.model, cfg.k, state.t, state.dt);
            obs.on_record(rec);
        }
        if (obs.on_state) obs.on_state(state, ev.rhs);

        double sup_rhs = sup_abs(ev.rhs.values);
        double sup_h = sup_abs(state.h.values);
        if (sup_rhs <= cfg.tol_stationary * sup_h) {
            result.state = state;
            result.reason = TerminationReason::converged;
            result.detail = "sup|dh/dt|/sup h = " + std::to_string(sup_rhs / sup_h);
            return result;
        }
        if (state.t >= cfg.t_max || state.step >= cfg.step_max) {
            result.state = state;
            result.reason = TerminationReason::budget_exhausted;
            result.detail = state.t >= cfg.t_max ? "t_max reached" : "step_max reached";
            return result;
        }

        try {
            state = detail::step_impl(state, cfg, ev);
        } catch (const ConvexityLost& e) {
            result.state = state;
            result.reason = TerminationReason::convexity_lost;
            result.detail = e.what();
            return result;
        }
    }
}

}  // namespace ocmflow
